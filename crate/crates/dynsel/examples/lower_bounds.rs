//! Two constructions where no fixed fractional point keeps up with the
//! per-stage dynamic optimum: a fair-coin gadget that forces linear regret
//! against the dynamic benchmark, and a spike family separating an informed
//! scheme from every fixed guess.

use dynsel::adversaries::{
    gen_spike_stage, spike_delta, CoinStage, SpikeStage, DEFAULT_COIN_EPS,
};
use dynsel::experiments::coin_run;
use dynsel::stats::mean;

fn main() {
    let eps = DEFAULT_COIN_EPS;
    let ps = [0.0, 0.25, 0.5, 0.75, 1.0];
    println!("coin gadget (eps = {eps}), 20 seeds per horizon");
    for &horizon in &[1_000u64, 10_000] {
        let mut dyn_means = Vec::new();
        let mut regrets = vec![Vec::new(); ps.len()];
        for seed in 0..20u64 {
            let (dynopt, totals) = coin_run(seed, horizon, eps, &ps);
            dyn_means.push(dynopt / horizon as f64);
            for (r, total) in regrets.iter_mut().zip(&totals) {
                r.push(dynopt - total);
            }
        }
        println!(
            "  T = {horizon:6}: dynamic optimum per stage {:.4} (expected 1.5)",
            mean(&dyn_means)
        );
        for (p, r) in ps.iter().zip(&regrets) {
            let exact = 1.5 - CoinStage::expected_policy_value(*p, eps);
            println!(
                "    fixed p = {p:4.2}: regret per stage {:.4} (exact {:.4})",
                mean(r) / horizon as f64,
                exact
            );
        }
    }

    let n = 8;
    let alpha = 1.0 / std::f64::consts::E;
    let delta = spike_delta(n, alpha).unwrap();
    let horizon = 5_000u64;
    let mut informed = Vec::new();
    for t in 1..=horizon {
        let stage = gen_spike_stage(99, t, n, alpha).unwrap();
        informed.push(stage.informed_expected_value(delta));
    }
    let best_fixed = SpikeStage::best_fixed_guess_value(n, delta);
    println!(
        "\nspike family (n = {n}, delta = {delta:.4}): informed per stage {:.6}, \
         best fixed guess {:.6}, gap {:.6} (target delta^2 = {:.6})",
        mean(&informed),
        best_fixed,
        mean(&informed) - best_fixed,
        delta * delta
    );
}
