//! Semi-bandit online selection, two ways: importance-weighted estimates
//! when per-element delivery probabilities are available (white-box scheme),
//! and blocked exploration when the scheme is a black box.

use dynsel::adversaries::UniformAdversary;
use dynsel::constraints::{Activity, ConstraintFamily, InstanceSequence};
use dynsel::ocrs::{GreedyOcrs, Rank1Ocrs};
use dynsel::regret::{
    alpha_regret, blocked_semibandit_run, compute_benchmarks, semibandit_osmd_run,
    ProjectedGradientAscent,
};
use dynsel::stats::mean;

fn main() {
    let m = 3;
    let family = ConstraintFamily::rank1(m);
    let seq =
        InstanceSequence::from_arrivals(&vec![1.0; m], &vec![Activity::Infinite; m]).unwrap();
    let scheme = Rank1Ocrs { m };
    let alpha = scheme.selectability_constant(1.0);
    let adversary = UniformAdversary { m, seed: 7 };

    for &horizon in &[512u64, 2048, 8192] {
        let osmd: Vec<f64> = (0..10u64)
            .map(|seed| {
                let mut rm = ProjectedGradientAscent::new(&family, &seq).unwrap();
                let trace = semibandit_osmd_run(
                    horizon, &family, &seq, &mut rm, &scheme, 1.0, &adversary, seed,
                )
                .unwrap();
                let bench = compute_benchmarks(&trace, &family, &seq).unwrap();
                alpha_regret(&trace, &bench, alpha)
            })
            .collect();
        let blocked: Vec<f64> = (0..10u64)
            .map(|seed| {
                let mut rm = ProjectedGradientAscent::new(&family, &seq).unwrap();
                let trace = blocked_semibandit_run(
                    horizon, &family, &seq, &mut rm, &scheme, &adversary, seed,
                )
                .unwrap();
                let bench = compute_benchmarks(&trace, &family, &seq).unwrap();
                alpha_regret(&trace, &bench, alpha)
            })
            .collect();
        println!(
            "T = {horizon:5}: importance-weighted regret {:9.2}, blocked-exploration regret {:9.2}",
            mean(&osmd),
            mean(&blocked)
        );
    }
}
