//! Full-feedback online selection: projected gradient ascent recommends a
//! fractional point each stage, the temporal rank-1 scheme rounds it, and
//! alpha-regret (alpha = 1/e) is tracked against the best fixed point in
//! hindsight.

use dynsel::adversaries::UniformAdversary;
use dynsel::constraints::{Activity, ConstraintFamily, InstanceSequence};
use dynsel::ocrs::{GreedyOcrs, Rank1Ocrs};
use dynsel::regret::{
    alpha_regret, compute_benchmarks, full_feedback_run, ProjectedGradientAscent, Selector,
};
use dynsel::stats::{loglog_slope, mean};

fn main() {
    let m = 4;
    let family = ConstraintFamily::rank1(m);
    let seq =
        InstanceSequence::from_arrivals(&vec![1.0; m], &vec![Activity::Infinite; m]).unwrap();
    let scheme = Rank1Ocrs { m };
    let alpha = scheme.selectability_constant(1.0);
    let adversary = UniformAdversary { m, seed: 42 };

    let mut points = Vec::new();
    for &horizon in &[256u64, 512, 1024, 2048, 4096] {
        let regrets: Vec<f64> = (0..10u64)
            .map(|seed| {
                let mut rm = ProjectedGradientAscent::new(&family, &seq).unwrap();
                let trace = full_feedback_run(
                    horizon,
                    &family,
                    &seq,
                    &mut rm,
                    &Selector::TemporalOcrs { scheme: &scheme, b: 1.0 },
                    &adversary,
                    seed,
                )
                .unwrap();
                let bench = compute_benchmarks(&trace, &family, &seq).unwrap();
                alpha_regret(&trace, &bench, alpha)
            })
            .collect();
        let avg = mean(&regrets);
        println!("T = {horizon:5}: mean {alpha:.3}-regret = {avg:9.2}");
        points.push((horizon as f64, avg));
    }
    println!("log-log slope: {:.3} (sublinear target < 1)", loglog_slope(&points, 1.0));
}
