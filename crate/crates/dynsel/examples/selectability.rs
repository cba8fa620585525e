//! Monte-Carlo selectability of the built-in greedy schemes against their
//! proven constants (1/e for rank-1, e^{-2b} for matchings).

use dynsel::coins::{unit_draw, STREAM_SUBFAMILY};
use dynsel::constraints::{active_elements, Activity, FractionalPoint, InstanceSequence};
use dynsel::ocrs::{selectable_event, GreedyOcrs, MatchingOcrs, Rank1Ocrs};

fn conditional_selectability(
    scheme: &dyn GreedyOcrs,
    x: &FractionalPoint,
    seq: &InstanceSequence,
    runs: u64,
) -> Vec<f64> {
    let m = seq.len();
    let mut h = vec![0u64; m];
    let mut ev = vec![0u64; m];
    for seed in 0..runs {
        for e in 0..m {
            let in_h = unit_draw(seed, e as u64, STREAM_SUBFAMILY)
                < scheme.accept_probability(x.values[e]);
            if in_h {
                h[e] += 1;
                if selectable_event(scheme, x, e, active_elements(e, seq), seed) {
                    ev[e] += 1;
                }
            }
        }
    }
    (0..m).map(|e| ev[e] as f64 / h[e].max(1) as f64).collect()
}

fn main() {
    let runs = 100_000;

    // rank-1: four elements with overlapping activity windows
    let acts = [Activity::Finite(1), Activity::Finite(2), Activity::Infinite, Activity::Finite(0)];
    let seq = InstanceSequence::from_arrivals(&[1.0; 4], &acts).unwrap();
    let scheme = Rank1Ocrs { m: 4 };
    let x = FractionalPoint::new(vec![0.3, 0.25, 0.2, 0.15]).unwrap();
    let cond = conditional_selectability(&scheme, &x, &seq, runs);
    println!("rank-1 scheme, target c = {:.5}", scheme.selectability_constant(1.0));
    for (e, c) in cond.iter().enumerate() {
        println!("  element {e}: conditional selectability {c:.4}");
    }

    // matching on a 4-cycle at b = 1/2
    let edges = vec![[0, 1], [1, 2], [2, 3], [3, 0]];
    let b = 0.5;
    let mscheme = MatchingOcrs::new(edges, b);
    let mseq = InstanceSequence::from_arrivals(&[1.0; 4], &[Activity::Infinite; 4]).unwrap();
    let mx = FractionalPoint::new(vec![0.25, 0.2, 0.25, 0.2]).unwrap();
    let mcond = conditional_selectability(&mscheme, &mx, &mseq, runs);
    println!("matching scheme at b = {b}, target c = {:.5}", mscheme.selectability_constant(b));
    for (e, c) in mcond.iter().enumerate() {
        println!("  edge {e}: conditional selectability {c:.4}");
    }
}
