//! Independent oracles used by the acceptance suite: exhaustive enumeration
//! of the scheme's randomness for small ground sets, and a clairvoyant
//! offline optimum for small reusable-matching instances.

use dynsel::constraints::{
    active_elements, ElementSet, FractionalPoint, InstanceSequence,
};
use dynsel::lp::MatchingInstance;
use dynsel::ocrs::GreedyOcrs;

/// Exact per-element selection probabilities for a scheme run in arrival
/// order, by enumerating every (sample set, subfamily draw) pair (m <= ~12).
/// `temporal` switches the feasibility context between the whole selection
/// (base run) and its intersection with each active set (wrapper run).
pub fn brute_force_selection_probs(
    scheme: &dyn GreedyOcrs,
    x: &FractionalPoint,
    seq: &InstanceSequence,
    temporal: bool,
) -> Vec<f64> {
    let m = seq.len();
    assert!(m <= 12, "enumeration oracle limited to small m");
    let ratios: Vec<f64> = x.values.iter().map(|&v| scheme.accept_probability(v)).collect();
    let mut probs = vec![0.0; m];
    for r_mask in 0u32..(1 << m) {
        let p_r: f64 = (0..m)
            .map(|e| if r_mask & (1 << e) != 0 { x.values[e] } else { 1.0 - x.values[e] })
            .product();
        if p_r == 0.0 {
            continue;
        }
        for h_mask in 0u32..(1 << m) {
            let p_h: f64 = (0..m)
                .map(|e| if h_mask & (1 << e) != 0 { ratios[e] } else { 1.0 - ratios[e] })
                .product();
            let weight = p_r * p_h;
            if weight == 0.0 {
                continue;
            }
            let mut selected = ElementSet::EMPTY;
            for el in seq.elements() {
                let e = el.id;
                let context = if temporal {
                    selected.intersect(active_elements(e, seq))
                } else {
                    selected
                };
                if !scheme.feasible_with(context, e) {
                    continue;
                }
                if r_mask & (1 << e) != 0 && h_mask & (1 << e) != 0 {
                    selected.insert(e);
                }
            }
            for e in selected.iter() {
                probs[e] += weight;
            }
        }
    }
    probs
}

/// Exact probability of the selectability event for `e` by the same
/// enumeration: `e` in the subfamily draw and no active blocker both sampled
/// and drawn.
pub fn brute_force_event_prob(
    scheme: &dyn GreedyOcrs,
    x: &FractionalPoint,
    seq: &InstanceSequence,
    e: usize,
) -> f64 {
    let m = seq.len();
    assert!(m <= 12);
    let ratios: Vec<f64> = x.values.iter().map(|&v| scheme.accept_probability(v)).collect();
    let blockers = active_elements(e, seq).intersect(scheme.blockers(e));
    let mut prob = 0.0;
    for r_mask in 0u32..(1 << m) {
        let p_r: f64 = (0..m)
            .map(|i| if r_mask & (1 << i) != 0 { x.values[i] } else { 1.0 - x.values[i] })
            .product();
        if p_r == 0.0 {
            continue;
        }
        for h_mask in 0u32..(1 << m) {
            if h_mask & (1 << e) == 0 {
                continue;
            }
            let p_h: f64 = (0..m)
                .map(|i| if h_mask & (1 << i) != 0 { ratios[i] } else { 1.0 - ratios[i] })
                .product();
            let blocked = blockers
                .iter()
                .any(|e2| r_mask & (1 << e2) != 0 && h_mask & (1 << e2) != 0);
            if !blocked {
                prob += p_r * p_h;
            }
        }
    }
    prob
}

/// Exact expected value of the optimal offline policy for a small
/// reusable-matching instance, by expectimax over arrivals: the policy knows
/// the whole instance (arrival order, mean weights, activity distributions)
/// and observes realized durations as matches resolve, but a duration is
/// drawn only after the match is committed. A machine matched at `s` with
/// realized duration `d` is unavailable at `s'` iff `d >= s' - s` (inclusive
/// blocking; `d = -1` blocks forever).
///
/// A duration-clairvoyant prophet can strictly beat the availability LP, so
/// it is deliberately not the benchmark here.
pub fn offline_opt_expectation(instance: &MatchingInstance) -> f64 {
    let order = instance.arrival_order();
    assert!(instance.machines <= 3 && order.len() <= 3, "offline oracle limited to 3x3");
    let mut blocked = vec![i64::MIN; instance.machines];
    expectimax(instance, &order, 0, &mut blocked)
}

fn expectimax(
    instance: &MatchingInstance,
    order: &[usize],
    k: usize,
    blocked_until: &mut [i64],
) -> f64 {
    if k == order.len() {
        return 0.0;
    }
    let v = order[k];
    let s_v = instance.jobs[v].arrival as i64;
    // option: skip this job
    let mut best = expectimax(instance, order, k + 1, blocked_until);
    for u in 0..instance.machines {
        if blocked_until[u] >= s_v {
            continue;
        }
        let mut value = instance.jobs[v].weights[u];
        let saved = blocked_until[u];
        for atom in &instance.jobs[v].activity_pmf[u].atoms {
            blocked_until[u] = if atom.value == -1 { i64::MAX } else { s_v + atom.value };
            value += atom.prob * expectimax(instance, order, k + 1, blocked_until);
        }
        blocked_until[u] = saved;
        best = best.max(value);
    }
    best
}
