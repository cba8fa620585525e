//! Online bipartite matching with reusable machines.
//!
//! The algorithm solves the availability LP up front, then on each job
//! arrival selects at most one currently-available machine u with probability
//! `α·x*_{uv} / Pr[u available at v]`. Availability probabilities come from an
//! exact forward recursion rather than nested simulation: distinct blocking
//! events for a machine at a given arrival are mutually exclusive, and a
//! machine is matched to job v' with unconditional probability exactly
//! `α·x*_{uv'}`.

use crate::coins::{derive_seed, unit_draw};
use crate::constraints::TOL_POLY;
use crate::error::{Error, Result};
use crate::lp::{LpSolution, MatchingInstance};

pub const DEFAULT_ALPHA: f64 = 0.5;

/// `p_avail[u][v]` = Pr[u available when job v arrives] under the algorithm's
/// own randomness. Indexed by machine, then by job position in arrival order.
#[derive(Debug, Clone)]
pub struct AvailabilityTable {
    pub p_avail: Vec<Vec<f64>>,
    pub alpha: f64,
    /// Job indices in arrival order; column k of `p_avail` refers to
    /// `order[k]`.
    pub order: Vec<usize>,
}

impl AvailabilityTable {
    pub fn min_availability(&self) -> f64 {
        self.p_avail
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Exact recursion: `Pr[u not available at v] = α Σ_{v' earlier} x*_{uv'} ·
/// Pr[d_{uv'} > s_v - s_{v'}]` (strict tail, matching the blocking rule the
/// simulation uses).
pub fn availability_table(
    x_star: &LpSolution,
    instance: &MatchingInstance,
    alpha: f64,
) -> Result<AvailabilityTable> {
    if !(alpha > 0.0 && alpha <= 0.5 + TOL_POLY) {
        return Err(Error::precondition(format!("alpha = {alpha} must lie in (0, 1/2]")));
    }
    let order = instance.arrival_order();
    let nu = instance.machines;
    let x = &x_star.x.values;
    let mut table = vec![vec![0.0; order.len()]; nu];
    for (k, &v) in order.iter().enumerate() {
        let s_v = instance.jobs[v].arrival as i64;
        for (row, item) in table.iter_mut().enumerate() {
            let mut blocked = 0.0;
            for &v2 in &order[..k] {
                let s_v2 = instance.jobs[v2].arrival as i64;
                blocked += x[instance.var(row, v2)]
                    * instance.jobs[v2].activity_pmf[row].tail_gt(s_v - s_v2);
            }
            let p = 1.0 - alpha * blocked;
            if p < alpha - TOL_POLY {
                return Err(Error::invariant(format!(
                    "availability {p} < alpha = {alpha} for machine {row}, job {v}"
                )));
            }
            item[k] = p;
        }
    }
    Ok(AvailabilityTable { p_avail: table, alpha, order })
}

/// One run of the matching algorithm.
#[derive(Debug, Clone)]
pub struct MatchingRun {
    /// `(u, v, realized activity)` per matched pair, in arrival order.
    pub matches: Vec<(usize, usize, i64)>,
    pub reward: f64,
}

/// Simulate one run: per job arrival, draw at most one available machine with
/// probability `α·x*_{uv}/Pr[u available]`; a matched machine is blocked for a
/// freshly drawn activity time.
pub fn run_matching(
    x_star: &LpSolution,
    instance: &MatchingInstance,
    table: &AvailabilityTable,
    seed: u64,
) -> Result<MatchingRun> {
    let alpha = table.alpha;
    let nu = instance.machines;
    let x = &x_star.x.values;
    // blocked_until[u]: last arrival slot still blocked, or i64::MAX
    let mut blocked_until = vec![i64::MIN; nu];
    let mut matches = Vec::new();
    let mut reward = 0.0;
    for (k, &v) in table.order.iter().enumerate() {
        let s_v = instance.jobs[v].arrival as i64;
        // strict blocking rule: u blocked at s_v iff it was matched at some
        // s_{v'} with d > s_v - s_{v'}, i.e. blocked_until = s_{v'} + d > s_v
        let available: Vec<usize> = (0..nu).filter(|&u| blocked_until[u] <= s_v).collect();
        if available.is_empty() {
            continue; // reject v
        }
        // selection probabilities form a sub-distribution
        let probs: Vec<f64> = available
            .iter()
            .map(|&u| {
                let p = alpha * x[instance.var(u, v)] / table.p_avail[u][k];
                if p > 1.0 + TOL_POLY {
                    return Err(Error::invariant(format!(
                        "per-machine selection probability {p} > 1 for machine {u}, job {v}"
                    )));
                }
                Ok(p.min(1.0))
            })
            .collect::<Result<_>>()?;
        let total: f64 = probs.iter().sum();
        if total > 1.0 + TOL_POLY {
            return Err(Error::invariant(format!(
                "per-job selection probabilities sum to {total} > 1 at job {v}"
            )));
        }
        let draw = unit_draw(seed, v as u64, 0x4d415443);
        let mut acc = 0.0;
        for (i, &u) in available.iter().enumerate() {
            acc += probs[i];
            if draw < acc {
                let du = unit_draw(derive_seed(seed, 0x41435456, v as u64), u as u64, 1);
                let d = instance.jobs[v].activity_pmf[u].sample(du);
                // strict blocking rule: u is blocked at s iff d > s - s_v,
                // i.e. for all s <= s_v + d (and forever when d = -1 = inf)
                blocked_until[u] = if d == -1 { i64::MAX } else { s_v + d };
                reward += instance.jobs[v].weights[u];
                matches.push((u, v, d));
                break;
            }
        }
    }
    Ok(MatchingRun { matches, reward })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_matching_lp, ActivityPmf, Job};

    fn one_machine_two_jobs(d: i64) -> MatchingInstance {
        MatchingInstance {
            machines: 1,
            jobs: vec![
                Job {
                    arrival: 1,
                    weights: vec![1.0],
                    activity_pmf: vec![ActivityPmf::deterministic(d)],
                },
                Job {
                    arrival: 2,
                    weights: vec![1.0],
                    activity_pmf: vec![ActivityPmf::deterministic(d)],
                },
            ],
        }
    }

    #[test]
    fn first_job_always_available() {
        let inst = one_machine_two_jobs(5);
        let sol = solve_matching_lp(&inst).unwrap();
        let table = availability_table(&sol, &inst, 0.5).unwrap();
        assert!((table.p_avail[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_activities_never_block() {
        // d = 0 blocks only the arrival slot itself; jobs at distinct slots
        // never collide, so availability is identically 1... except the LP
        // drives x to 1 per job, making Pr[avail] = 1 - α·x·Pr[d > gap] = 1.
        let inst = one_machine_two_jobs(0);
        let sol = solve_matching_lp(&inst).unwrap();
        let table = availability_table(&sol, &inst, 0.5).unwrap();
        for row in &table.p_avail {
            for &p in row {
                assert!((p - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn one_step_recursion_half() {
        // |U| = 1, 2 jobs, x*_1 = 1, deterministic d larger than the gap:
        // Pr[available at v2] = 1 - α = 1/2; confirmed by simulation.
        let inst = one_machine_two_jobs(5);
        let sol = solve_matching_lp(&inst).unwrap();
        assert!((sol.x.values[0] - 1.0).abs() < 1e-9, "LP should saturate the first job");
        let table = availability_table(&sol, &inst, 0.5).unwrap();
        assert!((table.p_avail[0][1] - 0.5).abs() < 1e-9);
        let n = 100_000;
        let mut avail = 0usize;
        for seed in 0..n {
            let run = run_matching(&sol, &inst, &table, seed).unwrap();
            if !run.matches.iter().any(|&(_, v, _)| v == 0) {
                avail += 1; // not blocked at v2 because v1 unmatched
            }
        }
        let freq = avail as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn unconditional_match_probability_alpha_x() {
        let inst = one_machine_two_jobs(5);
        let sol = solve_matching_lp(&inst).unwrap();
        let table = availability_table(&sol, &inst, 0.5).unwrap();
        let n = 100_000;
        let mut hit = [0usize; 2];
        for seed in 0..n {
            let run = run_matching(&sol, &inst, &table, seed).unwrap();
            for &(_, v, _) in &run.matches {
                hit[v] += 1;
            }
        }
        for v in 0..2 {
            let freq = hit[v] as f64 / n as f64;
            let target = 0.5 * sol.x.values[inst.var(0, v)];
            assert!((freq - target).abs() < 0.01, "job {v}: {freq} vs {target}");
        }
    }

    #[test]
    fn matching_validity() {
        // no machine matched while blocked, each job matched at most once
        let inst = MatchingInstance {
            machines: 2,
            jobs: (0..4)
                .map(|i| Job {
                    arrival: i + 1,
                    weights: vec![1.0, 0.5],
                    activity_pmf: vec![
                        ActivityPmf {
                            atoms: vec![
                                crate::lp::PmfAtom { value: 0, prob: 0.5 },
                                crate::lp::PmfAtom { value: 2, prob: 0.5 },
                            ],
                        },
                        ActivityPmf::deterministic(1),
                    ],
                })
                .collect(),
        };
        let sol = solve_matching_lp(&inst).unwrap();
        let table = availability_table(&sol, &inst, 0.5).unwrap();
        assert!(table.min_availability() >= 0.5 - 1e-12);
        for seed in 0..2000 {
            let run = run_matching(&sol, &inst, &table, seed).unwrap();
            let mut blocked: Vec<(usize, i64, i64)> = Vec::new(); // (u, from, until)
            let mut jobs_seen = std::collections::HashSet::new();
            for &(u, v, d) in &run.matches {
                assert!(jobs_seen.insert(v));
                let s_v = inst.jobs[v].arrival as i64;
                for &(u2, _, until) in &blocked {
                    if u2 == u {
                        assert!(until <= s_v, "machine {u} matched while blocked");
                    }
                }
                let until = if d == -1 { i64::MAX } else { s_v + d };
                blocked.push((u, s_v, until));
            }
        }
    }

    #[test]
    fn alpha_above_half_rejected() {
        let inst = one_machine_two_jobs(5);
        let sol = solve_matching_lp(&inst).unwrap();
        assert!(availability_table(&sol, &inst, 0.75).is_err());
    }
}
