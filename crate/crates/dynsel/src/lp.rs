//! Fractional optimization layers: a self-contained dense two-phase simplex
//! (Bland's rule, so no cycling), linear maximization over temporal packing
//! polytopes, and the reusable-machine bipartite matching LP.

use serde::{Deserialize, Serialize};

use crate::constraints::{
    dot, temporal_polytope_rows, ConstraintFamily, FractionalPoint, InstanceSequence, TOL_POLY,
};
use crate::error::{Error, Result};

/// Relative objective tolerance the solver targets.
pub const TOL_LP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: FractionalPoint,
    pub objective: f64,
    pub status: LpStatus,
}

/// Maximize `c·x` subject to `Ax <= b`, `x >= 0`.
///
/// Dense tableau, two phases (phase one only engages when some `b_i < 0`),
/// Bland's rule throughout: lowest-index entering and leaving variables, which
/// both guarantees termination and breaks optimal-vertex ties toward the
/// lexicographically smallest basis.
pub fn simplex_maximize(c: &[f64], rows: &[(Vec<f64>, f64)]) -> Result<(Vec<f64>, f64, LpStatus)> {
    let n = c.len();
    let mc = rows.len();
    // tableau columns: n structural + mc slack + (phase-1 artificials) + rhs
    let mut need_artificial = Vec::new();
    for (i, (row, b)) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::input("constraint row dimension mismatch"));
        }
        if *b < 0.0 {
            need_artificial.push(i);
        }
    }
    let na = need_artificial.len();
    let cols = n + mc + na + 1;
    let mut t = vec![vec![0.0; cols]; mc];
    let mut basis = vec![0usize; mc];
    let mut art_col = std::collections::HashMap::new();
    for (k, &i) in need_artificial.iter().enumerate() {
        art_col.insert(i, n + mc + k);
    }
    for (i, (row, b)) in rows.iter().enumerate() {
        let flip = if *b < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * row[j];
        }
        t[i][n + i] = flip; // slack
        t[i][cols - 1] = flip * b;
        if let Some(&ac) = art_col.get(&i) {
            t[i][ac] = 1.0;
            basis[i] = ac;
        } else {
            basis[i] = n + i;
        }
    }

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, r: usize, col: usize| {
        let p = t[r][col];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        for i in 0..t.len() {
            if i != r && t[i][col].abs() > 0.0 {
                let f = t[i][col];
                for j in 0..t[i].len() {
                    t[i][j] -= f * t[r][j];
                }
            }
        }
        basis[r] = col;
    };

    // run simplex iterations on objective coefficients `obj` (maximization),
    // restricted to columns `allowed`.
    let run = |t: &mut Vec<Vec<f64>>,
               basis: &mut Vec<usize>,
               obj: &[f64],
               allowed: usize|
     -> Result<()> {
        loop {
            // reduced costs: obj_j - sum_i obj[basis_i] * t[i][j]
            let mut z = vec![0.0; allowed];
            for j in 0..allowed {
                let mut v = obj.get(j).copied().unwrap_or(0.0);
                for i in 0..t.len() {
                    v -= obj.get(basis[i]).copied().unwrap_or(0.0) * t[i][j];
                }
                z[j] = v;
            }
            // Bland: first improving column
            let Some(col) = (0..allowed).find(|&j| z[j] > 1e-11) else {
                return Ok(());
            };
            // ratio test; Bland tie-break by lowest basis index
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..t.len() {
                if t[i][col] > 1e-11 {
                    let ratio = t[i][t[i].len() - 1] / t[i][col];
                    match best {
                        None => best = Some((ratio, basis[i], i)),
                        Some((r, bi, _)) => {
                            if ratio < r - 1e-12 || (ratio < r + 1e-12 && basis[i] < bi) {
                                best = Some((ratio, basis[i], i));
                            }
                        }
                    }
                }
            }
            let Some((_, _, r)) = best else {
                return Err(Error::invariant("unbounded LP (packing polytopes are bounded)"));
            };
            pivot(t, basis, r, col);
        }
    };

    if na > 0 {
        // phase 1: maximize -(sum of artificials)
        let mut obj1 = vec![0.0; cols - 1];
        for k in 0..na {
            obj1[n + mc + k] = -1.0;
        }
        run(&mut t, &mut basis, &obj1, cols - 1)?;
        let infeas: f64 = (0..mc)
            .filter(|&i| basis[i] >= n + mc)
            .map(|i| t[i][cols - 1])
            .sum();
        if infeas > 1e-9 {
            return Ok((vec![0.0; n], f64::NEG_INFINITY, LpStatus::Infeasible));
        }
        // drive remaining artificials out of the basis where possible
        for i in 0..mc {
            if basis[i] >= n + mc {
                if let Some(col) = (0..n + mc).find(|&j| t[i][j].abs() > 1e-9) {
                    pivot(&mut t, &mut basis, i, col);
                }
            }
        }
    }

    // phase 2 over structural + slack columns only
    let mut obj2 = vec![0.0; n + mc];
    obj2[..n].copy_from_slice(c);
    run(&mut t, &mut basis, &obj2, n + mc)?;

    let mut x = vec![0.0; n];
    for i in 0..mc {
        if basis[i] < n {
            x[basis[i]] = t[i][cols - 1];
        }
    }
    let objective = dot(c, &x);
    Ok((x, objective, LpStatus::Optimal))
}

/// Maximize `<x, w>` over the family's temporal polytope scaled by `b`.
pub fn solve_fractional(
    family: &ConstraintFamily,
    seq: &InstanceSequence,
    w: &[f64],
    b: f64,
) -> Result<LpSolution> {
    if w.len() != family.m {
        return Err(Error::input("weight vector dimension mismatch"));
    }
    if w.iter().any(|&v| v < 0.0) {
        return Err(Error::input("weights must be non-negative"));
    }
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::input(format!("scale b = {b} outside (0, 1]")));
    }
    let mut rows: Vec<(Vec<f64>, f64)> = temporal_polytope_rows(seq, family)?
        .into_iter()
        .map(|(row, bound)| (row, b * bound))
        .collect();
    // box constraints x_e <= 1
    for e in 0..family.m {
        let mut row = vec![0.0; family.m];
        row[e] = 1.0;
        rows.push((row, 1.0));
    }
    let (values, objective, status) = simplex_maximize(w, &rows)?;
    let mut x = FractionalPoint::new(values.iter().map(|v| v.clamp(0.0, 1.0)).collect())?;
    x.scale_hint = Some(b);
    Ok(LpSolution { x, objective, status })
}

/// Finite-support activity distribution over `{0, 1, ..., n} ∪ {∞}`.
/// Probability of infinity is stored via a negative value sentinel in JSON
/// (`value: -1`), mirroring the instance encoding for elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActivityPmf {
    pub atoms: Vec<PmfAtom>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PmfAtom {
    /// Activity value; -1 encodes infinity.
    pub value: i64,
    pub prob: f64,
}

impl ActivityPmf {
    pub fn deterministic(value: i64) -> Self {
        Self { atoms: vec![PmfAtom { value, prob: 1.0 }] }
    }

    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.atoms.iter().map(|a| a.prob).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("activity pmf sums to {total}, not 1")));
        }
        for a in &self.atoms {
            if a.prob < 0.0 || (a.value < 0 && a.value != -1) {
                return Err(Error::input("invalid activity pmf atom"));
            }
        }
        Ok(())
    }

    /// Exact tail `Pr[d >= k]` by summation; infinity counts toward every tail.
    pub fn tail_geq(&self, k: i64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.value == -1 || a.value >= k)
            .map(|a| a.prob)
            .sum()
    }

    /// Exact strict tail `Pr[d > k]`.
    pub fn tail_gt(&self, k: i64) -> f64 {
        self.tail_geq(k + 1)
    }

    /// Draw a realization; -1 means infinity.
    pub fn sample(&self, u: f64) -> i64 {
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.prob;
            if u < acc {
                return a.value;
            }
        }
        self.atoms.last().map(|a| a.value).unwrap_or(0)
    }
}

/// A job (online side): arrival slot, mean weight per machine, and the
/// per-machine activity distribution governing how long a matched machine
/// stays blocked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Job {
    pub arrival: u32,
    /// Mean weight w̄_{uv} for each machine u.
    pub weights: Vec<f64>,
    /// Activity distribution per machine u.
    pub activity_pmf: Vec<ActivityPmf>,
}

/// A reusable-machines bipartite matching instance: `machines` offline,
/// `jobs` arriving in adversarial order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingInstance {
    #[serde(rename = "U")]
    pub machines: usize,
    #[serde(rename = "V")]
    pub jobs: Vec<Job>,
}

impl MatchingInstance {
    pub fn validate(&self) -> Result<()> {
        for job in &self.jobs {
            if job.weights.len() != self.machines || job.activity_pmf.len() != self.machines {
                return Err(Error::input("job vectors must have one entry per machine"));
            }
            if job.weights.iter().any(|&w| w < 0.0) {
                return Err(Error::input("weights must be non-negative"));
            }
            for pmf in &job.activity_pmf {
                pmf.validate()?;
            }
        }
        let mut arrivals: Vec<u32> = self.jobs.iter().map(|j| j.arrival).collect();
        arrivals.sort_unstable();
        arrivals.dedup();
        if arrivals.len() != self.jobs.len() {
            return Err(Error::input("job arrival slots must be distinct"));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let inst: MatchingInstance = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("matching instance JSON: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    /// Jobs sorted by arrival, as (index into self.jobs, arrival).
    pub fn arrival_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.jobs.len()).collect();
        idx.sort_by_key(|&v| self.jobs[v].arrival);
        idx
    }

    /// Variable index of pair (u, v).
    pub fn var(&self, u: usize, v: usize) -> usize {
        v * self.machines + u
    }
}

/// Solve the reusable-machines LP: maximize `Σ w̄_{uv} x_{uv}` subject to
/// per-job matching constraints and per-machine availability constraints
/// `Σ_{v' earlier} x_{uv'}·Pr[d_{uv'} >= s_v - s_{v'}] + x_{uv} <= 1`.
pub fn solve_matching_lp(instance: &MatchingInstance) -> Result<LpSolution> {
    instance.validate()?;
    let nu = instance.machines;
    let nv = instance.jobs.len();
    let n = nu * nv;
    let order = instance.arrival_order();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    // Constr. 1: each job matched at most once in expectation.
    for v in 0..nv {
        let mut row = vec![0.0; n];
        for u in 0..nu {
            row[instance.var(u, v)] = 1.0;
        }
        rows.push((row, 1.0));
    }
    // Constr. 2: availability of machine u at job v's arrival.
    for &v in &order {
        let s_v = instance.jobs[v].arrival as i64;
        for u in 0..nu {
            let mut row = vec![0.0; n];
            for &v2 in &order {
                let s_v2 = instance.jobs[v2].arrival as i64;
                if s_v2 < s_v {
                    row[instance.var(u, v2)] = instance.jobs[v2].activity_pmf[u].tail_geq(s_v - s_v2);
                }
            }
            row[instance.var(u, v)] += 1.0;
            rows.push((row, 1.0));
        }
    }
    // box x <= 1 (implied by Constr. 2 but keeps the solver honest)
    for j in 0..n {
        let mut row = vec![0.0; n];
        row[j] = 1.0;
        rows.push((row, 1.0));
    }
    let mut c = vec![0.0; n];
    for v in 0..nv {
        for u in 0..nu {
            c[instance.var(u, v)] = instance.jobs[v].weights[u];
        }
    }
    let (values, objective, status) = simplex_maximize(&c, &rows)?;
    let x = FractionalPoint::new(values.iter().map(|v| v.clamp(0.0, 1.0)).collect())?;
    Ok(LpSolution { x, objective, status })
}

/// Check an LP (1) solution against all its constraints at `TOL_POLY`.
pub fn matching_lp_feasible(instance: &MatchingInstance, x: &[f64]) -> bool {
    let nu = instance.machines;
    let order = instance.arrival_order();
    for v in 0..instance.jobs.len() {
        let s: f64 = (0..nu).map(|u| x[instance.var(u, v)]).sum();
        if s > 1.0 + TOL_POLY {
            return false;
        }
    }
    for &v in &order {
        let s_v = instance.jobs[v].arrival as i64;
        for u in 0..nu {
            let mut lhs = x[instance.var(u, v)];
            for &v2 in &order {
                let s_v2 = instance.jobs[v2].arrival as i64;
                if s_v2 < s_v {
                    lhs += x[instance.var(u, v2)]
                        * instance.jobs[v2].activity_pmf[u].tail_geq(s_v - s_v2);
                }
            }
            if lhs > 1.0 + TOL_POLY {
                return false;
            }
        }
    }
    x.iter().all(|&v| (-TOL_POLY..=1.0 + TOL_POLY).contains(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{in_temporal_polytope, Activity};

    fn seq(acts: &[Activity]) -> InstanceSequence {
        InstanceSequence::from_arrivals(&vec![1.0; acts.len()], acts).unwrap()
    }

    #[test]
    fn rank1_single_element() {
        let family = ConstraintFamily::rank1(1);
        let s = seq(&[Activity::Finite(2)]);
        let sol = solve_fractional(&family, &s, &[3.0], 1.0).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.x.values[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rank1_disjoint_active_sets_take_both() {
        let family = ConstraintFamily::rank1(2);
        let s = seq(&[Activity::Finite(0), Activity::Finite(0)]);
        let sol = solve_fractional(&family, &s, &[1.0, 1.0], 1.0).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x.values[0] - 1.0).abs() < 1e-9);
        assert!((sol.x.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rank1_infinite_activities_pick_heavier() {
        let family = ConstraintFamily::rank1(2);
        let s = seq(&[Activity::Infinite, Activity::Infinite]);
        let sol = solve_fractional(&family, &s, &[1.0, 2.0], 1.0).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!(sol.x.values[0].abs() < 1e-9);
        assert!((sol.x.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn solution_always_feasible() {
        let family = ConstraintFamily::matching(vec![[0, 1], [1, 2], [2, 3], [3, 0]]);
        let s = seq(&[
            Activity::Infinite,
            Activity::Finite(1),
            Activity::Finite(0),
            Activity::Infinite,
        ]);
        let sol = solve_fractional(&family, &s, &[1.0, 0.5, 2.0, 0.25], 1.0).unwrap();
        assert!(in_temporal_polytope(&sol.x, &s, &family, 1.0).unwrap());
        let half = solve_fractional(&family, &s, &[1.0, 0.5, 2.0, 0.25], 0.5).unwrap();
        assert!(in_temporal_polytope(&half.x, &s, &family, 0.5).unwrap());
    }

    #[test]
    fn matching_lp_trivial_instance() {
        let inst = MatchingInstance {
            machines: 1,
            jobs: vec![Job {
                arrival: 1,
                weights: vec![5.0],
                activity_pmf: vec![ActivityPmf::deterministic(0)],
            }],
        };
        let sol = solve_matching_lp(&inst).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-9);
        assert!((sol.x.values[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matching_lp_blocking_constraint_binds() {
        // one machine, two jobs at s = (1, 2), deterministic d = 1:
        // Constr. 2 at v2 reads x1·Pr[d >= 1] + x2 <= 1, so x1 + x2 <= 1.
        let inst = MatchingInstance {
            machines: 1,
            jobs: vec![
                Job {
                    arrival: 1,
                    weights: vec![1.0],
                    activity_pmf: vec![ActivityPmf::deterministic(1)],
                },
                Job {
                    arrival: 2,
                    weights: vec![1.0],
                    activity_pmf: vec![ActivityPmf::deterministic(1)],
                },
            ],
        };
        let sol = solve_matching_lp(&inst).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert!(matching_lp_feasible(&inst, &sol.x.values));
    }

    #[test]
    fn tail_probabilities_exact() {
        let pmf = ActivityPmf {
            atoms: vec![
                PmfAtom { value: 0, prob: 0.25 },
                PmfAtom { value: 2, prob: 0.5 },
                PmfAtom { value: -1, prob: 0.25 },
            ],
        };
        pmf.validate().unwrap();
        assert!((pmf.tail_geq(0) - 1.0).abs() < 1e-15);
        assert!((pmf.tail_geq(1) - 0.75).abs() < 1e-15);
        assert!((pmf.tail_geq(3) - 0.25).abs() < 1e-15);
        assert!((pmf.tail_gt(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simplex_handles_negative_rhs_via_phase_one() {
        // max x0 s.t. -x0 <= -0.25 (i.e. x0 >= 0.25), x0 <= 0.75
        let rows = vec![(vec![-1.0], -0.25), (vec![1.0], 0.75)];
        let (x, obj, status) = simplex_maximize(&[1.0], &rows).unwrap();
        assert_eq!(status, LpStatus::Optimal);
        assert!((x[0] - 0.75).abs() < 1e-9);
        assert!((obj - 0.75).abs() < 1e-9);
    }

    #[test]
    fn simplex_detects_infeasibility() {
        // x0 <= 0.25 and x0 >= 0.5
        let rows = vec![(vec![1.0], 0.25), (vec![-1.0], -0.5)];
        let (_, _, status) = simplex_maximize(&[1.0], &rows).unwrap();
        assert_eq!(status, LpStatus::Infeasible);
    }
}
