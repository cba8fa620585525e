//! Regret-minimization layer: projected online gradient ascent over the
//! temporal polytope, the full-feedback loop, the semi-bandit loop driven by
//! importance-weighted estimates, and the blocked exploration loop.

use serde::Serialize;

use crate::adversaries::Adversary;
use crate::coins::{derive_seed, unit_draw};
use crate::constraints::{
    best_feasible_set, dot, is_temporally_feasible, temporal_polytope_rows, ConstraintFamily,
    ElementSet, FractionalPoint, InstanceSequence, TOL_POLY,
};
use crate::error::{Error, Result};
use crate::lp::solve_fractional;
use crate::ocrs::{unconditional_selection_probability, GreedyOcrs};
use crate::temporal::run_temporal;

/// An online algorithm producing points in a fixed convex body and consuming
/// linear reward gradients.
pub trait RegretMinimizer {
    /// Recommend the point to play this stage.
    fn rec(&mut self) -> Vec<f64>;
    /// Feed back the (estimated) reward gradient for the stage just played.
    fn update(&mut self, gradient: &[f64]);
}

/// Euclidean projection onto the intersection of the box `[0, 1]^m` and the
/// halfspaces `a_i · x ≤ b_i`, via Dykstra's alternating method, followed by
/// a multiplicative repair step so every packing row holds exactly.
pub fn project_onto_polytope(rows: &[(Vec<f64>, f64)], x0: &[f64]) -> Vec<f64> {
    let m = x0.len();
    let n_sets = rows.len() + 1; // halfspaces plus the box
    let mut x: Vec<f64> = x0.to_vec();
    let mut corrections = vec![vec![0.0; m]; n_sets];

    for _cycle in 0..200 {
        let mut moved = 0.0f64;
        for (i, corr) in corrections.iter_mut().enumerate() {
            let mut y: Vec<f64> = (0..m).map(|j| x[j] + corr[j]).collect();
            let projected = if i < rows.len() {
                project_halfspace(&rows[i].0, rows[i].1, &y)
            } else {
                for v in &mut y {
                    *v = v.clamp(0.0, 1.0);
                }
                y.clone()
            };
            for j in 0..m {
                corr[j] = y[j] - projected[j];
                moved = moved.max((projected[j] - x[j]).abs());
            }
            x = projected;
        }
        let max_violation = rows.iter().map(|(a, b)| dot(a, &x) - b).fold(0.0f64, f64::max);
        if moved < TOL_POLY * 0.1 && max_violation < TOL_POLY * 0.1 {
            break;
        }
    }

    // Repair: clamp to the box, then scale down uniformly until every packing
    // row (all rows here have nonnegative coefficients) holds exactly.
    for v in &mut x {
        *v = v.clamp(0.0, 1.0);
    }
    let mut worst = 1.0f64;
    for (a, b) in rows {
        let lhs = dot(a, &x);
        if lhs > *b && *b > 0.0 {
            worst = worst.max(lhs / b);
        }
    }
    if worst > 1.0 {
        for v in &mut x {
            *v /= worst;
        }
    }
    x
}

fn project_halfspace(a: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    let viol = dot(a, y) - b;
    if viol <= 0.0 {
        return y.to_vec();
    }
    let norm_sq: f64 = a.iter().map(|v| v * v).sum();
    if norm_sq == 0.0 {
        return y.to_vec();
    }
    let t = viol / norm_sq;
    y.iter().zip(a).map(|(yi, ai)| yi - t * ai).collect()
}

/// Projected online gradient ascent over the temporal polytope, with step
/// size `η_t = scale / √t`.
pub struct ProjectedGradientAscent {
    rows: Vec<(Vec<f64>, f64)>,
    x: Vec<f64>,
    t: u64,
    scale: f64,
}

impl ProjectedGradientAscent {
    pub fn new(family: &ConstraintFamily, seq: &InstanceSequence) -> Result<Self> {
        let rows = temporal_polytope_rows(seq, family)?;
        // Start interior: the origin would be an absorbing point under
        // importance-weighted feedback (nothing delivered, zero gradient).
        let x = project_onto_polytope(&rows, &vec![1.0 / family.m as f64; family.m]);
        Ok(Self { rows, x, t: 0, scale: 1.0 })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }
}

impl RegretMinimizer for ProjectedGradientAscent {
    fn rec(&mut self) -> Vec<f64> {
        self.x.clone()
    }

    fn update(&mut self, gradient: &[f64]) {
        self.t += 1;
        let eta = self.scale / (self.t as f64).sqrt();
        let stepped: Vec<f64> =
            self.x.iter().zip(gradient).map(|(xi, gi)| xi + eta * gi).collect();
        self.x = project_onto_polytope(&self.rows, &stepped);
    }
}

/// How the recommended fractional point is turned into a played outcome.
pub enum Selector<'a> {
    /// Round through the temporal greedy scheme at scaling `b`.
    TemporalOcrs { scheme: &'a dyn GreedyOcrs, b: f64 },
    /// Reference mode: credit the fractional value itself, as a loss-free
    /// selector would in expectation. Isolates the inner minimizer's regret
    /// from the rounding loss.
    Fractional,
}

/// Per-stage record of a regret run.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub t: u64,
    pub x: Vec<f64>,
    pub weights: Vec<f64>,
    pub played: Option<Vec<usize>>,
    pub reward: f64,
}

/// Full trajectory of a regret run.
#[derive(Debug, Clone, Serialize)]
pub struct RegretTrace {
    pub stages: Vec<StageRecord>,
    /// Count of exploration stages where the probed element was not
    /// delivered by the scheme (blocked loop only).
    pub exploration_misses: u64,
}

impl RegretTrace {
    pub fn total_reward(&self) -> f64 {
        self.stages.iter().map(|s| s.reward).sum()
    }

    pub fn cumulative_rewards(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.stages
            .iter()
            .map(|s| {
                acc += s.reward;
                acc
            })
            .collect()
    }
}

const STREAM_STAGE: u64 = 0x5354_4147;
const STREAM_EXPLORE: u64 = 0x4558_504c;

fn stage_seed(seed: u64, t: u64) -> u64 {
    derive_seed(seed, STREAM_STAGE, t)
}

fn play_stage(
    selector: &Selector<'_>,
    x: &[f64],
    w: &[f64],
    seq: &InstanceSequence,
    seed: u64,
) -> Result<(Option<ElementSet>, f64)> {
    match selector {
        Selector::TemporalOcrs { scheme, b } => {
            let point = FractionalPoint::new(x.to_vec())?;
            let (set, _) = run_temporal(*scheme, &point, seq, *b, seed)?;
            let reward = set.iter().map(|e| w[e]).sum();
            Ok((Some(set), reward))
        }
        Selector::Fractional => Ok((None, dot(x, w))),
    }
}

fn record(t: u64, x: Vec<f64>, w: Vec<f64>, set: Option<ElementSet>, reward: f64) -> StageRecord {
    StageRecord { t, x, weights: w, played: set.map(|s| s.iter().collect()), reward }
}

fn check_dims(adversary: &dyn Adversary, family: &ConstraintFamily) -> Result<()> {
    if adversary.m() != family.m {
        return Err(Error::config("adversary dimension does not match the constraint family"));
    }
    Ok(())
}

/// Full-feedback loop: the whole weight vector is revealed after each stage
/// and fed to the inner minimizer unchanged.
pub fn full_feedback_run(
    horizon: u64,
    family: &ConstraintFamily,
    seq: &InstanceSequence,
    rm: &mut dyn RegretMinimizer,
    selector: &Selector<'_>,
    adversary: &dyn Adversary,
    seed: u64,
) -> Result<RegretTrace> {
    check_dims(adversary, family)?;
    let mut stages = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        let w = adversary.weights(t);
        let x = rm.rec();
        let (set, reward) = play_stage(selector, &x, &w, seq, stage_seed(seed, t))?;
        rm.update(&w);
        stages.push(record(t, x, w, set, reward));
    }
    Ok(RegretTrace { stages, exploration_misses: 0 })
}

/// Semi-bandit loop: only the weights of delivered elements are observed;
/// the inner minimizer is fed the importance-weighted estimate
/// `w_e · 1[e delivered] / q(e)` with `q(e) = 1 - e^{-x_e}` the scheme's
/// unconditional delivery probability.
pub fn semibandit_osmd_run(
    horizon: u64,
    family: &ConstraintFamily,
    seq: &InstanceSequence,
    rm: &mut dyn RegretMinimizer,
    scheme: &dyn GreedyOcrs,
    b: f64,
    adversary: &dyn Adversary,
    seed: u64,
) -> Result<RegretTrace> {
    check_dims(adversary, family)?;
    let mut stages = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        let w = adversary.weights(t);
        let x = rm.rec();
        let point = FractionalPoint::new(x.clone())?;
        let (set, _) = run_temporal(scheme, &point, seq, b, stage_seed(seed, t))?;
        let reward: f64 = set.iter().map(|e| w[e]).sum();
        let estimate = importance_weighted_estimate(&w, &x, set);
        rm.update(&estimate);
        stages.push(record(t, x, w, Some(set), reward));
    }
    Ok(RegretTrace { stages, exploration_misses: 0 })
}

/// Importance-weighted estimate used by [`semibandit_osmd_run`], exposed for
/// direct unbiasedness checks: `w_e / (1 - e^{-x_e})` when `e` was delivered,
/// zero otherwise.
pub fn importance_weighted_estimate(w: &[f64], x: &[f64], delivered: ElementSet) -> Vec<f64> {
    let mut est = vec![0.0; w.len()];
    for e in delivered.iter() {
        let q = unconditional_selection_probability(x[e]);
        if q > 0.0 {
            est[e] = w[e] / q;
        }
    }
    est
}

/// Number of blocks for a horizon `T`: `⌈T^{2/3}⌉`.
pub fn block_count(horizon: u64) -> u64 {
    let z = (horizon as f64).powf(2.0 / 3.0).ceil() as u64;
    z.max(1)
}

/// Blocked exploration loop: the horizon is split into `⌈T^{2/3}⌉` blocks
/// (the last one truncated). Within each block, `m` distinct stages are
/// reserved for exploration — stage `t_j` probes element `p(j)` by routing
/// its indicator through the scheme — and the remaining stages play the
/// inner minimizer's recommendation. The block estimate feeds one minimizer
/// update: element `e`'s entry is its observed weight if its probe stage
/// delivered it, zero otherwise (misses are counted on the trace).
pub fn blocked_semibandit_run(
    horizon: u64,
    family: &ConstraintFamily,
    seq: &InstanceSequence,
    rm: &mut dyn RegretMinimizer,
    scheme: &dyn GreedyOcrs,
    adversary: &dyn Adversary,
    seed: u64,
) -> Result<RegretTrace> {
    check_dims(adversary, family)?;
    let m = family.m;
    let z = block_count(horizon);
    let block_len = horizon.div_ceil(z);
    if (m as u64) > block_len {
        return Err(Error::config(format!(
            "horizon {horizon} gives blocks of {block_len} stages, too short to probe {m} elements"
        )));
    }

    let selector = Selector::TemporalOcrs { scheme, b: 1.0 };
    let mut stages = Vec::with_capacity(horizon as usize);
    let mut misses = 0u64;
    let mut block_start = 1u64;
    let mut block_idx = 0u64;
    while block_start <= horizon {
        let block_end = (block_start + block_len - 1).min(horizon);
        let len = (block_end - block_start + 1) as usize;
        if m > len {
            // truncated final block too short to explore; just exploit
            let x = rm.rec();
            for t in block_start..=block_end {
                let w = adversary.weights(t);
                let (set, reward) = play_stage(&selector, &x, &w, seq, stage_seed(seed, t))?;
                stages.push(record(t, x.clone(), w, set, reward));
            }
            break;
        }

        // choose m distinct exploration offsets and a probe order, both
        // deterministic in (seed, block)
        let bseed = derive_seed(seed, STREAM_EXPLORE, block_idx);
        let offsets = sample_without_replacement(bseed, len, m);
        let perm = random_permutation(derive_seed(bseed, STREAM_EXPLORE, 1), m);
        let mut probe_at = vec![usize::MAX; len]; // offset -> probed element
        for (j, &off) in offsets.iter().enumerate() {
            probe_at[off] = perm[j];
        }

        let x = rm.rec();
        let mut estimate = vec![0.0; m];
        for t in block_start..=block_end {
            let off = (t - block_start) as usize;
            let w = adversary.weights(t);
            let (played_x, probing) = if probe_at[off] != usize::MAX {
                (exploration_point(family, seq, probe_at[off])?, Some(probe_at[off]))
            } else {
                (x.clone(), None)
            };
            let (set, reward) = play_stage(&selector, &played_x, &w, seq, stage_seed(seed, t))?;
            if let (Some(e), Some(s)) = (probing, set) {
                if s.contains(e) {
                    estimate[e] = w[e];
                } else {
                    misses += 1;
                }
            }
            stages.push(record(t, played_x, w, set, reward));
        }
        rm.update(&estimate);

        block_start = block_end + 1;
        block_idx += 1;
    }

    Ok(RegretTrace { stages, exploration_misses: misses })
}

/// Indicator of a feasible set containing element `e`: the singleton when it
/// is temporally feasible (always, for the built-in families), otherwise the
/// lexicographically-first feasible superset.
fn exploration_point(
    family: &ConstraintFamily,
    seq: &InstanceSequence,
    e: usize,
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; family.m];
    let singleton = ElementSet::from_ids(&[e]);
    if is_temporally_feasible(singleton, seq, family)? {
        x[e] = 1.0;
        return Ok(x);
    }
    let mut set = singleton;
    for other in 0..family.m {
        let candidate = set.with(other);
        if is_temporally_feasible(candidate, seq, family)? {
            set = candidate;
            break;
        }
    }
    for id in set.iter() {
        x[id] = 1.0;
    }
    Ok(x)
}

fn sample_without_replacement(seed: u64, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    // partial Fisher-Yates driven by the deterministic stream
    for i in 0..k {
        let u = unit_draw(seed, i as u64, STREAM_EXPLORE);
        let j = i + ((u * (n - i) as f64) as usize).min(n - i - 1);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

fn random_permutation(seed: u64, n: usize) -> Vec<usize> {
    sample_without_replacement(seed, n, n)
}

/// Benchmarks for a completed trace: value of the best fixed fractional
/// point in hindsight (by linear programming over the temporal polytope)
/// and, when the ground set is small, the best fixed feasible set by
/// exhaustive search.
#[derive(Debug, Clone, Serialize)]
pub struct Benchmarks {
    pub best_fixed_fractional: f64,
    pub best_fixed_set: Option<f64>,
}

pub fn compute_benchmarks(
    trace: &RegretTrace,
    family: &ConstraintFamily,
    seq: &InstanceSequence,
) -> Result<Benchmarks> {
    let m = family.m;
    let mut total_w = vec![0.0; m];
    for s in &trace.stages {
        for (acc, w) in total_w.iter_mut().zip(&s.weights) {
            *acc += w;
        }
    }
    let sol = solve_fractional(family, seq, &total_w, 1.0)?;
    let best_set = if m <= 16 {
        let (_, v) = best_feasible_set(seq, family, &total_w)?;
        Some(v)
    } else {
        None
    };
    Ok(Benchmarks { best_fixed_fractional: sol.objective, best_fixed_set: best_set })
}

/// `alpha`-regret at the end of the trace: `alpha · best_fixed - earned`.
pub fn alpha_regret(trace: &RegretTrace, benchmarks: &Benchmarks, alpha: f64) -> f64 {
    alpha * benchmarks.best_fixed_fractional - trace.total_reward()
}
