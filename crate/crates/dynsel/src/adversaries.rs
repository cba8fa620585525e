//! Adversarial weight sequences for the online experiments, including the
//! two hard stage distributions used by the lower-bound demonstrations.

use serde::{Deserialize, Serialize};

use crate::coins::{derive_seed, unit_draw};
use crate::constraints::{Activity, ConstraintFamily, InstanceSequence};
use crate::error::{Error, Result};

/// Per-stage weight source for the regret loops. Stages are indexed from 1.
pub trait Adversary: Send + Sync {
    fn m(&self) -> usize;
    /// Weight vector for stage `t`, entries in `[0, 1]`.
    fn weights(&self, t: u64) -> Vec<f64>;
}

/// Same weight vector every stage.
pub struct ConstantAdversary {
    pub w: Vec<f64>,
}

impl Adversary for ConstantAdversary {
    fn m(&self) -> usize {
        self.w.len()
    }
    fn weights(&self, _t: u64) -> Vec<f64> {
        self.w.clone()
    }
}

/// Independent uniform `[0, 1]` weight per element per stage, deterministic
/// in `(seed, t, e)`.
pub struct UniformAdversary {
    pub m: usize,
    pub seed: u64,
}

const STREAM_WEIGHT: u64 = 0x5745_4947;

impl Adversary for UniformAdversary {
    fn m(&self) -> usize {
        self.m
    }
    fn weights(&self, t: u64) -> Vec<f64> {
        (0..self.m)
            .map(|e| unit_draw(derive_seed(self.seed, STREAM_WEIGHT, t), e as u64, STREAM_WEIGHT))
            .collect()
    }
}

/// Fixed table of weights, one row per stage (wraps around if shorter than
/// the horizon).
pub struct TableAdversary {
    pub rows: Vec<Vec<f64>>,
}

impl Adversary for TableAdversary {
    fn m(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
    fn weights(&self, t: u64) -> Vec<f64> {
        let idx = ((t - 1) as usize) % self.rows.len();
        self.rows[idx].clone()
    }
}

/// Serializable description of an adversary, as accepted in experiment
/// configuration files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AdversarySpec {
    UniformRandom { m: usize },
    Constant { weights: Vec<f64> },
    CustomTable { rows: Vec<Vec<f64>> },
    /// JSON file holding an array of per-stage weight rows.
    CustomFile { path: String },
}

impl AdversarySpec {
    pub fn build(&self, seed: u64) -> Result<Box<dyn Adversary>> {
        match self {
            AdversarySpec::UniformRandom { m } => {
                if *m == 0 || *m > 128 {
                    return Err(Error::config("uniform-random adversary needs 1 <= m <= 128"));
                }
                Ok(Box::new(UniformAdversary { m: *m, seed }))
            }
            AdversarySpec::Constant { weights } => {
                validate_weights(weights)?;
                Ok(Box::new(ConstantAdversary { w: weights.clone() }))
            }
            AdversarySpec::CustomTable { rows } => build_table(rows.clone()),
            AdversarySpec::CustomFile { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::config(format!("reading {path}: {e}")))?;
                let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
                    .map_err(|e| Error::parse(format!("weight table JSON: {e}")))?;
                build_table(rows)
            }
        }
    }
}

fn build_table(rows: Vec<Vec<f64>>) -> Result<Box<dyn Adversary>> {
    if rows.is_empty() {
        return Err(Error::config("custom weight table is empty"));
    }
    let m = rows[0].len();
    for row in &rows {
        if row.len() != m {
            return Err(Error::config("custom weight table rows have unequal length"));
        }
        validate_weights(row)?;
    }
    Ok(Box::new(TableAdversary { rows }))
}

fn validate_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::config("empty weight vector"));
    }
    for &v in w {
        if !(0.0..=1.0).contains(&v) || !v.is_finite() {
            return Err(Error::config(format!("weight {v} outside [0, 1]")));
        }
    }
    Ok(())
}

/// One stage of the fair-coin adaptivity-gap construction: three unit-weight
/// rank-1 elements whose activities flip between all-short and all-infinite,
/// with the first weight shaved to `eps` on tails.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoinStage {
    pub heads: bool,
    pub weights: [f64; 3],
    pub activities: [Activity; 3],
}

pub const DEFAULT_COIN_EPS: f64 = 0.1;

const STREAM_COIN: u64 = 0x434f_494e;

/// Stage generator for the fair-coin construction; deterministic in
/// `(seed, t)`.
pub fn gen_coin_stage(seed: u64, t: u64, eps: f64) -> CoinStage {
    let heads = unit_draw(seed, t, STREAM_COIN) < 0.5;
    if heads {
        CoinStage {
            heads,
            weights: [1.0, 1.0, 1.0],
            activities: [Activity::Finite(1), Activity::Finite(1), Activity::Finite(1)],
        }
    } else {
        CoinStage {
            heads,
            weights: [eps, 1.0, 1.0],
            activities: [Activity::Infinite, Activity::Infinite, Activity::Infinite],
        }
    }
}

impl CoinStage {
    /// The stage as a three-element rank-1 temporal instance.
    pub fn instance(&self) -> (ConstraintFamily, InstanceSequence) {
        let family = ConstraintFamily::rank1(3);
        let seq = InstanceSequence::from_arrivals(&self.weights, &self.activities)
            .expect("fixed stage geometry is valid");
        (family, seq)
    }

    /// Value of the clairvoyant per-stage optimum; on heads the short
    /// activities admit two unit picks, on tails only one element can
    /// ever be taken.
    pub fn dynamic_opt(&self) -> f64 {
        if self.heads {
            2.0
        } else {
            1.0
        }
    }

    /// Value earned by the policy that takes the first element with
    /// probability `p` (then plays optimally), given the realized coin
    /// `took_first`.
    pub fn policy_value(&self, took_first: bool) -> f64 {
        match (self.heads, took_first) {
            // first (weight 1) expires before the third arrives, so both fit
            (true, true) => 2.0,
            // skipped the first; the best single later element is worth 1
            (true, false) => 1.0,
            // the shaved first element blocks everything afterwards
            (false, true) => self.weights[0],
            (false, false) => 1.0,
        }
    }

    /// Expected per-stage value of the fixed-probability policy, averaged
    /// over the fair coin.
    pub fn expected_policy_value(p: f64, eps: f64) -> f64 {
        // heads: p * 2 + (1 - p) * 1; tails: p * eps + (1 - p) * 1
        0.5 * (p * 2.0 + (1.0 - p)) + 0.5 * (p * eps + (1.0 - p))
    }
}

/// One stage of the geometric single-spike construction: position `k`
/// (1-based) carries weight `delta^1` scaled down along earlier positions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpikeStage {
    pub k: usize,
    pub weights: Vec<f64>,
}

const STREAM_SPIKE: u64 = 0x5350_494b;

/// Gap parameter for the single-spike construction.
pub fn spike_delta(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::config("spike construction needs n >= 1"));
    }
    let delta = (alpha - 1.0 / n as f64) / 2.0;
    if delta <= 0.0 {
        return Err(Error::config(format!(
            "spike construction needs alpha > 1/n (alpha = {alpha}, n = {n})"
        )));
    }
    Ok(delta)
}

/// Stage generator for the single-spike construction; position `k` is
/// uniform on `[n]` and weights decay geometrically up to it, zero after.
pub fn gen_spike_stage(seed: u64, t: u64, n: usize, alpha: f64) -> Result<SpikeStage> {
    let delta = spike_delta(n, alpha)?;
    let u = unit_draw(seed, t, STREAM_SPIKE);
    let k = ((u * n as f64) as usize).min(n - 1) + 1;
    let mut weights = vec![0.0; n];
    for j in 1..=k {
        // position j carries delta^(k - j + 1); the spike sits at j = k
        weights[j - 1] = delta.powi((k - j + 1) as i32);
    }
    Ok(SpikeStage { k, weights })
}

impl SpikeStage {
    /// Expected value earned by the informed selector that routes all mass
    /// to the spike position: it samples it surely and the greedy check
    /// passes with probability `1 - e^{-1}`.
    pub fn informed_expected_value(&self, delta: f64) -> f64 {
        (1.0 - (-1.0f64).exp()) * delta
    }

    /// Exact expected value of guessing a fixed position `j` (1-based),
    /// averaged over the uniform spike location.
    pub fn fixed_guess_expected_value(n: usize, delta: f64, j: usize) -> f64 {
        let mut total = 0.0;
        for k in j..=n {
            total += delta.powi((k - j + 1) as i32);
        }
        total / n as f64
    }

    /// Best fixed guess value: guessing the first position dominates.
    pub fn best_fixed_guess_value(n: usize, delta: f64) -> f64 {
        (1..=n)
            .map(|j| Self::fixed_guess_expected_value(n, delta, j))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_stage_is_deterministic_and_fair() {
        let a = gen_coin_stage(7, 42, DEFAULT_COIN_EPS);
        let b = gen_coin_stage(7, 42, DEFAULT_COIN_EPS);
        assert_eq!(a.heads, b.heads);
        assert_eq!(a.weights, b.weights);
        let heads = (1..=100_000)
            .filter(|&t| gen_coin_stage(3, t, DEFAULT_COIN_EPS).heads)
            .count() as f64
            / 100_000.0;
        assert!((heads - 0.5).abs() < 0.01);
    }

    #[test]
    fn coin_stage_dynamic_opt_matches_exhaustive_search() {
        for t in 1..50 {
            let stage = gen_coin_stage(11, t, DEFAULT_COIN_EPS);
            let (family, seq) = stage.instance();
            let (_, best) =
                crate::constraints::best_feasible_set(&seq, &family, &stage.weights).unwrap();
            assert!((best - stage.dynamic_opt()).abs() < 1e-12, "stage {t}");
        }
    }

    #[test]
    fn coin_policy_expected_value_formula() {
        // p = 1 gives (2 + eps)/2, p = 0 gives 1
        let eps = DEFAULT_COIN_EPS;
        assert!((CoinStage::expected_policy_value(1.0, eps) - (2.0 + eps) / 2.0).abs() < 1e-12);
        assert!((CoinStage::expected_policy_value(0.0, eps) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spike_stage_shapes() {
        let n = 8;
        let alpha = 1.0 / std::f64::consts::E;
        let delta = spike_delta(n, alpha).unwrap();
        for t in 1..200 {
            let stage = gen_spike_stage(5, t, n, alpha).unwrap();
            assert!(stage.k >= 1 && stage.k <= n);
            assert!((stage.weights[stage.k - 1] - delta).abs() < 1e-12);
            for w in &stage.weights[stage.k..] {
                assert_eq!(*w, 0.0);
            }
        }
    }

    #[test]
    fn spike_best_guess_is_first_position() {
        let n = 8;
        let delta = spike_delta(n, 1.0 / std::f64::consts::E).unwrap();
        let best = SpikeStage::best_fixed_guess_value(n, delta);
        let first = SpikeStage::fixed_guess_expected_value(n, delta, 1);
        assert!((best - first).abs() < 1e-15);
        // the classical bound: best fixed guess <= 1/n + delta^2 / (1 - delta), loosely delta/n + delta^2 margin
        assert!(best <= delta / n as f64 + delta * delta / (1.0 - delta) + 1e-12);
    }

    #[test]
    fn spike_rejects_small_alpha() {
        assert!(spike_delta(4, 0.25).is_err());
        assert!(spike_delta(4, 0.2).is_err());
    }

    #[test]
    fn adversary_specs_validate() {
        assert!(AdversarySpec::Constant { weights: vec![1.5] }.build(0).is_err());
        assert!(AdversarySpec::UniformRandom { m: 0 }.build(0).is_err());
        assert!(AdversarySpec::CustomTable { rows: vec![vec![0.5], vec![0.1, 0.2]] }
            .build(0)
            .is_err());
        let adv = AdversarySpec::UniformRandom { m: 4 }.build(9).unwrap();
        let w1 = adv.weights(1);
        assert_eq!(w1, adv.weights(1));
        assert_ne!(w1, adv.weights(2));
        assert!(w1.iter().all(|&v| (0.0..1.0).contains(&v)));
    }
}
