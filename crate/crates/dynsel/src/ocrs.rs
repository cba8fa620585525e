//! Greedy online contention resolution schemes behind a pluggable interface.
//!
//! A greedy OCRS fixes a (randomized) packing subfamily up front and accepts
//! an arriving sampled element iff adding it to the already selected elements
//! stays inside that subfamily. The two built-in schemes (rank-1 and graph
//! matching) share the same acceptance coin: an element with mass `x_e` joins
//! the subfamily draw `H(x)` with probability `(1 - e^{-x_e})/x_e`.

use serde::{Deserialize, Serialize};

use crate::coins::{unit_draw, STREAM_SAMPLE, STREAM_SUBFAMILY};
use crate::constraints::{ConstraintFamily, ElementSet, FractionalPoint, in_polytope};
use crate::error::{Error, Result};

/// The acceptance ratio `(1 - e^{-x})/x`, with the removable singularity at
/// `x = 0` defined by its limit 1.
pub fn accept_ratio(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        // exp_m1 keeps the quotient accurate as x -> 0
        -(-x).exp_m1() / x
    }
}

/// Unconditional selection probability of an element given its mass:
/// sampling (`x`) times acceptance (`(1 - e^{-x})/x`).
pub fn unconditional_selection_probability(x: f64) -> f64 {
    1.0 - (-x).exp()
}

/// A pluggable greedy OCRS. Built-in implementations cover rank-1 matroids
/// and graph matchings; third-party schemes (knapsack, general matroids)
/// implement the same surface.
pub trait GreedyOcrs: Send + Sync {
    /// Check that `x` lies in the scheme's scaled polytope.
    fn check_input(&self, x: &FractionalPoint, b: f64) -> Result<()>;

    /// Whether `selected ∪ {e}` stays inside the deterministic part of the
    /// subfamily, i.e. the family constraint restricted to already selected
    /// elements. The randomized part (the `H(x)` coin) is handled by the
    /// runner.
    fn feasible_with(&self, selected: ElementSet, e: usize) -> bool;

    /// Conditional acceptance probability of a feasible sampled element.
    fn accept_probability(&self, x_e: f64) -> f64 {
        accept_ratio(x_e)
    }

    /// The proven selectability constant `c` at scale `b`.
    fn selectability_constant(&self, b: f64) -> f64;

    /// Elements whose selection can block `e` (all others for rank-1; edges
    /// sharing an endpoint for matching). Used by selectability analysis.
    fn blockers(&self, e: usize) -> ElementSet;

    fn family(&self) -> ConstraintFamily;
}

/// Rank-1 matroid scheme: at most one element is ever selected.
/// `(1, 1/e)`-selectable.
#[derive(Debug, Clone)]
pub struct Rank1Ocrs {
    pub m: usize,
}

impl GreedyOcrs for Rank1Ocrs {
    fn check_input(&self, x: &FractionalPoint, b: f64) -> Result<()> {
        if !in_polytope(x, &self.family(), b)? {
            return Err(Error::precondition(format!(
                "x outside {b}·P_F for the rank-1 family (sum {} > {b})",
                x.values.iter().sum::<f64>()
            )));
        }
        Ok(())
    }

    fn feasible_with(&self, selected: ElementSet, _e: usize) -> bool {
        selected.is_empty()
    }

    fn selectability_constant(&self, _b: f64) -> f64 {
        1.0 / std::f64::consts::E
    }

    fn blockers(&self, e: usize) -> ElementSet {
        let mut all = ElementSet::EMPTY;
        for i in 0..self.m {
            if i != e {
                all.insert(i);
            }
        }
        all
    }

    fn family(&self) -> ConstraintFamily {
        ConstraintFamily::rank1(self.m)
    }
}

/// Graph matching scheme over edges given by endpoint pairs.
/// `(b, e^{-2b})`-selectable.
#[derive(Debug, Clone)]
pub struct MatchingOcrs {
    pub edges: Vec<[usize; 2]>,
    pub b: f64,
}

impl MatchingOcrs {
    pub fn new(edges: Vec<[usize; 2]>, b: f64) -> Self {
        Self { edges, b }
    }
}

impl GreedyOcrs for MatchingOcrs {
    fn check_input(&self, x: &FractionalPoint, b: f64) -> Result<()> {
        if !in_polytope(x, &self.family(), b)? {
            return Err(Error::precondition(format!(
                "x outside {b}·P_G for the matching family"
            )));
        }
        Ok(())
    }

    fn feasible_with(&self, selected: ElementSet, e: usize) -> bool {
        let [u, v] = self.edges[e];
        selected
            .iter()
            .all(|e2| e2 == e || !self.edges[e2].contains(&u) && !self.edges[e2].contains(&v))
    }

    fn selectability_constant(&self, b: f64) -> f64 {
        (-2.0 * b).exp()
    }

    fn blockers(&self, e: usize) -> ElementSet {
        let [u, v] = self.edges[e];
        let mut set = ElementSet::EMPTY;
        for (i, edge) in self.edges.iter().enumerate() {
            if i != e && (edge.contains(&u) || edge.contains(&v)) {
                set.insert(i);
            }
        }
        set
    }

    fn family(&self) -> ConstraintFamily {
        ConstraintFamily::matching(self.edges.clone())
    }
}

/// Remark-level metadata for a knapsack scheme plugged in externally:
/// `(b, (1-2b)/(2-2b))`-selectability at `b < 1/2`.
pub fn knapsack_selectability_constant(b: f64) -> f64 {
    (1.0 - 2.0 * b) / (2.0 - 2.0 * b)
}

/// Per-element record of one scheme run, in arrival order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub element: usize,
    pub sampled: bool,
    pub feasible_at_arrival: bool,
    pub accepted: bool,
    /// Conditional acceptance probability given the transcript prefix.
    pub accept_probability: f64,
}

/// The audit trail of one OCRS run.
#[derive(Debug, Clone, Default)]
pub struct SelectionTranscript {
    pub steps: Vec<SelectionStep>,
    /// Mass of each element under the fractional input the run was driven by.
    pub x: Vec<f64>,
}

impl SelectionTranscript {
    pub fn selected_set(&self) -> ElementSet {
        let mut s = ElementSet::EMPTY;
        for step in &self.steps {
            if step.accepted {
                s.insert(step.element);
            }
        }
        s
    }

    /// JSON-lines rendering, one element per line.
    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).unwrap())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// The probability that the run accepts `e` conditioned on the realized
/// prefix: sampling times acceptance, `1 - e^{-x_e}`. This is the importance
/// weight `q_t(e)` used by the semi-bandit estimator.
pub fn selection_probability(transcript: &SelectionTranscript, e: usize) -> Result<f64> {
    let step = transcript
        .steps
        .iter()
        .find(|s| s.element == e)
        .ok_or_else(|| Error::query(format!("element {e} not in transcript")))?;
    if !step.accepted {
        return Err(Error::query(format!("element {e} was not accepted")));
    }
    Ok(unconditional_selection_probability(transcript.x[e]))
}

/// Draw `R(x)`: each element independently with probability `x_e`, keyed by
/// element id so the draw is arrival-order-free.
pub fn sample_r(x: &FractionalPoint, seed: u64) -> ElementSet {
    let mut r = ElementSet::EMPTY;
    for (e, &xe) in x.values.iter().enumerate() {
        if unit_draw(seed, e as u64, STREAM_SAMPLE) < xe {
            r.insert(e);
        }
    }
    r
}

/// Running state of one scheme execution: `init / observe / prob`.
pub struct OcrsState<'a> {
    scheme: &'a dyn GreedyOcrs,
    x: &'a FractionalPoint,
    seed: u64,
    pub selected: ElementSet,
    pub transcript: SelectionTranscript,
}

impl<'a> OcrsState<'a> {
    /// Initialize a run; checks the polytope precondition at scale `b`.
    pub fn init(
        scheme: &'a dyn GreedyOcrs,
        x: &'a FractionalPoint,
        b: f64,
        seed: u64,
    ) -> Result<Self> {
        scheme.check_input(x, b)?;
        Ok(Self::init_unchecked(scheme, x, seed))
    }

    /// Start a run without a polytope check. The temporal wrapper uses this
    /// after validating `x` against the temporal polytope instead.
    pub fn init_unchecked(scheme: &'a dyn GreedyOcrs, x: &'a FractionalPoint, seed: u64) -> Self {
        Self {
            scheme,
            x,
            seed,
            selected: ElementSet::EMPTY,
            transcript: SelectionTranscript { steps: Vec::new(), x: x.values.clone() },
        }
    }

    /// The subfamily coin for `e`: membership in `H(x)`, keyed by element id.
    pub fn subfamily_draw(&self, e: usize) -> bool {
        unit_draw(self.seed, e as u64, STREAM_SUBFAMILY)
            < self.scheme.accept_probability(self.x.values[e])
    }

    /// Observe the arrival of `e`, checking feasibility against the full
    /// selected set. Returns whether `e` was accepted.
    pub fn observe(&mut self, e: usize, sampled: bool) -> bool {
        let context = self.selected;
        self.observe_against(e, sampled, context)
    }

    /// Observe the arrival of `e`, checking feasibility against an explicit
    /// blocking context (the temporal wrapper passes `S^d ∩ E_e`).
    pub fn observe_against(&mut self, e: usize, sampled: bool, context: ElementSet) -> bool {
        let feasible = self.scheme.feasible_with(context, e);
        let accept_probability =
            if feasible { self.scheme.accept_probability(self.x.values[e]) } else { 0.0 };
        let accepted = sampled && feasible && self.subfamily_draw(e);
        if accepted {
            self.selected.insert(e);
        }
        self.transcript.steps.push(SelectionStep {
            element: e,
            sampled,
            feasible_at_arrival: feasible,
            accepted,
            accept_probability,
        });
        accepted
    }

    /// `q(e)` for an accepted element.
    pub fn prob(&self, e: usize) -> Result<f64> {
        selection_probability(&self.transcript, e)
    }
}

/// Run a scheme directly (non-temporal) over the given arrival order.
pub fn run_base(
    scheme: &dyn GreedyOcrs,
    x: &FractionalPoint,
    order: &[usize],
    b: f64,
    seed: u64,
) -> Result<SelectionTranscript> {
    let r = sample_r(x, seed);
    let mut state = OcrsState::init(scheme, x, b, seed)?;
    for &e in order {
        state.observe(e, r.contains(e));
    }
    Ok(state.transcript)
}

/// The selectability event for `e` in one realized run: `e` is in the
/// subfamily draw and no potential blocker of `e` in the given active window
/// is both sampled and in the subfamily. When this event holds, `e` would be
/// accepted no matter which feasible prefix the adversary engineered.
pub fn selectable_event(
    scheme: &dyn GreedyOcrs,
    x: &FractionalPoint,
    e: usize,
    active_blockers: ElementSet,
    seed: u64,
) -> bool {
    if !(unit_draw(seed, e as u64, STREAM_SUBFAMILY)
        < scheme.accept_probability(x.values[e]))
    {
        return false;
    }
    for e2 in active_blockers.intersect(scheme.blockers(e)).iter() {
        let sampled = unit_draw(seed, e2 as u64, STREAM_SAMPLE) < x.values[e2];
        let coin = unit_draw(seed, e2 as u64, STREAM_SUBFAMILY)
            < scheme.accept_probability(x.values[e2]);
        if sampled && coin {
            return false;
        }
    }
    true
}

/// Exact probability of the selectability event: closed-form product
/// `ratio(x_e) · Π e^{-x_{e'}}` over the active blockers.
pub fn selectable_probability(
    scheme: &dyn GreedyOcrs,
    x: &FractionalPoint,
    e: usize,
    active_blockers: ElementSet,
) -> f64 {
    let others: f64 = active_blockers
        .intersect(scheme.blockers(e))
        .iter()
        .map(|e2| -x.values[e2])
        .sum::<f64>()
        .exp();
    accept_ratio(x.values[e]) * others
}
