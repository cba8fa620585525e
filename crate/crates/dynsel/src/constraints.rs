//! Packing constraint families, their polytopes, and the activity-time-aware
//! (temporal) versions of both.
//!
//! A ground set of `m` elements arrives one per slot. Each element carries a
//! weight, an activity time (how many later slots it keeps blocking after its
//! arrival), and a distinct arrival slot. Feasibility of a set under temporal
//! constraints reduces to per-active-set feasibility of the underlying family.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on all linear constraint checks.
pub const TOL_POLY: f64 = 1e-9;

/// Activity time of an element: how many arrival slots it blocks after its own.
///
/// `Infinite` is a distinguished sentinel, not a large number: an element with
/// infinite activity blocks every later arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    Finite(u32),
    Infinite,
}

impl Activity {
    /// True iff an element arriving at `start` with this activity is still
    /// active at slot `at` (inclusive on both ends: `start <= at <= start + d`).
    pub fn covers(self, start: u32, at: u32) -> bool {
        if at < start {
            return false;
        }
        match self {
            Activity::Infinite => true,
            Activity::Finite(d) => at as u64 <= start as u64 + d as u64,
        }
    }
}

impl Serialize for Activity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Activity::Finite(d) => s.serialize_i64(*d as i64),
            Activity::Infinite => s.serialize_i64(-1),
        }
    }
}

impl<'de> Deserialize<'de> for Activity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        match v {
            -1 => Ok(Activity::Infinite),
            d if d >= 0 => Ok(Activity::Finite(d as u32)),
            _ => Err(serde::de::Error::custom("activity must be >= 0 or -1 for infinity")),
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::Finite(d) => write!(f, "{d}"),
            Activity::Infinite => write!(f, "inf"),
        }
    }
}

/// A ground-set item: weight, activity time, and arrival slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: usize,
    pub weight: f64,
    pub activity: Activity,
    pub arrival: u32,
}

/// An ordered input sequence: every ground-set element occurs exactly once,
/// arrival slots are distinct integers in `1..=m`.
#[derive(Debug, Clone)]
pub struct InstanceSequence {
    elements: Vec<Element>,
    m: usize,
}

impl InstanceSequence {
    pub fn new(mut elements: Vec<Element>) -> Result<Self> {
        let m = elements.len();
        let mut seen_id = vec![false; m];
        let mut seen_arrival = vec![false; m];
        for e in &elements {
            if e.id >= m {
                return Err(Error::input(format!("element id {} out of range for m={}", e.id, m)));
            }
            if seen_id[e.id] {
                return Err(Error::input(format!("duplicate element id {}", e.id)));
            }
            seen_id[e.id] = true;
            if e.arrival < 1 || e.arrival as usize > m {
                return Err(Error::input(format!(
                    "arrival slot {} outside 1..={m}",
                    e.arrival
                )));
            }
            if seen_arrival[e.arrival as usize - 1] {
                return Err(Error::input(format!("duplicate arrival slot {}", e.arrival)));
            }
            seen_arrival[e.arrival as usize - 1] = true;
            if e.weight < 0.0 || !e.weight.is_finite() {
                return Err(Error::input(format!("weight {} must be finite and >= 0", e.weight)));
            }
        }
        elements.sort_by_key(|e| e.arrival);
        Ok(Self { elements, m })
    }

    /// Convenience constructor from parallel vectors; `activities[i]` pairs
    /// with arrival slot `i + 1`.
    pub fn from_arrivals(weights: &[f64], activities: &[Activity]) -> Result<Self> {
        let elements = weights
            .iter()
            .zip(activities)
            .enumerate()
            .map(|(i, (&w, &d))| Element { id: i, weight: w, activity: d, arrival: i as u32 + 1 })
            .collect();
        Self::new(elements)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Elements in arrival order.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> &Element {
        self.elements.iter().find(|e| e.id == id).expect("id in range")
    }

    pub fn arrival_of(&self, id: usize) -> u32 {
        self.element(id).arrival
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.m];
        for e in &self.elements {
            w[e.id] = e.weight;
        }
        w
    }

    /// Same arrival order and activities, different weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.m {
            return Err(Error::input("weight vector length mismatch"));
        }
        let elements = self
            .elements
            .iter()
            .map(|e| Element { weight: weights[e.id], ..*e })
            .collect();
        Self::new(elements)
    }
}

/// A subset of the ground set, as a bitmask. Supports `m <= 128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet(pub u128);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_ids(ids: &[usize]) -> Self {
        let mut s = 0u128;
        for &i in ids {
            assert!(i < 128, "ElementSet supports ids < 128");
            s |= 1 << i;
        }
        ElementSet(s)
    }

    pub fn contains(self, id: usize) -> bool {
        id < 128 && self.0 >> id & 1 == 1
    }

    pub fn insert(&mut self, id: usize) {
        assert!(id < 128);
        self.0 |= 1 << id;
    }

    pub fn intersect(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 & other.0)
    }

    pub fn with(self, id: usize) -> ElementSet {
        let mut s = self;
        s.insert(id);
        s
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..128).filter(move |&i| self.contains(i))
    }

    pub fn is_subset_of(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Feasibility oracle signature for user-supplied families.
pub type FeasibilityFn = Arc<dyn Fn(ElementSet) -> bool + Send + Sync>;

/// The built-in packing families plus a user-supplied oracle escape hatch.
#[derive(Clone)]
pub enum ConstraintKind {
    /// At most one element.
    Rank1,
    /// Elements are edges of a graph given by their endpoint pairs; a set is
    /// feasible iff it is a matching.
    BipartiteMatching(Vec<[usize; 2]>),
    /// Sum of selected sizes bounded by the budget.
    Knapsack { sizes: Vec<f64>, budget: f64 },
    /// Arbitrary downward-closed oracle. No polytope description available.
    Custom(FeasibilityFn),
}

impl fmt::Debug for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintKind::Rank1 => write!(f, "Rank1"),
            ConstraintKind::BipartiteMatching(edges) => {
                write!(f, "BipartiteMatching({} edges)", edges.len())
            }
            ConstraintKind::Knapsack { sizes, budget } => {
                write!(f, "Knapsack({} items, budget {budget})", sizes.len())
            }
            ConstraintKind::Custom(_) => write!(f, "Custom(oracle)"),
        }
    }
}

/// A packing family over a ground set of size `m`.
#[derive(Debug, Clone)]
pub struct ConstraintFamily {
    pub kind: ConstraintKind,
    pub m: usize,
}

impl ConstraintFamily {
    pub fn rank1(m: usize) -> Self {
        Self { kind: ConstraintKind::Rank1, m }
    }

    pub fn matching(edges: Vec<[usize; 2]>) -> Self {
        let m = edges.len();
        Self { kind: ConstraintKind::BipartiteMatching(edges), m }
    }

    pub fn knapsack(sizes: Vec<f64>, budget: f64) -> Self {
        let m = sizes.len();
        Self { kind: ConstraintKind::Knapsack { sizes, budget }, m }
    }

    pub fn custom(m: usize, oracle: FeasibilityFn) -> Self {
        Self { kind: ConstraintKind::Custom(oracle), m }
    }

    fn check_range(&self, set: ElementSet) -> Result<()> {
        if let Some(max) = set.iter().max() {
            if max >= self.m {
                return Err(Error::input(format!("element id {max} out of range for m={}", self.m)));
            }
        }
        Ok(())
    }
}

/// True iff `set` is independent in `family`.
pub fn is_feasible(set: ElementSet, family: &ConstraintFamily) -> Result<bool> {
    family.check_range(set)?;
    Ok(match &family.kind {
        ConstraintKind::Rank1 => set.len() <= 1,
        ConstraintKind::BipartiteMatching(edges) => {
            let mut used = std::collections::HashSet::new();
            let mut ok = true;
            for e in set.iter() {
                let [u, v] = edges[e];
                if !used.insert(u) || !used.insert(v) {
                    ok = false;
                    break;
                }
            }
            ok
        }
        ConstraintKind::Knapsack { sizes, budget } => {
            set.iter().map(|e| sizes[e]).sum::<f64>() <= budget + TOL_POLY
        }
        ConstraintKind::Custom(oracle) => oracle(set),
    })
}

/// The set of elements still active when `e` arrives, per the inclusive rule
/// `s_{e'} <= s_e <= s_{e'} + d_{e'}`. Always contains `e` itself.
pub fn active_elements(e: usize, seq: &InstanceSequence) -> ElementSet {
    let s_e = seq.arrival_of(e);
    let mut set = ElementSet::EMPTY;
    for other in seq.elements() {
        if other.arrival <= s_e && other.activity.covers(other.arrival, s_e) {
            set.insert(other.id);
        }
    }
    set
}

/// True iff `S ∩ E_e` is independent for every element `e`.
pub fn is_temporally_feasible(
    set: ElementSet,
    seq: &InstanceSequence,
    family: &ConstraintFamily,
) -> Result<bool> {
    family.check_range(set)?;
    for e in seq.elements() {
        let active = active_elements(e.id, seq);
        if !is_feasible(set.intersect(active), family)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A vector in `[0,1]^m`, optionally recording which down-scaled polytope it
/// was certified against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalPoint {
    pub values: Vec<f64>,
    pub scale_hint: Option<f64>,
}

impl FractionalPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(-TOL_POLY..=1.0 + TOL_POLY).contains(&v) || !v.is_finite() {
                return Err(Error::input(format!("x[{i}] = {v} outside [0,1]")));
            }
        }
        Ok(Self { values: values.iter().map(|v| v.clamp(0.0, 1.0)).collect(), scale_hint: None })
    }

    pub fn zero(m: usize) -> Self {
        Self { values: vec![0.0; m], scale_hint: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_scale(b: f64) -> Result<()> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::input(format!("scale b = {b} outside (0, 1]")));
    }
    Ok(())
}

/// The closed-form constraint rows (coefficients, bound at b = 1) describing
/// `P_F` for the built-in families. Box constraints `0 <= x <= 1` are implied.
pub fn polytope_rows(family: &ConstraintFamily) -> Result<Vec<(Vec<f64>, f64)>> {
    let m = family.m;
    match &family.kind {
        ConstraintKind::Rank1 => Ok(vec![(vec![1.0; m], 1.0)]),
        ConstraintKind::BipartiteMatching(edges) => {
            let mut verts: Vec<usize> = edges.iter().flatten().copied().collect();
            verts.sort_unstable();
            verts.dedup();
            Ok(verts
                .iter()
                .map(|&u| {
                    let row = (0..m)
                        .map(|e| if edges[e].contains(&u) { 1.0 } else { 0.0 })
                        .collect();
                    (row, 1.0)
                })
                .collect())
        }
        ConstraintKind::Knapsack { sizes, budget } => Ok(vec![(sizes.clone(), *budget)]),
        ConstraintKind::Custom(_) => {
            Err(Error::input("no closed-form polytope for a custom oracle family"))
        }
    }
}

/// The per-active-set constraint rows of the temporal polytope `P^d_F`:
/// each base row restricted to `E_e`, for every element `e`.
pub fn temporal_polytope_rows(
    seq: &InstanceSequence,
    family: &ConstraintFamily,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let base = polytope_rows(family)?;
    let mut rows = Vec::new();
    for e in seq.elements() {
        let active = active_elements(e.id, seq);
        for (coeffs, bound) in &base {
            let row: Vec<f64> = coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| if active.contains(i) { c } else { 0.0 })
                .collect();
            rows.push((row, *bound));
        }
    }
    Ok(rows)
}

/// True iff `x ∈ b·P_F`, using the closed-form constraint list per family.
pub fn in_polytope(x: &FractionalPoint, family: &ConstraintFamily, b: f64) -> Result<bool> {
    check_scale(b)?;
    if x.len() != family.m {
        return Err(Error::input("dimension mismatch between x and family"));
    }
    Ok(polytope_rows(family)?
        .iter()
        .all(|(row, bound)| dot(row, &x.values) <= b * bound + TOL_POLY))
}

/// True iff every per-active-set constraint holds at scale `b`.
pub fn in_temporal_polytope(
    x: &FractionalPoint,
    seq: &InstanceSequence,
    family: &ConstraintFamily,
    b: f64,
) -> Result<bool> {
    check_scale(b)?;
    if x.len() != family.m {
        return Err(Error::input("dimension mismatch between x and family"));
    }
    Ok(temporal_polytope_rows(seq, family)?
        .iter()
        .all(|(row, bound)| dot(row, &x.values) <= b * bound + TOL_POLY))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// On-disk instance format: `{m, kind, kind_params, elements: [...]}` with
/// activity `-1` encoding infinity.
#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub m: usize,
    pub kind: String,
    #[serde(default)]
    pub kind_params: serde_json::Value,
    pub elements: Vec<Element>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<(InstanceSequence, ConstraintFamily)> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("instance JSON: {e}")))?;
        if file.elements.len() != file.m {
            return Err(Error::parse("element count does not match m"));
        }
        let seq = InstanceSequence::new(file.elements.clone())?;
        let family = match file.kind.as_str() {
            "rank1" => ConstraintFamily::rank1(file.m),
            "bipartite_matching" => {
                let edges: Vec<[usize; 2]> = serde_json::from_value(file.kind_params.clone())
                    .map_err(|e| Error::parse(format!("matching kind_params: {e}")))?;
                if edges.len() != file.m {
                    return Err(Error::parse("edge list length does not match m"));
                }
                ConstraintFamily::matching(edges)
            }
            "knapsack" => {
                #[derive(Deserialize)]
                struct P {
                    sizes: Vec<f64>,
                    budget: f64,
                }
                let p: P = serde_json::from_value(file.kind_params.clone())
                    .map_err(|e| Error::parse(format!("knapsack kind_params: {e}")))?;
                if p.sizes.len() != file.m {
                    return Err(Error::parse("sizes length does not match m"));
                }
                ConstraintFamily::knapsack(p.sizes, p.budget)
            }
            other => return Err(Error::parse(format!("unknown constraint kind {other:?}"))),
        };
        Ok((seq, family))
    }

    pub fn render(seq: &InstanceSequence, family: &ConstraintFamily) -> Result<String> {
        let (kind, kind_params) = match &family.kind {
            ConstraintKind::Rank1 => ("rank1".to_string(), serde_json::Value::Null),
            ConstraintKind::BipartiteMatching(edges) => {
                ("bipartite_matching".to_string(), serde_json::to_value(edges).unwrap())
            }
            ConstraintKind::Knapsack { sizes, budget } => (
                "knapsack".to_string(),
                serde_json::json!({ "sizes": sizes, "budget": budget }),
            ),
            ConstraintKind::Custom(_) => {
                return Err(Error::input("custom oracle families are not serializable"))
            }
        };
        let file = InstanceFile {
            m: seq.len(),
            kind,
            kind_params,
            elements: seq.elements().to_vec(),
        };
        Ok(serde_json::to_string_pretty(&file).unwrap())
    }
}

/// Enumerate all temporally feasible sets (desk scale: `m <= ~20`).
pub fn enumerate_temporally_feasible(
    seq: &InstanceSequence,
    family: &ConstraintFamily,
) -> Result<Vec<ElementSet>> {
    let m = seq.len();
    assert!(m <= 20, "exhaustive enumeration is limited to m <= 20");
    let mut out = Vec::new();
    for mask in 0u128..(1u128 << m) {
        let set = ElementSet(mask);
        if is_temporally_feasible(set, seq, family)? {
            out.push(set);
        }
    }
    Ok(out)
}

/// Max-weight temporally feasible set by exhaustive enumeration.
pub fn best_feasible_set(
    seq: &InstanceSequence,
    family: &ConstraintFamily,
    weights: &[f64],
) -> Result<(ElementSet, f64)> {
    let mut best = (ElementSet::EMPTY, 0.0);
    for set in enumerate_temporally_feasible(seq, family)? {
        let w: f64 = set.iter().map(|e| weights[e]).sum();
        if w > best.1 {
            best = (set, w);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(arrivals_d: &[Activity]) -> InstanceSequence {
        InstanceSequence::from_arrivals(&vec![1.0; arrivals_d.len()], arrivals_d).unwrap()
    }

    #[test]
    fn empty_set_is_feasible_everywhere() {
        for family in [
            ConstraintFamily::rank1(3),
            ConstraintFamily::matching(vec![[0, 1], [1, 2], [2, 3]]),
            ConstraintFamily::knapsack(vec![0.5, 0.5, 0.5], 1.0),
        ] {
            assert!(is_feasible(ElementSet::EMPTY, &family).unwrap());
        }
    }

    #[test]
    fn rank1_rejects_pairs() {
        let family = ConstraintFamily::rank1(2);
        assert!(!is_feasible(ElementSet::from_ids(&[0, 1]), &family).unwrap());
        assert!(is_feasible(ElementSet::from_ids(&[1]), &family).unwrap());
    }

    #[test]
    fn knapsack_sum_over_budget() {
        // c = (0.6, 0.5), B = 1: 1.1 > 1.
        let family = ConstraintFamily::knapsack(vec![0.6, 0.5], 1.0);
        assert!(!is_feasible(ElementSet::from_ids(&[0, 1]), &family).unwrap());
        assert!(is_feasible(ElementSet::from_ids(&[0]), &family).unwrap());
    }

    #[test]
    fn out_of_range_id_is_input_error() {
        let family = ConstraintFamily::rank1(2);
        assert!(is_feasible(ElementSet::from_ids(&[5]), &family).is_err());
    }

    #[test]
    fn active_single_element() {
        let s = seq(&[Activity::Finite(0)]);
        assert_eq!(active_elements(0, &s), ElementSet::from_ids(&[0]));
    }

    #[test]
    fn active_respects_inclusive_window() {
        // s = (1,2,3), d = (2,0,0): at s=3, element 0 is active since 1+2 >= 3.
        let s = seq(&[Activity::Finite(2), Activity::Finite(0), Activity::Finite(0)]);
        assert_eq!(active_elements(2, &s), ElementSet::from_ids(&[0, 2]));
    }

    #[test]
    fn infinite_activity_never_expires() {
        let s = seq(&[Activity::Infinite, Activity::Infinite, Activity::Infinite]);
        assert_eq!(active_elements(2, &s), ElementSet::from_ids(&[0, 1, 2]));
        assert_eq!(active_elements(0, &s), ElementSet::from_ids(&[0]));
    }

    #[test]
    fn temporal_rank1_expired_pair_is_feasible() {
        let family = ConstraintFamily::rank1(2);
        let both = ElementSet::from_ids(&[0, 1]);
        let expired = seq(&[Activity::Finite(0), Activity::Finite(0)]);
        assert!(is_temporally_feasible(both, &expired, &family).unwrap());
        let blocking = seq(&[Activity::Finite(5), Activity::Finite(0)]);
        assert!(!is_temporally_feasible(both, &blocking, &family).unwrap());
    }

    #[test]
    fn polytope_membership_rank1() {
        let family = ConstraintFamily::rank1(2);
        let zero = FractionalPoint::zero(2);
        assert!(in_polytope(&zero, &family, 1.0).unwrap());
        assert!(in_polytope(&zero, &family, 0.25).unwrap());
        let x = FractionalPoint::new(vec![0.6, 0.6]).unwrap();
        assert!(!in_polytope(&x, &family, 1.0).unwrap());
    }

    #[test]
    fn polytope_membership_single_edge() {
        let family = ConstraintFamily::matching(vec![[0, 1]]);
        let x = FractionalPoint::new(vec![1.0]).unwrap();
        assert!(in_polytope(&x, &family, 1.0).unwrap());
    }

    #[test]
    fn scale_out_of_range_is_error() {
        let family = ConstraintFamily::rank1(1);
        let x = FractionalPoint::zero(1);
        assert!(in_polytope(&x, &family, 0.0).is_err());
        assert!(in_polytope(&x, &family, 1.5).is_err());
    }

    #[test]
    fn temporal_polytope_rank1_examples() {
        let family = ConstraintFamily::rank1(2);
        let ones = FractionalPoint::new(vec![1.0, 1.0]).unwrap();
        let expired = seq(&[Activity::Finite(0), Activity::Finite(0)]);
        assert!(in_temporal_polytope(&ones, &expired, &family, 1.0).unwrap());
        let blocking = seq(&[Activity::Finite(5), Activity::Finite(0)]);
        assert!(!in_temporal_polytope(&ones, &blocking, &family, 1.0).unwrap());
    }

    #[test]
    fn nontemporal_membership_implies_temporal() {
        // x in b·P_F implies x in b·P^d_F for any activities.
        let family = ConstraintFamily::matching(vec![[0, 1], [1, 2], [0, 2]]);
        let x = FractionalPoint::new(vec![0.3, 0.3, 0.3]).unwrap();
        assert!(in_polytope(&x, &family, 1.0).unwrap());
        for acts in [
            [Activity::Infinite; 3],
            [Activity::Finite(0); 3],
            [Activity::Finite(1), Activity::Infinite, Activity::Finite(0)],
        ] {
            let s = seq(&acts);
            assert!(in_temporal_polytope(&x, &s, &family, 1.0).unwrap());
        }
    }

    #[test]
    fn degenerate_reduction_all_infinite() {
        // With all d = infinity the temporal checks coincide with the standard ones.
        let family = ConstraintFamily::knapsack(vec![0.4, 0.5, 0.6], 1.0);
        let s = seq(&[Activity::Infinite; 3]);
        for mask in 0u128..8 {
            let set = ElementSet(mask);
            assert_eq!(
                is_temporally_feasible(set, &s, &family).unwrap(),
                is_feasible(set, &family).unwrap()
            );
        }
        for x in [vec![0.2, 0.9, 0.1], vec![1.0, 1.0, 1.0], vec![0.5, 0.4, 0.3]] {
            let x = FractionalPoint::new(x).unwrap();
            assert_eq!(
                in_temporal_polytope(&x, &s, &family, 1.0).unwrap(),
                in_polytope(&x, &family, 1.0).unwrap()
            );
        }
    }

    #[test]
    fn downward_closure_exhaustive() {
        let family = ConstraintFamily::knapsack(vec![0.3, 0.4, 0.5, 0.2, 0.7], 1.0);
        for mask in 0u128..32 {
            let set = ElementSet(mask);
            if is_feasible(set, &family).unwrap() {
                let mut sub = mask;
                loop {
                    assert!(is_feasible(ElementSet(sub), &family).unwrap());
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & mask;
                }
            }
        }
    }

    #[test]
    fn vertex_consistency_exhaustive() {
        let family = ConstraintFamily::matching(vec![[0, 1], [1, 2], [2, 3], [3, 0]]);
        let s = seq(&[
            Activity::Finite(1),
            Activity::Infinite,
            Activity::Finite(0),
            Activity::Finite(2),
        ]);
        for mask in 0u128..16 {
            let set = ElementSet(mask);
            if is_temporally_feasible(set, &s, &family).unwrap() {
                let ind: Vec<f64> = (0..4).map(|i| if set.contains(i) { 1.0 } else { 0.0 }).collect();
                let x = FractionalPoint::new(ind).unwrap();
                assert!(in_temporal_polytope(&x, &s, &family, 1.0).unwrap(), "set {set}");
            }
        }
    }

    #[test]
    fn activity_monotonicity() {
        // Shrinking activities only enlarges the feasible family (Observation 3.3).
        let family = ConstraintFamily::rank1(3);
        let long = seq(&[Activity::Finite(2), Activity::Finite(2), Activity::Finite(0)]);
        let short = seq(&[Activity::Finite(1), Activity::Finite(0), Activity::Finite(0)]);
        for mask in 0u128..8 {
            let set = ElementSet(mask);
            if is_temporally_feasible(set, &long, &family).unwrap() {
                assert!(is_temporally_feasible(set, &short, &family).unwrap());
            }
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let s = InstanceSequence::from_arrivals(
            &[0.5, 0.25],
            &[Activity::Infinite, Activity::Finite(3)],
        )
        .unwrap();
        let family = ConstraintFamily::knapsack(vec![0.9, 0.8], 1.5);
        let text = InstanceFile::render(&s, &family).unwrap();
        assert!(text.contains("-1"), "infinite activity encodes as -1");
        let (s2, f2) = InstanceFile::parse(&text).unwrap();
        assert_eq!(s2.elements(), s.elements());
        assert!(matches!(f2.kind, ConstraintKind::Knapsack { .. }));
    }

    #[test]
    fn malformed_instance_is_parse_error() {
        assert!(InstanceFile::parse("{not json").is_err());
    }
}
