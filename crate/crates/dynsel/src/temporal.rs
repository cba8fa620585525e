//! Black-box reduction wrapping any greedy OCRS into a temporal greedy OCRS.
//!
//! Upon each arrival the wrapper recomputes the active set `E_e`, checks that
//! the still-active part of the running selection plus the newcomer stays
//! inside the base subfamily, and only then consults the base scheme. When
//! the check fails the element is discarded without touching the base scheme;
//! since all per-element coins are keyed by element id, replay alignment is
//! preserved either way.

use crate::constraints::{
    active_elements, in_temporal_polytope, ElementSet, FractionalPoint, InstanceSequence,
};
use crate::error::{Error, Result};
use crate::ocrs::{sample_r, GreedyOcrs, OcrsState, SelectionStep, SelectionTranscript};

/// Run the temporal wrapper around `base` on the given sequence.
///
/// Precondition: `x ∈ b·P^d_F` (checked against the temporal polytope).
/// Returns the selected set, which always satisfies `is_temporally_feasible`,
/// plus the per-element transcript in arrival order.
pub fn run_temporal(
    base: &dyn GreedyOcrs,
    x: &FractionalPoint,
    seq: &InstanceSequence,
    b: f64,
    seed: u64,
) -> Result<(ElementSet, SelectionTranscript)> {
    if !in_temporal_polytope(x, seq, &base.family(), b)? {
        return Err(Error::precondition("x outside b·P^d_F for the temporal family"));
    }
    let r = sample_r(x, seed);
    let mut state = OcrsState::init_unchecked(base, x, seed);
    let mut selected = ElementSet::EMPTY;
    for e in seq.elements() {
        let active = active_elements(e.id, seq);
        let context = selected.intersect(active);
        if base.feasible_with(context, e.id) {
            if state.observe_against(e.id, r.contains(e.id), context) {
                selected.insert(e.id);
            }
        } else {
            // Discard branch: the base scheme is not consulted for e.
            state.transcript.steps.push(SelectionStep {
                element: e.id,
                sampled: r.contains(e.id),
                feasible_at_arrival: false,
                accepted: false,
                accept_probability: 0.0,
            });
        }
    }
    Ok((selected, state.transcript))
}
