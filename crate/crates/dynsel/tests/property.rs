//! Randomized property tests over the core invariants.

use proptest::prelude::*;

use dynsel::constraints::{
    in_temporal_polytope, is_temporally_feasible, temporal_polytope_rows, Activity,
    ConstraintFamily, FractionalPoint, InstanceFile, InstanceSequence,
};
use dynsel::ocrs::Rank1Ocrs;
use dynsel::regret::project_onto_polytope;
use dynsel::temporal::run_temporal;

fn activity_strategy() -> impl Strategy<Value = Activity> {
    prop_oneof![
        (0u32..4).prop_map(Activity::Finite),
        Just(Activity::Infinite),
    ]
}

fn sequence_strategy(m: usize) -> impl Strategy<Value = InstanceSequence> {
    (
        proptest::collection::vec(0.0f64..1.0, m),
        proptest::collection::vec(activity_strategy(), m),
    )
        .prop_map(|(w, a)| InstanceSequence::from_arrivals(&w, &a).unwrap())
}

proptest! {
    #[test]
    fn instance_json_round_trips(seq in sequence_strategy(5)) {
        let family = ConstraintFamily::rank1(5);
        let text = InstanceFile::render(&seq, &family).unwrap();
        let (back, back_family) = InstanceFile::parse(&text).unwrap();
        prop_assert_eq!(back.len(), seq.len());
        prop_assert_eq!(back_family.m, family.m);
        for (a, b) in seq.elements().iter().zip(back.elements()) {
            prop_assert_eq!(a.id, b.id);
            prop_assert_eq!(a.arrival, b.arrival);
            prop_assert_eq!(a.activity, b.activity);
            prop_assert!((a.weight - b.weight).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_output_satisfies_every_row(
        seq in sequence_strategy(4),
        raw in proptest::collection::vec(-1.0f64..2.0, 4),
    ) {
        let family = ConstraintFamily::rank1(4);
        let rows = temporal_polytope_rows(&seq, &family).unwrap();
        let x = project_onto_polytope(&rows, &raw);
        for (a, bound) in &rows {
            let lhs: f64 = a.iter().zip(&x).map(|(c, v)| c * v).sum();
            prop_assert!(lhs <= bound + 1e-9, "row violated: {lhs} > {bound}");
        }
        let point = FractionalPoint::new(x).unwrap();
        prop_assert!(in_temporal_polytope(&point, &seq, &family, 1.0).unwrap());
    }

    #[test]
    fn wrapper_output_is_always_temporally_feasible(
        seq in sequence_strategy(5),
        raw in proptest::collection::vec(0.0f64..1.0, 5),
        seed in 0u64..1000,
    ) {
        let family = ConstraintFamily::rank1(5);
        let rows = temporal_polytope_rows(&seq, &family).unwrap();
        let x = FractionalPoint::new(project_onto_polytope(&rows, &raw)).unwrap();
        let scheme = Rank1Ocrs { m: 5 };
        let (set, _) = run_temporal(&scheme, &x, &seq, 1.0, seed).unwrap();
        prop_assert!(is_temporally_feasible(set, &seq, &family).unwrap());
    }
}
