//! The simplex solver against exhaustive vertex enumeration.

use phiconv::lp::{Bounds, LinearProgram, LpOutcome, Relation};
use phiconv_oracles::{vertex_enumeration, OracleConstraint, OracleOutcome, OracleRelation};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Instance {
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, u8, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn small() -> impl Strategy<Value = f64> {
    (-20i32..=20).prop_map(|k| f64::from(k) / 4.0)
}

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=6, 0usize..=10).prop_flat_map(|(n, k)| {
        (
            proptest::collection::vec(small(), n),
            proptest::collection::vec((proptest::collection::vec(small(), n), 0u8..3, small()), k),
            proptest::collection::vec((small(), 0.0f64..4.0), n),
        )
            .prop_map(|(objective, rows, bx)| Instance {
                objective,
                rows,
                lower: bx.iter().map(|b| b.0).collect(),
                upper: bx.iter().map(|b| b.0 + b.1.round()).collect(),
            })
    })
}

fn relation(tag: u8) -> (Relation, OracleRelation) {
    match tag {
        0 => (Relation::Le, OracleRelation::Le),
        1 => (Relation::Ge, OracleRelation::Ge),
        _ => (Relation::Eq, OracleRelation::Eq),
    }
}

fn build(inst: &Instance) -> LinearProgram {
    let n = inst.objective.len();
    let mut lp = LinearProgram::new(n);
    for j in 0..n {
        lp.bound(j, Bounds::boxed(inst.lower[j], inst.upper[j]));
    }
    for (row, tag, rhs) in &inst.rows {
        lp.constrain(row.clone(), relation(*tag).0, *rhs);
    }
    lp.maximize(inst.objective.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_matches_vertex_enumeration(inst in instance()) {
        let constraints: Vec<OracleConstraint> = inst
            .rows
            .iter()
            .map(|(row, tag, rhs)| OracleConstraint { row: row.clone(), relation: relation(*tag).1, rhs: *rhs })
            .collect();
        let expected = vertex_enumeration(&inst.objective, &constraints, &inst.lower, &inst.upper);
        let lp = build(&inst);
        let got = lp.solve().unwrap();
        match (&expected, &got) {
            (OracleOutcome::Infeasible, LpOutcome::Infeasible) => {}
            (OracleOutcome::Optimal { value, .. }, LpOutcome::Optimal { value: v, solution }) => {
                prop_assert!((value - v).abs() <= 1e-6 * (1.0 + value.abs()), "oracle {value}, simplex {v}");
                for (j, x) in solution.iter().enumerate() {
                    prop_assert!(*x >= inst.lower[j] - 1e-9 && *x <= inst.upper[j] + 1e-9);
                }
            }
            _ => prop_assert!(false, "oracle {:?}, simplex {:?}", expected, got),
        }
        prop_assert_eq!(lp.solve().unwrap(), got);
    }
}
