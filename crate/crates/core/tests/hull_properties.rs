mod common;

use common::*;
use phiconv::hull::{hull_membership, phi_convex_hull, Membership};
use phiconv::{Dictionary, NormKind, PhiSpace, PointSubset};
use phiconv_oracles::{convex_hull_vertices, point_in_convex_polygon};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_is_extensive_monotone_idempotent(
        space in table_space(7, 3, NormKind::SupOnK),
        a in subset_of(7),
        extra in subset_of(7),
    ) {
        let all = space.full();
        let b = a.union(&extra);
        let ha = phi_convex_hull(&space, &a, &all).unwrap();
        let hb = phi_convex_hull(&space, &b, &all).unwrap();
        prop_assert!(a.is_subset_of(&ha));
        prop_assert!(ha.is_subset_of(&hb));
        prop_assert_eq!(phi_convex_hull(&space, &ha, &all).unwrap(), ha);
    }

    #[test]
    fn certificates_are_sound(space in table_space(7, 3, NormKind::SupOnK), a in subset_of(7)) {
        for x in 0..7 {
            if let Membership::Outside(cert) = hull_membership(&space, &a, x).unwrap() {
                prop_assert!(cert.verify(&space, &a, x).unwrap());
            }
        }
    }

    #[test]
    fn decisions_invariant_under_positive_scaling(
        space in table_space(6, 3, NormKind::SupOnK),
        a in subset_of(6),
        lambda in 0.01f64..100.0,
    ) {
        let scaled_rows = space.rows().iter().map(|r| r.iter().map(|v| lambda * v).collect()).collect();
        let scaled = PhiSpace::new(space.ground_arc().clone(), scaled_rows, NormKind::SupOnK).unwrap();
        for x in 0..6 {
            let m1 = hull_membership(&space, &a, x).unwrap();
            let m2 = hull_membership(&scaled, &a, x).unwrap();
            let borderline = |m: &Membership| matches!(m, Membership::Outside(c) if c.margin < 1e-6);
            if !borderline(&m1) && !borderline(&m2) {
                prop_assert_eq!(m1.is_inside(), m2.is_inside(), "point {}", x);
            }
        }
    }

    #[test]
    fn affine_hull_matches_planar_point_in_polygon(picks in proptest::collection::btree_set(0usize..49, 1..7)) {
        let grid = integer_grid(3);
        let ground = planar_ground(&grid);
        let space = PhiSpace::from_dictionary(ground.clone(), &Dictionary::Affine, NormKind::SupOnK).unwrap();
        let a = PointSubset::new(grid.len(), picks.iter().copied()).unwrap();
        let chosen: Vec<[f64; 2]> = a.iter().map(|i| grid[i]).collect();
        let poly: Vec<[f64; 2]> = convex_hull_vertices(&chosen).iter().map(|&i| chosen[i]).collect();
        for (x, &p) in grid.iter().enumerate() {
            let classical = point_in_convex_polygon(&poly, p, 1e-9);
            match hull_membership(&space, &a, x).unwrap() {
                Membership::Inside => prop_assert!(classical, "LP inside, oracle outside at {:?}", p),
                Membership::Outside(cert) => {
                    if cert.margin > 1e-7 {
                        prop_assert!(!classical, "LP outside, oracle inside at {:?}", p);
                    }
                }
            }
        }
    }
}

/// Collinear lattice points under a badly scaled rbf dictionary: degenerate
/// programs whose raw simplex objective can disagree with the attained gap.
#[test]
fn certificates_verify_on_degenerate_lattice() {
    let ground = planar_ground(&integer_grid(3));
    let n = ground.len();
    let anchors: Vec<usize> = (0..n).step_by(5).collect();
    let space =
        PhiSpace::from_dictionary(ground.clone(), &Dictionary::Rbf { anchors, gamma: 2.0 }, NormKind::SupOnK)
            .unwrap();
    let all = space.full();
    for start in 0..n {
        let a = PointSubset::new(n, (start..n).step_by(7).chain((0..start).step_by(11))).unwrap();
        for x in 0..n {
            if let Membership::Outside(cert) = hull_membership(&space, &a, x).unwrap() {
                assert!(cert.verify(&space, &a, x).unwrap(), "A = {a:?}, x = {x}");
            }
        }
        assert!(phi_convex_hull(&space, &a, &all).is_ok());
    }
}
