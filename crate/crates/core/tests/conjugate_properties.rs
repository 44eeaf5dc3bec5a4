mod common;

use common::*;
use phiconv::variational::{
    argmax_set, conjugate, default_steps, exposing_perturbation, gateaux_probe, well_posedness,
    GateauxStatus, Perturbation, PerturbationSearch,
};
use phiconv::{Dictionary, ExtendedFunction, NormKind, PhiSpace, PhiVector};
use proptest::prelude::*;

fn function(n: usize) -> impl Strategy<Value = ExtendedFunction> {
    (proptest::collection::vec(-2.0f64..2.0, n), proptest::collection::vec(any::<bool>(), n))
        .prop_filter_map("proper", |(vals, inf)| {
            let infinite: Vec<usize> = (0..vals.len()).filter(|&i| inf[i]).collect();
            ExtendedFunction::new(vals, &infinite).ok()
        })
}

/// Values in {0, 1/2, 1} so that ties are common.
fn tied_function(n: usize) -> impl Strategy<Value = ExtendedFunction> {
    proptest::collection::vec(0u8..3, n)
        .prop_map(|v| ExtendedFunction::finite(v.into_iter().map(|k| f64::from(k) / 2.0).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_is_lipschitz_and_convex(
        space in table_space(6, 3, NormKind::SupOnK),
        f in function(6),
        c1 in coeffs(3),
        c2 in coeffs(3),
        lambda in 0.0f64..=1.0,
    ) {
        let g1 = conjugate(&space, &f, &c1).unwrap();
        let g2 = conjugate(&space, &f, &c2).unwrap();
        let d = space.sup_norm(&c1.sub(&c2)).unwrap();
        prop_assert!((g1 - g2).abs() <= d + 1e-9);
        let mid = c1.scaled(lambda).add(&c2.scaled(1.0 - lambda));
        let gm = conjugate(&space, &f, &mid).unwrap();
        prop_assert!(gm <= lambda * g1 + (1.0 - lambda) * g2 + 1e-9);
    }

    #[test]
    fn fenchel_inequality_tight_on_argmax(
        space in table_space(6, 3, NormKind::SupOnK),
        f in function(6),
        c in coeffs(3),
    ) {
        let g = conjugate(&space, &f, &c).unwrap();
        let top = argmax_set(&space, &f, &c, 0.0).unwrap();
        for x in f.domain() {
            let v = space.evaluate(&c, x).unwrap() - f.value(x).unwrap();
            prop_assert!(v <= g);
            prop_assert_eq!(v == g, top.contains(x));
        }
    }

    #[test]
    fn well_posed_iff_gateaux_converges(
        space in table_space(6, 4, NormKind::SupOnK),
        f in function(6),
        c in coeffs(4),
    ) {
        let wp = well_posedness(&space, &f, &c).unwrap();
        prop_assume!(wp.well_posed);
        let x = wp.minimizer().unwrap();
        for i in 0..4 {
            let h = PhiVector::basis(4, i);
            let r = gateaux_probe(&space, &f, &c, &h, &default_steps()).unwrap();
            prop_assert_eq!(r.status, GateauxStatus::Converged);
            let expected = space.dirac(x).unwrap().pair(&h);
            prop_assert!((r.derivative() - expected).abs() <= 1e-6 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn perturbation_with_full_distance_dictionary(
        f in tied_function(6),
        eps in 1e-4f64..1.0,
        seed in any::<u64>(),
    ) {
        let ground = line(6);
        let space = PhiSpace::from_dictionary(
            ground,
            &Dictionary::Distance { anchors: (0..6).collect() },
            NormKind::SupOnK,
        )
        .unwrap();
        let search = PerturbationSearch { epsilon: eps, budget: 1000, seed };
        let c0 = PhiVector::zeros(6);
        match exposing_perturbation(&space, &f, &c0, &search).unwrap() {
            Perturbation::Found { psi, report, .. } => {
                prop_assert!(space.phi_norm(&psi).unwrap() <= eps + 1e-12);
                let again = well_posedness(&space, &f, &c0.add(&psi)).unwrap();
                prop_assert!(again.well_posed);
                prop_assert_eq!(again, report);
            }
            Perturbation::Exhausted { .. } => prop_assert!(false, "no perturbation found"),
        }
    }
}
