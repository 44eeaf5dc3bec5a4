//! Φ-convex hulls over a finite ambient set.
//!
//! Over a span, `conv_Φ(A) = {x : φ(x) ≤ sup_A φ for all φ ∈ Φ}`. Membership
//! of `x` is decided by one homogeneous LP over the coefficient box
//! `‖c‖_∞ ≤ 1`:
//!
//! ```text
//! maximize t   s.t.   φ_c(x) − φ_c(a) ≥ t   for all a ∈ A
//! ```
//!
//! `x` is outside iff the optimum exceeds [`tol::STRICT`]; the optimal `c`
//! then yields a strict separating certificate.
//!
//! The ambient set itself is always Φ-convex, by convention, even when no
//! sublevel representation exists.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{PointId, PointSubset};
use crate::lp::{Bounds, LinearProgram, LpOutcome, Relation};
use crate::phi_space::{PhiSpace, PhiVector};
use crate::tol;

/// `φ_direction ≤ threshold − margin` on the separated-from set and
/// `φ_direction ≥ threshold + margin` at the separated point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub direction: PhiVector,
    pub threshold: f64,
    pub margin: f64,
}

impl SeparationCertificate {
    /// Re-evaluates both sides of the certificate.
    pub fn verify(&self, space: &PhiSpace, from: &PointSubset, x: PointId) -> Result<bool> {
        let at_x = space.evaluate(&self.direction, x)?;
        if at_x < self.threshold + self.margin - 1e-12 {
            return Ok(false);
        }
        for a in from.iter() {
            if space.evaluate(&self.direction, a)? > self.threshold - self.margin + 1e-12 {
                return Ok(false);
            }
        }
        Ok(self.margin > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Inside,
    Outside(SeparationCertificate),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

/// Solves `max t` s.t. `φ_c(p) − φ_c(q) ≥ t` for every `q` in
/// `competitors`, with `c ∈ [−1, 1]^m`.
///
/// The returned value is the gap the direction actually attains,
/// re-evaluated from the matrix, which can sit slightly below the solver's
/// objective on degenerate programs. Returns `None` when there are no
/// competitors (the program is vacuous).
pub(crate) fn dominance_lp(
    space: &PhiSpace,
    p: PointId,
    competitors: impl IntoIterator<Item = PointId>,
) -> Result<Option<(PhiVector, f64)>> {
    let m = space.dim();
    let rows = space.rows();
    let mut lp = LinearProgram::new(m + 1);
    lp.objective[m] = 1.0;
    for i in 0..m {
        lp.bound(i, Bounds::boxed(-1.0, 1.0));
    }
    // |φ_c(p) − φ_c(q)| never exceeds this on the coefficient box.
    let reach = 2.0 * rows.iter().map(|r| r.iter().fold(0.0, |a: f64, v| a.max(v.abs()))).sum::<f64>();
    lp.bound(m, Bounds::boxed(-reach - 1.0, reach + 1.0));
    let competitors: Vec<PointId> = competitors.into_iter().collect();
    let mut any = false;
    for &q in &competitors {
        let mut coeffs: Vec<f64> = rows.iter().map(|r| r[p] - r[q]).collect();
        coeffs.push(-1.0);
        lp.constrain(coeffs, Relation::Ge, 0.0);
        any = true;
    }
    if !any {
        return Ok(None);
    }
    match lp.solve()? {
        LpOutcome::Optimal { solution, .. } => {
            let c = &solution[..m];
            let phi = |y: PointId| -> f64 { rows.iter().zip(c).map(|(r, ci)| ci * r[y]).sum() };
            let at_p = phi(p);
            let gap = competitors
                .iter()
                .map(|&q| at_p - phi(q))
                .fold(f64::INFINITY, f64::min);
            Ok(Some((PhiVector(c.to_vec()), gap)))
        }
        other => Err(Error::IllFormed(format!(
            "dominance program is feasible and bounded, solver returned {:?}",
            other.status()
        ))),
    }
}

fn check_subset(space: &PhiSpace, s: &PointSubset) -> Result<()> {
    if s.universe() != space.n_points() {
        return Err(Error::DimensionMismatch {
            expected: space.n_points(),
            found: s.universe(),
        });
    }
    Ok(())
}

/// Decides `x ∈ conv_Φ(A)`, with a separating certificate when outside.
pub fn hull_membership(space: &PhiSpace, a: &PointSubset, x: PointId) -> Result<Membership> {
    check_subset(space, a)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    space.ground().check(x)?;
    if a.contains(x) {
        return Ok(Membership::Inside);
    }
    let (direction, t) = dominance_lp(space, x, a.iter())?.expect("A is nonempty");
    if t <= tol::STRICT {
        return Ok(Membership::Inside);
    }
    let at_x = space.eval_unchecked(&direction, x);
    let sup_a = a
        .iter()
        .map(|y| space.eval_unchecked(&direction, y))
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = at_x - sup_a;
    Ok(Membership::Outside(SeparationCertificate {
        direction,
        threshold: 0.5 * (sup_a + at_x),
        margin: 0.5 * gap,
    }))
}

/// `{x ∈ ambient : x ∈ conv_Φ(A)}`.
pub fn phi_convex_hull(
    space: &PhiSpace,
    a: &PointSubset,
    ambient: &PointSubset,
) -> Result<PointSubset> {
    check_subset(space, ambient)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a.is_subset_of(ambient) {
        return Err(Error::NotSubset);
    }
    let flags: Vec<bool> = ambient
        .ids()
        .par_iter()
        .map(|&x| hull_membership(space, a, x).map(|m| m.is_inside()))
        .collect::<Result<_>>()?;
    let members = ambient
        .iter()
        .zip(flags)
        .filter(|(_, inside)| *inside)
        .map(|(x, _)| x)
        .collect();
    Ok(PointSubset::from_sorted(space.n_points(), members))
}

pub fn is_phi_convex(space: &PhiSpace, x: &PointSubset, ambient: &PointSubset) -> Result<bool> {
    if !x.is_subset_of(ambient) {
        return Err(Error::NotSubset);
    }
    if x == ambient {
        return Ok(true);
    }
    Ok(phi_convex_hull(space, x, ambient)? == *x)
}

/// The strict separation of `x` from `conv_Φ(A)`.
pub fn separate_from_hull(
    space: &PhiSpace,
    a: &PointSubset,
    x: PointId,
) -> Result<SeparationCertificate> {
    match hull_membership(space, a, x)? {
        Membership::Outside(cert) => Ok(cert),
        Membership::Inside => Err(Error::NotSeparable(x)),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ground::GroundSet;
    use crate::phi_space::{Dictionary, NormKind};

    fn line3() -> Arc<GroundSet> {
        Arc::new(GroundSet::euclidean(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap())
    }

    fn space(dict: Dictionary) -> PhiSpace {
        PhiSpace::from_dictionary(line3(), &dict, NormKind::SupOnK).unwrap()
    }

    fn set(ids: &[usize]) -> PointSubset {
        PointSubset::new(3, ids.iter().copied()).unwrap()
    }

    #[test]
    fn member_of_a_is_inside() {
        let s = space(Dictionary::Affine);
        assert!(hull_membership(&s, &set(&[0, 2]), 2).unwrap().is_inside());
    }

    #[test]
    fn midpoint_inside_affine_hull() {
        let s = space(Dictionary::Affine);
        assert!(hull_membership(&s, &set(&[0, 2]), 1).unwrap().is_inside());
        assert_eq!(phi_convex_hull(&s, &set(&[0, 2]), &set(&[0, 1, 2])).unwrap(), set(&[0, 1, 2]));
    }

    #[test]
    fn linear_functional_separates() {
        let s = space(Dictionary::Linear);
        let cert = separate_from_hull(&s, &set(&[0, 1]), 2).unwrap();
        assert!((cert.direction.0[0] - 1.0).abs() < 1e-12);
        assert!((cert.threshold - 1.5).abs() < 1e-12);
        assert!((cert.margin - 0.5).abs() < 1e-12);
        assert!(cert.verify(&s, &set(&[0, 1]), 2).unwrap());
    }

    #[test]
    fn not_separable_inside() {
        let s = space(Dictionary::Affine);
        assert_eq!(
            separate_from_hull(&s, &set(&[0, 1]), 1),
            Err(Error::NotSeparable(1))
        );
    }

    #[test]
    fn convexity_examples() {
        let s = space(Dictionary::Affine);
        let all = set(&[0, 1, 2]);
        assert!(is_phi_convex(&s, &all, &all).unwrap());
        assert!(!is_phi_convex(&s, &set(&[0, 2]), &all).unwrap());
        for x in 0..3 {
            assert!(is_phi_convex(&s, &set(&[x]), &all).unwrap());
        }
        assert_eq!(
            is_phi_convex(&s, &set(&[0, 2]), &set(&[0, 1])),
            Err(Error::NotSubset)
        );
    }

    #[test]
    fn distance_dictionary_hull_by_definition() {
        // Rows −d(·,0) = (0,−1,−2) and −d(·,2) = (−2,−1,0); point 1 is
        // inside iff every combination c satisfies φ_c(1) ≤ max(φ_c(0), φ_c(2)).
        // φ_c(1) = −c₀ − c₁ = (φ_c(0) + φ_c(2))/2, so it is inside.
        let s = space(Dictionary::Distance { anchors: vec![0, 2] });
        let hull = phi_convex_hull(&s, &set(&[0, 2]), &set(&[0, 1, 2])).unwrap();
        assert_eq!(hull, set(&[0, 1, 2]));
    }

    #[test]
    fn empty_and_foreign_sets() {
        let s = space(Dictionary::Affine);
        assert_eq!(
            hull_membership(&s, &PointSubset::empty(3), 0),
            Err(Error::EmptySet)
        );
        assert_eq!(
            phi_convex_hull(&s, &set(&[0, 2]), &set(&[0, 1])),
            Err(Error::NotSubset)
        );
    }

    #[test]
    fn square_corner_separated_along_diagonal() {
        let g = Arc::new(
            GroundSet::euclidean(vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ])
            .unwrap(),
        );
        let s = PhiSpace::from_dictionary(g, &Dictionary::Linear, NormKind::SupOnK).unwrap();
        let a = PointSubset::new(4, [0, 1, 2]).unwrap();
        let cert = separate_from_hull(&s, &a, 3).unwrap();
        // The box-normalized optimum is c = (1, 1): φ(1,1) = 2, sup_A φ = 1.
        assert!((cert.direction.0[0] - 1.0).abs() < 1e-9);
        assert!((cert.direction.0[1] - 1.0).abs() < 1e-9);
        assert!((cert.margin - 0.5).abs() < 1e-9);
        assert!(cert.verify(&s, &a, 3).unwrap());
    }
}
