//! Φ-betweenness, Φ-extremal and Φ-exposed points, and the classical
//! Exp ⊆ AExp ⊆ Ext comparison.
//!
//! Strictness is always judged on box-normalized LP optima: a point is
//! exposed, or a betweenness relation fails, when the optimum exceeds
//! [`tol::STRICT`].

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{GroundSet, PointId, PointSubset};
use crate::hull::{dominance_lp, hull_membership, is_phi_convex, phi_convex_hull};
use crate::lp::{Bounds, LinearProgram, Relation};
use crate::phi_space::{Dictionary, NormKind, PhiSpace, PhiVector};
use crate::tol;

/// `φ_direction(point) ≥ φ_direction(y) + margin` for every other `y` of
/// the examined set.
///
/// A singleton set has no competitors; its point is reported as `vacuous`
/// with an infinite margin and a zero direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposureWitness {
    pub point: PointId,
    pub direction: PhiVector,
    pub margin: f64,
    pub vacuous: bool,
}

impl ExposureWitness {
    pub fn verify(&self, space: &PhiSpace, set: &PointSubset) -> Result<bool> {
        let m = witness_margin(space, set, self.point, &self.direction)?;
        Ok(m > 0.0 && m >= self.margin - 1e-9)
    }
}

/// `min_{y ∈ set, y ≠ k} φ(k) − φ(y)`, or `+∞` when `k` has no competitor.
pub fn witness_margin(
    space: &PhiSpace,
    set: &PointSubset,
    k: PointId,
    direction: &PhiVector,
) -> Result<f64> {
    let at_k = space.evaluate(direction, k)?;
    let mut margin = f64::INFINITY;
    for y in set.iter().filter(|&y| y != k) {
        margin = margin.min(at_k - space.evaluate(direction, y)?);
    }
    Ok(margin)
}

/// Whether `a` is Φ-between `x` and `y`: every `φ` with `φ(x) ≤ φ(a)` and
/// `φ(y) ≤ φ(a)` takes the same value at all three points.
pub fn is_phi_between(space: &PhiSpace, a: PointId, x: PointId, y: PointId) -> Result<bool> {
    let g = space.ground();
    g.check(a)?;
    g.check(x)?;
    g.check(y)?;
    let rows = space.rows();

    // A signed dictionary row is a feasible point of both programs below;
    // if it already beats the threshold the LPs are unnecessary.
    for r in rows {
        for s in [1.0, -1.0] {
            let dx = s * (r[a] - r[x]);
            let dy = s * (r[a] - r[y]);
            if dx >= 0.0 && dy >= 0.0 && (dx > tol::STRICT || dy > tol::STRICT) {
                return Ok(false);
            }
        }
    }

    let m = space.dim();
    let diff = |p: PointId| -> Vec<f64> { rows.iter().map(|r| r[p] - r[a]).collect() };
    let mut base = LinearProgram::new(m);
    for i in 0..m {
        base.bound(i, Bounds::boxed(-1.0, 1.0));
    }
    base.constrain(diff(x), Relation::Le, 0.0)
        .constrain(diff(y), Relation::Le, 0.0);
    for p in [x, y] {
        let objective = diff(p).into_iter().map(|v| -v).collect();
        let lp = base.clone().maximize(objective);
        let value = lp
            .solve()?
            .value()
            .ok_or_else(|| Error::IllFormed("betweenness program not optimal".into()))?;
        if value > tol::STRICT {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Points `a ∈ B` that are Φ-between no pair of `B` other than `(a, a)`.
pub fn phi_extremal_points(space: &PhiSpace, b: &PointSubset) -> Result<PointSubset> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let ids = b.ids();
    let flags: Vec<bool> = ids
        .par_iter()
        .map(|&a| -> Result<bool> {
            for (i, &x) in ids.iter().enumerate() {
                for &y in &ids[i..] {
                    if x == a && y == a {
                        continue;
                    }
                    if is_phi_between(space, a, x, y)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })
        .collect::<Result<_>>()?;
    let members = ids
        .iter()
        .zip(flags)
        .filter(|(_, e)| *e)
        .map(|(&a, _)| a)
        .collect();
    Ok(PointSubset::from_sorted(b.universe(), members))
}

/// The exposure witness for `k` within `set`, if `k` is Φ-exposed.
pub fn exposure(space: &PhiSpace, set: &PointSubset, k: PointId) -> Result<Option<ExposureWitness>> {
    if !set.contains(k) {
        return Err(Error::NotSubset);
    }
    match dominance_lp(space, k, set.iter().filter(|&y| y != k))? {
        None => Ok(Some(ExposureWitness {
            point: k,
            direction: PhiVector::zeros(space.dim()),
            margin: f64::INFINITY,
            vacuous: true,
        })),
        Some((direction, t)) if t > tol::STRICT => {
            let margin = witness_margin(space, set, k, &direction)?;
            Ok(Some(ExposureWitness {
                point: k,
                direction,
                margin,
                vacuous: false,
            }))
        }
        Some(_) => Ok(None),
    }
}

/// Witnesses for every Φ-exposed point of `set`, in ascending id order.
pub fn phi_exposed_points(space: &PhiSpace, set: &PointSubset) -> Result<Vec<ExposureWitness>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let found: Vec<Option<ExposureWitness>> = set
        .ids()
        .par_iter()
        .map(|&k| exposure(space, set, k))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

pub fn exposed_set(witnesses: &[ExposureWitness], universe: usize) -> PointSubset {
    PointSubset::new(universe, witnesses.iter().map(|w| w.point)).expect("ids come from a subset")
}

fn coordinate_space(ground: &Arc<GroundSet>, dict: Dictionary) -> Result<PhiSpace> {
    if !ground.has_coords() {
        return Err(Error::MissingCoords);
    }
    PhiSpace::from_dictionary(ground.clone(), &dict, NormKind::SupOnK)
}

/// Points exposed by continuous affine functions (constants plus
/// coordinate functionals).
pub fn affine_exposed_points(
    ground: &Arc<GroundSet>,
    set: &PointSubset,
) -> Result<Vec<ExposureWitness>> {
    let space = coordinate_space(ground, Dictionary::Affine)?;
    phi_exposed_points(&space, set)
}

/// Classical extreme points of the finite set: `k ∉ conv(set ∖ {k})`.
pub fn classical_extreme_points(ground: &Arc<GroundSet>, set: &PointSubset) -> Result<PointSubset> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let space = coordinate_space(ground, Dictionary::Affine)?;
    if set.len() == 1 {
        return Ok(set.clone());
    }
    let flags: Vec<bool> = set
        .ids()
        .par_iter()
        .map(|&k| hull_membership(&space, &set.without(k), k).map(|m| !m.is_inside()))
        .collect::<Result<_>>()?;
    let members = set
        .iter()
        .zip(flags)
        .filter(|(_, e)| *e)
        .map(|(k, _)| k)
        .collect();
    Ok(PointSubset::from_sorted(set.universe(), members))
}

/// Exposed, affine-exposed and extreme points of a coordinate set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassChain {
    pub exposed: PointSubset,
    pub affine_exposed: PointSubset,
    pub extreme: PointSubset,
    pub exposed_in_affine: bool,
    pub affine_in_extreme: bool,
}

impl ClassChain {
    pub fn chain_holds(&self) -> bool {
        self.exposed_in_affine && self.affine_in_extreme
    }
}

pub fn compare_point_classes(ground: &Arc<GroundSet>, set: &PointSubset) -> Result<ClassChain> {
    let linear = coordinate_space(ground, Dictionary::Linear)?;
    let exposed = exposed_set(&phi_exposed_points(&linear, set)?, set.universe());
    let affine_exposed = exposed_set(&affine_exposed_points(ground, set)?, set.universe());
    let extreme = classical_extreme_points(ground, set)?;
    Ok(ClassChain {
        exposed_in_affine: exposed.is_subset_of(&affine_exposed),
        affine_in_extreme: affine_exposed.is_subset_of(&extreme),
        exposed,
        affine_exposed,
        extreme,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionMode {
    Extremal,
    Exposed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub mode: ReconstructionMode,
    pub set: PointSubset,
    /// `ΦExt(K)` or `ΦExp(K)`.
    pub generators: PointSubset,
    pub hull: PointSubset,
    /// Points of `K` missing from the hull of the generators.
    pub missing: PointSubset,
    /// Points of the hull outside `K`.
    pub extra: PointSubset,
}

impl ReconstructionReport {
    pub fn holds(&self) -> bool {
        !self.generators.is_empty() && self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Checks `K = conv_Φ(ΦExt(K))` or `K = conv_Φ(ΦExp(K))`.
///
/// Fails with [`Error::HypothesisViolated`] when `K` is not Φ-convex in the
/// ambient set or Φ does not separate the points of `K`.
pub fn reconstruction_check(
    space: &PhiSpace,
    k: &PointSubset,
    ambient: &PointSubset,
    mode: ReconstructionMode,
) -> Result<ReconstructionReport> {
    if k.is_empty() {
        return Err(Error::EmptySet);
    }
    if let crate::Separation::Witness(x, y) = space.separates_points_on(k) {
        return Err(Error::HypothesisViolated(format!(
            "Φ does not separate points {x} and {y} of K"
        )));
    }
    if !is_phi_convex(space, k, ambient)? {
        return Err(Error::HypothesisViolated("K is not Φ-convex in the ambient set".into()));
    }
    let generators = match mode {
        ReconstructionMode::Extremal => phi_extremal_points(space, k)?,
        ReconstructionMode::Exposed => exposed_set(&phi_exposed_points(space, k)?, k.universe()),
    };
    let hull = if generators.is_empty() {
        PointSubset::empty(k.universe())
    } else {
        phi_convex_hull(space, &generators, ambient)?
    };
    Ok(ReconstructionReport {
        mode,
        set: k.clone(),
        missing: k.difference(&hull),
        extra: hull.difference(k),
        generators,
        hull,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MilmanReport {
    pub generators: PointSubset,
    /// `K = conv_Φ(A)` within the ambient set.
    pub hull: PointSubset,
    pub extremal: PointSubset,
    pub exposed: PointSubset,
    /// `ΦExt(K) ∖ A`.
    pub extremal_outside: PointSubset,
    /// `ΦExp(K) ∖ A`; always empty, since an exposed point of the hull that
    /// is not in `A` would strictly exceed `sup_A φ`.
    pub exposed_outside: PointSubset,
}

impl MilmanReport {
    /// `ΦExt(conv_Φ(A)) ⊆ A`.
    pub fn holds(&self) -> bool {
        self.extremal_outside.is_empty()
    }
}

/// Computes `K = conv_Φ(A)` and compares its extremal and exposed points
/// with `A`.
///
/// On a finite ambient set the pair-based extremality can hold at a hull
/// point that is not on any segment between two others (a lone interior
/// grid point of a thin triangle, say), so `holds` may be false there while
/// `exposed_outside` stays empty.
pub fn milman_converse_check(
    space: &PhiSpace,
    a: &PointSubset,
    ambient: &PointSubset,
) -> Result<MilmanReport> {
    let hull = phi_convex_hull(space, a, ambient)?;
    let extremal = phi_extremal_points(space, &hull)?;
    let exposed = exposed_set(&phi_exposed_points(space, &hull)?, hull.universe());
    Ok(MilmanReport {
        extremal_outside: extremal.difference(a),
        exposed_outside: exposed.difference(a),
        generators: a.clone(),
        hull,
        extremal,
        exposed,
    })
}
