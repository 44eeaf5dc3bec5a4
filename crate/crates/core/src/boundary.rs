//! The dual unit ball of `(Φ, ‖·‖_∞)` and the boundaries it determines.
//!
//! On a finite `K` the dual ball is the polytope `conv(±δ(K))` in dual
//! coordinates. Vertex, membership and exposure questions about it are
//! answered with small LPs rather than facet enumeration.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{PointId, PointSubset};
use crate::lp::{Bounds, LinearProgram, LpOutcome, Relation};
use crate::phi_space::{DualVector, PhiSpace, PhiVector, Separation};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub sign: Sign,
    pub point: PointId,
    pub coords: DualVector,
}

/// `conv(±δ(K))`; generators are listed as `+δ_x, −δ_x` for ascending `x`.
#[derive(Debug, Clone)]
pub struct DualPolytope<'a> {
    space: &'a PhiSpace,
    set: PointSubset,
    generators: Vec<Generator>,
}

pub fn dual_ball<'a>(space: &'a PhiSpace, k: &PointSubset) -> Result<DualPolytope<'a>> {
    if k.is_empty() {
        return Err(Error::EmptySet);
    }
    if !space.has_constants() {
        log::warn!("dictionary does not contain the constants");
    }
    if let Separation::Witness(x, y) = space.separates_points_on(k) {
        log::warn!("dictionary does not separate points {x} and {y}");
    }
    let mut generators = Vec::with_capacity(2 * k.len());
    for x in k.iter() {
        let d = space.dirac(x)?;
        generators.push(Generator {
            sign: Sign::Minus,
            point: x,
            coords: d.neg(),
        });
        generators.push(Generator {
            sign: Sign::Plus,
            point: x,
            coords: d,
        });
    }
    // Plus before minus for each point.
    for pair in generators.chunks_mut(2) {
        pair.swap(0, 1);
    }
    Ok(DualPolytope {
        space,
        set: k.clone(),
        generators,
    })
}

impl<'a> DualPolytope<'a> {
    pub fn space(&self) -> &'a PhiSpace {
        self.space
    }

    pub fn set(&self) -> &PointSubset {
        &self.set
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.space.dim()
    }

    /// `max_g ⟨g, c⟩`, which equals `sup_{x∈K} |φ_c(x)|`.
    pub fn support(&self, c: &PhiVector) -> Result<f64> {
        self.space.check_vector(c)?;
        Ok(self
            .generators
            .iter()
            .map(|g| g.coords.pair(c))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    fn plus_index(&self, x: PointId) -> usize {
        2 * self.set.ids().binary_search(&x).expect("x in K")
    }
}

/// Whether `target` is a convex combination of `points` (feasibility LP).
fn in_convex_hull(target: &[f64], points: &[&[f64]]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let n = points.len();
    let mut lp = LinearProgram::new(n);
    for j in 0..n {
        lp.bound(j, Bounds::NONNEG);
    }
    lp.constrain(vec![1.0; n], Relation::Eq, 1.0);
    for (i, &t) in target.iter().enumerate() {
        lp.constrain(points.iter().map(|p| p[i]).collect(), Relation::Eq, t);
    }
    Ok(!matches!(lp.solve()?, LpOutcome::Infeasible))
}

/// `{x ∈ K : δ_x is a vertex of the dual ball}`.
pub fn choquet_boundary(poly: &DualPolytope) -> Result<PointSubset> {
    let flags: Vec<bool> = poly
        .set
        .ids()
        .par_iter()
        .map(|&x| {
            let idx = poly.plus_index(x);
            let others: Vec<&[f64]> = poly
                .generators
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .map(|(_, g)| g.coords.0.as_slice())
                .collect();
            in_convex_hull(&poly.generators[idx].coords.0, &others).map(|inside| !inside)
        })
        .collect::<Result<_>>()?;
    let members = poly
        .set
        .iter()
        .zip(flags)
        .filter(|(_, v)| *v)
        .map(|(x, _)| x)
        .collect();
    Ok(PointSubset::from_sorted(poly.set.universe(), members))
}

/// Whether `sup_{x∈L} |φ(x)| = ‖φ‖_∞` for every `φ ∈ Φ`, i.e. every
/// generator of the dual ball lies in `conv(±δ(L))`.
pub fn is_norming_subset(poly: &DualPolytope, l: &PointSubset) -> Result<bool> {
    if l.is_empty() {
        return Err(Error::EmptySet);
    }
    if !l.is_subset_of(&poly.set) {
        return Err(Error::NotSubset);
    }
    let spanning: Vec<&[f64]> = l
        .iter()
        .flat_map(|x| {
            let i = poly.plus_index(x);
            [
                poly.generators[i].coords.0.as_slice(),
                poly.generators[i + 1].coords.0.as_slice(),
            ]
        })
        .collect();
    let outside: Vec<bool> = poly
        .set
        .ids()
        .par_iter()
        .filter(|&&x| !l.contains(x))
        .map(|&x| {
            let g = &poly.generators[poly.plus_index(x)].coords.0;
            in_convex_hull(g, &spanning).map(|inside| !inside)
        })
        .collect::<Result<_>>()?;
    Ok(!outside.into_iter().any(|o| o))
}

/// The unique minimal norming subset, which on a finite `K` is the Choquet
/// boundary. Requires Φ to contain the constants and separate `K`.
pub fn shilov_boundary(poly: &DualPolytope) -> Result<PointSubset> {
    if !poly.space.has_constants() {
        return Err(Error::HypothesisViolated(
            "Φ must contain the constants".into(),
        ));
    }
    if let Separation::Witness(x, y) = poly.space.separates_points_on(&poly.set) {
        return Err(Error::HypothesisViolated(format!(
            "Φ does not separate points {x} and {y}"
        )));
    }
    let boundary = choquet_boundary(poly)?;
    if boundary.is_empty() || !is_norming_subset(poly, &boundary)? {
        return Err(Error::Numerical(
            "Choquet boundary failed the norming test".into(),
        ));
    }
    Ok(boundary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GeneratorExposure {
    /// Exposed by `φ_direction` with `‖φ_direction‖_∞ ≤ 1`.
    Exposed { direction: PhiVector, margin: f64 },
    NotExposed,
    /// Another generator has the same coordinates.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorStatus {
    pub sign: Sign,
    pub point: PointId,
    #[serde(flatten)]
    pub exposure: GeneratorExposure,
}

impl GeneratorStatus {
    pub fn is_exposed(&self) -> bool {
        matches!(self.exposure, GeneratorExposure::Exposed { .. })
    }
}

/// Weak*-exposure status of every generator of the dual ball.
///
/// For generator `g` this solves `max t` s.t. `⟨g − g', c⟩ ≥ t` for every
/// other generator `g'` and `‖φ_c‖_∞ ≤ 1` on `K`; `g` is exposed iff the
/// optimum exceeds [`tol::STRICT`].
pub fn weakstar_exposed_generators(poly: &DualPolytope) -> Result<Vec<GeneratorStatus>> {
    let space = poly.space;
    let m = space.dim();
    let gens = &poly.generators;
    gens.par_iter()
        .enumerate()
        .map(|(idx, g)| {
            let duplicate = gens
                .iter()
                .enumerate()
                .any(|(j, h)| j != idx && h.coords == g.coords);
            let exposure = if duplicate {
                GeneratorExposure::Degenerate
            } else {
                let mut lp = LinearProgram::new(m + 1);
                lp.objective[m] = 1.0;
                lp.bound(m, Bounds::FREE);
                for (j, h) in gens.iter().enumerate() {
                    if j == idx {
                        continue;
                    }
                    let mut row: Vec<f64> =
                        g.coords.0.iter().zip(&h.coords.0).map(|(a, b)| a - b).collect();
                    row.push(-1.0);
                    lp.constrain(row, Relation::Ge, 0.0);
                }
                for x in poly.set.iter() {
                    let mut row = space.dirac(x)?.0;
                    row.push(0.0);
                    lp.constrain(row.clone(), Relation::Le, 1.0);
                    lp.constrain(row, Relation::Ge, -1.0);
                }
                match lp.solve()? {
                    LpOutcome::Optimal { solution, value } if value > tol::STRICT => {
                        let direction = PhiVector(solution[..m].to_vec());
                        let at_g = g.coords.pair(&direction);
                        let margin = gens
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != idx)
                            .map(|(_, h)| at_g - h.coords.pair(&direction))
                            .fold(f64::INFINITY, f64::min);
                        GeneratorExposure::Exposed { direction, margin }
                    }
                    LpOutcome::Optimal { .. } => GeneratorExposure::NotExposed,
                    other => {
                        return Err(Error::IllFormed(format!(
                            "weak* exposure program returned {:?}",
                            other.status()
                        )))
                    }
                }
            };
            Ok(GeneratorStatus {
                sign: g.sign,
                point: g.point,
                exposure,
            })
        })
        .collect()
}
