//! The conjugate transform `f^×(φ) = sup_K {φ − f}` and the well-posedness
//! of `f − φ`.
//!
//! On a finite `K`, `f − φ` has a strong minimum exactly when its minimizer
//! is unique with a positive gap, and `f^×` is then differentiable at `φ`
//! with derivative the Dirac mass of that minimizer. The ill-posed set
//! `N(f)` is small: ties between continuous random values do not happen,
//! and when one is forced a small perturbation inside Φ breaks it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{ExtendedFunction, PointId, PointSubset};
use crate::phi_space::{PhiSpace, PhiVector};
use crate::sampling::{ball_point, trial_rng, unit_direction};
use crate::tol;

fn check_function(space: &PhiSpace, f: &ExtendedFunction) -> Result<()> {
    if f.len() != space.n_points() {
        return Err(Error::DimensionMismatch {
            expected: space.n_points(),
            found: f.len(),
        });
    }
    Ok(())
}

/// `(x, φ_c(x) − f(x))` over the domain of `f`.
fn objective(space: &PhiSpace, f: &ExtendedFunction, c: &PhiVector) -> Result<Vec<(PointId, f64)>> {
    check_function(space, f)?;
    space.check_vector(c)?;
    Ok(f.domain()
        .map(|x| (x, space.eval_unchecked(c, x) - f.raw_values()[x]))
        .collect())
}

/// `f^×(φ_c) = max_{x ∈ dom f} φ_c(x) − f(x)`.
pub fn conjugate(space: &PhiSpace, f: &ExtendedFunction, c: &PhiVector) -> Result<f64> {
    Ok(objective(space, f, c)?
        .into_iter()
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `{x : φ_c(x) − f(x) ≥ f^×(φ_c) − tol}`.
pub fn argmax_set(
    space: &PhiSpace,
    f: &ExtendedFunction,
    c: &PhiVector,
    tol: f64,
) -> Result<PointSubset> {
    let vals = objective(space, f, c)?;
    let top = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(PointSubset::from_sorted(
        space.n_points(),
        vals.into_iter()
            .filter(|(_, v)| *v >= top - tol)
            .map(|(x, _)| x)
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellPosednessReport {
    pub perturbation: PhiVector,
    pub minimizers: PointSubset,
    pub minimum: f64,
    /// Second-smallest minus smallest value of `f − φ`; `+∞` when `f` has a
    /// single finite point.
    pub gap: f64,
    pub well_posed: bool,
}

impl WellPosednessReport {
    pub fn minimizer(&self) -> Option<PointId> {
        if self.well_posed {
            self.minimizers.ids().first().copied()
        } else {
            None
        }
    }
}

/// Minimizers and gap of `f − φ_c`; well posed iff the minimizer is unique.
pub fn well_posedness(
    space: &PhiSpace,
    f: &ExtendedFunction,
    c: &PhiVector,
) -> Result<WellPosednessReport> {
    let mut vals: Vec<(PointId, f64)> = objective(space, f, c)?
        .into_iter()
        .map(|(x, v)| (x, -v))
        .collect();
    vals.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let minimum = vals[0].1;
    let gap = vals.get(1).map_or(f64::INFINITY, |v| v.1 - minimum);
    let mut minimizers: Vec<PointId> = vals
        .iter()
        .take_while(|(_, v)| v - minimum <= tol::TIE)
        .map(|(x, _)| *x)
        .collect();
    minimizers.sort_unstable();
    Ok(WellPosednessReport {
        perturbation: c.clone(),
        well_posed: minimizers.len() == 1,
        minimizers: PointSubset::from_sorted(space.n_points(), minimizers),
        minimum,
        gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSearch {
    pub epsilon: f64,
    pub budget: usize,
    pub seed: u64,
}

impl PerturbationSearch {
    pub fn new(epsilon: f64) -> Self {
        PerturbationSearch {
            epsilon,
            budget: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchStrategy {
    /// The starting point was already well posed.
    Unperturbed,
    /// A scaled projection of the bump `−d(·, x₀)` at a tied minimizer.
    TieBreak { anchor: PointId, scale: f64 },
    /// A seeded random direction of norm `ε`.
    Random { trial: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Perturbation {
    Found {
        psi: PhiVector,
        report: WellPosednessReport,
        strategy: SearchStrategy,
    },
    Exhausted {
        trials: usize,
    },
}

const HALVINGS: usize = 30;

/// Looks for `ψ` with `‖ψ‖_Φ ≤ ε` such that `f − (φ_{c0} + ψ)` has a
/// strong minimum.
///
/// Deterministic tie-breaking is tried first: for each tied minimizer `x₀`
/// the bump `−d(·, x₀)` is projected onto Φ, normalized, and tried at scales
/// `ε, ε/2, ε/4, …` with both signs. Then up to `budget` random directions
/// of norm `ε` are drawn from seeded streams; the lowest successful trial
/// index wins regardless of thread scheduling.
pub fn exposing_perturbation(
    space: &PhiSpace,
    f: &ExtendedFunction,
    c0: &PhiVector,
    search: &PerturbationSearch,
) -> Result<Perturbation> {
    let eps = search.epsilon;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    let base = well_posedness(space, f, c0)?;
    if base.well_posed {
        return Ok(Perturbation::Found {
            psi: PhiVector::zeros(space.dim()),
            report: base,
            strategy: SearchStrategy::Unperturbed,
        });
    }

    for x0 in base.minimizers.iter() {
        let bump = space.ground().distance_function(x0)?;
        let dir = space.project(bump.raw_values())?;
        let norm = space.phi_norm(&dir)?;
        if norm <= 1e-12 {
            continue;
        }
        let unit = dir.scaled(1.0 / norm);
        let mut scale = eps;
        for _ in 0..HALVINGS {
            for sign in [1.0, -1.0] {
                let psi = unit.scaled(sign * scale);
                if space.phi_norm(&psi)? > eps {
                    continue;
                }
                let report = well_posedness(space, f, &c0.add(&psi))?;
                if report.well_posed {
                    return Ok(Perturbation::Found {
                        psi,
                        report,
                        strategy: SearchStrategy::TieBreak {
                            anchor: x0,
                            scale: sign * scale,
                        },
                    });
                }
            }
            scale *= 0.5;
        }
    }

    let hit = (0..search.budget)
        .into_par_iter()
        .map(|trial| -> Result<Option<(PhiVector, WellPosednessReport)>> {
            let mut rng = trial_rng(search.seed, trial as u64);
            let Some(u) = unit_direction(space, &mut rng) else {
                return Ok(None);
            };
            let psi = u.scaled(eps);
            if space.phi_norm(&psi)? > eps * (1.0 + 1e-15) {
                return Ok(None);
            }
            let report = well_posedness(space, f, &c0.add(&psi))?;
            Ok(report.well_posed.then_some((psi, report)))
        })
        .enumerate()
        .find_map_first(|(trial, r)| match r {
            Ok(Some(found)) => Some(Ok((trial, found))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        });
    match hit {
        Some(Ok((trial, (psi, report)))) => Ok(Perturbation::Found {
            psi,
            report,
            strategy: SearchStrategy::Random { trial },
        }),
        Some(Err(e)) => Err(e),
        None => Ok(Perturbation::Exhausted {
            trials: search.budget,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IllPosedStats {
    pub samples: usize,
    pub fraction: f64,
    /// Sampled `c` for which `f − φ_c` has no strong minimum, in sample order.
    pub ill_posed: Vec<PhiVector>,
}

/// Fraction of points of the `‖·‖_Φ` ball of the given radius at which
/// `f − φ` is ill posed.
pub fn ill_posed_fraction(
    space: &PhiSpace,
    f: &ExtendedFunction,
    radius: f64,
    n_samples: usize,
    seed: u64,
) -> Result<IllPosedStats> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("bad radius {radius}")));
    }
    check_function(space, f)?;
    let results: Vec<Option<PhiVector>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let c = ball_point(space, radius, &mut rng)
                .unwrap_or_else(|| PhiVector::zeros(space.dim()));
            let r = well_posedness(space, f, &c)?;
            Ok((!r.well_posed).then_some(c))
        })
        .collect::<Result<_>>()?;
    let ill_posed: Vec<PhiVector> = results.into_iter().flatten().collect();
    Ok(IllPosedStats {
        samples: n_samples,
        fraction: ill_posed.len() as f64 / n_samples as f64,
        ill_posed,
    })
}

/// `1e-2, 1e-3, …, 1e-6`.
pub fn default_steps() -> Vec<f64> {
    (2..=6).map(|k| 10f64.powi(-k)).collect()
}

/// Below this step the rounding error of `f^×` differences dominates.
const MIN_STEP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateauxStatus {
    /// Well posed; quotients converge to `h(x̂)`.
    Converged,
    /// Well posed but the quotients missed `h(x̂)`.
    NotConverged,
    /// Ill posed and the one-sided derivatives along `±h` disagree.
    NonsmoothConfirmed,
    /// Ill posed but `h` does not distinguish the tied minimizers.
    NonsmoothExpected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateauxReport {
    pub status: GateauxStatus,
    pub minimizer: Option<PointId>,
    /// `⟨δ_x̂, h⟩` when well posed.
    pub expected: Option<f64>,
    pub steps: Vec<f64>,
    /// `(f^×(c + t h) − f^×(c)) / t`
    pub forward: Vec<f64>,
    /// `(f^×(c − t h) − f^×(c)) / t`
    pub backward: Vec<f64>,
    /// `|forward + backward|` at the smallest step; zero iff the two
    /// one-sided derivatives agree.
    pub disagreement: f64,
}

impl GateauxReport {
    pub fn derivative(&self) -> f64 {
        *self.forward.last().expect("nonempty schedule")
    }
}

/// Finite-difference probe of the Gâteaux derivative of `f^×` at `c` along
/// `h`.
///
/// When `f − φ_c` is well posed the schedule is refined (down to `1e-8`)
/// until the step is below the scale at which the minimizer could change.
pub fn gateaux_probe(
    space: &PhiSpace,
    f: &ExtendedFunction,
    c: &PhiVector,
    h: &PhiVector,
    steps: &[f64],
) -> Result<GateauxReport> {
    space.check_vector(h)?;
    if steps.is_empty() || steps.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidArgument("step schedule must be positive".into()));
    }
    let wp = well_posedness(space, f, c)?;
    let mut steps = steps.to_vec();
    let h_sup = space.sup_norm(h)?;
    if wp.well_posed && h_sup > 0.0 {
        let safe = wp.gap / (4.0 * h_sup);
        while let Some(&last) = steps.last() {
            if last <= safe || last / 10.0 < MIN_STEP {
                break;
            }
            steps.push(last / 10.0);
        }
    }
    let f0 = conjugate(space, f, c)?;
    let mut forward = Vec::with_capacity(steps.len());
    let mut backward = Vec::with_capacity(steps.len());
    for &t in &steps {
        forward.push((conjugate(space, f, &c.axpy(t, h))? - f0) / t);
        backward.push((conjugate(space, f, &c.axpy(-t, h))? - f0) / t);
    }
    let fwd = *forward.last().unwrap();
    let bwd = *backward.last().unwrap();
    let disagreement = (fwd + bwd).abs();
    let (status, minimizer, expected) = match wp.minimizer() {
        Some(x) => {
            let expected = space.evaluate(h, x)?;
            let ok = (fwd - expected).abs() <= tol::GATEAUX * (1.0 + expected.abs());
            let status = if ok {
                GateauxStatus::Converged
            } else {
                GateauxStatus::NotConverged
            };
            (status, Some(x), Some(expected))
        }
        None => {
            let status = if disagreement >= 10.0 * tol::GATEAUX * (1.0 + fwd.abs()) {
                GateauxStatus::NonsmoothConfirmed
            } else {
                GateauxStatus::NonsmoothExpected
            };
            (status, None, None)
        }
    };
    Ok(GateauxReport {
        status,
        minimizer,
        expected,
        steps,
        forward,
        backward,
        disagreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivePiece {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxRuleReport {
    pub first_value: f64,
    pub second_value: f64,
    /// Whether `L = max(f1^×, f2^×)` looked differentiable along every probe
    /// direction (the dictionary basis plus `h`).
    pub max_differentiable: bool,
    /// Finite-difference gradient of `L` in dual coordinates.
    pub max_gradient: Option<Vec<f64>>,
    pub first_gradient: Option<Vec<f64>>,
    pub second_gradient: Option<Vec<f64>>,
    pub agrees_with: Option<ActivePiece>,
}

impl MaxRuleReport {
    /// If `L` is differentiable, its derivative is that of an active,
    /// differentiable piece.
    pub fn holds(&self) -> bool {
        !self.max_differentiable || self.agrees_with.is_some()
    }
}

const MAX_RULE_STEP: f64 = 1e-7;

/// Checks the max rule for `L(c) = max(f1^×(c), f2^×(c))` at `c`.
pub fn max_rule_check(
    space: &PhiSpace,
    f1: &ExtendedFunction,
    f2: &ExtendedFunction,
    c: &PhiVector,
    h: &PhiVector,
) -> Result<MaxRuleReport> {
    space.check_vector(h)?;
    let m = space.dim();
    let big_l = |p: &PhiVector| -> Result<f64> {
        Ok(conjugate(space, f1, p)?.max(conjugate(space, f2, p)?))
    };
    let first_value = conjugate(space, f1, c)?;
    let second_value = conjugate(space, f2, c)?;
    let l0 = first_value.max(second_value);
    let t = MAX_RULE_STEP;

    let mut directions: Vec<PhiVector> = (0..m).map(|i| PhiVector::basis(m, i)).collect();
    directions.push(h.clone());
    let mut differentiable = true;
    let mut gradient = Vec::with_capacity(m);
    for (i, d) in directions.iter().enumerate() {
        let fwd = (big_l(&c.axpy(t, d))? - l0) / t;
        let bwd = (big_l(&c.axpy(-t, d))? - l0) / t;
        if (fwd + bwd).abs() > tol::GATEAUX * (1.0 + fwd.abs()) {
            differentiable = false;
        }
        if i < m {
            gradient.push(fwd);
        }
    }

    let piece_gradient = |f: &ExtendedFunction| -> Result<Option<Vec<f64>>> {
        let wp = well_posedness(space, f, c)?;
        wp.minimizer().map(|x| space.dirac(x).map(|d| d.0)).transpose()
    };
    let first_gradient = piece_gradient(f1)?;
    let second_gradient = piece_gradient(f2)?;
    let close = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol::GATEAUX * (1.0 + y.abs()))
    };
    let agrees_with = if differentiable {
        let first_active = first_value >= l0 - tol::TIE;
        let second_active = second_value >= l0 - tol::TIE;
        if first_active && first_gradient.as_deref().is_some_and(|g| close(&gradient, g)) {
            Some(ActivePiece::First)
        } else if second_active && second_gradient.as_deref().is_some_and(|g| close(&gradient, g)) {
            Some(ActivePiece::Second)
        } else {
            None
        }
    } else {
        None
    };
    Ok(MaxRuleReport {
        first_value,
        second_value,
        max_differentiable: differentiable,
        max_gradient: differentiable.then_some(gradient),
        first_gradient,
        second_gradient,
        agrees_with,
    })
}

/// `σ_C(x) = max_{q ∈ C} ⟨q, x⟩`.
pub fn support_function<V: AsRef<[f64]>>(set: &[V], x: &[f64]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = f64::NEG_INFINITY;
    for q in set {
        let q = q.as_ref();
        if q.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: q.len(),
            });
        }
        best = best.max(q.iter().zip(x).map(|(a, b)| a * b).sum());
    }
    Ok(best)
}

/// A rectangular grid `origin + step ⊙ k`, `0 ≤ k < shape`, with points
/// numbered in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct RegularGrid {
    origin: Vec<f64>,
    step: Vec<f64>,
    shape: Vec<usize>,
}

impl RegularGrid {
    pub fn new(origin: Vec<f64>, step: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let d = origin.len();
        if step.len() != d || shape.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: step.len().min(shape.len()),
            });
        }
        if d == 0 || shape.contains(&0) {
            return Err(Error::EmptySet);
        }
        if step.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidArgument("grid steps must be positive".into()));
        }
        Ok(RegularGrid { origin, step, shape })
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        let mut p = vec![0.0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let k = rest % self.shape[axis];
            rest /= self.shape[axis];
            p[axis] = self.origin[axis] + self.step[axis] * k as f64;
        }
        p
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfConvolution {
    pub value: f64,
    /// Grid points `z` attaining the infimum of `f(z) + σ_C(x − z)`.
    pub argmin: Vec<usize>,
}

/// `(f ▽ σ_C)(x) = inf_y f(x − y) + σ_C(y)` over grid displacements; terms
/// with `x − y` off the grid count as `+∞`.
pub fn inf_convolution<V: AsRef<[f64]>>(
    grid: &RegularGrid,
    f: &ExtendedFunction,
    duals: &[V],
    x: usize,
) -> Result<InfConvolution> {
    if f.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: f.len(),
        });
    }
    if x >= grid.len() {
        return Err(Error::UnknownPoint(x));
    }
    let px = grid.point(x);
    let mut terms = Vec::new();
    for z in f.domain() {
        let pz = grid.point(z);
        let y: Vec<f64> = px.iter().zip(&pz).map(|(a, b)| a - b).collect();
        terms.push((z, f.raw_values()[z] + support_function(duals, &y)?));
    }
    let value = terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let slack = 1e-12 * (1.0 + value.abs());
    let argmin = terms
        .into_iter()
        .filter(|t| t.1 <= value + slack)
        .map(|t| t.0)
        .collect();
    Ok(InfConvolution { value, argmin })
}
