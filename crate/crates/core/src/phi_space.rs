//! The function class Φ as a finite span of dictionary functions.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{GroundSet, PointId, PointSubset};
use crate::tol;

/// Norm placed on coefficient vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `‖c‖ = max_x |φ_c(x)|` over the ground set.
    #[default]
    SupOnK,
    CoeffL1,
    CoeffL2,
}

/// Dictionary families from which the evaluation matrix is built.
#[derive(Debug, Clone, PartialEq)]
pub enum Dictionary {
    /// Coordinate functionals `x ↦ x_j`.
    Linear,
    /// The constant `1` followed by the coordinate functionals.
    Affine,
    /// `x ↦ −d(x, k)` for each anchor `k`.
    Distance { anchors: Vec<PointId> },
    /// `x ↦ exp(−γ d(x, k)²)` for each anchor `k`.
    Rbf { anchors: Vec<PointId>, gamma: f64 },
    /// Explicit rows, one value per point.
    Table { rows: Vec<Vec<f64>> },
}

impl Dictionary {
    pub fn rows(&self, ground: &GroundSet) -> Result<Vec<Vec<f64>>> {
        let n = ground.len();
        let check_anchors = |anchors: &[PointId]| -> Result<()> {
            if anchors.is_empty() {
                return Err(Error::InvalidDictionary("no anchors".into()));
            }
            anchors.iter().try_for_each(|&k| ground.check(k))
        };
        match self {
            Dictionary::Linear | Dictionary::Affine => {
                let coords = ground.all_coords().ok_or(Error::MissingCoords)?;
                let d = coords[0].len();
                let mut rows = Vec::with_capacity(d + 1);
                if matches!(self, Dictionary::Affine) {
                    rows.push(vec![1.0; n]);
                }
                for j in 0..d {
                    rows.push(coords.iter().map(|p| p[j]).collect());
                }
                Ok(rows)
            }
            Dictionary::Distance { anchors } => {
                check_anchors(anchors)?;
                Ok(anchors
                    .iter()
                    .map(|&k| ground.metric()[k].iter().map(|d| -d).collect())
                    .collect())
            }
            Dictionary::Rbf { anchors, gamma } => {
                check_anchors(anchors)?;
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::InvalidDictionary(format!(
                        "rbf gamma must be positive, got {gamma}"
                    )));
                }
                Ok(anchors
                    .iter()
                    .map(|&k| {
                        ground.metric()[k]
                            .iter()
                            .map(|d| (-gamma * d * d).exp())
                            .collect()
                    })
                    .collect())
            }
            Dictionary::Table { rows } => {
                if rows.is_empty() {
                    return Err(Error::InvalidDictionary("no rows".into()));
                }
                for r in rows {
                    if r.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: r.len(),
                        });
                    }
                }
                Ok(rows.clone())
            }
        }
    }
}

/// Coefficients of one `φ ∈ Φ` with respect to the dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhiVector(pub Vec<f64>);

impl PhiVector {
    pub fn zeros(m: usize) -> Self {
        PhiVector(vec![0.0; m])
    }

    pub fn basis(m: usize, i: usize) -> Self {
        let mut c = vec![0.0; m];
        c[i] = 1.0;
        PhiVector(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        PhiVector(self.0.iter().map(|v| v * s).collect())
    }

    pub fn add(&self, other: &PhiVector) -> Self {
        PhiVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &PhiVector) -> Self {
        PhiVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + t · dir`
    pub fn axpy(&self, t: f64, dir: &PhiVector) -> Self {
        PhiVector(self.0.iter().zip(&dir.0).map(|(a, b)| a + t * b).collect())
    }
}

/// A functional on Φ in coordinates dual to the dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualVector(pub Vec<f64>);

impl AsRef<[f64]> for DualVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl DualVector {
    pub fn pair(&self, c: &PhiVector) -> f64 {
        let mut s = 0.0;
        for (q, ci) in self.0.iter().zip(&c.0) {
            s += ci * q;
        }
        s
    }

    pub fn neg(&self) -> DualVector {
        DualVector(self.0.iter().map(|v| -v).collect())
    }
}

/// Outcome of the separation-of-points test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Separates,
    Witness(PointId, PointId),
}

impl Separation {
    pub fn separates(&self) -> bool {
        matches!(self, Separation::Separates)
    }
}

/// Φ as the row span of an `m × n` evaluation matrix over a ground set.
#[derive(Debug, Clone)]
pub struct PhiSpace {
    ground: Arc<GroundSet>,
    rows: Vec<Vec<f64>>,
    norm: NormKind,
    alpha: f64,
    has_constants: bool,
    rank: usize,
}

impl PhiSpace {
    pub fn new(ground: Arc<GroundSet>, rows: Vec<Vec<f64>>, norm: NormKind) -> Result<Self> {
        let n = ground.len();
        if rows.is_empty() {
            return Err(Error::InvalidDictionary("empty dictionary".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("dictionary row {i}")));
            }
        }
        let m = rows.len();
        let eval = DMatrix::from_fn(m, n, |i, x| rows[i][x]);
        let rank = numerical_rank(&eval);
        let has_constants = {
            let mut ext = eval.clone().insert_row(m, 1.0);
            ext.row_mut(m).fill(1.0);
            numerical_rank(&ext) == rank
        };
        if rank < m {
            log::info!("dictionary has {m} rows but rank {rank}");
        }
        let alpha = match norm {
            NormKind::SupOnK => 1.0,
            NormKind::CoeffL1 => rows
                .iter()
                .map(|r| r.iter().fold(0.0f64, |a, v| a.max(v.abs())))
                .fold(0.0, f64::max),
            // Cauchy-Schwarz per point: |φ_c(x)| ≤ ‖c‖₂ ‖column x‖₂.
            NormKind::CoeffL2 => (0..n)
                .map(|x| rows.iter().map(|r| r[x] * r[x]).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        };
        let space = PhiSpace {
            ground,
            rows,
            norm,
            alpha,
            has_constants,
            rank,
        };
        space.check_alpha()?;
        Ok(space)
    }

    pub fn from_dictionary(
        ground: Arc<GroundSet>,
        dictionary: &Dictionary,
        norm: NormKind,
    ) -> Result<Self> {
        let rows = dictionary.rows(&ground)?;
        Self::new(ground, rows, norm)
    }

    /// Same ground set and norm with an all-ones row prepended.
    pub fn with_constants(&self) -> Result<Self> {
        let mut rows = vec![vec![1.0; self.n_points()]];
        rows.extend(self.rows.iter().cloned());
        Self::new(self.ground.clone(), rows, self.norm)
    }

    /// The identity dictionary: one indicator row per point.
    pub fn indicators(ground: Arc<GroundSet>, norm: NormKind) -> Result<Self> {
        let n = ground.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|x| if x == i { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(ground, rows, norm)
    }

    fn check_alpha(&self) -> Result<()> {
        let m = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let basis = (0..m).map(|i| PhiVector::basis(m, i));
        let random = (0..16).map(|_| PhiVector((0..m).map(|_| rng.random_range(-1.0..1.0)).collect()));
        for c in basis.chain(random) {
            let lhs = self.alpha * self.phi_norm(&c)?;
            let rhs = self.sup_norm(&c)?;
            if lhs + tol::METRIC * (1.0 + rhs) < rhs {
                return Err(Error::InvalidDictionary(format!(
                    "norm bound fails: alpha·‖c‖ = {lhs} < sup|φ_c| = {rhs}"
                )));
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn ground_arc(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    /// Number of dictionary functions `m`.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn n_points(&self) -> usize {
        self.ground.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    /// Constant `α` with `sup_x |φ_c(x)| ≤ α ‖c‖_Φ`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn has_constants(&self) -> bool {
        self.has_constants
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn full(&self) -> PointSubset {
        self.ground.full()
    }

    pub(crate) fn check_vector(&self, c: &PhiVector) -> Result<()> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: c.len(),
            });
        }
        if c.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coefficient vector".into()));
        }
        Ok(())
    }

    /// `φ_c(x) = Σ_i c_i φ_i(x)`.
    pub fn evaluate(&self, c: &PhiVector, x: PointId) -> Result<f64> {
        self.check_vector(c)?;
        self.ground.check(x)?;
        Ok(self.eval_unchecked(c, x))
    }

    // Same summation order as `DualVector::pair` on `dirac(x)`.
    pub(crate) fn eval_unchecked(&self, c: &PhiVector, x: PointId) -> f64 {
        let mut s = 0.0;
        for (ci, row) in c.0.iter().zip(&self.rows) {
            s += ci * row[x];
        }
        s
    }

    /// `φ_c` at every point of the ground set.
    pub fn values(&self, c: &PhiVector) -> Result<Vec<f64>> {
        self.check_vector(c)?;
        Ok((0..self.n_points())
            .map(|x| self.eval_unchecked(c, x))
            .collect())
    }

    pub fn sup_norm(&self, c: &PhiVector) -> Result<f64> {
        Ok(self
            .values(c)?
            .into_iter()
            .fold(0.0, |a, v| a.max(v.abs())))
    }

    /// The configured norm `‖c‖_Φ`.
    pub fn phi_norm(&self, c: &PhiVector) -> Result<f64> {
        self.check_vector(c)?;
        Ok(match self.norm {
            NormKind::SupOnK => self.sup_norm(c)?,
            NormKind::CoeffL1 => c.0.iter().map(|v| v.abs()).sum(),
            NormKind::CoeffL2 => c.0.iter().map(|v| v * v).sum::<f64>().sqrt(),
        })
    }

    /// The Dirac functional `δ_x`, i.e. column `x` of the evaluation matrix.
    pub fn dirac(&self, x: PointId) -> Result<DualVector> {
        self.ground.check(x)?;
        Ok(DualVector(self.rows.iter().map(|r| r[x]).collect()))
    }

    pub fn separates_points(&self) -> Separation {
        self.separates_points_on(&self.full())
    }

    /// Separation restricted to the points of `subset`.
    pub fn separates_points_on(&self, subset: &PointSubset) -> Separation {
        let ids = subset.ids();
        for (a, &x) in ids.iter().enumerate() {
            for &y in &ids[a + 1..] {
                let differs = self
                    .rows
                    .iter()
                    .any(|r| (r[x] - r[y]).abs() > tol::SEPARATION);
                if !differs {
                    return Separation::Witness(x, y);
                }
            }
        }
        Separation::Separates
    }

    /// Least-squares projection of a function on the ground set onto Φ.
    pub fn project(&self, values: &[f64]) -> Result<PhiVector> {
        let n = self.n_points();
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: values.len(),
            });
        }
        let m = self.dim();
        // Solve E^T c ≈ g.
        let et = DMatrix::from_fn(n, m, |x, i| self.rows[i][x]);
        let g = DVector::from_column_slice(values);
        let svd = et.svd(true, true);
        let eps = svd.singular_values.max() * tol::RANK;
        let c = svd
            .solve(&g, eps)
            .map_err(|e| Error::InvalidDictionary(e.to_string()))?;
        Ok(PhiVector(c.iter().copied().collect()))
    }
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > top * tol::RANK).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> Arc<GroundSet> {
        Arc::new(GroundSet::euclidean(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap())
    }

    fn affine_line3() -> PhiSpace {
        PhiSpace::from_dictionary(line3(), &Dictionary::Affine, NormKind::SupOnK).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let s = affine_line3();
        let zero = PhiVector::zeros(2);
        for x in 0..3 {
            assert_eq!(s.evaluate(&zero, x).unwrap(), 0.0);
        }
        assert_eq!(s.values(&PhiVector(vec![3.0, -1.0])).unwrap(), vec![3.0, 2.0, 1.0]);
        assert_eq!(s.values(&PhiVector::basis(2, 1)).unwrap(), s.rows()[1]);
        assert_eq!(
            s.evaluate(&PhiVector(vec![1.0]), 0),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(s.evaluate(&zero, 3), Err(Error::UnknownPoint(3)));
    }

    #[test]
    fn sup_norm_examples() {
        let s = affine_line3();
        assert_eq!(s.sup_norm(&PhiVector::zeros(2)).unwrap(), 0.0);
        assert_eq!(s.sup_norm(&PhiVector(vec![-1.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn dirac_examples() {
        let s = affine_line3();
        assert_eq!(s.dirac(0).unwrap().0, vec![1.0, 0.0]);
        assert_eq!(s.dirac(1).unwrap().0, vec![1.0, 1.0]);
        assert_eq!(s.dirac(2).unwrap().0, vec![1.0, 2.0]);

        let two = Arc::new(GroundSet::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        let ind = PhiSpace::indicators(two, NormKind::SupOnK).unwrap();
        assert_eq!(ind.dirac(0).unwrap().0, vec![1.0, 0.0]);
        assert_eq!(ind.dirac(1).unwrap().0, vec![0.0, 1.0]);
    }

    #[test]
    fn separation_examples() {
        assert_eq!(affine_line3().separates_points(), Separation::Separates);

        let two = Arc::new(GroundSet::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        let consts = PhiSpace::new(two, vec![vec![1.0, 1.0]], NormKind::SupOnK).unwrap();
        assert_eq!(consts.separates_points(), Separation::Witness(0, 1));
        assert!(consts.has_constants());

        let sym = Arc::new(GroundSet::euclidean(vec![vec![-1.0], vec![1.0]]).unwrap());
        let sq = PhiSpace::new(sym, vec![vec![1.0, 1.0]], NormKind::SupOnK).unwrap();
        assert_eq!(sq.separates_points(), Separation::Witness(0, 1));
    }

    #[test]
    fn constants_detection() {
        assert!(affine_line3().has_constants());
        let lin = PhiSpace::from_dictionary(line3(), &Dictionary::Linear, NormKind::SupOnK).unwrap();
        assert!(!lin.has_constants());
        // Two indicator rows on two points span the constants.
        let two = Arc::new(GroundSet::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        assert!(PhiSpace::indicators(two, NormKind::SupOnK).unwrap().has_constants());
    }

    #[test]
    fn duplicate_rows_kept_and_rank_reported() {
        let s = PhiSpace::new(
            line3(),
            vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]],
            NormKind::CoeffL2,
        )
        .unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.rank(), 1);
        // ‖(1,1)‖₂ = √2 and sup|φ| = 4, so α must be at least 2√2.
        let c = PhiVector(vec![1.0, 1.0]);
        assert!(s.alpha() * s.phi_norm(&c).unwrap() >= s.sup_norm(&c).unwrap() - 1e-12);
    }

    #[test]
    fn projection_recovers_span_members() {
        let s = affine_line3();
        let c = s.project(&[3.0, 2.0, 1.0]).unwrap();
        assert!((c.0[0] - 3.0).abs() < 1e-12 && (c.0[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rbf_and_distance_rows() {
        let d = Dictionary::Distance { anchors: vec![0, 2] }.rows(&line3()).unwrap();
        assert_eq!(d, vec![vec![0.0, -1.0, -2.0], vec![-2.0, -1.0, 0.0]]);
        let r = Dictionary::Rbf {
            anchors: vec![1],
            gamma: 1.0,
        }
        .rows(&line3())
        .unwrap();
        assert_eq!(r[0][1], 1.0);
        assert!((r[0][0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            Dictionary::Rbf {
                anchors: vec![],
                gamma: 1.0
            }
            .rows(&line3()),
            Err(Error::InvalidDictionary(_))
        ));
    }
}
