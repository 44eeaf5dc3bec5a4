//! Finite metric spaces, point subsets and extended-real functions on them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub type PointId = usize;

/// How distances are obtained when building a [`GroundSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    /// Euclidean distance between coordinates.
    Euclidean,
    /// Explicit `n × n` distance matrix.
    Matrix(Vec<Vec<f64>>),
}

/// A finite metric space with points `0..n`, optionally embedded in ℝ^d.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroundSetRecord", into = "GroundSetRecord")]
pub struct GroundSet {
    coords: Option<Vec<Vec<f64>>>,
    dist: Vec<Vec<f64>>,
    euclidean: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroundSetRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    metric: Vec<Vec<f64>>,
    #[serde(default)]
    euclidean: bool,
}

impl From<GroundSet> for GroundSetRecord {
    fn from(g: GroundSet) -> Self {
        GroundSetRecord {
            points: g.coords,
            metric: g.dist,
            euclidean: g.euclidean,
        }
    }
}

impl TryFrom<GroundSetRecord> for GroundSet {
    type Error = Error;

    fn try_from(r: GroundSetRecord) -> Result<Self> {
        let g = GroundSet::new(r.points, MetricSpec::Matrix(r.metric))?;
        Ok(GroundSet {
            euclidean: r.euclidean,
            ..g
        })
    }
}

impl GroundSet {
    /// Builds and validates a ground set.
    ///
    /// With [`MetricSpec::Euclidean`] the coordinates are required; with an
    /// explicit matrix they are optional but must agree in count.
    pub fn new(points: Option<Vec<Vec<f64>>>, metric: MetricSpec) -> Result<Self> {
        if let Some(pts) = &points {
            if pts.is_empty() {
                return Err(Error::EmptySet);
            }
            let d = pts[0].len();
            for p in pts {
                if p.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: p.len(),
                    });
                }
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("point coordinate".into()));
                }
            }
        }
        let (dist, euclidean) = match metric {
            MetricSpec::Euclidean => {
                let pts = points.as_ref().ok_or(Error::MissingCoords)?;
                let dist = pts
                    .iter()
                    .map(|p| pts.iter().map(|q| euclidean_distance(p, q)).collect())
                    .collect();
                (dist, true)
            }
            MetricSpec::Matrix(m) => (m, false),
        };
        let n = dist.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if let Some(pts) = &points {
            if pts.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: pts.len(),
                });
            }
        }
        validate_metric(&dist)?;
        Ok(GroundSet {
            coords: points,
            dist,
            euclidean,
        })
    }

    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Some(points), MetricSpec::Euclidean)
    }

    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(None, MetricSpec::Matrix(matrix))
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    pub fn has_coords(&self) -> bool {
        self.coords.is_some()
    }

    /// Embedding dimension, if coordinates are present.
    pub fn dim(&self) -> Option<usize> {
        self.coords.as_ref().map(|c| c[0].len())
    }

    pub fn coords(&self, x: PointId) -> Result<&[f64]> {
        self.check(x)?;
        self.coords
            .as_ref()
            .map(|c| c[x].as_slice())
            .ok_or(Error::MissingCoords)
    }

    pub fn all_coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn distance(&self, x: PointId, y: PointId) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist[x][y])
    }

    pub fn metric(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn ids(&self) -> std::ops::Range<PointId> {
        0..self.len()
    }

    pub fn full(&self) -> PointSubset {
        PointSubset::full(self.len())
    }

    pub fn subset(&self, ids: impl IntoIterator<Item = PointId>) -> Result<PointSubset> {
        PointSubset::new(self.len(), ids)
    }

    /// The function `x ↦ −d(x, k)`, which attains its strict maximum at `k`.
    pub fn distance_function(&self, k: PointId) -> Result<ExtendedFunction> {
        self.check(k)?;
        ExtendedFunction::finite(self.dist[k].iter().map(|d| -d).collect())
    }

    pub(crate) fn check(&self, x: PointId) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint(x))
        }
    }
}

fn euclidean_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn validate_metric(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("metric entry ({i},{j})")));
            }
            if v < 0.0 {
                return Err(Error::MetricViolation(format!(
                    "negative distance d({i},{j}) = {v}"
                )));
            }
            if i == j && v != 0.0 {
                return Err(Error::MetricViolation(format!(
                    "nonzero diagonal d({i},{i}) = {v}"
                )));
            }
            if i != j && v == 0.0 {
                return Err(Error::MetricViolation(format!(
                    "distinct points {i} and {j} at distance zero"
                )));
            }
            if (v - d[j][i]).abs() > tol::METRIC {
                return Err(Error::MetricViolation(format!(
                    "asymmetric: d({i},{j}) = {v} but d({j},{i}) = {}",
                    d[j][i]
                )));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][k] > d[i][j] + d[j][k] + tol::METRIC {
                    return Err(Error::MetricViolation(format!(
                        "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A subset of a ground set, stored as sorted, deduplicated ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSubset {
    universe: usize,
    members: Vec<PointId>,
}

impl PointSubset {
    pub fn new(universe: usize, ids: impl IntoIterator<Item = PointId>) -> Result<Self> {
        let set: BTreeSet<PointId> = ids.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= universe) {
            return Err(Error::UnknownPoint(bad));
        }
        Ok(PointSubset {
            universe,
            members: set.into_iter().collect(),
        })
    }

    pub fn full(universe: usize) -> Self {
        PointSubset {
            universe,
            members: (0..universe).collect(),
        }
    }

    pub fn empty(universe: usize) -> Self {
        PointSubset {
            universe,
            members: Vec::new(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: PointId) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn ids(&self) -> &[PointId] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subset_of(&self, other: &PointSubset) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn without(&self, x: PointId) -> PointSubset {
        PointSubset {
            universe: self.universe,
            members: self.iter().filter(|&y| y != x).collect(),
        }
    }

    pub fn union(&self, other: &PointSubset) -> PointSubset {
        let set: BTreeSet<PointId> = self.iter().chain(other.iter()).collect();
        PointSubset {
            universe: self.universe.max(other.universe),
            members: set.into_iter().collect(),
        }
    }

    pub fn difference(&self, other: &PointSubset) -> PointSubset {
        PointSubset {
            universe: self.universe,
            members: self.iter().filter(|&x| !other.contains(x)).collect(),
        }
    }

    pub(crate) fn from_sorted(universe: usize, members: Vec<PointId>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        PointSubset { universe, members }
    }
}

impl Serialize for PointSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

/// A proper function `K → ℝ ∪ {+∞}`; `+∞` is carried by a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedFunction {
    values: Vec<f64>,
    finite: Vec<bool>,
}

impl ExtendedFunction {
    /// Builds `f` from a value table and the list of points where `f = +∞`.
    pub fn new(values: Vec<f64>, infinite: &[PointId]) -> Result<Self> {
        let n = values.len();
        let mut finite = vec![true; n];
        for &x in infinite {
            if x >= n {
                return Err(Error::UnknownPoint(x));
            }
            finite[x] = false;
        }
        Self::from_mask(values, finite)
    }

    pub fn finite(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::from_mask(values, vec![true; n])
    }

    pub fn from_mask(mut values: Vec<f64>, finite: Vec<bool>) -> Result<Self> {
        if values.len() != finite.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: finite.len(),
            });
        }
        if !finite.iter().any(|&b| b) {
            return Err(Error::ImproperFunction(
                "no point has a finite value".into(),
            ));
        }
        for (x, (v, &fin)) in values.iter_mut().zip(&finite).enumerate() {
            if fin && !v.is_finite() {
                return Err(Error::ImproperFunction(format!(
                    "value at point {x} is {v}; mark it infinite instead"
                )));
            }
            if !fin {
                *v = 0.0;
            }
        }
        Ok(ExtendedFunction { values, finite })
    }

    /// The indicator `i_K`: `0` on `K`, `+∞` elsewhere.
    pub fn indicator(k: &PointSubset) -> Result<Self> {
        let n = k.universe();
        let finite = (0..n).map(|x| k.contains(x)).collect();
        Self::from_mask(vec![0.0; n], finite)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::finite(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Some(f(x))` when finite, `None` for `+∞` or out-of-range ids.
    pub fn value(&self, x: PointId) -> Option<f64> {
        match self.finite.get(x) {
            Some(true) => Some(self.values[x]),
            _ => None,
        }
    }

    pub fn is_finite_at(&self, x: PointId) -> bool {
        self.finite.get(x).copied().unwrap_or(false)
    }

    /// Points where `f` is finite, ascending.
    pub fn domain(&self) -> impl Iterator<Item = PointId> + '_ {
        self.finite
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(x, _)| x)
    }

    pub fn infinite_points(&self) -> Vec<PointId> {
        self.finite
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(x, _)| x)
            .collect()
    }

    /// Raw value table (entries under the mask are `0`).
    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }
}
