//! Problem files: JSON describing a ground set, a dictionary, an optional
//! function and named point sets.
//!
//! ```json
//! {
//!   "ground": { "points": [[0], [1], [2]] },
//!   "phi": { "kind": "affine", "norm": "sup_on_k" },
//!   "f": { "values": [0, 0, 1], "infinite": [] },
//!   "sets": { "A": [0, 2] },
//!   "task": { "set": "A", "seed": 7 }
//! }
//! ```
//!
//! `ground.metric` (an explicit matrix) may replace or accompany
//! `ground.points`. Unknown keys are rejected everywhere.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use phiconv::points::ReconstructionMode;
use phiconv::{Dictionary, ExtendedFunction, GroundSet, MetricSpec, NormKind, PhiSpace, PhiVector, PointSubset};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub ground: GroundSpec,
    pub phi: PhiSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FunctionSpec>,
    #[serde(default)]
    pub sets: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub task: TaskSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryKind {
    Linear,
    Affine,
    Distance,
    Rbf,
    Table,
    Indicators,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub kind: DictionaryKind,
    /// Anchor points for `distance` and `rbf`; all points when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub norm: NormKind,
    /// Prepend the constant function.
    #[serde(default)]
    pub constants: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub values: Vec<f64>,
    #[serde(default)]
    pub infinite: Vec<usize>,
}

/// Defaults for the command-line flags; flags win when both are given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ReconstructionMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<Vec<f64>>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub ground: Arc<GroundSet>,
    pub space: PhiSpace,
    pub f: Option<ExtendedFunction>,
    pub sets: BTreeMap<String, PointSubset>,
}

fn invalid(field: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

impl ProblemFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(self) -> Result<Problem, CliError> {
        let ground = Arc::new(self.ground.build()?);
        let n = ground.len();
        let check_ids = |field: &str, ids: &[usize]| -> Result<(), CliError> {
            match ids.iter().position(|&i| i >= n) {
                Some(pos) => Err(invalid(
                    format!("{field}[{pos}]"),
                    format!("point {} out of range for {n} points", ids[pos]),
                )),
                None => Ok(()),
            }
        };

        let phi = &self.phi;
        let all: Vec<usize> = (0..n).collect();
        let dict = match phi.kind {
            DictionaryKind::Linear => Some(Dictionary::Linear),
            DictionaryKind::Affine => Some(Dictionary::Affine),
            DictionaryKind::Distance => {
                let anchors = phi.anchors.clone().unwrap_or_else(|| all.clone());
                check_ids("phi.anchors", &anchors)?;
                Some(Dictionary::Distance { anchors })
            }
            DictionaryKind::Rbf => {
                let anchors = phi.anchors.clone().unwrap_or_else(|| all.clone());
                check_ids("phi.anchors", &anchors)?;
                let gamma = phi.gamma.ok_or_else(|| invalid("phi.gamma", "required for rbf"))?;
                Some(Dictionary::Rbf { anchors, gamma })
            }
            DictionaryKind::Table => {
                let rows = phi.rows.clone().ok_or_else(|| invalid("phi.rows", "required for table"))?;
                Some(Dictionary::Table { rows })
            }
            DictionaryKind::Indicators => None,
        };
        let mut space = match dict {
            Some(d) => PhiSpace::from_dictionary(ground.clone(), &d, phi.norm),
            None => PhiSpace::indicators(ground.clone(), phi.norm),
        }
        .map_err(|e| invalid("phi", e))?;
        if phi.constants {
            space = space.with_constants().map_err(|e| invalid("phi.constants", e))?;
        }

        let f = match &self.f {
            None => None,
            Some(spec) => {
                if spec.values.len() != n {
                    return Err(invalid(
                        "f.values",
                        format!("expected {n} values, found {}", spec.values.len()),
                    ));
                }
                check_ids("f.infinite", &spec.infinite)?;
                Some(ExtendedFunction::new(spec.values.clone(), &spec.infinite).map_err(|e| invalid("f", e))?)
            }
        };

        let mut sets = BTreeMap::new();
        for (name, ids) in &self.sets {
            let field = format!("sets.{name}");
            check_ids(&field, ids)?;
            sets.insert(name.clone(), PointSubset::new(n, ids.iter().copied()).map_err(|e| invalid(field, e))?);
        }
        for (field, name) in [("task.set", &self.task.set), ("task.ambient", &self.task.ambient)] {
            if let Some(name) = name {
                if !sets.contains_key(name) {
                    return Err(invalid(field, format!("no set named {name:?}")));
                }
            }
        }
        if let Some(c0) = &self.task.c0 {
            if c0.len() != space.dim() {
                return Err(invalid(
                    "task.c0",
                    format!("expected {} coefficients, found {}", space.dim(), c0.len()),
                ));
            }
        }
        Ok(Problem {
            file: self,
            ground,
            space,
            f,
            sets,
        })
    }
}

impl GroundSpec {
    fn build(&self) -> Result<GroundSet, CliError> {
        let result = match (&self.points, &self.metric) {
            (None, None) => return Err(invalid("ground", "needs points or metric")),
            (Some(p), None) => GroundSet::new(Some(p.clone()), MetricSpec::Euclidean),
            (p, Some(m)) => GroundSet::new(p.clone(), MetricSpec::Matrix(m.clone())),
        };
        let field = if self.metric.is_some() { "ground.metric" } else { "ground.points" };
        result.map_err(|e| invalid(field, e))
    }
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        ProblemFile::read(path)?.validate()
    }

    /// The named set, or the whole ground set for `None`.
    pub fn set(&self, name: Option<&str>) -> Result<PointSubset, CliError> {
        match name {
            None => Ok(self.ground.full()),
            Some(n) => self
                .sets
                .get(n)
                .cloned()
                .ok_or_else(|| CliError::MissingSet(n.to_string())),
        }
    }

    pub fn c0(&self) -> PhiVector {
        self.file
            .task
            .c0
            .clone()
            .map(PhiVector)
            .unwrap_or_else(|| PhiVector::zeros(self.space.dim()))
    }
}
