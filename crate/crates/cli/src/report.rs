//! Reports: the JSON document every subcommand emits.
//!
//! JSON has no infinities, so non-finite numbers are written as the strings
//! `"inf"`, `"-inf"` and `"nan"` (see [`num`]).

use std::fmt::Write as _;

use phiconv::PointSubset;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub details: String,
    /// Always present on failed checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    pub fn pass(name: &str, details: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            pass: true,
            tolerance: None,
            details: details.into(),
            counterexample: None,
        }
    }

    pub fn fail(name: &str, details: impl Into<String>, counterexample: Value) -> Self {
        Check {
            name: name.to_string(),
            pass: false,
            tolerance: None,
            details: details.into(),
            counterexample: Some(counterexample),
        }
    }

    /// A pass when `ok`, otherwise a failure carrying `counterexample`.
    pub fn from_outcome(name: &str, ok: bool, details: impl Into<String>, counterexample: impl FnOnce() -> Value) -> Self {
        if ok {
            Check::pass(name, details)
        } else {
            Check::fail(name, details, counterexample())
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub task: String,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub timing: Timing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(task: impl Into<String>, inputs: Value) -> Self {
        Report {
            task: task.into(),
            inputs,
            results: json!({}),
            checks: Vec::new(),
            timing: Timing { elapsed_ms: 0.0 },
            seed: None,
        }
    }

    pub fn result(&mut self, key: &str, value: Value) -> &mut Self {
        self.results
            .as_object_mut()
            .expect("results is an object")
            .insert(key.to_string(), value);
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Integer ids of the set stored under `results.<key>`.
    pub fn result_set(&self, key: &str) -> Option<Vec<usize>> {
        self.results
            .get(key)?
            .as_array()?
            .iter()
            .map(|v| v.as_u64().map(|u| u as usize))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are JSON");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task: {}", self.task);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        if let Some(obj) = self.results.as_object() {
            for (k, v) in obj {
                let _ = writeln!(out, "{k}: {}", compact(v));
            }
        }
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "[{mark}] {}: {}", c.name, c.details);
            if let Some(t) = c.tolerance {
                let _ = write!(out, " (tol {t:e})");
            }
            out.push('\n');
            if let Some(ce) = &c.counterexample {
                let _ = writeln!(out, "       counterexample: {}", compact(ce));
            }
        }
        let _ = writeln!(out, "elapsed: {:.1} ms", self.timing.elapsed_ms);
        out
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 200 {
        format!("{}…", &s[..s.char_indices().take_while(|(i, _)| *i < 200).last().map_or(0, |(i, _)| i)])
    } else {
        s
    }
}

/// A number as JSON, with non-finite values spelled out.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn ids(s: &PointSubset) -> Value {
    json!(s.ids())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_keeps_non_finite_markers() {
        let mut r = Report::new("t", json!({"x": 1}));
        r.result("margin", num(f64::INFINITY)).result("set", json!([0, 2]));
        r.check(Check::fail("c", "d", json!({"point": 3})).with_tolerance(1e-9));
        r.seed = Some(4);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.result_set("set"), Some(vec![0, 2]));
        assert!(!back.all_pass());
        assert!(r.render_text().contains("[FAIL] c: d"));
    }
}
