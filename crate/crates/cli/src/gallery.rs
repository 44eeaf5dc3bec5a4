//! Built-in scenarios, generated from their parameters.
//!
//! | name | instance |
//! |------|----------|
//! | `line3` | `{0, 1, 2}` ⊂ ℝ with affine functions |
//! | `square` | the 3 × 3 grid on `[0, 2]²`, affine |
//! | `truncated_cube(n)` | `{−1, 1}ⁿ`, affine, with the weights `2^{−i}` |
//! | `stadium` | `[−1, 1]²` with half-discs of radius 1 on both sides |
//! | `two_point_algebra` | two points, all functions |
//! | `random_polytope(d, n[, seed])` | `n` uniform points of `[−1, 1]^d`, affine |

use std::sync::Arc;
use std::time::Instant;

use phiconv::boundary::{choquet_boundary, dual_ball, weakstar_exposed_generators};
use phiconv::points::{
    classical_extreme_points, exposed_set, phi_exposed_points, phi_extremal_points, reconstruction_check,
    witness_margin, ReconstructionMode,
};
use phiconv::{GroundSet, NormKind, PhiSpace, PhiVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::{self, witness_json, Options, Task};
use crate::error::CliError;
use crate::problem::{DictionaryKind, GroundSpec, PhiSpec, Problem, ProblemFile, TaskSpec};
use crate::report::{ids, num, nums, Check, Report};

pub const MAX_CUBE_DIM: usize = 8;
pub const STADIUM_ANGLES: usize = 10_000;
const STADIUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    Line3,
    Square,
    TruncatedCube(usize),
    Stadium,
    TwoPointAlgebra,
    RandomPolytope { d: usize, n: usize, seed: u64 },
}

impl Entry {
    /// Parses `name` or `name(arg, …)`; `default_seed` fills a missing
    /// `random_polytope` seed.
    pub fn parse(text: &str, default_seed: u64) -> Result<Entry, CliError> {
        let unknown = || CliError::UnknownGallery(text.to_string());
        let text = text.trim();
        let (name, args) = match text.find('(') {
            Some(open) => {
                let inner = text[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
                let args: Vec<u64> = inner
                    .split(',')
                    .map(|a| a.trim().parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| unknown())?;
                (&text[..open], args)
            }
            None => (text, Vec::new()),
        };
        let entry = match (name, args.as_slice()) {
            ("line3", []) => Entry::Line3,
            ("square", []) => Entry::Square,
            ("stadium", []) => Entry::Stadium,
            ("two_point_algebra", []) => Entry::TwoPointAlgebra,
            ("truncated_cube", []) => Entry::TruncatedCube(3),
            ("truncated_cube", &[n]) if (1..=MAX_CUBE_DIM as u64).contains(&n) => Entry::TruncatedCube(n as usize),
            ("random_polytope", &[d, n]) if d >= 1 && n >= 1 => Entry::RandomPolytope {
                d: d as usize,
                n: n as usize,
                seed: default_seed,
            },
            ("random_polytope", &[d, n, seed]) if d >= 1 && n >= 1 => Entry::RandomPolytope {
                d: d as usize,
                n: n as usize,
                seed,
            },
            _ => return Err(unknown()),
        };
        Ok(entry)
    }

    pub fn name(&self) -> String {
        match self {
            Entry::Line3 => "line3".into(),
            Entry::Square => "square".into(),
            Entry::TruncatedCube(n) => format!("truncated_cube({n})"),
            Entry::Stadium => "stadium".into(),
            Entry::TwoPointAlgebra => "two_point_algebra".into(),
            Entry::RandomPolytope { d, n, seed } => format!("random_polytope({d},{n},{seed})"),
        }
    }
}

pub fn run(name: &str, seed: u64) -> Result<Report, CliError> {
    let start = Instant::now();
    let entry = Entry::parse(name, seed)?;
    let mut report = Report::new("gallery", json!({ "gallery": entry.name() }));
    match entry {
        Entry::Line3 => {
            let pts = vec![vec![0.0], vec![1.0], vec![2.0]];
            canonical(&mut report, pts)?;
        }
        Entry::Square => {
            let mut pts = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    pts.push(vec![f64::from(i), f64::from(j)]);
                }
            }
            canonical(&mut report, pts)?;
        }
        Entry::TruncatedCube(n) => truncated_cube(&mut report, n)?,
        Entry::Stadium => stadium(&mut report),
        Entry::TwoPointAlgebra => two_point_algebra(&mut report)?,
        Entry::RandomPolytope { d, n, seed } => {
            report.seed = Some(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            canonical(&mut report, pts)?;
        }
    }
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn affine_problem(points: Vec<Vec<f64>>) -> Result<Problem, CliError> {
    ProblemFile {
        ground: GroundSpec {
            points: Some(points),
            metric: None,
        },
        phi: PhiSpec {
            kind: DictionaryKind::Affine,
            anchors: None,
            gamma: None,
            rows: None,
            norm: NormKind::SupOnK,
            constants: false,
        },
        f: None,
        sets: Default::default(),
        task: TaskSpec::default(),
    }
    .validate()
}

/// Exposed, extremal and classical extreme points, both reconstructions and
/// the boundary identities for an affine instance with `K` = all points.
fn canonical(report: &mut Report, points: Vec<Vec<f64>>) -> Result<(), CliError> {
    let problem = affine_problem(points.clone())?;
    let space = &problem.space;
    let k = problem.ground.full();
    report.result("points", json!(points.iter().map(|p| nums(p)).collect::<Vec<_>>()));

    let witnesses = phi_exposed_points(space, &k).map_err(CliError::core("exposed points"))?;
    let exp = exposed_set(&witnesses, k.universe());
    let ext = phi_extremal_points(space, &k).map_err(CliError::core("extremal points"))?;
    let classical = classical_extreme_points(&problem.ground, &k).map_err(CliError::core("extreme points"))?;
    report
        .result("exposed", ids(&exp))
        .result("extremal", ids(&ext))
        .result("extreme", ids(&classical))
        .result("witnesses", Value::Array(witnesses.iter().map(witness_json).collect()));
    report.check(Check::from_outcome(
        "exposed_is_classical_extreme",
        exp == classical,
        "ΦExp(K) equals the classical extreme points",
        || json!({ "exposed": ids(&exp), "extreme": ids(&classical) }),
    ));
    report.check(Check::from_outcome(
        "exposed_in_extremal",
        exp.is_subset_of(&ext),
        "ΦExp ⊆ ΦExt",
        || json!({ "points": ids(&exp.difference(&ext)) }),
    ));
    for mode in [ReconstructionMode::Exposed, ReconstructionMode::Extremal] {
        let r = reconstruction_check(space, &k, &k, mode).map_err(CliError::core("reconstruction"))?;
        let name = match mode {
            ReconstructionMode::Exposed => "reconstruction_exposed",
            ReconstructionMode::Extremal => "reconstruction_extremal",
        };
        report.check(Check::from_outcome(name, r.holds(), "K = conv_Φ(generators)", || {
            json!({ "missing": ids(&r.missing), "extra": ids(&r.extra) })
        }));
    }
    let b = commands::run(Task::Boundary, &problem, &Options::default())?;
    for key in ["shilov", "choquet"] {
        report.result(key, b.results.get(key).cloned().unwrap_or(Value::Null));
    }
    report.checks.extend(b.checks);
    Ok(())
}

fn truncated_cube(report: &mut Report, n: usize) -> Result<(), CliError> {
    let vertices: Vec<Vec<f64>> = (0..1usize << n)
        .map(|bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect();
    let all_ones = (1usize << n) - 1;
    let problem = affine_problem(vertices)?;
    let space = &problem.space;
    let k = problem.ground.full();
    let exp = exposed_set(
        &phi_exposed_points(space, &k).map_err(CliError::core("exposed points"))?,
        k.universe(),
    );
    // Constant first, then x_1, …, x_n with weights 2^{-1}, …, 2^{-n}.
    let mut weights = vec![0.0];
    weights.extend((1..=n).map(|i| 0.5f64.powi(i as i32)));
    let phi = PhiVector(weights);
    let margin = witness_margin(space, &k, all_ones, &phi).map_err(CliError::core("margin"))?;
    let predicted = 2.0 * 0.5f64.powi(n as i32);
    report
        .result("dimension", json!(n))
        .result("vertices", json!(k.len()))
        .result("exposed", ids(&exp))
        .result("all_ones", json!(all_ones))
        .result("weighted_functional", nums(&phi.0))
        .result("margin", num(margin));
    report.check(Check::from_outcome(
        "all_vertices_exposed",
        exp == k,
        format!("all {} vertices of the cube are exposed", k.len()),
        || json!({ "not_exposed": ids(&k.difference(&exp)) }),
    ));
    report.check(
        Check::from_outcome(
            "weighted_functional_exposes_all_ones",
            margin > 0.0 && (margin - predicted).abs() <= 1e-12,
            format!("Σ 2^(-i) x_i peaks only at (1, …, 1), margin 2^(1-n) = {predicted:e}"),
            || json!({ "margin": num(margin) }),
        )
        .with_tolerance(1e-12),
    );
    Ok(())
}

/// `[−1, 1]²` together with the discs of radius 1 centred at `(±1, 0)`.
pub fn in_stadium(p: [f64; 2]) -> bool {
    let [x, y] = p;
    (x.abs() <= 1.0 && y.abs() <= 1.0) || (x - 1.0).powi(2) + y * y <= 1.0 || (x + 1.0).powi(2) + y * y <= 1.0
}

/// The face of the stadium maximizing `⟨u, ·⟩` (up to `tol`), as the
/// candidate points it is the convex hull of.
///
/// The support function is `|u₁| + 1` for unit `u`; it is attained at
/// `(±1, 0) + u` on the discs and, when `u` is vertical, along a whole edge
/// of the square.
pub fn stadium_face(u: [f64; 2], tol: f64) -> Vec<[f64; 2]> {
    let candidates = [
        [1.0 + u[0], u[1]],
        [-1.0 + u[0], u[1]],
        [1.0, 1.0],
        [-1.0, 1.0],
        [1.0, -1.0],
        [-1.0, -1.0],
    ];
    let value = |p: [f64; 2]| u[0] * p[0] + u[1] * p[1];
    let top = candidates.iter().map(|&p| value(p)).fold(f64::NEG_INFINITY, f64::max);
    candidates.into_iter().filter(|&p| value(p) >= top - tol).collect()
}

fn diameter(points: &[[f64; 2]]) -> f64 {
    let mut d: f64 = 0.0;
    for a in points {
        for b in points {
            d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    d
}

fn stadium(report: &mut Report) {
    let corner = [1.0, 1.0];
    let angle = |j: usize| 2.0 * std::f64::consts::PI * j as f64 / STADIUM_ANGLES as f64;

    // Midpoint test: (1,1) ± t v both in the stadium would make it interior
    // to a segment.
    let steps = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6];
    let mut midpoint_violation = None;
    'outer: for j in 0..STADIUM_ANGLES {
        let v = [angle(j).cos(), angle(j).sin()];
        for &t in &steps {
            let plus = [corner[0] + t * v[0], corner[1] + t * v[1]];
            let minus = [corner[0] - t * v[0], corner[1] - t * v[1]];
            if in_stadium(plus) && in_stadium(minus) {
                midpoint_violation = Some((j, t));
                break 'outer;
            }
        }
    }

    let mut containing = 0usize;
    let mut min_diameter = f64::INFINITY;
    let mut exposing = Vec::new();
    for j in 0..STADIUM_ANGLES {
        let u = [angle(j).cos(), angle(j).sin()];
        let face = stadium_face(u, STADIUM_TOL);
        let value = |p: [f64; 2]| u[0] * p[0] + u[1] * p[1];
        let top = face.iter().map(|&p| value(p)).fold(f64::NEG_INFINITY, f64::max);
        if value(corner) >= top - STADIUM_TOL {
            containing += 1;
            let d = diameter(&face);
            min_diameter = min_diameter.min(d);
            if d < 0.5 {
                exposing.push(j);
            }
        }
    }
    report
        .result("point", nums(&corner))
        .result("angles", json!(STADIUM_ANGLES))
        .result("maximizer_tolerance", num(STADIUM_TOL))
        .result("angles_with_point_in_face", json!(containing))
        .result("min_face_diameter", num(min_diameter))
        .result("exposing_angles", json!(exposing));
    report.check(Check::from_outcome(
        "extreme_by_midpoint_test",
        midpoint_violation.is_none(),
        format!("(1,1) is the midpoint of no segment (1,1) ± t v over {STADIUM_ANGLES} angles"),
        || {
            let (j, t) = midpoint_violation.unwrap();
            json!({ "angle_index": j, "t": t })
        },
    ));
    report.check(
        Check::from_outcome(
            "not_exposed_by_sampled_angles",
            exposing.is_empty(),
            "every sampled maximizer face containing (1,1) has diameter ≥ 0.5",
            || json!({ "angle_indices": exposing.clone() }),
        )
        .with_tolerance(STADIUM_TOL),
    );
}

fn two_point_algebra(report: &mut Report) -> Result<(), CliError> {
    let ground = Arc::new(
        GroundSet::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).map_err(CliError::core("ground set"))?,
    );
    let space = PhiSpace::indicators(ground.clone(), NormKind::SupOnK).map_err(CliError::core("space"))?;
    let k = ground.full();
    let poly = dual_ball(&space, &k).map_err(CliError::core("dual ball"))?;
    let coords: Vec<Vec<f64>> = poly.generators().iter().map(|g| g.coords.0.clone()).collect();
    let cross = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
    let is_cross = coords.len() == 4
        && coords
            .iter()
            .zip(&cross)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x == y));
    let choquet = choquet_boundary(&poly).map_err(CliError::core("choquet boundary"))?;
    let exposed = weakstar_exposed_generators(&poly).map_err(CliError::core("weak* exposure"))?;
    let all_exposed = exposed.iter().all(|g| g.is_exposed());
    report
        .result("generators", json!(coords.iter().map(|c| nums(c)).collect::<Vec<_>>()))
        .result("choquet", ids(&choquet));
    report.check(Check::from_outcome(
        "dual_ball_is_cross_polytope",
        is_cross,
        "B_Φ* = conv(±e₁, ±e₂)",
        || json!({ "generators": coords.iter().map(|c| nums(c)).collect::<Vec<_>>() }),
    ));
    report.check(Check::from_outcome(
        "every_dirac_is_a_vertex",
        choquet == k,
        "Choquet boundary is the whole space",
        || json!({ "choquet": ids(&choquet) }),
    ));
    report.check(Check::from_outcome(
        "every_generator_weakstar_exposed",
        all_exposed,
        "±δ₀, ±δ₁ are all weak* exposed",
        || json!({ "not_exposed": exposed.iter().filter(|g| !g.is_exposed()).map(|g| g.point).collect::<Vec<_>>() }),
    ));
    let mut worst = 0.0f64;
    for c in [[1.0, 0.5], [-2.0, 1.0], [0.25, -0.75], [0.0, 0.0]] {
        let c = PhiVector(c.to_vec());
        let s = poly.support(&c).map_err(CliError::core("support"))?;
        worst = worst.max((s - c.0[0].abs().max(c.0[1].abs())).abs());
    }
    report.check(
        Check::from_outcome(
            "support_is_max_norm",
            worst == 0.0,
            "σ(c) = max(|c₀|, |c₁|)",
            || json!({ "error": num(worst) }),
        )
        .with_tolerance(0.0),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!(Entry::parse("truncated_cube(3)", 0).unwrap(), Entry::TruncatedCube(3));
        assert_eq!(
            Entry::parse("random_polytope(2, 10)", 5).unwrap(),
            Entry::RandomPolytope { d: 2, n: 10, seed: 5 }
        );
        for bad in ["cube", "truncated_cube(9)", "truncated_cube(x)", "line3(1)", "random_polytope(2"] {
            assert!(matches!(Entry::parse(bad, 0), Err(CliError::UnknownGallery(_))), "{bad}");
        }
    }

    #[test]
    fn line3_matches_expectations() {
        let r = run("line3", 0).unwrap();
        assert_eq!(r.result_set("exposed"), Some(vec![0, 2]));
        assert_eq!(r.result_set("shilov"), Some(vec![0, 2]));
        assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn square_corners() {
        let r = run("square", 0).unwrap();
        assert_eq!(r.result_set("exposed"), Some(vec![0, 2, 6, 8]));
        assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn two_point_algebra_passes() {
        let r = run("two_point_algebra", 0).unwrap();
        assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn stadium_face_geometry() {
        assert!(in_stadium([1.5, 0.0]) && !in_stadium([1.5, 1.0]));
        assert_eq!(stadium_face([1.0, 0.0], 1e-12), vec![[2.0, 0.0]]);
        let top = stadium_face([0.0, 1.0], 1e-12);
        assert!((diameter(&top) - 2.0).abs() < 1e-12);
    }
}
