//! Subcommand implementations over a validated [`Problem`].

use std::time::Instant;

use phiconv::boundary::{
    choquet_boundary, dual_ball, is_norming_subset, shilov_boundary, weakstar_exposed_generators,
    GeneratorExposure, Sign,
};
use phiconv::hull::{hull_membership, phi_convex_hull, Membership};
use phiconv::points::{
    compare_point_classes, exposed_set, phi_exposed_points, phi_extremal_points, reconstruction_check,
    ExposureWitness, ReconstructionMode,
};
use phiconv::sampling::trial_rng;
use phiconv::variational::{
    default_steps, exposing_perturbation, gateaux_probe, ill_posed_fraction, well_posedness, GateauxStatus,
    Perturbation, PerturbationSearch, WellPosednessReport,
};
use phiconv::{ExtendedFunction, PhiSpace, PhiVector, PointSubset};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::problem::Problem;
use crate::report::{ids, num, nums, Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Hull,
    Exposed,
    Extremal,
    Compare,
    Check,
    Variational,
    Boundary,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Hull => "hull",
            Task::Exposed => "exposed",
            Task::Extremal => "extremal",
            Task::Compare => "compare",
            Task::Check => "check",
            Task::Variational => "variational",
            Task::Boundary => "boundary",
        }
    }
}

/// Command-line overrides of the problem's `task` section.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ReconstructionMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl Options {
    /// Flags first, then the problem's `task` section.
    fn resolve(&self, problem: &Problem) -> Options {
        let t = &problem.file.task;
        Options {
            set: self.set.clone().or_else(|| t.set.clone()),
            mode: self.mode.or(t.mode),
            tol: self.tol.or(t.tol),
            seed: self.seed.or(t.seed),
            samples: self.samples.or(t.samples),
            epsilon: self.epsilon.or(t.epsilon),
            budget: self.budget.or(t.budget),
            radius: self.radius.or(t.radius),
        }
    }
}

pub fn run(task: Task, problem: &Problem, options: &Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let opts = options.resolve(problem);
    let inputs = json!({
        "problem": serde_json::to_value(&problem.file).expect("problem is JSON"),
        "options": serde_json::to_value(&opts).expect("options are JSON"),
    });
    let mut report = Report::new(task.name(), inputs);
    let set = problem.set(opts.set.as_deref())?;
    let ambient = problem.set(problem.file.task.ambient.as_deref())?;
    let space = &problem.space;
    match task {
        Task::Hull => hull(&mut report, space, &set, &ambient)?,
        Task::Exposed => exposed(&mut report, space, &set)?,
        Task::Extremal => extremal(&mut report, space, &set)?,
        Task::Compare => compare(&mut report, problem, &set)?,
        Task::Check => check(&mut report, space, &set, &ambient, opts.mode.unwrap_or(ReconstructionMode::Exposed))?,
        Task::Variational => {
            report.seed = Some(opts.seed.unwrap_or(0));
            variational(&mut report, problem, &set, &opts)?
        }
        Task::Boundary => {
            report.seed = Some(opts.seed.unwrap_or(0));
            boundary(&mut report, space, &set, &opts)?
        }
    }
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

pub fn witness_json(w: &ExposureWitness) -> Value {
    json!({
        "point": w.point,
        "direction": nums(&w.direction.0),
        "margin": num(w.margin),
        "vacuous": w.vacuous,
    })
}

fn hull(report: &mut Report, space: &PhiSpace, a: &PointSubset, ambient: &PointSubset) -> Result<(), CliError> {
    let h = phi_convex_hull(space, a, ambient).map_err(CliError::core("hull"))?;
    let mut outside = Vec::new();
    let mut bad = Vec::new();
    for x in ambient.iter().filter(|&x| !h.contains(x)) {
        if let Membership::Outside(cert) = hull_membership(space, a, x).map_err(CliError::core("hull"))? {
            if !cert.verify(space, a, x).map_err(CliError::core("certificate"))? {
                bad.push(x);
            }
            outside.push(json!({
                "point": x,
                "direction": nums(&cert.direction.0),
                "threshold": num(cert.threshold),
                "margin": num(cert.margin),
            }));
        }
    }
    let again = phi_convex_hull(space, &h, ambient).map_err(CliError::core("hull"))?;
    report
        .result("set", ids(a))
        .result("ambient", ids(ambient))
        .result("hull", ids(&h))
        .result("certificates", Value::Array(outside));
    report.check(Check::from_outcome(
        "extensive",
        a.is_subset_of(&h),
        "A ⊆ conv_Φ(A)",
        || json!({ "missing": ids(&a.difference(&h)) }),
    ));
    report.check(Check::from_outcome(
        "certificates_verify",
        bad.is_empty(),
        "every separating certificate re-evaluates with a positive margin",
        || json!({ "points": bad }),
    ));
    report.check(Check::from_outcome(
        "idempotent",
        again == h,
        "conv_Φ(conv_Φ(A)) = conv_Φ(A)",
        || json!({ "rehull": ids(&again) }),
    ));
    Ok(())
}

fn exposed(report: &mut Report, space: &PhiSpace, set: &PointSubset) -> Result<(), CliError> {
    let witnesses = phi_exposed_points(space, set).map_err(CliError::core("exposed points"))?;
    let exp = exposed_set(&witnesses, set.universe());
    let ext = phi_extremal_points(space, set).map_err(CliError::core("extremal points"))?;
    let mut unsound = Vec::new();
    for w in &witnesses {
        if !w.verify(space, set).map_err(CliError::core("witness"))? {
            unsound.push(w.point);
        }
    }
    report
        .result("set", ids(set))
        .result("exposed", ids(&exp))
        .result("witnesses", Value::Array(witnesses.iter().map(witness_json).collect()));
    report.check(
        Check::from_outcome(
            "witnesses_verify",
            unsound.is_empty(),
            "each exposing direction strictly maximizes at its point",
            || json!({ "points": unsound }),
        )
        .with_tolerance(1e-9),
    );
    report.check(Check::from_outcome(
        "exposed_in_extremal",
        exp.is_subset_of(&ext),
        "ΦExp ⊆ ΦExt",
        || json!({ "exposed_not_extremal": ids(&exp.difference(&ext)) }),
    ));
    Ok(())
}

fn extremal(report: &mut Report, space: &PhiSpace, set: &PointSubset) -> Result<(), CliError> {
    let ext = phi_extremal_points(space, set).map_err(CliError::core("extremal points"))?;
    report.result("set", ids(set)).result("extremal", ids(&ext));
    report.check(Check::from_outcome(
        "nonempty",
        !ext.is_empty(),
        "ΦExt is nonempty",
        || json!({ "set": ids(set) }),
    ));
    Ok(())
}

fn compare(report: &mut Report, problem: &Problem, set: &PointSubset) -> Result<(), CliError> {
    let chain = compare_point_classes(&problem.ground, set).map_err(CliError::core("point classes"))?;
    report
        .result("set", ids(set))
        .result("exposed", ids(&chain.exposed))
        .result("affine_exposed", ids(&chain.affine_exposed))
        .result("extreme", ids(&chain.extreme));
    report.check(Check::from_outcome(
        "exposed_in_affine_exposed",
        chain.exposed_in_affine,
        "Exp ⊆ AExp",
        || json!({ "points": ids(&chain.exposed.difference(&chain.affine_exposed)) }),
    ));
    report.check(Check::from_outcome(
        "affine_exposed_in_extreme",
        chain.affine_in_extreme,
        "AExp ⊆ Ext",
        || json!({ "points": ids(&chain.affine_exposed.difference(&chain.extreme)) }),
    ));
    Ok(())
}

fn check(
    report: &mut Report,
    space: &PhiSpace,
    k: &PointSubset,
    ambient: &PointSubset,
    mode: ReconstructionMode,
) -> Result<(), CliError> {
    let r = reconstruction_check(space, k, ambient, mode).map_err(CliError::core("reconstruction"))?;
    report
        .result("mode", serde_json::to_value(mode).expect("mode is JSON"))
        .result("set", ids(k))
        .result("generators", ids(&r.generators))
        .result("hull", ids(&r.hull))
        .result("missing", ids(&r.missing))
        .result("extra", ids(&r.extra));
    let label = match mode {
        ReconstructionMode::Extremal => "K = conv_Φ(ΦExt(K))",
        ReconstructionMode::Exposed => "K = conv_Φ(ΦExp(K))",
    };
    report.check(Check::from_outcome("reconstruction", r.holds(), label, || {
        json!({ "generators": ids(&r.generators), "missing": ids(&r.missing), "extra": ids(&r.extra) })
    }));
    if mode == ReconstructionMode::Exposed {
        let ext = phi_extremal_points(space, k).map_err(CliError::core("extremal points"))?;
        report.result("extremal", ids(&ext));
        report.check(Check::from_outcome(
            "exposed_in_extremal",
            r.generators.is_subset_of(&ext),
            "ΦExp ⊆ ΦExt",
            || json!({ "points": ids(&r.generators.difference(&ext)) }),
        ));
    }
    Ok(())
}

fn wp_json(r: &WellPosednessReport) -> Value {
    json!({
        "c": nums(&r.perturbation.0),
        "minimizers": ids(&r.minimizers),
        "minimum": num(r.minimum),
        "gap": num(r.gap),
        "well_posed": r.well_posed,
    })
}

fn variational(report: &mut Report, problem: &Problem, set: &PointSubset, opts: &Options) -> Result<(), CliError> {
    let space = &problem.space;
    let f = match &problem.f {
        Some(f) => f.clone(),
        None => ExtendedFunction::indicator(set).map_err(CliError::core("indicator"))?,
    };
    let seed = opts.seed.unwrap_or(0);
    let radius = opts.radius.unwrap_or(1.0);
    let samples = opts.samples.unwrap_or(1000);
    let epsilon = opts.epsilon.unwrap_or(1e-3);
    let budget = opts.budget.unwrap_or(1000);
    let tol = opts.tol.unwrap_or(phiconv::tol::GATEAUX);

    let stats = ill_posed_fraction(space, &f, radius, samples, seed).map_err(CliError::core("ill-posed sampling"))?;
    let domain = PointSubset::new(space.n_points(), f.domain()).expect("domain ids are valid");
    let separates = space.separates_points_on(&domain).separates();
    report
        .result("function", json!({ "values": nums(f.raw_values()), "infinite": f.infinite_points() }))
        .result(
            "ill_posed",
            json!({
                "radius": num(radius),
                "samples": stats.samples,
                "count": stats.ill_posed.len(),
                "fraction": num(stats.fraction),
            }),
        )
        .result("separates_domain", json!(separates));
    if separates {
        report.check(Check::from_outcome(
            "ill_posed_fraction_zero",
            stats.ill_posed.is_empty(),
            "no sampled c leaves f − φ_c without a strong minimum",
            || json!({ "c": nums(&stats.ill_posed[0].0) }),
        ));
    }

    let c0 = problem.c0();
    let start = well_posedness(space, &f, &c0).map_err(CliError::core("well-posedness"))?;
    report.result("start", wp_json(&start));
    let search = PerturbationSearch { epsilon, budget, seed };
    let outcome = exposing_perturbation(space, &f, &c0, &search).map_err(CliError::core("perturbation search"))?;
    match outcome {
        Perturbation::Found { psi, report: wp, strategy } => {
            let norm = space.phi_norm(&psi).map_err(CliError::core("norm"))?;
            report.result(
                "perturbation",
                json!({
                    "psi": nums(&psi.0),
                    "norm": num(norm),
                    "strategy": serde_json::to_value(&strategy).expect("strategy is JSON"),
                    "result": wp_json(&wp),
                }),
            );
            report.check(
                Check::from_outcome(
                    "perturbation_found",
                    wp.well_posed && norm <= epsilon + 1e-12,
                    format!("‖ψ‖_Φ ≤ {epsilon:e} and f − (φ_c0 + ψ) has a strong minimum"),
                    || json!({ "psi": nums(&psi.0), "norm": num(norm) }),
                )
                .with_tolerance(1e-12),
            );
            let c = c0.add(&psi);
            let mut probes = Vec::new();
            let mut failed = Vec::new();
            for i in 0..space.dim() {
                let h = PhiVector::basis(space.dim(), i);
                let g = gateaux_probe(space, &f, &c, &h, &default_steps()).map_err(CliError::core("gateaux probe"))?;
                let ok = g.status == GateauxStatus::Converged
                    && g.expected.is_some_and(|e| (g.derivative() - e).abs() <= tol * (1.0 + e.abs()));
                if !ok {
                    failed.push(i);
                }
                probes.push(json!({
                    "direction": i,
                    "status": serde_json::to_value(g.status).expect("status is JSON"),
                    "derivative": num(g.derivative()),
                    "expected": g.expected.map_or(Value::Null, num),
                }));
            }
            report.result("gateaux", Value::Array(probes));
            report.check(
                Check::from_outcome(
                    "gateaux_duality",
                    failed.is_empty(),
                    "finite differences of f^× match the Dirac mass of the minimizer",
                    || json!({ "directions": failed }),
                )
                .with_tolerance(tol),
            );
        }
        Perturbation::Exhausted { trials } => {
            report.result("perturbation", json!({ "exhausted": trials }));
            report.check(Check::fail(
                "perturbation_found",
                format!("no ψ with ‖ψ‖_Φ ≤ {epsilon:e} found"),
                json!({ "c0": nums(&c0.0), "trials": trials }),
            ));
        }
    }
    Ok(())
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

fn boundary(report: &mut Report, space: &PhiSpace, k: &PointSubset, opts: &Options) -> Result<(), CliError> {
    let seed = opts.seed.unwrap_or(0);
    let samples = opts.samples.unwrap_or(100);
    let tol = opts.tol.unwrap_or(1e-9);
    let poly = dual_ball(space, k).map_err(CliError::core("dual ball"))?;
    let choquet = choquet_boundary(&poly).map_err(CliError::core("choquet boundary"))?;
    let exposed = exposed_set(
        &phi_exposed_points(space, k).map_err(CliError::core("exposed points"))?,
        k.universe(),
    );
    let statuses = weakstar_exposed_generators(&poly).map_err(CliError::core("weak* exposure"))?;
    let weak: Vec<Value> = statuses
        .iter()
        .filter(|g| g.is_exposed())
        .map(|g| json!({ "sign": sign_name(g.sign), "point": g.point }))
        .collect();
    let degenerate: Vec<usize> = statuses
        .iter()
        .filter(|g| matches!(g.exposure, GeneratorExposure::Degenerate))
        .map(|g| g.point)
        .collect();
    let separates = space.separates_points_on(k).separates();
    let constants = space.has_constants();
    report
        .result("set", ids(k))
        .result("generators", json!(poly.generators().len()))
        .result("choquet", ids(&choquet))
        .result("exposed", ids(&exposed))
        .result("weakstar_exposed", Value::Array(weak))
        .result("degenerate", json!(degenerate))
        .result("hypotheses", json!({ "constants": constants, "separates": separates }));

    let mut rng = trial_rng(seed, 0);
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for _ in 0..samples {
        let c = PhiVector((0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect());
        let s = poly.support(&c).map_err(CliError::core("support"))?;
        let direct = k
            .iter()
            .map(|x| space.evaluate(&c, x).map(f64::abs))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::core("evaluate"))?
            .into_iter()
            .fold(0.0, f64::max);
        let err = (s - direct).abs();
        if worst.as_ref().is_none_or(|w| err > w.0) {
            worst = Some((err, c.0));
        }
    }
    let (max_err, worst_c) = worst.unwrap_or((0.0, Vec::new()));
    report.result("support_identity_max_error", num(max_err));
    report.check(
        Check::from_outcome(
            "support_identity",
            max_err <= tol,
            format!("max_g ⟨g, c⟩ = sup_K |φ_c| on {samples} random c"),
            || json!({ "c": nums(&worst_c), "error": num(max_err) }),
        )
        .with_tolerance(tol),
    );

    if constants && separates {
        let shilov = shilov_boundary(&poly).map_err(CliError::core("shilov boundary"))?;
        report.result("shilov", ids(&shilov));
        let expected: Vec<(Sign, usize)> = exposed
            .iter()
            .flat_map(|x| [(Sign::Plus, x), (Sign::Minus, x)])
            .collect();
        let got: Vec<(Sign, usize)> = statuses.iter().filter(|g| g.is_exposed()).map(|g| (g.sign, g.point)).collect();
        report.check(Check::from_outcome(
            "weakstar_exposed_is_dirac_of_exposed",
            got == expected,
            "w*Exp(B_Φ*) = ±δ(ΦExp(K))",
            || json!({ "weakstar": got.iter().map(|(s, x)| json!([sign_name(*s), x])).collect::<Vec<_>>() }),
        ));
        report.check(Check::from_outcome(
            "shilov_choquet_exposed",
            shilov == choquet && choquet == exposed,
            "Shilov boundary = Choquet boundary = ΦExp(K)",
            || json!({ "shilov": ids(&shilov), "choquet": ids(&choquet), "exposed": ids(&exposed) }),
        ));
        let mut still_norming = Vec::new();
        for x in shilov.iter() {
            let smaller = shilov.without(x);
            if !smaller.is_empty() && is_norming_subset(&poly, &smaller).map_err(CliError::core("norming"))? {
                still_norming.push(x);
            }
        }
        report.check(Check::from_outcome(
            "shilov_minimal",
            still_norming.is_empty(),
            "removing any point of the Shilov boundary breaks norming",
            || json!({ "removable": still_norming }),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemFile;

    fn line() -> Problem {
        ProblemFile::parse(
            r#"{
                "ground": { "points": [[0], [1], [2]] },
                "phi": { "kind": "affine" },
                "f": { "values": [0, 0, 1] },
                "sets": { "A": [0, 2], "K": [0, 1, 2] }
            }"#,
            "line",
        )
        .unwrap()
        .validate()
        .unwrap()
    }

    fn opts(set: &str) -> Options {
        Options {
            set: Some(set.into()),
            ..Options::default()
        }
    }

    #[test]
    fn hull_of_endpoints() {
        let r = run(Task::Hull, &line(), &opts("A")).unwrap();
        assert_eq!(r.result_set("hull"), Some(vec![0, 1, 2]));
        assert!(r.all_pass());
    }

    #[test]
    fn exposed_check_and_boundary() {
        let p = line();
        let r = run(Task::Exposed, &p, &opts("K")).unwrap();
        assert_eq!(r.result_set("exposed"), Some(vec![0, 2]));
        let r = run(Task::Check, &p, &opts("K")).unwrap();
        assert!(r.all_pass());
        let r = run(Task::Boundary, &p, &opts("K")).unwrap();
        assert_eq!(r.result_set("shilov"), Some(vec![0, 2]));
        assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn variational_breaks_the_tie() {
        let r = run(Task::Variational, &line(), &Options::default()).unwrap();
        assert!(r.all_pass(), "{}", r.render_text());
        assert_eq!(r.results["start"]["well_posed"], json!(false));
    }

    #[test]
    fn not_convex_set_is_a_hypothesis_error() {
        let err = run(Task::Check, &line(), &opts("A")).unwrap_err();
        assert!(matches!(
            err,
            CliError::Core {
                source: phiconv::Error::HypothesisViolated(_),
                ..
            }
        ));
    }
}
