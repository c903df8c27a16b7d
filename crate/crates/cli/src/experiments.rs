//! The nine experiments, each composing `solver`, `exact` and `analysis`.

use std::sync::Arc;

use inflap_core::{
    check_gradient_growth, check_harnack, check_nondegeneracy, detect_plateau,
    discrete_inf_laplacian, fit_growth_exponent, fit_power_law, liouville_rescale, residual_field,
    solve_dirichlet, strong_max_principle_probe, sup_on_ball, AbsorptionParams64, ExactProfile64,
    Field64, Grid64, Point64, ProfileKind, RightHandSide64, SolveReport, SolverConfig64,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::report::{Check, Report, Table};

/// Everything a run produces before it is written to disk.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub field: Option<Field64>,
    pub tables: Vec<Table>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut out = Outcome {
        report: Report::new(cfg),
        field: None,
        tables: Vec::new(),
    };
    match cfg.experiment {
        Experiment::VerifyExact => verify_exact(cfg, &mut out)?,
        Experiment::Solve => solve(cfg, &mut out)?,
        Experiment::Deadcore => deadcore(cfg, &mut out)?,
        Experiment::Exponent => exponent(cfg, &mut out)?,
        Experiment::Nondegeneracy => nondegeneracy(cfg, &mut out)?,
        Experiment::Gradient => gradient(cfg, &mut out)?,
        Experiment::Harnack => harnack(cfg, &mut out)?,
        Experiment::Liouville => liouville(cfg, &mut out)?,
        Experiment::Borderline => borderline(cfg, &mut out)?,
    }
    out.report.finish();
    Ok(out)
}

/// A solved dead-core benchmark together with its closed form.
#[derive(Clone, Debug)]
pub struct DeadCoreSolve {
    pub profile: ExactProfile64,
    pub rhs: RightHandSide64,
    pub field: Field64,
    pub report: SolveReport,
    /// Closed-form plateau radius `r0`.
    pub plateau_radius: f64,
    /// Base point for fits: the configured anchor or the free-boundary point `center + (r0, 0)`.
    pub free_boundary_point: Point64,
}

/// Solves the dead-core benchmark: shifted weight vanishing on `B_r0`, exact boundary data.
pub fn solve_dead_core(cfg: &ExperimentConfig) -> Result<DeadCoreSolve, CliError> {
    let profile = cfg.dead_core_profile()?;
    let r0 = profile.plateau_radius()?;
    let rhs = profile
        .rhs()
        .ok_or_else(|| CliError::Config("dead core has no right-hand side".into()))?
        .with_epsilon(cfg.solver.epsilon.unwrap_or(0.0));
    let grid = cfg.grid()?;
    let boundary = Field64::from_fn(grid.clone(), |x| profile.evaluate(x));
    let (field, report) = solve_dirichlet(&grid, &rhs, &boundary, &cfg.solver_config()?)?;
    let c = cfg.geometry.center;
    Ok(DeadCoreSolve {
        free_boundary_point: cfg.analysis.anchor.unwrap_or([c[0] + r0, c[1]]),
        profile,
        rhs,
        field,
        report,
        plateau_radius: r0,
    })
}

fn sup_error(field: &Field64, profile: &ExactProfile64) -> f64 {
    let grid = field.grid();
    grid.interior()
        .iter()
        .map(|&i| (field.get(i) - profile.evaluate(&grid.point(i))).abs())
        .fold(0.0, f64::max)
}

fn max_principle(field: &Field64, config: &SolverConfig64) -> Check {
    Check::at_most(
        "max_principle_excess",
        field.interior_max() - field.boundary_max(),
        10.0 * config.sweep_tol,
    )
}

fn ladder_table(name: &str, report: &SolveReport) -> Table {
    let mut t = Table::new(
        name,
        &["level", "epsilon", "sweeps", "final_change", "relaxation"],
    );
    for (k, l) in report.levels.iter().enumerate() {
        t.push(vec![
            k as f64,
            l.epsilon,
            l.sweeps as f64,
            l.final_change,
            l.relaxation,
        ]);
    }
    t
}

/// Sup of the pointwise discrete residual over interior points at distance `>= exclusion` from
/// the profile's non-smooth set, and the number of such points.
pub fn exact_residual(
    profile: &ExactProfile64,
    grid: &Arc<Grid64>,
    exclusion: f64,
    delta: f64,
) -> (f64, usize) {
    let field = Field64::from_fn(grid.clone(), |x| profile.evaluate(x));
    let mut sup = 0.0f64;
    let mut count = 0;
    for &i in grid.interior() {
        let x = grid.point(i);
        if profile.distance_to_nonsmooth(&x) < exclusion {
            continue;
        }
        let r = discrete_inf_laplacian(&field, i, delta) - profile.source(&x);
        sup = sup.max(r.abs());
        count += 1;
    }
    (sup, count)
}

/// Residual sizes below this are rounding noise; no order is fitted to them.
const EXACT_REPRODUCTION: f64 = 1e-9;

fn verify_exact(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let profile = cfg.profile()?;
    let delta = cfg.solver_config()?.gradient_floor;
    let mut spacings = cfg
        .analysis
        .spacings
        .clone()
        .unwrap_or_else(|| vec![cfg.spacing()]);
    spacings.sort_by(|a, b| b.total_cmp(a));
    spacings.dedup();
    let h_max = spacings[0];
    let exclusion = cfg.analysis.exclusion.unwrap_or(5.0 * h_max);
    let mut table = Table::new("residual", &["h", "sup_residual", "points"]);
    let mut residuals = Vec::new();
    for &h in &spacings {
        let grid = cfg.grid_with_spacing(h)?;
        let (sup, count) = exact_residual(&profile, &grid, exclusion, delta);
        if count == 0 {
            return Err(CliError::Config(format!(
                "no interior point at distance >= {exclusion} from the non-smooth set at h = {h}"
            )));
        }
        table.push(vec![h, sup, count as f64]);
        residuals.push(sup);
    }
    let finest = *residuals.last().unwrap();
    let r = &mut out.report;
    r.measure("exclusion", exclusion);
    r.measure("spacings", spacings.clone());
    r.measure("sup_residuals", residuals.clone());
    r.measure("sup_residual", finest);
    r.check(Check::at_most(
        "sup_residual",
        finest,
        cfg.analysis.residual_tol.unwrap_or(0.05),
    ));
    if spacings.len() >= 2 {
        let exact = residuals.iter().all(|&s| s < EXACT_REPRODUCTION);
        r.measure("reproduced_to_rounding", exact);
        if !exact {
            let fit = fit_power_law(&spacings, &residuals).map_err(|e| CliError::Numerical {
                message: e.to_string(),
                partial: None,
            })?;
            r.measure("residual_order", fit.slope);
            r.check(Check::at_least(
                "residual_order",
                fit.slope,
                cfg.analysis.min_order.unwrap_or(0.9),
            ));
        }
    }
    let finest_grid = cfg.grid_with_spacing(*spacings.last().unwrap())?;
    out.field = Some(Field64::from_fn(finest_grid, |x| profile.evaluate(x)));
    out.tables.push(table);
    Ok(())
}

/// Rhs for profiles without one: a shifted weight whose support lies outside the grid.
fn zero_rhs(cfg: &ExperimentConfig) -> Result<RightHandSide64, CliError> {
    let params = AbsorptionParams64::new(0.0, 0.0)?;
    let g = &cfg.geometry;
    let far = 10.0 * (g.outer_radius + g.center[0].abs() + g.center[1].abs());
    Ok(RightHandSide64::shifted_power(params, far).with_anchor(cfg.geometry.center))
}

fn solve(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let profile = cfg.profile()?;
    let config = cfg.solver_config()?;
    let rhs = match (profile.rhs(), &profile.kind) {
        (Some(rhs), _) => rhs,
        (None, ProfileKind::Aronsson { .. }) => zero_rhs(cfg)?,
        (None, ProfileKind::OneDim { .. }) if cfg.geometry.dimension == 1 => {
            RightHandSide64::power(profile.params).with_anchor(profile.anchor)
        }
        _ => {
            return Err(CliError::Config(
                "profile: no weight kind expresses this source in two dimensions".into(),
            ))
        }
    }
    .with_epsilon(cfg.solver.epsilon.unwrap_or(0.0));
    let grid = cfg.grid()?;
    let boundary = Field64::from_fn(grid.clone(), |x| profile.evaluate(x));
    let (field, report) = solve_dirichlet(&grid, &rhs, &boundary, &config)?;
    let err = sup_error(&field, &profile);
    let r = &mut out.report;
    r.solve("dirichlet", &report);
    r.measure("sup_error", err);
    r.measure("final_residual", report.final_residual);
    r.check(Check::at_most(
        "sup_error",
        err,
        cfg.analysis.error_tol.unwrap_or(0.05),
    ));
    r.check(max_principle(&field, &config));
    out.tables.push(ladder_table("ladder", &report));
    out.field = Some(field);
    Ok(())
}

fn deadcore(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let run = solve_dead_core(cfg)?;
    let h = cfg.spacing();
    let tol = cfg.plateau_tol();
    let plateau = detect_plateau(&run.field, tol, &cfg.geometry.center);
    let radius = plateau.radius.unwrap_or(f64::NAN);
    let err = sup_error(&run.field, &run.profile);
    let config = cfg.solver_config()?;
    let r = &mut out.report;
    r.solve("dirichlet", &run.report);
    r.measure("plateau_radius", radius);
    r.measure("plateau_radius_exact", run.plateau_radius);
    r.measure("plateau_tol", tol);
    r.measure("free_boundary_points", plateau.free_boundary.len());
    r.measure("sup_error", err);
    r.measure(
        "monotonicity_violations",
        run.report.monotonicity_violations,
    );
    r.check(Check::within(
        "plateau_radius",
        radius,
        run.plateau_radius,
        cfg.analysis.radius_tol.unwrap_or(2.0 * h),
    ));
    r.check(Check::at_most(
        "sup_error",
        err,
        cfg.analysis.error_tol.unwrap_or(0.02),
    ));
    r.check(Check::at_most(
        "monotonicity_violations",
        run.report.monotonicity_violations as f64,
        0.0,
    ));
    r.check(max_principle(&run.field, &config));
    let mut profile = Table::new("profile", &["distance", "u", "exact"]);
    let grid = run.field.grid();
    for (k, x) in grid.points().iter().enumerate() {
        if x[1] == cfg.geometry.center[1] {
            profile.push(vec![
                x[0] - cfg.geometry.center[0],
                run.field.get(k),
                run.profile.evaluate(x),
            ]);
        }
    }
    out.tables.push(profile);
    out.tables.push(ladder_table("ladder", &run.report));
    out.field = Some(run.field);
    Ok(())
}

fn anchor_check(run: &DeadCoreSolve, tol: f64) -> Check {
    let grid = run.field.grid();
    let idx = grid.nearest(&run.free_boundary_point);
    Check::at_most("anchor_value", run.field.get(idx), tol)
}

fn exponent(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let run = solve_dead_core(cfg)?;
    let params = cfg.absorption()?;
    let a = &cfg.analysis;
    let (r_min, r_max, n) = (
        a.r_min.unwrap_or(0.05),
        a.r_max.unwrap_or(0.4),
        a.n_radii.unwrap_or(8),
    );
    let x0 = run.free_boundary_point;
    let fit = fit_growth_exponent(&run.field, &x0, r_min, r_max, n)?;
    let tol = cfg.plateau_tol();
    let plateau = detect_plateau(&run.field, tol, &cfg.geometry.center);
    let r = &mut out.report;
    r.solve("dirichlet", &run.report);
    r.measure("slope", fit.slope);
    r.measure("intercept", fit.intercept);
    r.measure("r_squared", fit.r_squared);
    r.measure("target_beta", params.beta());
    r.measure("anchor", x0.to_vec());
    r.measure("plateau_radius", plateau.radius.unwrap_or(f64::NAN));
    r.measure("plateau_radius_exact", run.plateau_radius);
    r.check(anchor_check(&run, tol));
    r.check(Check::within(
        "slope",
        fit.slope,
        params.beta(),
        a.slope_tol.unwrap_or(0.05),
    ));
    let mut t = Table::new("exponent", &["r", "sup_u", "model"]);
    for (&rad, &sup) in fit.radii.iter().zip(&fit.sup_values) {
        t.push(vec![rad, sup, (fit.intercept + fit.slope * rad.ln()).exp()]);
    }
    out.tables.push(t);
    out.field = Some(run.field);
    Ok(())
}

/// Ten geometric radii from `10h` to `0.3`.
fn default_radii(h: f64) -> Vec<f64> {
    let (lo, hi) = (10.0 * h, 0.3f64);
    (0..10)
        .map(|k| lo * (hi / lo).powf(k as f64 / 9.0))
        .collect()
}

fn nondegeneracy(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let run = solve_dead_core(cfg)?;
    let params = cfg.absorption()?;
    let h = cfg.spacing();
    let radii = cfg
        .analysis
        .radii
        .clone()
        .unwrap_or_else(|| default_radii(h));
    let band = cfg.analysis.band.unwrap_or(h);
    let solved = check_nondegeneracy(&run.field, &run.free_boundary_point, &radii, &params, band)?;
    let radial = ExactProfile64::radial(params).with_anchor(cfg.geometry.center);
    let exact_field = Field64::from_fn(run.field.grid().clone(), |x| radial.evaluate(x));
    let exact = check_nondegeneracy(&exact_field, &cfg.geometry.center, &radii, &params, band)?;
    let exact_dev = exact
        .rows
        .iter()
        .map(|row| (row.2 - 1.0).abs())
        .fold(0.0, f64::max);
    let r = &mut out.report;
    r.solve("dirichlet", &run.report);
    r.measure("worst_ratio", solved.worst_ratio);
    r.measure("exact_ratio_deviation", exact_dev);
    r.measure("radii", radii.clone());
    r.check(anchor_check(&run, cfg.plateau_tol()));
    r.check(Check::at_least(
        "worst_ratio",
        solved.worst_ratio,
        cfg.analysis.ratio_min.unwrap_or(0.9),
    ));
    r.check(Check::at_most("exact_ratio_deviation", exact_dev, 1e-9));
    let mut t = Table::new(
        "nondegeneracy",
        &["r", "distance", "ratio", "exact_distance", "exact_ratio"],
    );
    for (s, e) in solved.rows.iter().zip(&exact.rows) {
        t.push(vec![s.0, s.1, s.2, e.1, e.2]);
    }
    out.tables.push(t);
    out.field = Some(run.field);
    Ok(())
}

fn gradient(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let run = solve_dead_core(cfg)?;
    let params = cfg.absorption()?;
    let tol = cfg.plateau_tol();
    let plateau = detect_plateau(&run.field, tol, &cfg.geometry.center);
    let [lo, hi] = cfg.analysis.gradient_window.unwrap_or([0.05, 0.5]);
    let growth = check_gradient_growth(&run.field, &plateau, tol, &params, (lo, hi))?;
    let target = params.gradient_exponent();
    let r = &mut out.report;
    r.solve("dirichlet", &run.report);
    r.measure("gradient_slope", growth.fit.slope);
    r.measure("target_gradient_exponent", target);
    r.measure("max_ratio", growth.max_ratio);
    r.measure("sharp_ratio", params.tau() * params.beta());
    r.measure("points", growth.rows.len());
    r.check(Check::within(
        "gradient_slope",
        growth.fit.slope,
        target,
        cfg.analysis.slope_tol.unwrap_or(0.1),
    ));
    let mut t = Table::new("gradient", &["distance", "gradient", "ratio"]);
    for row in &growth.rows {
        t.push(vec![row.distance, row.gradient, row.ratio]);
    }
    out.tables.push(t);
    out.field = Some(run.field);
    Ok(())
}

/// Deterministic `(z, r)` pairs with `B_{2r}(z)` inside the grid and `r >= 2h`, from Weyl
/// sequences.
pub fn harnack_pairs(grid: &Grid64, n: usize) -> Vec<(Point64, f64)> {
    let spec = grid.spec();
    let (c, big_r, h) = (spec.center, spec.outer_radius, spec.spacing);
    let frac = |x: f64| x - x.floor();
    let mut pairs = Vec::with_capacity(n);
    for i in 0..200 * n {
        if pairs.len() == n {
            break;
        }
        let k = i as f64;
        let t = frac(0.5 + k * 0.618_033_988_749_894_9);
        let s = frac(0.5 + k * 0.754_877_666_246_692_7);
        let q = frac(0.5 + k * 0.569_840_290_998_053_2);
        let z = if spec.dimension == 1 {
            [c[0] + (2.0 * t - 1.0) * 0.6 * big_r, c[1]]
        } else {
            let (rho, theta) = (0.6 * big_r * s, std::f64::consts::TAU * t);
            [c[0] + rho * theta.cos(), c[1] + rho * theta.sin()]
        };
        let d = (z[0] - c[0]).hypot(z[1] - c[1]);
        let r = 0.5 * (big_r - d) * (0.25 + 0.75 * q);
        if r >= 2.0 * h && spec.contains_ball(&z, 2.0 * r) {
            pairs.push((z, r));
        }
    }
    pairs
}

fn harnack(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let params = cfg.absorption()?;
    let config = cfg.solver_config()?;
    let eps = cfg.solver.epsilon.unwrap_or(1e-2);
    let rhs = cfg.rhs_from_weight(params)?.with_epsilon(eps);
    let grid = cfg.grid()?;
    let c = cfg.boundary_value_or(1.0);
    let (field, report) =
        solve_dirichlet(&grid, &rhs, &Field64::constant(grid.clone(), c), &config)?;
    let n = cfg.analysis.samples.unwrap_or(20);
    let pairs = harnack_pairs(&grid, n);
    if pairs.len() < n {
        return Err(CliError::Config(format!(
            "geometry admits only {} of {n} Harnack balls with r >= 2h",
            pairs.len()
        )));
    }
    let radial = ExactProfile64::radial(params).with_anchor(cfg.params.anchor);
    let exact = Field64::from_fn(grid.clone(), |x| radial.evaluate(x));
    let tol = 10.0 * config.sweep_tol;
    let mut t = Table::new(
        "harnack",
        &["z1", "z2", "r", "lhs", "rhs", "exact_lhs", "exact_rhs"],
    );
    let (mut fails, mut exact_fails) = (0usize, 0usize);
    let mut worst = f64::INFINITY;
    for (z, rad) in &pairs {
        let ball = grid.ball_indices(z, 2.0 * rad);
        let h_sup = ball
            .iter()
            .map(|&i| rhs.eval(&grid.point(i), field.get(i)))
            .fold(0.0, f64::max);
        let f_sup = ball
            .iter()
            .map(|&i| radial.source(&grid.point(i)))
            .fold(0.0, f64::max);
        let solved = check_harnack(&field, h_sup, z, *rad, tol)?;
        let ex = check_harnack(&exact, f_sup, z, *rad, tol)?;
        fails += usize::from(!solved.pass);
        exact_fails += usize::from(!ex.pass);
        worst = worst.min(solved.rhs - solved.lhs).min(ex.rhs - ex.lhs);
        t.push(vec![
            z[0], z[1], *rad, solved.lhs, solved.rhs, ex.lhs, ex.rhs,
        ]);
    }
    let r = &mut out.report;
    r.solve("penalized", &report);
    r.measure("pairs", pairs.len());
    r.measure("epsilon", eps);
    r.measure(
        "field_min",
        field.values().iter().copied().fold(f64::INFINITY, f64::min),
    );
    r.measure("worst_slack", worst);
    r.check(Check::at_least(
        "field_min",
        field.values().iter().copied().fold(f64::INFINITY, f64::min),
        0.0,
    ));
    r.check(Check::at_most("solved_failures", fails as f64, 0.0));
    r.check(Check::at_most("exact_failures", exact_fails as f64, 0.0));
    r.check(max_principle(&field, &config));
    out.tables.push(t);
    out.field = Some(field);
    Ok(())
}

fn liouville(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    const TOL: f64 = 1e-9;
    let params = cfg.absorption()?;
    let beta = params.beta();
    let grid = cfg.grid()?;
    let origin = [0.0, 0.0];
    let ks = cfg
        .analysis
        .scalings
        .clone()
        .unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0]);
    let shift = cfg.analysis.growth_shift.unwrap_or(0.2);
    let delta = cfg.solver_config()?.gradient_floor;
    let exclusion = cfg.analysis.exclusion.unwrap_or(5.0 * cfg.spacing());

    let radial = ExactProfile64::radial(params);
    let rhs = radial
        .rhs()
        .expect("radial profiles carry a right-hand side");
    let base = Field64::from_fn(grid.clone(), |x| radial.evaluate(x));
    let window_sup = |f: &Field64| -> Result<f64, CliError> {
        let res = residual_field(f, &rhs, delta)?;
        Ok(grid
            .interior()
            .iter()
            .filter(|&&i| radial.distance_to_nonsmooth(&grid.point(i)) >= exclusion)
            .map(|&i| res.get(i).abs())
            .fold(0.0, f64::max))
    };
    let base_res = window_sup(&base)?;
    let scale = 1.0 + base.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let power = |p: f64| move |x: &Point64| x[0].hypot(x[1]).powf(p);
    let sub1 = sup_on_ball(
        &Field64::from_fn(grid.clone(), power(beta - shift)),
        &origin,
        1.0,
    )?;
    let sup1 = sup_on_ball(
        &Field64::from_fn(grid.clone(), power(beta + shift)),
        &origin,
        1.0,
    )?;

    let mut t = Table::new(
        "liouville",
        &[
            "k",
            "sup_sub",
            "sup_super",
            "rate_sub",
            "rate_super",
            "invariance",
            "residual_shift",
        ],
    );
    let (mut inv, mut res_shift, mut sub_err, mut sup_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &k in &ks {
        let uk = liouville_rescale(|x| radial.evaluate(x), k, &params, grid.clone())?;
        let i_k = uk.max_abs_diff(&base) / scale;
        let r_k = (window_sup(&uk)? - base_res).abs();
        let sub = sup_on_ball(
            &liouville_rescale(power(beta - shift), k, &params, grid.clone())?,
            &origin,
            1.0,
        )?;
        let sup = sup_on_ball(
            &liouville_rescale(power(beta + shift), k, &params, grid.clone())?,
            &origin,
            1.0,
        )?;
        let (rate_sub, rate_sup) = (sub / sub1, sup / sup1);
        inv = inv.max(i_k);
        res_shift = res_shift.max(r_k);
        sub_err = sub_err.max((rate_sub / k.powf(-shift) - 1.0).abs());
        sup_err = sup_err.max((rate_sup / k.powf(shift) - 1.0).abs());
        t.push(vec![k, sub, sup, rate_sub, rate_sup, i_k, r_k]);
    }
    let r = &mut out.report;
    r.measure("scalings", ks);
    r.measure("growth_shift", shift);
    r.measure("base_residual", base_res);
    r.check(Check::at_most("radial_invariance", inv, TOL));
    r.check(Check::at_most("residual_invariance", res_shift, TOL));
    r.check(Check::at_most("subcritical_rate_error", sub_err, TOL));
    r.check(Check::at_most("supercritical_rate_error", sup_err, TOL));
    out.tables.push(t);
    out.field = Some(base);
    Ok(())
}

fn borderline(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<(), CliError> {
    let config = cfg.solver_config()?;
    let grid = cfg.grid()?;
    let c = cfg.boundary_value_or(1.0);
    let boundary = Field64::constant(grid.clone(), c);
    let alpha = cfg.params.alpha;
    let mut t = Table::new("borderline", &["m", "interior_min", "tau", "sweeps"]);
    let mut last: Option<(f64, Field64)> = None;
    for &m in cfg.exponents() {
        let params = AbsorptionParams64::new(alpha, m)?;
        let rhs = cfg.rhs_from_weight(params)?;
        let (field, report) = solve_dirichlet(&grid, &rhs, &boundary, &config)?;
        let probe = strong_max_principle_probe(&field);
        t.push(vec![
            m,
            probe.value,
            params.tau(),
            report.total_sweeps() as f64,
        ]);
        out.report.solve(&format!("m={m}"), &report);
        out.report.check(max_principle(&field, &config));
        if last.as_ref().is_none_or(|(lm, _)| m >= *lm) {
            last = Some((m, field));
        }
    }
    let (m_top, top) = last.expect("exponent list is nonempty");
    let top_min = strong_max_principle_probe(&top).value;

    let contrast = AbsorptionParams64::new(alpha, cfg.contrast_m())?;
    let rhs = cfg.rhs_from_weight(contrast)?;
    let (cf, creport) = solve_dirichlet(&grid, &rhs, &boundary, &config)?;
    let tol = cfg.plateau_tol();
    let plateau = detect_plateau(&cf, tol, &cfg.params.anchor);
    let interior_plateau = plateau
        .plateau
        .iter()
        .filter(|&&i| grid.is_interior(i))
        .count();

    let r = &mut out.report;
    r.solve("contrast", &creport);
    r.measure("top_exponent", m_top);
    r.measure("top_interior_min", top_min);
    r.measure("contrast_m", cfg.contrast_m());
    r.measure("contrast_plateau_points", interior_plateau);
    r.measure(
        "contrast_plateau_radius",
        plateau.radius.unwrap_or(f64::NAN),
    );
    r.check(Check::above("top_interior_min", top_min, 0.0));
    r.check(Check::above(
        "contrast_plateau_points",
        interior_plateau as f64,
        0.0,
    ));
    out.tables.push(t);
    out.field = Some(top);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: serde_json::Value) -> ExperimentConfig {
        ExperimentConfig::from_json(&v.to_string()).unwrap()
    }

    #[test]
    fn harnack_pairs_fit_inside() {
        let grid =
            inflap_core::build_grid(inflap_core::GridSpec64::disk([0.0, 0.0], 1.0, 0.05)).unwrap();
        let pairs = harnack_pairs(&grid, 20);
        assert_eq!(pairs.len(), 20);
        for (z, r) in &pairs {
            assert!(*r >= 0.1 && grid.spec().contains_ball(z, 2.0 * r));
        }
        assert_eq!(pairs, harnack_pairs(&grid, 20));
    }

    #[test]
    fn verify_exact_radial_one_dim() {
        let out = execute(&cfg(serde_json::json!({
            "experiment": "verify-exact",
            "geometry": {"dimension": 1, "outer_radius": 1.0, "spacing": 0.01},
            "params": {"alpha": 0.0, "m": 0.0},
            "profile": {"kind": "radial"},
            "analysis": {"spacings": [0.04, 0.02, 0.01]}
        })))
        .unwrap();
        assert!(out.report.pass, "{:?}", out.report.checks);
        assert_eq!(out.tables[0].rows.len(), 3);
    }

    #[test]
    fn liouville_passes() {
        let out = execute(&cfg(serde_json::json!({
            "experiment": "liouville",
            "geometry": {"dimension": 2, "outer_radius": 1.0, "spacing": 0.05},
            "params": {"alpha": 1.0, "m": 0.0}
        })))
        .unwrap();
        assert!(out.report.pass, "{:?}", out.report.checks);
    }

    #[test]
    fn deadcore_small() {
        let out = execute(&cfg(serde_json::json!({
            "experiment": "deadcore",
            "geometry": {"dimension": 1, "outer_radius": 2.0, "spacing": 0.04},
            "params": {"alpha": 0.0, "m": 0.0},
            "solver": {"relaxation": 1.9, "epsilon_schedule": {"decay": 0.1, "steps": 10}},
            "analysis": {"error_tol": 0.05}
        })))
        .unwrap();
        assert!(out.report.pass, "{:?}", out.report.checks);
        let radius = out.report.measurements["plateau_radius"].as_f64().unwrap();
        assert!((radius - 1.0).abs() <= 0.08);
    }

    #[test]
    fn missing_dead_core_is_a_config_error() {
        let mut c = cfg(serde_json::json!({
            "experiment": "deadcore",
            "geometry": {"dimension": 1, "outer_radius": 2.0, "spacing": 0.04},
            "params": {"alpha": 0.0, "m": 0.0}
        }));
        c.boundary_value = Some(100.0);
        assert!(matches!(execute(&c), Err(CliError::Config(_))));
    }
}
