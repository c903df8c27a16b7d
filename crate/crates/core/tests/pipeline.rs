use std::sync::Arc;

use inflap_core::{
    build_grid, check_nondegeneracy, detect_plateau, fit_growth_exponent, residual_field,
    solve_dirichlet, AbsorptionParams, EpsilonSchedule, ExactProfile, Field, GridSpec,
    SolverConfig,
};

fn config<T: inflap_core::Scalar>(tol: f64) -> SolverConfig<T> {
    SolverConfig {
        sweep_tol: T::lit(tol),
        relaxation: T::lit(1.9),
        epsilon_schedule: EpsilonSchedule {
            initial: T::lit(1e-2),
            decay: T::lit(0.1),
            steps: 8,
        },
        ..SolverConfig::default()
    }
}

#[test]
fn dead_core_solve_then_analyze() {
    let p = AbsorptionParams::<f64>::new(0.0, 0.0).unwrap();
    let profile = ExactProfile::dead_core(p, 2.0, p.tau()).unwrap();
    let grid = Arc::new(build_grid(GridSpec::interval(0.0, 2.0, 0.02)).unwrap());
    let boundary = Field::from_fn(grid.clone(), |x| profile.evaluate(x));
    let rhs = profile.rhs().unwrap();
    let (u, report) = solve_dirichlet(&grid, &rhs, &boundary, &config(1e-10)).unwrap();
    assert_eq!(report.levels.len(), 9);
    assert_eq!(report.monotonicity_violations, 0);

    let plateau = detect_plateau(&u, 4e-4, &[0.0, 0.0]);
    assert!((plateau.radius.unwrap() - 1.0).abs() <= 0.04);
    let fit = fit_growth_exponent(&u, &[1.0, 0.0], 0.06, 0.6, 6).unwrap();
    assert!((fit.slope - p.beta()).abs() < 0.05, "{}", fit.slope);
    let radii: Vec<f64> = (1..=5).map(|k| 0.1 * k as f64).collect();
    let nd = check_nondegeneracy(&u, &[1.0, 0.0], &radii, &p, 0.02).unwrap();
    assert!(nd.worst_ratio >= 0.9);

    let res = residual_field(&u, &rhs, 1e-8).unwrap();
    assert!(grid.interior().iter().all(|&i| res.get(i).is_finite()));
}

#[test]
fn single_precision_solve() {
    let p = AbsorptionParams::<f32>::new(0.0, 1.0).unwrap();
    let profile = ExactProfile::dead_core(p, 2.0, 1.0).unwrap();
    let grid = Arc::new(build_grid(GridSpec::interval(0.0f32, 2.0, 0.04)).unwrap());
    let boundary = Field::from_fn(grid.clone(), |x| profile.evaluate(x));
    let (u, report) = solve_dirichlet(
        &grid,
        &profile.rhs().unwrap(),
        &boundary,
        &config::<f32>(1e-6),
    )
    .unwrap();
    assert_eq!(report.monotonicity_violations, 0);
    let err = grid
        .interior()
        .iter()
        .map(|&i| (u.get(i) - profile.evaluate(&grid.point(i))).abs())
        .fold(0.0f32, f32::max);
    assert!(err < 0.05, "{err}");
}
