//! Monotone finite-difference solver and verification toolkit for the infinity-Laplacian
//! Hardy–Hénon problem `Δ∞u = c |x - x0|^alpha u₊^m` with dead cores.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod domain;
pub mod error;
pub mod exact;
pub mod problem;
pub mod scalar;
pub mod solver;

pub use analysis::{
    centered_gradient, check_gradient_growth, check_harnack, check_nondegeneracy, detect_plateau,
    fit_growth_exponent, fit_power_law, harnack_sigma, liouville_rescale, positive_density,
    strong_max_principle_probe, ExponentFit, GradientGrowth, GradientRow, HarnackCheck, MinProbe,
    NondegeneracyCheck, PlateauReport,
};
pub use domain::{
    ball_argmax, build_grid, shell_argmax, sup_on_ball, sup_on_shell, Field, Grid, GridSpec,
};
pub use error::{Error, Result};
pub use exact::{detachment_distance, ExactProfile, ProfileKind};
pub use problem::{
    beta_exponent, gradient_exponent, rhs_eval, tau_constant, AbsorptionParams, RightHandSide,
    WeightKind,
};
pub use scalar::{Point, Scalar};
pub use solver::{
    discrete_inf_laplacian, gauss_seidel_sweep, local_update, residual_field,
    residual_field_sampled, solve_dirichlet, DiscreteProblem, EpsilonSchedule, LevelReport,
    SolveReport, SolverConfig, WeightSampling,
};

pub type Point64 = Point<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type AbsorptionParams64 = AbsorptionParams<f64>;
pub type RightHandSide64 = RightHandSide<f64>;
pub type ExactProfile64 = ExactProfile<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type ExponentFit64 = ExponentFit<f64>;
pub type PlateauReport64 = PlateauReport<f64>;
