use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An invariant of a configuration value (grid geometry, exponents, solver settings) is violated.
    #[error("configuration error: {0}")]
    Config(String),

    /// A geometric query selected no grid points, or left the grid.
    #[error("query error: {0}")]
    Query(String),

    #[error("no dead core: outer radius {outer_radius} does not exceed the detachment distance {detachment}")]
    NoDeadCore { outer_radius: f64, detachment: f64 },

    /// Closed-form derivatives were requested on the set where the profile is not smooth.
    #[error("point {point:?} lies on the non-smooth set of the profile")]
    NonSmooth { point: [f64; 2] },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("solver did not converge at level {level} (epsilon = {epsilon:e}) after {sweeps} sweeps; last change {last_change:e}")]
    NonConvergence {
        level: usize,
        epsilon: f64,
        sweeps: usize,
        last_change: f64,
        partial: Box<SolveReport>,
    },
}
