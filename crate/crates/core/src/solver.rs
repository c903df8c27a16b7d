//! Monotone finite differences for `Δ∞u = f(x, u)` and a Gauss–Seidel solver with an ε ladder.
//!
//! For a center value `v` and stencil neighbors `y_j` at distances `d_j`, let
//! `q_j = (u(y_j) - v) / d_j`, `S⁺ = max q_j` (attained at distance `d⁺`) and `S⁻ = min q_j`
//! (at `d⁻`). The operator is
//!
//! ```text
//! L(v) = G² · 2/(d⁺ + d⁻) · (S⁺ + S⁻),   G² = max((S⁺² - S⁺S⁻ + S⁻²)/3, δ²)
//! ```
//!
//! Off the floor this equals `2 (S⁺³ + S⁻³) / (3 (d⁺ + d⁻))`, the average of `φ'² φ''` across the
//! two one-sided slopes. It is nondecreasing in every neighbor value and strictly decreasing in
//! `v`, so each local equation `L(v) = f(x, v)` has exactly one root.

use std::sync::Arc;

use crate::domain::{Field, Grid};
use crate::error::{Error, Result};
use crate::problem::{absorption, RightHandSide};
use crate::scalar::Scalar;

const MAX_DOUBLINGS: usize = 60;
const MAX_BISECTIONS: usize = 400;
const RELAXATION_WINDOW: usize = 1000;

struct Iteration<T> {
    sweeps: usize,
    change: T,
    converged: bool,
    relaxation: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule<T> {
    pub initial: T,
    pub decay: T,
    /// Number of decay steps; the ladder has `steps + 1` levels `initial · decay^k`.
    pub steps: usize,
}

impl<T: Scalar> EpsilonSchedule<T> {
    pub fn levels(&self) -> Vec<T> {
        let mut eps = self.initial;
        let mut out = Vec::with_capacity(self.steps + 1);
        for _ in 0..=self.steps {
            out.push(eps);
            eps = eps * self.decay;
        }
        out
    }
}

/// How the weight `w` enters the discrete right-hand side at a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightSampling {
    Point,
    /// Radial cell average for shifted weights (see [`RightHandSide::cell_weight`]).
    CellAverage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub gradient_floor: T,
    pub sweep_tol: T,
    pub max_sweeps: usize,
    pub bisection_tol: T,
    pub epsilon_schedule: EpsilonSchedule<T>,
    /// Over-relaxation factor in `(0, 2)`; 1 is plain Gauss–Seidel.
    pub relaxation: T,
    pub weight_sampling: WeightSampling,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            gradient_floor: T::lit(1e-8),
            sweep_tol: T::lit(1e-10),
            max_sweeps: 50_000,
            bisection_tol: T::lit(1e-12),
            epsilon_schedule: EpsilonSchedule {
                initial: T::lit(1e-2),
                decay: T::lit(0.5),
                steps: 12,
            },
            relaxation: T::one(),
            weight_sampling: WeightSampling::CellAverage,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("gradient_floor", self.gradient_floor)?;
        positive("sweep_tol", self.sweep_tol)?;
        positive("bisection_tol", self.bisection_tol)?;
        positive("epsilon_schedule.initial", self.epsilon_schedule.initial)?;
        if self.max_sweeps == 0 {
            return Err(Error::Config("max_sweeps must be at least 1".into()));
        }
        let decay = self.epsilon_schedule.decay;
        if !(decay > T::zero() && decay < T::one()) {
            return Err(Error::Config(format!(
                "epsilon decay factor must lie in (0, 1), got {decay}"
            )));
        }
        let w = self.relaxation;
        if !(w > T::zero() && w < T::lit(2.0)) {
            return Err(Error::Config(format!(
                "relaxation must lie in (0, 2), got {w}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub epsilon: f64,
    pub sweeps: usize,
    pub final_change: f64,
    pub converged: bool,
    /// Relaxation factor in force when the level stopped.
    pub relaxation: f64,
}

/// Convergence diagnostics of [`solve_dirichlet`].
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SolveReport {
    /// Sweeps spent on the infinity-harmonic initialization.
    pub presolve_sweeps: usize,
    pub levels: Vec<LevelReport>,
    /// Sup-norm residual of the discrete equation at the last level.
    pub final_residual: f64,
    pub residual_tolerance: f64,
    pub converged: bool,
    /// Points where a smaller ε produced a smaller value (beyond `10 · sweep_tol`).
    pub monotonicity_violations: usize,
    /// Sup-norm difference between the last two ladder levels.
    pub ladder_certificate: Option<f64>,
}

impl SolveReport {
    pub fn total_sweeps(&self) -> usize {
        self.presolve_sweeps + self.levels.iter().map(|l| l.sweeps).sum::<usize>()
    }

    pub fn final_epsilon(&self) -> Option<f64> {
        self.levels.last().map(|l| l.epsilon)
    }
}

#[inline]
fn flux_operator<T: Scalar>(s_plus: T, s_minus: T, d_plus: T, d_minus: T, delta2: T) -> T {
    let three = T::lit(3.0);
    let g2 = ((s_plus * s_plus - s_plus * s_minus + s_minus * s_minus) / three).max(delta2);
    g2 * T::lit(2.0) / (d_plus + d_minus) * (s_plus + s_minus)
}

/// Extreme difference quotients `(S⁺, d⁺, S⁻, d⁻)` around center value `v`.
#[inline]
fn extremes<T: Scalar>(v: T, stencil: &[(usize, T)], u: &[T]) -> (T, T, T, T) {
    let mut sp = T::neg_infinity();
    let mut dp = T::one();
    let mut sm = T::infinity();
    let mut dm = T::one();
    for &(j, d) in stencil {
        let q = (u[j] - v) / d;
        if q > sp {
            sp = q;
            dp = d;
        }
        if q < sm {
            sm = q;
            dm = d;
        }
    }
    (sp, dp, sm, dm)
}

/// Operator value and its derivative in the center value.
#[inline]
fn stencil_operator_with_slope<T: Scalar>(
    v: T,
    stencil: &[(usize, T)],
    u: &[T],
    delta2: T,
) -> (T, T) {
    let (sp, dp, sm, dm) = extremes(v, stencil, u);
    let g2 = (sp * sp - sp * sm + sm * sm) / T::lit(3.0);
    let c = T::lit(2.0) / (dp + dm);
    if g2 > delta2 {
        (g2 * c * (sp + sm), -c * (sp * sp / dp + sm * sm / dm))
    } else {
        (
            delta2 * c * (sp + sm),
            -c * delta2 * (T::one() / dp + T::one() / dm),
        )
    }
}

#[inline]
fn stencil_operator<T: Scalar>(v: T, stencil: &[(usize, T)], u: &[T], delta2: T) -> T {
    let (sp, dp, sm, dm) = extremes(v, stencil, u);
    flux_operator(sp, sm, dp, dm, delta2)
}

/// Discrete `Δ∞u` at grid index `idx`.
pub fn discrete_inf_laplacian<T: Scalar>(field: &Field<T>, idx: usize, delta: T) -> T {
    let stencil = field.grid().neighbor_stencil(idx);
    stencil_operator(field.get(idx), &stencil, field.values(), delta * delta)
}

/// Expands `[lo, hi]` by doubling until a decreasing `g` changes sign across it.
fn bracket_decreasing<T: Scalar>(
    g: &impl Fn(T) -> T,
    mut lo: T,
    mut hi: T,
) -> Result<(T, T, T, T)> {
    let mut doublings = 0;
    let mut g_lo = g(lo);
    while g_lo < T::zero() {
        if doublings == MAX_DOUBLINGS {
            return Err(bracket_error(lo, hi, g_lo, g(hi)));
        }
        lo = lo - (hi - lo);
        g_lo = g(lo);
        doublings += 1;
    }
    let mut g_hi = g(hi);
    while g_hi > T::zero() {
        if doublings == MAX_DOUBLINGS {
            return Err(bracket_error(lo, hi, g_lo, g_hi));
        }
        hi = hi + (hi - lo);
        g_hi = g(hi);
        doublings += 1;
    }
    if !(g_lo.is_finite() && g_hi.is_finite()) {
        return Err(bracket_error(lo, hi, g_lo, g_hi));
    }
    Ok((lo, hi, g_lo, g_hi))
}

/// Root of a decreasing function `g`, bracketed from `[lo, hi]` by doubling and then bisected.
fn bisect_decreasing<T: Scalar>(g: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut lo, mut hi, _, _) = bracket_decreasing(&g, lo, hi)?;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// Same root as [`bisect_decreasing`], located by Newton steps from `start` inside the bracket.
///
/// `g` returns the value and derivative. Any step that leaves the current bracket, or fails to
/// halve it twice in a row, is replaced by a bisection step, so the bracket still shrinks to
/// `tol`.
fn newton_decreasing<T: Scalar>(
    g: impl Fn(T) -> (T, T),
    start: T,
    lo: T,
    hi: T,
    tol: T,
) -> Result<T> {
    let value = |x: T| g(x).0;
    let (mut lo, mut hi, _, _) = bracket_decreasing(&value, lo, hi)?;
    let half = T::lit(0.5);
    let mut x = if start > lo && start < hi {
        start
    } else {
        (lo + hi) * half
    };
    let mut slow = 0u8;
    for _ in 0..MAX_BISECTIONS {
        let width = hi - lo;
        let (gx, dg) = g(x);
        if gx > T::zero() {
            lo = x;
        } else if gx < T::zero() {
            hi = x;
        } else {
            return Ok(x);
        }
        if hi - lo > width * half {
            slow += 1;
        } else {
            slow = 0;
        }
        let step = gx / dg;
        let mut next = x - step;
        if slow >= 2 || !(next > lo && next < hi) {
            slow = 0;
            next = (lo + hi) * half;
        } else if step.abs() <= tol {
            return Ok(next);
        }
        if hi - lo <= tol || next <= lo || next >= hi {
            return Ok((lo + hi) * half);
        }
        x = next;
    }
    Ok((lo + hi) * half)
}

fn bracket_error<T: Scalar>(lo: T, hi: T, g_lo: T, g_hi: T) -> Error {
    Error::Numerical(format!(
        "local solve: no sign change after {MAX_DOUBLINGS} bracket doublings \
         (bracket [{lo}, {hi}], residuals {g_lo} and {g_hi})"
    ))
}

/// Scalar Gauss–Seidel step with frozen gradient `g_frozen`: the root `u*` of
/// `G² · 2/(d⁺+d⁻) · ((M-u)/d⁺ + (m_val-u)/d⁻) = rhs_at_u(u)`.
pub fn local_update<T: Scalar>(
    max_val: T,
    min_val: T,
    d_plus: T,
    d_minus: T,
    g_frozen: T,
    rhs_at_u: impl Fn(T) -> T,
    bisection_tol: T,
) -> Result<T> {
    let g2 = g_frozen * g_frozen;
    let c = T::lit(2.0) / (d_plus + d_minus);
    let lhs = |u: T| g2 * c * ((max_val - u) / d_plus + (min_val - u) / d_minus);
    let lo = min_val - T::one();
    let hi = (max_val + min_val) / T::lit(2.0) + T::one();
    bisect_decreasing(|u| lhs(u) - rhs_at_u(u), lo, hi, bisection_tol)
}

/// A right-hand side and a grid with stencils and weights precomputed for repeated sweeps.
pub struct DiscreteProblem<T: Scalar> {
    grid: Arc<Grid<T>>,
    interior: Vec<usize>,
    stencil_start: Vec<usize>,
    stencil: Vec<(usize, T)>,
    weights: Vec<T>,
    scale: T,
    m: T,
    epsilon: T,
    delta2: T,
    relaxation: T,
    bisection_tol: T,
}

impl<T: Scalar> DiscreteProblem<T> {
    pub fn new(grid: Arc<Grid<T>>, rhs: &RightHandSide<T>, config: &SolverConfig<T>) -> Self {
        let interior = grid.interior().to_vec();
        let mut stencil_start = Vec::with_capacity(interior.len() + 1);
        let mut stencil = Vec::new();
        let mut weights = Vec::with_capacity(interior.len());
        let h = grid.spacing();
        for &i in &interior {
            stencil_start.push(stencil.len());
            stencil.extend(grid.neighbor_stencil(i));
            let x = grid.point(i);
            weights.push(match config.weight_sampling {
                WeightSampling::Point => rhs.weight(&x),
                WeightSampling::CellAverage => rhs.cell_weight(&x, h),
            });
        }
        stencil_start.push(stencil.len());
        DiscreteProblem {
            grid,
            interior,
            stencil_start,
            stencil,
            weights,
            scale: rhs.scale,
            m: rhs.params.m(),
            epsilon: rhs.epsilon,
            delta2: config.gradient_floor * config.gradient_floor,
            relaxation: config.relaxation,
            bisection_tol: config.bisection_tol,
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// The infinity-harmonic problem on the same grid.
    fn harmonic(&self) -> Self {
        DiscreteProblem {
            grid: self.grid.clone(),
            interior: self.interior.clone(),
            stencil_start: self.stencil_start.clone(),
            stencil: self.stencil.clone(),
            weights: vec![T::zero(); self.weights.len()],
            scale: T::zero(),
            m: T::zero(),
            epsilon: T::zero(),
            delta2: self.delta2,
            relaxation: self.relaxation,
            bisection_tol: self.bisection_tol,
        }
    }

    #[inline]
    fn rhs_at(&self, k: usize, v: T) -> T {
        let w = self.weights[k];
        if w == T::zero() || self.scale == T::zero() {
            self.epsilon
        } else {
            self.scale * w * absorption(self.m, v) + self.epsilon
        }
    }

    #[inline]
    fn rhs_slope(&self, k: usize, v: T) -> T {
        let w = self.weights[k];
        if w == T::zero() || self.scale == T::zero() || self.m == T::zero() || v <= T::zero() {
            T::zero()
        } else if self.m == T::one() {
            self.scale * w
        } else {
            self.scale * w * self.m * v.powf(self.m - T::one())
        }
    }

    #[inline]
    fn local_stencil(&self, k: usize) -> &[(usize, T)] {
        &self.stencil[self.stencil_start[k]..self.stencil_start[k + 1]]
    }

    fn local_solve(&self, k: usize, u: &[T]) -> Result<T> {
        let st = self.local_stencil(k);
        let mut hi_val = T::neg_infinity();
        let mut lo_val = T::infinity();
        for &(j, _) in st {
            hi_val = hi_val.max(u[j]);
            lo_val = lo_val.min(u[j]);
        }
        let g = |v: T| {
            let (op, slope) = stencil_operator_with_slope(v, st, u, self.delta2);
            (op - self.rhs_at(k, v), slope - self.rhs_slope(k, v))
        };
        let lo = lo_val - T::one();
        let hi = (hi_val + lo_val) / T::lit(2.0) + T::one();
        newton_decreasing(g, u[self.interior[k]], lo, hi, self.bisection_tol)
    }

    /// One in-place relaxed Gauss–Seidel pass in index order; returns the sup-norm change.
    pub fn sweep(&self, u: &mut [T]) -> Result<T> {
        self.sweep_relaxed(u, self.relaxation)
    }

    fn sweep_relaxed(&self, u: &mut [T], relaxation: T) -> Result<T> {
        let mut change = T::zero();
        for k in 0..self.interior.len() {
            let i = self.interior[k];
            let target = self.local_solve(k, u)?;
            let old = u[i];
            let new = old + relaxation * (target - old);
            if !new.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite value at grid index {i} during a sweep"
                )));
            }
            change = change.max((new - old).abs());
            u[i] = new;
        }
        Ok(change)
    }

    /// Discrete residual `L(u) - f(x, u)` at every grid point (0 on the boundary).
    pub fn residual(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); u.len()];
        for (k, &i) in self.interior.iter().enumerate() {
            out[i] = stencil_operator(u[i], self.local_stencil(k), u, self.delta2)
                - self.rhs_at(k, u[i]);
        }
        out
    }

    /// Largest local Lipschitz constant of the discrete operator in the center value.
    fn operator_slope(&self, u: &[T]) -> T {
        self.interior
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                -stencil_operator_with_slope(u[i], self.local_stencil(k), u, self.delta2).1
            })
            .fold(T::zero(), T::max)
    }

    /// Runs sweeps until the change drops to `tol`.
    ///
    /// Over-relaxation can lock into a cycle on the strongly nonuniform linearizations near a
    /// dead core. When the smallest change seen fails to halve over a window of sweeps, the
    /// factor is pulled halfway back towards 1.
    fn iterate(&self, u: &mut [T], tol: T, max_sweeps: usize) -> Result<Iteration<T>> {
        let mut omega = self.relaxation;
        let mut last = T::infinity();
        let mut best = T::infinity();
        let mut window_best = T::infinity();
        for s in 1..=max_sweeps {
            last = self.sweep_relaxed(u, omega)?;
            if last <= tol {
                return Ok(Iteration {
                    sweeps: s,
                    change: last,
                    converged: true,
                    relaxation: omega,
                });
            }
            best = best.min(last);
            if s % RELAXATION_WINDOW == 0 {
                if omega > T::one() && !(best < window_best * T::lit(0.5)) {
                    omega = T::one() + (omega - T::one()) * T::lit(0.5);
                }
                window_best = best;
            }
        }
        Ok(Iteration {
            sweeps: max_sweeps,
            change: last,
            converged: false,
            relaxation: omega,
        })
    }
}

/// One Gauss–Seidel pass of `config` over `field` for right-hand side `rhs`.
pub fn gauss_seidel_sweep<T: Scalar>(
    field: &mut Field<T>,
    rhs: &RightHandSide<T>,
    config: &SolverConfig<T>,
) -> Result<T> {
    let problem = DiscreteProblem::new(field.grid().clone(), rhs, config);
    problem.sweep(field.values_mut())
}

/// Solves the Dirichlet problem with boundary data taken from the boundary entries of `boundary`.
///
/// With `rhs.epsilon == 0` the ε ladder of `config` is run, each level warm-started from the
/// previous one; otherwise a single solve at `rhs.epsilon` runs. The interior starts from the
/// discrete infinity-harmonic extension of the boundary data.
pub fn solve_dirichlet<T: Scalar>(
    grid: &Arc<Grid<T>>,
    rhs: &RightHandSide<T>,
    boundary: &Field<T>,
    config: &SolverConfig<T>,
) -> Result<(Field<T>, SolveReport)> {
    config.validate()?;
    rhs.validate()?;
    if boundary.values().len() != grid.len() {
        return Err(Error::Config(format!(
            "boundary field has {} values for a grid of {} points",
            boundary.values().len(),
            grid.len()
        )));
    }
    let base = DiscreteProblem::new(grid.clone(), rhs, config);
    let tol = config.sweep_tol;
    let level_tol = tol * T::lit(10.0);
    let mut report = SolveReport::default();

    let mut u = boundary.values().to_vec();
    let start = boundary.boundary_max();
    for &i in grid.interior() {
        u[i] = start;
    }

    let pre = base.harmonic().iterate(&mut u, tol, config.max_sweeps)?;
    report.presolve_sweeps = pre.sweeps;
    if !pre.converged {
        return Err(non_convergence(0, 0.0, pre.sweeps, pre.change, report));
    }

    let epsilons = if rhs.epsilon > T::zero() {
        vec![rhs.epsilon]
    } else {
        config.epsilon_schedule.levels()
    };
    let mut previous: Option<Vec<T>> = None;
    let mut problem = base;
    for (level, &eps) in epsilons.iter().enumerate() {
        problem = problem.with_epsilon(eps);
        let it = problem.iterate(&mut u, tol, config.max_sweeps)?;
        report.levels.push(LevelReport {
            epsilon: eps.to_f64_lossy(),
            sweeps: it.sweeps,
            final_change: it.change.to_f64_lossy(),
            converged: it.converged,
            relaxation: it.relaxation.to_f64_lossy(),
        });
        if !it.converged {
            return Err(non_convergence(
                level + 1,
                eps.to_f64_lossy(),
                it.sweeps,
                it.change,
                report,
            ));
        }
        if let Some(prev) = &previous {
            report.monotonicity_violations += grid
                .interior()
                .iter()
                .filter(|&&i| u[i] < prev[i] - level_tol)
                .count();
            let diff = grid
                .interior()
                .iter()
                .map(|&i| (u[i] - prev[i]).abs())
                .fold(T::zero(), T::max);
            report.ladder_certificate = Some(diff.to_f64_lossy());
        }
        previous = Some(u.clone());
    }

    let residual = problem
        .residual(&u)
        .into_iter()
        .fold(T::zero(), |acc, r| acc.max(r.abs()));
    let slope = problem.operator_slope(&u);
    report.final_residual = residual.to_f64_lossy();
    report.residual_tolerance = (level_tol * (T::one() + T::lit(3.0) * slope)).to_f64_lossy();
    report.converged = report.final_residual <= report.residual_tolerance;
    let field = Field::new(grid.clone(), u)?;
    Ok((field, report))
}

fn non_convergence<T: Scalar>(
    level: usize,
    epsilon: f64,
    sweeps: usize,
    change: T,
    report: SolveReport,
) -> Error {
    Error::NonConvergence {
        level,
        epsilon,
        sweeps,
        last_change: change.to_f64_lossy(),
        partial: Box::new(report),
    }
}

/// `Δ∞u - f(x, u)` at interior points with point-sampled weights; 0 on the boundary.
pub fn residual_field<T: Scalar>(
    field: &Field<T>,
    rhs: &RightHandSide<T>,
    delta: T,
) -> Result<Field<T>> {
    residual_field_sampled(field, rhs, delta, WeightSampling::Point)
}

pub fn residual_field_sampled<T: Scalar>(
    field: &Field<T>,
    rhs: &RightHandSide<T>,
    delta: T,
    sampling: WeightSampling,
) -> Result<Field<T>> {
    let config = SolverConfig {
        gradient_floor: delta,
        weight_sampling: sampling,
        ..SolverConfig::default()
    };
    let problem = DiscreteProblem::new(field.grid().clone(), rhs, &config);
    let values = problem.residual(field.values());
    Field::new(field.grid().clone(), values)
}
