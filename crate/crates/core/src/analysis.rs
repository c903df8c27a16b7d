//! Free-boundary analytics on solved or sampled fields: plateaus, growth exponents,
//! non-degeneracy, gradient growth, Harnack, positive density and Liouville rescaling.

use std::sync::Arc;

use crate::domain::{shell_argmax, Field, Grid};
use crate::error::{Error, Result};
use crate::problem::AbsorptionParams;
use crate::scalar::{dist, Point, Scalar};

/// `3^(3/4) / 4`, the constant in the Harnack inequality.
pub fn harnack_sigma<T: Scalar>() -> T {
    T::lit(3.0).powf(T::lit(0.75)) / T::lit(4.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlateauReport<T> {
    /// Points with `u <= tol`.
    pub plateau: Vec<usize>,
    /// Plateau points with a lattice neighbor where `u > tol`.
    pub free_boundary: Vec<usize>,
    /// Largest distance from the anchor to a plateau point; `None` for an empty plateau.
    pub radius: Option<T>,
}

pub fn detect_plateau<T: Scalar>(field: &Field<T>, tol: T, anchor: &Point<T>) -> PlateauReport<T> {
    let grid = field.grid();
    let u = field.values();
    let plateau: Vec<usize> = (0..grid.len()).filter(|&k| u[k] <= tol).collect();
    let free_boundary = plateau
        .iter()
        .copied()
        .filter(|&k| grid.neighbors(k).iter().any(|&(j, _)| u[j] > tol))
        .collect();
    let radius = plateau
        .iter()
        .map(|&k| dist(&grid.point(k), anchor))
        .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |a| a.max(d))));
    PlateauReport {
        plateau,
        free_boundary,
        radius,
    }
}

/// Least-squares line through `(log r, log sup)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub radii: Vec<T>,
    pub sup_values: Vec<T>,
}

/// Fits `values ≈ exp(intercept) · radii^slope`.
pub fn fit_power_law<T: Scalar>(radii: &[T], values: &[T]) -> Result<ExponentFit<T>> {
    if radii.len() != values.len() {
        return Err(Error::DegenerateData(
            "radii and values differ in length".into(),
        ));
    }
    if radii.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "a power-law fit needs at least two distinct radii, got {}",
            radii.len()
        )));
    }
    if let Some((r, v)) = radii
        .iter()
        .zip(values)
        .find(|(r, v)| !(**r > T::zero() && **v > T::zero()))
    {
        return Err(Error::DegenerateData(format!(
            "non-positive value {v} at radius {r}; the window reaches into the plateau"
        )));
    }
    let n = T::from_usize_lossy(radii.len());
    let xs: Vec<T> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<T> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (x, y) in xs.iter().zip(&ys) {
        sxx = sxx + (*x - mx) * (*x - mx);
        sxy = sxy + (*x - mx) * (*y - my);
        syy = syy + (*y - my) * (*y - my);
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateData("all radii coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == T::zero() {
        T::one()
    } else {
        (sxy * sxy / (sxx * syy)).min(T::one())
    };
    Ok(ExponentFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        radii: radii.to_vec(),
        sup_values: values.to_vec(),
    })
}

/// Measures the growth exponent of `sup_{B_r(x0)} u` over `n` geometric radii in
/// `[r_min, r_max]`.
///
/// Each sup is paired with the effective radius of its lattice ball (the largest distance from
/// `x0` to a grid point inside it), and repeated effective radii are merged.
pub fn fit_growth_exponent<T: Scalar>(
    field: &Field<T>,
    x0: &Point<T>,
    r_min: T,
    r_max: T,
    n: usize,
) -> Result<ExponentFit<T>> {
    let grid = field.grid();
    let h = grid.spacing();
    if n < 3 {
        return Err(Error::Config(format!(
            "exponent fit needs n >= 3 radii, got {n}"
        )));
    }
    if !(r_min >= T::lit(3.0) * h * (T::one() - T::lit(1e-9)) && r_max > r_min) {
        return Err(Error::Config(format!(
            "fit window [{r_min}, {r_max}] must satisfy 3h <= r_min < r_max (h = {h})"
        )));
    }
    if !grid.spec().contains_ball(x0, r_max) {
        return Err(Error::Query(format!(
            "ball of radius {r_max} leaves the grid"
        )));
    }
    let ratio = (r_max / r_min).ln() / T::from_usize_lossy(n - 1);
    let mut radii: Vec<T> = Vec::with_capacity(n);
    let mut sups: Vec<T> = Vec::with_capacity(n);
    for k in 0..n {
        let r = r_min * (ratio * T::from_usize_lossy(k)).exp();
        let ball = grid.ball_indices(x0, r);
        if ball.is_empty() {
            return Err(Error::Query(format!(
                "ball of radius {r} contains no grid point"
            )));
        }
        let mut reff = T::zero();
        let mut sup = T::neg_infinity();
        for &i in &ball {
            reff = reff.max(dist(&grid.point(i), x0));
            sup = sup.max(field.get(i));
        }
        if !(sup > T::zero()) {
            return Err(Error::DegenerateData(format!(
                "sup over the ball of radius {r} is {sup}; the plateau fills the window"
            )));
        }
        if radii.last().is_none_or(|&last| reff > last) {
            radii.push(reff);
            sups.push(sup);
        }
    }
    fit_power_law(&radii, &sups)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NondegeneracyCheck<T> {
    /// `(r, distance of the shell maximizer, ratio)` per radius.
    pub rows: Vec<(T, T, T)>,
    pub worst_ratio: T,
}

/// Ratio of the shell supremum to `tau · r^beta` at each radius.
///
/// The shell maximizer `x*` lies within `band` of the circle; its ratio uses `|x* - x0|` as the
/// radius so lattice offsets from the circle do not bias the comparison.
pub fn check_nondegeneracy<T: Scalar>(
    field: &Field<T>,
    x0: &Point<T>,
    radii: &[T],
    params: &AbsorptionParams<T>,
    band: T,
) -> Result<NondegeneracyCheck<T>> {
    if radii.is_empty() {
        return Err(Error::Config(
            "non-degeneracy check needs at least one radius".into(),
        ));
    }
    let tau = params.tau();
    let beta = params.beta();
    let mut rows = Vec::with_capacity(radii.len());
    let mut worst = T::infinity();
    for &r in radii {
        let (idx, sup) = shell_argmax(field, x0, r, band)?;
        let d = dist(&field.grid().point(idx), x0);
        let ratio = sup / (tau * d.powf(beta));
        worst = worst.min(ratio);
        rows.push((r, d, ratio));
    }
    Ok(NondegeneracyCheck {
        rows,
        worst_ratio: worst,
    })
}

/// Centered-difference gradient magnitude, one-sided where a lattice neighbor is missing.
pub fn centered_gradient<T: Scalar>(field: &Field<T>, idx: usize) -> T {
    let grid = field.grid();
    let h = grid.spacing();
    let l = grid.lattice(idx);
    let u0 = field.get(idx);
    let mut sq = T::zero();
    for axis in 0..grid.dimension() {
        let mut step = [0i64; 2];
        step[axis] = 1;
        let fwd = grid.index_of([l[0] + step[0], l[1] + step[1]]);
        let bwd = grid.index_of([l[0] - step[0], l[1] - step[1]]);
        let g = match (fwd, bwd) {
            (Some(f), Some(b)) => (field.get(f) - field.get(b)) / (T::lit(2.0) * h),
            (Some(f), None) => (field.get(f) - u0) / h,
            (None, Some(b)) => (u0 - field.get(b)) / h,
            (None, None) => T::zero(),
        };
        sq = sq + g * g;
    }
    sq.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientRow<T> {
    pub index: usize,
    pub distance: T,
    pub gradient: T,
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientGrowth<T> {
    /// Interior points of the positivity set with distance inside the window.
    pub rows: Vec<GradientRow<T>>,
    pub max_ratio: T,
    /// Log-log slope of `|Du|` against the distance to the free boundary.
    pub fit: ExponentFit<T>,
}

/// Gradient magnitudes against distance to the discrete free boundary, for points of `{u > tol}`
/// whose distance lies in `window`.
pub fn check_gradient_growth<T: Scalar>(
    field: &Field<T>,
    plateau: &PlateauReport<T>,
    tol: T,
    params: &AbsorptionParams<T>,
    window: (T, T),
) -> Result<GradientGrowth<T>> {
    if plateau.free_boundary.is_empty() {
        return Err(Error::DegenerateData("free boundary is empty".into()));
    }
    let grid = field.grid();
    let gamma = params.gradient_exponent();
    let fb: Vec<Point<T>> = plateau
        .free_boundary
        .iter()
        .map(|&k| grid.point(k))
        .collect();
    let mut rows = Vec::new();
    for &i in grid.interior() {
        if field.get(i) <= tol {
            continue;
        }
        let x = grid.point(i);
        let d = fb.iter().map(|y| dist(&x, y)).fold(T::infinity(), T::min);
        if d < window.0 || d > window.1 {
            continue;
        }
        let g = centered_gradient(field, i);
        rows.push(GradientRow {
            index: i,
            distance: d,
            gradient: g,
            ratio: g / d.powf(gamma),
        });
    }
    rows.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });
    // One sample per distinct distance: the largest gradient observed there.
    let mut ds: Vec<T> = Vec::new();
    let mut gs: Vec<T> = Vec::new();
    for row in &rows {
        match ds.last() {
            Some(&d) if (row.distance - d).abs() <= T::lit(1e-9) * grid.spacing() => {
                let last = gs.len() - 1;
                gs[last] = gs[last].max(row.gradient);
            }
            _ => {
                ds.push(row.distance);
                gs.push(row.gradient);
            }
        }
    }
    let fit = fit_power_law(&ds, &gs)?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(T::zero(), T::max);
    Ok(GradientGrowth {
        rows,
        max_ratio,
        fit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarnackCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub pass: bool,
}

/// Both sides of `sup_B u <= 9 inf_B u + 12 σ (r⁴ sup f₊)^(1/3)` on `B = B_{2r/3}(z)`.
///
/// `rhs_sup` is the supremum of the positive part of the right-hand side over `B_{2r}(z)`.
pub fn check_harnack<T: Scalar>(
    field: &Field<T>,
    rhs_sup: T,
    z: &Point<T>,
    r: T,
    tol: T,
) -> Result<HarnackCheck<T>> {
    let grid = field.grid();
    if !grid.spec().contains_ball(z, T::lit(2.0) * r) {
        return Err(Error::Query(format!(
            "ball of radius {} around {:?} leaves the grid",
            T::lit(2.0) * r,
            z
        )));
    }
    let ball = grid.ball_indices(z, T::lit(2.0) * r / T::lit(3.0));
    if ball.is_empty() {
        return Err(Error::Query(format!(
            "Harnack ball of radius 2r/3 = {} is empty",
            T::lit(2.0) * r / T::lit(3.0)
        )));
    }
    let sup = ball
        .iter()
        .map(|&k| field.get(k))
        .fold(T::neg_infinity(), T::max);
    let inf = ball
        .iter()
        .map(|&k| field.get(k))
        .fold(T::infinity(), T::min);
    let source = (r.powi(4) * rhs_sup.max(T::zero())).cbrt();
    let rhs = T::lit(9.0) * inf + T::lit(12.0) * harnack_sigma::<T>() * source;
    Ok(HarnackCheck {
        lhs: sup,
        rhs,
        pass: sup <= rhs + tol,
    })
}

/// Fraction of grid points of `B_r(x0)` where `u > tol`.
pub fn positive_density<T: Scalar>(field: &Field<T>, x0: &Point<T>, r: T, tol: T) -> Result<T> {
    let ball = field.grid().ball_indices(x0, r);
    if ball.is_empty() {
        return Err(Error::Query(format!(
            "ball of radius {r} contains no grid point"
        )));
    }
    let positive = ball.iter().filter(|&&k| field.get(k) > tol).count();
    Ok(T::from_usize_lossy(positive) / T::from_usize_lossy(ball.len()))
}

/// Samples `u_k(x) = k^(-beta) u(k x)` on `grid`.
pub fn liouville_rescale<T: Scalar>(
    source: impl Fn(&Point<T>) -> T,
    k: T,
    params: &AbsorptionParams<T>,
    grid: Arc<Grid<T>>,
) -> Result<Field<T>> {
    if !(k > T::zero()) {
        return Err(Error::Config(format!(
            "scaling factor must be positive, got {k}"
        )));
    }
    let factor = k.powf(-params.beta());
    let values = grid
        .points()
        .iter()
        .map(|x| factor * source(&[k * x[0], k * x[1]]))
        .collect();
    Field::new(grid, values)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinProbe<T> {
    pub index: usize,
    pub point: Point<T>,
    pub value: T,
    /// `value > 0`.
    pub pass: bool,
}

/// Location and value of the interior minimum.
pub fn strong_max_principle_probe<T: Scalar>(field: &Field<T>) -> MinProbe<T> {
    let grid = field.grid();
    let mut best = grid.interior()[0];
    for &i in grid.interior() {
        if field.get(i) < field.get(best) {
            best = i;
        }
    }
    let value = field.get(best);
    MinProbe {
        index: best,
        point: grid.point(best),
        value,
        pass: value > T::zero(),
    }
}
