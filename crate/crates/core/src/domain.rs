//! Discretized geometry: uniform lattices restricted to intervals, disks and annuli.
//!
//! Points are indexed lexicographically by their integer lattice coordinates, so rebuilding a
//! grid from the same [`GridSpec`] reproduces the same ordering bit for bit. A point is
//! *boundary* when one of its lattice neighbors is missing or when it lies within one spacing of
//! a bounding circle; every other point is *interior* and carries a complete stencil.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{dist, Point, Scalar};

/// Geometry of a grid: a ball (or annulus) of the lattice `center + spacing * Z^dimension`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub dimension: usize,
    pub center: Point<T>,
    pub outer_radius: T,
    /// Zero for a full ball or interval.
    pub inner_radius: T,
    pub spacing: T,
}

impl<T: Scalar> GridSpec<T> {
    pub fn interval(center: T, radius: T, spacing: T) -> Self {
        GridSpec {
            dimension: 1,
            center: [center, T::zero()],
            outer_radius: radius,
            inner_radius: T::zero(),
            spacing,
        }
    }

    pub fn disk(center: Point<T>, radius: T, spacing: T) -> Self {
        GridSpec {
            dimension: 2,
            center,
            outer_radius: radius,
            inner_radius: T::zero(),
            spacing,
        }
    }

    pub fn with_inner_radius(mut self, inner_radius: T) -> Self {
        self.inner_radius = inner_radius;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(Error::Config(format!(
                "dimension must be 1 or 2, got {}",
                self.dimension
            )));
        }
        let finite = self.center.iter().all(|c| c.is_finite())
            && self.outer_radius.is_finite()
            && self.inner_radius.is_finite()
            && self.spacing.is_finite();
        if !finite {
            return Err(Error::Config("grid geometry must be finite".into()));
        }
        if self.dimension == 1 && self.center[1] != T::zero() {
            return Err(Error::Config(
                "one-dimensional grids keep the second center coordinate at 0".into(),
            ));
        }
        if self.outer_radius <= T::zero() {
            return Err(Error::Config("outer_radius must be positive".into()));
        }
        if self.inner_radius < T::zero() || self.inner_radius >= self.outer_radius {
            return Err(Error::Config(
                "inner_radius must satisfy 0 <= inner_radius < outer_radius".into(),
            ));
        }
        if self.spacing <= T::zero() {
            return Err(Error::Config("spacing must be positive".into()));
        }
        if self.spacing >= self.outer_radius - self.inner_radius {
            return Err(Error::Config(
                "spacing must be smaller than outer_radius - inner_radius".into(),
            ));
        }
        Ok(())
    }

    fn tolerance(&self) -> T {
        self.spacing * T::lit(1e-9)
    }

    /// Whether the closed ball `B_r(z)` lies inside the region described by the spec.
    pub fn contains_ball(&self, z: &Point<T>, r: T) -> bool {
        let d = dist(z, &self.center);
        let tol = self.tolerance();
        if self.dimension == 1 && z[1] != T::zero() {
            return false;
        }
        if d + r > self.outer_radius + tol {
            return false;
        }
        self.inner_radius == T::zero() || d - r >= self.inner_radius - tol
    }
}

const OFFSETS_1D: [[i64; 2]; 2] = [[-1, 0], [1, 0]];
const OFFSETS_2D: [[i64; 2]; 8] = [
    [-1, -1],
    [-1, 0],
    [-1, 1],
    [0, -1],
    [0, 1],
    [1, -1],
    [1, 0],
    [1, 1],
];

#[derive(Clone, Debug)]
pub struct Grid<T> {
    spec: GridSpec<T>,
    lattice: Vec<[i64; 2]>,
    points: Vec<Point<T>>,
    interior_flags: Vec<bool>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    lookup: HashMap<[i64; 2], usize>,
}

/// Builds the grid described by `spec`.
///
/// Fails with a configuration error when the spec is invalid or no interior point survives the
/// boundary collar.
pub fn build_grid<T: Scalar>(spec: GridSpec<T>) -> Result<Grid<T>> {
    spec.validate()?;
    let h = spec.spacing;
    let tol = spec.tolerance();
    let reach = (spec.outer_radius / h)
        .ceil()
        .to_i64()
        .ok_or_else(|| Error::Config("grid too large".into()))?
        + 1;
    let j_reach = if spec.dimension == 2 { reach } else { 0 };

    let mut lattice = Vec::new();
    let mut points = Vec::new();
    for i in -reach..=reach {
        for j in -j_reach..=j_reach {
            let p = [
                spec.center[0] + h * T::from_i64(i).unwrap(),
                spec.center[1] + h * T::from_i64(j).unwrap(),
            ];
            let d = dist(&p, &spec.center);
            if d > spec.outer_radius + tol {
                continue;
            }
            if spec.inner_radius > T::zero() && d < spec.inner_radius - tol {
                continue;
            }
            lattice.push([i, j]);
            points.push(p);
        }
    }
    let lookup: HashMap<[i64; 2], usize> =
        lattice.iter().enumerate().map(|(k, l)| (*l, k)).collect();

    let offsets: &[[i64; 2]] = if spec.dimension == 1 {
        &OFFSETS_1D
    } else {
        &OFFSETS_2D
    };
    let collar = h - tol;
    let mut interior_flags = vec![false; points.len()];
    for (k, (l, p)) in lattice.iter().zip(&points).enumerate() {
        let complete = offsets
            .iter()
            .all(|o| lookup.contains_key(&[l[0] + o[0], l[1] + o[1]]));
        let d = dist(p, &spec.center);
        let near_outer = spec.outer_radius - d < collar;
        let near_inner = spec.inner_radius > T::zero() && d - spec.inner_radius < collar;
        interior_flags[k] = complete && !near_outer && !near_inner;
    }
    let interior: Vec<usize> = (0..points.len()).filter(|&k| interior_flags[k]).collect();
    let boundary: Vec<usize> = (0..points.len()).filter(|&k| !interior_flags[k]).collect();
    if interior.is_empty() {
        return Err(Error::Config(
            "grid has no interior points; refine the spacing or enlarge the region".into(),
        ));
    }
    Ok(Grid {
        spec,
        lattice,
        points,
        interior_flags,
        interior,
        boundary,
        lookup,
    })
}

impl<T: Scalar> Grid<T> {
    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn spacing(&self) -> T {
        self.spec.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> Point<T> {
        self.points[idx]
    }

    pub fn lattice(&self, idx: usize) -> [i64; 2] {
        self.lattice[idx]
    }

    pub fn index_of(&self, lattice: [i64; 2]) -> Option<usize> {
        self.lookup.get(&lattice).copied()
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.interior_flags[idx]
    }

    fn offsets(&self) -> &'static [[i64; 2]] {
        if self.spec.dimension == 1 {
            &OFFSETS_1D
        } else {
            &OFFSETS_2D
        }
    }

    /// Lattice neighbors of any point that exist in the grid, with their Euclidean distances.
    pub fn neighbors(&self, idx: usize) -> Vec<(usize, T)> {
        let l = self.lattice[idx];
        let h = self.spec.spacing;
        self.offsets()
            .iter()
            .filter_map(|o| {
                self.index_of([l[0] + o[0], l[1] + o[1]]).map(|k| {
                    let d = if o[0] != 0 && o[1] != 0 {
                        h * T::SQRT_2()
                    } else {
                        h
                    };
                    (k, d)
                })
            })
            .collect()
    }

    /// Full stencil of an interior point: two axis neighbors in 1-D, the eight surrounding
    /// lattice points in 2-D.
    pub fn neighbor_stencil(&self, idx: usize) -> Vec<(usize, T)> {
        debug_assert!(
            self.is_interior(idx),
            "stencil requested at a boundary point"
        );
        self.neighbors(idx)
    }

    /// Indices of grid points inside the closed ball `B_r(center)`.
    pub fn ball_indices(&self, center: &Point<T>, r: T) -> Vec<usize> {
        let lim = r + self.spec.tolerance();
        (0..self.points.len())
            .filter(|&k| dist(&self.points[k], center) <= lim)
            .collect()
    }

    /// Indices of grid points with `| |x - center| - r | <= band`.
    pub fn shell_indices(&self, center: &Point<T>, r: T, band: T) -> Vec<usize> {
        let lim = band + self.spec.tolerance();
        (0..self.points.len())
            .filter(|&k| (dist(&self.points[k], center) - r).abs() <= lim)
            .collect()
    }

    /// Index of the grid point closest to `x` (lowest index on ties).
    pub fn nearest(&self, x: &Point<T>) -> usize {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (k, p) in self.points.iter().enumerate() {
            let d = dist(p, x);
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }
}

/// One real value per grid point.
#[derive(Clone, Debug)]
pub struct Field<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite field value at index {k}"
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn constant(grid: Arc<Grid<T>>, c: T) -> Self {
        let values = vec![c; grid.len()];
        Field { grid, values }
    }

    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(&Point<T>) -> T) -> Self {
        let values = grid.points().iter().map(f).collect();
        Field { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn get(&self, idx: usize) -> T {
        self.values[idx]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest value over interior points (negative infinity for an empty set).
    pub fn interior_max(&self) -> T {
        self.grid
            .interior()
            .iter()
            .map(|&k| self.values[k])
            .fold(T::neg_infinity(), T::max)
    }

    pub fn interior_min(&self) -> T {
        self.grid
            .interior()
            .iter()
            .map(|&k| self.values[k])
            .fold(T::infinity(), T::min)
    }

    pub fn boundary_max(&self) -> T {
        self.grid
            .boundary()
            .iter()
            .map(|&k| self.values[k])
            .fold(T::neg_infinity(), T::max)
    }

    pub fn boundary_min(&self) -> T {
        self.grid
            .boundary()
            .iter()
            .map(|&k| self.values[k])
            .fold(T::infinity(), T::min)
    }

    /// Sup-norm distance to another field on the same grid.
    pub fn max_abs_diff(&self, other: &Field<T>) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }
}

fn argmax<T: Scalar>(field: &Field<T>, indices: &[usize]) -> Option<(usize, T)> {
    indices
        .iter()
        .map(|&k| (k, field.values[k]))
        .fold(None, |best, (k, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((k, v)),
        })
}

/// Maximum of the field over grid points within `band` of the circle `|x - center| = r`.
pub fn sup_on_shell<T: Scalar>(field: &Field<T>, center: &Point<T>, r: T, band: T) -> Result<T> {
    shell_argmax(field, center, r, band).map(|(_, v)| v)
}

/// Like [`sup_on_shell`], also returning the index of the maximizing point.
pub fn shell_argmax<T: Scalar>(
    field: &Field<T>,
    center: &Point<T>,
    r: T,
    band: T,
) -> Result<(usize, T)> {
    let idx = field.grid.shell_indices(center, r, band);
    argmax(field, &idx).ok_or_else(|| {
        Error::Query(format!(
            "no grid point within band {band} of the circle of radius {r}"
        ))
    })
}

/// Maximum of the field over the closed ball `B_r(center)`.
pub fn sup_on_ball<T: Scalar>(field: &Field<T>, center: &Point<T>, r: T) -> Result<T> {
    ball_argmax(field, center, r).map(|(_, v)| v)
}

pub fn ball_argmax<T: Scalar>(field: &Field<T>, center: &Point<T>, r: T) -> Result<(usize, T)> {
    let idx = field.grid.ball_indices(center, r);
    argmax(field, &idx)
        .ok_or_else(|| Error::Query(format!("ball of radius {r} contains no grid point")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(grid: &Grid<f64>, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&k| grid.point(k)[0]).collect()
    }

    #[test]
    fn interval_points_and_interior() {
        let g = build_grid(GridSpec::interval(0.0, 1.0, 0.5)).unwrap();
        assert_eq!(
            coords(&g, &(0..g.len()).collect::<Vec<_>>()),
            vec![-1.0, -0.5, 0.0, 0.5, 1.0]
        );
        assert_eq!(coords(&g, g.interior()), vec![-0.5, 0.0, 0.5]);
        assert_eq!(coords(&g, g.boundary()), vec![-1.0, 1.0]);
    }

    #[test]
    fn disk_enumeration() {
        let g = build_grid(GridSpec::disk([0.0, 0.0], 1.0, 0.5)).unwrap();
        assert_eq!(g.len(), 13);
        // (+-0.5, 0) and (0, +-0.5) miss the corner neighbors (1, +-0.5), so only the origin
        // keeps a complete 8-point stencil.
        assert_eq!(g.interior().len(), 1);
        assert_eq!(g.point(g.interior()[0]), [0.0, 0.0]);
        assert_eq!(g.boundary().len(), 12);
        let collar = g
            .boundary()
            .iter()
            .filter(|&&k| 1.0 - super::dist(&g.point(k), &[0.0, 0.0]) < 0.5)
            .count();
        assert_eq!(collar, 8);
    }

    #[test]
    fn annulus_without_interior_is_rejected() {
        let spec = GridSpec::interval(0.0, 1.0, 0.5).with_inner_radius(0.4);
        assert!(matches!(build_grid(spec), Err(Error::Config(_))));
    }

    #[test]
    fn annulus_has_two_segments() {
        let g =
            build_grid(GridSpec::<f64>::interval(0.0, 2.0, 0.25).with_inner_radius(0.5)).unwrap();
        assert!(g.points().iter().all(|p| p[0].abs() >= 0.5));
        let inner: Vec<f64> = coords(&g, g.boundary())
            .into_iter()
            .filter(|x| x.abs() < 1.0)
            .collect();
        assert_eq!(inner, vec![-0.5, 0.5]);
        assert_eq!(coords(&g, g.interior()).len(), 10);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_grid(GridSpec::interval(0.0, 1.0, 1.0)).is_err());
        assert!(build_grid(GridSpec::interval(0.0, -1.0, 0.1)).is_err());
        let mut spec = GridSpec::disk([0.0, 0.0], 1.0, 0.1);
        spec.dimension = 3;
        assert!(build_grid(spec).is_err());
    }

    #[test]
    fn stencils() {
        let g = build_grid(GridSpec::interval(0.0, 1.0, 0.5)).unwrap();
        let origin = g.nearest(&[0.0, 0.0]);
        let s = g.neighbor_stencil(origin);
        let got: Vec<(f64, f64)> = s.iter().map(|&(k, d)| (g.point(k)[0], d)).collect();
        assert_eq!(got, vec![(-0.5, 0.5), (0.5, 0.5)]);

        let g = build_grid(GridSpec::disk([0.0, 0.0], 3.0, 1.0)).unwrap();
        let s = g.neighbor_stencil(g.nearest(&[0.0, 0.0]));
        assert_eq!(s.len(), 8);
        assert_eq!(s.iter().filter(|(_, d)| *d == 1.0).count(), 4);
        assert_eq!(
            s.iter()
                .filter(|(_, d)| (*d - 2f64.sqrt()).abs() < 1e-15)
                .count(),
            4
        );
        for &k in g.interior() {
            let s = g.neighbor_stencil(k);
            assert_eq!(s.len(), 8);
            for (n, d) in s {
                assert!((super::dist(&g.point(k), &g.point(n)) - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shell_queries() {
        let g = Arc::new(build_grid(GridSpec::<f64>::disk([0.0, 0.0], 1.0, 0.25)).unwrap());
        let c = Field::constant(g.clone(), 3.5);
        assert_eq!(sup_on_shell(&c, &[0.0, 0.0], 0.5, 0.25).unwrap(), 3.5);

        let f = Field::from_fn(g.clone(), |p| {
            p[0].abs().powf(4.0 / 3.0) - p[1].abs().powf(4.0 / 3.0)
        });
        let v = sup_on_shell(&f, &[0.0, 0.0], 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-14);

        let tau = (81.0f64 / 64.0).powf(1.0 / 3.0);
        let beta = 4.0 / 3.0;
        let psi = Field::from_fn(g.clone(), |p| tau * p[0].hypot(p[1]).powf(beta));
        let v = sup_on_shell(&psi, &[0.0, 0.0], 0.5, 1e-12).unwrap();
        assert!((v - tau * 0.5f64.powf(beta)).abs() < 1e-14);

        assert!(matches!(
            sup_on_shell(&psi, &[0.0, 0.0], 0.6, 1e-3),
            Err(Error::Query(_))
        ));
        assert!(matches!(
            sup_on_ball(&psi, &[5.0, 5.0], 0.1),
            Err(Error::Query(_))
        ));
    }

    #[test]
    fn contains_ball() {
        let spec = GridSpec::disk([0.0, 0.0], 1.0, 0.1);
        assert!(spec.contains_ball(&[0.5, 0.0], 0.5));
        assert!(!spec.contains_ball(&[0.5, 0.0], 0.6));
        let ann = spec.clone().with_inner_radius(0.3);
        assert!(!ann.contains_ball(&[0.0, 0.0], 0.1));
        assert!(ann.contains_ball(&[0.6, 0.0], 0.3));
    }
}
