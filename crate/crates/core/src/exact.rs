//! Closed-form solutions used as oracles.
//!
//! Apart from the Aronsson family, every profile has the form `tau · s₊^beta` for a "radial
//! coordinate" `s` with `|Ds| = 1` and `D²s · Ds = 0`, so its infinity-Laplacian is
//! `φ'(s)² φ''(s)` with `φ(s) = tau · s^beta`.

use crate::error::{Error, Result};
use crate::problem::{absorption, AbsorptionParams, RightHandSide};
use crate::scalar::{dist, Point, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind<T> {
    /// `tau |x - x0|^beta`
    Radial,
    /// `tau |x_i - x0_i|^beta`
    OneDim { axis: usize },
    /// `tau ((|x - x0| - r)₊)^beta` with plateau radius `r = R - (c/tau)^(1/beta)`.
    DeadCore { outer_radius: T, boundary_value: T },
    /// `Σ a_i |x_i - x0_i|^(4/3)` with `Σ a_i³ = 0`; infinity-harmonic off the axes.
    Aronsson { coefficients: Vec<T> },
    /// `tau(0, alpha) ((|x - x0| - r0)₊)^((4+alpha)/3)`, solving `Δ∞u = dist(x, B_r0)^alpha`.
    DistanceWeight { shift: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactProfile<T> {
    pub kind: ProfileKind<T>,
    pub params: AbsorptionParams<T>,
    pub anchor: Point<T>,
}

impl<T: Scalar> ExactProfile<T> {
    pub fn radial(params: AbsorptionParams<T>) -> Self {
        ExactProfile {
            kind: ProfileKind::Radial,
            params,
            anchor: [T::zero(), T::zero()],
        }
    }

    pub fn one_dim(params: AbsorptionParams<T>, axis: usize) -> Result<Self> {
        if axis > 1 {
            return Err(Error::Config(format!("axis must be 0 or 1, got {axis}")));
        }
        Ok(ExactProfile {
            kind: ProfileKind::OneDim { axis },
            params,
            anchor: [T::zero(), T::zero()],
        })
    }

    /// Dead-core profile on `B_R(x0)` with boundary value `c`; requires `R > (c/tau)^(1/beta)`.
    pub fn dead_core(
        params: AbsorptionParams<T>,
        outer_radius: T,
        boundary_value: T,
    ) -> Result<Self> {
        if !(boundary_value > T::zero()) {
            return Err(Error::Config(
                "dead-core boundary value must be positive".into(),
            ));
        }
        let detachment = detachment_distance(&params, boundary_value);
        if !(outer_radius > detachment) {
            return Err(Error::NoDeadCore {
                outer_radius: outer_radius.to_f64_lossy(),
                detachment: detachment.to_f64_lossy(),
            });
        }
        Ok(ExactProfile {
            kind: ProfileKind::DeadCore {
                outer_radius,
                boundary_value,
            },
            params,
            anchor: [T::zero(), T::zero()],
        })
    }

    pub fn aronsson(coefficients: Vec<T>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.len() > 2 {
            return Err(Error::Config(
                "Aronsson profile takes one or two coefficients".into(),
            ));
        }
        let cubes = coefficients
            .iter()
            .fold(T::zero(), |acc, a| acc + a.powi(3));
        if cubes.abs() > T::lit(1e-12) {
            return Err(Error::Config(format!(
                "Aronsson coefficients must have vanishing sum of cubes, got {cubes}"
            )));
        }
        Ok(ExactProfile {
            kind: ProfileKind::Aronsson { coefficients },
            params: AbsorptionParams::new(T::zero(), T::zero())?,
            anchor: [T::zero(), T::zero()],
        })
    }

    pub fn distance_weight(alpha: T, shift: T) -> Result<Self> {
        if !(shift >= T::zero()) {
            return Err(Error::Config("shift must be nonnegative".into()));
        }
        Ok(ExactProfile {
            kind: ProfileKind::DistanceWeight { shift },
            params: AbsorptionParams::new(alpha, T::zero())?,
            anchor: [T::zero(), T::zero()],
        })
    }

    pub fn with_anchor(mut self, anchor: Point<T>) -> Self {
        self.anchor = anchor;
        self
    }

    /// Growth exponent of the profile away from its non-smooth set.
    pub fn beta(&self) -> T {
        match self.kind {
            ProfileKind::Aronsson { .. } => T::lit(4.0) / T::lit(3.0),
            _ => self.params.beta(),
        }
    }

    /// Signed radial coordinate `s` (not defined for the Aronsson family).
    fn radial_coordinate(&self, x: &Point<T>) -> T {
        match &self.kind {
            ProfileKind::Radial => dist(x, &self.anchor),
            ProfileKind::OneDim { axis } => (x[*axis] - self.anchor[*axis]).abs(),
            ProfileKind::DeadCore { .. } => {
                dist(x, &self.anchor) - self.plateau_radius().unwrap_or(T::zero())
            }
            ProfileKind::DistanceWeight { shift } => dist(x, &self.anchor) - *shift,
            ProfileKind::Aronsson { .. } => T::nan(),
        }
    }

    pub fn evaluate(&self, x: &Point<T>) -> T {
        match &self.kind {
            ProfileKind::Aronsson { coefficients } => {
                let e = T::lit(4.0) / T::lit(3.0);
                coefficients
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (i, a)| {
                        acc + *a * (x[i] - self.anchor[i]).abs().powf(e)
                    })
            }
            _ => {
                let s = self.radial_coordinate(x);
                if s > T::zero() {
                    self.params.tau() * s.powf(self.params.beta())
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Plateau radius `R - (c/tau)^((3-m)/(4+alpha))` of a dead-core profile.
    pub fn plateau_radius(&self) -> Result<T> {
        match &self.kind {
            ProfileKind::DeadCore {
                outer_radius,
                boundary_value,
            } => {
                let detachment = detachment_distance(&self.params, *boundary_value);
                if *outer_radius > detachment {
                    Ok(*outer_radius - detachment)
                } else {
                    Err(Error::NoDeadCore {
                        outer_radius: outer_radius.to_f64_lossy(),
                        detachment: detachment.to_f64_lossy(),
                    })
                }
            }
            _ => Err(Error::Config(
                "plateau radius is defined for dead-core profiles only".into(),
            )),
        }
    }

    /// Distance from `x` to the set where the profile fails to be smooth.
    pub fn distance_to_nonsmooth(&self, x: &Point<T>) -> T {
        match &self.kind {
            ProfileKind::Aronsson { coefficients } => coefficients
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != T::zero())
                .map(|(i, _)| (x[i] - self.anchor[i]).abs())
                .fold(T::infinity(), T::min),
            _ => self.radial_coordinate(x).abs(),
        }
    }

    /// Right-hand side `f(x, u(x))` the profile satisfies pointwise.
    pub fn source(&self, x: &Point<T>) -> T {
        let alpha = self.params.alpha();
        let (s, shifted) = match &self.kind {
            ProfileKind::Aronsson { .. } => return T::zero(),
            ProfileKind::Radial | ProfileKind::OneDim { .. } => (self.radial_coordinate(x), false),
            _ => (self.radial_coordinate(x), true),
        };
        let weight = if s > T::zero() {
            s.powf(alpha)
        } else if shifted || alpha != T::zero() {
            T::zero()
        } else {
            T::one()
        };
        weight * absorption(self.params.m(), self.evaluate(x))
    }

    /// Right-hand side object matching [`ExactProfile::source`], when one of the weight kinds
    /// expresses it.
    pub fn rhs(&self) -> Option<RightHandSide<T>> {
        match &self.kind {
            ProfileKind::Radial => Some(RightHandSide::power(self.params).with_anchor(self.anchor)),
            ProfileKind::DeadCore { .. } => Some(
                RightHandSide::shifted_power(self.params, self.plateau_radius().ok()?)
                    .with_anchor(self.anchor),
            ),
            ProfileKind::DistanceWeight { shift } => {
                Some(RightHandSide::shifted_power(self.params, *shift).with_anchor(self.anchor))
            }
            ProfileKind::OneDim { .. } | ProfileKind::Aronsson { .. } => None,
        }
    }

    /// Closed-form `Δ∞u(x)` from hand-differentiated first and second derivatives.
    pub fn inf_laplacian(&self, x: &Point<T>) -> Result<T> {
        if self.distance_to_nonsmooth(x) <= T::epsilon() * (T::one() + x[0].abs() + x[1].abs()) {
            return Err(Error::NonSmooth {
                point: [x[0].to_f64_lossy(), x[1].to_f64_lossy()],
            });
        }
        let four_thirds = T::lit(4.0) / T::lit(3.0);
        match &self.kind {
            ProfileKind::Aronsson { coefficients } => {
                // Hessian is diagonal; Δ∞u = Σ u_i² u_ii.
                let mut acc = T::zero();
                for (i, a) in coefficients.iter().enumerate() {
                    let t = x[i] - self.anchor[i];
                    let d1 =
                        *a * four_thirds * t.abs().powf(T::lit(1.0) / T::lit(3.0)) * t.signum();
                    let d2 =
                        *a * four_thirds / T::lit(3.0) * t.abs().powf(-T::lit(2.0) / T::lit(3.0));
                    acc = acc + d1 * d1 * d2;
                }
                Ok(acc)
            }
            _ => {
                let s = self.radial_coordinate(x);
                if s < T::zero() {
                    return Ok(T::zero());
                }
                let tau = self.params.tau();
                let beta = self.params.beta();
                let d1 = tau * beta * s.powf(beta - T::one());
                let d2 = tau * beta * (beta - T::one()) * s.powf(beta - T::lit(2.0));
                Ok(d1 * d1 * d2)
            }
        }
    }

    /// `Δ∞u(x) - f(x, u(x))` from the closed forms; zero to rounding off the non-smooth set.
    pub fn analytic_residual(&self, x: &Point<T>) -> Result<T> {
        Ok(self.inf_laplacian(x)? - self.source(x))
    }
}

/// `(c/tau)^((3-m)/(4+alpha))`: distance over which the radial profile climbs from 0 to `c`.
pub fn detachment_distance<T: Scalar>(params: &AbsorptionParams<T>, boundary_value: T) -> T {
    (boundary_value / params.tau()).powf(params.beta().recip())
}

pub fn plateau_radius<T: Scalar>(profile: &ExactProfile<T>) -> Result<T> {
    profile.plateau_radius()
}

pub fn analytic_residual<T: Scalar>(profile: &ExactProfile<T>, x: &Point<T>) -> Result<T> {
    profile.analytic_residual(x)
}
