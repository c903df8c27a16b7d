//! Hardy–Hénon right-hand sides `f(x, u) = c · w(x) · u₊^m + ε` and the exponents they induce.

use crate::error::{Error, Result};
use crate::scalar::{dist, Point, Scalar};

/// The pair `(alpha, m)`: weight exponent and absorption exponent.
///
/// Admissible pairs satisfy `0 <= m < 3` and `alpha > -(4/3) m`; the pair `(0, 0)` (pure
/// infinity-Poisson problem) is admitted as the limiting case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsorptionParams<T> {
    alpha: T,
    m: T,
}

impl<T: Scalar> AbsorptionParams<T> {
    pub fn new(alpha: T, m: T) -> Result<Self> {
        if !alpha.is_finite() || !m.is_finite() {
            return Err(Error::Config("alpha and m must be finite".into()));
        }
        if m < T::zero() || m >= T::lit(3.0) {
            return Err(Error::Config(format!(
                "absorption exponent must satisfy 0 ≤ m < 3, got m = {m}"
            )));
        }
        let floor = -T::lit(4.0) / T::lit(3.0) * m;
        let limiting = alpha == T::zero() && m == T::zero();
        if !(alpha > floor || limiting) {
            return Err(Error::Config(format!(
                "weight exponent must satisfy alpha > -(4/3)·m = {floor}, got alpha = {alpha}"
            )));
        }
        Ok(AbsorptionParams { alpha, m })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn m(&self) -> T {
        self.m
    }

    /// Sharp growth exponent `(4 + alpha) / (3 - m)`.
    pub fn beta(&self) -> T {
        beta_exponent(self)
    }

    pub fn tau(&self) -> T {
        tau_constant(self)
    }

    pub fn gradient_exponent(&self) -> T {
        gradient_exponent(self)
    }
}

pub fn beta_exponent<T: Scalar>(p: &AbsorptionParams<T>) -> T {
    (T::lit(4.0) + p.alpha) / (T::lit(3.0) - p.m)
}

/// Non-degeneracy constant `((3-m)^4 / ((4+alpha)^3 (1+alpha+m)))^(1/(3-m))`, the coefficient of
/// the radial solution `tau · |x|^beta`.
pub fn tau_constant<T: Scalar>(p: &AbsorptionParams<T>) -> T {
    let three_m = T::lit(3.0) - p.m;
    let four_a = T::lit(4.0) + p.alpha;
    let base = three_m.powi(4) / (four_a.powi(3) * (T::one() + p.alpha + p.m));
    base.powf(three_m.recip())
}

/// Gradient growth exponent `(1 + alpha + m) / (3 - m)`, equal to `beta - 1`.
pub fn gradient_exponent<T: Scalar>(p: &AbsorptionParams<T>) -> T {
    (T::one() + p.alpha + p.m) / (T::lit(3.0) - p.m)
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind<T> {
    /// `|x - x0|^alpha`
    Power,
    /// `((|x - x0| - shift)₊)^alpha`; vanishes on the ball `B_shift(x0)`.
    ShiftedPower { shift: T },
    /// `dist(x, F)^alpha` for a finite point set `F`.
    DistancePower { set: Vec<Point<T>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RightHandSide<T> {
    pub kind: WeightKind<T>,
    pub params: AbsorptionParams<T>,
    pub anchor: Point<T>,
    pub scale: T,
    pub epsilon: T,
}

impl<T: Scalar> RightHandSide<T> {
    pub fn new(kind: WeightKind<T>, params: AbsorptionParams<T>) -> Self {
        RightHandSide {
            kind,
            params,
            anchor: [T::zero(), T::zero()],
            scale: T::one(),
            epsilon: T::zero(),
        }
    }

    pub fn power(params: AbsorptionParams<T>) -> Self {
        Self::new(WeightKind::Power, params)
    }

    pub fn shifted_power(params: AbsorptionParams<T>, shift: T) -> Self {
        Self::new(WeightKind::ShiftedPower { shift }, params)
    }

    pub fn with_anchor(mut self, anchor: Point<T>) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > T::zero()) || !self.scale.is_finite() {
            return Err(Error::Config("scale must be positive and finite".into()));
        }
        if !(self.epsilon >= T::zero()) || !self.epsilon.is_finite() {
            return Err(Error::Config(
                "epsilon must be nonnegative and finite".into(),
            ));
        }
        match &self.kind {
            WeightKind::ShiftedPower { shift } if !(*shift >= T::zero()) => {
                Err(Error::Config("shift must be nonnegative".into()))
            }
            WeightKind::DistancePower { set } if set.is_empty() => {
                Err(Error::Config("distance weight needs a nonempty set".into()))
            }
            _ => Ok(()),
        }
    }

    /// Signed base of the weight: `|x-x0|`, `|x-x0| - shift` or `dist(x, F)`.
    fn raw_base(&self, x: &Point<T>) -> T {
        match &self.kind {
            WeightKind::Power => dist(x, &self.anchor),
            WeightKind::ShiftedPower { shift } => dist(x, &self.anchor) - *shift,
            WeightKind::DistancePower { set } => {
                set.iter().map(|y| dist(x, y)).fold(T::infinity(), T::min)
            }
        }
    }

    /// Weight `w(x)`.
    ///
    /// The shifted weight is a positive part and vanishes wherever `|x-x0| <= shift`, for every
    /// alpha. At a zero base with `alpha < 0` the weight is taken as 0: admissible pairs with
    /// negative alpha have `m > 0`, and the product `w · u₊^m` vanishes on the critical set.
    pub fn weight(&self, x: &Point<T>) -> T {
        let s = self.raw_base(x);
        let alpha = self.params.alpha;
        if let WeightKind::ShiftedPower { .. } = self.kind {
            if s <= T::zero() {
                return T::zero();
            }
        }
        if s > T::zero() {
            s.powf(alpha)
        } else if alpha == T::zero() {
            T::one()
        } else {
            T::zero()
        }
    }

    /// Weight averaged over the radial cell `[s - h/2, s + h/2]` for the shifted kind.
    ///
    /// Integrating the weight across the cell keeps the discrete flux exact when the support edge
    /// `|x - x0| = shift` cuts a cell, which point sampling misses by O(h) for `alpha = 0`.
    /// Other kinds (and `alpha <= -1`, where the cell integral diverges) fall back to
    /// [`RightHandSide::weight`].
    pub fn cell_weight(&self, x: &Point<T>, h: T) -> T {
        let alpha = self.params.alpha;
        match self.kind {
            WeightKind::ShiftedPower { .. } if alpha > -T::one() => {
                let s = self.raw_base(x);
                let half = h / T::lit(2.0);
                let a1 = alpha + T::one();
                let prim = |t: T| {
                    if t > T::zero() {
                        t.powf(a1) / a1
                    } else {
                        T::zero()
                    }
                };
                (prim(s + half) - prim(s - half)) / h
            }
            _ => self.weight(x),
        }
    }

    /// `u₊^m`, with the convention `u₊^0 = 1`.
    pub fn absorption(&self, u: T) -> T {
        absorption(self.params.m, u)
    }

    pub fn eval(&self, x: &Point<T>, u: T) -> T {
        self.scale * self.weight(x) * self.absorption(u) + self.epsilon
    }
}

pub(crate) fn absorption<T: Scalar>(m: T, u: T) -> T {
    if m == T::zero() {
        T::one()
    } else if m == T::one() {
        u.max(T::zero())
    } else {
        u.max(T::zero()).powf(m)
    }
}

/// Free-function form of [`RightHandSide::eval`].
pub fn rhs_eval<T: Scalar>(rhs: &RightHandSide<T>, x: &Point<T>, u: T) -> T {
    rhs.eval(x, u)
}
