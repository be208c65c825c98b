//! Least-squares costs `f(X) = ½‖A(X) − b‖²` on Hermitian matrices.
//!
//! A cost only supplies the linear measurement map `A`, its adjoint and the
//! observations `b`. Values, gradient actions, Hessian actions and the
//! exact line-search initializers are derived from those.

mod completion;
mod dump;
mod eig;
mod interferometry;
mod phaselift;

pub use completion::{CompletionCost, Pattern};
pub use dump::{write_dump, DumpKind};
pub use eig::EigCost;
pub use interferometry::InterferometryCost;
pub use phaselift::PhaseLiftCost;

use crate::kernel::{CMat, C64};
use crate::lowrank::HermLowRank;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: operator acts on n={expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Values of a measurement map.
#[derive(Debug, Clone)]
pub enum Measurement {
    Matrix(HermLowRank),
    Complex(Vec<C64>),
    Real(Vec<f64>),
}

impl Measurement {
    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Measurement) -> Measurement {
        match (self, other) {
            (Measurement::Matrix(a), Measurement::Matrix(b)) => {
                Measurement::Matrix(a.plus(&b.scaled(s)))
            }
            (Measurement::Complex(a), Measurement::Complex(b)) => {
                Measurement::Complex(a.iter().zip(b).map(|(x, y)| x + y * s).collect())
            }
            (Measurement::Real(a), Measurement::Real(b)) => {
                Measurement::Real(a.iter().zip(b).map(|(x, y)| x + y * s).collect())
            }
            _ => panic!("measurement kinds differ"),
        }
    }

    pub fn inner(&self, other: &Measurement) -> f64 {
        match (self, other) {
            (Measurement::Matrix(a), Measurement::Matrix(b)) => a.inner(b),
            (Measurement::Complex(a), Measurement::Complex(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| x.re * y.re + x.im * y.im)
                .sum(),
            (Measurement::Real(a), Measurement::Real(b)) => {
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            _ => panic!("measurement kinds differ"),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Measurement::Matrix(a) => a.norm_sq(),
            _ => self.inner(self),
        }
    }
}

/// A linear measurement map on n x n Hermitian matrices plus observations.
///
/// `adjoint_apply(w, V)` must return `A*(w) V`, and `A*(w)` must be
/// Hermitian whenever `w` lies in the range of `A` on Hermitian inputs.
pub trait CostModel: Send + Sync {
    fn n(&self) -> usize;

    fn name(&self) -> &'static str;

    fn measure(&self, m: &HermLowRank) -> Measurement;

    fn observations(&self) -> &Measurement;

    fn adjoint_apply(&self, w: &Measurement, v: &CMat) -> CMat;

    /// Planted solution, when the instance was generated from one.
    fn truth(&self) -> Option<HermLowRank> {
        None
    }

    /// `‖X − X̂‖ / ‖X̂‖` against the planted solution.
    fn relative_error(&self, x: &HermLowRank) -> Option<f64> {
        let t = self.truth()?;
        Some((x.plus(&t.scaled(-1.0)).norm_sq() / t.norm_sq()).sqrt())
    }

    /// `A(X) − b`.
    fn residual(&self, x: &HermLowRank) -> Measurement {
        self.measure(x).add_scaled(-1.0, self.observations())
    }

    fn value(&self, x: &HermLowRank) -> f64 {
        0.5 * self.residual(x).norm_sq()
    }

    /// `∇f(X) V` given the residual at `X`.
    fn grad_apply(&self, residual: &Measurement, v: &CMat) -> CMat {
        self.adjoint_apply(residual, v)
    }

    /// `∇²f(X)[ζ] V`; independent of `X` for least squares.
    fn hess_apply(&self, zeta: &HermLowRank, v: &CMat) -> CMat {
        self.adjoint_apply(&self.measure(zeta), v)
    }

    /// Smallest positive minimizer of `t ↦ f((Y + tη)(Y + tη)*)`, or 1.
    fn quartic_step(&self, y: &CMat, eta: &CMat) -> f64 {
        let c0 = self.residual(&HermLowRank::gram_of(y));
        let c1 = self.measure(&HermLowRank::sym(y, eta));
        let c2 = self.measure(&HermLowRank::gram_of(eta));
        let d4 = c2.norm_sq();
        let d3 = 2.0 * c2.inner(&c1);
        let d2 = 2.0 * c2.inner(&c0) + c1.norm_sq();
        let d1 = 2.0 * c1.inner(&c0);
        smallest_positive_root([d1, 2.0 * d2, 3.0 * d3, 4.0 * d4]).unwrap_or(1.0)
    }

    /// Exact minimizer of `t ↦ ½‖A(X + tT) − b‖²`, or 1.
    fn quadratic_step(&self, x: &HermLowRank, t: &HermLowRank) -> f64 {
        let r = self.residual(x);
        let s = self.measure(t);
        let ss = s.norm_sq();
        let step = -r.inner(&s) / ss;
        if ss > 0.0 && step.is_finite() && step > 0.0 {
            step
        } else {
            1.0
        }
    }
}

/// Action `V ↦ Z V` of a Hermitian operator, used by tangent projections.
pub trait HermAction {
    fn apply(&self, v: &CMat) -> CMat;
}

impl HermAction for HermLowRank {
    fn apply(&self, v: &CMat) -> CMat {
        HermLowRank::apply(self, v)
    }
}

/// Applies `Herm(Z)` for a dense `Z`.
impl HermAction for CMat {
    fn apply(&self, v: &CMat) -> CMat {
        (self * v + self.adjoint() * v) * C64::new(0.5, 0.0)
    }
}

/// `∇f(X)` as an operator.
pub struct GradAction<'a> {
    pub cost: &'a dyn CostModel,
    pub residual: Measurement,
}

impl<'a> GradAction<'a> {
    pub fn at(cost: &'a dyn CostModel, x: &HermLowRank) -> Self {
        Self {
            cost,
            residual: cost.residual(x),
        }
    }
}

impl HermAction for GradAction<'_> {
    fn apply(&self, v: &CMat) -> CMat {
        self.cost.grad_apply(&self.residual, v)
    }
}

/// `∇²f[ζ]` as an operator.
pub struct HessAction<'a> {
    pub cost: &'a dyn CostModel,
    pub image: Measurement,
}

impl<'a> HessAction<'a> {
    pub fn along(cost: &'a dyn CostModel, zeta: &HermLowRank) -> Self {
        Self {
            cost,
            image: cost.measure(zeta),
        }
    }
}

impl HermAction for HessAction<'_> {
    fn apply(&self, v: &CMat) -> CMat {
        self.cost.adjoint_apply(&self.image, v)
    }
}

/// Smallest positive real root of `c[0] + c[1] t + c[2] t² + c[3] t³`.
///
/// Requires `c[0] < 0` and `c[3] > 0`, which always yields a positive root.
pub fn smallest_positive_root(coef: [f64; 4]) -> Option<f64> {
    let [a0, a1, a2, a3] = coef;
    if !(a0 < 0.0 && a3 > 0.0) || coef.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let poly = |t: f64| ((a3 * t + a2) * t + a1) * t + a0;
    let bound = 1.0
        + [a0, a1, a2]
            .iter()
            .map(|v| (v / a3).abs())
            .fold(0.0, f64::max);
    // Split (0, bound] at critical points so each piece is monotone.
    let mut cuts = vec![0.0];
    let (qa, qb, qc) = (3.0 * a3, 2.0 * a2, a1);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let mut r = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
        r.sort_by(f64::total_cmp);
        cuts.extend(r.iter().copied().filter(|&t| t > 0.0 && t < bound));
    }
    cuts.push(bound);
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        if poly(lo) < 0.0 && poly(hi) >= 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if poly(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(hi);
        }
    }
    None
}
