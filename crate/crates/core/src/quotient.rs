//! The quotient `C*^{n x p} / O_p` through `Y ↦ Y Y*`.
//!
//! Tangent vectors are horizontal n x p matrices at a full-rank `Y`.
//! Three metrics are available:
//!
//! * `g1(A, B) = Re tr(A* B)`
//! * `g2(A, B) = Re tr(Y*Y A* B)`
//! * `g3(A, B) = ⟨Y A* + A Y*, Y B* + B Y*⟩ + ⟨P^V(A) Y*, P^V(B) Y*⟩`
//!
//! `g3` makes `L(A) = Y A* + A Y*` an isometry from the horizontal space
//! onto the tangent space of the embedded manifold.

use crate::cost::{CostModel, GradAction, HermAction, HessAction};
use crate::embedded::{EigenPoint, EmbeddedTangent};
use crate::error::GeometryError;
use crate::kernel::{
    c, inner, qr_compact, skew_of, solve_lyapunov, solve_upper, solve_upper_adjoint, CMat,
    HermitianSmall, RANK_TOL,
};
use crate::lowrank::HermLowRank;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricTag {
    G1,
    G2,
    G3,
}

impl fmt::Display for MetricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricTag::G1 => "g1",
            MetricTag::G2 => "g2",
            MetricTag::G3 => "g3",
        })
    }
}

impl FromStr for MetricTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "g1" => Ok(MetricTag::G1),
            "g2" => Ok(MetricTag::G2),
            "g3" => Ok(MetricTag::G3),
            _ => Err(format!("unknown metric '{s}' (expected g1, g2 or g3)")),
        }
    }
}

/// A full-rank factor `Y` with its Gram matrix `G = Y* Y` and the
/// triangular factor `R` of `Y = Q R`, so that `G = R* R`.
#[derive(Debug, Clone)]
pub struct FactorPoint {
    y: CMat,
    r: CMat,
    gram: HermitianSmall,
}

impl FactorPoint {
    pub fn new(y: CMat) -> Result<Self, GeometryError> {
        let p = y.ncols();
        if p == 0 || p > y.nrows() {
            return Err(GeometryError::InvalidPoint(format!(
                "factor of shape {:?}",
                y.shape()
            )));
        }
        let (_, r) = qr_compact(&y);
        let sv = r.clone().singular_values();
        let max = sv.max();
        let min = sv.min();
        if !(min > RANK_TOL * max) {
            return Err(GeometryError::Boundary {
                sigma_min: min,
                sigma_max: max,
            });
        }
        let gram = HermitianSmall::from_raw(y.adjoint() * &y);
        Ok(Self { y, r, gram })
    }

    pub fn y(&self) -> &CMat {
        &self.y
    }

    pub fn gram(&self) -> &HermitianSmall {
        &self.gram
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn p(&self) -> usize {
        self.y.ncols()
    }

    /// `G⁻¹ B`.
    pub fn gram_solve(&self, b: &CMat) -> CMat {
        solve_upper(&self.r, &solve_upper_adjoint(&self.r, b))
    }

    /// `A G⁻¹`.
    pub fn gram_solve_right(&self, a: &CMat) -> CMat {
        self.gram_solve(&a.adjoint()).adjoint()
    }

    /// `P_Y A = Y G⁻¹ Y* A`.
    pub fn proj(&self, a: &CMat) -> CMat {
        &self.y * self.gram_solve(&(self.y.adjoint() * a))
    }

    pub fn to_lowrank(&self) -> HermLowRank {
        HermLowRank::gram_of(&self.y)
    }

    /// Eigendecomposition of `Y Y*`.
    pub fn eigen_point(&self) -> Result<EigenPoint, GeometryError> {
        EigenPoint::from_factor(&self.y)
    }
}

/// `Ω = skew(G⁻¹ Y* A)` for g2 and g3, or the Lyapunov solution for g1;
/// the vertical component is `Y Ω`.
pub fn vertical_generator(
    y: &FactorPoint,
    tag: MetricTag,
    a: &CMat,
) -> Result<CMat, GeometryError> {
    match tag {
        MetricTag::G1 => {
            let ya = y.y().adjoint() * a;
            Ok(solve_lyapunov(y.gram(), &(&ya - ya.adjoint()))?)
        }
        MetricTag::G2 | MetricTag::G3 => Ok(skew_of(&y.gram_solve(&(y.y().adjoint() * a)))),
    }
}

pub fn vertical_project(y: &FactorPoint, tag: MetricTag, a: &CMat) -> Result<CMat, GeometryError> {
    Ok(y.y() * vertical_generator(y, tag, a)?)
}

pub fn horizontal_project(
    y: &FactorPoint,
    tag: MetricTag,
    a: &CMat,
) -> Result<CMat, GeometryError> {
    Ok(a - vertical_project(y, tag, a)?)
}

pub fn metric(y: &FactorPoint, tag: MetricTag, a: &CMat, b: &CMat) -> f64 {
    match tag {
        MetricTag::G1 => inner(a, b),
        MetricTag::G2 => inner(&(a * y.gram().as_mat()), b),
        MetricTag::G3 => {
            let g = y.gram().as_mat();
            let ya = y.y().adjoint() * a;
            let yb = y.y().adjoint() * b;
            let first = 2.0 * inner(&(a * g), b) + 2.0 * (ya * yb).trace().re;
            let oa = vertical_generator(y, tag, a).expect("g3 vertical part needs no solve");
            let ob = vertical_generator(y, tag, b).expect("g3 vertical part needs no solve");
            first + inner(&(g * oa * g), &ob)
        }
    }
}

/// `R(b)` with `metric(a, b) = Re⟨a, R(b)⟩` for every `a`.
pub fn metric_riesz(y: &FactorPoint, tag: MetricTag, b: &CMat) -> CMat {
    let g = y.gram().as_mat();
    match tag {
        MetricTag::G1 => b.clone(),
        MetricTag::G2 => b * g,
        MetricTag::G3 => {
            let yy = y.y();
            let om = vertical_generator(y, tag, b).expect("g3 vertical part needs no solve");
            (b * g) * c(2.0, 0.0) + yy * (b.adjoint() * yy) * c(2.0, 0.0) + yy * (om * g)
        }
    }
}

/// Horizontal gradient of `F(Y) = f(Y Y*)` under `tag`.
pub fn gradient(y: &FactorPoint, tag: MetricTag, cost: &dyn CostModel) -> CMat {
    let g = GradAction::at(cost, &y.to_lowrank());
    gradient_from(y, tag, &g)
}

fn gradient_from(y: &FactorPoint, tag: MetricTag, g: &dyn HermAction) -> CMat {
    let d = g.apply(y.y()) * c(2.0, 0.0);
    match tag {
        MetricTag::G1 => d,
        MetricTag::G2 => y.gram_solve_right(&d),
        MetricTag::G3 => {
            let t = y.gram_solve_right(&d) * c(0.5, 0.0);
            &t - y.proj(&t) * c(0.5, 0.0)
        }
    }
}

/// `Y + t A`.
pub fn retract(y: &FactorPoint, a: &CMat, t: f64) -> Result<FactorPoint, GeometryError> {
    FactorPoint::new(y.y() + a * c(t, 0.0))
}

/// Horizontal projection at the new point.
pub fn transport(y2: &FactorPoint, tag: MetricTag, a: &CMat) -> Result<CMat, GeometryError> {
    horizontal_project(y2, tag, a)
}

/// Riemannian Hessian of the quotient cost applied to a horizontal `xi`.
pub fn hessian_apply(
    y: &FactorPoint,
    tag: MetricTag,
    xi: &CMat,
    cost: &dyn CostModel,
) -> Result<CMat, GeometryError> {
    let yy = y.y();
    let zeta = HermLowRank::sym(yy, xi);
    let hz = HessAction::along(cost, &zeta);
    let g = GradAction::at(cost, &y.to_lowrank());
    match tag {
        MetricTag::G1 => {
            let v = hz.apply(yy) * c(2.0, 0.0) + g.apply(xi) * c(2.0, 0.0);
            horizontal_project(y, tag, &v)
        }
        MetricTag::G2 => {
            let perp = |a: &CMat| a - y.proj(a);
            let xig = y.gram_solve_right(xi);
            let gy = g.apply(yy);
            let mut v = y.gram_solve_right(&hz.apply(yy)) * c(2.0, 0.0);
            v += g.apply(&perp(&xig));
            v += perp(&g.apply(&xig));
            // 2 skew(ξ Y*) ∇f Y G⁻²
            let w = y.gram_solve_right(&y.gram_solve_right(&gy));
            v += xi * (yy.adjoint() * &w) - yy * (xi.adjoint() * &w);
            // 2 skew(ξ G⁻¹ Y* ∇f) Y G⁻¹
            let ygy = yy.adjoint() * &gy;
            v += &xig * y.gram_solve_right(&ygy) - &gy * y.gram_solve_right(&(xig.adjoint() * yy));
            horizontal_project(y, tag, &v)
        }
        MetricTag::G3 => {
            let t = y.gram_solve_right(&hz.apply(yy));
            let first = &t - y.proj(&t) * c(0.5, 0.0);
            let xig = y.gram_solve_right(xi);
            let inner_perp = &xig - y.proj(&xig);
            let s = g.apply(&inner_perp);
            Ok(first + &s - y.proj(&s))
        }
    }
}

/// `L(ξ) = Y ξ* + ξ Y*` written in the tangent representation at `x = Y Y*`.
pub fn lift(y: &FactorPoint, x: &EigenPoint, xi: &CMat) -> EmbeddedTangent {
    let u = x.u();
    let uy = u.adjoint() * y.y();
    let uxi = u.adjoint() * xi;
    let w = &uxi * uy.adjoint();
    let h = &w + w.adjoint();
    let zu = y.y() * uxi.adjoint() + xi * uy.adjoint();
    let up = &zu - u * &h;
    let up = &up - u * (u.adjoint() * &up);
    EmbeddedTangent { h, up }
}

/// Inverse of [`lift`] onto the horizontal space of g3:
/// `ξ = (I − P_Y/2) ζ Y G⁻¹`.
pub fn unlift(y: &FactorPoint, x: &EigenPoint, zeta: &EmbeddedTangent) -> CMat {
    let zy = zeta.to_lowrank(x).apply(y.y());
    let t = y.gram_solve_right(&zy);
    &t - y.proj(&t) * c(0.5, 0.0)
}

/// Real dimension of the vertical space, `p²`.
pub fn vertical_dimension(p: usize) -> usize {
    p * p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riesz_representatives_reproduce_the_metric() {
        let mut rng = crate::random::seeded(77);
        let y = FactorPoint::new(crate::random::complex_gaussian(&mut rng, 7, 3)).unwrap();
        let a = crate::random::complex_gaussian(&mut rng, 7, 3);
        let b = crate::random::complex_gaussian(&mut rng, 7, 3);
        for tag in [MetricTag::G1, MetricTag::G2, MetricTag::G3] {
            let want = metric(&y, tag, &a, &b);
            let got = crate::kernel::inner(&a, &metric_riesz(&y, tag, &b));
            assert!((want - got).abs() < 1e-10 * want.abs().max(1.0), "{tag}: {want} vs {got}");
        }
    }
}
