//! The manifold of rank-p Hermitian PSD matrices embedded in `H^n`.
//!
//! A point is `X = U Σ U*`. A tangent vector is stored as `(H, Up)` with
//! `H` Hermitian p x p and `U* Up = 0`, standing for
//! `U H U* + Up U* + U Up*`. The metric is the ambient `Re tr(A* B)`,
//! which in this representation reads `⟨H1, H2⟩ + 2 Re tr(Up1* Up2)`.

use crate::cost::{CostModel, GradAction, HermAction, HessAction};
use crate::error::GeometryError;
use crate::kernel::{
    c, compact_eig_factor, fix_phase, fro, hcat, hermitian_eig_desc, inner, orth_complement,
    qr_against, scale_columns, CMat, HermitianSmall, RANK_TOL,
};
use crate::lowrank::HermLowRank;

#[derive(Debug, Clone)]
pub struct EigenPoint {
    u: CMat,
    sigma: Vec<f64>,
}

fn check_spectrum(sigma: &[f64]) -> Result<(), GeometryError> {
    let max = sigma.iter().copied().fold(0.0, f64::max);
    let min = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    if sigma.is_empty() || !(min > RANK_TOL * max) || !(min > 0.0) {
        return Err(GeometryError::Boundary {
            sigma_min: min,
            sigma_max: max,
        });
    }
    Ok(())
}

impl EigenPoint {
    /// `U` must have orthonormal columns and `sigma` must be positive.
    pub fn new(u: CMat, sigma: Vec<f64>) -> Result<Self, GeometryError> {
        let p = sigma.len();
        if u.ncols() != p || p == 0 || p > u.nrows() {
            return Err(GeometryError::InvalidPoint(format!(
                "U is {:?} but {p} eigenvalues were given",
                u.shape()
            )));
        }
        let drift = fro(&(u.adjoint() * &u - CMat::identity(p, p)));
        if drift > 1e-8 {
            return Err(GeometryError::InvalidPoint(format!(
                "U is not orthonormal ({drift:.3e})"
            )));
        }
        check_spectrum(&sigma)?;
        Ok(Self { u, sigma })
    }

    /// `X = Y Y*` for a full-rank factor.
    pub fn from_factor(y: &CMat) -> Result<Self, GeometryError> {
        let e = compact_eig_factor(y);
        check_spectrum(&e.sigma)?;
        Ok(Self {
            u: e.u,
            sigma: e.sigma,
        })
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U Σ^{1/2}`, a factor with `Y Y* = X`.
    pub fn factor(&self) -> CMat {
        let roots: Vec<f64> = self.sigma.iter().map(|s| s.sqrt()).collect();
        scale_columns(&self.u, &roots)
    }

    pub fn to_lowrank(&self) -> HermLowRank {
        HermLowRank::from_eigen(&self.u, &self.sigma)
    }

    pub fn to_dense(&self) -> CMat {
        self.to_lowrank().to_dense()
    }

    fn sigma_mat(&self) -> CMat {
        HermitianSmall::from_real_diagonal(&self.sigma).into_mat()
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddedTangent {
    pub h: CMat,
    pub up: CMat,
}

impl EmbeddedTangent {
    pub fn zeros(n: usize, p: usize) -> Self {
        Self {
            h: CMat::zeros(p, p),
            up: CMat::zeros(n, p),
        }
    }

    /// `a self + b other`.
    pub fn lincomb(&self, a: f64, b: f64, other: &Self) -> Self {
        Self {
            h: &self.h * c(a, 0.0) + &other.h * c(b, 0.0),
            up: &self.up * c(a, 0.0) + &other.up * c(b, 0.0),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            h: &self.h * c(a, 0.0),
            up: &self.up * c(a, 0.0),
        }
    }

    /// Factored ambient matrix `U B* + B U*` with `B = U H / 2 + Up`.
    pub fn to_lowrank(&self, x: &EigenPoint) -> HermLowRank {
        HermLowRank::sym(x.u(), &(x.u() * &self.h * c(0.5, 0.0) + &self.up))
    }

    pub fn to_dense(&self, x: &EigenPoint) -> CMat {
        self.to_lowrank(x).to_dense()
    }
}

/// Ambient inner product of two tangent vectors at the same point.
pub fn metric(a: &EmbeddedTangent, b: &EmbeddedTangent) -> f64 {
    inner(&a.h, &b.h) + 2.0 * inner(&a.up, &b.up)
}

pub fn norm(a: &EmbeddedTangent) -> f64 {
    metric(a, a).sqrt()
}

/// Orthogonal projection of `Herm(Z)` onto the tangent space at `x`.
pub fn tangent_project(x: &EigenPoint, z: &dyn HermAction) -> EmbeddedTangent {
    let u = x.u();
    let t = z.apply(u);
    let h = HermitianSmall::from_raw(u.adjoint() * &t).into_mat();
    let up = &t - u * &h;
    let up = &up - u * (u.adjoint() * &up);
    EmbeddedTangent { h, up }
}

/// Projection of the Euclidean gradient `∇f(X)`.
pub fn riemannian_grad(x: &EigenPoint, cost: &dyn CostModel) -> EmbeddedTangent {
    tangent_project(x, &GradAction::at(cost, &x.to_lowrank()))
}

/// Metric projection of `X + t ξ` back to rank p.
pub fn retract(x: &EigenPoint, xi: &EmbeddedTangent, t: f64) -> Result<EigenPoint, GeometryError> {
    let p = x.rank();
    let up = &xi.up * c(t, 0.0);
    // With 2p > n the complement of U is too small for a thin QR of Up.
    let (q, r) = if 2 * p <= x.n() {
        qr_against(&up, Some(x.u()))
    } else {
        let q = orth_complement(x.u());
        let r = q.adjoint() * &up;
        (q, r)
    };
    let k = q.ncols();
    let mut m = CMat::zeros(p + k, p + k);
    m.view_mut((0, 0), (p, p))
        .copy_from(&(x.sigma_mat() + &xi.h * c(t, 0.0)));
    m.view_mut((p, 0), (k, p)).copy_from(&r);
    m.view_mut((0, p), (p, k)).copy_from(&r.adjoint());
    let (vals, vecs) = hermitian_eig_desc(&m);
    let sigma: Vec<f64> = vals[..p].to_vec();
    check_spectrum(&sigma)?;
    let mut u = hcat(x.u(), &q) * vecs.columns(0, p);
    fix_phase(&mut u);
    Ok(EigenPoint { u, sigma })
}

/// Transport by the two tangent-space blocks only; the third block of the
/// full projection is dropped.
pub fn vector_transport(x1: &EigenPoint, x2: &EigenPoint, nu: &EmbeddedTangent) -> EmbeddedTangent {
    let a = x1.u().adjoint() * x2.u();
    let h = HermitianSmall::from_raw(a.adjoint() * &nu.h * &a).into_mat();
    let w = &nu.up * &a;
    let up = &w - x2.u() * (x2.u().adjoint() * &w);
    EmbeddedTangent { h, up }
}

/// Orthogonal projection of a tangent vector at `x1` onto the tangent
/// space at `x2`.
pub fn projection_transport(
    x1: &EigenPoint,
    x2: &EigenPoint,
    nu: &EmbeddedTangent,
) -> EmbeddedTangent {
    tangent_project(x2, &nu.to_lowrank(x1))
}

/// Riemannian Hessian of `f` at `x` applied to `xi`.
pub fn hessian_apply(
    x: &EigenPoint,
    xi: &EmbeddedTangent,
    cost: &dyn CostModel,
) -> EmbeddedTangent {
    let u = x.u();
    let mut out = tangent_project(x, &HessAction::along(cost, &xi.to_lowrank(x)));
    let inv: Vec<f64> = x.sigma().iter().map(|s| 1.0 / s).collect();
    let g = GradAction::at(cost, &x.to_lowrank());
    let w = scale_columns(&g.apply(&xi.up), &inv);
    out.up += &w - u * (u.adjoint() * &w);
    out
}

/// Second-order retraction `w X† w*` with
/// `w = X + ξs/2 + ξp − ξs X† ξs/8 − ξp X† ξs/2`.
pub fn second_order_retract(
    x: &EigenPoint,
    xi: &EmbeddedTangent,
    t: f64,
) -> Result<EigenPoint, GeometryError> {
    let u = x.u();
    let h = &xi.h * c(t, 0.0);
    let up = &xi.up * c(t, 0.0);
    let inv: Vec<f64> = x.sigma().iter().map(|s| 1.0 / s).collect();
    let sinv_h = scale_columns(&h.transpose(), &inv).transpose();
    let w0 = x.sigma_mat() + &h * c(0.5, 0.0) - &h * &sinv_h * c(0.125, 0.0);
    let p = x.rank();
    let b = u * w0 + &up * (CMat::identity(p, p) - sinv_h * c(0.5, 0.0));
    let roots: Vec<f64> = inv.iter().map(|s| s.sqrt()).collect();
    EigenPoint::from_factor(&scale_columns(&b, &roots))
}

/// Minimizer of `f(X + tη)` for least-squares costs.
pub fn initial_step(x: &EigenPoint, eta: &EmbeddedTangent, cost: &dyn CostModel) -> f64 {
    cost.quadratic_step(&x.to_lowrank(), &eta.to_lowrank(x))
}

/// Real dimension of the manifold, `2np − p²`.
pub fn dimension(n: usize, p: usize) -> usize {
    2 * n * p - p * p
}
