//! Hermitian matrices held as `W C W*` with a thin `W` and a small
//! Hermitian core `C`.
//!
//! Sums concatenate factors, so residuals such as `Y Y* − G G*` stay
//! factored. Norms go through a Householder `R` of `W`, which keeps them
//! accurate to rounding of `‖M‖` itself even when `M` is a near
//! cancellation of large terms.

use crate::kernel::{c, hcat, inner, CMat};
use nalgebra::QR;

#[derive(Debug, Clone)]
pub struct HermLowRank {
    w: CMat,
    core: CMat,
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (ka, kb) = (a.nrows(), b.nrows());
    let mut out = CMat::zeros(ka + kb, ka + kb);
    out.view_mut((0, 0), (ka, ka)).copy_from(a);
    out.view_mut((ka, ka), (kb, kb)).copy_from(b);
    out
}

/// `R` of a Householder QR; `W = Q R` with `R` of size min(n, k) x k.
pub(crate) fn triangular_factor(w: &CMat) -> CMat {
    QR::new(w.clone()).r()
}

impl HermLowRank {
    /// `W C W*`; `C` is Hermitized.
    pub fn new(w: CMat, core: CMat) -> Self {
        assert_eq!(
            core.shape(),
            (w.ncols(), w.ncols()),
            "core must be k x k for W of width k"
        );
        let core = (&core + core.adjoint()) * c(0.5, 0.0);
        Self { w, core }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            w: CMat::zeros(n, 0),
            core: CMat::zeros(0, 0),
        }
    }

    /// `Y Y*`.
    pub fn gram_of(y: &CMat) -> Self {
        Self {
            w: y.clone(),
            core: CMat::identity(y.ncols(), y.ncols()),
        }
    }

    /// `U diag(sigma) U*`.
    pub fn from_eigen(u: &CMat, sigma: &[f64]) -> Self {
        let d = nalgebra::DVector::from_iterator(sigma.len(), sigma.iter().map(|&s| c(s, 0.0)));
        Self {
            w: u.clone(),
            core: CMat::from_diagonal(&d),
        }
    }

    /// `Y B* + B Y*`.
    pub fn sym(y: &CMat, b: &CMat) -> Self {
        assert_eq!(y.shape(), b.shape());
        let k = y.ncols();
        let mut core = CMat::zeros(2 * k, 2 * k);
        for i in 0..k {
            core[(i, k + i)] = c(1.0, 0.0);
            core[(k + i, i)] = c(1.0, 0.0);
        }
        Self {
            w: hcat(y, b),
            core,
        }
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn width(&self) -> usize {
        self.w.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.w
    }

    pub fn core(&self) -> &CMat {
        &self.core
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            w: self.w.clone(),
            core: &self.core * c(s, 0.0),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            w: hcat(&self.w, &other.w),
            core: block_diag(&self.core, &other.core),
        }
    }

    /// `M V`.
    pub fn apply(&self, v: &CMat) -> CMat {
        if self.width() == 0 {
            return CMat::zeros(self.n(), v.ncols());
        }
        &self.w * (&self.core * (self.w.adjoint() * v))
    }

    pub fn to_dense(&self) -> CMat {
        if self.width() == 0 {
            return CMat::zeros(self.n(), self.n());
        }
        &self.w * &self.core * self.w.adjoint()
    }

    /// `Re tr(M1 M2)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let (k1, k2) = (self.width(), other.width());
        if k1 == 0 || k2 == 0 {
            return 0.0;
        }
        let r = triangular_factor(&hcat(&self.w, &other.w));
        let r1 = r.columns(0, k1);
        let r2 = r.columns(k1, k2);
        inner(
            &(r1 * &self.core * r1.adjoint()),
            &(r2 * &other.core * r2.adjoint()),
        )
    }

    pub fn norm_sq(&self) -> f64 {
        if self.width() == 0 {
            return 0.0;
        }
        let r = triangular_factor(&self.w);
        let m = &r * &self.core * r.adjoint();
        inner(&m, &m)
    }
}
