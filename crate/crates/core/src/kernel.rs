//! Dense complex linear algebra shared by every geometry.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The inner product on
//! matrices is always the real one, `Re tr(A* B)`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Relative threshold below which an eigenvalue or singular value counts as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Largest tolerated anti-Hermitian drift (relative) before a warning is logged.
pub const HERM_DRIFT_WARN: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} needs a square matrix, got {shape:?}")]
    NotSquare {
        op: &'static str,
        shape: (usize, usize),
    },
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("singular system: smallest eigenvalue {min:.3e}, largest {max:.3e}")]
    Singular { min: f64, max: f64 },
    #[error("requested rank {p} exceeds dimension {n}")]
    RankTooLarge { p: usize, n: usize },
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `Re tr(A* B)` without shape checks; callers guarantee equal shapes.
pub fn inner(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// `Re tr(A* B)`.
pub fn real_inner(a: &CMat, b: &CMat) -> Result<f64, KernelError> {
    if a.shape() != b.shape() {
        return Err(KernelError::DimensionMismatch {
            op: "real_inner",
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(inner(a, b))
}

pub fn fro(a: &CMat) -> f64 {
    inner(a, a).sqrt()
}

fn require_square(op: &'static str, a: &CMat) -> Result<(), KernelError> {
    if a.nrows() != a.ncols() {
        return Err(KernelError::NotSquare {
            op,
            shape: a.shape(),
        });
    }
    Ok(())
}

pub(crate) fn herm_of(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

pub(crate) fn skew_of(a: &CMat) -> CMat {
    (a - a.adjoint()) * c(0.5, 0.0)
}

/// `(A + A*)/2`.
pub fn herm(a: &CMat) -> Result<CMat, KernelError> {
    require_square("herm", a)?;
    Ok(herm_of(a))
}

/// `(A - A*)/2`.
pub fn skew(a: &CMat) -> Result<CMat, KernelError> {
    require_square("skew", a)?;
    Ok(skew_of(a))
}

/// Relative distance of a square matrix from the Hermitian set.
pub fn hermitian_deviation(a: &CMat) -> f64 {
    let scale = fro(a);
    if scale == 0.0 {
        return 0.0;
    }
    fro(&skew_of(a)) / scale
}

/// Small Hermitian matrix. The stored value is always exactly Hermitian;
/// construction re-symmetrizes and logs when the input drifted.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSmall(CMat);

impl HermitianSmall {
    pub fn new(a: CMat) -> Result<Self, KernelError> {
        require_square("HermitianSmall::new", &a)?;
        let dev = hermitian_deviation(&a);
        if dev > HERM_DRIFT_WARN {
            log::warn!("re-symmetrizing matrix with Hermitian drift {dev:.3e}");
        }
        Ok(Self(herm_of(&a)))
    }

    pub(crate) fn from_raw(a: CMat) -> Self {
        Self(herm_of(&a))
    }

    pub fn zeros(p: usize) -> Self {
        Self(CMat::zeros(p, p))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self(CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            d.len(),
            d.iter().map(|&x| c(x, 0.0)),
        )))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_mat(self) -> CMat {
        self.0
    }

    /// Eigenvalues in descending order with phase-normalized eigenvectors.
    pub fn eig_desc(&self) -> (Vec<f64>, CMat) {
        hermitian_eig_desc(&self.0)
    }
}

/// Multiply each column by a unit phase so its largest-magnitude entry is
/// real and positive.
pub fn fix_phase(u: &mut CMat) {
    for mut col in u.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, z) in col.iter().enumerate() {
            let a = z.norm();
            if a > best_abs * (1.0 + 1e-12) {
                best_abs = a;
                best = i;
            }
        }
        if best_abs > 0.0 {
            let ph = col[best].conj() / best_abs;
            col *= ph;
        }
    }
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub(crate) fn hermitian_eig_desc(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(herm_of(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    fix_phase(&mut vecs);
    (vals, vecs)
}

/// Solve `X E + E X = Z` for Hermitian positive definite `E`.
pub fn solve_lyapunov(e: &HermitianSmall, z: &CMat) -> Result<CMat, KernelError> {
    let p = e.dim();
    if z.shape() != (p, p) {
        return Err(KernelError::DimensionMismatch {
            op: "solve_lyapunov",
            left: (p, p),
            right: z.shape(),
        });
    }
    let (lam, q) = e.eig_desc();
    if p == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let (max, min) = (lam[0], lam[p - 1]);
    if !(min > 1e-14 * max && min > 0.0) {
        return Err(KernelError::Singular { min, max });
    }
    let mut w = q.adjoint() * z * &q;
    for j in 0..p {
        for i in 0..p {
            w[(i, j)] /= lam[i] + lam[j];
        }
    }
    Ok(&q * w * q.adjoint())
}

/// Leading eigenpairs of a Hermitian PSD matrix.
#[derive(Debug, Clone)]
pub struct EigResult {
    /// n x p, orthonormal columns, phase-normalized.
    pub u: CMat,
    /// Descending; values under the rank tolerance are reported as 0.
    pub sigma: Vec<f64>,
}

impl EigResult {
    pub fn numerical_rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > 0.0).count()
    }
}

fn truncate_eig(vals: &[f64], vecs: &CMat, basis: Option<&CMat>, p: usize) -> EigResult {
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let sigma = vals[..p]
        .iter()
        .map(|&s| if s > RANK_TOL * top { s } else { 0.0 })
        .collect();
    let v = vecs.columns(0, p).into_owned();
    let mut u = match basis {
        Some(q) => q * v,
        None => v,
    };
    fix_phase(&mut u);
    EigResult { u, sigma }
}

/// Top-`p` eigenpairs of a dense Hermitian PSD matrix.
pub fn compact_eig_psd(x: &CMat, p: usize) -> Result<EigResult, KernelError> {
    require_square("compact_eig_psd", x)?;
    let n = x.nrows();
    if p > n {
        return Err(KernelError::RankTooLarge { p, n });
    }
    let dev = hermitian_deviation(x);
    if dev > 1e-10 {
        return Err(KernelError::NotHermitian { deviation: dev });
    }
    let (vals, vecs) = hermitian_eig_desc(x);
    Ok(truncate_eig(&vals, &vecs, None, p))
}

/// Eigenpairs of `Y Y*` computed from the factor, without forming `Y Y*`.
pub fn compact_eig_factor(y: &CMat) -> EigResult {
    let p = y.ncols();
    let (q, r) = qr_compact(y);
    let (vals, vecs) = hermitian_eig_desc(&(&r * r.adjoint()));
    truncate_eig(&vals, &vecs, Some(&q), p)
}

/// Thin QR: `A = Q R` with orthonormal `Q` (n x k) and upper triangular `R`
/// with real non-negative diagonal. Rank-deficient columns get `R_jj = 0`
/// and an arbitrary orthonormal completion in `Q`.
pub fn qr_compact(a: &CMat) -> (CMat, CMat) {
    qr_against(a, None)
}

/// Thin QR of `A` where every column of `Q` is also made orthogonal to the
/// orthonormal `basis`. Components of `A` inside `span(basis)` are discarded.
pub fn qr_against(a: &CMat, basis: Option<&CMat>) -> (CMat, CMat) {
    let (n, k) = a.shape();
    let m = basis.map_or(0, |b| b.ncols());
    assert!(
        m + k <= n,
        "qr: {k} columns plus {m} basis vectors exceed dimension {n}"
    );
    let scale = fro(a);
    let mut q = CMat::zeros(n, k);
    let mut r = CMat::zeros(k, k);
    for j in 0..k {
        let mut v = a.column(j).clone_owned();
        for _ in 0..2 {
            if let Some(b) = basis {
                let cb = b.adjoint() * &v;
                v -= b * cb;
            }
            if j > 0 {
                let qj = q.columns(0, j);
                let cq = qj.adjoint() * &v;
                v -= qj * &cq;
                for i in 0..j {
                    r[(i, j)] += cq[i];
                }
            }
        }
        let nv = v.norm();
        if nv > 1e-14 * scale && nv > 0.0 {
            r[(j, j)] = c(nv, 0.0);
            q.set_column(j, &(v / c(nv, 0.0)));
        } else {
            let fill = completion_vector(n, basis, &q.columns(0, j).into_owned());
            q.set_column(j, &fill);
        }
    }
    (q, r)
}

fn completion_vector(n: usize, basis: Option<&CMat>, q: &CMat) -> nalgebra::DVector<C64> {
    let mut weight = vec![0.0; n];
    for mat in basis.into_iter().chain(std::iter::once(q)) {
        for (i, row) in mat.row_iter().enumerate() {
            weight[i] += row.norm_squared();
        }
    }
    let pick = (0..n)
        .min_by(|&i, &j| weight[i].total_cmp(&weight[j]))
        .expect("nonempty");
    let mut v = nalgebra::DVector::<C64>::zeros(n);
    v[pick] = c(1.0, 0.0);
    for _ in 0..2 {
        if let Some(b) = basis {
            let cb = b.adjoint() * &v;
            v -= b * cb;
        }
        if q.ncols() > 0 {
            let cq = q.adjoint() * &v;
            v -= q * cq;
        }
    }
    let nv = v.norm();
    v / c(nv, 0.0)
}

/// Orthonormal basis of the complement of `span(q)`, n x (n - m).
pub fn orth_complement(q: &CMat) -> CMat {
    let (n, m) = q.shape();
    qr_against(&CMat::zeros(n, n - m), Some(q)).0
}

/// Scale each column `j` of `a` by `d[j]`.
pub fn scale_columns(a: &CMat, d: &[f64]) -> CMat {
    let mut out = a.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= c(d[j], 0.0);
    }
    out
}

/// Horizontal concatenation `[a b]`.
pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// `R^{-1} B` for upper triangular `R` with nonzero diagonal.
pub(crate) fn solve_upper(r: &CMat, b: &CMat) -> CMat {
    r.solve_upper_triangular(b)
        .expect("triangular factor is nonsingular")
}

/// `R^{-*} B` for upper triangular `R` with nonzero diagonal.
pub(crate) fn solve_upper_adjoint(r: &CMat, b: &CMat) -> CMat {
    r.adjoint()
        .solve_lower_triangular(b)
        .expect("triangular factor is nonsingular")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn randc(rng: &mut ChaCha8Rng, n: usize, k: usize) -> CMat {
        CMat::from_fn(n, k, |_, _| {
            c(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = CMat::zeros(2, 3);
        let b = CMat::zeros(3, 2);
        assert!(matches!(
            real_inner(&a, &b),
            Err(KernelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn herm_skew_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = randc(&mut rng, 4, 4);
        let s = herm(&a).unwrap() + skew(&a).unwrap();
        assert!(fro(&(s - &a)) < 1e-14);
        assert!(herm(&CMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn lyapunov_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = randc(&mut rng, 5, 5);
        let e = HermitianSmall::new(b.adjoint() * &b + CMat::identity(5, 5)).unwrap();
        let z = randc(&mut rng, 5, 5);
        let x = solve_lyapunov(&e, &z).unwrap();
        let res = &x * e.as_mat() + e.as_mat() * &x - &z;
        assert!(fro(&res) < 1e-12 * fro(&z));
    }

    #[test]
    fn lyapunov_singular() {
        let e = HermitianSmall::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            solve_lyapunov(&e, &CMat::identity(2, 2)),
            Err(KernelError::Singular { .. })
        ));
    }

    #[test]
    fn qr_zero_and_orthonormal_input() {
        let (q, r) = qr_compact(&CMat::zeros(5, 2));
        assert!(fro(&(q.adjoint() * &q - CMat::identity(2, 2))) < 1e-14);
        assert_eq!(fro(&r), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (q0, _) = qr_compact(&randc(&mut rng, 6, 3));
        let (q1, r1) = qr_compact(&q0);
        assert!(fro(&(&q1 * &r1 - &q0)) < 1e-14);
        for i in 0..3 {
            assert!((r1[(i, i)].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn qr_against_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (u, _) = qr_compact(&randc(&mut rng, 7, 2));
        let mut a = randc(&mut rng, 7, 3);
        a.set_column(1, &(a.column(0) * c(2.0, -1.0)));
        let (q, r) = qr_against(&a, Some(&u));
        assert!(fro(&(u.adjoint() * &q)) < 1e-14);
        assert!(fro(&(q.adjoint() * &q - CMat::identity(3, 3))) < 1e-14);
        let proj = &a - &u * (u.adjoint() * &a);
        assert!(fro(&(&q * &r - proj)) < 1e-13);
        assert!(r[(1, 1)].norm() == 0.0);
    }

    #[test]
    fn complement_spans_rest() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (u, _) = qr_compact(&randc(&mut rng, 6, 2));
        let w = orth_complement(&u);
        let full = hcat(&u, &w);
        assert!(fro(&(full.adjoint() * &full - CMat::identity(6, 6))) < 1e-13);
    }

    #[test]
    fn eig_factor_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = randc(&mut rng, 8, 3);
        let a = compact_eig_factor(&y);
        let b = compact_eig_psd(&(&y * y.adjoint()), 3).unwrap();
        for i in 0..3 {
            assert!((a.sigma[i] - b.sigma[i]).abs() < 1e-12 * b.sigma[0]);
        }
        assert!(fro(&(&a.u - &b.u)) < 1e-9);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut a = CMat::identity(3, 3);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            compact_eig_psd(&a, 2),
            Err(KernelError::NotHermitian { .. })
        ));
    }
}
