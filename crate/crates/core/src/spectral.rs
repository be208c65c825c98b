//! Spectra of Riemannian Hessians on the quotient, assembled in a
//! metric-orthonormal basis of the horizontal space.

use crate::cost::{CostModel, EigCost};
use crate::embedded::{self, EigenPoint, EmbeddedTangent};
use crate::error::GeometryError;
use crate::kernel::{c, fro, orth_complement, qr_compact, scale_columns, CMat};
use crate::lowrank::HermLowRank;
use crate::quotient::{self, FactorPoint, MetricTag};
use crate::random::complex_gaussian;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("basis has {found} vectors, expected {expected}")]
    BasisDimension { found: usize, expected: usize },
    #[error("assembled Hessian is not symmetric (relative asymmetry {0:.3e})")]
    Asymmetric(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid study parameter: {0}")]
    InvalidParameter(String),
}

/// Relative asymmetry above which an assembled Hessian is rejected.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Hermitian basis of `H^p` as a real vector space: `E_ii`,
/// `E_ij + E_ji`, `i(E_ij − E_ji)`.
fn hermitian_basis(p: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in i..p {
            if i == j {
                let mut m = CMat::zeros(p, p);
                m[(i, i)] = c(1.0, 0.0);
                out.push(m);
            } else {
                let mut m = CMat::zeros(p, p);
                m[(i, j)] = c(1.0, 0.0);
                m[(j, i)] = c(1.0, 0.0);
                out.push(m);
                let mut m = CMat::zeros(p, p);
                m[(i, j)] = c(0.0, 1.0);
                m[(j, i)] = c(0.0, -1.0);
                out.push(m);
            }
        }
    }
    out
}

/// Orthonormal basis of the horizontal space at `y` under `tag`.
pub fn horizontal_basis(y: &FactorPoint, tag: MetricTag) -> Result<Vec<CMat>, SpectralError> {
    let (n, p) = (y.n(), y.p());
    let mut raw = Vec::with_capacity(2 * n * p - p * p);
    for s in hermitian_basis(p) {
        raw.push(match tag {
            MetricTag::G1 => y.y() * y.gram_solve(&s),
            MetricTag::G2 | MetricTag::G3 => y.y() * s,
        });
    }
    let (q, _) = qr_compact(y.y());
    let perp = orth_complement(&q);
    for a in 0..n - p {
        for j in 0..p {
            for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
                let mut k = CMat::zeros(n, p);
                k.set_column(j, &(perp.column(a) * phase));
                raw.push(k);
            }
        }
    }
    // Gram-Schmidt with each vector's metric representative carried along,
    // so every inner product is a plain Frobenius one.
    let mut basis: Vec<CMat> = Vec::with_capacity(raw.len());
    let mut reps: Vec<CMat> = Vec::with_capacity(raw.len());
    for mut v in raw {
        let mut rv = quotient::metric_riesz(y, tag, &v);
        for _ in 0..2 {
            for (b, rb) in basis.iter().zip(&reps) {
                let coef = re_inner(&v, rb);
                v -= b * c(coef, 0.0);
                rv -= rb * c(coef, 0.0);
            }
        }
        let nv = re_inner(&v, &rv).max(0.0).sqrt();
        if nv > 1e-10 {
            basis.push(v / c(nv, 0.0));
            reps.push(rv / c(nv, 0.0));
        }
    }
    let expected = embedded::dimension(n, p);
    if basis.len() != expected {
        return Err(SpectralError::BasisDimension {
            found: basis.len(),
            expected,
        });
    }
    Ok(basis)
}

/// Matrix of `g(Hess[e_a], e_b)` in an orthonormal basis, symmetrized after
/// an asymmetry check.
pub fn assemble_hessian(
    y: &FactorPoint,
    tag: MetricTag,
    cost: &dyn CostModel,
    basis: &[CMat],
) -> Result<DMatrix<f64>, SpectralError> {
    let d = basis.len();
    let images: Vec<CMat> = basis
        .iter()
        .map(|e| quotient::hessian_apply(y, tag, e, cost))
        .collect::<Result<_, _>>()?;
    let reps: Vec<CMat> = basis.iter().map(|e| quotient::metric_riesz(y, tag, e)).collect();
    let m = flatten(&images).transpose() * flatten(&reps);
    debug_assert_eq!(m.nrows(), d);
    let asym = (&m - m.transpose()).norm() / m.norm().max(f64::MIN_POSITIVE);
    if asym > SYMMETRY_TOL {
        return Err(SpectralError::Asymmetric(asym));
    }
    Ok((&m + m.transpose()) * 0.5)
}

fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Columns are the real and imaginary parts of each matrix, stacked.
fn flatten(vs: &[CMat]) -> DMatrix<f64> {
    let len = vs.first().map_or(0, |v| v.len());
    DMatrix::from_fn(2 * len, vs.len(), |i, j| {
        let z = vs[j][i / 2];
        if i % 2 == 0 { z.re } else { z.im }
    })
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Extremal eigenvalues of a Hessian at one point.
#[derive(Debug, Clone)]
pub struct RayleighReport {
    pub tag: MetricTag,
    pub epsilon: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    /// `‖Y Y* − X̂‖_F`.
    pub dist: f64,
    pub eigenvalues: Vec<f64>,
}

pub const SPECTRUM_HEADER: &str = "tag,epsilon,lambda_min,lambda_max,kappa,dist";

impl RayleighReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.tag, self.epsilon, self.lambda_min, self.lambda_max, self.kappa, self.dist
        )
    }
}

/// Assembles the Hessian of `cost` at `y` and reports its spectrum.
pub fn hessian_spectrum(
    y: &FactorPoint,
    tag: MetricTag,
    cost: &dyn CostModel,
) -> Result<Vec<f64>, SpectralError> {
    let basis = horizontal_basis(y, tag)?;
    Ok(symmetric_eigenvalues(assemble_hessian(
        y, tag, cost, &basis,
    )?))
}

/// A planted minimizer `X̂ = Û Σ̂ Û*` for the eigenvalue cost `½‖X − X̂‖²`.
#[derive(Debug, Clone)]
pub struct PlantedTarget {
    pub u: CMat,
    pub sigma: Vec<f64>,
}

impl PlantedTarget {
    /// Random `Û`, eigenvalues spread evenly over `[lo, hi]`.
    pub fn random<R: Rng + ?Sized>(n: usize, r: usize, lo: f64, hi: f64, rng: &mut R) -> Self {
        let (u, _) = qr_compact(&complex_gaussian(rng, n, r));
        let sigma = (0..r)
            .map(|i| {
                if r == 1 {
                    hi
                } else {
                    hi - (hi - lo) * i as f64 / (r - 1) as f64
                }
            })
            .collect();
        Self { u, sigma }
    }

    pub fn factor(&self) -> CMat {
        let roots: Vec<f64> = self.sigma.iter().map(|s| s.sqrt()).collect();
        scale_columns(&self.u, &roots)
    }

    pub fn cost(&self) -> EigCost {
        EigCost::from_factor(self.factor())
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }

    /// A factor at distance governed by `eps`. For `p = r` the planted
    /// factor is moved by `eps` along a random unit direction; for `p > r`
    /// extra columns `eps · q` with `q` orthonormal and orthogonal to `Û`.
    pub fn perturbed_factor<R: Rng + ?Sized>(&self, p: usize, eps: f64, rng: &mut R) -> CMat {
        let (n, r) = self.u.shape();
        let base = self.factor();
        if p == r {
            let d = complex_gaussian(rng, n, r);
            let nd = fro(&d);
            return base + d * c(eps / nd, 0.0);
        }
        let (q, _) = crate::kernel::qr_against(&complex_gaussian(rng, n, p - r), Some(&self.u));
        crate::kernel::hcat(&base, &(q * c(eps, 0.0)))
    }
}

/// Hessian spectra of the eigenvalue cost near a planted minimizer, one
/// report per `eps`.
pub fn rq_limit_study<R: Rng + ?Sized>(
    target: &PlantedTarget,
    p: usize,
    tag: MetricTag,
    schedule: &[f64],
    rng: &mut R,
) -> Result<Vec<RayleighReport>, SpectralError> {
    let r = target.sigma.len();
    if p < r || p > target.u.nrows() {
        return Err(SpectralError::InvalidParameter(format!(
            "p = {p} with planted rank {r}"
        )));
    }
    let cost = target.cost();
    let truth = HermLowRank::gram_of(&target.factor());
    schedule
        .iter()
        .map(|&eps| {
            let y = FactorPoint::new(target.perturbed_factor(p, eps, rng))?;
            let eig = hessian_spectrum(&y, tag, &cost)?;
            let (lmin, lmax) = (eig[0], eig[eig.len() - 1]);
            let dist = y.to_lowrank().plus(&truth.scaled(-1.0)).norm_sq().sqrt();
            Ok(RayleighReport {
                tag,
                epsilon: eps,
                lambda_min: lmin,
                lambda_max: lmax,
                kappa: lmax / lmin,
                dist,
                eigenvalues: eig,
            })
        })
        .collect()
}

fn random_tangent<R: Rng + ?Sized>(x: &EigenPoint, rng: &mut R) -> EmbeddedTangent {
    let (n, p) = (x.n(), x.rank());
    let h = complex_gaussian(rng, p, p);
    let h = (&h + h.adjoint()) * c(0.5, 0.0);
    let up = complex_gaussian(rng, n, p);
    let up = &up - x.u() * (x.u().adjoint() * &up);
    let t = EmbeddedTangent { h, up };
    t.scaled(1.0 / embedded::norm(&t))
}

/// Largest relative gap between `g(Hess ξ, ξ)` and the central second
/// difference of `f` along the second-order retraction, over random unit
/// tangent directions.
pub fn fd_hessian_check_embedded<R: Rng + ?Sized>(
    x: &EigenPoint,
    cost: &dyn CostModel,
    directions: usize,
    h: f64,
    rng: &mut R,
) -> Result<f64, GeometryError> {
    let f0 = cost.value(&x.to_lowrank());
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let xi = random_tangent(x, rng);
        let exact = embedded::metric(&embedded::hessian_apply(x, &xi, cost), &xi);
        let fp = cost.value(&embedded::second_order_retract(x, &xi, h)?.to_lowrank());
        let fm = cost.value(&embedded::second_order_retract(x, &xi, -h)?.to_lowrank());
        let fd = (fp - 2.0 * f0 + fm) / (h * h);
        worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

/// Largest relative gap between `g1(Hess ξ, η)` and the mixed central
/// difference of `F(Y) = f(Y Y*)` over random horizontal pairs.
pub fn fd_hessian_check_g1<R: Rng + ?Sized>(
    y: &FactorPoint,
    cost: &dyn CostModel,
    pairs: usize,
    h: f64,
    rng: &mut R,
) -> Result<f64, GeometryError> {
    let (n, p) = (y.n(), y.p());
    let f = |z: &CMat| cost.value(&HermLowRank::gram_of(z));
    let unit = |rng: &mut R| -> Result<CMat, GeometryError> {
        let v = quotient::horizontal_project(y, MetricTag::G1, &complex_gaussian(rng, n, p))?;
        let nv = fro(&v);
        Ok(v / c(nv, 0.0))
    };
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let xi = unit(rng)?;
        let eta = unit(rng)?;
        let exact = quotient::metric(
            y,
            MetricTag::G1,
            &quotient::hessian_apply(y, MetricTag::G1, &xi, cost)?,
            &eta,
        );
        let at = |s: f64, t: f64| f(&(y.y() + &xi * c(s, 0.0) + &eta * c(t, 0.0)));
        let fd = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        let scale = fro(&quotient::hessian_apply(y, MetricTag::G1, &xi, cost)?).max(1.0);
        worst = worst.max((fd - exact).abs() / scale);
    }
    Ok(worst)
}
