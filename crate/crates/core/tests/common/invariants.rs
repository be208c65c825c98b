//! Geometry invariants as plain functions of a seed, shared by the
//! property tests and the acceptance run.
#![allow(dead_code)]

use super::*;
use nalgebra::DMatrix;
use psdmanopt::cost::{CostModel, EigCost};
use psdmanopt::embedded::{self, EigenPoint, EmbeddedTangent};
use psdmanopt::kernel::{c, compact_eig_factor, compact_eig_psd, solve_lyapunov, CMat, HermitianSmall};
use psdmanopt::quotient::{self, FactorPoint, MetricTag};
use psdmanopt::random::{complex_gaussian, seeded, SeededRng};
use rand::Rng;

macro_rules! ensure {
    ($cond:expr) => {
        if !$cond {
            return Err(format!("line {}: {}", line!(), stringify!($cond)));
        }
    };
}

pub const TAGS: [MetricTag; 3] = [MetricTag::G1, MetricTag::G2, MetricTag::G3];

pub fn dims(rng: &mut SeededRng) -> (usize, usize) {
    let n = rng.random_range(3..=9);
    (n, rng.random_range(1..=3.min(n - 1)))
}

pub fn random_unitary(rng: &mut SeededRng, p: usize) -> CMat {
    let (q, _) = psdmanopt::kernel::qr_compact(&complex_gaussian(rng, p, p));
    q
}

pub fn random_tangent(rng: &mut SeededRng, x: &EigenPoint) -> EmbeddedTangent {
    let z = hermitian(rng, x.n());
    embedded::tangent_project(x, &z)
}

/// Real rank of a set of complex matrices seen as vectors in R^{2k}.
pub fn real_rank(vs: &[CMat]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let k = vs[0].len();
    let m = DMatrix::<f64>::from_fn(2 * k, vs.len(), |i, j| {
        let z = vs[j][i % k];
        if i < k {
            z.re
        } else {
            z.im
        }
    });
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

pub fn tangent_projection_matches_dense_and_is_idempotent(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let (n, p) = dims(&mut rng);
    let x = EigenPoint::from_factor(&complex_gaussian(&mut rng, n, p)).unwrap();
    let z = hermitian(&mut rng, n);
    let t = embedded::tangent_project(&x, &z);
    let want = dense_tangent_projection(x.u(), &z);
    ensure!(rel_mat(&t.to_dense(&x), &want) < 1e-12);
    let tt = embedded::tangent_project(&x, &t.to_dense(&x));
    ensure!(rel_mat(&tt.to_dense(&x), &t.to_dense(&x)) < 1e-12);
    // Residual is orthogonal to the tangent space, and the metric is
    // the ambient Frobenius product.
    let other = random_tangent(&mut rng, &x);
    let resid = &z - t.to_dense(&x);
    ensure!(re_inner(&resid, &other.to_dense(&x)).abs() < 1e-11 * fro(&z) * fro(&other.to_dense(&x)));
    let m = embedded::metric(&t, &other);
    ensure!(rel(m, re_inner(&t.to_dense(&x), &other.to_dense(&x))) < 1e-10 || m.abs() < 1e-12);
Ok(())
}
pub fn manifold_and_vertical_dimensions(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let n = rng.random_range(3..=6);
    let p = rng.random_range(1..=3.min(n - 1));
    let x = EigenPoint::from_factor(&complex_gaussian(&mut rng, n, p)).unwrap();
    // Image of the tangent projection over a basis of Hermitian n x n.
    let mut images = Vec::new();
    for i in 0..n {
        for j in i..n {
            for ph in [c(1.0, 0.0), c(0.0, 1.0)] {
                if i == j && ph.im != 0.0 {
                    continue;
                }
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = ph;
                e[(j, i)] += ph.conj();
                images.push(embedded::tangent_project(&x, &e).to_dense(&x));
            }
        }
    }
    ensure!(real_rank(&images) == embedded::dimension(n, p));
    ensure!(embedded::dimension(n, p) == 2 * n * p - p * p);

    let y = FactorPoint::new(complex_gaussian(&mut rng, n, p)).unwrap();
    for tag in TAGS {
        let verticals: Vec<CMat> = (0..4 * n * p)
            .map(|_| quotient::vertical_project(&y, tag, &complex_gaussian(&mut rng, n, p)).unwrap())
            .collect();
        ensure!(real_rank(&verticals) == quotient::vertical_dimension(p));
        let horizontals: Vec<CMat> = (0..4 * n * p)
            .map(|_| quotient::horizontal_project(&y, tag, &complex_gaussian(&mut rng, n, p)).unwrap())
            .collect();
        ensure!(real_rank(&horizontals) == 2 * n * p - p * p);
    }
Ok(())
}
pub fn horizontal_projection_is_metric_orthogonal(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let (n, p) = dims(&mut rng);
    let y = FactorPoint::new(complex_gaussian(&mut rng, n, p)).unwrap();
    for tag in TAGS {
        let a = complex_gaussian(&mut rng, n, p);
        let h = quotient::horizontal_project(&y, tag, &a).unwrap();
        let hh = quotient::horizontal_project(&y, tag, &h).unwrap();
        ensure!(rel_mat(&hh, &h) < 1e-10);
        let v = quotient::vertical_project(&y, tag, &complex_gaussian(&mut rng, n, p)).unwrap();
        let scale = quotient::metric(&y, tag, &h, &h).sqrt() * quotient::metric(&y, tag, &v, &v).sqrt();
        ensure!(quotient::metric(&y, tag, &h, &v).abs() < 1e-10 * scale.max(1e-300));
        let vv = quotient::vertical_project(&y, tag, &v).unwrap();
        ensure!(rel_mat(&vv, &v) < 1e-10);
    }
Ok(())
}
pub fn quotient_objects_are_unitarily_equivariant(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let (n, p) = dims(&mut rng);
    let cost = EigCost::planted(n, p, &mut rng).unwrap();
    let y0 = complex_gaussian(&mut rng, n, p);
    let q = random_unitary(&mut rng, p);
    let y = FactorPoint::new(y0.clone()).unwrap();
    let yq = FactorPoint::new(&y0 * &q).unwrap();
    ensure!(rel(cost.value(&yq.to_lowrank()), cost.value(&y.to_lowrank())) < 1e-10);
    for tag in TAGS {
        let g = quotient::gradient(&y, tag, &cost);
        let gq = quotient::gradient(&yq, tag, &cost);
        ensure!(rel_mat(&gq, &(&g * &q)) < 1e-9);
        let a = complex_gaussian(&mut rng, n, p);
        let b = complex_gaussian(&mut rng, n, p);
        let ha = quotient::horizontal_project(&y, tag, &a).unwrap();
        let haq = quotient::horizontal_project(&yq, tag, &(&a * &q)).unwrap();
        ensure!(rel_mat(&haq, &(&ha * &q)) < 1e-9);
        let m = quotient::metric(&y, tag, &a, &b);
        let mq = quotient::metric(&yq, tag, &(&a * &q), &(&b * &q));
        ensure!((m - mq).abs() < 1e-9 * quotient::metric(&y, tag, &a, &a).max(1.0));
        let hs = quotient::hessian_apply(&y, tag, &ha, &cost).unwrap();
        let hsq = quotient::hessian_apply(&yq, tag, &haq, &cost).unwrap();
        ensure!(rel_mat(&hsq, &(&hs * &q)) < 1e-8);
    }
Ok(())
}
pub fn lyapunov_residual(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let p = rng.random_range(1..=6);
    let a = complex_gaussian(&mut rng, p + 2, p);
    let e = HermitianSmall::new(a.adjoint() * &a).unwrap();
    let z = complex_gaussian(&mut rng, p, p);
    let x = solve_lyapunov(&e, &z).unwrap();
    let resid = &x * e.as_mat() + e.as_mat() * &x - &z;
    ensure!(fro(&resid) <= 1e-12 * fro(&z));
Ok(())
}
pub fn lift_and_unlift_are_inverse_isometries(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let (n, p) = dims(&mut rng);
    let y = FactorPoint::new(complex_gaussian(&mut rng, n, p)).unwrap();
    let x = y.eigen_point().unwrap();
    let xi = quotient::horizontal_project(&y, MetricTag::G3, &complex_gaussian(&mut rng, n, p)).unwrap();
    let zeta = quotient::lift(&y, &x, &xi);
    let dense = &xi * y.y().adjoint() + y.y() * xi.adjoint();
    ensure!(rel_mat(&zeta.to_dense(&x), &dense) < 1e-11);
    ensure!(rel_mat(&quotient::unlift(&y, &x, &zeta), &xi) < 1e-11);
    let t = random_tangent(&mut rng, &x);
    let back = quotient::lift(&y, &x, &quotient::unlift(&y, &x, &t));
    ensure!(rel_mat(&back.to_dense(&x), &t.to_dense(&x)) < 1e-11);
    let g3 = quotient::metric(&y, MetricTag::G3, &xi, &xi);
    ensure!(rel(g3, embedded::metric(&zeta, &zeta)) < 1e-10);
Ok(())
}
pub fn compact_eig_matches_jacobi(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let (n, p) = dims(&mut rng);
    let y = complex_gaussian(&mut rng, n, p);
    let dense = &y * y.adjoint();
    let (vals, vecs) = jacobi_eig(&dense);
    for e in [compact_eig_factor(&y), compact_eig_psd(&dense, p).unwrap()] {
        for k in 0..p {
            ensure!(rel(e.sigma[k], vals[k]) < 1e-11);
            // Same eigenvector up to phase.
            let overlap = (vecs.column(k).adjoint() * e.u.column(k))[(0, 0)].norm();
            ensure!((overlap - 1.0).abs() < 1e-8);
        }
        let rebuilt = &e.u * CMat::from_diagonal(&nalgebra::DVector::from_iterator(p, e.sigma.iter().map(|&s| c(s, 0.0)))) * e.u.adjoint();
        ensure!(rel_mat(&rebuilt, &dense) < 1e-11);
    }
Ok(())
}
pub fn transport_lands_in_tangent_space(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let (n, p) = dims(&mut rng);
    let x1 = EigenPoint::from_factor(&complex_gaussian(&mut rng, n, p)).unwrap();
    let xi = random_tangent(&mut rng, &x1);
    let x2 = embedded::retract(&x1, &xi, 0.1).unwrap();
    let nu = random_tangent(&mut rng, &x1);
    let t = embedded::vector_transport(&x1, &x2, &nu);
    let tt = embedded::tangent_project(&x2, &t.to_dense(&x2));
    ensure!(rel_mat(&tt.to_dense(&x2), &t.to_dense(&x2)) < 1e-11);
    let full = embedded::projection_transport(&x1, &x2, &nu);
    let want = dense_tangent_projection(x2.u(), &nu.to_dense(&x1));
    ensure!(rel_mat(&full.to_dense(&x2), &want) < 1e-10);
Ok(())
}

/// First-order retraction error ratio `e(1e-2)/e(5e-3)` should be near 4;
/// the gap between the two retractions is third order, ratio near 8.
pub fn retraction_taylor(seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let x = EigenPoint::from_factor(&complex_gaussian(&mut rng, 8, 3)).unwrap();
    let xi = random_tangent(&mut rng, &x);
    let s = embedded::norm(&xi);
    let xi = xi.scaled(x.sigma()[2] / s);
    let err = |t: f64| {
        let r = embedded::retract(&x, &xi, t).unwrap().to_dense();
        let r2 = embedded::second_order_retract(&x, &xi, t).unwrap().to_dense();
        let lin = x.to_dense() + xi.to_dense(&x) * c(t, 0.0);
        (fro(&(&r - lin)), fro(&(r - r2)))
    };
    let (a1, b1) = err(1e-2);
    let (a2, b2) = err(5e-3);
    let (first, second) = (a1 / a2, b1 / b2);
    ensure!((first - 4.0).abs() < 0.2);
    ensure!(second > 7.0);
    Ok(())
}

pub type Invariant = fn(u64) -> Result<(), String>;

pub const ALL: [(&str, Invariant); 9] = [
    ("tangent_projection_matches_dense_and_is_idempotent", tangent_projection_matches_dense_and_is_idempotent),
    ("manifold_and_vertical_dimensions", manifold_and_vertical_dimensions),
    ("horizontal_projection_is_metric_orthogonal", horizontal_projection_is_metric_orthogonal),
    ("quotient_objects_are_unitarily_equivariant", quotient_objects_are_unitarily_equivariant),
    ("lyapunov_residual", lyapunov_residual),
    ("lift_and_unlift_are_inverse_isometries", lift_and_unlift_are_inverse_isometries),
    ("compact_eig_matches_jacobi", compact_eig_matches_jacobi),
    ("transport_lands_in_tangent_space", transport_lands_in_tangent_space),
    ("retraction_taylor", retraction_taylor),
];
