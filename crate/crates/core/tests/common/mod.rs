//! Dense reference implementations used as oracles by the integration tests.
#![allow(dead_code)]

pub mod invariants;

use psdmanopt::kernel::{c, CMat, C64};
use psdmanopt::random::{complex_gaussian, SeededRng};

pub fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn rel_mat(a: &CMat, b: &CMat) -> f64 {
    fro(&(a - b)) / fro(b).max(1e-300)
}

pub fn hermitian(rng: &mut SeededRng, n: usize) -> CMat {
    let a = complex_gaussian(rng, n, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Cyclic complex Jacobi eigensolver; eigenvalues descending with
/// eigenvectors as columns.
pub fn jacobi_eig(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = CMat::identity(n, n);
    let scale = fro(&a).max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        if off.sqrt() < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                // Phase step: scale index q so that a_pq becomes real.
                let e = apq / mag;
                for k in 0..n {
                    a[(k, q)] *= e.conj();
                }
                for k in 0..n {
                    a[(q, k)] *= e;
                }
                for k in 0..n {
                    v[(k, q)] *= e.conj();
                }
                let (alpha, beta, b) = (a[(p, p)].re, a[(q, q)].re, a[(p, q)].re);
                let theta = 0.5 * (2.0 * b).atan2(beta - alpha);
                let (cs, sn) = (theta.cos(), theta.sin());
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * cs - y * sn;
                    a[(k, q)] = x * sn + y * cs;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = x * cs - y * sn;
                    a[(q, k)] = x * sn + y * cs;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * cs - y * sn;
                    v[(k, q)] = x * sn + y * cs;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &v.column(i));
    }
    (vals, vecs)
}

/// Orthogonal projection of a Hermitian `z` onto the tangent space at a
/// rank-p matrix with orthonormal range basis `u`.
pub fn dense_tangent_projection(u: &CMat, z: &CMat) -> CMat {
    let n = u.nrows();
    let pu = u * u.adjoint();
    let perp = CMat::identity(n, n) - &pu;
    &pu * z * &pu + &perp * z * &pu + &pu * z * &perp
}

/// Dense `A(X)` and `A*(w)` for the four least-squares costs.
pub trait DenseModel {
    fn apply(&self, x: &CMat) -> Vec<C64>;
    fn adjoint(&self, w: &[C64]) -> CMat;
    fn obs(&self) -> Vec<C64>;

    fn value(&self, x: &CMat) -> f64 {
        let r: Vec<C64> = self
            .apply(x)
            .iter()
            .zip(self.obs())
            .map(|(a, b)| a - b)
            .collect();
        0.5 * r.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    fn grad(&self, x: &CMat) -> CMat {
        let r: Vec<C64> = self
            .apply(x)
            .iter()
            .zip(self.obs())
            .map(|(a, b)| a - b)
            .collect();
        self.adjoint(&r)
    }

    fn hess(&self, zeta: &CMat) -> CMat {
        self.adjoint(&self.apply(zeta))
    }
}

pub struct DenseEig {
    pub a: CMat,
}

impl DenseModel for DenseEig {
    fn apply(&self, x: &CMat) -> Vec<C64> {
        x.iter().copied().collect()
    }
    fn adjoint(&self, w: &[C64]) -> CMat {
        CMat::from_column_slice(self.a.nrows(), self.a.ncols(), w)
    }
    fn obs(&self) -> Vec<C64> {
        self.a.iter().copied().collect()
    }
}

/// Entry mask on an n x n (or m x m) grid.
pub struct DenseMask {
    pub mask: Vec<(usize, usize)>,
    pub dim: usize,
    pub target: CMat,
    /// Optional `F`; the sampled matrix is then `F X F*`.
    pub f: Option<CMat>,
}

impl DenseModel for DenseMask {
    fn apply(&self, x: &CMat) -> Vec<C64> {
        let full = match &self.f {
            Some(f) => f * x * f.adjoint(),
            None => x.clone(),
        };
        self.mask.iter().map(|&(i, j)| full[(i, j)]).collect()
    }
    fn adjoint(&self, w: &[C64]) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (&(i, j), &v) in self.mask.iter().zip(w) {
            m[(i, j)] += v;
        }
        match &self.f {
            Some(f) => f.adjoint() * m * f,
            None => m,
        }
    }
    fn obs(&self) -> Vec<C64> {
        self.mask
            .iter()
            .map(|&(i, j)| self.target[(i, j)])
            .collect()
    }
}

/// Unnormalized DFT matrix `F_jk = exp(-2πi jk/n)`.
pub fn dft_matrix(n: usize) -> CMat {
    CMat::from_fn(n, n, |j, k| {
        let ang = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
        c(ang.cos(), ang.sin())
    })
}

pub struct DensePhaseLift {
    pub z: Vec<CMat>,
    pub b: Vec<f64>,
}

impl DensePhaseLift {
    pub fn new(masks: &[Vec<C64>], b: Vec<f64>) -> Self {
        let n = masks[0].len();
        let f = dft_matrix(n);
        let z = masks
            .iter()
            .map(|m| {
                let d = CMat::from_diagonal(&nalgebra::DVector::from_column_slice(m));
                &f * d
            })
            .collect();
        Self { z, b }
    }
}

impl DenseModel for DensePhaseLift {
    fn apply(&self, x: &CMat) -> Vec<C64> {
        let mut out = Vec::new();
        for z in &self.z {
            let m = z * x * z.adjoint();
            out.extend((0..m.nrows()).map(|j| m[(j, j)]));
        }
        out
    }
    fn adjoint(&self, w: &[C64]) -> CMat {
        let n = self.z[0].nrows();
        let mut out = CMat::zeros(n, n);
        for (i, z) in self.z.iter().enumerate() {
            let d = CMat::from_diagonal(&nalgebra::DVector::from_column_slice(
                &w[i * n..(i + 1) * n],
            ));
            out += z.adjoint() * d * z;
        }
        out
    }
    fn obs(&self) -> Vec<C64> {
        self.b.iter().map(|&v| c(v, 0.0)).collect()
    }
}

use psdmanopt::cost::{CompletionCost, CostModel, EigCost, InterferometryCost, PhaseLiftCost};
use psdmanopt::lowrank::HermLowRank;
use psdmanopt::random::seeded;
use rand::Rng;

pub const COST_KINDS: [&str; 4] = ["eig", "completion", "phaselift", "interferometry"];

/// Builds a small instance of `kind` together with its dense oracle.
pub fn small_instance(kind: &str, seed: u64) -> (Box<dyn CostModel>, Box<dyn DenseModel>) {
    let mut rng = seeded(seed);
    match kind {
        "eig" => {
            let n = rng.random_range(4..=40);
            let r = rng.random_range(1..=3);
            let cost = EigCost::planted(n, r, &mut rng).unwrap();
            let g = cost.target_factor().clone();
            (
                Box::new(cost),
                Box::new(DenseEig {
                    a: &g * g.adjoint(),
                }),
            )
        }
        "completion" => {
            let n = rng.random_range(4..=40);
            let cost = CompletionCost::planted(n, 2, 0.6, &mut rng).unwrap();
            let mask: Vec<(usize, usize)> = cost.pattern().entries().collect();
            let target = cost.truth().unwrap().to_dense();
            (
                Box::new(cost),
                Box::new(DenseMask {
                    mask,
                    dim: n,
                    target,
                    f: None,
                }),
            )
        }
        "phaselift" => {
            let rows = rng.random_range(2..=8);
            let cols = rng.random_range(2..=8);
            let masks = rng.random_range(1..=4);
            let cost = PhaseLiftCost::planted(rows, cols, masks, &mut rng).unwrap();
            let dense = DensePhaseLift::new(cost.masks(), cost.intensities().to_vec());
            (Box::new(cost), Box::new(dense))
        }
        "interferometry" => {
            let n = rng.random_range(3..=20);
            let m = rng.random_range(n..=40);
            let cost = InterferometryCost::planted(m, n, 0.7, &mut rng).unwrap();
            let mask: Vec<(usize, usize)> = cost.pattern().entries().collect();
            let d = CMat::from_column_slice(m, 1, cost.data());
            let target = &d * d.adjoint();
            let f = Some(cost.matrix().clone());
            (
                Box::new(cost),
                Box::new(DenseMask {
                    mask,
                    dim: m,
                    target,
                    f,
                }),
            )
        }
        _ => panic!("unknown cost kind {kind}"),
    }
}

/// Largest relative discrepancy between a cost and its dense oracle on
/// value, full gradient and one Hessian action, at a random point.
pub fn cost_oracle_discrepancy(kind: &str, seed: u64) -> f64 {
    let (cost, dense) = small_instance(kind, seed);
    let n = cost.n();
    let mut rng = seeded(seed ^ 0x5eed);
    let p = rng.random_range(1..=3.min(n));
    let y = complex_gaussian(&mut rng, n, p);
    let x = HermLowRank::gram_of(&y);
    let xd = &y * y.adjoint();
    let eye = CMat::identity(n, n);
    let e_val = rel(cost.value(&x), dense.value(&xd));
    let res = cost.residual(&x);
    let e_grad = rel_mat(&cost.grad_apply(&res, &eye), &dense.grad(&xd));
    let b = complex_gaussian(&mut rng, n, p);
    let zeta = HermLowRank::sym(&y, &b);
    let zd = &y * b.adjoint() + &b * y.adjoint();
    let e_hess = rel_mat(&cost.hess_apply(&zeta, &eye), &dense.hess(&zd));
    e_val.max(e_grad).max(e_hess)
}
