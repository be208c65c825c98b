use super::{smallest_positive_root, CostError, CostModel, Measurement};
use crate::kernel::{c, compact_eig_psd, hcat, inner, scale_columns, CMat};
use crate::lowrank::{triangular_factor, HermLowRank};
use crate::random::complex_gaussian;
use rand::Rng;

/// `f(X) = ½‖X − A‖²` for a Hermitian PSD target `A = G G*`.
#[derive(Debug, Clone)]
pub struct EigCost {
    factor: CMat,
    target: Measurement,
}

impl EigCost {
    pub fn from_factor(g: CMat) -> Self {
        let target = Measurement::Matrix(HermLowRank::gram_of(&g));
        Self { factor: g, target }
    }

    /// Factors a dense PSD target through its eigendecomposition.
    pub fn from_dense(a: &CMat) -> Result<Self, CostError> {
        let n = a.nrows();
        let e = compact_eig_psd(a, n).map_err(|e| CostError::InvalidParameter(e.to_string()))?;
        let (vals, _) = crate::kernel::hermitian_eig_desc(a);
        let floor = vals.last().copied().unwrap_or(0.0);
        if floor < -1e-10 * vals[0].abs().max(1.0) {
            return Err(CostError::InvalidParameter(format!(
                "target is indefinite (eigenvalue {floor:.3e})"
            )));
        }
        let r = e.numerical_rank();
        let roots: Vec<f64> = e.sigma[..r].iter().map(|s| s.sqrt()).collect();
        Ok(Self::from_factor(scale_columns(
            &e.u.columns(0, r).into_owned(),
            &roots,
        )))
    }

    /// Random rank-`r` target `G G*` with `G` complex Gaussian scaled by `1/√n`.
    pub fn planted<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<Self, CostError> {
        if r == 0 || r > n {
            return Err(CostError::InvalidParameter(format!("rank {r} for n={n}")));
        }
        let g = complex_gaussian(rng, n, r) * c(1.0 / (n as f64).sqrt(), 0.0);
        Ok(Self::from_factor(g))
    }

    pub fn target_factor(&self) -> &CMat {
        &self.factor
    }
}

impl CostModel for EigCost {
    fn n(&self) -> usize {
        self.factor.nrows()
    }

    fn name(&self) -> &'static str {
        "eig"
    }

    fn measure(&self, m: &HermLowRank) -> Measurement {
        Measurement::Matrix(m.clone())
    }

    fn observations(&self) -> &Measurement {
        &self.target
    }

    fn adjoint_apply(&self, w: &Measurement, v: &CMat) -> CMat {
        match w {
            Measurement::Matrix(m) => m.apply(v),
            _ => panic!("eig cost expects matrix measurements"),
        }
    }

    /// Same polynomial as the provided method, with every coefficient
    /// read off one triangular factor of `[Y η G]`.
    fn quartic_step(&self, y: &CMat, eta: &CMat) -> f64 {
        let (p, r) = (y.ncols(), self.factor.ncols());
        let rr = triangular_factor(&hcat(&hcat(y, eta), &self.factor));
        let (ry, re, rg) = (rr.columns(0, p), rr.columns(p, p), rr.columns(2 * p, r));
        let c0 = ry * ry.adjoint() - rg * rg.adjoint();
        let ye = ry * re.adjoint();
        let c1 = &ye + ye.adjoint();
        let c2 = re * re.adjoint();
        let d4 = inner(&c2, &c2);
        let d3 = 2.0 * inner(&c2, &c1);
        let d2 = 2.0 * inner(&c2, &c0) + inner(&c1, &c1);
        let d1 = 2.0 * inner(&c1, &c0);
        smallest_positive_root([d1, 2.0 * d2, 3.0 * d3, 4.0 * d4]).unwrap_or(1.0)
    }

    fn truth(&self) -> Option<HermLowRank> {
        Some(HermLowRank::gram_of(&self.factor))
    }
}
