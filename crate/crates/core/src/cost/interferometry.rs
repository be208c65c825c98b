use super::completion::Pattern;
use super::{CostError, CostModel, Measurement};
use crate::kernel::{c, fro, CMat, C64};
use crate::lowrank::HermLowRank;
use crate::random::complex_gaussian;
use rand::Rng;

/// `f(X) = ½‖P_Ω(F X F* − d d*)‖²` with `F` of size m x n and `Ω` a
/// symmetric pattern on m x m that contains the diagonal.
#[derive(Debug, Clone)]
pub struct InterferometryCost {
    f: CMat,
    d: Vec<C64>,
    pattern: Pattern,
    obs: Measurement,
    signal: Option<CMat>,
}

impl InterferometryCost {
    pub fn new(f: CMat, d: Vec<C64>, pattern: Pattern) -> Result<Self, CostError> {
        let m = f.nrows();
        if d.len() != m || pattern.dim() != m {
            return Err(CostError::InvalidParameter(format!(
                "F has {m} rows, d has {}, pattern is {}",
                d.len(),
                pattern.dim()
            )));
        }
        if !(0..m).all(|i| pattern.contains(i, i)) {
            return Err(CostError::InvalidParameter(
                "pattern must contain the diagonal".into(),
            ));
        }
        let dv = CMat::from_column_slice(m, 1, &d);
        let obs = Measurement::Complex(pattern.sample(&HermLowRank::gram_of(&dv)));
        Ok(Self {
            f,
            d,
            pattern,
            obs,
            signal: None,
        })
    }

    /// Gaussian `F` with variance `1/m`, unit-norm Gaussian signal `x`, `d = F x`.
    pub fn planted<R: Rng + ?Sized>(
        m: usize,
        n: usize,
        density: f64,
        rng: &mut R,
    ) -> Result<Self, CostError> {
        if m == 0 || n == 0 {
            return Err(CostError::InvalidParameter("empty dimensions".into()));
        }
        // Entries of variance 1/m, so F*F is close to the identity and the
        // cost has the same scale as the eig instances.
        let f = complex_gaussian(rng, m, n) * c(1.0 / (m as f64).sqrt(), 0.0);
        let mut x = complex_gaussian(rng, n, 1);
        let nx = fro(&x);
        x /= c(nx, 0.0);
        let d: Vec<C64> = (&f * &x).iter().copied().collect();
        let pattern = Pattern::bernoulli(m, density, true, rng)?;
        let mut cost = Self::new(f, d, pattern)?;
        cost.signal = Some(x);
        Ok(cost)
    }

    pub fn matrix(&self) -> &CMat {
        &self.f
    }

    pub fn data(&self) -> &[C64] {
        &self.d
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn values(&self) -> &[C64] {
        match &self.obs {
            Measurement::Complex(v) => v,
            _ => unreachable!(),
        }
    }
}

impl CostModel for InterferometryCost {
    fn n(&self) -> usize {
        self.f.ncols()
    }

    fn name(&self) -> &'static str {
        "interferometry"
    }

    fn measure(&self, m: &HermLowRank) -> Measurement {
        let fm = HermLowRank::new(&self.f * m.basis(), m.core().clone());
        Measurement::Complex(self.pattern.sample(&fm))
    }

    fn observations(&self) -> &Measurement {
        &self.obs
    }

    fn adjoint_apply(&self, w: &Measurement, v: &CMat) -> CMat {
        match w {
            Measurement::Complex(w) => {
                self.f.adjoint() * self.pattern.scatter_apply(w, &(&self.f * v))
            }
            _ => panic!("interferometry cost expects complex measurements"),
        }
    }

    fn truth(&self) -> Option<HermLowRank> {
        self.signal.as_ref().map(HermLowRank::gram_of)
    }
}
