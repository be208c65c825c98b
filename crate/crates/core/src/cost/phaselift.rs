use super::{CostError, CostModel, Measurement};
use crate::kernel::{c, fro, CMat, C64};
use crate::lowrank::HermLowRank;
use crate::random::complex_gaussian;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Coded-diffraction PhaseLift: `A(X)_i = diag(Z_i X Z_i*)` with
/// `Z_i = DFT · Diag(m_i)`. The DFT is the unnormalized length-n transform
/// of the flattened image.
pub struct PhaseLiftCost {
    n: usize,
    masks: Vec<Vec<C64>>,
    obs: Measurement,
    signal: Option<CMat>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PhaseLiftCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseLiftCost")
            .field("n", &self.n)
            .field("masks", &self.masks.len())
            .finish()
    }
}

impl PhaseLiftCost {
    pub fn new(masks: Vec<Vec<C64>>, intensities: Vec<f64>) -> Result<Self, CostError> {
        let n = masks.first().map_or(0, |m| m.len());
        if n == 0 || masks.iter().any(|m| m.len() != n) {
            return Err(CostError::InvalidParameter(
                "masks must be nonempty and equal length".into(),
            ));
        }
        if intensities.len() != n * masks.len() {
            return Err(CostError::InvalidParameter(format!(
                "{} intensities for {} masks of length {n}",
                intensities.len(),
                masks.len()
            )));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self {
            n,
            masks,
            obs: Measurement::Real(intensities),
            signal: None,
            fwd,
            inv,
        })
    }

    /// Unit-norm complex Gaussian image of `rows x cols` pixels observed
    /// through `n_masks` complex Gaussian masks.
    pub fn planted<R: Rng + ?Sized>(
        rows: usize,
        cols: usize,
        n_masks: usize,
        rng: &mut R,
    ) -> Result<Self, CostError> {
        let n = rows * cols;
        if n == 0 || n_masks == 0 {
            return Err(CostError::InvalidParameter(
                "empty image or no masks".into(),
            ));
        }
        let mut x = complex_gaussian(rng, n, 1);
        let nx = fro(&x);
        x /= c(nx, 0.0);
        let masks: Vec<Vec<C64>> = (0..n_masks)
            .map(|_| complex_gaussian(rng, n, 1).iter().copied().collect())
            .collect();
        let mut cost = Self::new(masks, vec![0.0; n * n_masks])?;
        let b = cost.measure(&HermLowRank::gram_of(&x));
        cost.obs = b;
        cost.signal = Some(x);
        Ok(cost)
    }

    pub fn masks(&self) -> &[Vec<C64>] {
        &self.masks
    }

    pub fn intensities(&self) -> &[f64] {
        match &self.obs {
            Measurement::Real(v) => v,
            _ => unreachable!(),
        }
    }

    fn coded(&self, mask: &[C64], v: &[C64]) -> Vec<C64> {
        let mut buf: Vec<C64> = mask.iter().zip(v).map(|(m, x)| m * x).collect();
        self.fwd.process(&mut buf);
        buf
    }
}

impl CostModel for PhaseLiftCost {
    fn n(&self) -> usize {
        self.n
    }

    fn name(&self) -> &'static str {
        "phaselift"
    }

    fn measure(&self, m: &HermLowRank) -> Measurement {
        let (w, core) = (m.basis(), m.core());
        let n = self.n;
        let k = w.ncols();
        let mut out = vec![0.0; n * self.masks.len()];
        let mut z = CMat::zeros(n, k);
        for (i, mask) in self.masks.iter().enumerate() {
            for l in 0..k {
                z.set_column(
                    l,
                    &nalgebra::DVector::from_vec(self.coded(mask, w.column(l).as_slice())),
                );
            }
            let zc = &z * core;
            let slot = &mut out[i * n..(i + 1) * n];
            for l in 0..k {
                for j in 0..n {
                    slot[j] += (zc[(j, l)] * z[(j, l)].conj()).re;
                }
            }
        }
        Measurement::Real(out)
    }

    fn observations(&self) -> &Measurement {
        &self.obs
    }

    fn adjoint_apply(&self, w: &Measurement, v: &CMat) -> CMat {
        let w = match w {
            Measurement::Real(w) => w,
            _ => panic!("phaselift cost expects real measurements"),
        };
        let n = self.n;
        let mut out = CMat::zeros(n, v.ncols());
        for (i, mask) in self.masks.iter().enumerate() {
            let wi = &w[i * n..(i + 1) * n];
            for k in 0..v.ncols() {
                let mut z = self.coded(mask, v.column(k).as_slice());
                for (zj, &wj) in z.iter_mut().zip(wi) {
                    *zj *= wj;
                }
                self.inv.process(&mut z);
                let mut col = out.column_mut(k);
                for j in 0..n {
                    col[j] += mask[j].conj() * z[j];
                }
            }
        }
        out
    }

    fn truth(&self) -> Option<HermLowRank> {
        self.signal.as_ref().map(HermLowRank::gram_of)
    }
}
