use super::{CostError, CostModel, Measurement};
use crate::kernel::{c, CMat, C64};
use crate::lowrank::HermLowRank;
use crate::random::complex_gaussian;
use rand::Rng;

/// Symmetric sampling pattern stored row by row.
#[derive(Debug, Clone)]
pub struct Pattern {
    dim: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    /// Position of `(j, i)` for the entry `(i, j)`.
    mirror: Vec<u32>,
}

impl Pattern {
    /// Entries `(i, j)` must come with `(j, i)`; duplicates are removed.
    pub fn new(dim: usize, mut entries: Vec<(usize, usize)>) -> Result<Self, CostError> {
        entries.sort_unstable();
        entries.dedup();
        let mut mirror = Vec::with_capacity(entries.len());
        for &(i, j) in &entries {
            if i >= dim || j >= dim {
                return Err(CostError::InvalidParameter(format!(
                    "entry ({i}, {j}) outside {dim}"
                )));
            }
            match entries.binary_search(&(j, i)) {
                Ok(k) => mirror.push(k as u32),
                Err(_) => {
                    return Err(CostError::InvalidParameter(format!(
                        "pattern misses ({j}, {i})"
                    )))
                }
            }
        }
        let rows = entries.iter().map(|e| e.0 as u32).collect();
        let cols = entries.iter().map(|e| e.1 as u32).collect();
        Ok(Self { dim, rows, cols, mirror })
    }

    /// Each pair `i <= j` kept with probability `density`, mirrored.
    pub fn bernoulli<R: Rng + ?Sized>(
        dim: usize,
        density: f64,
        force_diagonal: bool,
        rng: &mut R,
    ) -> Result<Self, CostError> {
        if !(density > 0.0 && density <= 1.0) {
            return Err(CostError::InvalidParameter(format!(
                "density {density} not in (0, 1]"
            )));
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let keep = rng.random::<f64>() < density || (force_diagonal && i == j);
                if keep {
                    entries.push((i, j));
                    if i != j {
                        entries.push((j, i));
                    }
                }
            }
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let lo = self.rows.partition_point(|&r| (r as usize) < i);
        let hi = self.rows.partition_point(|&r| (r as usize) <= i);
        self.cols[lo..hi].binary_search(&(j as u32)).is_ok()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .map(|(&i, &j)| (i as usize, j as usize))
    }

    /// Entries of `M` on the pattern. Only `i <= j` is computed; the rest
    /// follows from `M` being Hermitian.
    pub fn sample(&self, m: &HermLowRank) -> Vec<C64> {
        let k = m.basis().ncols();
        let wt = m.basis().transpose();
        let wct = (m.basis() * m.core()).transpose();
        let (a, b) = (wct.as_slice(), wt.as_slice());
        let mut out = vec![c(0.0, 0.0); self.len()];
        for (e, (&i, &j)) in self.rows.iter().zip(&self.cols).enumerate() {
            if i > j {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            let ai = &a[i * k..(i + 1) * k];
            let bj = &b[j * k..(j + 1) * k];
            let s: C64 = ai.iter().zip(bj).map(|(x, y)| x * y.conj()).sum();
            out[e] = s;
            out[self.mirror[e] as usize] = s.conj();
        }
        out
    }

    /// `W V` where `W` holds `w` on the pattern and zeros elsewhere.
    pub fn scatter_apply(&self, w: &[C64], v: &CMat) -> CMat {
        let k = v.ncols();
        let vt = v.transpose();
        let src = vt.as_slice();
        let mut out = CMat::zeros(k, self.dim);
        let dst = out.as_mut_slice();
        for ((&i, &j), &wk) in self.rows.iter().zip(&self.cols).zip(w) {
            let (i, j) = (i as usize, j as usize);
            let row = &src[j * k..(j + 1) * k];
            for (d, x) in dst[i * k..(i + 1) * k].iter_mut().zip(row) {
                *d += wk * x;
            }
        }
        out.transpose()
    }
}

/// `f(X) = ½‖P_Ω(X − A)‖²` for a planted low-rank Hermitian `A`.
#[derive(Debug, Clone)]
pub struct CompletionCost {
    pattern: Pattern,
    obs: Measurement,
    truth: Option<CMat>,
}

impl CompletionCost {
    pub fn new(pattern: Pattern, values: Vec<C64>) -> Result<Self, CostError> {
        if values.len() != pattern.len() {
            return Err(CostError::InvalidParameter(format!(
                "{} values for {} sampled entries",
                values.len(),
                pattern.len()
            )));
        }
        Ok(Self {
            pattern,
            obs: Measurement::Complex(values),
            truth: None,
        })
    }

    /// Target `G G*` with `G` complex Gaussian over `√n`, observed on a
    /// symmetric Bernoulli pattern.
    pub fn planted<R: Rng + ?Sized>(
        n: usize,
        r: usize,
        density: f64,
        rng: &mut R,
    ) -> Result<Self, CostError> {
        if r == 0 || r > n {
            return Err(CostError::InvalidParameter(format!("rank {r} for n={n}")));
        }
        let g = complex_gaussian(rng, n, r) * c(1.0 / (n as f64).sqrt(), 0.0);
        let pattern = Pattern::bernoulli(n, density, false, rng)?;
        let values = pattern.sample(&HermLowRank::gram_of(&g));
        let mut cost = Self::new(pattern, values)?;
        cost.truth = Some(g);
        Ok(cost)
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

impl CostModel for CompletionCost {
    fn n(&self) -> usize {
        self.pattern.dim()
    }

    fn name(&self) -> &'static str {
        "completion"
    }

    fn measure(&self, m: &HermLowRank) -> Measurement {
        Measurement::Complex(self.pattern.sample(m))
    }

    fn observations(&self) -> &Measurement {
        &self.obs
    }

    fn adjoint_apply(&self, w: &Measurement, v: &CMat) -> CMat {
        match w {
            Measurement::Complex(w) => self.pattern.scatter_apply(w, v),
            _ => panic!("completion cost expects complex measurements"),
        }
    }

    fn truth(&self) -> Option<HermLowRank> {
        self.truth.as_ref().map(HermLowRank::gram_of)
    }
}
