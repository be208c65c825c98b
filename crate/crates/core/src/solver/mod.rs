//! Riemannian conjugate gradient with PR+ directions and Armijo backtracking.

mod geometry;
mod trace;

pub use geometry::{
    tangent_gradnorm, BurerMonteiro, Embedded, Geometry, PairedPoint, Quotient, QuotientG3Embedded,
};
pub use trace::{read_trace_csv, write_trace_csv, TraceRow, TRACE_HEADER};

use crate::cost::CostModel;
use crate::embedded::EigenPoint;
use crate::error::GeometryError;
use crate::kernel::CMat;
use crate::quotient::{FactorPoint, MetricTag};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial point rejected: {0}")]
    InitialPoint(GeometryError),
    #[error("geometry failure at iteration {iter}: {source}")]
    Geometry { iter: usize, source: GeometryError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BmCg,
    QuotientG1,
    QuotientG2,
    QuotientG3,
    Embedded,
    QuotientG3Embedded,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::BmCg,
        Method::QuotientG1,
        Method::QuotientG2,
        Method::QuotientG3,
        Method::Embedded,
        Method::QuotientG3Embedded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::BmCg => "bm-cg",
            Method::QuotientG1 => "quotient-g1",
            Method::QuotientG2 => "quotient-g2",
            Method::QuotientG3 => "quotient-g3",
            Method::Embedded => "embedded",
            Method::QuotientG3Embedded => "quotient-g3-embedded",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;
    /// Accepts the full names and the short forms bm, g1, g2, g3, g3-emb.
    fn from_str(s: &str) -> Result<Self, String> {
        let short = match s {
            "bm" => Some(Method::BmCg),
            "g1" => Some(Method::QuotientG1),
            "g2" => Some(Method::QuotientG2),
            "g3" => Some(Method::QuotientG3),
            "g3-emb" => Some(Method::QuotientG3Embedded),
            _ => None,
        };
        short
            .or_else(|| Method::ALL.into_iter().find(|m| m.as_str() == s))
            .ok_or_else(|| format!("unknown method '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaRule {
    /// `max(0, g(ξk, ξk − T ξk−1) / g(ξk−1, ξk−1))`.
    PolakRibierePlus,
    /// Always zero: gradient descent.
    SteepestDescent,
}

/// Which norm the stopping test looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopNorm {
    /// `‖P^t ∇f(X)‖_F`, identical across methods.
    Tangent,
    /// The norm of the Riemannian gradient under the method's own metric.
    Metric,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub stop_norm: StopNorm,
    pub armijo_c: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    pub beta: BetaRule,
    pub exact_initial_step: bool,
    pub record_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            grad_tol: 1e-8,
            stop_norm: StopNorm::Tangent,
            armijo_c: 1e-4,
            shrink: 0.5,
            max_backtracks: 50,
            beta: BetaRule::PolakRibierePlus,
            exact_initial_step: true,
            record_snapshots: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!("armijo_c = {} must lie in (0, 1)", self.armijo_c));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad(format!("shrink = {} must lie in (0, 1)", self.shrink));
        }
        if !(self.grad_tol >= 0.0) {
            return bad(format!("grad_tol = {} must be non-negative", self.grad_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max-iterations",
            Status::LineSearchFailed => "line-search-failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub method: Method,
    pub status: Status,
    pub trace: Vec<TraceRow>,
    /// Final factor, `X = Y Y*`.
    pub factor: CMat,
    /// Factor of every iterate, when requested.
    pub snapshots: Vec<CMat>,
}

impl RunResult {
    pub fn iterations(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }

    /// First iteration whose stopping norm is below `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|r| r.tangent_gradnorm < tol)
            .map(|r| r.iter)
    }
}

/// Runs `method` from `X0 = Y0 Y0*`.
pub fn solve(
    method: Method,
    cost: &dyn CostModel,
    y0: &CMat,
    cfg: &SolverConfig,
) -> Result<RunResult, SolverError> {
    cfg.validate()?;
    let init = SolverError::InitialPoint;
    let (status, trace, factor, snapshots) = match method {
        Method::BmCg => run(&BurerMonteiro { cost }, y0.clone(), cfg)?,
        Method::QuotientG1 | Method::QuotientG2 | Method::QuotientG3 => {
            let tag = match method {
                Method::QuotientG1 => MetricTag::G1,
                Method::QuotientG2 => MetricTag::G2,
                _ => MetricTag::G3,
            };
            run(
                &Quotient { cost, tag },
                FactorPoint::new(y0.clone()).map_err(init)?,
                cfg,
            )?
        }
        Method::Embedded => run(
            &Embedded { cost },
            EigenPoint::from_factor(y0).map_err(init)?,
            cfg,
        )?,
        Method::QuotientG3Embedded => {
            let x = EigenPoint::from_factor(y0).map_err(init)?;
            run(
                &QuotientG3Embedded { cost },
                PairedPoint::from_eigen(x).map_err(init)?,
                cfg,
            )?
        }
    };
    Ok(RunResult {
        method,
        status,
        trace,
        factor,
        snapshots,
    })
}

type RunParts = (Status, Vec<TraceRow>, CMat, Vec<CMat>);

/// The conjugate gradient loop over any [`Geometry`].
pub fn run<G: Geometry>(
    geo: &G,
    x0: G::Point,
    cfg: &SolverConfig,
) -> Result<RunParts, SolverError> {
    cfg.validate()?;
    let start = Instant::now();
    let fail = |iter: usize| move |source: GeometryError| SolverError::Geometry { iter, source };
    let mut x = x0;
    let mut f = geo.value(&x);
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    // (previous point, previous gradient, previous direction, ‖ξ‖² there)
    let mut prev: Option<(G::Point, G::Vector, G::Vector, f64)> = None;
    let mut k = 0usize;
    let status = loop {
        let xi = geo.gradient(&x).map_err(fail(k))?;
        let gn2 = geo.inner(&x, &xi, &xi);
        let factor = geo.factor(&x);
        let tgn = tangent_gradnorm(geo.cost(), &factor);
        if cfg.record_snapshots {
            snapshots.push(factor);
        }
        trace.push(TraceRow {
            iter: k,
            cost: f,
            gradnorm: gn2.sqrt(),
            step: 0.0,
            backtracks: 0,
            seconds: start.elapsed().as_secs_f64(),
            tangent_gradnorm: tgn,
            slope: 0.0,
            beta: 0.0,
        });
        let stop = match cfg.stop_norm {
            StopNorm::Tangent => tgn,
            StopNorm::Metric => gn2.sqrt(),
        };
        if stop < cfg.grad_tol || gn2 == 0.0 {
            break Status::Converged;
        }
        if k >= cfg.max_iters {
            break Status::MaxIterations;
        }
        let (mut eta, mut beta) = match (&prev, cfg.beta) {
            (Some((xp, xi_p, eta_p, gp2)), BetaRule::PolakRibierePlus) => {
                let t_xi = geo.transport(xp, &x, xi_p).map_err(fail(k))?;
                let t_eta = geo.transport(xp, &x, eta_p).map_err(fail(k))?;
                let diff = geo.lincomb(1.0, &xi, -1.0, &t_xi);
                let beta = (geo.inner(&x, &xi, &diff) / gp2).max(0.0);
                (geo.lincomb(-1.0, &xi, beta, &t_eta), beta)
            }
            _ => (geo.lincomb(-1.0, &xi, 0.0, &xi), 0.0),
        };
        let mut slope = geo.inner(&x, &xi, &eta);
        if !(slope < 0.0) {
            eta = geo.lincomb(-1.0, &xi, 0.0, &xi);
            slope = -gn2;
            beta = 0.0;
        }
        let mut t0 = if cfg.exact_initial_step {
            geo.initial_step(&x, &eta)
        } else {
            1.0
        };
        if !(t0.is_finite() && t0 > 0.0) {
            t0 = 1.0;
        }
        let mut accepted = None;
        let mut t = t0;
        for m in 0..=cfg.max_backtracks {
            if let Ok(xn) = geo.retract(&x, &eta, t) {
                let fn_ = geo.value(&xn);
                if fn_.is_finite() && f - fn_ >= -cfg.armijo_c * t * slope {
                    accepted = Some((xn, fn_, m));
                    break;
                }
            }
            t *= cfg.shrink;
        }
        let Some((xn, fn_, m)) = accepted else {
            break Status::LineSearchFailed;
        };
        let row = trace.last_mut().expect("row pushed above");
        row.step = t;
        row.backtracks = m;
        row.slope = slope;
        row.beta = beta;
        log::debug!("iter {k}: f = {f:.6e}, |grad| = {tgn:.3e}, t = {t:.3e}, backtracks = {m}");
        prev = Some((std::mem::replace(&mut x, xn), xi, eta, gn2));
        f = fn_;
        k += 1;
    };
    let factor = geo.factor(&x);
    Ok((status, trace, factor, snapshots))
}
