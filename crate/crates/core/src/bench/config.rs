//! Flat `key=value` run configuration.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Later assignments win, so `--set` overrides are simply appended.
//! Every unset key takes the default of the selected experiment, and the
//! manifest written next to a run lists every resolved key, so it loads back
//! as a config that reproduces the run.

use crate::quotient::MetricTag;
use crate::solver::{BetaRule, Method, SolverConfig, StopNorm};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("line {line}: expected key=value, found '{text}'")]
    Syntax { line: usize, text: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("{key}: cannot parse '{value}': {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Eig,
    Completion,
    PhaseLift,
    Interferometry,
    Equivalence,
    Spectrum,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Eig,
        Experiment::Completion,
        Experiment::PhaseLift,
        Experiment::Interferometry,
        Experiment::Equivalence,
        Experiment::Spectrum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Eig => "eig",
            Experiment::Completion => "completion",
            Experiment::PhaseLift => "phaselift",
            Experiment::Interferometry => "interferometry",
            Experiment::Equivalence => "equivalence",
            Experiment::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
                format!("unknown experiment (expected one of {})", names.join(", "))
            })
    }
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Matrix size; the image has `rows * cols` pixels for phaselift.
    pub n: usize,
    pub p: usize,
    pub r: usize,
    /// Rows of the interferometry operator.
    pub m: usize,
    pub rows: usize,
    pub cols: usize,
    pub masks: usize,
    pub density: f64,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub solver: SolverConfig,
    /// Eigenvalue range of planted targets for equivalence and spectrum.
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub epsilons: Vec<f64>,
    pub tags: Vec<MetricTag>,
}

pub const KEYS: [&str; 24] = [
    "experiment",
    "n",
    "p",
    "r",
    "m",
    "rows",
    "cols",
    "masks",
    "density",
    "seed",
    "methods",
    "max_iters",
    "grad_tol",
    "stop_norm",
    "armijo_c",
    "armijo_shrink",
    "max_backtracks",
    "beta",
    "exact_initial_step",
    "sigma_lo",
    "sigma_hi",
    "epsilons",
    "tags",
    "record_snapshots",
];

impl RunConfig {
    /// Desk-scale defaults for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut c = RunConfig {
            experiment,
            n: 2000,
            p: 15,
            r: 10,
            m: 0,
            rows: 0,
            cols: 0,
            masks: 0,
            density: 1.0,
            seed: 1,
            methods: Method::ALL.to_vec(),
            solver: SolverConfig { max_iters: 3000, ..Default::default() },
            sigma_lo: 1.0,
            sigma_hi: 1.0,
            epsilons: Vec::new(),
            tags: vec![MetricTag::G1, MetricTag::G2, MetricTag::G3],
        };
        match experiment {
            Experiment::Eig => {}
            Experiment::Completion => {
                (c.n, c.r, c.p, c.density) = (1000, 25, 30, 0.9);
            }
            Experiment::PhaseLift => {
                (c.rows, c.cols, c.masks, c.r, c.p) = (32, 32, 8, 1, 3);
                c.n = c.rows * c.cols;
                c.methods = vec![Method::QuotientG2];
                c.solver.max_iters = 500;
            }
            Experiment::Interferometry => {
                (c.m, c.n, c.density, c.r, c.p) = (1000, 200, 0.7, 1, 2);
            }
            Experiment::Equivalence => {
                (c.n, c.r, c.p) = (100, 5, 5);
                (c.sigma_lo, c.sigma_hi) = (1.0, 100.0);
                c.methods = vec![Method::BmCg, Method::QuotientG1, Method::Embedded, Method::QuotientG3Embedded];
                c.solver.max_iters = 50;
                c.solver.grad_tol = 1e-10;
            }
            Experiment::Spectrum => {
                (c.n, c.r, c.p) = (40, 2, 3);
                (c.sigma_lo, c.sigma_hi) = (1.0, 2.0);
                c.epsilons = vec![1e-1, 1e-2, 1e-3, 1e-4];
            }
        }
        c
    }

    /// Resolves a sequence of assignments, later ones winning.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k.clone()));
            }
            map.insert(k.as_str(), v.as_str());
        }
        let experiment = match map.remove("experiment") {
            Some(v) => parse("experiment", v)?,
            None => Experiment::Eig,
        };
        let mut c = Self::defaults(experiment);
        let n_set = map.contains_key("n");
        for (k, v) in map {
            c.assign(k, v)?;
        }
        if experiment == Experiment::PhaseLift {
            let pixels = c.rows * c.cols;
            if n_set && c.n != pixels {
                return Err(ConfigError::Invalid {
                    field: "n",
                    reason: format!("phaselift needs n = rows * cols = {pixels}"),
                });
            }
            c.n = pixels;
        }
        c.validate()?;
        Ok(c)
    }

    fn assign(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "n" => self.n = parse(key, v)?,
            "p" => self.p = parse(key, v)?,
            "r" => self.r = parse(key, v)?,
            "m" => self.m = parse(key, v)?,
            "rows" => self.rows = parse(key, v)?,
            "cols" => self.cols = parse(key, v)?,
            "masks" => self.masks = parse(key, v)?,
            "density" => self.density = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "methods" => {
                self.methods = if v.trim() == "all" {
                    Method::ALL.to_vec()
                } else {
                    parse_list(key, v)?
                }
            }
            "max_iters" => self.solver.max_iters = parse(key, v)?,
            "grad_tol" => self.solver.grad_tol = parse(key, v)?,
            "stop_norm" => {
                self.solver.stop_norm = match v.trim() {
                    "tangent" => StopNorm::Tangent,
                    "metric" => StopNorm::Metric,
                    _ => return Err(bad(key, v, "expected tangent or metric")),
                }
            }
            "armijo_c" => self.solver.armijo_c = parse(key, v)?,
            "armijo_shrink" => self.solver.shrink = parse(key, v)?,
            "max_backtracks" => self.solver.max_backtracks = parse(key, v)?,
            "beta" => {
                self.solver.beta = match v.trim() {
                    "pr+" => BetaRule::PolakRibierePlus,
                    "zero" => BetaRule::SteepestDescent,
                    _ => return Err(bad(key, v, "expected pr+ or zero")),
                }
            }
            "exact_initial_step" => self.solver.exact_initial_step = parse(key, v)?,
            "record_snapshots" => self.solver.record_snapshots = parse(key, v)?,
            "sigma_lo" => self.sigma_lo = parse(key, v)?,
            "sigma_hi" => self.sigma_hi = parse(key, v)?,
            "epsilons" => self.epsilons = parse_list(key, v)?,
            "tags" => self.tags = parse_list(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field, reason: String| Err(ConfigError::Invalid { field, reason });
        if self.n == 0 {
            return invalid("n", "must be positive".into());
        }
        if self.p == 0 || self.p > self.n {
            return invalid("p", format!("{} must lie in 1..={}", self.p, self.n));
        }
        if self.r == 0 || self.r > self.p {
            return invalid("r", format!("{} must lie in 1..={}", self.r, self.p));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return invalid("density", format!("{} must lie in (0, 1]", self.density));
        }
        if self.methods.is_empty() {
            return invalid("methods", "at least one method is required".into());
        }
        if let Err(e) = self.solver.validate() {
            return invalid("solver", e.to_string());
        }
        match self.experiment {
            Experiment::PhaseLift => {
                if self.masks == 0 {
                    return invalid("masks", "must be positive".into());
                }
                if self.r != 1 {
                    return invalid("r", "phaselift recovers a rank-1 signal".into());
                }
            }
            Experiment::Interferometry => {
                if self.m < self.n {
                    return invalid("m", format!("{} rows cannot be fewer than n = {}", self.m, self.n));
                }
                if self.r != 1 {
                    return invalid("r", "interferometry recovers a rank-1 signal".into());
                }
            }
            Experiment::Equivalence | Experiment::Spectrum => {
                if !(self.sigma_lo > 0.0 && self.sigma_lo <= self.sigma_hi) {
                    return invalid("sigma_lo", "need 0 < sigma_lo <= sigma_hi".into());
                }
            }
            _ => {}
        }
        if self.experiment == Experiment::Spectrum {
            if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0)) {
                return invalid("epsilons", "need a nonempty list of positive values".into());
            }
            if self.tags.is_empty() {
                return invalid("tags", "at least one metric is required".into());
            }
            let dim = 2 * self.n * self.p - self.p * self.p;
            if dim > 2000 {
                return invalid("n", format!("dense spectra are capped at dimension 2000, requested {dim}"));
            }
        }
        Ok(())
    }

    /// Every key with its resolved value; parses back to the same config.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let s = &self.solver;
        let join = |v: Vec<String>| v.join(",");
        vec![
            ("experiment", self.experiment.to_string()),
            ("n", self.n.to_string()),
            ("p", self.p.to_string()),
            ("r", self.r.to_string()),
            ("m", self.m.to_string()),
            ("rows", self.rows.to_string()),
            ("cols", self.cols.to_string()),
            ("masks", self.masks.to_string()),
            ("density", self.density.to_string()),
            ("seed", self.seed.to_string()),
            ("methods", join(self.methods.iter().map(|m| m.to_string()).collect())),
            ("max_iters", s.max_iters.to_string()),
            ("grad_tol", format!("{:e}", s.grad_tol)),
            (
                "stop_norm",
                match s.stop_norm {
                    StopNorm::Tangent => "tangent",
                    StopNorm::Metric => "metric",
                }
                .into(),
            ),
            ("armijo_c", format!("{:e}", s.armijo_c)),
            ("armijo_shrink", s.shrink.to_string()),
            ("max_backtracks", s.max_backtracks.to_string()),
            (
                "beta",
                match s.beta {
                    BetaRule::PolakRibierePlus => "pr+",
                    BetaRule::SteepestDescent => "zero",
                }
                .into(),
            ),
            ("exact_initial_step", s.exact_initial_step.to_string()),
            ("record_snapshots", s.record_snapshots.to_string()),
            ("sigma_lo", self.sigma_lo.to_string()),
            ("sigma_hi", self.sigma_hi.to_string()),
            ("epsilons", join(self.epsilons.iter().map(|e| format!("{e:e}")).collect())),
            ("tags", join(self.tags.iter().map(|t| t.to_string()).collect())),
        ]
    }
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.into() }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.trim().parse().map_err(|e: T::Err| bad(key, v, e.to_string()))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

/// Splits `key=value`.
pub fn parse_assignment(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

/// Assignments in a config file, in order.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_assignment(t).ok_or_else(|| ConfigError::Syntax { line: i + 1, text: t.to_string() })?);
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
    parse_config_text(&text)
}

/// Worker cap from `PSDMANOPT_THREADS`, else the available parallelism.
pub fn thread_cap() -> Result<usize, ConfigError> {
    match std::env::var("PSDMANOPT_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(bad("PSDMANOPT_THREADS", &v, "expected a positive integer")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
