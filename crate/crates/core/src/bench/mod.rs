//! Experiment harness behind the `psdmanopt` binary: seeded instances, the
//! method matrix, CSV traces, manifests and plot scripts.

mod config;
mod plot;

pub use config::{
    parse_assignment, parse_config_text, read_config_file, thread_cap, ConfigError, Experiment, RunConfig, KEYS,
};
pub use plot::{plot_script, PlotOptions, PlotError};

use crate::cost::{CompletionCost, CostModel, EigCost, InterferometryCost, PhaseLiftCost};
use crate::kernel::CMat;
use crate::lowrank::HermLowRank;
use crate::random::{complex_gaussian, seeded};
use crate::solver::{solve, write_trace_csv, Method, RunResult, SolverError, Status};
use crate::spectral::{rq_limit_study, PlantedTarget, RayleighReport, SpectralError, SPECTRUM_HEADER};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("instance generation failed: {0}")]
    Instance(String),
    #[error("{method}: {source}")]
    Solver { method: Method, source: SolverError },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Outcome of one method within an experiment.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: Method,
    pub status: Status,
    pub iterations: usize,
    pub final_gradnorm: f64,
    pub relative_error: Option<f64>,
    pub seconds: f64,
    pub trace_file: PathBuf,
}

#[derive(Debug, Clone)]
pub struct PairSummary {
    pub pair: (Method, Method),
    pub compared: usize,
    pub max_distance: f64,
    pub file: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub methods: Vec<MethodSummary>,
    pub pairs: Vec<PairSummary>,
    pub spectra: Vec<RayleighReport>,
}

impl Summary {
    /// True when a run that was asked to converge did not. In the
    /// equivalence experiment the iteration budget is the comparison
    /// length, so hitting it is not a failure.
    pub fn non_converged(&self, experiment: Experiment) -> Vec<Method> {
        self.methods
            .iter()
            .filter(|m| match m.status {
                Status::Converged => false,
                Status::MaxIterations => experiment != Experiment::Equivalence,
                Status::LineSearchFailed => true,
            })
            .map(|m| m.method)
            .collect()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

/// `f` over `items` on at most `threads` scoped workers, results in input
/// order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = threads.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("no worker panics while holding a slot") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every item processed"))
        .collect()
}

/// Seeded instance and starting factor. The same seed gives the same
/// instance and start for every method.
pub fn build_instance(cfg: &RunConfig) -> Result<(Box<dyn CostModel>, CMat), BenchError> {
    let mut rng = seeded(cfg.seed);
    let inst = |e: crate::cost::CostError| BenchError::Instance(e.to_string());
    let cost: Box<dyn CostModel> = match cfg.experiment {
        Experiment::Eig => Box::new(EigCost::planted(cfg.n, cfg.r, &mut rng).map_err(inst)?),
        Experiment::Completion => {
            Box::new(CompletionCost::planted(cfg.n, cfg.r, cfg.density, &mut rng).map_err(inst)?)
        }
        Experiment::PhaseLift => {
            Box::new(PhaseLiftCost::planted(cfg.rows, cfg.cols, cfg.masks, &mut rng).map_err(inst)?)
        }
        Experiment::Interferometry => {
            Box::new(InterferometryCost::planted(cfg.m, cfg.n, cfg.density, &mut rng).map_err(inst)?)
        }
        Experiment::Equivalence | Experiment::Spectrum => {
            Box::new(PlantedTarget::random(cfg.n, cfg.r, cfg.sigma_lo, cfg.sigma_hi, &mut rng).cost())
        }
    };
    let y0 = complex_gaussian(&mut rng, cost.n(), cfg.p);
    Ok((cost, y0))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<(), BenchError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Runs the configured experiment and writes its files into `out`.
pub fn run_experiment(cfg: &RunConfig, out: &Path, threads: usize) -> Result<Summary, BenchError> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut summary = Summary::default();
    if cfg.experiment == Experiment::Spectrum {
        summary.spectra = spectrum(cfg, threads)?;
        let path = out.join("spectrum.csv");
        write_file(&path, |w| {
            writeln!(w, "{SPECTRUM_HEADER}")?;
            for r in &summary.spectra {
                writeln!(w, "{}", r.csv_row())?;
            }
            Ok(())
        })?;
    } else {
        let (cost, y0) = build_instance(cfg)?;
        let mut solver = cfg.solver.clone();
        if cfg.experiment == Experiment::Equivalence {
            solver.record_snapshots = true;
        }
        let runs = parallel_map(&cfg.methods, threads, |&m| solve(m, cost.as_ref(), &y0, &solver));
        let mut results = Vec::new();
        for (m, r) in cfg.methods.iter().zip(runs) {
            results.push(r.map_err(|source| BenchError::Solver { method: *m, source })?);
        }
        for res in &results {
            let path = out.join(format!("{}.csv", res.method));
            write_file(&path, |w| write_trace_csv(w, &res.trace))?;
            let last = res.trace.last().expect("trace has the initial row");
            summary.methods.push(MethodSummary {
                method: res.method,
                status: res.status,
                iterations: res.iterations(),
                final_gradnorm: last.tangent_gradnorm,
                relative_error: cost.relative_error(&HermLowRank::gram_of(&res.factor)),
                seconds: last.seconds,
                trace_file: path,
            });
        }
        if cfg.experiment == Experiment::Equivalence {
            let scale = cost.truth().map_or(1.0, |t| t.norm_sq().sqrt());
            for pair in [(Method::BmCg, Method::QuotientG1), (Method::Embedded, Method::QuotientG3Embedded)] {
                let find = |m| results.iter().find(|r: &&RunResult| r.method == m);
                if let (Some(a), Some(b)) = (find(pair.0), find(pair.1)) {
                    summary.pairs.push(compare_pair(a, b, scale, out)?);
                }
            }
        }
    }
    write_manifest(cfg, &summary, &out.join("manifest.txt"))?;
    Ok(summary)
}

/// Per-iterate `‖X_k − X̃_k‖_F / ‖X̂‖_F` over the common prefix.
fn compare_pair(a: &RunResult, b: &RunResult, scale: f64, out: &Path) -> Result<PairSummary, BenchError> {
    let dist: Vec<f64> = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(ya, yb)| {
            let d = HermLowRank::gram_of(ya).plus(&HermLowRank::gram_of(yb).scaled(-1.0));
            d.norm_sq().sqrt() / scale
        })
        .collect();
    let path = out.join(format!("equivalence_{}_{}.csv", a.method, b.method));
    write_file(&path, |w| {
        writeln!(w, "iter,x_distance")?;
        for (k, d) in dist.iter().enumerate() {
            writeln!(w, "{k},{d:.16e}")?;
        }
        Ok(())
    })?;
    Ok(PairSummary {
        pair: (a.method, b.method),
        compared: dist.len(),
        max_distance: dist.iter().copied().fold(0.0, f64::max),
        file: path,
    })
}

fn spectrum(cfg: &RunConfig, threads: usize) -> Result<Vec<RayleighReport>, BenchError> {
    let mut rng = seeded(cfg.seed);
    let target = PlantedTarget::random(cfg.n, cfg.r, cfg.sigma_lo, cfg.sigma_hi, &mut rng);
    // Each metric gets its own stream so results do not depend on the
    // worker count.
    let jobs: Vec<(usize, crate::quotient::MetricTag)> = cfg.tags.iter().copied().enumerate().collect();
    let per_tag = parallel_map(&jobs, threads, |&(i, tag)| {
        let mut rng = seeded(cfg.seed.wrapping_add(1 + i as u64));
        rq_limit_study(&target, cfg.p, tag, &cfg.epsilons, &mut rng)
    });
    let mut out = Vec::new();
    for r in per_tag {
        out.extend(r?);
    }
    Ok(out)
}

fn write_manifest(cfg: &RunConfig, s: &Summary, path: &Path) -> Result<(), BenchError> {
    write_file(path, |w| {
        writeln!(w, "# psdmanopt v{}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# Resolved configuration; load with --config to repeat the run.")?;
        for (k, v) in cfg.to_pairs() {
            writeln!(w, "{k}={v}")?;
        }
        for m in &s.methods {
            let err = m.relative_error.map_or("n/a".to_string(), |e| format!("{e:.6e}"));
            writeln!(
                w,
                "# result {} status={} iterations={} gradnorm={:.6e} relative_error={err} seconds={:.3}",
                m.method,
                m.status.as_str(),
                m.iterations,
                m.final_gradnorm,
                m.seconds
            )?;
        }
        for p in &s.pairs {
            writeln!(
                w,
                "# pair {}~{} compared={} max_x_distance={:.6e}",
                p.pair.0, p.pair.1, p.compared, p.max_distance
            )?;
        }
        for r in &s.spectra {
            writeln!(w, "# spectrum {}", r.csv_row())?;
        }
        Ok(())
    })
}

/// Human-readable lines for the terminal.
pub fn summary_lines(cfg: &RunConfig, s: &Summary) -> Vec<String> {
    let mut out = Vec::new();
    for m in &s.methods {
        let err = m.relative_error.map_or("n/a".to_string(), |e| format!("{e:.3e}"));
        out.push(format!(
            "{:<22} {:<18} iters {:>5}  |grad| {:.3e}  rel.err {err}  {:.2}s",
            m.method.as_str(),
            m.status.as_str(),
            m.iterations,
            m.final_gradnorm,
            m.seconds
        ));
    }
    for p in &s.pairs {
        out.push(format!(
            "{} ~ {}: {} iterates, max X-distance {:.3e}",
            p.pair.0, p.pair.1, p.compared, p.max_distance
        ));
    }
    for r in &s.spectra {
        out.push(format!(
            "{} eps={:.0e}: lambda in [{:.4e}, {:.4e}], kappa {:.4e}",
            r.tag, r.epsilon, r.lambda_min, r.lambda_max, r.kappa
        ));
    }
    if out.is_empty() {
        out.push(format!("{}: nothing to report", cfg.experiment));
    }
    out
}
