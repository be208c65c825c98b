//! Gnuplot scripts for convergence traces. The trace data is inlined as
//! datablocks, so the script runs on its own.

use crate::solver::{read_trace_csv, TraceRow, TRACE_HEADER};
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("{0}: no such file or directory")]
    Missing(PathBuf),
    #[error("{path}: {reason}")]
    Schema { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no trace files to plot")]
    Empty,
    #[error("unknown plot option '{0}'")]
    Option(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    /// `iter`, `seconds` or `both`.
    pub x: String,
    /// Trace column on the (log-scale) y axis.
    pub y: String,
    /// Image written by the script.
    pub output: String,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self { x: "iter".into(), y: "tangent_gradnorm".into(), output: "convergence.png".into() }
    }
}

impl PlotOptions {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PlotError> {
        let columns: Vec<&str> = TRACE_HEADER.split(',').collect();
        match key {
            "x" if ["iter", "seconds", "both"].contains(&value) => self.x = value.into(),
            "y" if columns.contains(&value) => self.y = value.into(),
            "output" if !value.is_empty() => self.output = value.into(),
            _ => return Err(PlotError::Option(format!("{key}={value}"))),
        }
        Ok(())
    }
}

/// Trace files named by `inputs`; directories contribute every `.csv`
/// inside them that carries the trace header.
fn collect(inputs: &[PathBuf]) -> Result<Vec<(PathBuf, Vec<TraceRow>)>, PlotError> {
    let mut out = Vec::new();
    for input in inputs {
        if !input.exists() {
            return Err(PlotError::Missing(input.clone()));
        }
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|source| PlotError::Io { path: input.clone(), source })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            entries.sort();
            for path in entries {
                if let Ok(rows) = read(&path) {
                    out.push((path, rows));
                }
            }
        } else {
            let rows = read(input)?;
            out.push((input.clone(), rows));
        }
    }
    if out.is_empty() {
        return Err(PlotError::Empty);
    }
    Ok(out)
}

fn read(path: &Path) -> Result<Vec<TraceRow>, PlotError> {
    let f = fs::File::open(path).map_err(|source| PlotError::Io { path: path.to_path_buf(), source })?;
    read_trace_csv(BufReader::new(f)).map_err(|reason| PlotError::Schema { path: path.to_path_buf(), reason })
}

fn column(r: &TraceRow, name: &str) -> f64 {
    match name {
        "iter" => r.iter as f64,
        "cost" => r.cost,
        "gradnorm" => r.gradnorm,
        "step" => r.step,
        "backtracks" => r.backtracks as f64,
        "seconds" => r.seconds,
        "slope" => r.slope,
        "beta" => r.beta,
        _ => r.tangent_gradnorm,
    }
}

/// One log-scale panel per x axis with every trace overlaid.
pub fn plot_script(inputs: &[PathBuf], opts: &PlotOptions) -> Result<String, PlotError> {
    let traces = collect(inputs)?;
    let xs: Vec<&str> = match opts.x.as_str() {
        "both" => vec!["iter", "seconds"],
        x => vec![x],
    };
    let mut s = String::new();
    let _ = writeln!(s, "# Generated by psdmanopt plot");
    for (i, (path, rows)) in traces.iter().enumerate() {
        let _ = writeln!(s, "# trace {i}: {}", path.display());
        let _ = writeln!(s, "$trace{i} << EOD");
        for r in rows {
            let _ = writeln!(s, "{:e} {:e} {:e}", column(r, "iter"), column(r, "seconds"), column(r, &opts.y));
        }
        let _ = writeln!(s, "EOD");
    }
    let (w, h) = (800, 500 * xs.len());
    let _ = writeln!(s, "set terminal pngcairo size {w},{h}");
    let _ = writeln!(s, "set output '{}'", opts.output.replace('\'', "''"));
    if xs.len() > 1 {
        let _ = writeln!(s, "set multiplot layout {},1", xs.len());
    }
    let _ = writeln!(s, "set logscale y\nset format y '10^{{%L}}'\nset grid\nset key outside right");
    let _ = writeln!(s, "set ylabel '{}'", opts.y.replace('_', "\\_"));
    for x in &xs {
        let col = if *x == "iter" { 1 } else { 2 };
        let _ = writeln!(s, "set xlabel '{}'", if *x == "iter" { "iteration" } else { "seconds" });
        let parts: Vec<String> = traces
            .iter()
            .enumerate()
            .map(|(i, (path, _))| {
                let title = path.file_stem().map_or_else(|| format!("trace {i}"), |t| t.to_string_lossy().into_owned());
                format!("$trace{i} using {col}:3 with lines title '{}'", title.replace('\'', "''"))
            })
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    if xs.len() > 1 {
        let _ = writeln!(s, "unset multiplot");
    }
    Ok(s)
}
