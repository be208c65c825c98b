//! The experiment harness as a library: run a configured experiment into a
//! directory, then write a gnuplot script for its traces.
//!
//! cargo run --release --example harness -- [out-dir]

use psdmanopt::bench::{plot_script, run_experiment, summary_lines, PlotOptions, RunConfig};
use std::path::PathBuf;

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "runs/harness".into()));
    let pairs: Vec<(String, String)> = [
        ("experiment", "completion"),
        ("n", "200"),
        ("r", "4"),
        ("p", "4"),
        ("density", "0.5"),
        ("methods", "g2,g3,embedded"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    let cfg = RunConfig::from_pairs(&pairs).unwrap();
    let summary = run_experiment(&cfg, &out, 1).unwrap();
    for line in summary_lines(&cfg, &summary) {
        println!("{line}");
    }
    let mut opts = PlotOptions::default();
    opts.set("x", "both").unwrap();
    let script = plot_script(&[out.clone()], &opts).unwrap();
    std::fs::write(out.join("plot.gp"), script).unwrap();
    println!("gnuplot {}", out.join("plot.gp").display());
}
