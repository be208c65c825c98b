//! Recovering a vector from sampled cross-correlations of its linear
//! measurements, as a rank-one lifted least-squares problem.
//!
//! cargo run --release --example interferometry -- [m] [n] [p]

use psdmanopt::cost::{CostModel, InterferometryCost};
use psdmanopt::lowrank::HermLowRank;
use psdmanopt::random::{complex_gaussian, seeded};
use psdmanopt::solver::{solve, Method, SolverConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let m = args.first().copied().unwrap_or(400);
    let n = args.get(1).copied().unwrap_or(80);
    let p = args.get(2).copied().unwrap_or(2);
    let mut rng = seeded(9);
    let cost = InterferometryCost::planted(m, n, 0.7, &mut rng).unwrap();
    let y0 = complex_gaussian(&mut rng, n, p);
    let cfg = SolverConfig {
        max_iters: 1500,
        ..SolverConfig::default()
    };
    for method in [Method::QuotientG2, Method::QuotientG3] {
        let res = solve(method, &cost, &y0, &cfg).unwrap();
        let err = cost.relative_error(&HermLowRank::gram_of(&res.factor)).unwrap();
        println!("{method:<12} {:>5} iters  rel.err {err:.2e}", res.iterations());
    }
}
