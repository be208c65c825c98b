//! Hermitian low-rank completion from a sampled fraction of entries.
//!
//! cargo run --release --example completion -- [n] [r] [p] [density%]

use psdmanopt::cost::{CompletionCost, CostModel};
use psdmanopt::lowrank::HermLowRank;
use psdmanopt::random::{complex_gaussian, seeded};
use psdmanopt::solver::{solve, Method, SolverConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(300);
    let r = args.get(1).copied().unwrap_or(5);
    let p = args.get(2).copied().unwrap_or(r);
    let density = args.get(3).copied().unwrap_or(50) as f64 / 100.0;
    let mut rng = seeded(5);
    let cost = CompletionCost::planted(n, r, density, &mut rng).unwrap();
    let y0 = complex_gaussian(&mut rng, n, p);
    let cfg = SolverConfig {
        max_iters: 2000,
        ..SolverConfig::default()
    };
    for m in [Method::QuotientG2, Method::QuotientG3, Method::Embedded] {
        let res = solve(m, &cost, &y0, &cfg).unwrap();
        let err = cost.relative_error(&HermLowRank::gram_of(&res.factor)).unwrap();
        println!("{m:<12} {:>5} iters  {:<18} rel.err {err:.2e}", res.iterations(), res.status.as_str());
    }
}
