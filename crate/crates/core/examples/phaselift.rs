//! Phase retrieval from masked Fourier intensities, solved on the rank-p
//! quotient with metric g2.
//!
//! cargo run --release --example phaselift -- [side] [masks] [p]

use psdmanopt::cost::{CostModel, PhaseLiftCost};
use psdmanopt::lowrank::HermLowRank;
use psdmanopt::random::{complex_gaussian, seeded};
use psdmanopt::solver::{solve, Method, SolverConfig};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let side = args.first().copied().unwrap_or(32);
    let masks = args.get(1).copied().unwrap_or(8);
    let p = args.get(2).copied().unwrap_or(3);
    let mut rng = seeded(2024);
    let cost = PhaseLiftCost::planted(side, side, masks, &mut rng).unwrap();
    let y0 = complex_gaussian(&mut rng, cost.n(), p);
    let cfg = SolverConfig {
        max_iters: 500,
        ..SolverConfig::default()
    };
    let res = solve(Method::QuotientG2, &cost, &y0, &cfg).unwrap();
    for row in res.trace.iter().step_by(25) {
        println!("{:>4}  cost {:.3e}  |grad| {:.3e}", row.iter, row.cost, row.tangent_gradnorm);
    }
    let err = cost.relative_error(&HermLowRank::gram_of(&res.factor)).unwrap();
    println!("{} after {} iterations, relative error {err:.2e}", res.status.as_str(), res.iterations());
}
