//! All six methods on `½‖X − A‖²` with a planted rank-r target.
//!
//! cargo run --release --example eig_compare -- [n] [r] [p]

use psdmanopt::cost::{CostModel, EigCost};
use psdmanopt::kernel::c;
use psdmanopt::random::{complex_gaussian, seeded};
use psdmanopt::solver::{solve, Method, SolverConfig};

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (n, r, p) = (
        args.first().copied().unwrap_or(200),
        args.get(1).copied().unwrap_or(5),
        args.get(2).copied().unwrap_or(8),
    );
    let mut rng = seeded(7);
    let cost = EigCost::planted(n, r, &mut rng).expect("valid sizes");
    let y0 = complex_gaussian(&mut rng, n, p) * c(1.0 / (n as f64).sqrt(), 0.0);
    let cfg = SolverConfig {
        max_iters: 3000,
        ..SolverConfig::default()
    };
    println!("n={n} r={r} p={p}");
    for method in Method::ALL {
        let out = solve(method, &cost, &y0, &cfg).expect("run");
        let last = out.trace.last().expect("nonempty trace");
        let err = cost
            .relative_error(&psdmanopt::lowrank::HermLowRank::gram_of(&out.factor))
            .unwrap();
        println!(
            "{:<22} {:>5} iters  {:<18} |grad| {:.2e}  rel.err {:.2e}  {:.2}s",
            method.as_str(),
            out.iterations(),
            out.status.as_str(),
            last.tangent_gradnorm,
            err,
            last.seconds
        );
    }
}
