//! Two pairs of methods that produce the same X iterates: Burer-Monteiro CG
//! with quotient-g1, and embedded CG with quotient-g3 on the embedded
//! retraction.
//!
//! cargo run --release --example equivalence

use psdmanopt::cost::CostModel;
use psdmanopt::random::{complex_gaussian, seeded};
use psdmanopt::solver::{solve, Method, SolverConfig};
use psdmanopt::spectral::PlantedTarget;

fn main() {
    let mut rng = seeded(11);
    let cost = PlantedTarget::random(100, 3, 1.0, 100.0, &mut rng).cost();
    let y0 = complex_gaussian(&mut rng, 100, 5);
    let cfg = SolverConfig {
        max_iters: 40,
        grad_tol: 0.0,
        record_snapshots: true,
        ..SolverConfig::default()
    };
    let scale = cost.truth().unwrap().norm_sq().sqrt();
    for (a, b) in [
        (Method::BmCg, Method::QuotientG1),
        (Method::Embedded, Method::QuotientG3Embedded),
    ] {
        let ra = solve(a, &cost, &y0, &cfg).unwrap();
        let rb = solve(b, &cost, &y0, &cfg).unwrap();
        println!("{a} vs {b}");
        for (k, (ya, yb)) in ra.snapshots.iter().zip(&rb.snapshots).enumerate().step_by(5) {
            let d = (ya * ya.adjoint() - yb * yb.adjoint()).norm() / scale;
            println!("  iter {k:>3}  cost {:.6e}  X-distance {d:.2e}", ra.trace[k].cost);
        }
    }
}
