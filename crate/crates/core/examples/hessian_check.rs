//! Finite-difference checks of the embedded and g1 Hessians, and the
//! symmetry of the assembled matrices for every metric.

use psdmanopt::cost::{CompletionCost, CostModel, EigCost};
use psdmanopt::kernel::c;
use psdmanopt::quotient::{FactorPoint, MetricTag};
use psdmanopt::random::{complex_gaussian, seeded};
use psdmanopt::spectral::{
    assemble_hessian, fd_hessian_check_embedded, fd_hessian_check_g1, horizontal_basis, symmetric_eigenvalues,
};

fn main() {
    let mut rng = seeded(1);
    let n = 30;
    let costs: Vec<Box<dyn CostModel>> = vec![
        Box::new(EigCost::planted(n, 3, &mut rng).unwrap()),
        Box::new(CompletionCost::planted(n, 3, 0.6, &mut rng).unwrap()),
    ];
    for cost in &costs {
        let y = FactorPoint::new(complex_gaussian(&mut rng, n, 4) * c(1.0 / (n as f64).sqrt(), 0.0)).unwrap();
        let x = y.eigen_point().unwrap();
        let emb = fd_hessian_check_embedded(&x, cost.as_ref(), 10, 1e-4, &mut rng).unwrap();
        let g1 = fd_hessian_check_g1(&y, cost.as_ref(), 10, 1e-4, &mut rng).unwrap();
        println!("{}: embedded {emb:.1e}, g1 {g1:.1e}", cost.name());
        for tag in [MetricTag::G1, MetricTag::G2, MetricTag::G3] {
            let basis = horizontal_basis(&y, tag).unwrap();
            let m = assemble_hessian(&y, tag, cost.as_ref(), &basis).unwrap();
            let ev = symmetric_eigenvalues(m);
            println!("  {tag}: dim {}, eigenvalues in [{:.3e}, {:.3e}]", ev.len(), ev[0], ev[ev.len() - 1]);
        }
    }
}
