//! Hessian condition numbers of the three quotient metrics as the iterate
//! approaches a rank-r minimizer from rank p = r + 1.
//!
//! cargo run --release --example spectra -- [n]

use psdmanopt::quotient::MetricTag;
use psdmanopt::random::seeded;
use psdmanopt::spectral::{rq_limit_study, PlantedTarget, SPECTRUM_HEADER};

fn main() {
    let n = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(30);
    let mut rng = seeded(3);
    let target = PlantedTarget::random(n, 2, 1.0, 2.0, &mut rng);
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    println!("{SPECTRUM_HEADER}");
    for tag in [MetricTag::G1, MetricTag::G2, MetricTag::G3] {
        for row in rq_limit_study(&target, 3, tag, &eps, &mut rng).unwrap() {
            println!("{}", row.csv_row());
        }
    }
    // g1 blows up like 1/eps^2, g2 and g3 stay flat.
}
