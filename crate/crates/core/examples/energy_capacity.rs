//! Riesz energies of Cantor measures and the capacity dimension read off
//! from their growth under refinement.
//!
//! `cargo run --release --example energy_capacity`

use fgp::dimension::{capacity_dimension, energies};
use fgp::metric::MetricSpec;
use fgp::sets::{build_gauge_cantor, GaugeFunction, WeightedSet};
use fgp::Result;

fn main() -> Result<()> {
    let g = GaugeFunction::power(0.5)?;
    let levels: Vec<WeightedSet> =
        (8..=10).map(|depth| build_gauge_cantor(&g, depth, MetricSpec::Euclidean, (0.0, 1.0))).collect::<Result<_>>()?;
    let betas: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64).collect();
    for e in energies(&levels[2], &betas)? {
        println!("β = {:.1}  I_β = {:>12.4}  over {} pairs", e.beta, e.value, e.pairs);
    }
    let cap = capacity_dimension(&levels, &betas)?;
    println!("capacity dimension {:.3} ± {:.3} (set dimension 0.5)", cap.value, cap.stderr);
    Ok(())
}
