//! Box dimensions of images and graphs of fractional Brownian paths. Graphs
//! are measured under max(δ, |·|), where they inherit the δ-dimension 1/H of
//! the time set.
//!
//! `cargo run --release --example path_dimensions`

use fgp::dimension::{graph_dimension, graph_dimension_with_drift, image_dimension};
use fgp::metric::MetricSpec;
use fgp::sets::WeightedSet;
use fgp::simulation::{volterra_simulate, SimulationGrid};
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let grid = SimulationGrid::new(0.0, 1.0, 4096)?;
    let e = WeightedSet::on_times(&grid.times()[410..], MetricSpec::Euclidean)?;
    for (h, d) in [(0.8, 2), (0.8, 1), (0.3, 1)] {
        let p = VarianceProfile::power(h)?;
        let ens = volterra_simulate(&p, grid.clone(), d, 20, 7)?;
        let im = image_dimension(&ens, &e)?;
        let gr = graph_dimension(&ens, &e, &p)?;
        println!(
            "H = {h}, d = {d}: image {:.3} ± {:.3} (min(d, 1/H) = {:.3}), graph {:.3} ± {:.3} (1/H = {:.3})",
            im.value,
            im.stderr,
            (1.0 / h).min(d as f64),
            gr.value,
            gr.stderr,
            1.0 / h
        );
    }
    // a smooth drift barely moves the graph estimate
    let p = VarianceProfile::power(0.5)?;
    let ens = volterra_simulate(&p, grid.clone(), 1, 20, 8)?;
    let drift = |t: f64| (3.0 * t).sin() * 0.2;
    let plain = graph_dimension(&ens, &e, &p)?;
    let shifted = graph_dimension_with_drift(&ens, &e, &p, &drift)?;
    println!("BM graph {:.3}, with drift {:.3}", plain.value, shifted.value);
    Ok(())
}
