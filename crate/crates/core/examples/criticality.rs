//! Two targets with identical box dimension at the critical codimension:
//! Brownian motion in R³ keeps hitting one and almost never hits the other.
//!
//! `cargo run --release --example criticality`

use fgp::hitting::{criticality_experiment, Process};
use fgp::metric::MetricSpec;
use fgp::profiles::EllKind;
use fgp::sets::{build_undecidable_pair, WeightedSet};
use fgp::simulation::SimulationGrid;
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let grid = SimulationGrid::new(0.0, 1.0, 1024)?;
    let bm = Process::new(VarianceProfile::power(0.5)?, 3, grid.clone())?;
    let e = WeightedSet::on_times(&grid.times()[103..], MetricSpec::Euclidean)?;
    let pair = build_undecidable_pair(3, 2.0, 2.0, EllKind::SqrtLog, (-0.25, 0.25), 8)?;
    let radii: Vec<f64> = (0..4).map(|k| 0.02 * 0.25f64.powi(k)).collect();
    let rep = criticality_experiment(&bm, &e, &pair, &radii, 2000, 9)?;
    for (a, b) in rep.f1.series.iter().zip(&rep.f2.series) {
        println!("r = {:.5}   F1 {:.4}   F2 {:.4}", a.r, a.freq, b.freq);
    }
    println!(
        "F2 floor ratio {:.3} (bounded: {}), F1 largest step {:.3} (decreasing: {})",
        rep.f2_floor_ratio, rep.f2_bounded, rep.f1_max_step, rep.f1_decreasing
    );
    Ok(())
}
