//! Hitting probabilities of points and balls, and the codimension
//! sweep for Brownian motion in R³.
//!
//! `cargo run --release --example hitting`

use fgp::hitting::{codimension_sweep, hitting_probability, HittingExperiment, Process, Target};
use fgp::metric::MetricSpec;
use fgp::sets::WeightedSet;
use fgp::simulation::SimulationGrid;
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let grid = SimulationGrid::new(0.0, 1.0, 512)?;
    let e = WeightedSet::on_times(&grid.times()[51..], MetricSpec::Euclidean)?;
    let planar = Process::new(VarianceProfile::power(0.5)?, 2, grid.clone())?;
    for target in [Target::Point(vec![0.5, 0.0]), Target::Ball { center: vec![0.5, 0.0], radius: 0.1 }] {
        let rep = hitting_probability(&HittingExperiment {
            process: planar.clone(),
            e: e.clone(),
            target,
            radii: vec![0.2, 0.1, 0.05, 0.02],
            n_trials: 2000,
            seed: 5,
        })?;
        let freqs: Vec<String> = rep.series.iter().map(|s| format!("{:.3}", s.freq)).collect();
        println!("planar BM: frequencies [{}], CI at smallest r {:.3}..{:.3}", freqs.join(" "), rep.ci.0, rep.ci.1);
    }

    // in R³, P{B hits B(x0, r)} = r/|x0|, so the exponent is d - 2 = 1
    let spatial = Process::new(VarianceProfile::power(0.5)?, 3, grid.clone())?;
    let radii: Vec<f64> = (0..5).map(|k| 0.1 * 0.1f64.powf(k as f64 / 4.0)).collect();
    let rep = codimension_sweep(&spatial, &e, &[1.0, 0.0, 0.0], &radii, 20_000, 6)?;
    println!(
        "codimension slope {:.3} ± {:.3}, predicted d - dim X(E) = {:.3}",
        rep.slope, rep.stderr, rep.predicted
    );
    Ok(())
}
