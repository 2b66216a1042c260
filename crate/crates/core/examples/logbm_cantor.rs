//! Images of a δ-regular Cantor time set under logarithmic Brownian motion,
//! simulated exactly on the atoms from the increment covariance.
//!
//! `cargo run --release --example logbm_cantor`

use fgp::dimension::image_dimension_sampled;
use fgp::metric::MetricSpec;
use fgp::sets::{build_gauge_cantor, GaugeFunction, GaugeKind};
use fgp::simulation::{CovarianceFactor, IncrementModel};
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let p = VarianceProfile::logbm(1.0)?;
    let gauge = GaugeFunction::new(GaugeKind::ProfilePower { profile: p.clone(), s: 0.5 })?;
    let set = build_gauge_cantor(&gauge, 9, MetricSpec::gamma_delta(p.clone()), (0.5, 0.54))?;
    let model = IncrementModel::new(&p, 0.0)?;
    let factor = CovarianceFactor::new(&model.covariance_on(&set)?)?;
    // dim_δ E = 1/2, so the image dimension sits between 1/2 and 1
    for seed in 0..3 {
        let est = image_dimension_sampled(&factor, 1, 20, seed)?;
        println!("seed {seed}: image dimension {:.3} ± {:.3}", est.value, est.stderr);
    }
    Ok(())
}
