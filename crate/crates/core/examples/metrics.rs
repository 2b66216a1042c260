//! Canonical metrics, greedy coverings and packings, and γ-dyadic covers.
//!
//! `cargo run --example metrics`

use fgp::metric::{covering_numbers, gamma_dyadic_cover, packing_number, MetricSpec, Points};
use fgp::simulation::stream_rng;
use fgp::{Result, VarianceProfile};
use rand::Rng;

fn main() -> Result<()> {
    let lb = VarianceProfile::logbm(1.0)?;
    let delta = MetricSpec::gamma_delta(lb.clone());
    println!("δ(0.1, 0.1 + 1e-9) under logBm: {:.4}", delta.distance(&[0.1], &[0.1 + 1e-9])?);

    // space-time points under max(δ, |·|)
    let st = MetricSpec::product(MetricSpec::gamma_delta(VarianceProfile::power(0.5)?), 1)?;
    let mut rng = stream_rng(11, 0);
    let coords: Vec<f64> = (0..2000).flat_map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let pts = Points::new(2, coords)?;
    let radii = [0.4, 0.2, 0.1, 0.05];
    let n = covering_numbers(&pts, &st, &radii)?;
    for (r, n) in radii.iter().zip(&n) {
        println!("r = {r:<5} N(r) = {n:<5} P(r/2) = {}", packing_number(&pts, &st, r / 2.0)?);
    }

    // cells of γ-length 2^-n tile [0, 1]
    for level in [1, 2, 3, 4] {
        let g = gamma_dyadic_cover(&lb, level, 1.0)?;
        println!("level {level}: {} logBm cells of width {:.3e}", g.intervals.len(), g.cell);
    }
    Ok(())
}
