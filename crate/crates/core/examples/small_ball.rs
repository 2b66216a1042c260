//! Small-ball probabilities P{inf over a δ-ball of |X - z| ≤ r} and their exponents.
//!
//! `cargo run --release --example small_ball`

use fgp::hitting::{small_ball_probability, SmallBallOptions};
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let bm = VarianceProfile::power(0.5)?;
    let radii: Vec<f64> = (3..=6).map(|k| 0.5f64.powi(k)).collect();
    let rep = small_ball_probability(&bm, 0.5, &[0.0, 0.0], &radii, 20_000, 1, SmallBallOptions::default())?;
    for s in &rep.hits.series {
        println!("BM d=2  r = {:.4}  freq {:.4}  [{:.4}, {:.4}]", s.r, s.freq, s.lo, s.hi);
    }
    if let Some((slope, se)) = rep.hits.exponent {
        println!("slope {slope:.3} ± {se:.3} (d = 2)");
    }
    let lb = VarianceProfile::logbm(1.0)?;
    let radii: Vec<f64> = (0..6).map(|k| 0.5 * 0.75f64.powi(k)).collect();
    let rep = small_ball_probability(&lb, 0.25, &[0.0], &radii, 5_000, 2, SmallBallOptions::default())?;
    if let Some((slope, se)) = rep.hits.exponent {
        println!("logBm β=1 d=1 slope {slope:.3} ± {se:.3}, windows resolved: {}", rep.resolved);
    }
    Ok(())
}
