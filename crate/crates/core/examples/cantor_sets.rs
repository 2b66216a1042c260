//! Gauge-driven Cantor sets: construction, ball-mass regularity, box dimension,
//! Hausdorff content and CSV export.
//!
//! `cargo run --release --example cantor_sets`

use fgp::dimension::{box_dimension, geometric_radii, hausdorff_content};
use fgp::metric::MetricSpec;
use fgp::profiles::EllKind;
use fgp::sets::{build_gauge_cantor, verify_ahlfors_regularity, GaugeFunction, GaugeKind, RegularityScale, WeightedSet};
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    // middle-thirds Cantor set as the ψ(r) = r^{log 2/log 3} set
    let s = 2f64.ln() / 3f64.ln();
    let g = GaugeFunction::power(s)?;
    let ternary = build_gauge_cantor(&g, 12, MetricSpec::Euclidean, (0.0, 1.0))?;
    let radii = geometric_radii(1e-4, 0.1, 12)?;
    let dim = box_dimension(&ternary, &radii)?;
    let reg = verify_ahlfors_regularity(&ternary, RegularityScale::Gauge(g.clone()), &radii)?;
    println!("ternary: {} atoms, box dim {:.4} ± {:.4}, c = {:.3} ({})", ternary.len(), dim.value, dim.stderr, reg.c, reg.verdict);
    let content = hausdorff_content(&ternary, &g, &radii)?;
    println!("         content ≈ {:.3}, trend {:?}", content.value, content.trend);

    // a gauge with a logarithmic correction has the same box dimension but a different content
    let phi = GaugeFunction::new(GaugeKind::PhiDEll { d: 0.5, ell: EllKind::SqrtLog })?.auto_scaled(0.5, 2000.0)?;
    let set = build_gauge_cantor(&phi, 12, MetricSpec::Euclidean, (0.0, 1.0))?;
    println!("φ_d gauge: box dim {:.4}", box_dimension(&set, &radii)?.value);

    // a δ-regular set for logBm, measured in its own canonical metric
    let lb = VarianceProfile::logbm(1.0)?;
    let gd = GaugeFunction::new(GaugeKind::ProfilePower { profile: lb.clone(), s: 0.5 })?;
    let delta_set = build_gauge_cantor(&gd, 9, MetricSpec::gamma_delta(lb.clone()), (0.5, 0.54))?;
    println!("logBm δ-Cantor: {} atoms spanning [{:.6}, {:.6}]", delta_set.len(), delta_set.point(0)[0], delta_set.point(delta_set.len() - 1)[0]);

    let mut csv = vec![];
    ternary.write_csv(&mut csv)?;
    let back = WeightedSet::read_csv(csv.as_slice(), MetricSpec::Euclidean)?;
    println!("csv round trip: {} atoms, total mass {}", back.len(), back.masses().iter().sum::<f64>());
    Ok(())
}
