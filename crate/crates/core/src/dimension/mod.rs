//! Box-counting, energy and content estimates in arbitrary metrics, and the
//! image/graph dimension pipelines for simulated paths.

mod energy;
mod paths;

pub use energy::{capacity_dimension, energies, energy, EnergyReport};
pub use paths::{
    graph_dimension, graph_dimension_with_drift, image_dimension, image_dimension_sampled, product_dimension_check,
    ProductDimensionReport,
};

use crate::error::{Error, Result};
use crate::fit::ols;
use crate::metric::{self, MetricSpec, Points};
use crate::sets::{GaugeFunction, WeightedSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimMethod {
    BoxCount,
    EnergyScan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: DimMethod,
    /// `(r_min, r_max)` for box counts, `(β_min, β_max)` for energy scans.
    pub fit_window: (f64, f64),
    /// `(r, N(r))` or `(β, ln ρ(β))`.
    pub counts: Vec<(f64, f64)>,
    /// Per-path values when the estimate averages over an ensemble.
    pub per_path: Vec<f64>,
    /// Energies stayed bounded at every probed order.
    pub unbounded: bool,
    pub inconclusive: bool,
}

/// Fraction of the ladder dropped at each end before fitting.
pub const TRIM: f64 = 0.15;

/// Geometric ladder of `n` radii from `r_max` down to `r_min`.
pub fn geometric_radii(r_min: f64, r_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_min < r_max) || n < 2 {
        return Err(Error::Argument("need 0 < r_min < r_max and at least two radii".into()));
    }
    let q = (r_min / r_max).ln() / (n - 1) as f64;
    Ok((0..n).map(|k| r_max * (q * k as f64).exp()).collect())
}

/// Slope of `ln N` against `ln(1/r)` after trimming both ends of the ladder; the
/// radii must span at least `min_decades`.
pub fn fit_counts(radii: &[f64], counts: &[f64], min_decades: f64) -> Result<DimensionEstimate> {
    if radii.len() != counts.len() {
        return Err(Error::Argument("radii and counts differ in length".into()));
    }
    if radii.len() < 4 {
        return Err(Error::Argument("a box-count fit needs at least 4 radii".into()));
    }
    let mut pairs: Vec<(f64, f64)> = radii.iter().copied().zip(counts.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (r_max, r_min) = (pairs[0].0, pairs[pairs.len() - 1].0);
    if !(r_min > 0.0) || (r_max / r_min).log10() < min_decades - 1e-9 {
        return Err(Error::Argument(format!("radii span fewer than {min_decades} decades")));
    }
    if pairs.iter().any(|p| !(p.1 >= 1.0)) {
        return Err(Error::Argument("cover counts must be at least 1".into()));
    }
    let k = (TRIM * pairs.len() as f64).floor() as usize;
    let kept = &pairs[k..pairs.len() - k];
    let x: Vec<f64> = kept.iter().map(|p| -p.0.ln()).collect();
    let y: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let f = ols(&x, &y)?;
    Ok(DimensionEstimate {
        value: f.slope.max(0.0),
        stderr: f.slope_stderr,
        method: DimMethod::BoxCount,
        fit_window: (kept[kept.len() - 1].0, kept[0].0),
        counts: pairs,
        per_path: Vec::new(),
        unbounded: false,
        inconclusive: false,
    })
}

/// Box dimension of a weighted set in its own metric over an explicit ladder
/// (at least 4 radii across 2 decades).
pub fn box_dimension(set: &WeightedSet, radii: &[f64]) -> Result<DimensionEstimate> {
    let n = set.covering_numbers(radii)?;
    fit_counts(radii, &n.iter().map(|&c| c as f64).collect::<Vec<_>>(), 2.0)
}

/// Box dimension of a bare point cloud.
pub fn box_dimension_points(points: &Points, metric: &MetricSpec, radii: &[f64]) -> Result<DimensionEstimate> {
    let n = metric::covering_numbers(points, metric, radii)?;
    fit_counts(radii, &n.iter().map(|&c| c as f64).collect::<Vec<_>>(), 2.0)
}

/// Whether the content series shrinks, levels off or grows as `r → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentTrend {
    Vanishing,
    Bounded,
    Diverging,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentEstimate {
    /// Smallest cover sum over the ladder, an upper estimate of the content.
    pub value: f64,
    /// `(r, N(r) ψ(2r))`
    pub series: Vec<(f64, f64)>,
    /// Slope of `ln Σ` against `ln(1/r)`.
    pub log_slope: f64,
    pub trend: ContentTrend,
}

const TREND_SLOPE: f64 = 0.05;

pub fn content_from_counts(radii: &[f64], counts: &[f64], gauge: &GaugeFunction) -> Result<ContentEstimate> {
    if radii.len() < 3 || radii.len() != counts.len() {
        return Err(Error::Argument("content needs at least 3 radii with counts".into()));
    }
    let mut series: Vec<(f64, f64)> = radii.iter().zip(counts).map(|(&r, &n)| (r, n * gauge.eval(2.0 * r))).collect();
    series.sort_by(|a, b| b.0.total_cmp(&a.0));
    let x: Vec<f64> = series.iter().map(|p| -p.0.ln()).collect();
    let y: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let log_slope = ols(&x, &y)?.slope;
    let trend = if log_slope < -TREND_SLOPE {
        ContentTrend::Vanishing
    } else if log_slope > TREND_SLOPE {
        ContentTrend::Diverging
    } else {
        ContentTrend::Bounded
    };
    let value = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(ContentEstimate { value, series, log_slope, trend })
}

/// Greedy-cover estimate of the `ψ`-Hausdorff content.
pub fn hausdorff_content(set: &WeightedSet, gauge: &GaugeFunction, radii: &[f64]) -> Result<ContentEstimate> {
    let n = set.covering_numbers(radii)?;
    content_from_counts(radii, &n.iter().map(|&c| c as f64).collect::<Vec<_>>(), gauge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::VarianceProfile;
    use crate::sets::build_gauge_cantor;

    #[test]
    fn unit_interval() {
        let s = WeightedSet::interval(0.0, 1.0, 20_000, MetricSpec::Euclidean).unwrap();
        let radii = geometric_radii(1e-3, 0.1, 12).unwrap();
        let e = box_dimension(&s, &radii).unwrap();
        assert!((e.value - 1.0).abs() < 0.05, "{e:?}");
        assert!(e.fit_window.0 < e.fit_window.1);
    }

    #[test]
    fn ternary_cantor() {
        let g = GaugeFunction::power(2f64.ln() / 3f64.ln()).unwrap();
        let s = build_gauge_cantor(&g, 14, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let radii: Vec<f64> = (1..=10).map(|k| 0.5 * 3f64.powi(-k)).collect();
        let e = box_dimension(&s, &radii).unwrap();
        assert!((e.value - 0.6309).abs() < 0.05, "{e:?}");
    }

    #[test]
    fn interval_under_power_delta() {
        let m = MetricSpec::gamma_delta(VarianceProfile::power(0.5).unwrap());
        let s = WeightedSet::interval(0.1, 0.9, 20_000, m).unwrap();
        let radii = geometric_radii(0.01, 0.3, 10).unwrap();
        let e = fit_counts(&radii, &s.covering_numbers(&radii).unwrap().iter().map(|&c| c as f64).collect::<Vec<_>>(), 1.0).unwrap();
        assert!((e.value - 2.0).abs() < 0.1, "{e:?}");
    }

    #[test]
    fn degenerate_ladders() {
        let s = WeightedSet::interval(0.0, 1.0, 100, MetricSpec::Euclidean).unwrap();
        assert!(box_dimension(&s, &[0.1, 0.05, 0.02]).is_err());
        assert!(box_dimension(&s, &[0.1, 0.08, 0.05, 0.02]).is_err());
    }

    #[test]
    fn content_trends() {
        let one = WeightedSet::uniform(Points::from_times(&[0.3]).unwrap(), MetricSpec::Euclidean).unwrap();
        let radii = geometric_radii(1e-4, 0.1, 8).unwrap();
        let c = hausdorff_content(&one, &GaugeFunction::power(1.0).unwrap(), &radii).unwrap();
        assert_eq!(c.trend, ContentTrend::Vanishing);
        let line = WeightedSet::interval(0.0, 1.0, 100_000, MetricSpec::Euclidean).unwrap();
        let c = hausdorff_content(&line, &GaugeFunction::power(0.5).unwrap(), &radii).unwrap();
        assert_eq!(c.trend, ContentTrend::Diverging);
        assert!((c.log_slope - 0.5).abs() < 0.05);
    }
}
