use super::cantor::build_gauge_cantor;
use super::gauge::{GaugeFunction, GaugeKind};
use super::product::ProductSet;
use crate::error::{Error, Result};
use crate::metric::MetricSpec;
use crate::profiles::EllKind;

/// Two product sets of the same box dimension `d - α`: `f1` carries the
/// `φ_{d-α}(r) log^θ(e/r)` gauge, `f2` the `r^{d-α} log^{-θ}(e/r)` gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct UndecidablePair {
    pub d: usize,
    pub alpha: f64,
    pub theta: f64,
    pub ell: EllKind,
    pub f1: ProductSet,
    pub f2: ProductSet,
    /// One-dimensional factor gauges.
    pub gauge1: GaugeFunction,
    pub gauge2: GaugeFunction,
}

/// Builds both sets as `d`-fold products of Cantor factors on `ambient`.
pub fn build_undecidable_pair(
    d: usize,
    alpha: f64,
    theta: f64,
    ell: EllKind,
    ambient: (f64, f64),
    depth: u32,
) -> Result<UndecidablePair> {
    let df = d as f64;
    if d == 0 || !(alpha > 0.0 && alpha < df) {
        return Err(Error::Argument(format!("need 0 < alpha < d, got alpha = {alpha}, d = {d}")));
    }
    if !(theta > 1.0) {
        return Err(Error::Argument(format!("need theta > 1, got {theta}")));
    }
    let factor = |kind: GaugeKind| -> Result<(GaugeFunction, ProductSet)> {
        let g = GaugeFunction::new(kind)?.root(d)?;
        // probe far enough to cover the deepest level of any admissible depth
        let g = g.auto_scaled(0.5, 2000.0)?;
        let one = build_gauge_cantor(&g, depth, MetricSpec::Euclidean, ambient)?;
        Ok((g, ProductSet::new(vec![one; d])?))
    };
    let (gauge1, f1) = factor(GaugeKind::PseudoPlus { d: df, alpha, theta, ell })?;
    let (gauge2, f2) = factor(GaugeKind::PseudoMinus { d: df, alpha, theta })?;
    Ok(UndecidablePair { d, alpha, theta, ell, f1, f2, gauge1, gauge2 })
}

impl UndecidablePair {
    /// `φ_{d-α}(r) = r^{d-α} ℓ^{d-α}(r)`.
    pub fn phi(&self, r: f64) -> f64 {
        GaugeFunction::new(GaugeKind::PhiDEll { d: self.d as f64 - self.alpha, ell: self.ell })
            .map(|g| g.eval(r))
            .unwrap_or(f64::NAN)
    }

    /// Partial sums `Σ_{j ≤ J} log^{-θ}(2^j e/κ)` bounding the `(d-α)`-energy of `μ₂`.
    pub fn energy_partial_sums(&self, j_max: usize) -> Vec<f64> {
        let kappa = self.gauge2.scale;
        (0..=j_max)
            .scan(0.0, |acc, j| {
                let log = j as f64 * std::f64::consts::LN_2 + 1.0 - kappa.ln();
                *acc += log.powf(-self.theta);
                Some(*acc)
            })
            .collect()
    }

    /// `φ_{d-α}(r) N(F₁, r)` with `N` counting sup-norm cubes of half-side `r`.
    pub fn content_series(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let n = self.f1.box_covering_numbers(radii)?;
        Ok(radii.iter().zip(n).map(|(&r, c)| self.phi(r) * c).collect())
    }

    /// Smallest radius at which both sets still resolve their deepest level.
    pub fn leaf_scale(&self) -> f64 {
        [&self.f1, &self.f2]
            .iter()
            .flat_map(|p| p.factors())
            .map(|f| {
                let (a, b) = f.ambient()[0];
                f.tree().map_or(0.0, |t| (t.log_diams.last().unwrap() + (b - a).ln()).exp())
            })
            .fold(0.0, f64::max)
    }
}
