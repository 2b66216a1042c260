//! Weighted point sets: intervals, gauge Cantor sets, products and the
//! critical-case pair of target sets.

mod cantor;
mod gauge;
mod io;
mod product;
mod regularity;
mod undecidable;

pub use cantor::{build_gauge_cantor, CantorTree};
pub use gauge::{GaugeFunction, GaugeKind};
pub use product::{product_measure, ProductSet};
pub use regularity::{verify_ahlfors_regularity, RegularityReport, RegularityScale};
pub use undecidable::{build_undecidable_pair, UndecidablePair};

use crate::error::{Error, Result};
use crate::metric::{self, MetricSpec, Points, Scan};

/// How a set was produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Construction {
    pub kind: String,
    pub depth: Option<u32>,
    pub gauge: Option<GaugeFunction>,
    pub seed: Option<u64>,
    pub notes: String,
}

/// A finite probability measure: atoms, masses and the metric they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSet {
    points: Points,
    masses: Vec<f64>,
    metric: MetricSpec,
    /// Per-coordinate bounds of the ambient box.
    ambient: Vec<(f64, f64)>,
    pub construction: Construction,
    /// Binary tree behind a gauge Cantor set; atom `i` then has address `i`.
    tree: Option<CantorTree>,
}

const MASS_TOL: f64 = 1e-12;

impl WeightedSet {
    pub fn new(points: Points, masses: Vec<f64>, metric: MetricSpec, ambient: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::Argument("point and mass counts differ".into()));
        }
        if points.is_empty() {
            return Err(Error::Argument("a weighted set needs at least one atom".into()));
        }
        if masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::Argument("masses must be non-negative".into()));
        }
        let total: f64 = masses.iter().sum();
        // summation error grows with the atom count
        if (total - 1.0).abs() > MASS_TOL + 4.0 * masses.len() as f64 * f64::EPSILON {
            return Err(Error::Argument(format!("masses sum to {total}, not 1")));
        }
        if ambient.len() != points.dim() {
            return Err(Error::Argument("ambient box has the wrong dimension".into()));
        }
        for p in points.iter() {
            for (x, (lo, hi)) in p.iter().zip(&ambient) {
                if x < lo || x > hi {
                    return Err(Error::Argument(format!("point coordinate {x} outside [{lo}, {hi}]")));
                }
            }
        }
        if let Some(d) = metric.dim() {
            if d != points.dim() {
                return Err(Error::Argument(format!("{} metric on {}-dimensional points", metric.kind_name(), points.dim())));
            }
        }
        Ok(Self { points, masses, metric, ambient, construction: Construction::default(), tree: None })
    }

    /// Equal masses on the given points, ambient box taken as their bounding box.
    pub fn uniform(points: Points, metric: MetricSpec) -> Result<Self> {
        let n = points.len();
        let d = points.dim();
        let ambient = (0..d)
            .map(|c| {
                points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[c]), hi.max(p[c])))
            })
            .collect();
        let mut s = Self::new(points, vec![1.0 / n as f64; n], metric, ambient)?;
        s.construction.kind = "uniform".into();
        Ok(s)
    }

    /// Normalized length on `[a, b]` as `n` midpoint atoms.
    pub fn interval(a: f64, b: f64, n: usize, metric: MetricSpec) -> Result<Self> {
        if !(a < b) || n == 0 {
            return Err(Error::Argument("interval needs a < b and n ≥ 1".into()));
        }
        let h = (b - a) / n as f64;
        let pts = Points::from_times(&(0..n).map(|i| a + h * (i as f64 + 0.5)).collect::<Vec<_>>())?;
        let mut s = Self::new(pts, vec![1.0 / n as f64; n], metric, vec![(a, b)])?;
        s.construction.kind = "interval".into();
        Ok(s)
    }

    /// Time set on the nodes `times` (e.g. simulation grid points) with equal masses.
    pub fn on_times(times: &[f64], metric: MetricSpec) -> Result<Self> {
        let pts = Points::from_times(times)?;
        let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n = times.len();
        let mut s = Self::new(pts, vec![1.0 / n as f64; n], metric, vec![(lo, hi)])?;
        s.construction.kind = "grid".into();
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.get(i)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn ambient(&self) -> &[(f64, f64)] {
        &self.ambient
    }

    pub fn tree(&self) -> Option<&CantorTree> {
        self.tree.as_ref()
    }

    /// Same atoms and masses under another metric.
    pub fn with_metric(mut self, metric: MetricSpec) -> Result<Self> {
        if let Some(d) = metric.dim() {
            if d != self.dim() {
                return Err(Error::Argument("metric dimension does not match the set".into()));
            }
        }
        self.metric = metric;
        Ok(self)
    }

    /// Whether distances only depend on separation along a sorted line of atoms.
    fn line_monotone(&self) -> bool {
        (self.metric.is_monotone_1d() || self.metric == MetricSpec::Euclidean) && self.sorted_line()
    }

    /// Whether the atoms are one-dimensional and already in increasing order.
    fn sorted_line(&self) -> bool {
        self.dim() == 1 && (self.tree.is_some() || self.points.coords().windows(2).all(|w| w[0] <= w[1]))
    }

    /// `ln |t_i - t_j|` for a set on the line; exact for Cantor trees far below `f64` range.
    pub fn log_separation(&self, i: usize, j: usize) -> f64 {
        match &self.tree {
            Some(t) => t.log_separation(i, j) + (self.ambient[0].1 - self.ambient[0].0).ln(),
            None => (self.points.get(i)[0] - self.points.get(j)[0]).abs().ln(),
        }
    }

    /// `ln` of the metric distance between atoms of a set on the line.
    pub fn log_distance(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Ok(f64::NEG_INFINITY);
        }
        if self.tree.is_some() {
            return self.metric.time_log_distance(self.log_separation(i, j));
        }
        Ok(self.distance(i, j).ln())
    }

    /// Metric distance between two atoms.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        if self.tree.is_some() {
            if let Ok(l) = self.metric.time_log_distance(self.log_separation(i, j)) {
                return l.exp();
            }
        }
        self.metric.distance_unchecked(self.points.get(i), self.points.get(j))
    }

    /// Greedy covering numbers of the support at each radius.
    pub fn covering_numbers(&self, radii: &[f64]) -> Result<Vec<usize>> {
        if radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Argument("radii must be positive".into()));
        }
        if self.line_monotone() {
            let n = self.len();
            return Ok(radii
                .iter()
                .map(|&r| {
                    if self.tree.is_some() {
                        let lr = r.ln();
                        let d = |i: usize, j: usize| {
                            if self.log_distance(i, j).unwrap_or(f64::INFINITY) <= lr { 0.0 } else { 1.0 }
                        };
                        metric::greedy_centers(n, 0.5, Scan::Monotone, d).len()
                    } else {
                        metric::greedy_centers(n, r, Scan::Monotone, |i, j| self.distance(i, j)).len()
                    }
                })
                .collect());
        }
        metric::covering_numbers(&self.points, &self.metric, radii)
    }

    /// `μ(B(x_i, r))` with a closed ball in the set's metric.
    pub fn ball_mass(&self, i: usize, r: f64) -> f64 {
        if self.line_monotone() {
            let n = self.len();
            let lr = r.ln();
            let inside = |j: usize| self.log_distance(i, j).map(|v| v <= lr).unwrap_or(false) || j == i;
            // the ball is a contiguous run of atoms around i
            let (mut lo, mut hi) = (0usize, i);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if inside(mid) { hi = mid } else { lo = mid + 1 }
            }
            let left = lo;
            let (mut lo, mut hi) = (i, n - 1);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if inside(mid) { lo = mid } else { hi = mid - 1 }
            }
            return self.masses[left..=lo].iter().sum();
        }
        let c = self.points.get(i);
        self.points
            .iter()
            .zip(&self.masses)
            .filter(|(p, _)| self.metric.distance_unchecked(c, p) <= r)
            .map(|(_, m)| m)
            .sum()
    }

    /// Atom indices ordered by increasing coordinate, for sets on the line.
    pub fn line_order(&self) -> Vec<usize> {
        if self.sorted_line() {
            (0..self.len()).collect()
        } else {
            self.points.lex_order()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_masses() {
        let p = Points::from_times(&[0.1, 0.2]).unwrap();
        assert!(WeightedSet::new(p.clone(), vec![0.5, 0.6], MetricSpec::Euclidean, vec![(0.0, 1.0)]).is_err());
        assert!(WeightedSet::new(p.clone(), vec![1.5, -0.5], MetricSpec::Euclidean, vec![(0.0, 1.0)]).is_err());
        assert!(WeightedSet::new(p, vec![0.5, 0.5], MetricSpec::Euclidean, vec![(0.15, 1.0)]).is_err());
    }

    #[test]
    fn interval_ball_masses() {
        let s = WeightedSet::interval(0.0, 1.0, 1000, MetricSpec::Euclidean).unwrap();
        let m = s.ball_mass(500, 0.1);
        assert!((m - 0.2).abs() < 2e-3);
        let g = s.clone().with_metric(MetricSpec::LogMetric).unwrap();
        assert!(g.ball_mass(500, 1.0) > 0.0);
    }
}
