//! Distances, γ-dyadic covers and covering/packing counts.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::profiles::VarianceProfile;
use crate::text::{fmt_f64, Record};

/// `n` points of a common dimension, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::Argument("coordinate count is not a multiple of the dimension".into()));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("points must be finite".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_times(t: &[f64]) -> Result<Self> {
        Self::new(1, t.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    /// Permutation that sorts the points lexicographically.
    pub fn lex_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.get(a)
                .iter()
                .zip(self.get(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        idx
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            coords.extend_from_slice(self.get(i));
        }
        Self { dim: self.dim, coords }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    /// `δ(s,t) = γ(|t-s|)`, with separations beyond the profile domain capped there.
    GammaDelta(VarianceProfile),
    Euclidean,
    /// `δ_log(s,t) = 1/log(1/|t-s|)`, capped at separation `e^{-2}` where it stops being concave.
    LogMetric,
    /// Measured distances between the grid times.
    Empirical { times: Vec<f64>, matrix: DMatrix<f64> },
    /// `ρ((s,x),(t,y)) = max(time(s,t), ‖x-y‖)` on points `(t, x_1..x_d)`.
    Product { time: Box<MetricSpec>, space_dim: usize },
}

const LOG_METRIC_CAP: f64 = -2.0;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

impl MetricSpec {
    pub fn gamma_delta(profile: VarianceProfile) -> Self {
        MetricSpec::GammaDelta(profile)
    }

    pub fn product(time: MetricSpec, space_dim: usize) -> Result<Self> {
        if time.dim() != Some(1) {
            return Err(Error::Argument("product needs a time metric".into()));
        }
        if space_dim == 0 {
            return Err(Error::Argument("product needs space_dim ≥ 1".into()));
        }
        Ok(MetricSpec::Product { time: Box::new(time), space_dim })
    }

    pub fn empirical(times: Vec<f64>, matrix: DMatrix<f64>) -> Result<Self> {
        let n = times.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Argument("empirical matrix does not match the times".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("empirical times must increase".into()));
        }
        Ok(MetricSpec::Empirical { times, matrix })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MetricSpec::GammaDelta(_) => "gamma_delta",
            MetricSpec::Euclidean => "euclidean",
            MetricSpec::LogMetric => "log_metric",
            MetricSpec::Empirical { .. } => "empirical",
            MetricSpec::Product { .. } => "product",
        }
    }

    /// Point dimension, `None` when any dimension is accepted.
    pub fn dim(&self) -> Option<usize> {
        match self {
            MetricSpec::Euclidean => None,
            MetricSpec::Product { space_dim, .. } => Some(space_dim + 1),
            _ => Some(1),
        }
    }

    /// Whether the distance is a non-decreasing function of `|t - s|` on the line.
    pub fn is_monotone_1d(&self) -> bool {
        matches!(self, MetricSpec::GammaDelta(_) | MetricSpec::LogMetric)
    }

    /// Time-metric distance as a function of the separation.
    pub fn time_distance(&self, sep: f64) -> f64 {
        let sep = sep.abs();
        match self {
            MetricSpec::GammaDelta(p) => p.gamma_unchecked(sep.min(p.domain_max())),
            MetricSpec::LogMetric => {
                if sep == 0.0 {
                    0.0
                } else {
                    -1.0 / sep.ln().min(LOG_METRIC_CAP)
                }
            }
            _ => sep,
        }
    }

    /// `ln` of the time distance from `ln |t - s|`, valid far below `f64` underflow.
    pub fn time_log_distance(&self, log_sep: f64) -> Result<f64> {
        match self {
            MetricSpec::GammaDelta(p) => {
                let l = (-log_sep).max(p.log_scale_min());
                Ok(p.log_gamma(l))
            }
            MetricSpec::LogMetric => Ok(-(-log_sep).max(-LOG_METRIC_CAP).ln()),
            MetricSpec::Euclidean => Ok(log_sep),
            _ => Err(Error::Argument(format!("{} has no log-scale form", self.kind_name()))),
        }
    }

    fn check(&self, a: &[f64], b: &[f64]) -> Result<()> {
        if a.len() != b.len() {
            return Err(Error::Argument(format!("points of dimension {} and {}", a.len(), b.len())));
        }
        if let Some(d) = self.dim() {
            if a.len() != d {
                return Err(Error::Argument(format!(
                    "{} expects dimension {d}, got {}",
                    self.kind_name(),
                    a.len()
                )));
            }
        }
        Ok(())
    }

    fn empirical_index(times: &[f64], t: f64) -> Result<usize> {
        let k = times.partition_point(|&v| v < t);
        for c in [k.wrapping_sub(1), k] {
            if c < times.len() && (times[c] - t).abs() <= 1e-12 * (1.0 + t.abs()) {
                return Ok(c);
            }
        }
        Err(Error::Argument(format!("time {t} is not on the empirical grid")))
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check(a, b)?;
        match self {
            MetricSpec::Empirical { times, matrix } => {
                let i = Self::empirical_index(times, a[0])?;
                let j = Self::empirical_index(times, b[0])?;
                Ok(matrix[(i, j)])
            }
            MetricSpec::Product { time, .. } => {
                Ok(time.distance(&a[..1], &b[..1])?.max(euclid(&a[1..], &b[1..])))
            }
            _ => Ok(self.distance_unchecked(a, b)),
        }
    }

    /// Distance for points already known to fit the metric (empirical lookups fall back to NaN).
    pub fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            MetricSpec::Euclidean => euclid(a, b),
            MetricSpec::GammaDelta(_) | MetricSpec::LogMetric => self.time_distance(a[0] - b[0]),
            MetricSpec::Empirical { .. } => self.distance(a, b).unwrap_or(f64::NAN),
            MetricSpec::Product { time, .. } => {
                time.distance_unchecked(&a[..1], &b[..1]).max(euclid(&a[1..], &b[1..]))
            }
        }
    }

    /// Largest first-coordinate gap that can still be within distance `r`,
    /// or `None` when no such bound is available.
    pub fn coordinate_window(&self, r: f64) -> Option<f64> {
        match self {
            MetricSpec::Euclidean => Some(r),
            MetricSpec::GammaDelta(p) => {
                if r >= p.gamma_max() {
                    Some(f64::INFINITY)
                } else {
                    // an underflowing window admits only equal times
                    p.inverse_log_scale(r).ok().map(|l| (-l).exp())
                }
            }
            MetricSpec::LogMetric => {
                if r >= -1.0 / LOG_METRIC_CAP {
                    Some(f64::INFINITY)
                } else {
                    Some((-1.0 / r).exp())
                }
            }
            MetricSpec::Product { time, .. } => time.coordinate_window(r),
            MetricSpec::Empirical { .. } => None,
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={}", self.kind_name())?;
        match self {
            MetricSpec::GammaDelta(p) => write!(f, "; {}", prefixed(&p.to_string(), "profile")),
            MetricSpec::Euclidean | MetricSpec::LogMetric => Ok(()),
            MetricSpec::Empirical { times, matrix } => {
                let list = |v: &mut dyn Iterator<Item = f64>| v.map(fmt_f64).collect::<Vec<_>>().join(",");
                write!(f, "; times={}", list(&mut times.iter().copied()))?;
                write!(f, "; matrix={}", list(&mut matrix.transpose().iter().copied()))
            }
            MetricSpec::Product { time, space_dim } => {
                write!(f, "; space_dim={space_dim}; {}", prefixed(&time.to_string(), "time"))
            }
        }
    }
}

fn prefixed(record: &str, prefix: &str) -> String {
    record
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| format!("{prefix}.{p}"))
        .collect::<Vec<_>>()
        .join("; ")
}

fn sub_record(s: &str, prefix: &str) -> String {
    let pre = format!("{prefix}.");
    s.split(';')
        .map(str::trim)
        .filter_map(|p| p.strip_prefix(&pre))
        .collect::<Vec<_>>()
        .join("; ")
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = Record::parse(s)?;
        match r.str("kind")? {
            "gamma_delta" => Ok(MetricSpec::GammaDelta(sub_record(s, "profile").parse()?)),
            "euclidean" => Ok(MetricSpec::Euclidean),
            "log_metric" => Ok(MetricSpec::LogMetric),
            "empirical" => {
                let times = r.list("times")?;
                let vals = r.list("matrix")?;
                let n = times.len();
                if vals.len() != n * n {
                    return Err(Error::Parse("empirical matrix size does not match times".into()));
                }
                MetricSpec::empirical(times, DMatrix::from_row_slice(n, n, &vals))
            }
            "product" => {
                let d = r.f64("space_dim")?;
                if d.fract() != 0.0 || d < 1.0 {
                    return Err(Error::Parse("space_dim must be a positive integer".into()));
                }
                MetricSpec::product(sub_record(s, "time").parse()?, d as usize)
            }
            other => Err(Error::Parse(format!("unknown metric kind '{other}'"))),
        }
    }
}

/// How the greedy scan may prune candidate pairs.
#[derive(Debug, Clone, Copy)]
pub enum Scan<'a> {
    /// Points are in increasing position on a line and distance grows with separation.
    Monotone,
    /// Sorted first coordinates; pairs whose gap exceeds the window are never close.
    Window { keys: &'a [f64], width: f64 },
    Brute,
}

/// Greedy centers in index order: a point becomes a center unless an earlier
/// center lies within `r`. The centers are pairwise more than `r` apart.
pub fn greedy_centers<D: Fn(usize, usize) -> f64>(n: usize, r: f64, scan: Scan<'_>, dist: D) -> Vec<usize> {
    let mut covered = vec![false; n];
    let mut centers = Vec::new();
    for i in 0..n {
        if covered[i] {
            continue;
        }
        centers.push(i);
        covered[i] = true;
        match scan {
            Scan::Monotone => {
                for j in i + 1..n {
                    if dist(i, j) > r {
                        break;
                    }
                    covered[j] = true;
                }
            }
            Scan::Window { keys, width } => {
                for j in i + 1..n {
                    if keys[j] - keys[i] > width {
                        break;
                    }
                    if !covered[j] && dist(i, j) <= r {
                        covered[j] = true;
                    }
                }
            }
            Scan::Brute => {
                for j in i + 1..n {
                    if !covered[j] && dist(i, j) <= r {
                        covered[j] = true;
                    }
                }
            }
        }
    }
    centers
}

/// Sorted copy of the points plus the scan strategy the metric allows.
fn prepared(points: &Points, metric: &MetricSpec) -> Result<Points> {
    if let Some(d) = metric.dim() {
        if points.dim() != d {
            return Err(Error::Argument(format!(
                "{} expects dimension {d}, points have {}",
                metric.kind_name(),
                points.dim()
            )));
        }
    }
    if let MetricSpec::Empirical { times, .. } = metric {
        for p in points.iter() {
            MetricSpec::empirical_index(times, p[0])?;
        }
    }
    Ok(points.select(&points.lex_order()))
}

fn count_centers(sorted: &Points, metric: &MetricSpec, r: f64) -> usize {
    let n = sorted.len();
    let dist = |i: usize, j: usize| metric.distance_unchecked(sorted.get(i), sorted.get(j));
    if metric.is_monotone_1d() {
        return greedy_centers(n, r, Scan::Monotone, dist).len();
    }
    match metric.coordinate_window(r) {
        Some(width) => {
            let keys: Vec<f64> = sorted.iter().map(|p| p[0]).collect();
            greedy_centers(n, r, Scan::Window { keys: &keys, width }, dist).len()
        }
        None => greedy_centers(n, r, Scan::Brute, dist).len(),
    }
}

/// Greedy cover by closed `r`-balls centred at points of the set.
pub fn covering_number(points: &Points, metric: &MetricSpec, r: f64) -> Result<usize> {
    if !(r > 0.0) {
        return Err(Error::Argument(format!("radius must be positive, got {r}")));
    }
    if points.is_empty() {
        return Ok(0);
    }
    Ok(count_centers(&prepared(points, metric)?, metric, r))
}

/// Greedy packing: centres pairwise more than `2r` apart, so the `r`-balls are disjoint.
pub fn packing_number(points: &Points, metric: &MetricSpec, r: f64) -> Result<usize> {
    if !(r > 0.0) {
        return Err(Error::Argument(format!("radius must be positive, got {r}")));
    }
    if points.is_empty() {
        return Ok(0);
    }
    Ok(count_centers(&prepared(points, metric)?, metric, 2.0 * r))
}

/// Covering numbers at several radii, sorting the points once.
pub fn covering_numbers(points: &Points, metric: &MetricSpec, radii: &[f64]) -> Result<Vec<usize>> {
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Argument("radii must be positive".into()));
    }
    if points.is_empty() {
        return Ok(vec![0; radii.len()]);
    }
    let sorted = prepared(points, metric)?;
    Ok(radii.iter().map(|&r| count_centers(&sorted, metric, r)).collect())
}

/// The tiling of `[0, t_end]` by cells of length `γ⁻¹(2⁻ⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaDyadicGrid {
    pub level: u32,
    pub cell: f64,
    pub t_end: f64,
    pub intervals: Vec<(f64, f64)>,
}

const MAX_CELLS: f64 = 1e7;

pub fn gamma_dyadic_cover(profile: &VarianceProfile, level: u32, t_end: f64) -> Result<GammaDyadicGrid> {
    if !(t_end > 0.0 && t_end <= 1.0) {
        return Err(Error::Argument(format!("t_end must lie in (0,1], got {t_end}")));
    }
    let v = 0.5f64.powi(level as i32);
    if v > profile.gamma_max() {
        return Err(Error::Argument(format!("2^-{level} exceeds γ(domain_max)")));
    }
    let cell = profile.inverse(v)?;
    if !(cell > 0.0) || cell < t_end * f64::EPSILON * 16.0 {
        return Err(Error::Resolution(format!("cell γ⁻¹(2^-{level}) = {cell:e} is below float resolution")));
    }
    let count = (t_end / cell).ceil();
    if count > MAX_CELLS {
        return Err(Error::Resource(format!("{count} γ-dyadic cells requested")));
    }
    let intervals = (0..count as usize)
        .map(|j| (j as f64 * cell, ((j + 1) as f64 * cell).min(t_end)))
        .filter(|(a, b)| b > a)
        .collect();
    Ok(GammaDyadicGrid { level, cell, t_end, intervals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let g = MetricSpec::gamma_delta(VarianceProfile::power(0.5).unwrap());
        assert!((g.distance(&[0.0], &[0.25]).unwrap() - 0.5).abs() < 1e-15);
        let l = MetricSpec::LogMetric;
        let d = l.distance(&[0.0], &[(-100.0f64).exp()]).unwrap();
        assert!((d - 0.01).abs() < 1e-9);
        assert!(g.distance(&[0.0, 1.0], &[0.0]).is_err());
    }

    #[test]
    fn product_takes_the_max() {
        // δ = 0.3 from a power profile: γ(0.09) = 0.3
        let m = MetricSpec::product(MetricSpec::gamma_delta(VarianceProfile::power(0.5).unwrap()), 1).unwrap();
        let d = m.distance(&[0.0, 0.0], &[0.09, 0.4]).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
        let d = m.distance(&[0.0, 0.0], &[0.09, 0.1]).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
    }

    #[test]
    fn log_distance_matches() {
        let p = VarianceProfile::logbm(1.0).unwrap();
        let m = MetricSpec::gamma_delta(p);
        let sep: f64 = 1e-30;
        assert!((m.time_log_distance(sep.ln()).unwrap() - m.time_distance(sep).ln()).abs() < 1e-12);
        assert!((MetricSpec::LogMetric.time_log_distance(-1000.0).unwrap() + 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn empirical_lookup() {
        let times = vec![0.0, 0.5, 1.0];
        let mat = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.5, 2.0, 1.5, 0.0]);
        let m = MetricSpec::empirical(times, mat).unwrap();
        assert_eq!(m.distance(&[0.5], &[1.0]).unwrap(), 1.5);
        assert!(m.distance(&[0.25], &[1.0]).is_err());
        assert_eq!(m.to_string().parse::<MetricSpec>().unwrap(), m);
    }

    #[test]
    fn records_round_trip() {
        let ms = [
            MetricSpec::Euclidean,
            MetricSpec::LogMetric,
            MetricSpec::gamma_delta(VarianceProfile::logbm(1.0).unwrap()),
            MetricSpec::product(MetricSpec::gamma_delta(VarianceProfile::power(0.8).unwrap()), 2).unwrap(),
        ];
        for m in ms {
            assert_eq!(m.to_string().parse::<MetricSpec>().unwrap(), m, "{m}");
        }
        assert!("kind=product; space_dim=0; time.kind=euclidean".parse::<MetricSpec>().is_err());
    }

    #[test]
    fn covering_examples() {
        let n = 1000;
        let pts = Points::from_times(&(0..n).map(|i| (i as f64 + 0.5) / n as f64).collect::<Vec<_>>()).unwrap();
        let c = covering_number(&pts, &MetricSpec::Euclidean, 0.1).unwrap();
        assert!((5..=10).contains(&c), "{c}");
        let one = Points::from_times(&[0.3]).unwrap();
        for r in [1e-6, 1.0, 10.0] {
            assert_eq!(covering_number(&one, &MetricSpec::Euclidean, r).unwrap(), 1);
            assert_eq!(packing_number(&one, &MetricSpec::Euclidean, r).unwrap(), 1);
        }
        let empty = Points::new(2, vec![]).unwrap();
        assert_eq!(covering_number(&empty, &MetricSpec::Euclidean, 0.1).unwrap(), 0);
    }

    #[test]
    fn scan_strategies_agree() {
        let t: Vec<f64> = (0..400).map(|i| ((i * 7919) % 400) as f64 / 400.0).collect();
        let pts = Points::from_times(&t).unwrap();
        let g = MetricSpec::gamma_delta(VarianceProfile::power(0.5).unwrap());
        let sorted = pts.select(&pts.lex_order());
        for r in [0.05, 0.1, 0.3] {
            let d = |i: usize, j: usize| g.distance_unchecked(sorted.get(i), sorted.get(j));
            let a = greedy_centers(400, r, Scan::Monotone, d).len();
            let b = greedy_centers(400, r, Scan::Brute, d).len();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dyadic_examples() {
        let lip = VarianceProfile::power(1.0).unwrap();
        let g = gamma_dyadic_cover(&lip, 5, 1.0).unwrap();
        assert!((g.cell - 1.0 / 32.0).abs() < 1e-15);
        assert_eq!(g.intervals.len(), 32);
        let half = VarianceProfile::power(0.5).unwrap();
        assert!((gamma_dyadic_cover(&half, 4, 1.0).unwrap().cell - 2f64.powi(-8)).abs() < 1e-15);
        let lb = VarianceProfile::logbm(1.0).unwrap();
        let g = gamma_dyadic_cover(&lb, 3, 0.01).unwrap();
        assert!((g.cell / (-8.0f64).exp() - 1.0).abs() < 1e-12);
        assert!(matches!(gamma_dyadic_cover(&lb, 12, 0.5), Err(Error::Resolution(_))));
        // tiling
        let g = gamma_dyadic_cover(&half, 3, 0.7).unwrap();
        assert_eq!(g.intervals[0].0, 0.0);
        assert_eq!(g.intervals.last().unwrap().1, 0.7);
        assert!(g.intervals.windows(2).all(|w| w[0].1 == w[1].0));
    }
}
