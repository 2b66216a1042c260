//! Monte Carlo hitting experiments: small balls, hitting frequencies along
//! resolution ladders, codimension fits, local non-determinism and the
//! critical-dimension pair.

mod bridge;
mod lnd;
mod small_ball;

pub use lnd::{lnd_verify, lnd_verify_profile, LndReport};
pub use small_ball::{small_ball_probability, SmallBallOptions, SmallBallReport};

use rayon::prelude::*;

use crate::dimension::{fit_counts, geometric_radii};
use crate::error::{Error, Result};
use crate::fit::ols;
use crate::metric::MetricSpec;
use crate::profiles::{ProfileKind, VarianceProfile};
use crate::sets::{ProductSet, UndecidablePair, WeightedSet};
use crate::simulation::{PathSampler, SimulationGrid, VolterraSampler};

/// A `d`-dimensional Volterra process on a grid starting at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    pub profile: VarianceProfile,
    pub d: usize,
    pub grid: SimulationGrid,
}

impl Process {
    pub fn new(profile: VarianceProfile, d: usize, grid: SimulationGrid) -> Result<Self> {
        if d == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        VolterraSampler::new(&profile, &grid)?;
        Ok(Self { profile, d, grid })
    }

    /// Brownian motion, whose paths can be refined exactly between grid points.
    pub fn is_brownian(&self) -> bool {
        matches!(self.profile.kind(), ProfileKind::Power { alpha } if *alpha == 0.5)
    }
}

/// What the path has to come close to.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Point(Vec<f64>),
    Ball { center: Vec<f64>, radius: f64 },
    Atoms(WeightedSet),
    Product(ProductSet),
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::Point(c) | Target::Ball { center: c, .. } => c.len(),
            Target::Atoms(s) => s.dim(),
            Target::Product(p) => p.dim(),
        }
    }

    /// Euclidean distance from `y` to the target.
    pub fn distance(&self, y: &[f64]) -> f64 {
        let euclid = |c: &[f64]| c.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        match self {
            Target::Point(c) => euclid(c),
            Target::Ball { center, radius } => (euclid(center) - radius).max(0.0),
            Target::Atoms(s) => s.points().iter().map(euclid).fold(f64::INFINITY, f64::min),
            Target::Product(p) => p.distance_to(y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub r: f64,
    pub hits: u64,
    pub freq: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitReport {
    /// Frequency at the smallest proximity radius.
    pub frequency: f64,
    pub ci: (f64, f64),
    pub trials: u64,
    /// One point per proximity radius, largest radius first.
    pub series: Vec<SeriesPoint>,
    /// Slope of `ln freq` against `ln r` with its standard error, where fitted.
    pub exponent: Option<(f64, f64)>,
    /// Reference curve evaluated at each radius, where one applies.
    pub reference: Vec<f64>,
}

/// 95% Wilson score interval.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    // rounding can push the bounds past p at the extremes
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

pub(crate) fn series_from_hits(radii: &[f64], hits: &[u64], trials: u64) -> Vec<SeriesPoint> {
    radii
        .iter()
        .zip(hits)
        .map(|(&r, &h)| {
            let (lo, hi) = wilson_interval(h, trials);
            SeriesPoint { r, hits: h, freq: h as f64 / trials as f64, lo, hi }
        })
        .collect()
}

/// Slope of `ln freq` on `ln r` over the points with hits.
pub(crate) fn log_slope(series: &[SeriesPoint]) -> Option<(f64, f64)> {
    let pts: Vec<&SeriesPoint> = series.iter().filter(|p| p.hits > 0).collect();
    if pts.len() < 3 {
        return None;
    }
    let x: Vec<f64> = pts.iter().map(|p| p.r.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.freq.ln()).collect();
    ols(&x, &y).ok().map(|f| (f.slope, f.slope_stderr))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingExperiment {
    pub process: Process,
    /// Time set; atoms are snapped to the grid and must lie in `[a, b]` with `a > 0`.
    pub e: WeightedSet,
    pub target: Target,
    /// Proximity radii.
    pub radii: Vec<f64>,
    pub n_trials: u64,
    pub seed: u64,
}

/// Default hit tolerance `κ max(γ(h), leaf)`.
pub const DEFAULT_KAPPA: f64 = 3.0;

pub fn proximity_radius(profile: &VarianceProfile, grid: &SimulationGrid, leaf: f64, kappa: f64) -> Result<f64> {
    Ok(kappa * profile.gamma(grid.h().min(profile.domain_max()))?.max(leaf))
}

impl HittingExperiment {
    fn validate(&self) -> Result<Vec<usize>> {
        if self.target.dim() != self.process.d {
            return Err(Error::Argument("target and process dimensions differ".into()));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Argument("proximity radii must be positive".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::Argument("need at least one trial".into()));
        }
        if self.e.dim() != 1 {
            return Err(Error::Argument("E must be a time set".into()));
        }
        let g = &self.process.grid;
        let mut idx = Vec::with_capacity(self.e.len());
        for p in self.e.points().iter() {
            let t = p[0];
            if !(t > 0.0) {
                return Err(Error::Domain(format!("E must stay away from 0, found {t}")));
            }
            let j = ((t - g.t_start()) / g.h()).round();
            if j < 0.0 || j > g.steps() as f64 || (g.time(j as usize) - t).abs() > g.h() {
                return Err(Error::Resolution(format!("time {t} is off the simulation grid")));
            }
            idx.push(j as usize);
        }
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// Smallest distance from `X(E)` to the target for one trial, resolved to the
    /// bracket of the radius ladder it falls in.
    fn min_distance(&self, sampler: &VolterraSampler, idx: &[usize], trial: u64, path: &mut [f64]) -> f64 {
        let d = self.process.d;
        sampler.sample_path(self.seed, trial, d, path);
        let pts = |j: usize| &path[j * d..(j + 1) * d];
        if self.process.is_brownian() {
            return bridge::min_distance(self, idx, &pts, trial);
        }
        idx.iter().map(|&j| self.target.distance(pts(j))).fold(f64::INFINITY, f64::min)
    }
}

/// Frequency of `dist(X(E), F) ≤ r` for every radius, from one set of paths.
///
/// Brownian paths are refined between grid points by exact bridge sampling near
/// the target, so small radii stay resolved on a coarse grid.
pub fn hitting_probability(exp: &HittingExperiment) -> Result<HitReport> {
    let idx = exp.validate()?;
    let sampler = VolterraSampler::new(&exp.process.profile, &exp.process.grid)?;
    let mut radii = exp.radii.clone();
    radii.sort_by(|a, b| b.total_cmp(a));
    let n = exp.process.grid.n_times() * exp.process.d;
    let hits = (0..exp.n_trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; radii.len()], vec![0.0; n]),
            |(mut h, mut path), trial| {
                let m = exp.min_distance(&sampler, &idx, trial, &mut path);
                for (c, r) in h.iter_mut().zip(&radii) {
                    *c += u64::from(m <= *r);
                }
                (h, path)
            },
        )
        .map(|(h, _)| h)
        .reduce(|| vec![0u64; radii.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let series = series_from_hits(&radii, &hits, exp.n_trials);
    let last = series[series.len() - 1];
    Ok(HitReport {
        frequency: last.freq,
        ci: (last.lo, last.hi),
        trials: exp.n_trials,
        exponent: log_slope(&series),
        series,
        reference: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodimReport {
    pub hits: HitReport,
    pub slope: f64,
    pub stderr: f64,
    /// `(d - dim_δ(E)) ∨ 0` with `dim_δ(E)` box-counted on the grid.
    pub predicted: f64,
    pub dim_e: f64,
}

/// Box dimension of a time set in the canonical metric of a profile, on radii
/// between `γ(span/8)` and `γ(4h)`.
pub fn time_set_dimension(e: &WeightedSet, profile: &VarianceProfile, h: f64) -> Result<f64> {
    let pts = e.points().coords();
    let span = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max) - pts.iter().copied().fold(f64::INFINITY, f64::min);
    let top = profile.gamma((span / 8.0).min(profile.domain_max()))?;
    let bottom = profile.gamma((4.0 * h).min(profile.domain_max()))?;
    let radii = geometric_radii(bottom, top, 12)?;
    let set = e.clone().with_metric(MetricSpec::gamma_delta(profile.clone()))?;
    let n: Vec<f64> = set.covering_numbers(&radii)?.into_iter().map(|c| c as f64).collect();
    Ok(fit_counts(&radii, &n, 0.0)?.value)
}

/// Fits `P{X(E) meets B(x0, r)} ≍ r^s` over a radius ladder and compares `s` with
/// the codimension of `X(E)`.
pub fn codimension_sweep(
    process: &Process,
    e: &WeightedSet,
    x0: &[f64],
    radii: &[f64],
    n_trials: u64,
    seed: u64,
) -> Result<CodimReport> {
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 4.0 * r_max {
        return Err(Error::Argument(format!("|x0| = {norm} must be at least 4 r_max = {}", 4.0 * r_max)));
    }
    let exp = HittingExperiment {
        process: process.clone(),
        e: e.clone(),
        target: Target::Point(x0.to_vec()),
        radii: radii.to_vec(),
        n_trials,
        seed,
    };
    let hits = hitting_probability(&exp)?;
    let empty = hits.series.iter().filter(|p| p.hits == 0).count();
    let (slope, stderr) = hits.exponent.ok_or_else(|| {
        Error::Numerical(format!("{empty} of {} radii saw no hits; widen the ladder or add trials", radii.len()))
    })?;
    let dim_e = time_set_dimension(e, &process.profile, process.grid.h())?;
    let d = process.d as f64;
    Ok(CodimReport { hits, slope, stderr, predicted: (d - dim_e).clamp(0.0, d), dim_e })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    pub f1: HitReport,
    pub f2: HitReport,
    /// `min/max` of the `F₂` frequencies.
    pub f2_floor_ratio: f64,
    /// Largest ratio of successive `F₁` frequencies.
    pub f1_max_step: f64,
    pub f2_bounded: bool,
    pub f1_decreasing: bool,
}

/// Bound for `min/max` of the non-polar series and for successive ratios of the polar one.
pub const FLOOR_RATIO: f64 = 0.3;
pub const DECAY_STEP: f64 = 0.8;

/// Hit frequencies of both targets along the same radius ladder and paths.
pub fn criticality_experiment(
    process: &Process,
    e: &WeightedSet,
    pair: &UndecidablePair,
    radii: &[f64],
    n_trials: u64,
    seed: u64,
) -> Result<CriticalityReport> {
    let run = |f: &ProductSet| {
        hitting_probability(&HittingExperiment {
            process: process.clone(),
            e: e.clone(),
            target: Target::Product(f.clone()),
            radii: radii.to_vec(),
            n_trials,
            seed,
        })
    };
    let f1 = run(&pair.f1)?;
    let f2 = run(&pair.f2)?;
    let fr: Vec<f64> = f2.series.iter().map(|p| p.freq).collect();
    let max = fr.iter().copied().fold(0.0, f64::max);
    let min = fr.iter().copied().fold(f64::INFINITY, f64::min);
    let f2_floor_ratio = if max > 0.0 { min / max } else { 0.0 };
    let f1_max_step = f1
        .series
        .windows(2)
        .map(|w| if w[0].freq > 0.0 { w[1].freq / w[0].freq } else { f64::INFINITY })
        .fold(0.0, f64::max);
    Ok(CriticalityReport {
        f2_bounded: f2_floor_ratio >= FLOOR_RATIO,
        f1_decreasing: f1_max_step <= DECAY_STEP,
        f1,
        f2,
        f2_floor_ratio,
        f1_max_step,
    })
}
