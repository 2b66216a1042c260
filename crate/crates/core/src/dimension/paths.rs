use rayon::prelude::*;

use super::{fit_counts, DimensionEstimate};
use crate::error::{Error, Result};
use crate::metric::{self, MetricSpec, Points};
use crate::profiles::VarianceProfile;
use crate::sets::WeightedSet;
use crate::simulation::{PathEnsemble, PathSampler};

/// Fewest distinct times for a path-based estimate.
const MIN_TIMES: usize = 32;

/// Step between successive radii of an automatic ladder.
const RATIO: f64 = 1.189_207_115_002_721; // 2^{1/4}

/// Grid indices nearest to the atoms of a time set; errors when an atom sits
/// more than one mesh away from the grid.
fn snap(ens: &PathEnsemble, e: &WeightedSet) -> Result<Vec<usize>> {
    if e.dim() != 1 {
        return Err(Error::Argument("the time set must be one-dimensional".into()));
    }
    let g = &ens.grid;
    let h = g.h();
    let mut idx = Vec::with_capacity(e.len());
    for p in e.points().iter() {
        let j = ((p[0] - g.t_start()) / h).round().clamp(0.0, g.steps() as f64) as usize;
        let gap = (p[0] - g.time(j)).abs();
        if gap > h {
            return Err(Error::Resolution(format!("time {} lies {gap:.3e} from the grid (mesh {h:.3e})", p[0])));
        }
        idx.push(j);
    }
    idx.sort_unstable();
    idx.dedup();
    if idx.len() > 1 && idx.len() < MIN_TIMES {
        return Err(Error::Argument(format!("time set resolves to {} grid points, need {MIN_TIMES}", idx.len())));
    }
    Ok(idx)
}

/// Cover counts from a quarter of the diameter down to where `N` reaches a tenth of the points.
fn auto_fit(points: &Points, metric: &MetricSpec, diam: f64) -> Result<DimensionEstimate> {
    let cap = points.len() as f64 / 10.0;
    let (mut radii, mut counts) = (Vec::new(), Vec::new());
    let mut r = diam / 4.0;
    while r > diam * 1e-9 {
        let n = metric::covering_number(points, metric, r)? as f64;
        if n > cap {
            break;
        }
        radii.push(r);
        counts.push(n);
        r /= RATIO;
    }
    if radii.len() < 4 {
        return Err(Error::Resolution(format!("{} points are too few for a box-count fit", points.len())));
    }
    fit_counts(&radii, &counts, 0.0)
}

fn zero_estimate() -> DimensionEstimate {
    DimensionEstimate {
        value: 0.0,
        stderr: 0.0,
        method: super::DimMethod::BoxCount,
        fit_window: (0.0, 0.0),
        counts: Vec::new(),
        per_path: Vec::new(),
        unbounded: false,
        inconclusive: false,
    }
}

fn combine(mut per: Vec<DimensionEstimate>) -> DimensionEstimate {
    let values: Vec<f64> = per.iter().map(|e| e.value).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut out = per.swap_remove(0);
    if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        out.stderr = (var / n).sqrt();
    }
    out.value = mean;
    out.per_path = values;
    out
}

fn coordinate_range(points: &Points, k: usize) -> f64 {
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
    hi - lo
}

/// Box dimension of `X(E)` per path, averaged; `stderr` is the standard error of the mean.
pub fn image_dimension(ens: &PathEnsemble, e: &WeightedSet) -> Result<DimensionEstimate> {
    let idx = snap(ens, e)?;
    if idx.len() == 1 {
        return Ok(zero_estimate());
    }
    let per = (0..ens.n_paths)
        .into_par_iter()
        .map(|p| {
            let coords: Vec<f64> = idx.iter().flat_map(|&j| ens.point(p, j).iter().copied()).collect();
            let pts = Points::new(ens.d, coords)?;
            let diam = (0..ens.d).map(|k| coordinate_range(&pts, k)).fold(0.0, f64::max);
            if diam == 0.0 {
                return Ok(zero_estimate());
            }
            auto_fit(&pts, &MetricSpec::Euclidean, diam)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(per))
}

/// Box dimension of the image of every path a sampler produces over its own index set,
/// e.g. a covariance factor on the atoms of a Cantor set.
pub fn image_dimension_sampled<S: PathSampler + ?Sized>(sampler: &S, d: usize, n_paths: usize, seed: u64) -> Result<DimensionEstimate> {
    let n = sampler.n_times();
    if n == 1 {
        return Ok(zero_estimate());
    }
    if n < MIN_TIMES || d == 0 || n_paths == 0 {
        return Err(Error::Argument(format!("need {MIN_TIMES} indices, d ≥ 1 and one path; got {n}, {d}, {n_paths}")));
    }
    let per = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut out = vec![0.0; n * d];
            sampler.sample_path(seed, p as u64, d, &mut out);
            let pts = Points::new(d, out)?;
            let diam = (0..d).map(|k| coordinate_range(&pts, k)).fold(0.0, f64::max);
            if diam == 0.0 {
                return Ok(zero_estimate());
            }
            auto_fit(&pts, &MetricSpec::Euclidean, diam)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(per))
}

/// Box dimension of the graph `{(t, X(t)) : t ∈ E}` under `max(δ, euclid)`.
pub fn graph_dimension(ens: &PathEnsemble, e: &WeightedSet, profile: &VarianceProfile) -> Result<DimensionEstimate> {
    graph_dimension_with_drift(ens, e, profile, &|_| 0.0)
}

/// As [`graph_dimension`] for `X + g`, with the drift added to every component.
pub fn graph_dimension_with_drift(
    ens: &PathEnsemble,
    e: &WeightedSet,
    profile: &VarianceProfile,
    drift: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<DimensionEstimate> {
    let idx = snap(ens, e)?;
    if idx.len() == 1 {
        return Ok(zero_estimate());
    }
    let metric = MetricSpec::product(MetricSpec::gamma_delta(profile.clone()), ens.d)?;
    let g = &ens.grid;
    let time_diam = metric.time_distance(g.time(idx[idx.len() - 1]) - g.time(idx[0]));
    let per = (0..ens.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut coords = Vec::with_capacity(idx.len() * (ens.d + 1));
            for &j in &idx {
                let t = g.time(j);
                coords.push(t);
                coords.extend(ens.point(p, j).iter().map(|x| x + drift(t)));
            }
            let pts = Points::new(ens.d + 1, coords)?;
            let diam = (1..=ens.d).map(|k| coordinate_range(&pts, k)).fold(time_diam, f64::max);
            auto_fit(&pts, &metric, diam)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(per))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductDimensionReport {
    pub dim_product: DimensionEstimate,
    pub dim_e: DimensionEstimate,
    pub dim_f: DimensionEstimate,
    /// `dim(E×F) - dim(E) - dim(F)`
    pub discrepancy: f64,
}

/// Compares the box dimension of `E × F` under `max(δ, euclid)` with the sum of
/// the factor dimensions; `E` keeps its own time metric.
pub fn product_dimension_check(e: &WeightedSet, f: &WeightedSet, radii: &[f64]) -> Result<ProductDimensionReport> {
    if e.dim() != 1 {
        return Err(Error::Argument("E must be a time set".into()));
    }
    let metric = MetricSpec::product(e.metric().clone(), f.dim())?;
    let f = f.clone().with_metric(MetricSpec::Euclidean)?;
    let n = e.len().checked_mul(f.len()).filter(|&n| n <= 2_000_000);
    let n = n.ok_or_else(|| Error::Resource("product point cloud too large".into()))?;
    let mut coords = Vec::with_capacity(n * (f.dim() + 1));
    for t in e.points().iter() {
        for y in f.points().iter() {
            coords.push(t[0]);
            coords.extend_from_slice(y);
        }
    }
    let prod = Points::new(f.dim() + 1, coords)?;
    let counts = |v: Vec<usize>| v.into_iter().map(|c| c as f64).collect::<Vec<_>>();
    let dim_product = fit_counts(radii, &counts(metric::covering_numbers(&prod, &metric, radii)?), 0.0)?;
    let dim_e = fit_counts(radii, &counts(e.covering_numbers(radii)?), 0.0)?;
    let dim_f = fit_counts(radii, &counts(f.covering_numbers(radii)?), 0.0)?;
    let discrepancy = dim_product.value - dim_e.value - dim_f.value;
    Ok(ProductDimensionReport { dim_product, dim_e, dim_f, discrepancy })
}
