use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profiles::{Verdict, VarianceProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationGrid {
    t_start: f64,
    t_end: f64,
    m: usize,
}

impl SimulationGrid {
    pub fn new(t_start: f64, t_end: f64, m: usize) -> Result<Self> {
        if !(t_start >= 0.0 && t_start < t_end && t_end.is_finite()) {
            return Err(Error::Argument(format!("grid needs 0 ≤ t_start < t_end, got [{t_start}, {t_end}]")));
        }
        if m < 8 {
            return Err(Error::Argument(format!("grid needs at least 8 steps, got {m}")));
        }
        Ok(Self { t_start, t_end, m })
    }

    /// Grid without the minimum-size rule, for tiny covariance problems.
    pub(crate) fn raw(t_start: f64, t_end: f64, m: usize) -> Self {
        Self { t_start, t_end, m }
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.m
    }

    pub fn n_times(&self) -> usize {
        self.m + 1
    }

    pub fn h(&self) -> f64 {
        (self.t_end - self.t_start) / self.m as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        if j == self.m {
            self.t_end
        } else {
            self.t_start + self.h() * j as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.m).map(|j| self.time(j)).collect()
    }

    pub fn check_profile(&self, profile: &VarianceProfile) -> Result<()> {
        if self.t_end - self.t_start > profile.domain_max() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "grid span {} exceeds the profile domain {}",
                self.t_end - self.t_start,
                profile.domain_max()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Volterra,
    Cholesky,
    KlTruncated,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Volterra => "volterra",
            Method::Cholesky => "cholesky",
            Method::KlTruncated => "kl_truncated",
        }
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            Method::Volterra => 0,
            Method::Cholesky => 1,
            Method::KlTruncated => 2,
        }
    }

    pub(crate) fn from_code(c: u32) -> Result<Self> {
        match c {
            0 => Ok(Method::Volterra),
            1 => Ok(Method::Cholesky),
            2 => Ok(Method::KlTruncated),
            _ => Err(Error::Parse(format!("unknown method code {c}"))),
        }
    }
}

/// Anything that can draw one scalar component path on a fixed set of times.
pub trait PathSampler: Sync {
    fn n_times(&self) -> usize;

    /// Fill `out` (length `n_times`) with the component path for `(seed, stream)`.
    fn sample_component(&self, seed: u64, stream: u64, out: &mut [f64]);

    /// Path `index` of a `d`-dimensional ensemble, time-major with `d` values per time.
    fn sample_path(&self, seed: u64, index: u64, d: usize, out: &mut [f64]) {
        let n = self.n_times();
        let mut buf = vec![0.0; n];
        for c in 0..d {
            self.sample_component(seed, index * d as u64 + c as u64, &mut buf);
            for (j, v) in buf.iter().enumerate() {
                out[j * d + c] = *v;
            }
        }
    }
}

/// `n_paths` simulated paths; `values` is path-major, then time, then component.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub grid: SimulationGrid,
    pub d: usize,
    pub n_paths: usize,
    pub values: Vec<f64>,
    pub seed: u64,
    pub method: Method,
}

impl PathEnsemble {
    pub fn new(
        grid: SimulationGrid,
        d: usize,
        n_paths: usize,
        values: Vec<f64>,
        seed: u64,
        method: Method,
    ) -> Result<Self> {
        if d == 0 || n_paths == 0 {
            return Err(Error::Argument("ensemble needs d ≥ 1 and n_paths ≥ 1".into()));
        }
        if values.len() != n_paths * grid.n_times() * d {
            return Err(Error::Argument("ensemble value count does not match its shape".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("ensemble contains non-finite values".into()));
        }
        Ok(Self { grid, d, n_paths, values, seed, method })
    }

    pub fn n_times(&self) -> usize {
        self.grid.n_times()
    }

    pub fn value(&self, path: usize, j: usize, c: usize) -> f64 {
        self.values[(path * self.n_times() + j) * self.d + c]
    }

    /// One path, `n_times * d` values.
    pub fn path(&self, path: usize) -> &[f64] {
        let w = self.n_times() * self.d;
        &self.values[path * w..(path + 1) * w]
    }

    /// Point `X(t_j)` of a path.
    pub fn point(&self, path: usize, j: usize) -> &[f64] {
        let s = (path * self.n_times() + j) * self.d;
        &self.values[s..s + self.d]
    }

    /// Restriction to grid indices `j0..=j1`.
    pub fn window(&self, j0: usize, j1: usize) -> Result<Self> {
        if !(j0 < j1 && j1 < self.n_times()) || j1 - j0 < 8 {
            return Err(Error::Argument(format!("window [{j0}, {j1}] invalid")));
        }
        let grid = SimulationGrid::new(self.grid.time(j0), self.grid.time(j1), j1 - j0)?;
        let mut values = Vec::with_capacity(self.n_paths * grid.n_times() * self.d);
        for p in 0..self.n_paths {
            values.extend_from_slice(&self.path(p)[j0 * self.d..(j1 + 1) * self.d]);
        }
        Self::new(grid, self.d, self.n_paths, values, self.seed, self.method)
    }

    /// Sample mean and standard error of each `(time, component)` entry.
    pub fn mean_and_se(&self) -> Vec<(f64, f64)> {
        let w = self.n_times() * self.d;
        let n = self.n_paths as f64;
        (0..w)
            .map(|k| {
                let mean = (0..self.n_paths).map(|p| self.values[p * w + k]).sum::<f64>() / n;
                let var = (0..self.n_paths)
                    .map(|p| (self.values[p * w + k] - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0).max(1.0);
                (mean, (var / n).sqrt())
            })
            .collect()
    }

    /// Empirical variance of `X_c(t_j)` about zero, pooled over components.
    pub fn variance_at(&self, j: usize) -> f64 {
        let mut s = 0.0;
        for p in 0..self.n_paths {
            s += self.point(p, j).iter().map(|v| v * v).sum::<f64>();
        }
        s / (self.n_paths * self.d) as f64
    }
}

/// Draw an ensemble from a sampler. Paths are generated in parallel and
/// the result is bit-identical for any number of workers.
pub fn simulate<S: PathSampler + ?Sized>(
    sampler: &S,
    grid: SimulationGrid,
    d: usize,
    n_paths: usize,
    seed: u64,
    method: Method,
) -> Result<PathEnsemble> {
    if sampler.n_times() != grid.n_times() {
        return Err(Error::Argument("sampler and grid sizes differ".into()));
    }
    if d == 0 || n_paths == 0 {
        return Err(Error::Argument("ensemble needs d ≥ 1 and n_paths ≥ 1".into()));
    }
    let w = grid.n_times() * d;
    let bytes = n_paths as u128 * w as u128 * 8;
    if bytes > 4 << 30 {
        return Err(Error::Resource(format!("ensemble would need {bytes} bytes")));
    }
    let mut values = vec![0.0; n_paths * w];
    values
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(p, out)| sampler.sample_path(seed, p as u64, d, out));
    PathEnsemble::new(grid, d, n_paths, values, seed, method)
}

/// Pooled sample standard deviation of `X(t_i) - X(t_j)` over all grid pairs.
pub fn empirical_delta(ens: &PathEnsemble) -> Result<DMatrix<f64>> {
    let idx: Vec<usize> = (0..ens.n_times()).collect();
    empirical_delta_on(ens, &idx)
}

/// As [`empirical_delta`] restricted to the given grid indices.
pub fn empirical_delta_on(ens: &PathEnsemble, idx: &[usize]) -> Result<DMatrix<f64>> {
    if ens.n_paths < 100 {
        return Err(Error::Argument("empirical δ needs at least 100 paths".into()));
    }
    if idx.iter().any(|&j| j >= ens.n_times()) {
        return Err(Error::Argument("grid index out of range".into()));
    }
    let (n, d) = (ens.n_paths, ens.d);
    let k = idx.len();
    // centred data, one column per sample (path, component)
    let mut x = DMatrix::<f64>::zeros(k, n * d);
    for (r, &j) in idx.iter().enumerate() {
        for c in 0..d {
            let mean = (0..n).map(|p| ens.value(p, j, c)).sum::<f64>() / n as f64;
            for p in 0..n {
                x[(r, p * d + c)] = ens.value(p, j, c) - mean;
            }
        }
    }
    let cov = (&x * x.transpose()) / (d as f64 * (n as f64 - 1.0));
    Ok(DMatrix::from_fn(k, k, |a, b| {
        if a == b {
            0.0
        } else {
            (cov[(a, a)] + cov[(b, b)] - 2.0 * cov[(a, b)]).max(0.0).sqrt()
        }
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commensurability {
    pub l_hat: f64,
    pub verdict: Verdict,
    /// Relative slack allowed for Monte Carlo error.
    pub tol: f64,
}

/// Largest squared ratio between `δ̂` and `γ(|Δt|)` over grid pairs.
///
/// `tol = None` uses roughly six standard errors of a squared ratio.
pub fn verify_commensurability(
    ens: &PathEnsemble,
    profile: &VarianceProfile,
    tol: Option<f64>,
) -> Result<Commensurability> {
    let n_idx = ens.n_times().min(257);
    let idx: Vec<usize> = (0..n_idx)
        .map(|i| i * (ens.n_times() - 1) / (n_idx - 1))
        .collect();
    let delta = empirical_delta_on(ens, &idx)?;
    let mut l_hat = 0.0f64;
    for a in 0..n_idx {
        for b in a + 1..n_idx {
            let dt = (ens.grid.time(idx[b]) - ens.grid.time(idx[a])).abs();
            let g = profile.gamma(dt)?;
            let dh = delta[(a, b)];
            let r = if dh > 0.0 { (dh / g).max(g / dh) } else { f64::INFINITY };
            l_hat = l_hat.max(r * r);
        }
    }
    let tol = tol.unwrap_or(8.0 / ((ens.n_paths * ens.d) as f64).sqrt());
    let verdict = if l_hat <= profile.l_factor() * (1.0 + tol) {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(Commensurability { l_hat, verdict, tol })
}
