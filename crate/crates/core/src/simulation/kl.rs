use std::ops::Range;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::ensemble::{simulate, Method, PathEnsemble, PathSampler, SimulationGrid};
use super::stream_rng;
use crate::error::{Error, Result};

const MAX_STEPS: usize = 4096;

/// Leading eigenpairs of the covariance operator on a grid.
#[derive(Debug, Clone)]
pub struct KlBasis {
    pub grid: SimulationGrid,
    /// Non-increasing, non-negative.
    pub eigenvalues: Vec<f64>,
    /// `n_times × k`; column `i` holds `ψ_i` on the grid.
    pub eigenvectors: DMatrix<f64>,
    pub quad_weights: Vec<f64>,
    pub k: usize,
    /// Sum of the discarded eigenvalues.
    pub spectral_tail: f64,
}

fn trapezoid(grid: &SimulationGrid) -> Vec<f64> {
    let h = grid.h();
    let n = grid.n_times();
    (0..n).map(|j| if j == 0 || j == n - 1 { 0.5 * h } else { h }).collect()
}

/// Nyström discretization with trapezoidal weights: eigenpairs of
/// `W^{1/2} Q W^{1/2}`, mapped back by `ψ = W^{-1/2} v`.
pub fn kl_decompose(cov: &DMatrix<f64>, grid: &SimulationGrid, k: usize) -> Result<KlBasis> {
    let n = grid.n_times();
    if grid.steps() > MAX_STEPS {
        return Err(Error::Resource(format!("KL grids are capped at {MAX_STEPS} steps")));
    }
    if cov.nrows() != n || cov.ncols() != n {
        return Err(Error::Argument("covariance does not match the grid".into()));
    }
    if k == 0 || k > n {
        return Err(Error::Argument(format!("k must lie in 1..={n}, got {k}")));
    }
    let w = trapezoid(grid);
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| sw[i] * cov[(i, j)] * sw[j]);
    let eig = nalgebra::SymmetricEigen::try_new(a, 1e-13, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let trace: f64 = eig.eigenvalues.iter().map(|v| v.abs()).sum();
    let most_negative = eig.eigenvalues.iter().copied().fold(0.0, f64::min);
    if most_negative < -super::covariance::PSD_TOL * trace {
        return Err(Error::NotPsd(format!("eigenvalue {most_negative:.3e} in KL decomposition")));
    }
    let eigenvalues: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let spectral_tail = order[k..].iter().map(|&i| eig.eigenvalues[i].max(0.0)).sum();
    let eigenvectors = DMatrix::from_fn(n, k, |r, c| eig.eigenvectors[(r, order[c])] / sw[r]);
    Ok(KlBasis { grid: *grid, eigenvalues, eigenvectors, quad_weights: w, k, spectral_tail })
}

impl KlBasis {
    /// `Σ_i λ_i ψ_i(s) ψ_i(t)` over the retained modes.
    pub fn reconstruct_covariance(&self) -> DMatrix<f64> {
        let l = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
        &self.eigenvectors * l * self.eigenvectors.transpose()
    }

    /// `(Σ_i λ_i (ψ_i(t) - ψ_i(s))²)^{1/2}` over the retained modes.
    pub fn delta(&self, i: usize, j: usize) -> f64 {
        (0..self.k)
            .map(|m| self.eigenvalues[m] * (self.eigenvectors[(i, m)] - self.eigenvectors[(j, m)]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation from weighted orthonormality.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.k {
            for b in 0..=a {
                let s: f64 = (0..self.grid.n_times())
                    .map(|r| self.quad_weights[r] * self.eigenvectors[(r, a)] * self.eigenvectors[(r, b)])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// The standard normal coefficients `ξ_1..ξ_k` behind one component path.
    pub fn coefficients(&self, seed: u64, stream: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, stream);
        (0..self.k).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}

/// Truncated expansion over a range of modes; all modes share one coefficient draw.
pub struct KlSampler<'a> {
    basis: &'a KlBasis,
    modes: Range<usize>,
}

impl<'a> KlSampler<'a> {
    pub fn new(basis: &'a KlBasis, modes: Range<usize>) -> Result<Self> {
        if modes.end > basis.k || modes.start > modes.end {
            return Err(Error::Argument(format!("mode range {modes:?} outside 0..{}", basis.k)));
        }
        Ok(Self { basis, modes })
    }
}

impl PathSampler for KlSampler<'_> {
    fn n_times(&self) -> usize {
        self.basis.grid.n_times()
    }

    fn sample_component(&self, seed: u64, stream: u64, out: &mut [f64]) {
        let xi = self.basis.coefficients(seed, stream);
        out.iter_mut().for_each(|v| *v = 0.0);
        for m in self.modes.clone() {
            let a = self.basis.eigenvalues[m].sqrt() * xi[m];
            for (r, v) in out.iter_mut().enumerate() {
                *v += a * self.basis.eigenvectors[(r, m)];
            }
        }
    }
}

/// Head (modes `< n_split`) and tail (the rest) driven by the same coefficients,
/// so `head + tail` is the truncated expansion.
pub fn kl_split_simulate(
    basis: &KlBasis,
    n_split: usize,
    d: usize,
    n_paths: usize,
    seed: u64,
) -> Result<(PathEnsemble, PathEnsemble)> {
    if n_split >= basis.k {
        return Err(Error::Argument(format!("n_split must be below k = {}", basis.k)));
    }
    let head = simulate(&KlSampler::new(basis, 0..n_split)?, basis.grid, d, n_paths, seed, Method::KlTruncated)?;
    let tail = simulate(&KlSampler::new(basis, n_split..basis.k)?, basis.grid, d, n_paths, seed, Method::KlTruncated)?;
    Ok((head, tail))
}
