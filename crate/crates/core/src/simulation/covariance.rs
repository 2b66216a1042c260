use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::ensemble::{simulate, Method, PathEnsemble, PathSampler, SimulationGrid};
use super::stream_rng;
use crate::error::{Error, Result};

/// Eigenvalues down to `-PSD_TOL * trace` are treated as rounding and clamped to zero.
pub const PSD_TOL: f64 = 1e-8;

/// A factor `F` with `F Fᵀ = Q`, by Cholesky when possible and otherwise by
/// the symmetric square root with clamped eigenvalues.
#[derive(Debug, Clone)]
pub struct CovarianceFactor {
    factor: DMatrix<f64>,
    /// Smallest eigenvalue seen before clamping (0 when Cholesky succeeded).
    pub min_eigenvalue: f64,
}

impl CovarianceFactor {
    pub fn new(cov: &DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        if n == 0 || cov.ncols() != n {
            return Err(Error::Argument("covariance must be a non-empty square matrix".into()));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("covariance has non-finite entries".into()));
        }
        let asym = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| (cov[(i, j)] - cov[(j, i)]).abs())
            .fold(0.0, f64::max);
        let scale = cov.diagonal().iter().map(|v| v.abs()).fold(0.0, f64::max);
        if asym > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Argument("covariance is not symmetric".into()));
        }
        if let Some(ch) = nalgebra::Cholesky::new(cov.clone()) {
            return Ok(Self { factor: ch.l(), min_eigenvalue: 0.0 });
        }
        let eig = nalgebra::SymmetricEigen::new(cov.clone());
        let trace = cov.trace().max(0.0);
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL * trace || trace == 0.0 && min < 0.0 {
            return Err(Error::NotPsd(format!(
                "smallest eigenvalue {min:.3e} below tolerance for trace {trace:.3e}"
            )));
        }
        let sq = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let factor = &eig.eigenvectors * DMatrix::from_diagonal(&sq);
        Ok(Self { factor, min_eigenvalue: min })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// `F z` for a standard normal vector `z`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let zv = DVector::from_column_slice(z);
        let y = &self.factor * zv;
        out[..n].copy_from_slice(y.as_slice());
    }
}

impl PathSampler for CovarianceFactor {
    fn n_times(&self) -> usize {
        self.dim()
    }

    fn sample_component(&self, seed: u64, stream: u64, out: &mut [f64]) {
        let mut rng = stream_rng(seed, stream);
        let z: Vec<f64> = (0..self.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        self.apply(&z, out);
    }
}

pub fn cholesky_simulate(
    cov: &DMatrix<f64>,
    grid: SimulationGrid,
    d: usize,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    if cov.nrows() != grid.n_times() {
        return Err(Error::Argument(format!(
            "covariance is {}x{} but the grid has {} times",
            cov.nrows(),
            cov.ncols(),
            grid.n_times()
        )));
    }
    let f = CovarianceFactor::new(cov)?;
    simulate(&f, grid, d, n_paths, seed, Method::Cholesky)
}

/// Covariance matrix `Q(t_i, t_j)` on a set of times.
pub fn covariance_from_fn(times: &[f64], q: impl Fn(f64, f64) -> f64) -> DMatrix<f64> {
    let n = times.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = q(times[i], times[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `Var(X(t_i) | X(t_j)) = Q_ii - Q_ij² / Q_jj`.
pub fn conditional_variance(cov: &DMatrix<f64>, i: usize, j: usize) -> Result<f64> {
    let n = cov.nrows();
    if i >= n || j >= n {
        return Err(Error::Argument(format!("indices ({i}, {j}) out of range for size {n}")));
    }
    if i == j {
        return Ok(0.0);
    }
    let qjj = cov[(j, j)];
    if !(qjj > 0.0) {
        return Err(Error::Degenerate(format!("zero variance at conditioning index {j}")));
    }
    Ok((cov[(i, i)] - cov[(i, j)].powi(2) / qjj).max(0.0))
}
