use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::ensemble::{simulate, Method, PathEnsemble, PathSampler, SimulationGrid};
use super::stream_rng;
use crate::error::{Error, Result};
use crate::profiles::VarianceProfile;

const DIRECT_MAX: usize = 64;

/// Discrete Volterra process `B(t_j) = Σ_{k=1}^{j} c_k Z_{j-k}` with
/// `c_k² = γ²(kh) - γ²((k-1)h)`, the exact kernel mass of each cell.
pub struct VolterraSampler {
    weights: Vec<f64>,
    kind: Conv,
}

enum Conv {
    /// All weights equal: a scaled random walk.
    Cumsum,
    Direct,
    Fft {
        n: usize,
        kernel_hat: Vec<Complex64>,
        fwd: Arc<dyn Fft<f64>>,
        inv: Arc<dyn Fft<f64>>,
    },
}

impl VolterraSampler {
    pub fn new(profile: &VarianceProfile, grid: &SimulationGrid) -> Result<Self> {
        if grid.t_start() != 0.0 {
            return Err(Error::Argument("Volterra simulation starts at t = 0".into()));
        }
        grid.check_profile(profile)?;
        let m = grid.steps();
        let h = grid.h();
        let g2 = |k: usize| {
            let t = if k == m { grid.t_end() } else { h * k as f64 };
            profile.gamma_unchecked(t.min(profile.domain_max())).powi(2)
        };
        let mut weights = Vec::with_capacity(m);
        let mut prev = 0.0;
        for k in 1..=m {
            let cur = g2(k);
            weights.push((cur - prev).max(0.0).sqrt());
            prev = cur;
        }
        Ok(Self::from_weights(weights))
    }

    pub(crate) fn from_weights(weights: Vec<f64>) -> Self {
        let m = weights.len();
        let c1 = weights[0];
        let kind = if weights.iter().all(|w| (w - c1).abs() <= 1e-10 * c1.abs()) {
            Conv::Cumsum
        } else if m <= DIRECT_MAX {
            Conv::Direct
        } else {
            let n = (2 * m).next_power_of_two();
            let mut planner = FftPlanner::new();
            let fwd = planner.plan_fft_forward(n);
            let inv = planner.plan_fft_inverse(n);
            let mut kernel_hat = vec![Complex64::new(0.0, 0.0); n];
            for (k, w) in weights.iter().enumerate() {
                kernel_hat[k] = Complex64::new(*w / n as f64, 0.0);
            }
            fwd.process(&mut kernel_hat);
            Conv::Fft { n, kernel_hat, fwd, inv }
        };
        Self { weights, kind }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Covariance of the discrete scheme on the grid, exact for the sampler.
    pub fn covariance(&self) -> DMatrix<f64> {
        let m = self.weights.len();
        let c = &self.weights;
        let mut q = DMatrix::zeros(m + 1, m + 1);
        for j in 1..=m {
            for k in j..=m {
                // Σ_{i<j} c_{j-i} c_{k-i}
                let s: f64 = (0..j).map(|i| c[j - i - 1] * c[k - i - 1]).sum();
                q[(j, k)] = s;
                q[(k, j)] = s;
            }
        }
        q
    }
}

impl PathSampler for VolterraSampler {
    fn n_times(&self) -> usize {
        self.weights.len() + 1
    }

    fn sample_component(&self, seed: u64, stream: u64, out: &mut [f64]) {
        let m = self.weights.len();
        let mut rng = stream_rng(seed, stream);
        out[0] = 0.0;
        match &self.kind {
            Conv::Cumsum => {
                let c = self.weights[0];
                let mut acc = 0.0;
                for v in out[1..=m].iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    acc += c * z;
                    *v = acc;
                }
            }
            Conv::Direct => {
                let z: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
                for j in 1..=m {
                    out[j] = (1..=j).map(|k| self.weights[k - 1] * z[j - k]).sum();
                }
            }
            Conv::Fft { n, kernel_hat, fwd, inv } => {
                let mut buf = vec![Complex64::new(0.0, 0.0); *n];
                for b in buf.iter_mut().take(m) {
                    b.re = StandardNormal.sample(&mut rng);
                }
                fwd.process(&mut buf);
                for (b, k) in buf.iter_mut().zip(kernel_hat) {
                    *b *= k;
                }
                inv.process(&mut buf);
                // (c * Z)[j-1] with c indexed from 0
                for j in 1..=m {
                    out[j] = buf[j - 1].re;
                }
            }
        }
    }
}

pub fn volterra_simulate(
    profile: &VarianceProfile,
    grid: SimulationGrid,
    d: usize,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    let s = VolterraSampler::new(profile, &grid)?;
    simulate(&s, grid, d, n_paths, seed, Method::Volterra)
}

/// Grid covariance of the Volterra process, summed over kernel cells.
pub fn volterra_covariance(profile: &VarianceProfile, grid: &SimulationGrid) -> Result<DMatrix<f64>> {
    Ok(VolterraSampler::new(profile, grid)?.covariance())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_matches_profile_exactly() {
        let p = VarianceProfile::logbm(1.0).unwrap();
        let g = SimulationGrid::new(0.0, 0.5, 200).unwrap();
        let q = volterra_covariance(&p, &g).unwrap();
        for j in 0..=200 {
            let t = g.time(j);
            assert!((q[(j, j)] - p.gamma_unchecked(t).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct() {
        let p = VarianceProfile::power(0.3).unwrap();
        let g = SimulationGrid::new(0.0, 1.0, 300).unwrap();
        let s = VolterraSampler::new(&p, &g).unwrap();
        assert!(matches!(s.kind, Conv::Fft { .. }));
        let mut fast = vec![0.0; 301];
        s.sample_component(7, 3, &mut fast);
        let mut rng = stream_rng(7, 3);
        let z: Vec<f64> = (0..300).map(|_| StandardNormal.sample(&mut rng)).collect();
        for j in 1..=300 {
            let direct: f64 = (1..=j).map(|k| s.weights[k - 1] * z[j - k]).sum();
            assert!((fast[j] - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn brownian_uses_cumsum() {
        let p = VarianceProfile::power(0.5).unwrap();
        let g = SimulationGrid::new(0.0, 1.0, 64).unwrap();
        let s = VolterraSampler::new(&p, &g).unwrap();
        assert!(matches!(s.kind, Conv::Cumsum));
        let q = s.covariance();
        assert!((q[(10, 40)] - g.time(10)).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_domain() {
        let p = VarianceProfile::logbm(1.0).unwrap();
        let g = SimulationGrid::new(0.0, 1.0, 16).unwrap();
        assert!(matches!(VolterraSampler::new(&p, &g), Err(Error::Domain(_))));
        let g = SimulationGrid::new(0.1, 0.4, 16).unwrap();
        assert!(VolterraSampler::new(&p, &g).is_err());
    }
}
