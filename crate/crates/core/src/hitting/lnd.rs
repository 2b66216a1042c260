use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::profiles::{VarianceProfile, Verdict};
use crate::simulation::{conditional_variance, volterra_covariance, SimulationGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct LndReport {
    /// `min Var(X(t)|X(s)) / δ²(s,t)` over near-diagonal pairs.
    pub min_ratio: f64,
    pub argmin: (f64, f64),
    pub pairs: usize,
    pub verdict: Verdict,
}

/// Ratios below this count as a failure of local non-determinism.
pub const LND_THRESHOLD: f64 = 1e-3;

/// Two-point local non-determinism on `[a, b]` for pairs closer than `band`.
pub fn lnd_verify(cov: &DMatrix<f64>, times: &[f64], a: f64, b: f64, band: f64) -> Result<LndReport> {
    if cov.nrows() != times.len() || cov.ncols() != times.len() {
        return Err(Error::Argument("covariance and times differ in size".into()));
    }
    if !(a > 0.0 && a < b && band > 0.0) {
        return Err(Error::Argument("need 0 < a < b and a positive band".into()));
    }
    let inside: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= a && times[i] <= b).collect();
    let mut best = (f64::INFINITY, (f64::NAN, f64::NAN));
    let mut pairs = 0;
    for (k, &i) in inside.iter().enumerate() {
        for &j in inside[k + 1..].iter().take_while(|&&j| times[j] - times[i] <= band) {
            let d2 = cov[(i, i)] + cov[(j, j)] - 2.0 * cov[(i, j)];
            if !(d2 > 0.0) {
                continue;
            }
            let ratio = conditional_variance(cov, j, i)? / d2;
            pairs += 1;
            if ratio < best.0 {
                best = (ratio, (times[i], times[j]));
            }
        }
    }
    if pairs == 0 {
        return Err(Error::Resolution("no grid pairs inside the band".into()));
    }
    Ok(LndReport {
        min_ratio: best.0,
        argmin: best.1,
        pairs,
        verdict: if best.0 >= LND_THRESHOLD { Verdict::Holds } else { Verdict::Fails },
    })
}

/// [`lnd_verify`] on the Volterra covariance of a profile.
pub fn lnd_verify_profile(profile: &VarianceProfile, grid: &SimulationGrid, a: f64, b: f64, band: f64) -> Result<LndReport> {
    lnd_verify(&volterra_covariance(profile, grid)?, &grid.times(), a, b, band)
}
