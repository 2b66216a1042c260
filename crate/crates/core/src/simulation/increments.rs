use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profiles::{ProfileKind, VarianceProfile};
use crate::sets::WeightedSet;

/// Process with stationary increments, `X(origin) = 0` and variogram
/// `E(X(t) - X(s))² = v(|t - s|)` with `v = γ²` below the cap.
///
/// Past the largest `x` on which `γ²` is concave, `v` is held constant, so
/// `v(x*) - v` is convex, decreasing and vanishes at infinity, hence a valid
/// stationary covariance. Power profiles need no cap.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementModel {
    profile: VarianceProfile,
    origin: f64,
    cap: f64,
}

impl IncrementModel {
    pub fn new(profile: &VarianceProfile, origin: f64) -> Result<Self> {
        let cap = match profile.kind() {
            ProfileKind::Power { alpha } if *alpha <= 1.0 => f64::INFINITY,
            ProfileKind::Power { .. } => return Err(Error::Domain("power variograms need alpha ≤ 1".into())),
            _ => concavity_cap(profile)?,
        };
        Ok(Self { profile: profile.clone(), origin, cap })
    }

    /// Separation beyond which the variogram is flat.
    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// `v(e^{log_sep})`.
    pub fn variogram_log(&self, log_sep: f64) -> f64 {
        if log_sep == f64::NEG_INFINITY {
            return 0.0;
        }
        let l = (-log_sep).max(-self.cap.min(self.profile.domain_max()).ln());
        if let ProfileKind::Power { alpha } = self.profile.kind() {
            // power laws extend past the domain without a cap
            return (2.0 * alpha * log_sep).exp();
        }
        (2.0 * self.profile.log_gamma(l)).exp()
    }

    /// Covariance of `X` at the atoms of a set on the line, all right of the origin.
    pub fn covariance_on(&self, set: &WeightedSet) -> Result<DMatrix<f64>> {
        if set.dim() != 1 {
            return Err(Error::Argument("the index set must lie on the line".into()));
        }
        let n = set.len();
        let base: Vec<f64> = (0..n)
            .map(|i| {
                let t = set.point(i)[0] - self.origin;
                if t < 0.0 {
                    return Err(Error::Domain(format!("time {} lies left of the origin", set.point(i)[0])));
                }
                Ok(self.variogram_log(t.ln()))
            })
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                base[i]
            } else {
                0.5 * (base[i] + base[j] - self.variogram_log(set.log_separation(i, j)))
            }
        }))
    }
}

/// Exact sampler for `X(s_0 + jδ) - X(s_0)`, `j = 0..=k`, by circulant embedding of
/// the stationary increment sequence. Works far below `f64` time resolution since
/// only `ln δ` enters.
pub struct IncrementWindow {
    k: usize,
    sqrt_eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    /// Most negative embedding eigenvalue relative to the largest, clamped to zero.
    pub clamped: f64,
}

impl IncrementWindow {
    pub fn new(model: &IncrementModel, log_step: f64, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Argument("a window needs at least two steps".into()));
        }
        let v = |m: usize| if m == 0 { 0.0 } else { model.variogram_log(log_step + (m as f64).ln()) };
        let rho: Vec<f64> = (0..k).map(|m| 0.5 * (v(m + 1) + v(m.abs_diff(1)) - 2.0 * v(m))).collect();
        let n = 2 * k;
        let mut c: Vec<Complex64> = (0..n)
            .map(|i| {
                let m = if i <= k { i } else { n - i };
                Complex64::new(if m < k { rho[m] } else { 0.0 }, 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        fft.process(&mut c);
        let top = c.iter().map(|z| z.re).fold(0.0, f64::max);
        let low = c.iter().map(|z| z.re).fold(0.0, f64::min);
        if !(top > 0.0) {
            return Err(Error::Degenerate("increment spectrum vanishes".into()));
        }
        if low < -1e-6 * top {
            return Err(Error::NotPsd(format!("circulant embedding eigenvalue {low:.3e} (max {top:.3e})")));
        }
        let sqrt_eig = c.iter().map(|z| (z.re.max(0.0) / n as f64).sqrt()).collect();
        Ok(Self { k, sqrt_eig, fft, clamped: -low / top })
    }

    pub fn steps(&self) -> usize {
        self.k
    }

    /// Fills `out` (length `k + 1`) with the window path, `out[0] = 0`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let mut buf: Vec<Complex64> = self
            .sqrt_eig
            .iter()
            .map(|s| Complex64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        self.fft.process(&mut buf);
        out[0] = 0.0;
        for j in 0..self.k {
            out[j + 1] = out[j] + buf[j].re;
        }
    }
}

/// Largest `x ≤ domain_max` with `γ²` concave on `(0, x]`.
fn concavity_cap(profile: &VarianceProfile) -> Result<f64> {
    let top = profile.domain_max();
    if profile.gamma_squared_concave_up_to(top) {
        return Ok(top);
    }
    let (mut lo, mut hi) = (top.ln() - 60.0, top.ln());
    if !profile.gamma_squared_concave_up_to(lo.exp()) {
        return Err(Error::Domain("γ² is not concave near 0".into()));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if profile.gamma_squared_concave_up_to(mid.exp()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // step back past the probe spacing so the kink stays inside the concave range
    Ok((lo - 0.25).exp())
}
