use rayon::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{log_slope, series_from_hits, HitReport};
use crate::error::{Error, Result};
use crate::profiles::VarianceProfile;
use crate::simulation::{stream_rng, IncrementModel, IncrementWindow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallBallOptions {
    /// Neighbouring window points are at most `r / kappa` apart in `δ`.
    pub kappa: f64,
    pub min_steps: usize,
    pub max_steps: usize,
}

impl Default for SmallBallOptions {
    fn default() -> Self {
        Self { kappa: 4.0, min_steps: 64, max_steps: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallBallReport {
    pub hits: HitReport,
    /// Window steps used at each radius.
    pub steps: Vec<usize>,
    /// Whether every window met the `r / kappa` spacing within `max_steps`.
    pub resolved: bool,
}

/// Frequency of `inf_{s ∈ B_δ(t,r)} |X(s) - z| ≤ r` for each radius.
///
/// The window `|s - t| ≤ γ⁻¹(r)` is sampled as a stationary-increment process
/// around an independent `X(t) ~ N(0, γ²(t))`; the coupling between the two is of
/// relative order `r/γ(t)` and is neglected.
pub fn small_ball_probability(
    profile: &VarianceProfile,
    t: f64,
    z: &[f64],
    radii: &[f64],
    n_trials: u64,
    seed: u64,
    opts: SmallBallOptions,
) -> Result<SmallBallReport> {
    let d = z.len();
    if d == 0 || n_trials == 0 || radii.is_empty() {
        return Err(Error::Argument("need a target point, radii and trials".into()));
    }
    if opts.max_steps < 8 {
        return Err(Error::Resolution("windows need at least 8 points".into()));
    }
    let sigma = profile.gamma(t)?;
    let model = IncrementModel::new(profile, 0.0)?;
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut hits = Vec::with_capacity(radii.len());
    let mut steps = Vec::with_capacity(radii.len());
    let mut resolved = true;
    for (ri, &r) in radii.iter().enumerate() {
        let lw = profile.inverse_log_scale(r)?;
        if (-lw).exp() >= t {
            return Err(Error::Domain(format!("δ-ball of radius {r} reaches time 0")));
        }
        // smallest power-of-two step count meeting the spacing target
        let target = r.ln() - opts.kappa.ln();
        let mut k = opts.min_steps.next_power_of_two();
        while profile.log_gamma(lw - std::f64::consts::LN_2 + (k as f64).ln()) > target {
            if k >= opts.max_steps {
                resolved = false;
                break;
            }
            k *= 2;
        }
        steps.push(k);
        let window = IncrementWindow::new(&model, -lw + std::f64::consts::LN_2 - (k as f64).ln(), k)?;
        let centre = k / 2;
        let count = (0..n_trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = stream_rng(seed, ((ri as u64) << 40) + trial);
                let mut paths = vec![vec![0.0; k + 1]; d];
                let mut base = vec![0.0; d];
                for c in 0..d {
                    base[c] = sigma * rng.sample::<f64, _>(StandardNormal) - z[c];
                    window.sample(&mut rng, &mut paths[c]);
                }
                let close = (0..=k).any(|j| {
                    let s: f64 = (0..d).map(|c| (base[c] + paths[c][j] - paths[c][centre]).powi(2)).sum();
                    s <= r * r
                });
                u64::from(close)
            })
            .sum::<u64>();
        hits.push(count);
    }
    let series = series_from_hits(&radii, &hits, n_trials);
    let f = |r: f64| profile.f_gamma(r).map(|v| (r + v).powi(d as i32)).unwrap_or(f64::NAN);
    let c2 = series[0].freq / f(radii[0]);
    let reference = radii.iter().map(|&r| c2 * f(r)).collect();
    let last = series[series.len() - 1];
    Ok(SmallBallReport {
        hits: HitReport {
            frequency: last.freq,
            ci: (last.lo, last.hi),
            trials: n_trials,
            exponent: log_slope(&series),
            series,
            reference,
        },
        steps,
        resolved,
    })
}
