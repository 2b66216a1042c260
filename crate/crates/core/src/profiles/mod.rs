//! Standard-deviation functions γ and their analysis.
//!
//! Profiles are evaluated in log-scale coordinates `L = ln(1/x)` so that
//! very deep scales (far below `f64` underflow of `x`) stay representable.

mod chaining;
mod conditions;
mod record;

pub use chaining::ModulusLog;
pub use conditions::{ConditionId, ConditionParams, ConditionReport, EllKind, IndexEstimate, Verdict};

use crate::error::{Error, Result};

/// Monotone table of `(x, γ(x))` pairs, interpolated linearly in log-log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedGamma {
    points: Vec<(f64, f64)>,
    log_x: Vec<f64>,
    log_g: Vec<f64>,
}

impl TabulatedGamma {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument("tabulated profile needs at least two points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::Argument(
                    "tabulated profile must be strictly increasing in x and γ".into(),
                ));
            }
        }
        if points[0].0 <= 0.0 || points[0].1 <= 0.0 {
            return Err(Error::Argument("tabulated points must be positive".into()));
        }
        Ok(Self {
            points: points.to_vec(),
            log_x: points.iter().map(|p| p.0.ln()).collect(),
            log_g: points.iter().map(|p| p.1.ln()).collect(),
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn x_min(&self) -> f64 {
        self.points[0].0
    }

    pub fn x_max(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Log-γ at `ln x = lx`; the end segments are extended as power laws.
    fn log_gamma_lnx(&self, lx: f64) -> f64 {
        let n = self.log_x.len();
        let seg = match self.log_x.partition_point(|&v| v <= lx) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.log_x[seg], self.log_x[seg + 1]);
        let (g0, g1) = (self.log_g[seg], self.log_g[seg + 1]);
        g0 + (g1 - g0) * (lx - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// γ(x) = x^α
    Power { alpha: f64 },
    /// γ(x) = log^{-β}(1/x)
    LogBm { beta: f64 },
    /// γ(x) = exp(-log^q(1/x))
    StretchedExp { q: f64 },
    /// γ(x) = x^α log^b(1/x)
    PowerLog { alpha: f64, beta_log: f64 },
    Tabulated(TabulatedGamma),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    kind: ProfileKind,
    domain_max: f64,
    l_factor: f64,
}

impl VarianceProfile {
    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(ProfileKind::Power { alpha }, 1.0, 1.0)
    }

    pub fn logbm(beta: f64) -> Result<Self> {
        Self::new(ProfileKind::LogBm { beta }, 0.5, 2.0)
    }

    pub fn stretched_exp(q: f64) -> Result<Self> {
        Self::new(ProfileKind::StretchedExp { q }, 1.0, 1.0)
    }

    /// The default domain keeps the local index at least α/2 (and stays below 1/e).
    pub fn power_log(alpha: f64, beta_log: f64) -> Result<Self> {
        let dmax = if beta_log > 0.0 && alpha > 0.0 {
            (-(2.0 * beta_log / alpha).max(1.0)).exp()
        } else {
            (-1.0f64).exp()
        };
        Self::new(ProfileKind::PowerLog { alpha, beta_log }, dmax, 1.0)
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        let t = TabulatedGamma::new(points)?;
        let dmax = t.x_max();
        Self::new(ProfileKind::Tabulated(t), dmax, 1.0)
    }

    pub fn new(kind: ProfileKind, domain_max: f64, l_factor: f64) -> Result<Self> {
        match &kind {
            ProfileKind::Power { alpha } if !(*alpha > 0.0 && *alpha <= 1.0) => {
                return Err(Error::Argument(format!("power profile needs α in (0,1], got {alpha}")))
            }
            ProfileKind::LogBm { beta } if !(*beta > 0.5 && beta.is_finite()) => {
                return Err(Error::Argument(format!("logbm profile needs β > 1/2, got {beta}")))
            }
            ProfileKind::StretchedExp { q } if !(*q > 0.0 && *q < 1.0) => {
                return Err(Error::Argument(format!("stretched_exp needs q in (0,1), got {q}")))
            }
            ProfileKind::PowerLog { alpha, beta_log } => {
                if !(*alpha > 0.0 && *alpha <= 1.0 && beta_log.is_finite()) {
                    return Err(Error::Argument(format!("power_log needs α in (0,1], got {alpha}")));
                }
            }
            _ => {}
        }
        if !(domain_max > 0.0 && domain_max <= 1.0) {
            return Err(Error::Argument(format!("domain_max must lie in (0,1], got {domain_max}")));
        }
        if !(l_factor >= 1.0 && l_factor.is_finite()) {
            return Err(Error::Argument(format!("l_factor must be ≥ 1, got {l_factor}")));
        }
        let p = Self { kind, domain_max, l_factor };
        // γ must increase on the whole domain, which for the log kinds means L stays positive
        // and the local index stays positive.
        let l_min = -domain_max.ln();
        match &p.kind {
            ProfileKind::LogBm { .. } | ProfileKind::PowerLog { .. } if l_min <= 0.0 => {
                return Err(Error::Argument("domain_max must be < 1 for this kind".into()))
            }
            ProfileKind::PowerLog { .. } if p.local_index(l_min) <= 0.0 => {
                return Err(Error::Argument("power_log γ is not increasing on the domain".into()))
            }
            ProfileKind::Tabulated(t) if domain_max > t.x_max() * (1.0 + 1e-12) => {
                return Err(Error::Argument("domain_max exceeds the table".into()))
            }
            _ => {}
        }
        Ok(p)
    }

    pub fn with_domain_max(self, domain_max: f64) -> Result<Self> {
        Self::new(self.kind, domain_max, self.l_factor)
    }

    pub fn with_l_factor(self, l: f64) -> Result<Self> {
        Self::new(self.kind, self.domain_max, l)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    pub fn l_factor(&self) -> f64 {
        self.l_factor
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProfileKind::Power { .. } => "power",
            ProfileKind::LogBm { .. } => "logbm",
            ProfileKind::StretchedExp { .. } => "stretched_exp",
            ProfileKind::PowerLog { .. } => "power_log",
            ProfileKind::Tabulated(_) => "custom_tabulated",
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, ProfileKind::Tabulated(_))
    }

    /// Smallest admissible log-scale, `ln(1/domain_max)`.
    pub fn log_scale_min(&self) -> f64 {
        -self.domain_max.ln()
    }

    /// `ln γ(e^{-L})`.
    pub fn log_gamma(&self, l: f64) -> f64 {
        match &self.kind {
            ProfileKind::Power { alpha } => -alpha * l,
            ProfileKind::LogBm { beta } => -beta * l.ln(),
            ProfileKind::StretchedExp { q } => -l.powf(*q),
            ProfileKind::PowerLog { alpha, beta_log } => -alpha * l + beta_log * l.ln(),
            ProfileKind::Tabulated(t) => t.log_gamma_lnx(-l),
        }
    }

    /// `ln γ(e^{-(L+u)}) - ln γ(e^{-L})`, computed without cancellation for `u ≪ L`.
    pub fn log_gamma_increment(&self, l: f64, u: f64) -> f64 {
        match &self.kind {
            ProfileKind::Power { alpha } => -alpha * u,
            ProfileKind::LogBm { beta } => -beta * (u / l).ln_1p(),
            ProfileKind::StretchedExp { q } => -l.powf(*q) * (q * (u / l).ln_1p()).exp_m1(),
            ProfileKind::PowerLog { alpha, beta_log } => -alpha * u + beta_log * (u / l).ln_1p(),
            ProfileKind::Tabulated(_) => self.log_gamma(l + u) - self.log_gamma(l),
        }
    }

    /// Local index `x γ'(x)/γ(x) = -d ln γ / dL` at log-scale `L`.
    pub fn local_index(&self, l: f64) -> f64 {
        match &self.kind {
            ProfileKind::Power { alpha } => *alpha,
            ProfileKind::LogBm { beta } => beta / l,
            ProfileKind::StretchedExp { q } => q * l.powf(q - 1.0),
            ProfileKind::PowerLog { alpha, beta_log } => alpha - beta_log / l,
            ProfileKind::Tabulated(_) => {
                let h = 1e-4 * l.max(1.0);
                (self.log_gamma(l - h) - self.log_gamma(l + h)) / (2.0 * h)
            }
        }
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.domain_max * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("x = {x} outside [0, {}]", self.domain_max)));
        }
        Ok(())
    }

    pub fn gamma(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.gamma_unchecked(x))
    }

    /// γ without the domain check; `x ≤ 0` maps to 0.
    pub fn gamma_unchecked(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.log_gamma(-x.ln()).exp()
        }
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma_unchecked(self.domain_max)
    }

    /// γ⁻¹(v) as a log-scale `L` with `γ(e^{-L}) = v`.
    pub fn inverse_log_scale(&self, v: f64) -> Result<f64> {
        let gmax = self.gamma_max();
        if !(v > 0.0) || v > gmax * (1.0 + 1e-12) {
            return Err(Error::Range(format!("value {v} outside (0, {gmax}]")));
        }
        let lv = v.ln();
        let l_min = self.log_scale_min();
        let closed = match &self.kind {
            ProfileKind::Power { alpha } => Some(-lv / alpha),
            ProfileKind::LogBm { beta } => Some((-lv / beta).exp()),
            ProfileKind::StretchedExp { q } => Some((-lv).powf(1.0 / q)),
            _ => None,
        };
        if let Some(l) = closed {
            return Ok(l.max(l_min));
        }
        // bisection on the decreasing map L -> ln γ
        let mut lo = l_min;
        let mut hi = (2.0 * l_min).max(1.0);
        while self.log_gamma(hi) > lv {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Numerical("inverse bracketing failed".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.log_gamma(mid) > lv {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// γ⁻¹(v). Fails with a resolution error when the preimage underflows
    /// `f64`; [`Self::inverse_log_scale`] still applies there.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if v == 0.0 {
            return Ok(0.0);
        }
        let l = self.inverse_log_scale(v)?;
        let x = (-l).exp();
        if x < f64::MIN_POSITIVE {
            return Err(Error::Resolution(format!("γ⁻¹({v}) = e^-{l:e} underflows")));
        }
        Ok(x)
    }

    /// `(γ²)'(x)`. At `x = 0` the value is `+∞` whenever the derivative blows up.
    pub fn dgamma_squared(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        if x == 0.0 {
            return Ok(match self.kind {
                ProfileKind::Power { alpha } if alpha > 0.5 => 0.0,
                ProfileKind::Power { alpha } if alpha == 0.5 => 1.0,
                _ => f64::INFINITY,
            });
        }
        if let ProfileKind::Tabulated(_) = self.kind {
            let h = 1e-6 * x;
            let hi = (x + h).min(self.domain_max);
            let lo = x - h;
            let g2 = |y: f64| self.gamma_unchecked(y).powi(2);
            return Ok(((g2(hi) - g2(lo)) / (hi - lo)).max(0.0));
        }
        let l = -x.ln();
        let g = self.gamma_unchecked(x);
        Ok(2.0 * g * g * self.local_index(l) / x)
    }

    /// Whether γ² is concave on `(0, x]`, probed on a geometric grid.
    pub(crate) fn gamma_squared_concave_up_to(&self, x: f64) -> bool {
        let n = 200;
        let lmax = -x.ln() + 30.0;
        let pts: Vec<f64> = (0..=n)
            .map(|i| (-(lmax + (-x.ln() - lmax) * i as f64 / n as f64)).exp())
            .collect();
        let g2: Vec<f64> = pts.iter().map(|&p| self.gamma_unchecked(p).powi(2)).collect();
        let slopes: Vec<f64> =
            (0..n).map(|i| (g2[i + 1] - g2[i]) / (pts[i + 1] - pts[i])).collect();
        slopes.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn catalog_values() {
        let p = VarianceProfile::power(0.5).unwrap();
        assert!((p.gamma(0.25).unwrap() - 0.5).abs() < 1e-14);
        let l = VarianceProfile::logbm(1.0).unwrap().with_domain_max(0.3).unwrap();
        assert!((l.gamma((-10.0f64).exp()).unwrap() - 0.1).abs() < 1e-14);
        let s = VarianceProfile::stretched_exp(0.5).unwrap();
        assert!((s.gamma((-4.0f64).exp()).unwrap() - (-2.0f64).exp()).abs() < 1e-14);
        assert_eq!(p.gamma(0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let p = VarianceProfile::logbm(1.0).unwrap();
        assert!(matches!(p.gamma(0.9), Err(Error::Domain(_))));
        assert!(matches!(p.gamma(-0.1), Err(Error::Domain(_))));
        assert!(matches!(p.inverse(10.0), Err(Error::Range(_))));
        assert!(VarianceProfile::logbm(0.5).is_err());
        assert!(VarianceProfile::power(1.2).is_err());
        assert!(VarianceProfile::stretched_exp(1.0).is_err());
        assert!(VarianceProfile::power(0.5).unwrap().with_l_factor(0.5).is_err());
    }

    #[test]
    fn inverse_examples() {
        let p = VarianceProfile::power(0.5).unwrap();
        assert!((p.inverse(0.5).unwrap() - 0.25).abs() < 1e-14);
        let l = VarianceProfile::logbm(1.0).unwrap();
        assert!((l.inverse(0.1).unwrap() / (-10.0f64).exp() - 1.0).abs() < 1e-12);
        let deep = VarianceProfile::stretched_exp(0.05).unwrap();
        assert!(matches!(deep.inverse(0.01), Err(Error::Resolution(_))));
        let l = deep.inverse_log_scale(0.01).unwrap();
        assert!((deep.log_gamma(l) - 0.01f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn tabulated_inverse_reevaluates() {
        let pts: Vec<(f64, f64)> =
            (0..9).map(|k| (10f64.powi(-8 + k), 1.0 / (8.0 - k as f64 + 2.0))).collect();
        let t = VarianceProfile::tabulated(&pts).unwrap();
        for v in [0.11, 0.2, 0.3, 0.45] {
            let x = t.inverse(v).unwrap();
            assert!((t.gamma(x).unwrap() - v).abs() <= 1e-10 * v);
        }
    }

    #[test]
    fn derivative_examples() {
        let p = VarianceProfile::power(0.5).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert!((p.dgamma_squared(x).unwrap() - 1.0).abs() < 1e-12);
        }
        let l = VarianceProfile::logbm(1.0).unwrap();
        let x = (-2.0f64).exp();
        assert!((l.dgamma_squared(x).unwrap() / (E * E / 4.0) - 1.0).abs() < 1e-12);
        assert_eq!(l.dgamma_squared(0.0).unwrap(), f64::INFINITY);
        let s = VarianceProfile::stretched_exp(0.5).unwrap();
        for x in [1e-3, 0.05, 0.3] {
            let h = 1e-6 * x;
            let g2 = |y: f64| s.gamma_unchecked(y).powi(2);
            let fd = (g2(x + h) - g2(x - h)) / (2.0 * h);
            assert!((s.dgamma_squared(x).unwrap() / fd - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn concavity_of_variance() {
        assert!(VarianceProfile::power(0.3).unwrap().gamma_squared_concave_up_to(1.0));
        assert!(!VarianceProfile::power(0.8).unwrap().gamma_squared_concave_up_to(1.0));
        let l = VarianceProfile::logbm(1.0).unwrap();
        assert!(l.gamma_squared_concave_up_to((-3.0f64).exp()));
    }
}
