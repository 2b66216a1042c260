use crate::error::{Error, Result};
use crate::profiles::{EllKind, VarianceProfile};

/// Shape of a gauge before scaling and powers.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeKind {
    /// `r^s`
    Power(f64),
    /// `φ_d(r) = r^d ℓ^d(r)`
    PhiDEll { d: f64, ell: EllKind },
    /// `φ_{d-α}(r) log^θ(e/r)`
    PseudoPlus { d: f64, alpha: f64, theta: f64, ell: EllKind },
    /// `r^{d-α} log^{-θ}(e/r)`
    PseudoMinus { d: f64, alpha: f64, theta: f64 },
    /// `γ(r)^s` for a variance profile, e.g. a δ-regular gauge.
    ProfilePower { profile: VarianceProfile, s: f64 },
}

/// `ψ(r) = g(κ r)^p` for a base shape `g`, scale `κ ∈ (0,1]` and power `p > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    pub kind: GaugeKind,
    pub scale: f64,
    pub power: f64,
}

/// `ln ℓ(r)` at log-scale `L = ln(1/r)`; `ℓ(r) = √log(e/r)` stays positive up to `r = 1`.
fn ln_ell(ell: EllKind, l: f64) -> f64 {
    match ell {
        EllKind::Bounded => 0.0,
        EllKind::SqrtLog => 0.5 * (1.0 + l).ln(),
        EllKind::LogPower(p) => p * (1.0 + l).ln(),
    }
}

impl GaugeFunction {
    pub fn new(kind: GaugeKind) -> Result<Self> {
        let ok = match &kind {
            GaugeKind::Power(s) => *s > 0.0,
            GaugeKind::PhiDEll { d, .. } => *d > 0.0,
            GaugeKind::PseudoPlus { d, alpha, theta, .. } | GaugeKind::PseudoMinus { d, alpha, theta } => {
                *alpha > 0.0 && alpha < d && theta.is_finite()
            }
            GaugeKind::ProfilePower { s, .. } => *s > 0.0,
        };
        if !ok {
            return Err(Error::Gauge(format!("invalid gauge parameters {kind:?}")));
        }
        Ok(Self { kind, scale: 1.0, power: 1.0 })
    }

    pub fn power(s: f64) -> Result<Self> {
        Self::new(GaugeKind::Power(s))
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::Gauge(format!("scale must lie in (0,1], got {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    /// `ψ^{1/k}`, the one-dimensional factor of a `k`-fold product gauge.
    pub fn root(mut self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Gauge("root order must be positive".into()));
        }
        self.power /= k as f64;
        Ok(self)
    }

    /// `ln ψ(e^{-L})`.
    pub fn log_eval(&self, l: f64) -> f64 {
        let l = l - self.scale.ln();
        let base = match &self.kind {
            GaugeKind::Power(s) => -s * l,
            GaugeKind::PhiDEll { d, ell } => d * (-l + ln_ell(*ell, l)),
            GaugeKind::PseudoPlus { d, alpha, theta, ell } => {
                (d - alpha) * (-l + ln_ell(*ell, l)) + theta * (1.0 + l).ln()
            }
            GaugeKind::PseudoMinus { d, alpha, theta } => -(d - alpha) * l - theta * (1.0 + l).ln(),
            GaugeKind::ProfilePower { profile, s } => {
                s * profile.log_gamma(l.max(profile.log_scale_min()))
            }
        };
        self.power * base
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            self.log_eval(-r.ln()).exp()
        }
    }

    /// Checks `ψ(2x) < 2ψ(x)` and monotonicity on a ladder of `x ∈ (0, x0]` reaching
    /// log-scale `l_deep`.
    pub fn validate_doubling(&self, x0: f64, l_deep: f64) -> Result<()> {
        let l0 = -x0.ln();
        let n = 400;
        let top = l_deep.max(l0 + 50.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=n {
            // geometric in L, dense near the top of the range
            let l = l0 + ((top - l0 + 1.0).ln() * i as f64 / n as f64).exp() - 1.0;
            let lx = self.log_eval(l);
            let l2x = self.log_eval(l - std::f64::consts::LN_2);
            if !lx.is_finite() || !l2x.is_finite() {
                return Err(Error::Gauge(format!("gauge not finite at L = {l}")));
            }
            if l2x - lx >= std::f64::consts::LN_2 + 1e-12 {
                return Err(Error::Gauge(format!(
                    "doubling fails at x = e^-{l:.3}: ψ(2x)/ψ(x) = {:.6}",
                    (l2x - lx).exp()
                )));
            }
            if i > 0 && lx > prev + 1e-12 {
                // walking to smaller x must not increase ψ
                return Err(Error::Gauge(format!("gauge not increasing near e^-{l:.3}")));
            }
            prev = lx;
        }
        Ok(())
    }

    /// The same gauge with the largest scale `e^{-k}` that passes doubling validation.
    pub fn auto_scaled(self, x0: f64, l_deep: f64) -> Result<Self> {
        let mut last = None;
        for k in 0..40 {
            let g = self.clone().with_scale((-(k as f64)).exp())?;
            match g.validate_doubling(x0, l_deep) {
                Ok(()) => return Ok(g),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::Gauge("no admissible scale".into())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_gauge() {
        let g = GaugeFunction::power(0.5).unwrap();
        assert!((g.eval(0.25) - 0.5).abs() < 1e-15);
        assert_eq!(g.eval(0.0), 0.0);
        g.validate_doubling(0.5, 1e4).unwrap();
        assert!(GaugeFunction::power(1.5).unwrap().validate_doubling(0.5, 100.0).is_err());
    }

    #[test]
    fn roots_multiply_back() {
        let g = GaugeFunction::new(GaugeKind::PseudoMinus { d: 2.0, alpha: 1.0, theta: 2.0 }).unwrap();
        let f = g.clone().root(2).unwrap();
        for r in [0.3, 1e-3, 1e-9] {
            assert!((f.eval(r).powi(2) / g.eval(r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pseudo_plus_needs_scaling() {
        // r^{1/2} ℓ^{1/2} log(e/r) dips near r = 1 and must be rescaled
        let g = GaugeFunction::new(GaugeKind::PseudoPlus { d: 2.0, alpha: 1.0, theta: 2.0, ell: EllKind::SqrtLog })
            .unwrap()
            .root(2)
            .unwrap();
        assert!(g.validate_doubling(0.5, 1e3).is_err());
        let s = g.auto_scaled(0.5, 1e3).unwrap();
        assert!(s.scale < 1.0);
        s.validate_doubling(0.5, 1e3).unwrap();
    }

    #[test]
    fn profile_gauge_matches_profile() {
        let p = VarianceProfile::logbm(1.0).unwrap();
        let g = GaugeFunction::new(GaugeKind::ProfilePower { profile: p.clone(), s: 0.5 }).unwrap();
        let r = 1e-5;
        assert!((g.eval(r) - p.gamma(r).unwrap().sqrt()).abs() < 1e-15);
        assert!(GaugeFunction::new(GaugeKind::PseudoMinus { d: 1.0, alpha: 2.0, theta: 2.0 }).is_err());
    }
}
