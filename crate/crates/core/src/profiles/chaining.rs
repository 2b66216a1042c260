use super::VarianceProfile;
use crate::error::{Error, Result};
use crate::quad;

const REL_TOL: f64 = 1e-8;

/// Which logarithm sits under the square root in the integral part of Φ_γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulusLog {
    /// `γ(y) / (y √log(1/y))`
    #[default]
    IntegrationVariable,
    /// `γ(y) / (y √log(1/r))`, divergent for slowly varying γ.
    UpperLimit,
}

impl VarianceProfile {
    /// `I(x)/γ(x)` at log-scale `L = ln(1/x)`.
    ///
    /// With `y = e^{-u}` and `u = e^v` the integral becomes
    /// `∫_{ln ln 2}^∞ γ(x e^{-e^v})/γ(x) e^{v/2} dv`, which is smooth and decays in `v`.
    pub fn chaining_ratio_at(&self, l: f64) -> Result<f64> {
        self.chaining_ratio_tol(l, REL_TOL)
    }

    pub(crate) fn chaining_ratio_tol(&self, l: f64, tol: f64) -> Result<f64> {
        if !(l >= self.log_scale_min() * (1.0 - 1e-12)) {
            return Err(Error::Domain(format!("log-scale {l} outside the domain")));
        }
        let v0 = std::f64::consts::LN_2.ln();
        let f = |v: f64| {
            let u = v.exp();
            (self.log_gamma_increment(l, u) + 0.5 * v).exp()
        };
        quad::integrate_to_infinity(f, v0, tol).map_err(|e| {
            Error::Numerical(format!("chaining integral at L = {l} ({}): {e}", self.kind_name()))
        })
    }

    /// `I(x) = ∫_0^{1/2} γ(xy) dy / (y √log(1/y))`.
    pub fn chaining_integral(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("chaining integral needs x > 0, got {x}")));
        }
        let g = self.gamma(x)?;
        Ok(g * self.chaining_ratio_at(-x.ln())?)
    }

    /// `f_γ(r) = I(γ⁻¹(√l r))`.
    pub fn f_gamma(&self, r: f64) -> Result<f64> {
        let v = self.l_factor.sqrt() * r;
        if !(r > 0.0) || v >= self.gamma_max() {
            return Err(Error::Domain(format!("f_γ argument {r} outside (0, γ(x_max)/√l)")));
        }
        let l = self.inverse_log_scale(v)?;
        Ok(self.log_gamma(l).exp() * self.chaining_ratio_at(l)?)
    }

    /// `Φ_γ(r)/γ(r)` at log-scale `L = ln(1/r)`.
    pub fn modulus_ratio_at(&self, l: f64, which: ModulusLog) -> Result<f64> {
        if !(l > 0.0 && l >= self.log_scale_min() * (1.0 - 1e-12)) {
            return Err(Error::Domain(format!("modulus needs 0 < r < 1 in the domain (L = {l})")));
        }
        let sl = l.sqrt();
        // w = L e^v runs over [L, ∞)
        let tail = match which {
            ModulusLog::IntegrationVariable => quad::integrate_to_infinity(
                |v| (self.log_gamma_increment(l, l * v.exp_m1()) + 0.5 * v).exp() * sl,
                0.0,
                REL_TOL,
            ),
            ModulusLog::UpperLimit => quad::integrate_to_infinity(
                |v| (self.log_gamma_increment(l, l * v.exp_m1()) + v).exp() * sl,
                0.0,
                REL_TOL,
            ),
        }
        .map_err(|e| Error::Numerical(format!("modulus integral at L = {l}: {e}")))?;
        Ok(sl + tail)
    }

    pub fn modulus_phi(&self, r: f64) -> Result<f64> {
        self.modulus_phi_with(r, ModulusLog::default())
    }

    pub fn modulus_phi_with(&self, r: f64, which: ModulusLog) -> Result<f64> {
        if !(r > 0.0 && r < self.domain_max.min(1.0)) {
            return Err(Error::Domain(format!("modulus needs r in (0, domain_max), got {r}")));
        }
        let l = -r.ln();
        Ok(self.gamma(r)? * self.modulus_ratio_at(l, which)?)
    }
}
