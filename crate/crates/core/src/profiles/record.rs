use std::fmt;
use std::str::FromStr;

use super::{ProfileKind, VarianceProfile};
use crate::error::{Error, Result};
use crate::text::{fmt_f64, Record};

impl fmt::Display for VarianceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={}", self.kind_name())?;
        match self.kind() {
            ProfileKind::Power { alpha } => write!(f, "; alpha={}", fmt_f64(*alpha))?,
            ProfileKind::LogBm { beta } => write!(f, "; beta={}", fmt_f64(*beta))?,
            ProfileKind::StretchedExp { q } => write!(f, "; q={}", fmt_f64(*q))?,
            ProfileKind::PowerLog { alpha, beta_log } => {
                write!(f, "; alpha={}; beta_log={}", fmt_f64(*alpha), fmt_f64(*beta_log))?
            }
            ProfileKind::Tabulated(t) => {
                let pts = t.points();
                let join = |it: &mut dyn Iterator<Item = f64>| {
                    it.map(fmt_f64).collect::<Vec<_>>().join(",")
                };
                write!(f, "; x={}", join(&mut pts.iter().map(|p| p.0)))?;
                write!(f, "; gamma={}", join(&mut pts.iter().map(|p| p.1)))?;
            }
        }
        write!(f, "; domain_max={}; l={}", fmt_f64(self.domain_max()), fmt_f64(self.l_factor()))
    }
}

impl FromStr for VarianceProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_record(&Record::parse(s)?)
    }
}

impl VarianceProfile {
    pub fn from_record(r: &Record) -> Result<Self> {
        let base = match r.str("kind")? {
            "power" => {
                r.only(&["kind", "alpha", "domain_max", "l"])?;
                VarianceProfile::power(r.f64("alpha")?)?
            }
            "logbm" => {
                r.only(&["kind", "beta", "domain_max", "l"])?;
                VarianceProfile::logbm(r.f64("beta")?)?
            }
            "stretched_exp" => {
                r.only(&["kind", "q", "domain_max", "l"])?;
                VarianceProfile::stretched_exp(r.f64("q")?)?
            }
            "power_log" => {
                r.only(&["kind", "alpha", "beta_log", "domain_max", "l"])?;
                VarianceProfile::power_log(r.f64("alpha")?, r.f64("beta_log")?)?
            }
            "custom_tabulated" | "tabulated" => {
                r.only(&["kind", "x", "gamma", "domain_max", "l"])?;
                let x = r.list("x")?;
                let g = r.list("gamma")?;
                if x.len() != g.len() {
                    return Err(Error::Parse("x and gamma lists differ in length".into()));
                }
                let pts: Vec<(f64, f64)> = x.into_iter().zip(g).collect();
                VarianceProfile::tabulated(&pts)?
            }
            other => return Err(Error::Parse(format!("unknown profile kind '{other}'"))),
        };
        let dmax = r.f64_or("domain_max", base.domain_max())?;
        let l = r.f64_or("l", base.l_factor())?;
        VarianceProfile::new(base.kind().clone(), dmax, l)
    }
}
