use super::VarianceProfile;
use crate::error::{Error, Result};
use crate::fit::ols;

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEstimate {
    pub lower_index: f64,
    pub upper_index: f64,
    pub probe_scales: Vec<f64>,
    /// `(x, x γ'(x)/γ(x))` at each probe.
    pub slope_series: Vec<(f64, f64)>,
}

/// The slowly varying factor `ℓ` in the bound `I(x) ≤ c γ(x) ℓ(γ(x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllKind {
    Bounded,
    /// `ℓ(y) = √log(e/y)`
    SqrtLog,
    /// `ℓ(y) = log^p(e/y)`
    LogPower(f64),
}

impl EllKind {
    fn ln_ell(self, ln_y: f64) -> f64 {
        match self {
            EllKind::Bounded => 0.0,
            EllKind::SqrtLog => 0.5 * (1.0 - ln_y).ln(),
            EllKind::LogPower(p) => p * (1.0 - ln_y).ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionId {
    C0,
    CEps(f64),
    CEll(EllKind),
    C0Plus,
    Hyp2,
    Concavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionParams {
    /// Margins below `-tol` fail.
    pub tol: f64,
    /// Margins above `-slack` hold; the band in between is inconclusive.
    pub slack: f64,
    /// Log-scales `L = ln(1/x)` to probe; `None` picks a ladder for the profile.
    pub ladder: Option<Vec<f64>>,
    /// Fraction of the ladder (deepest end) used in the regressions.
    pub fit_fraction: f64,
    pub hyp2_a: Option<f64>,
    pub hyp2_b: Option<f64>,
    pub hyp2_band: f64,
    pub hyp2_grid: usize,
    /// Concavity is probed on `(0, concavity_fraction * domain_max]`.
    pub concavity_fraction: f64,
}

impl Default for ConditionParams {
    fn default() -> Self {
        Self {
            tol: 0.05,
            slack: 0.01,
            ladder: None,
            fit_fraction: 0.5,
            hyp2_a: None,
            hyp2_b: None,
            hyp2_band: 0.05,
            hyp2_grid: 400,
            concavity_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    pub verdict: Verdict,
    /// Probe log-scales `L = ln(1/x)`; deep probes are far below `f64` range in `x`.
    pub probe_log_scales: Vec<f64>,
    /// Slope of `log I(x)` against `log γ(x)` on the fit window (NaN when not applicable).
    pub fitted_exponent: f64,
    /// Quantity compared with the decision threshold.
    pub statistic: f64,
    pub threshold: f64,
    pub diagnostics: String,
}

const DEEP_L: f64 = 1e6;
const LADDER_LEN: usize = 40;

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..n).map(|i| lo * (r * i as f64 / (n - 1) as f64).exp()).collect()
}

struct Series {
    ladder: Vec<f64>,
    log_gamma: Vec<f64>,
    log_ratio: Vec<f64>,
    fit_start: usize,
}

impl Series {
    fn fit(&self) -> std::ops::Range<usize> {
        self.fit_start..self.ladder.len()
    }

    /// Slope of `ln I` against `ln γ`.
    fn exponent(&self) -> Result<f64> {
        let r = self.fit();
        let x = &self.log_gamma[r.clone()];
        let y: Vec<f64> = r.map(|i| self.log_gamma[i] + self.log_ratio[i]).collect();
        Ok(ols(x, &y)?.slope)
    }

    /// Growth exponent of `I/(γ ℓ(γ))` in powers of `L`.
    fn growth(&self, ell: EllKind) -> Result<f64> {
        let r = self.fit();
        let x: Vec<f64> = r.clone().map(|i| self.ladder[i].ln()).collect();
        let y: Vec<f64> =
            r.map(|i| self.log_ratio[i] - ell.ln_ell(self.log_gamma[i])).collect();
        Ok(ols(&x, &y)?.slope)
    }
}

fn verdict_from_margin(m: f64, p: &ConditionParams) -> Verdict {
    if m >= -p.slack {
        Verdict::Holds
    } else if m < -p.tol {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

impl VarianceProfile {
    /// Default probe ladder in log-scale.
    pub fn default_ladder(&self) -> Option<Vec<f64>> {
        let lmin = self.log_scale_min();
        if self.is_analytic() {
            let lo = 100f64.ln().max(lmin);
            return Some(geometric(lo, DEEP_L, LADDER_LEN));
        }
        let super::ProfileKind::Tabulated(t) = self.kind() else { unreachable!() };
        let hi = -t.x_min().ln();
        if hi - lmin < 1e4f64.ln() {
            return None;
        }
        Some((0..LADDER_LEN).map(|i| lmin + (hi - lmin) * i as f64 / (LADDER_LEN - 1) as f64).collect())
    }

    fn series(&self, p: &ConditionParams) -> Result<Option<Series>> {
        let ladder = match &p.ladder {
            Some(l) => l.clone(),
            None => match self.default_ladder() {
                Some(l) => l,
                None => return Ok(None),
            },
        };
        if ladder.len() < 4 {
            return Err(Error::Argument("condition ladder needs at least four probes".into()));
        }
        let log_gamma = ladder.iter().map(|&l| self.log_gamma(l)).collect();
        let log_ratio =
            ladder.iter().map(|&l| self.chaining_ratio_at(l).map(f64::ln)).collect::<Result<_>>()?;
        let keep = ((ladder.len() as f64 * p.fit_fraction).round() as usize).clamp(3, ladder.len());
        Ok(Some(Series { fit_start: ladder.len() - keep, ladder, log_gamma, log_ratio }))
    }

    pub fn check_condition(&self, id: ConditionId, p: &ConditionParams) -> Result<ConditionReport> {
        let mut report = ConditionReport {
            condition_id: id,
            verdict: Verdict::Inconclusive,
            probe_log_scales: vec![],
            fitted_exponent: f64::NAN,
            statistic: f64::NAN,
            threshold: f64::NAN,
            diagnostics: String::new(),
        };
        match id {
            ConditionId::Hyp2 => return self.check_hyp2(p, report),
            ConditionId::Concavity => return self.check_concavity(p, report),
            _ => {}
        }
        let Some(s) = self.series(p)? else {
            report.diagnostics = "table spans fewer than four decades".into();
            return Ok(report);
        };
        report.probe_log_scales = s.ladder.clone();
        report.fitted_exponent = s.exponent()?;
        match id {
            ConditionId::C0 => {
                let g = s.growth(EllKind::Bounded)?;
                report.statistic = g;
                report.threshold = 0.0;
                report.verdict = verdict_from_margin(-g, p);
                report.diagnostics = format!("growth of I/γ in powers of log(1/x): {g:.4}");
            }
            ConditionId::CEll(ell) => {
                let g = s.growth(ell)?;
                report.statistic = g;
                report.threshold = 0.0;
                report.verdict = verdict_from_margin(-g, p);
                report.diagnostics = format!("growth of I/(γ ℓ(γ)) in powers of log(1/x): {g:.4}");
            }
            ConditionId::CEps(eps) => {
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(Error::Argument(format!("ε must lie in (0,1), got {eps}")));
                }
                let th = 1.0 - eps;
                report.statistic = report.fitted_exponent;
                report.threshold = th;
                report.verdict = verdict_from_margin(report.fitted_exponent - th, p);
                report.diagnostics =
                    format!("slope {:.4} against threshold {th:.4}", report.fitted_exponent);
            }
            ConditionId::C0Plus => {
                let s_fit = report.fitted_exponent;
                let verdicts: Vec<Verdict> = [0.2, 0.1, 0.05, 0.02]
                    .iter()
                    .map(|e| verdict_from_margin(s_fit - (1.0 - e), p))
                    .collect();
                report.statistic = s_fit;
                report.threshold = 0.98;
                report.verdict = if verdicts.iter().all(|v| *v == Verdict::Holds) {
                    Verdict::Holds
                } else if verdicts.contains(&Verdict::Fails) {
                    Verdict::Fails
                } else {
                    Verdict::Inconclusive
                };
                report.diagnostics = format!("slope {s_fit:.4}; ε probes {verdicts:?}");
            }
            ConditionId::Hyp2 | ConditionId::Concavity => unreachable!(),
        }
        Ok(report)
    }

    fn check_hyp2(&self, p: &ConditionParams, mut report: ConditionReport) -> Result<ConditionReport> {
        let b = p.hyp2_b.unwrap_or(self.domain_max());
        let a = p.hyp2_a.unwrap_or(0.1 * self.domain_max());
        if !(a > 0.0 && a < b && b <= self.domain_max()) {
            return Err(Error::Argument(format!("Hyp2 window [{a}, {b}] invalid")));
        }
        let n = p.hyp2_grid.max(10);
        let h = (b - a) / n as f64;
        let band = ((p.hyp2_band * (b - a) / h).floor() as usize).max(1);
        let g: Vec<f64> = (0..=n).map(|i| self.gamma_unchecked(a + h * i as f64)).collect();
        let mut worst = 0.0f64;
        for k in 1..=band {
            let gk = self.gamma_unchecked(h * k as f64);
            for i in 0..=(n - k.min(n)) {
                worst = worst.max((g[i + k] - g[i]) / gk);
            }
        }
        let th = 1.0 / self.l_factor().sqrt();
        report.statistic = worst;
        report.threshold = th;
        report.verdict = if worst < th { Verdict::Holds } else { Verdict::Fails };
        report.diagnostics = format!("max (γ(t)-γ(s))/γ(t-s) = {worst:.4} on [{a}, {b}], band {band} cells");
        Ok(report)
    }

    fn check_concavity(&self, p: &ConditionParams, mut report: ConditionReport) -> Result<ConditionReport> {
        let x_c = p.concavity_fraction * self.domain_max();
        let l_top = -x_c.ln();
        let l_bottom = match self.kind() {
            super::ProfileKind::Tabulated(t) => -t.x_min().ln(),
            _ => l_top + 40.0,
        };
        let n = 400;
        let xs: Vec<f64> = (0..=n)
            .map(|i| (-(l_bottom + (l_top - l_bottom) * i as f64 / n as f64)).exp())
            .collect();
        let gs: Vec<f64> = xs.iter().map(|&x| self.gamma_unchecked(x)).collect();
        let slopes: Vec<f64> = (0..n).map(|i| (gs[i + 1] - gs[i]) / (xs[i + 1] - xs[i])).collect();
        let worst = slopes
            .windows(2)
            .map(|w| w[1] / w[0] - 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        report.probe_log_scales = vec![l_bottom, l_top];
        report.statistic = worst;
        report.threshold = 0.0;
        report.verdict = if worst <= 1e-9 { Verdict::Holds } else { Verdict::Fails };
        report.diagnostics = format!("largest relative slope increase {worst:.3e} on (0, {x_c}]");
        Ok(report)
    }

    /// Local slopes `x γ'(x)/γ(x)` at the given probes, by central differences in `log x`.
    pub fn estimate_indexes(&self, probe_scales: &[f64]) -> Result<IndexEstimate> {
        if probe_scales.len() < 3 {
            return Err(Error::Argument("index estimation needs at least three probes".into()));
        }
        if probe_scales.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Argument("probe scales must be strictly decreasing".into()));
        }
        let mut series = Vec::with_capacity(probe_scales.len());
        for &x in probe_scales {
            if !(x > 0.0 && x <= self.domain_max()) {
                return Err(Error::Domain(format!("probe {x} outside (0, domain_max]")));
            }
            let l = -x.ln();
            let h = 1e-4 * l.max(1.0);
            let lo = (l - h).max(self.log_scale_min());
            let slope = (self.log_gamma(lo) - self.log_gamma(l + h)) / (l + h - lo);
            series.push((x, slope));
        }
        let lower = series.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let upper = series.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        Ok(IndexEstimate {
            lower_index: lower.max(0.0),
            upper_index: upper.max(0.0),
            probe_scales: probe_scales.to_vec(),
            slope_series: series,
        })
    }
}
