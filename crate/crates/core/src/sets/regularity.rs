use rand::distributions::{Distribution, WeightedIndex};

use super::gauge::GaugeFunction;
use super::product::ProductSet;
use super::WeightedSet;
use crate::error::{Error, Result};
use crate::profiles::Verdict;
use crate::simulation::stream_rng;

#[derive(Debug, Clone, PartialEq)]
pub enum RegularityScale {
    /// `r^α`
    Alpha(f64),
    Gauge(GaugeFunction),
}

impl RegularityScale {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RegularityScale::Alpha(a) => r.powf(*a),
            RegularityScale::Gauge(g) => g.eval(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub scale: RegularityScale,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Smallest `c` with every ratio in `[1/c, c]`.
    pub c: f64,
    pub n_pairs: usize,
    pub verdict: Verdict,
}

pub const DEFAULT_C_BOUND: f64 = 64.0;
const MIN_PAIRS: usize = 200;

fn report(scale: RegularityScale, ratios: &[f64], c_bound: f64) -> RegularityReport {
    let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ok = ratio_min > 0.0 && ratio_max.is_finite() && ratio_max / ratio_min <= c_bound;
    RegularityReport {
        scale,
        ratio_min,
        ratio_max,
        c: ratio_max.max(1.0 / ratio_min),
        n_pairs: ratios.len(),
        verdict: if ok { Verdict::Holds } else { Verdict::Fails },
    }
}

fn centers(masses: &[f64], count: usize, seed: u64) -> Result<Vec<usize>> {
    let w = WeightedIndex::new(masses).map_err(|e| Error::Argument(format!("masses: {e}")))?;
    let mut rng = stream_rng(seed, 0x5eed);
    Ok((0..count).map(|_| w.sample(&mut rng)).collect())
}

/// Ball-mass ratios `μ(B(x,r))/scale(r)` over centres drawn from the measure.
pub fn verify_ahlfors_regularity(set: &WeightedSet, scale: RegularityScale, radii: &[f64]) -> Result<RegularityReport> {
    verify_ahlfors_regularity_with(set, scale, radii, DEFAULT_C_BOUND, 0)
}

pub fn verify_ahlfors_regularity_with(
    set: &WeightedSet,
    scale: RegularityScale,
    radii: &[f64],
    c_bound: f64,
    seed: u64,
) -> Result<RegularityReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Argument("radii must be positive and non-empty".into()));
    }
    let per = MIN_PAIRS.div_ceil(radii.len());
    let cs = centers(set.masses(), per, seed)?;
    let ratios: Vec<f64> = cs
        .iter()
        .flat_map(|&i| radii.iter().map(move |&r| (i, r)))
        .map(|(i, r)| set.ball_mass(i, r) / scale.eval(r))
        .collect();
    Ok(report(scale, &ratios, c_bound))
}

impl ProductSet {
    /// Regularity of the product measure for sup-norm balls (cubes of half-side `r`).
    pub fn verify_box_regularity(&self, scale: RegularityScale, radii: &[f64], c_bound: f64, seed: u64) -> Result<RegularityReport> {
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Argument("radii must be positive and non-empty".into()));
        }
        let per = MIN_PAIRS.div_ceil(radii.len());
        let idx: Vec<Vec<usize>> = self
            .factors()
            .iter()
            .enumerate()
            .map(|(k, f)| centers(f.masses(), per, seed.wrapping_add(k as u64)))
            .collect::<Result<_>>()?;
        let mut ratios = Vec::with_capacity(per * radii.len());
        for c in 0..per {
            let tuple: Vec<usize> = idx.iter().map(|v| v[c]).collect();
            for &r in radii {
                ratios.push(self.box_mass(&tuple, r) / scale.eval(r));
            }
        }
        Ok(report(scale, &ratios, c_bound))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpec;
    use crate::profiles::VarianceProfile;
    use crate::sets::build_gauge_cantor;

    #[test]
    fn interval_is_regular() {
        let s = WeightedSet::interval(0.2, 0.8, 4000, MetricSpec::Euclidean).unwrap();
        let radii = [0.004, 0.01, 0.03, 0.1];
        let r = verify_ahlfors_regularity(&s, RegularityScale::Alpha(1.0), &radii).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.ratio_min <= r.ratio_max && r.n_pairs >= 200);
    }

    #[test]
    fn interval_under_power_delta() {
        let alpha = 0.5;
        let m = MetricSpec::gamma_delta(VarianceProfile::power(alpha).unwrap());
        let s = WeightedSet::interval(0.0, 1.0, 4000, m).unwrap();
        // δ-radii ρ ↔ euclidean radii ρ^{1/α}
        let radii = [0.08, 0.12, 0.2, 0.3];
        let r = verify_ahlfors_regularity(&s, RegularityScale::Alpha(1.0 / alpha), &radii).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
    }

    #[test]
    fn cantor_is_not_one_regular() {
        let g = GaugeFunction::power(2f64.ln() / 3f64.ln()).unwrap();
        let s = build_gauge_cantor(&g, 16, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let radii: Vec<f64> = (1..=13).map(|k| 3f64.powi(-k)).collect();
        let r = verify_ahlfors_regularity(&s, RegularityScale::Alpha(1.0), &radii).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let r = verify_ahlfors_regularity(&s, RegularityScale::Gauge(g), &radii).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.c <= 8.0);
    }
}
