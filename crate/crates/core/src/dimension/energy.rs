use rayon::prelude::*;

use super::{DimMethod, DimensionEstimate};
use crate::error::{Error, Result};
use crate::sets::WeightedSet;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub beta: f64,
    /// `+∞` when two distinct atoms sit at distance zero.
    pub value: f64,
    pub pairs: usize,
    /// Smallest pair distance entering the sum.
    pub truncation: f64,
}

/// Atom sets with more pairs than this are rejected.
const MAX_ATOMS: usize = 100_000;

/// Below this the coordinates no longer resolve a Cantor tree and exact log-separations are used.
const DEEP_LOG_SCALE: f64 = -30.0;

fn use_tree(set: &WeightedSet) -> bool {
    set.tree().is_some_and(|t| {
        let (a, b) = set.ambient()[0];
        t.log_diams.last().copied().unwrap_or(0.0) + (b - a).ln() < DEEP_LOG_SCALE
    })
}

/// `Σ_{i≠j} m_i m_j d(x_i, x_j)^{-β}` in the set's metric.
pub fn energy(set: &WeightedSet, beta: f64) -> Result<EnergyReport> {
    Ok(energies(set, &[beta])?.remove(0))
}

/// Energies at several orders from one pass over the pairs.
pub fn energies(set: &WeightedSet, betas: &[f64]) -> Result<Vec<EnergyReport>> {
    if betas.iter().any(|b| !(*b >= 0.0)) {
        return Err(Error::Argument("energy orders must be non-negative".into()));
    }
    let n = set.len();
    if n > MAX_ATOMS {
        return Err(Error::Resource(format!("{n} atoms exceed the {MAX_ATOMS} limit for pair sums")));
    }
    let tree = use_tree(set);
    let m = set.masses();
    let pts = set.points();
    let metric = set.metric();
    let k = betas.len();
    // each row sums j > i; the factor 2 restores the symmetric sum
    let (sums, min_log) = (0..n)
        .into_par_iter()
        .fold(
            || (vec![0.0; k], f64::INFINITY),
            |(mut s, mut lo), i| {
                for j in i + 1..n {
                    let ld = if tree {
                        set.log_distance(i, j).unwrap_or(f64::NEG_INFINITY)
                    } else {
                        metric.distance_unchecked(pts.get(i), pts.get(j)).ln()
                    };
                    lo = lo.min(ld);
                    let w = m[i] * m[j];
                    for (acc, b) in s.iter_mut().zip(betas) {
                        *acc += w * (-b * ld).exp();
                    }
                }
                (s, lo)
            },
        )
        .reduce(
            || (vec![0.0; k], f64::INFINITY),
            |a, b| (a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect(), a.1.min(b.1)),
        );
    Ok(betas
        .iter()
        .zip(sums)
        .map(|(&beta, s)| EnergyReport {
            beta,
            value: if min_log == f64::NEG_INFINITY { f64::INFINITY } else { 2.0 * s },
            pairs: n * (n - 1) / 2,
            truncation: min_log.exp(),
        })
        .collect())
}

/// Transition order of the energies over successive refinements of one measure.
///
/// For each `β` the last three levels give increments `Δ₁, Δ₂` and the growth
/// ratio `ρ(β) = Δ₂/Δ₁`: bounded energies have `ρ < 1`, divergent ones `ρ ≥ 1`.
/// The estimate is the interpolated `β` where `ln ρ` crosses zero.
pub fn capacity_dimension(levels: &[WeightedSet], betas: &[f64]) -> Result<DimensionEstimate> {
    if levels.len() < 3 {
        return Err(Error::Argument("need at least three refinement levels".into()));
    }
    if betas.len() < 5 || betas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("need at least five increasing orders".into()));
    }
    let energies: Vec<Vec<f64>> = levels
        .iter()
        .map(|s| Ok(energies(s, betas)?.into_iter().map(|e| e.value).collect()))
        .collect::<Result<_>>()?;
    let log_rho = |k: usize| -> Vec<f64> {
        (0..betas.len())
            .map(|b| {
                let d1 = energies[k + 1][b] - energies[k][b];
                let d2 = energies[k + 2][b] - energies[k + 1][b];
                if d1 > 0.0 && d2 > 0.0 {
                    (d2 / d1).ln()
                } else if d2 <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    };
    let crossing = |lr: &[f64]| -> Option<f64> {
        let k = lr.iter().position(|&v| v >= 0.0)?;
        if k == 0 || !lr[k - 1].is_finite() || !lr[k].is_finite() {
            return Some(betas[k]);
        }
        let (a, b) = (lr[k - 1], lr[k]);
        Some(betas[k - 1] + (betas[k] - betas[k - 1]) * (-a) / (b - a))
    };
    let last = levels.len() - 3;
    let lr = log_rho(last);
    let beta_step = (betas[betas.len() - 1] - betas[0]) / (betas.len() - 1) as f64;
    let inconclusive = lr.windows(2).any(|w| w[1] < w[0] - 0.05) || lr[0] >= 0.0;
    let (value, unbounded) = match crossing(&lr) {
        Some(v) => (v, false),
        None => (betas[betas.len() - 1], true),
    };
    // with a fourth level, the shift of the crossing between triples measures its stability
    let prev = if last > 0 && !unbounded { crossing(&log_rho(last - 1)) } else { None };
    let stderr = prev.map_or(0.0, |p| (value - p).abs()).max(beta_step / 12f64.sqrt());
    Ok(DimensionEstimate {
        value,
        stderr,
        method: DimMethod::EnergyScan,
        fit_window: (betas[0], betas[betas.len() - 1]),
        counts: betas.iter().copied().zip(lr).collect(),
        per_path: Vec::new(),
        unbounded,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MetricSpec, Points};
    use crate::profiles::VarianceProfile;
    use crate::sets::{build_gauge_cantor, GaugeFunction};

    #[test]
    fn two_atoms() {
        let s = WeightedSet::uniform(Points::from_times(&[0.0, 1.0]).unwrap(), MetricSpec::Euclidean).unwrap();
        let e = energy(&s, 2.0).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
        assert_eq!(e.pairs, 1);
        let s = WeightedSet::uniform(Points::from_times(&[0.5, 0.5]).unwrap(), MetricSpec::Euclidean).unwrap();
        assert_eq!(energy(&s, 1.0).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn uniform_energy_grows_like_log() {
        // Σ_{i≠j} n^{-2} n/|i-j| = (2/n) Σ_k (n-k)/k ≈ 2 ln n - 2
        let e: Vec<f64> = [500, 2000, 8000]
            .iter()
            .map(|&n| {
                let s = WeightedSet::interval(0.0, 1.0, n, MetricSpec::Euclidean).unwrap();
                energy(&s, 1.0).unwrap().value
            })
            .collect();
        let step = 2.0 * 4f64.ln();
        assert!(((e[1] - e[0]) / step - 1.0).abs() < 0.02);
        assert!(((e[2] - e[1]) / step - 1.0).abs() < 0.02);
    }

    #[test]
    fn transitions() {
        let betas: Vec<f64> = (0..9).map(|k| 0.6 + 0.1 * k as f64).collect();
        let levels: Vec<WeightedSet> = [500, 1000, 2000, 4000]
            .iter()
            .map(|&n| WeightedSet::interval(0.0, 1.0, n, MetricSpec::Euclidean).unwrap())
            .collect();
        let c = capacity_dimension(&levels, &betas).unwrap();
        assert!((c.value - 1.0).abs() < 0.1, "{c:?}");

        let g = GaugeFunction::power(2f64.ln() / 3f64.ln()).unwrap();
        let levels: Vec<WeightedSet> = (9..=12)
            .map(|k| build_gauge_cantor(&g, k, MetricSpec::Euclidean, (0.0, 1.0)).unwrap())
            .collect();
        let betas: Vec<f64> = (0..9).map(|k| 0.3 + 0.075 * k as f64).collect();
        let c = capacity_dimension(&levels, &betas).unwrap();
        assert!((c.value - 0.6309).abs() < 0.1, "{c:?}");

        let m = MetricSpec::gamma_delta(VarianceProfile::logbm(1.0).unwrap());
        let levels: Vec<WeightedSet> = [500, 1000, 2000]
            .iter()
            .map(|&n| WeightedSet::interval(0.0, 0.5, n, m.clone()).unwrap())
            .collect();
        let betas: Vec<f64> = (1..=6).map(|k| k as f64).collect();
        let c = capacity_dimension(&levels, &betas).unwrap();
        assert!(c.unbounded && c.value >= 6.0, "{c:?}");
    }
}
