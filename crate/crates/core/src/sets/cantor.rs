use super::gauge::GaugeFunction;
use super::{Construction, WeightedSet};
use crate::error::{Error, Result};
use crate::metric::{MetricSpec, Points};

pub const MAX_DEPTH: u32 = 24;

/// Log-diameters of a binary Cantor construction: level `k` intervals have
/// diameter `D_k = e^{log_diams[k]}` and the two children sit at the ends of their parent.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorTree {
    pub log_diams: Vec<f64>,
}

impl CantorTree {
    pub fn depth(&self) -> u32 {
        (self.log_diams.len() - 1) as u32
    }

    fn ratio(&self, from: usize, to: usize) -> f64 {
        (self.log_diams[to] - self.log_diams[from]).exp()
    }

    /// `ln |t_i - t_j|` between leaf atoms `i` and `j` (addresses), on `[0,1]`.
    pub fn log_separation(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return f64::NEG_INFINITY;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let n = self.depth() as usize;
        let diff = a ^ b;
        // the highest differing bit sits at tree level k + 1
        let top = (usize::BITS - 1 - diff.leading_zeros()) as usize;
        let k = n - 1 - top;
        // b is in the right child, a in the left; lower levels shift each by their gaps
        let mut bracket = 1.0 - self.ratio(k, k + 1);
        for level in k + 2..=n {
            let bit = n - level;
            let db = ((b >> bit) & 1) as f64 - ((a >> bit) & 1) as f64;
            if db != 0.0 {
                let gap = self.ratio(k, level - 1) - self.ratio(k, level);
                if gap == 0.0 {
                    break;
                }
                bracket += db * gap;
            }
        }
        self.log_diams[k] + bracket.ln()
    }

    /// Leaf midpoints on `[0,1]` (collapsing once diameters fall below `f64` resolution).
    pub fn midpoints(&self) -> Vec<f64> {
        let n = self.depth() as usize;
        let d: Vec<f64> = self.log_diams.iter().map(|v| v.exp()).collect();
        (0..1usize << n)
            .map(|addr| {
                let mut x = 0.0;
                for level in 1..=n {
                    if (addr >> (n - level)) & 1 == 1 {
                        x += d[level - 1] - d[level];
                    }
                }
                x + 0.5 * d[n]
            })
            .collect()
    }
}

/// Next log-scale `L' > L` with `ln ψ(e^{-L'}) = ln ψ(e^{-L}) - ln 2`.
fn next_scale(g: &GaugeFunction, l: f64) -> Result<f64> {
    let target = g.log_eval(l) - std::f64::consts::LN_2;
    let mut lo = l;
    let mut step = 1.0;
    let mut hi = l + step;
    while g.log_eval(hi) > target {
        lo = hi;
        step *= 2.0;
        hi = l + step;
        if !hi.is_finite() || step > 1e300 {
            return Err(Error::Resolution("gauge scale ran past f64 range".into()));
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if g.log_eval(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary Cantor construction for a doubling gauge on `ambient = [a, b]`.
///
/// Each interval of diameter `D` keeps two end pieces of diameter `D'` with
/// `ψ(D') = ψ(D)/2` (diameters relative to `b - a`), and each child gets half the mass.
pub fn build_gauge_cantor(
    gauge: &GaugeFunction,
    depth: u32,
    metric: MetricSpec,
    ambient: (f64, f64),
) -> Result<WeightedSet> {
    if depth > MAX_DEPTH {
        return Err(Error::Argument(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    let (a, b) = ambient;
    if !(a < b) {
        return Err(Error::Argument("ambient interval needs a < b".into()));
    }
    if metric.dim() != Some(1) && metric != MetricSpec::Euclidean {
        return Err(Error::Argument("Cantor sets live on the line".into()));
    }
    let mut ls = vec![0.0f64];
    for _ in 0..depth {
        let l = *ls.last().unwrap();
        let next = next_scale(gauge, l)?;
        if !(next > l) {
            return Err(Error::Resolution("level diameters stopped shrinking".into()));
        }
        ls.push(next);
    }
    gauge.validate_doubling(0.5, *ls.last().unwrap())?;
    for w in ls.windows(2) {
        // children must fit in their parent: D' ≤ D/2
        if w[1] - w[0] < std::f64::consts::LN_2 - 1e-12 {
            return Err(Error::Gauge(format!("children overlap at log-scale {}", w[0])));
        }
    }
    let tree = CantorTree { log_diams: ls.iter().map(|l| -l).collect() };
    let collapsed = tree.log_diams[depth as usize] + (b - a).ln() < -700.0;
    if collapsed && metric.time_log_distance(-1.0).is_err() {
        return Err(Error::Resolution(format!(
            "depth {depth} is below f64 resolution for the {} metric",
            metric.kind_name()
        )));
    }
    let mids: Vec<f64> = tree.midpoints().iter().map(|x| (a + (b - a) * x).clamp(a, b)).collect();
    let n = mids.len();
    let mut set = WeightedSet::new(Points::from_times(&mids)?, vec![1.0 / n as f64; n], metric, vec![(a, b)])?;
    set.construction = Construction {
        kind: "gauge_cantor".into(),
        depth: Some(depth),
        gauge: Some(gauge.clone()),
        seed: None,
        notes: format!(
            "level log-diameters: {}",
            tree.log_diams.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(",")
        ),
    };
    set.tree = Some(tree);
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::VarianceProfile;
    use crate::sets::GaugeKind;

    #[test]
    fn ternary_cantor() {
        let g = GaugeFunction::power(2f64.ln() / 3f64.ln()).unwrap();
        let s = build_gauge_cantor(&g, 5, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let t = s.tree().unwrap();
        for (k, ld) in t.log_diams.iter().enumerate() {
            assert!((ld + k as f64 * 3f64.ln()).abs() < 1e-12);
        }
        assert_eq!(s.len(), 32);
        // leaf midpoints of the middle-thirds construction
        let h = 3f64.powi(-5);
        assert!((s.point(0)[0] - 0.5 * h).abs() < 1e-15);
        assert!((s.point(31)[0] - (1.0 - 0.5 * h)).abs() < 1e-15);
        assert!((s.point(16)[0] - (2.0 / 3.0 + 0.5 * h)).abs() < 1e-14);
        assert_eq!(s.masses().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn log_separation_matches_positions() {
        let g = GaugeFunction::power(0.4).unwrap();
        let s = build_gauge_cantor(&g, 8, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        for (i, j) in [(0, 1), (0, 255), (17, 200), (100, 101), (127, 128), (64, 3)] {
            let direct = (s.point(i)[0] - s.point(j)[0]).abs().ln();
            assert!((s.log_separation(i, j) - direct).abs() < 1e-9, "{i} {j}");
        }
    }

    #[test]
    fn linear_gauge_touches() {
        let g = GaugeFunction::power(1.0).unwrap();
        let s = build_gauge_cantor(&g, 6, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        let gaps: Vec<f64> = (1..64).map(|i| s.point(i)[0] - s.point(i - 1)[0]).collect();
        assert!(gaps.iter().all(|gap| (gap - 1.0 / 64.0).abs() < 1e-12));
    }

    #[test]
    fn deep_logbm_regular_set() {
        let p = VarianceProfile::logbm(1.0).unwrap();
        let g = GaugeFunction::new(GaugeKind::ProfilePower { profile: p.clone(), s: 0.5 }).unwrap();
        let s = build_gauge_cantor(&g, 9, MetricSpec::gamma_delta(p), (0.0, 1.0)).unwrap();
        let t = s.tree().unwrap();
        // L quadruples from one level to the next
        for w in t.log_diams.windows(2).skip(1) {
            assert!((w[1] / w[0] - 4.0).abs() < 1e-9);
        }
        // neighbours split at the last level, the extremes span the whole interval
        let ls = s.log_separation(0, 1);
        assert!((ls / t.log_diams[8] - 1.0).abs() < 1e-12);
        assert!(s.log_separation(0, 511).abs() < 1e-12);
        let e = build_gauge_cantor(&g, 9, MetricSpec::Euclidean, (0.0, 1.0)).unwrap();
        assert_eq!(e.log_distance(0, 1).unwrap(), ls);
    }

    #[test]
    fn rejects_non_doubling() {
        let g = GaugeFunction::power(1.3).unwrap();
        assert!(matches!(build_gauge_cantor(&g, 4, MetricSpec::Euclidean, (0.0, 1.0)), Err(Error::Gauge(_))));
        assert!(build_gauge_cantor(&GaugeFunction::power(0.5).unwrap(), 25, MetricSpec::Euclidean, (0.0, 1.0)).is_err());
    }
}
