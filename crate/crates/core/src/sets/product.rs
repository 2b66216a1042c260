use super::{Construction, WeightedSet};
use crate::error::{Error, Result};
use crate::metric::{MetricSpec, Points};

const MAX_PRODUCT_POINTS: usize = 1_000_000;

/// Cartesian product of measures on the line, kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet {
    factors: Vec<WeightedSet>,
    sorted: Vec<Vec<f64>>,
}

impl ProductSet {
    pub fn new(factors: Vec<WeightedSet>) -> Result<Self> {
        if factors.is_empty() || factors.len() > 4 {
            return Err(Error::Argument("a product needs between 1 and 4 factors".into()));
        }
        if factors.iter().any(|f| f.dim() != 1) {
            return Err(Error::Argument("product factors must live on the line".into()));
        }
        let sorted = factors
            .iter()
            .map(|f| {
                let mut v: Vec<f64> = f.points().coords().to_vec();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        Ok(Self { factors, sorted })
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[WeightedSet] {
        &self.factors
    }

    pub fn n_atoms(&self) -> u128 {
        self.factors.iter().map(|f| f.len() as u128).product()
    }

    /// Shift every factor coordinate, e.g. to place the set relative to a starting point.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim() {
            return Err(Error::Argument("offset dimension mismatch".into()));
        }
        let factors = self
            .factors
            .iter()
            .zip(offset)
            .map(|(f, o)| {
                let pts: Vec<f64> = f.points().coords().iter().map(|x| x + o).collect();
                let (lo, hi) = f.ambient()[0];
                let mut g = WeightedSet::new(Points::from_times(&pts)?, f.masses().to_vec(), f.metric().clone(), vec![(lo + o, hi + o)])?;
                g.construction = f.construction.clone();
                g.tree = f.tree.clone();
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    /// Euclidean distance from `y` to the atoms, `(Σ_j dist(y_j, F_j)²)^{1/2}`.
    pub fn distance_to(&self, y: &[f64]) -> f64 {
        self.sorted
            .iter()
            .zip(y)
            .map(|(s, &v)| {
                let k = s.partition_point(|&x| x < v);
                let right = s.get(k).map_or(f64::INFINITY, |x| x - v);
                let left = if k > 0 { v - s[k - 1] } else { f64::INFINITY };
                left.min(right).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Cover counts by sup-norm cubes of half-side `r`: the product of the factor counts.
    pub fn box_covering_numbers(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let per: Vec<Vec<usize>> = self
            .factors
            .iter()
            .map(|f| f.clone().with_metric(MetricSpec::Euclidean)?.covering_numbers(radii))
            .collect::<Result<_>>()?;
        Ok((0..radii.len()).map(|k| per.iter().map(|v| v[k] as f64).product()).collect())
    }

    /// Mass of the cube of half-side `r` around the atom with factor indices `idx`.
    pub fn box_mass(&self, idx: &[usize], r: f64) -> f64 {
        self.factors
            .iter()
            .zip(idx)
            .map(|(f, &i)| {
                let x = f.point(i)[0];
                f.points()
                    .coords()
                    .iter()
                    .zip(f.masses())
                    .filter(|(p, _)| (*p - x).abs() <= r)
                    .map(|(_, m)| m)
                    .sum::<f64>()
            })
            .product()
    }

    /// All atoms as an explicit set (capped at a million points).
    pub fn materialize(&self) -> Result<WeightedSet> {
        product_measure(&self.factors)
    }
}

/// Product of measures: all coordinate tuples with product masses, Euclidean metric.
pub fn product_measure(sets: &[WeightedSet]) -> Result<WeightedSet> {
    if sets.is_empty() {
        return Err(Error::Argument("product of no sets".into()));
    }
    let count = sets.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
    let count = match count {
        Some(c) if c <= MAX_PRODUCT_POINTS => c,
        _ => return Err(Error::Resource("product exceeds a million points; thin the factors first".into())),
    };
    let dim: usize = sets.iter().map(|s| s.dim()).sum();
    let mut coords = Vec::with_capacity(count * dim);
    let mut masses = Vec::with_capacity(count);
    let mut idx = vec![0usize; sets.len()];
    for _ in 0..count {
        let mut m = 1.0;
        for (s, &i) in sets.iter().zip(&idx) {
            coords.extend_from_slice(s.point(i));
            m *= s.masses()[i];
        }
        masses.push(m);
        for (k, s) in sets.iter().enumerate().rev() {
            idx[k] += 1;
            if idx[k] < s.len() {
                break;
            }
            idx[k] = 0;
        }
    }
    // renormalize the rounding in the products
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    let ambient = sets.iter().flat_map(|s| s.ambient().iter().copied()).collect();
    let mut out = WeightedSet::new(Points::new(dim, coords)?, masses, MetricSpec::Euclidean, ambient)?;
    out.construction = Construction {
        kind: "product".into(),
        notes: format!("{} factors", sets.len()),
        ..Construction::default()
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> WeightedSet {
        WeightedSet::uniform(Points::from_times(&[0.0, 1.0]).unwrap(), MetricSpec::Euclidean).unwrap()
    }

    #[test]
    fn two_by_two() {
        let p = product_measure(&[two_point(), two_point()]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.masses().iter().all(|m| *m == 0.25));
    }

    #[test]
    fn singleton_factor_embeds() {
        let one = WeightedSet::uniform(Points::from_times(&[0.5]).unwrap(), MetricSpec::Euclidean).unwrap();
        let line = WeightedSet::interval(0.0, 1.0, 10, MetricSpec::Euclidean).unwrap();
        let p = product_measure(&[line.clone(), one]).unwrap();
        for i in 0..10 {
            assert_eq!(p.point(i), &[line.point(i)[0], 0.5]);
            assert!((p.masses()[i] - line.masses()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_and_distance() {
        let big = WeightedSet::interval(0.0, 1.0, 1001, MetricSpec::Euclidean).unwrap();
        assert!(matches!(product_measure(&[big.clone(), big]), Err(Error::Resource(_))));
        let ps = ProductSet::new(vec![two_point(), two_point(), two_point()]).unwrap();
        assert!((ps.distance_to(&[0.5, 0.0, 1.0]) - 0.5).abs() < 1e-15);
        assert!((ps.distance_to(&[-1.0, -1.0, 2.0]) - 3f64.sqrt()).abs() < 1e-15);
        let moved = ps.translated(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(moved.distance_to(&[1.0, 0.0, 0.0]), 0.0);
    }
}
