//! Adaptive Gauss-Kronrod quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod pass. Returns the estimate and |K15 - G7|.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64),
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let (val, err) = whole;
    if !val.is_finite() {
        return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
    }
    if err <= tol || depth == 0 || (b - a) < 1e-14 * (1.0 + a.abs()) {
        return Ok(val);
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    Ok(recurse(f, a, m, left, 0.5 * tol, depth - 1)? + recurse(f, m, b, right, 0.5 * tol, depth - 1)?)
}

/// Integral of `f` over `[a, b]` to the requested relative accuracy.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let whole = gk15(&f, a, b);
    let tol = (rel_tol * whole.0.abs()).max(1e-300);
    recurse(&f, a, b, whole, tol, 40)
}

/// Integral of a decaying integrand over `[a, inf)`.
///
/// Unit panels are summed until the geometric extrapolation of what is left
/// falls below `rel_tol` of the running total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut prev = f64::NAN;
    let mut growing = 0;
    for k in 0..20_000 {
        let lo = a + k as f64;
        let p = integrate(&f, lo, lo + 1.0, 0.1 * rel_tol)?;
        total += p;
        if !total.is_finite() {
            return Err(Error::Numerical("tail integral overflowed".into()));
        }
        if p == 0.0 && total > 0.0 && growing == 0 {
            return Ok(total);
        }
        if k >= 2 && prev > 0.0 {
            let ratio = p / prev;
            growing = if ratio >= 1.0 { growing + 1 } else { 0 };
            if growing >= 200 || (p == 0.0 && growing > 0) {
                return Err(Error::Numerical("tail integral diverges".into()));
            }
            if ratio < 1.0 {
                let tail = p * ratio / (1.0 - ratio);
                if tail <= rel_tol * total {
                    return Ok(total + tail);
                }
            }
        }
        prev = p;
    }
    Err(Error::Numerical("tail integral did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail() {
        let v = integrate_to_infinity(|x| (-x * x).exp(), 0.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn slow_geometric_tail() {
        let v = integrate_to_infinity(|x| (-0.05 * x).exp(), 0.0, 1e-10).unwrap();
        assert!((v - 20.0).abs() < 1e-6);
    }

    #[test]
    fn divergence_detected() {
        assert!(integrate_to_infinity(|x| (0.1 * x).exp(), 0.0, 1e-8).is_err());
    }

    #[test]
    fn sharp_peak() {
        let v = integrate(|x| (-1e4 * x).exp(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 1e-4).abs() < 1e-12);
    }
}
