use rand::Rng;
use rand_distr::StandardNormal;

use super::HittingExperiment;
use crate::simulation::stream_rng;

/// Bridge excursions beyond this many `√Δt` per coordinate are ignored
/// (probability `2e^{-2λ²}` per interval).
const LAMBDA: f64 = 4.5;

/// Refinement stops once the bridge envelope is below this fraction of the smallest radius.
const FLOOR: f64 = 0.05;

/// Offsets the bridge streams from the path streams.
const BRIDGE_STREAM: u64 = 1 << 62;

/// Index of the smallest radius bracket containing `v` (radii sorted decreasingly).
fn bracket(radii: &[f64], v: f64) -> usize {
    radii.iter().take_while(|&&r| v <= r).count()
}

/// Minimum distance of a Brownian path to the target over `E`, refined between
/// grid points where the path might come within the largest radius.
pub(super) fn min_distance<'a>(
    exp: &HittingExperiment,
    idx: &[usize],
    pts: &impl Fn(usize) -> &'a [f64],
    trial: u64,
) -> f64 {
    let mut radii = exp.radii.clone();
    radii.sort_by(|a, b| b.total_cmp(a));
    let r_min = radii[radii.len() - 1];
    let d = exp.process.d;
    let g = &exp.process.grid;
    let mut rng = stream_rng(exp.seed, BRIDGE_STREAM + trial);
    let dist = |y: &[f64]| exp.target.distance(y);
    let mut best = f64::INFINITY;
    let vals: Vec<f64> = idx.iter().map(|&j| dist(pts(j))).collect();
    for v in &vals {
        best = best.min(*v);
    }
    // only consecutive grid points inside E are joined by bridges
    for (k, w) in idx.windows(2).enumerate() {
        if w[1] != w[0] + 1 {
            continue;
        }
        let dt = g.time(w[1]) - g.time(w[0]);
        let mut stack = vec![(pts(w[0]).to_vec(), vals[k], pts(w[1]).to_vec(), vals[k + 1], dt)];
        while let Some((x0, d0, x1, d1, dt)) = stack.pop() {
            let chord = x0.iter().zip(&x1).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let envelope = LAMBDA * (dt * d as f64).sqrt();
            let lower = 0.5 * (d0 + d1 - chord) - envelope;
            // no point inside can land in a better bracket than the best so far
            if bracket(&radii, lower) <= bracket(&radii, best) || envelope < FLOOR * r_min {
                continue;
            }
            let s = (0.25 * dt).sqrt();
            let mid: Vec<f64> = x0
                .iter()
                .zip(&x1)
                .map(|(a, b)| 0.5 * (a + b) + s * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let dm = dist(&mid);
            best = best.min(dm);
            stack.push((mid.clone(), dm, x1, d1, 0.5 * dt));
            stack.push((x0, d0, mid, dm, 0.5 * dt));
        }
    }
    best
}
