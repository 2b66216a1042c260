//! Two-point local non-determinism of the Volterra process on a grid.
//!
//! `cargo run --release --example local_nondeterminism`

use fgp::hitting::lnd_verify_profile;
use fgp::simulation::SimulationGrid;
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    for p in [VarianceProfile::power(0.3)?, VarianceProfile::power(0.5)?, VarianceProfile::logbm(1.0)?] {
        let t_end = p.domain_max().min(1.0);
        let grid = SimulationGrid::new(0.0, t_end, 256)?;
        let rep = lnd_verify_profile(&p, &grid, 0.1 * t_end, t_end, 0.1 * t_end)?;
        println!(
            "{p}: min Var(X(t)|X(s))/δ² = {:.4} at ({:.3}, {:.3}) over {} pairs, {}",
            rep.min_ratio, rep.argmin.0, rep.argmin.1, rep.pairs, rep.verdict
        );
    }
    Ok(())
}
