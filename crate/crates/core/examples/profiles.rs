//! Variance profiles: evaluation, inversion, local indexes and the chaining integral.
//!
//! `cargo run --example profiles`

use fgp::profiles::ModulusLog;
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let profiles = [
        VarianceProfile::power(0.5)?,
        VarianceProfile::power_log(0.7, 0.5)?,
        VarianceProfile::logbm(1.0)?,
        VarianceProfile::stretched_exp(0.5)?,
        VarianceProfile::tabulated(&[(1e-6, 1e-3), (1e-3, 0.03), (0.1, 0.3), (1.0, 1.0)])?,
    ];
    let probes = [1e-2, 1e-3, 1e-4, 1e-5];
    for p in &profiles {
        println!("{p}");
        for x in [1e-1, 1e-3, 1e-6] {
            let g = p.gamma(x)?;
            println!("  γ({x:.0e}) = {g:.5e}   γ⁻¹ back = {:.5e}", p.inverse(g)?);
        }
        let idx = p.estimate_indexes(&probes)?;
        println!("  local index in [{:.3}, {:.3}]", idx.lower_index, idx.upper_index);
        let x = 1e-3;
        println!(
            "  I(x)/γ(x) = {:.3}   Φ(x)/γ(x) = {:.3}",
            p.chaining_integral(x)? / p.gamma(x)?,
            p.modulus_phi_with(x, ModulusLog::IntegrationVariable)? / p.gamma(x)?
        );
        // the record form round-trips through the parser
        let back: VarianceProfile = p.to_string().parse()?;
        assert_eq!(back.to_string(), p.to_string());
    }
    // deep scales stay representable in log form
    let lb = VarianceProfile::logbm(0.75)?;
    println!("logbm β=0.75 at L = 1e6: ln γ = {:.4}", lb.log_gamma(1e6));
    Ok(())
}
