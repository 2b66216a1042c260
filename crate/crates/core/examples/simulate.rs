//! Path simulation by Volterra convolution, dense Cholesky and truncated KL
//! expansion, with the variance identity and δ-commensurability checks.
//!
//! `cargo run --release --example simulate`

use fgp::simulation::{
    cholesky_simulate, kl_decompose, kl_split_simulate, verify_commensurability, volterra_covariance,
    volterra_simulate, PathEnsemble, SimulationGrid,
};
use fgp::{Result, VarianceProfile};

fn report(name: &str, ens: &PathEnsemble, p: &VarianceProfile) -> Result<()> {
    let j = ens.n_times() - 1;
    let target = p.gamma(ens.grid.time(j))?.powi(2);
    println!("{name:<10} Var X(T) = {:.4} (γ² = {target:.4})", ens.variance_at(j));
    Ok(())
}

fn main() -> Result<()> {
    let p = VarianceProfile::logbm(1.0)?;
    let grid = SimulationGrid::new(0.0, p.domain_max(), 256)?;

    let volterra = volterra_simulate(&p, grid.clone(), 1, 4000, 1)?;
    report("volterra", &volterra, &p)?;
    let c = verify_commensurability(&volterra, &p, None)?;
    println!("           l_hat = {:.3} ({})", c.l_hat, c.verdict);

    let cov = volterra_covariance(&p, &grid)?;
    let chol = cholesky_simulate(&cov, grid.clone(), 1, 4000, 2)?;
    report("cholesky", &chol, &p)?;

    // head + tail of a KL expansion reproduce the truncated process
    let basis = kl_decompose(&cov, &grid, 64)?;
    let (head, tail) = kl_split_simulate(&basis, 8, 1, 4000, 3)?;
    let j = grid.n_times() - 1;
    println!(
        "kl        Var head = {:.4}, Var tail = {:.4}, sum = {:.4}",
        head.variance_at(j),
        tail.variance_at(j),
        head.variance_at(j) + tail.variance_at(j)
    );

    // ensembles round-trip through the binary format bit for bit
    let mut buf = vec![];
    volterra.write_binary(&mut buf)?;
    let back = PathEnsemble::read_binary(buf.as_slice())?;
    assert_eq!(back, volterra);
    println!("binary round trip: {} bytes", buf.len());
    Ok(())
}
