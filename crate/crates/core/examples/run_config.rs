//! Driving the experiment runner from code: the same configs `fgp run` reads.
//!
//! `cargo run --release --example run_config`

use fgp::runner::{run_config_file, run_experiment, ExperimentConfig};
use fgp::Result;

const CONFIG: &str = "
[experiment]
id = ternary
kind = construct_set
seed = 1

[construct]
gauge = power
s = 0.6309
depth = 10
";

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("fgp-run-config-example");
    let cfg = ExperimentConfig::from_text(CONFIG, &dir)?;
    let out = run_experiment(&cfg)?;
    for r in &out.rows {
        println!("{:<16} {:.6} ± {:.2e} {} {}", r.quantity, r.value, r.stderr, r.aux1, r.aux2);
    }
    println!("artifacts in {}; config hash {}", out.output.display(), out.manifest.config_hash);

    // a shipped config, with the seed overridden as `fgp --seed 9 run` would do
    let shipped = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/conditions_logbm.conf");
    let (code, res) = run_config_file(&shipped, Some(9));
    println!("conditions_logbm.conf exited with {code}: {} rows", res?.rows.len());
    Ok(())
}
