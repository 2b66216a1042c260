//! Regularity conditions on variance profiles, with the ε-transition for logBm.
//!
//! `cargo run --example conditions`

use fgp::profiles::{ConditionId, ConditionParams, EllKind};
use fgp::{Result, VarianceProfile};

fn main() -> Result<()> {
    let cp = ConditionParams::default();
    let ids = [
        ConditionId::C0,
        ConditionId::C0Plus,
        ConditionId::CEps(0.25),
        ConditionId::CEps(0.75),
        ConditionId::CEll(EllKind::SqrtLog),
        ConditionId::Hyp2,
        ConditionId::Concavity,
    ];
    for p in [VarianceProfile::power(0.5)?, VarianceProfile::logbm(1.0)?, VarianceProfile::stretched_exp(0.5)?] {
        println!("{p}");
        for id in ids {
            let r = p.check_condition(id, &cp)?;
            println!("  {:<24} {:<14} statistic {:>10.4} vs {:.4}", format!("{id:?}"), r.verdict.to_string(), r.statistic, r.threshold);
        }
    }
    // logBm with β = 1 satisfies C_ε only from ε = 1/2 on
    let lb = VarianceProfile::logbm(1.0)?;
    for eps in [0.40, 0.45, 0.50, 0.55, 0.60] {
        println!("logbm β=1, C_{eps:.2}: {}", lb.check_condition(ConditionId::CEps(eps), &cp)?.verdict);
    }
    Ok(())
}
