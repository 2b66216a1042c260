//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the verdict lines are always printed.

use std::time::Instant;

use fgp::dimension::{graph_dimension, graph_dimension_with_drift, image_dimension, image_dimension_sampled};
use fgp::hitting::{codimension_sweep, criticality_experiment, small_ball_probability, Process, SmallBallOptions};
use fgp::metric::{covering_number, packing_number, MetricSpec, Points};
use fgp::profiles::{ConditionId, ConditionParams, Verdict};
use fgp::runner::{run_experiment, ExperimentConfig};
use fgp::sets::{build_gauge_cantor, build_undecidable_pair, product_measure, GaugeFunction, GaugeKind, WeightedSet};
use fgp::simulation::{
    stream_rng, verify_commensurability, volterra_simulate, CovarianceFactor, IncrementModel, PathEnsemble,
    SimulationGrid,
};
use fgp::profiles::EllKind;
use fgp::VarianceProfile;
use rand::Rng;

type Check = Result<String, String>;

fn ok_if(cond: bool, detail: String) -> Check {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn variance_z(ens: &PathEnsemble, profile: &VarianceProfile) -> Result<f64, String> {
    let n = (ens.n_paths * ens.d) as f64;
    let mut worst = 0.0f64;
    for j in 1..ens.n_times() {
        let sq: Vec<f64> = (0..ens.n_paths).flat_map(|p| ens.point(p, j).iter().map(|v| v * v).collect::<Vec<_>>()).collect();
        let mean = sq.iter().sum::<f64>() / n;
        let sd = (sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let g2 = profile.gamma(ens.grid.time(j)).map_err(e)?.powi(2);
        worst = worst.max((mean - g2).abs() / (sd / n.sqrt()));
    }
    Ok(worst)
}

fn ensembles() -> Result<Vec<(String, VarianceProfile, PathEnsemble)>, String> {
    let profiles = [
        VarianceProfile::power(0.3),
        VarianceProfile::power(0.5),
        VarianceProfile::power(0.8),
        VarianceProfile::logbm(0.75),
        VarianceProfile::logbm(1.0),
        VarianceProfile::stretched_exp(0.5),
    ];
    profiles
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let p = p.map_err(e)?;
            let grid = SimulationGrid::new(0.0, p.domain_max().min(1.0), 511).map_err(e)?;
            let ens = volterra_simulate(&p, grid, 1, 10_000, 100 + k as u64).map_err(e)?;
            Ok((p.to_string(), p, ens))
        })
        .collect()
}

fn c1(ens: &[(String, VarianceProfile, PathEnsemble)]) -> Check {
    let mut worst = vec![];
    for (name, p, en) in ens {
        let z = variance_z(en, p)?;
        worst.push(format!("{}: {z:.2}", name.split(';').take(2).collect::<Vec<_>>().join(";")));
        if z > 4.0 {
            return Err(format!("max |z| > 4 for {name}: {z:.3}"));
        }
    }
    Ok(format!("max |Var-γ²|/SE per profile [{}]", worst.join(", ")))
}

fn c2(ens: &[(String, VarianceProfile, PathEnsemble)]) -> Check {
    let mut parts = vec![];
    let mut pass = true;
    for (name, p, en) in ens {
        let bound = match p.kind_name() {
            "logbm" => 2.0 * 1.15,
            _ if name.contains("alpha=0.5;") => 1.1,
            _ => continue,
        };
        let c = verify_commensurability(en, p, None).map_err(e)?;
        pass &= c.l_hat <= bound;
        parts.push(format!("{}: l_hat {:.3} ≤ {bound:.2}", p.kind_name(), c.l_hat));
    }
    ok_if(pass, parts.join(", "))
}

fn c3() -> Check {
    let cp = ConditionParams::default();
    let v = |p: &VarianceProfile, id| p.check_condition(id, &cp).map(|r| r.verdict).map_err(e);
    let mut pass = true;
    for a in [0.2, 0.5, 0.8, 1.0] {
        pass &= v(&VarianceProfile::power(a).map_err(e)?, ConditionId::C0)? == Verdict::Holds;
    }
    let lb = VarianceProfile::logbm(1.0).map_err(e)?;
    let c0 = v(&lb, ConditionId::C0)?;
    let below = v(&lb, ConditionId::CEps(0.45))?;
    let at = v(&lb, ConditionId::CEps(0.5))?;
    let above = v(&lb, ConditionId::CEps(0.55))?;
    pass &= c0 == Verdict::Fails && below == Verdict::Fails && at == Verdict::Holds && above == Verdict::Holds;
    let se = VarianceProfile::stretched_exp(0.5).map_err(e)?;
    let plus = v(&se, ConditionId::C0Plus)?;
    let probes: Vec<Verdict> =
        [0.1, 0.25, 0.5, 0.75].iter().map(|x| v(&se, ConditionId::CEps(*x))).collect::<Result<_, _>>()?;
    pass &= plus == Verdict::Holds && probes.iter().all(|x| *x == Verdict::Holds);
    ok_if(
        pass,
        format!("power C0 holds; logbm C0 {c0}, C_0.45 {below}, C_0.5 {at}, C_0.55 {above}; stretched C0+ {plus} {probes:?}"),
    )
}

fn fbm(h: f64, d: usize, paths: usize, seed: u64) -> Result<(VarianceProfile, PathEnsemble, WeightedSet), String> {
    let p = VarianceProfile::power(h).map_err(e)?;
    let grid = SimulationGrid::new(0.0, 1.0, 4096).map_err(e)?;
    let ens = volterra_simulate(&p, grid.clone(), d, paths, seed).map_err(e)?;
    let set = WeightedSet::on_times(&grid.times()[410..], MetricSpec::Euclidean).map_err(e)?;
    Ok((p, ens, set))
}

fn c4() -> Check {
    let (_, ens, set) = fbm(0.8, 2, 200, 41)?;
    let a = image_dimension(&ens, &set).map_err(e)?;
    let (_, ens, set) = fbm(0.3, 1, 200, 42)?;
    let b = image_dimension(&ens, &set).map_err(e)?;
    ok_if(
        (a.value - 1.25).abs() <= 0.15 && (b.value - 1.0).abs() <= 0.1,
        format!("H=0.8 d=2: {:.3} ± {:.3}; H=0.3 d=1: {:.3} ± {:.3}", a.value, a.stderr, b.value, b.stderr),
    )
}

fn c5() -> Check {
    let (p, ens, set) = fbm(0.8, 2, 200, 41)?;
    let g = graph_dimension(&ens, &set, &p).map_err(e)?;
    // a linear drift: |t - s| ≤ |t - s|^0.8 = δ(s, t) on [0, 1]
    let drift = |t: f64| t;
    let gd = graph_dimension_with_drift(&ens, &set, &p, &drift).map_err(e)?;
    let shift = (gd.value - g.value).abs();
    ok_if(
        (g.value - 1.25).abs() <= 0.15 && shift < 2.0 * g.stderr,
        format!("graph {:.3} ± {:.3}; with drift {:.3} (shift {shift:.4})", g.value, g.stderr, gd.value),
    )
}

/// The δ-regular Cantor time set with `dim_δ = 1/2` for logBm, `β = 1`.
fn logbm_cantor() -> Result<(VarianceProfile, CovarianceFactor), String> {
    let p = VarianceProfile::logbm(1.0).map_err(e)?;
    let g = GaugeFunction::new(GaugeKind::ProfilePower { profile: p.clone(), s: 0.5 }).map_err(e)?;
    let set = build_gauge_cantor(&g, 9, MetricSpec::gamma_delta(p.clone()), (0.5, 0.54)).map_err(e)?;
    let cov = IncrementModel::new(&p, 0.0).and_then(|m| m.covariance_on(&set)).map_err(e)?;
    Ok((p, CovarianceFactor::new(&cov).map_err(e)?))
}

fn c6(f: &CovarianceFactor) -> Check {
    let est = image_dimension_sampled(f, 1, 40, 3).map_err(e)?;
    ok_if((0.35..=1.15).contains(&est.value), format!("image {:.3} ± {:.3} in [0.35, 1.15]", est.value, est.stderr))
}

fn c7() -> Check {
    let bm = VarianceProfile::power(0.5).map_err(e)?;
    let radii: Vec<f64> = (3..=6).map(|k| 0.5f64.powi(k)).collect();
    let a = small_ball_probability(&bm, 0.5, &[0.0, 0.0], &radii, 100_000, 71, SmallBallOptions::default()).map_err(e)?;
    let lb = VarianceProfile::logbm(1.0).map_err(e)?;
    let radii: Vec<f64> = (0..6).map(|k| 0.5 * 0.75f64.powi(k)).collect();
    let b = small_ball_probability(&lb, 0.25, &[0.0], &radii, 10_000, 72, SmallBallOptions::default()).map_err(e)?;
    let (sa, sea) = a.hits.exponent.ok_or("no BM slope")?;
    let (sb, seb) = b.hits.exponent.ok_or("no logbm slope")?;
    ok_if(
        (sa - 2.0).abs() <= 0.2 && (sb - 0.5).abs() <= 0.15,
        format!("fBm H=0.5 d=2 slope {sa:.3} ± {sea:.3}; logbm β=1 slope {sb:.3} ± {seb:.3}"),
    )
}

fn c8() -> Check {
    let grid = SimulationGrid::new(0.0, 1.0, 1024).map_err(e)?;
    let proc_ = Process::new(VarianceProfile::power(0.5).map_err(e)?, 3, grid.clone()).map_err(e)?;
    let set = WeightedSet::on_times(&grid.times()[103..], MetricSpec::Euclidean).map_err(e)?;
    let radii: Vec<f64> = (0..5).map(|k| 0.1 * 0.1f64.powf(k as f64 / 4.0)).collect();
    let x0 = [1.0, 0.0, 0.0];
    let rep = codimension_sweep(&proc_, &set, &x0, &radii, 100_000, 81).map_err(e)?;
    // hitting the ball at any time has probability exactly r/|x0|
    let below_oracle = rep.hits.series.iter().all(|p| p.lo <= p.r);
    ok_if(
        (rep.slope - 1.0).abs() <= 0.1 && (rep.predicted - 1.0).abs() <= 0.1 && below_oracle,
        format!(
            "slope {:.3} ± {:.3}; oracle r/|x0| slope 1, frequencies below it: {below_oracle}; d - dim(E) = {:.3}",
            rep.slope, rep.stderr, rep.predicted
        ),
    )
}

fn c9() -> Check {
    let grid = SimulationGrid::new(0.0, 1.0, 1024).map_err(e)?;
    let proc_ = Process::new(VarianceProfile::power(0.5).map_err(e)?, 3, grid.clone()).map_err(e)?;
    let set = WeightedSet::on_times(&grid.times()[103..], MetricSpec::Euclidean).map_err(e)?;
    let pair = build_undecidable_pair(3, 2.0, 2.0, EllKind::SqrtLog, (-0.25, 0.25), 8).map_err(e)?;
    let radii: Vec<f64> = (0..4).map(|k| 0.02 * 0.25f64.powi(k)).collect();
    let rep = criticality_experiment(&proc_, &set, &pair, &radii, 10_000, 9).map_err(e)?;
    let f1: Vec<String> = rep.f1.series.iter().map(|p| format!("{:.4}", p.freq)).collect();
    let f2: Vec<String> = rep.f2.series.iter().map(|p| format!("{:.4}", p.freq)).collect();
    ok_if(
        rep.f2_bounded && rep.f1_decreasing,
        format!(
            "F2 [{}] min/max {:.3}; F1 [{}] max step {:.3}",
            f2.join(" "),
            rep.f2_floor_ratio,
            f1.join(" "),
            rep.f1_max_step
        ),
    )
}

fn c10() -> Check {
    let dir = tempfile::tempdir().map_err(e)?;
    let text = format!(
        "[experiment]\nkind = construct_set\nid = ternary\n[construct]\ngauge = power\ns = {}\ndepth = 12\nc_bound = 8\n",
        2f64.ln() / 3f64.ln()
    );
    let cfg = ExperimentConfig::from_text(&text, dir.path()).map_err(e)?;
    let out = run_experiment(&cfg).map_err(e)?;
    let get = |q: &str| out.rows.iter().find(|r| r.quantity == q).cloned().ok_or(format!("missing {q}"));
    let dim = get("box_dimension")?;
    let reg = get("regularity_c")?;
    ok_if(
        (dim.value - 0.6309).abs() <= 0.05 && reg.aux2 == "holds",
        format!("box dimension {:.4} (ternary 0.6309); ball-mass ratio bound c = {:.3} ≤ 8", dim.value, reg.value),
    )
}

fn c11() -> Check {
    let mut failures = vec![];
    // metric axioms on 10^4 triples
    let m = MetricSpec::product(MetricSpec::gamma_delta(VarianceProfile::logbm(1.0).map_err(e)?), 2).map_err(e)?;
    let mut rng = stream_rng(5, 0);
    for _ in 0..10_000 {
        let p: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gen_range(0.0..0.5), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let d = |i: usize, j: usize| m.distance_unchecked(&p[i], &p[j]);
        if d(0, 1) != d(1, 0) || d(0, 2) > d(0, 1) + d(1, 2) + 1e-12 || d(0, 0) != 0.0 {
            failures.push("metric axioms");
            break;
        }
    }
    // exact mass conservation
    let g = GaugeFunction::power(0.5).map_err(e)?;
    let cantor = build_gauge_cantor(&g, 10, MetricSpec::Euclidean, (0.0, 1.0)).map_err(e)?;
    if cantor.masses().iter().sum::<f64>() != 1.0 {
        failures.push("mass conservation");
    }
    let small = build_gauge_cantor(&g, 8, MetricSpec::Euclidean, (0.0, 1.0)).map_err(e)?;
    let prod = product_measure(&[small.clone(), small]).map_err(e)?;
    if prod.masses().iter().sum::<f64>() != 1.0 {
        failures.push("product mass");
    }
    // N(2r) ≤ P(r)
    let pts = Points::new(2, (0..1000).map(|_| rng.gen_range(0.0..1.0)).collect()).map_err(e)?;
    for r in [0.01, 0.03, 0.1] {
        if covering_number(&pts, &MetricSpec::Euclidean, 2.0 * r).map_err(e)? > packing_number(&pts, &MetricSpec::Euclidean, r).map_err(e)? {
            failures.push("covering/packing");
        }
    }
    // image ≤ graph
    let (p, ens, set) = fbm(0.6, 2, 10, 110)?;
    let (im, gr) = (image_dimension(&ens, &set).map_err(e)?, graph_dimension(&ens, &set, &p).map_err(e)?);
    if im.value > gr.value + 0.1 {
        failures.push("projection");
    }
    // energy grows with β
    let en = fgp::dimension::energies(&cantor, &[0.1, 0.3, 0.5, 0.7]).map_err(e)?;
    if en.windows(2).any(|w| w[1].value < w[0].value) {
        failures.push("energy monotonicity");
    }
    // byte identity across worker counts
    let draw = |k: usize| -> Result<Vec<u8>, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().map_err(e)?;
        let ens = pool.install(|| volterra_simulate(&p, ens.grid.clone(), 2, 32, 7)).map_err(e)?;
        let mut b = vec![];
        ens.write_binary(&mut b).map_err(e)?;
        Ok(b)
    };
    if draw(1)? != draw(3)? {
        failures.push("thread identity");
    }
    ok_if(
        failures.is_empty(),
        if failures.is_empty() {
            "metric axioms, mass, N(2r) ≤ P(r), image ≤ graph, energy order, thread identity".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn c12(f: &CovarianceFactor) -> Check {
    let runs: Vec<_> =
        (0..50).map(|s| image_dimension_sampled(f, 1, 10, 1000 + s)).collect::<Result<_, _>>().map_err(e)?;
    let vals: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let single = runs[0].stderr;
    ok_if(sd <= 2.0 * single, format!("SD over 50 seeds {sd:.4} vs single-run stderr {single:.4} (mean {mean:.3})"))
}

fn main() {
    let t0 = Instant::now();
    let mut failed = 0;
    let mut report = |n: u32, name: &str, res: Check, t: Instant| {
        let (tag, detail) = match res {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    };

    let t = Instant::now();
    match ensembles() {
        Ok(ens) => {
            report(1, "variance identity", c1(&ens), t);
            let t = Instant::now();
            report(2, "commensurability", c2(&ens), t);
        }
        Err(err) => {
            report(1, "variance identity", Err(err.clone()), t);
            report(2, "commensurability", Err(err), t);
        }
    }
    let t = Instant::now();
    report(3, "condition table", c3(), t);
    let t = Instant::now();
    report(4, "image dimension", c4(), t);
    let t = Instant::now();
    report(5, "graph dimension and drift", c5(), t);
    let t = Instant::now();
    match logbm_cantor() {
        Ok((_, f)) => {
            report(6, "logBm sandwich", c6(&f), t);
            let t = Instant::now();
            report(12, "zero-one concentration", c12(&f), t);
        }
        Err(err) => {
            report(6, "logBm sandwich", Err(err.clone()), t);
            report(12, "zero-one concentration", Err(err), t);
        }
    }
    let t = Instant::now();
    report(7, "small-ball slopes", c7(), t);
    let t = Instant::now();
    report(8, "codimension", c8(), t);
    let t = Instant::now();
    report(9, "criticality", c9(), t);
    let t = Instant::now();
    report(10, "Cantor constructor", c10(), t);
    let t = Instant::now();
    report(11, "property suites", c11(), t);
    println!("acceptance: {} failed, total {:.1}s", failed, t0.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
