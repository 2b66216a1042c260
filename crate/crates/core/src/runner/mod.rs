//! Config-driven experiments: one config file in, `results.csv`, `manifest.txt`
//! and plot-data files out.
//!
//! Everything in the config is parsed and validated before any computation runs.
//! A failed run leaves no files behind.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};

pub use config::ConfigFile;
use config::{usize_of, usize_or};
pub use output::{emit_plotdata, fmt17, render_results, PlotSeries, ResultRow, RunManifest, RESULTS_HEADER};
use output::Staging;

use crate::dimension::{box_dimension, geometric_radii, graph_dimension, image_dimension, DimensionEstimate, TRIM};
use crate::error::{Error, Result};
use crate::hitting::{
    codimension_sweep, criticality_experiment, hitting_probability, HitReport, HittingExperiment, Process, Target,
    DECAY_STEP, FLOOR_RATIO,
};
use crate::metric::MetricSpec;
use crate::profiles::{ConditionId, ConditionParams, EllKind, Verdict};
use crate::sets::{
    build_gauge_cantor, build_undecidable_pair, verify_ahlfors_regularity, GaugeFunction, GaugeKind, RegularityScale,
    WeightedSet,
};
use crate::simulation::{cholesky_simulate, verify_commensurability, volterra_covariance, volterra_simulate, PathEnsemble, SimulationGrid};
use crate::text::{fmt_f64, Record};
use crate::VarianceProfile;

/// Exit statuses of the command-line runner.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    CheckConditions,
    DimImage,
    DimGraph,
    HitProb,
    CodimSweep,
    ConstructSet,
    Criticality,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::Simulate,
        Self::CheckConditions,
        Self::DimImage,
        Self::DimGraph,
        Self::HitProb,
        Self::CodimSweep,
        Self::ConstructSet,
        Self::Criticality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::CheckConditions => "check_conditions",
            Self::DimImage => "dim_image",
            Self::DimGraph => "dim_graph",
            Self::HitProb => "hit_prob",
            Self::CodimSweep => "codim_sweep",
            Self::ConstructSet => "construct_set",
            Self::Criticality => "criticality",
        }
    }

    /// Sections each kind reads; anything else in the file is rejected.
    fn sections(self) -> &'static [&'static str] {
        match self {
            Self::Simulate => &["experiment", "profile", "grid", "process"],
            Self::CheckConditions => &["experiment", "profile", "conditions"],
            Self::DimImage | Self::DimGraph => &["experiment", "profile", "grid", "process", "time_set"],
            Self::HitProb => &["experiment", "profile", "grid", "process", "time_set", "target", "hitting"],
            Self::CodimSweep => &["experiment", "profile", "grid", "process", "time_set", "target", "hitting"],
            Self::ConstructSet => &["experiment", "profile", "construct"],
            Self::Criticality => &["experiment", "profile", "grid", "process", "time_set", "pair", "hitting"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMethod {
    Volterra,
    Cholesky,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub d: usize,
    pub paths: usize,
    pub method: SimMethod,
}

/// Grid times in `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSetSpec {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Point(Vec<f64>),
    Ball { center: Vec<f64>, radius: f64 },
}

impl TargetSpec {
    fn center(&self) -> &[f64] {
        match self {
            TargetSpec::Point(c) | TargetSpec::Ball { center: c, .. } => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitSpec {
    pub trials: u64,
    /// Decreasing.
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckKind {
    C0,
    CEps,
    C0Plus,
    CEll(EllKind),
    Hyp2,
    Concavity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionsSpec {
    pub checks: Vec<CheckKind>,
    pub eps: Vec<f64>,
    pub params: ConditionParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructSpec {
    pub gauge: GaugeFunction,
    pub depth: u32,
    pub ambient: (f64, f64),
    pub metric: MetricSpec,
    /// Ball-mass check against `r^s` for power gauges, against the gauge otherwise.
    pub scale: RegularityScale,
    pub c_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec {
    pub d: usize,
    pub alpha: f64,
    pub theta: f64,
    pub ell: EllKind,
    pub ambient: (f64, f64),
    pub depth: u32,
}

/// A fully validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output: PathBuf,
    pub profile: Option<VarianceProfile>,
    pub grid: Option<SimulationGrid>,
    pub process: Option<ProcessSpec>,
    pub time_set: Option<TimeSetSpec>,
    pub target: Option<TargetSpec>,
    pub hitting: Option<HitSpec>,
    pub conditions: Option<ConditionsSpec>,
    pub construct: Option<ConstructSpec>,
    pub pair: Option<PairSpec>,
    /// Hex SHA-256 of the config text.
    pub config_hash: String,
}

fn need<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Parse(format!("missing [{what}] section")))
}

fn section_err(name: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("[{name}] {m}")),
        other => other,
    }
}

fn parse_ell(s: &str) -> Result<EllKind> {
    match s {
        "bounded" => Ok(EllKind::Bounded),
        "sqrt_log" => Ok(EllKind::SqrtLog),
        _ => match s.strip_prefix("log_power:") {
            Some(p) => Ok(EllKind::LogPower(crate::text::parse_f64(p, "ell")?)),
            None => Err(Error::Parse(format!("unknown ell '{s}' (bounded, sqrt_log, log_power:p)"))),
        },
    }
}

fn parse_radii(r: &Record) -> Result<Vec<f64>> {
    let mut radii = match r.get("radii") {
        Some(_) => r.list("radii")?,
        None => {
            let n = usize_of(r, "n_radii")?;
            if n < 2 {
                return Err(Error::Argument("n_radii must be at least 2".into()));
            }
            geometric_radii(r.f64("r_min")?, r.f64("r_max")?, n)?
        }
    };
    if radii.is_empty() || radii.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Argument("radii must be positive and finite".into()));
    }
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    Ok(radii)
}

impl ExperimentConfig {
    /// Parses and validates `text`; relative output paths resolve against `base_dir`.
    pub fn from_text(text: &str, base_dir: &Path) -> Result<Self> {
        let file = ConfigFile::parse(text)?;
        let exp = file.section("experiment").ok_or_else(|| Error::Parse("missing [experiment] section".into()))?;
        exp.only(&["id", "kind", "seed", "output"]).map_err(section_err("experiment"))?;
        let kind: ExperimentKind = exp.str("kind").map_err(section_err("experiment"))?.parse()?;
        if let Some(extra) = file.names().find(|n| !kind.sections().contains(n)) {
            return Err(Error::Parse(format!("section [{extra}] is not used by kind {kind}")));
        }
        let id = exp.get("id").unwrap_or(kind.name()).to_string();
        if id.is_empty() || id.contains(|c: char| c == ',' || c.is_control()) {
            return Err(Error::Parse(format!("experiment id '{id}' must be non-empty without commas")));
        }
        let seed = match exp.get("seed") {
            Some(s) => s.parse::<u64>().map_err(|_| Error::Parse(format!("seed '{s}' is not a u64")))?,
            None => 0,
        };
        let output = base_dir.join(exp.get("output").map(str::to_string).unwrap_or_else(|| format!("out/{id}")));

        let profile = file
            .section("profile")
            .map(|r| VarianceProfile::from_record(r).map_err(section_err("profile")))
            .transpose()?;
        let grid = file
            .section("grid")
            .map(|r| -> Result<SimulationGrid> {
                r.only(&["t_start", "t_end", "steps"])?;
                SimulationGrid::new(r.f64_or("t_start", 0.0)?, r.f64_or("t_end", 1.0)?, usize_of(r, "steps")?)
            })
            .transpose()
            .map_err(section_err("grid"))?;
        let process = file
            .section("process")
            .map(|r| -> Result<ProcessSpec> {
                r.only(&["d", "paths", "method"])?;
                let d = usize_or(r, "d", 1)?;
                let paths = usize_or(r, "paths", 1)?;
                if d == 0 || paths == 0 {
                    return Err(Error::Argument("d and paths must be positive".into()));
                }
                let method = match r.get("method").unwrap_or("volterra") {
                    "volterra" => SimMethod::Volterra,
                    "cholesky" => SimMethod::Cholesky,
                    m => return Err(Error::Parse(format!("unknown method '{m}'"))),
                };
                Ok(ProcessSpec { d, paths, method })
            })
            .transpose()
            .map_err(section_err("process"))?;
        let time_set = file
            .section("time_set")
            .map(|r| -> Result<TimeSetSpec> {
                r.only(&["a", "b"])?;
                let (a, b) = (r.f64("a")?, r.f64("b")?);
                if !(a < b) {
                    return Err(Error::Argument(format!("time set needs a < b, got [{a}, {b}]")));
                }
                Ok(TimeSetSpec { a, b })
            })
            .transpose()
            .map_err(section_err("time_set"))?;
        let target = file
            .section("target")
            .map(|r| -> Result<TargetSpec> {
                r.only(&["kind", "center", "radius"])?;
                let center = r.list("center")?;
                match r.get("kind").unwrap_or("point") {
                    "point" => Ok(TargetSpec::Point(center)),
                    "ball" => {
                        let radius = r.f64("radius")?;
                        if !(radius >= 0.0) {
                            return Err(Error::Argument("ball radius must be non-negative".into()));
                        }
                        Ok(TargetSpec::Ball { center, radius })
                    }
                    k => Err(Error::Parse(format!("unknown target kind '{k}'"))),
                }
            })
            .transpose()
            .map_err(section_err("target"))?;
        let hitting = file
            .section("hitting")
            .map(|r| -> Result<HitSpec> {
                r.only(&["trials", "radii", "r_min", "r_max", "n_radii"])?;
                let trials = usize_of(r, "trials")? as u64;
                if trials == 0 {
                    return Err(Error::Argument("trials must be positive".into()));
                }
                Ok(HitSpec { trials, radii: parse_radii(r)? })
            })
            .transpose()
            .map_err(section_err("hitting"))?;
        let conditions = file
            .section("conditions")
            .map(|r| -> Result<ConditionsSpec> {
                r.only(&["checks", "eps", "ell", "tol", "slack", "hyp2_a", "hyp2_b"])?;
                let ell = parse_ell(r.get("ell").unwrap_or("sqrt_log"))?;
                let checks = r
                    .get("checks")
                    .unwrap_or("c0, c_eps, c0_plus, concavity")
                    .split(',')
                    .map(str::trim)
                    .map(|c| match c {
                        "c0" => Ok(CheckKind::C0),
                        "c_eps" => Ok(CheckKind::CEps),
                        "c0_plus" => Ok(CheckKind::C0Plus),
                        "c_ell" => Ok(CheckKind::CEll(ell)),
                        "hyp2" => Ok(CheckKind::Hyp2),
                        "concavity" => Ok(CheckKind::Concavity),
                        other => Err(Error::Parse(format!("unknown check '{other}'"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let eps = match r.get("eps") {
                    Some(_) => r.list("eps")?,
                    None => vec![0.25, 0.5, 0.75],
                };
                if eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                    return Err(Error::Argument("eps values must lie in (0, 1)".into()));
                }
                let mut params = ConditionParams::default();
                params.tol = r.f64_or("tol", params.tol)?;
                params.slack = r.f64_or("slack", params.slack)?;
                params.hyp2_a = r.opt_f64("hyp2_a")?;
                params.hyp2_b = r.opt_f64("hyp2_b")?;
                Ok(ConditionsSpec { checks, eps, params })
            })
            .transpose()
            .map_err(section_err("conditions"))?;
        let construct = file
            .section("construct")
            .map(|r| parse_construct(r, profile.as_ref()))
            .transpose()
            .map_err(section_err("construct"))?;
        let pair = file
            .section("pair")
            .map(|r| -> Result<PairSpec> {
                r.only(&["d", "alpha", "theta", "ell", "a", "b", "depth"])?;
                let d = usize_of(r, "d")?;
                let alpha = r.f64("alpha")?;
                let theta = r.f64("theta")?;
                if d == 0 || !(alpha > 0.0 && alpha < d as f64) || !(theta > 1.0) {
                    return Err(Error::Argument("pair needs 0 < alpha < d and theta > 1".into()));
                }
                let ambient = (r.f64_or("a", -0.25)?, r.f64_or("b", 0.25)?);
                if !(ambient.0 < ambient.1) {
                    return Err(Error::Argument("pair ambient needs a < b".into()));
                }
                Ok(PairSpec {
                    d,
                    alpha,
                    theta,
                    ell: parse_ell(r.get("ell").unwrap_or("sqrt_log"))?,
                    ambient,
                    depth: usize_or(r, "depth", 8)? as u32,
                })
            })
            .transpose()
            .map_err(section_err("pair"))?;

        let cfg = Self {
            id,
            kind,
            seed,
            output,
            profile,
            grid,
            process,
            time_set,
            target,
            hitting,
            conditions,
            construct,
            pair,
            config_hash: format!("{:x}", Sha256::digest(text.as_bytes())),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Argument(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Cross-section checks that need no computation.
    fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if self.kind != ConstructSet {
            need(&self.profile, "profile")?;
        }
        if matches!(self.kind, Simulate | DimImage | DimGraph | HitProb | CodimSweep | Criticality) {
            let grid = need(&self.grid, "grid")?;
            grid.check_profile(need(&self.profile, "profile")?)?;
            let proc_ = need(&self.process, "process")?;
            if matches!(self.kind, DimImage | DimGraph) && proc_.paths < 2 {
                return Err(Error::Argument("dimension estimates need at least 2 paths".into()));
            }
        }
        if matches!(self.kind, DimImage | DimGraph | HitProb | CodimSweep | Criticality) {
            let ts = need(&self.time_set, "time_set")?;
            let grid = need(&self.grid, "grid")?;
            if ts.a < grid.t_start() || ts.b > grid.t_end() {
                return Err(Error::Argument("time set must lie inside the grid".into()));
            }
            let n = grid.times().iter().filter(|t| **t >= ts.a && **t <= ts.b).count();
            if n < 2 {
                return Err(Error::Argument("time set contains fewer than 2 grid times".into()));
            }
        }
        let d = self.process.as_ref().map(|p| p.d);
        match self.kind {
            HitProb | CodimSweep => {
                let t = need(&self.target, "target")?;
                need(&self.hitting, "hitting")?;
                if Some(t.center().len()) != d {
                    return Err(Error::Argument("target dimension must equal process d".into()));
                }
                if self.kind == CodimSweep && !matches!(t, TargetSpec::Point(_)) {
                    return Err(Error::Argument("codim_sweep takes a point target".into()));
                }
            }
            Criticality => {
                let p = need(&self.pair, "pair")?;
                need(&self.hitting, "hitting")?;
                if Some(p.d) != d {
                    return Err(Error::Argument("pair dimension must equal process d".into()));
                }
            }
            CheckConditions => {
                need(&self.conditions, "conditions")?;
            }
            ConstructSet => {
                need(&self.construct, "construct")?;
            }
            _ => {}
        }
        Ok(())
    }

    fn time_set(&self) -> Result<WeightedSet> {
        let ts = need(&self.time_set, "time_set")?;
        let times: Vec<f64> =
            need(&self.grid, "grid")?.times().into_iter().filter(|t| *t >= ts.a && *t <= ts.b).collect();
        WeightedSet::on_times(&times, MetricSpec::Euclidean)
    }

    fn process(&self) -> Result<Process> {
        Process::new(need(&self.profile, "profile")?.clone(), need(&self.process, "process")?.d, need(&self.grid, "grid")?.clone())
    }
}

fn parse_construct(r: &Record, profile: Option<&VarianceProfile>) -> Result<ConstructSpec> {
    r.only(&["gauge", "s", "d", "alpha", "theta", "ell", "root", "depth", "a", "b", "metric", "c_bound"])?;
    let ell = || parse_ell(r.get("ell").unwrap_or("sqrt_log"));
    let kind = match r.str("gauge")? {
        "power" => GaugeKind::Power(r.f64("s")?),
        "profile_power" => GaugeKind::ProfilePower {
            profile: profile.cloned().ok_or_else(|| Error::Parse("profile_power needs a [profile] section".into()))?,
            s: r.f64("s")?,
        },
        "phi_d_ell" => GaugeKind::PhiDEll { d: r.f64("d")?, ell: ell()? },
        "pseudo_plus" => GaugeKind::PseudoPlus { d: r.f64("d")?, alpha: r.f64("alpha")?, theta: r.f64("theta")?, ell: ell()? },
        "pseudo_minus" => GaugeKind::PseudoMinus { d: r.f64("d")?, alpha: r.f64("alpha")?, theta: r.f64("theta")? },
        g => return Err(Error::Parse(format!("unknown gauge '{g}'"))),
    };
    let is_power = matches!(kind, GaugeKind::Power(_));
    let mut gauge = GaugeFunction::new(kind)?;
    if let Some(k) = r.get("root") {
        let k = k.parse::<usize>().map_err(|_| Error::Parse(format!("root '{k}' is not an integer")))?;
        gauge = gauge.root(k)?;
    }
    if !is_power {
        gauge = gauge.auto_scaled(0.5, 2000.0)?;
    }
    let ambient = (r.f64_or("a", 0.0)?, r.f64_or("b", 1.0)?);
    if !(ambient.0 < ambient.1) {
        return Err(Error::Argument("construct ambient needs a < b".into()));
    }
    let metric = match r.get("metric").unwrap_or("euclidean") {
        "euclidean" => MetricSpec::Euclidean,
        "gamma_delta" => MetricSpec::GammaDelta(
            profile.cloned().ok_or_else(|| Error::Parse("gamma_delta metric needs a [profile] section".into()))?,
        ),
        m => return Err(Error::Parse(format!("unknown metric '{m}'"))),
    };
    let scale = match (&gauge.kind, gauge.scale == 1.0 && gauge.power == 1.0) {
        (GaugeKind::Power(s), true) => RegularityScale::Alpha(*s),
        _ => RegularityScale::Gauge(gauge.clone()),
    };
    let c_bound = r.f64_or("c_bound", 8.0)?;
    if !(c_bound > 1.0) {
        return Err(Error::Argument("c_bound must exceed 1".into()));
    }
    let depth = usize_or(r, "depth", 12)? as u32;
    // cheap enough to run here, and catches gauges that cannot be built
    build_gauge_cantor(&gauge, depth.min(2), metric.clone(), ambient)?;
    Ok(ConstructSpec { gauge, depth, ambient, metric, scale, c_bound })
}

/// What a pipeline hands back before anything is written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub plots: Vec<(String, PlotSeries)>,
    pub tolerances: Vec<(String, String)>,
    pub provenance: Vec<(String, String)>,
    /// Extra artifacts written through a callback once the output directory exists.
    pub ensemble: Option<PathEnsemble>,
    pub set: Option<WeightedSet>,
}

/// Files and numbers of a finished run.
#[derive(Debug)]
pub struct RunSummary {
    pub output: PathBuf,
    pub rows: Vec<ResultRow>,
    pub manifest: RunManifest,
}

/// Runs a validated experiment and writes its artifacts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let outcome = compute(cfg)?;
    let mut staging = Staging::open(&cfg.output)?;
    let mut files = vec![];
    for (name, series) in &outcome.plots {
        emit_plotdata(series, staging.path(name))?;
        files.push(name.clone());
    }
    if let Some(ens) = &outcome.ensemble {
        ens.save_binary(staging.path("paths.bin"))?;
        files.push("paths.bin".into());
    }
    if let Some(set) = &outcome.set {
        set.save_csv(staging.path("set.csv"))?;
        files.push("set.csv".into());
    }
    files.push("results.csv".into());
    let manifest = RunManifest {
        config_hash: cfg.config_hash.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment_id: cfg.id.clone(),
        kind: cfg.kind.name().to_string(),
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        tolerances: outcome.tolerances,
        provenance: outcome.provenance,
        files,
    };
    std::fs::write(staging.path("manifest.txt"), manifest.render())?;
    let results = render_results(&cfg.id, cfg.kind.name(), cfg.seed, &outcome.rows);
    let tmp = staging.path("results.csv.tmp");
    std::fs::write(&tmp, results)?;
    let fin = staging.path("results.csv");
    std::fs::rename(&tmp, &fin)?;
    staging.commit();
    Ok(RunSummary { output: cfg.output.clone(), rows: outcome.rows, manifest })
}

/// Reads, validates and runs a config file; returns the process exit status.
pub fn run_config_file(path: &Path, seed: Option<u64>) -> (i32, Result<RunSummary>) {
    let cfg = match ExperimentConfig::from_file(path) {
        Ok(mut c) => {
            if let Some(s) = seed {
                c.seed = s;
            }
            c
        }
        Err(e) => return (EXIT_VALIDATION, Err(e)),
    };
    match run_experiment(&cfg) {
        Ok(s) => (EXIT_OK, Ok(s)),
        Err(e) => (exit_code(&e), Err(e)),
    }
}

/// Bad inputs map to 2, everything that went wrong while computing to 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Argument(_) | Error::Domain(_) | Error::Range(_) | Error::Gauge(_) => {
            EXIT_VALIDATION
        }
        _ => EXIT_NUMERICAL,
    }
}

/// Built-in variance profiles and their parameter constraints.
pub fn list_profiles() -> String {
    [
        "power (alpha in (0,1]): gamma(x) = x^alpha; alpha = 1/2 is Brownian motion",
        "logbm (beta>0.5): gamma(x) = log^(-beta)(1/x) on (0, domain_max]",
        "stretched_exp (q in (0,1)): gamma(x) = exp(-log^q(1/x))",
        "power_log (alpha in (0,1], beta_log real): gamma(x) = x^alpha log^(beta_log)(1/x)",
        "custom_tabulated (x and gamma lists, increasing, gamma(0+) = 0): log-log interpolation",
        "common keys: domain_max (default per kind), l (commensurability factor, default per kind)",
    ]
    .join("\n")
        + "\n"
}

fn compute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.kind {
        ExperimentKind::Simulate => run_simulate(cfg),
        ExperimentKind::CheckConditions => run_conditions(cfg),
        ExperimentKind::DimImage | ExperimentKind::DimGraph => run_dimension(cfg),
        ExperimentKind::HitProb => run_hit(cfg),
        ExperimentKind::CodimSweep => run_codim(cfg),
        ExperimentKind::ConstructSet => run_construct(cfg),
        ExperimentKind::Criticality => run_criticality(cfg),
    }
}

fn ensemble(cfg: &ExperimentConfig) -> Result<PathEnsemble> {
    let profile = need(&cfg.profile, "profile")?;
    let grid = need(&cfg.grid, "grid")?.clone();
    let p = need(&cfg.process, "process")?;
    match p.method {
        SimMethod::Volterra => volterra_simulate(profile, grid, p.d, p.paths, cfg.seed),
        SimMethod::Cholesky => {
            let cov = volterra_covariance(profile, &grid)?;
            cholesky_simulate(&cov, grid, p.d, p.paths, cfg.seed)
        }
    }
}

fn run_simulate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = need(&cfg.profile, "profile")?;
    let ens = ensemble(cfg)?;
    let n = (ens.n_paths * ens.d) as f64;
    let mut plot = vec![];
    let (mut z_max, mut z_arg) = (0.0f64, 0.0);
    for j in 0..ens.n_times() {
        let t = ens.grid.time(j);
        let sq: Vec<f64> =
            (0..ens.n_paths).flat_map(|p| ens.point(p, j).iter().map(|v| v * v).collect::<Vec<_>>()).collect();
        let mean = sq.iter().sum::<f64>() / n;
        let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let se = (var / n).sqrt();
        let g2 = if t > 0.0 { profile.gamma(t)?.powi(2) } else { 0.0 };
        if se > 0.0 {
            let z = (mean - g2).abs() / se;
            if z > z_max {
                z_max = z;
                z_arg = t;
            }
        }
        plot.push(vec![t, mean, g2, se]);
    }
    let last = plot.last().cloned().unwrap_or_default();
    let mut rows = vec![
        ResultRow::new("variance_t_end", last[1], last[3]).aux(fmt17(last[2]), fmt17(last[0])),
        ResultRow::new("variance_max_z", z_max, f64::NAN).aux(fmt17(z_arg), ""),
    ];
    let mut tolerances = vec![];
    if ens.n_paths >= 100 {
        let c = verify_commensurability(&ens, profile, None)?;
        rows.push(ResultRow::new("l_hat", c.l_hat, f64::NAN).aux(fmt17(profile.l_factor()), c.verdict.to_string()));
        tolerances.push(("commensurability_tol".into(), fmt17(c.tol)));
    }
    Ok(Outcome {
        rows,
        plots: vec![("variance.dat".into(), PlotSeries::new(&["t", "var_hat", "gamma2", "se"], plot))],
        tolerances,
        provenance: vec![("variance".into(), format!("method={:?}; profile={profile}", need(&cfg.process, "process")?.method))],
        ensemble: Some(ens),
        ..Default::default()
    })
}

fn run_conditions(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = need(&cfg.profile, "profile")?;
    let spec = need(&cfg.conditions, "conditions")?;
    let p = &spec.params;
    let mut rows = vec![];
    let row = |name: &str, aux1: String, id: ConditionId| -> Result<(ResultRow, Verdict)> {
        let rep = profile.check_condition(id, p)?;
        Ok((ResultRow::new(name, rep.statistic, f64::NAN).aux(aux1, rep.verdict.to_string()), rep.verdict))
    };
    for check in &spec.checks {
        match check {
            CheckKind::C0 => rows.push(row("C0", String::new(), ConditionId::C0)?.0),
            CheckKind::C0Plus => rows.push(row("C0_plus", String::new(), ConditionId::C0Plus)?.0),
            CheckKind::Hyp2 => rows.push(row("hyp2", String::new(), ConditionId::Hyp2)?.0),
            CheckKind::Concavity => rows.push(row("concavity", String::new(), ConditionId::Concavity)?.0),
            CheckKind::CEll(ell) => rows.push(row("C_ell", format!("{ell:?}"), ConditionId::CEll(*ell))?.0),
            CheckKind::CEps => {
                let mut eps = spec.eps.clone();
                eps.sort_by(f64::total_cmp);
                let mut verdicts = vec![];
                for e in &eps {
                    let (r, v) = row("C_eps", fmt_f64(*e), ConditionId::CEps(*e))?;
                    rows.push(r);
                    verdicts.push(v);
                }
                // C_ε weakens as ε grows: report where it switches on
                let last_fail = verdicts.iter().rposition(|v| *v != Verdict::Holds);
                let first_hold = verdicts.iter().position(|v| *v == Verdict::Holds);
                if let (Some(f), Some(h)) = (last_fail, first_hold) {
                    if f + 1 == h {
                        rows.push(
                            ResultRow::new("eps_transition", 0.5 * (eps[f] + eps[h]), 0.5 * (eps[h] - eps[f]))
                                .aux(fmt_f64(eps[f]), fmt_f64(eps[h])),
                        );
                    }
                }
            }
        }
    }
    Ok(Outcome {
        rows,
        tolerances: vec![("tol".into(), fmt17(p.tol)), ("slack".into(), fmt17(p.slack))],
        provenance: vec![("conditions".into(), format!("chaining ratio on log-scale ladder; profile={profile}"))],
        ..Default::default()
    })
}

fn dim_row(name: &str, est: &DimensionEstimate) -> ResultRow {
    ResultRow::new(name, est.value, est.stderr).aux(fmt17(est.fit_window.0), fmt17(est.fit_window.1))
}

fn counts_plot(est: &DimensionEstimate) -> Option<(String, PlotSeries)> {
    let mut rows: Vec<Vec<f64>> = est.counts.iter().map(|(r, n)| vec![*r, *n]).collect();
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    (!rows.is_empty()).then(|| ("counts.dat".to_string(), PlotSeries::new(&["r", "N"], rows)))
}

fn run_dimension(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = need(&cfg.profile, "profile")?;
    let e = cfg.time_set()?;
    let ens = ensemble(cfg)?;
    let (name, est) = if cfg.kind == ExperimentKind::DimImage {
        ("image_dimension", image_dimension(&ens, &e)?)
    } else {
        ("graph_dimension", graph_dimension(&ens, &e, profile)?)
    };
    let mut rows = vec![dim_row(name, &est)];
    rows.push(ResultRow::new("paths", est.per_path.len() as f64, f64::NAN));
    Ok(Outcome {
        rows,
        plots: counts_plot(&est).into_iter().collect(),
        tolerances: vec![("trim".into(), fmt17(TRIM))],
        provenance: vec![(
            name.into(),
            format!(
                "box counting per path, mean over paths; fit window r in [{}, {}]",
                fmt17(est.fit_window.0),
                fmt17(est.fit_window.1)
            ),
        )],
        ..Default::default()
    })
}

fn hit_rows(prefix: &str, rep: &HitReport) -> Vec<ResultRow> {
    let n = rep.trials as f64;
    rep.series
        .iter()
        .map(|p| {
            ResultRow::new(format!("{prefix}_frequency"), p.freq, (p.freq * (1.0 - p.freq) / n).sqrt())
                .aux(fmt17(p.r), p.hits.to_string())
        })
        .collect()
}

fn hit_plot(name: &str, rep: &HitReport) -> (String, PlotSeries) {
    let rows = rep.series.iter().map(|p| vec![p.r, p.freq, p.lo, p.hi]).collect();
    (name.to_string(), PlotSeries::new(&["r", "freq", "lo", "hi"], rows))
}

fn run_hit(cfg: &ExperimentConfig) -> Result<Outcome> {
    let hs = need(&cfg.hitting, "hitting")?;
    let target = match need(&cfg.target, "target")? {
        TargetSpec::Point(c) => Target::Point(c.clone()),
        TargetSpec::Ball { center, radius } => Target::Ball { center: center.clone(), radius: *radius },
    };
    let rep = hitting_probability(&HittingExperiment {
        process: cfg.process()?,
        e: cfg.time_set()?,
        target,
        radii: hs.radii.clone(),
        n_trials: hs.trials,
        seed: cfg.seed,
    })?;
    let mut rows = hit_rows("hit", &rep);
    if let Some((s, se)) = rep.exponent {
        rows.push(ResultRow::new("hit_exponent", s, se));
    }
    Ok(Outcome {
        rows,
        plots: vec![hit_plot("hits.dat", &rep)],
        tolerances: vec![("ci".into(), "wilson 95%".into())],
        provenance: vec![("hit_frequency".into(), format!("{} trials; min distance over the time set", hs.trials))],
        ..Default::default()
    })
}

fn run_codim(cfg: &ExperimentConfig) -> Result<Outcome> {
    let hs = need(&cfg.hitting, "hitting")?;
    let x0 = need(&cfg.target, "target")?.center().to_vec();
    let rep = codimension_sweep(&cfg.process()?, &cfg.time_set()?, &x0, &hs.radii, hs.trials, cfg.seed)?;
    let mut rows = hit_rows("hit", &rep.hits);
    rows.push(ResultRow::new("codim_slope", rep.slope, rep.stderr).aux(fmt17(rep.predicted), fmt17(rep.dim_e)));
    Ok(Outcome {
        rows,
        plots: vec![hit_plot("hits.dat", &rep.hits)],
        tolerances: vec![("ci".into(), "wilson 95%".into())],
        provenance: vec![(
            "codim_slope".into(),
            format!("log-log slope over radii [{}, {}]", fmt17(*hs.radii.last().unwrap()), fmt17(hs.radii[0])),
        )],
        ..Default::default()
    })
}

fn run_construct(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = need(&cfg.construct, "construct")?;
    let set = build_gauge_cantor(&spec.gauge, spec.depth, spec.metric.clone(), spec.ambient)?;
    let order = set.line_order();
    let diam = set.distance(order[0], *order.last().unwrap());
    let gap = order.windows(2).map(|w| set.distance(w[0], w[1])).fold(f64::INFINITY, f64::min);
    if !(gap > 0.0 && diam > 64.0 * gap) {
        return Err(Error::Resolution("construction too shallow for a box-count ladder".into()));
    }
    let radii = geometric_radii(4.0 * gap, diam / 4.0, 24)?;
    let est = box_dimension(&set, &radii)?;
    let reg_radii = geometric_radii(16.0 * gap, diam / 8.0, 4)?;
    let reg = verify_ahlfors_regularity(&set, spec.scale.clone(), &reg_radii)?;
    let reg_ok = reg.c <= spec.c_bound;
    let rows = vec![
        dim_row("box_dimension", &est),
        ResultRow::new("regularity_c", reg.c, f64::NAN)
            .aux(fmt17(spec.c_bound), if reg_ok { Verdict::Holds } else { Verdict::Fails }.to_string()),
        ResultRow::new("atoms", set.len() as f64, f64::NAN),
    ];
    Ok(Outcome {
        rows,
        plots: counts_plot(&est).into_iter().collect(),
        tolerances: vec![("trim".into(), fmt17(TRIM)), ("c_bound".into(), fmt17(spec.c_bound))],
        provenance: vec![
            ("box_dimension".into(), format!("greedy cover counts; fit window [{}, {}]", fmt17(est.fit_window.0), fmt17(est.fit_window.1))),
            ("regularity_c".into(), format!("{} centres from the measure at 4 radii in [{}, {}]", reg.n_pairs, fmt17(reg_radii[3]), fmt17(reg_radii[0]))),
        ],
        set: Some(set),
        ..Default::default()
    })
}

fn run_criticality(cfg: &ExperimentConfig) -> Result<Outcome> {
    let hs = need(&cfg.hitting, "hitting")?;
    let ps = need(&cfg.pair, "pair")?;
    let pair = build_undecidable_pair(ps.d, ps.alpha, ps.theta, ps.ell, ps.ambient, ps.depth)?;
    let rep = criticality_experiment(&cfg.process()?, &cfg.time_set()?, &pair, &hs.radii, hs.trials, cfg.seed)?;
    let verdict = |ok: bool| if ok { Verdict::Holds } else { Verdict::Fails }.to_string();
    let mut rows = hit_rows("f1", &rep.f1);
    rows.extend(hit_rows("f2", &rep.f2));
    rows.push(ResultRow::new("f2_floor_ratio", rep.f2_floor_ratio, f64::NAN).aux(fmt17(FLOOR_RATIO), verdict(rep.f2_bounded)));
    rows.push(ResultRow::new("f1_max_step", rep.f1_max_step, f64::NAN).aux(fmt17(DECAY_STEP), verdict(rep.f1_decreasing)));
    Ok(Outcome {
        rows,
        plots: vec![hit_plot("f1_hits.dat", &rep.f1), hit_plot("f2_hits.dat", &rep.f2)],
        tolerances: vec![("floor_ratio".into(), fmt17(FLOOR_RATIO)), ("decay_step".into(), fmt17(DECAY_STEP))],
        provenance: vec![("pair".into(), format!("d={} alpha={} theta={} depth={}", ps.d, ps.alpha, ps.theta, ps.depth))],
        ..Default::default()
    })
}
