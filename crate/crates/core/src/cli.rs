//! Command-line front end: argument parsing, subcommand dispatch, JSON
//! output and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::eigenpath::{self, EigenTrack, MatrixJson};
use crate::error::{Error, Result};
use crate::experiments::{self, McReport};
use crate::polyspace::{affine_zero_of, DegreeList, PointJson, PolySystem};
use crate::roundoff::{self, BoundKind, PerturbationMode, PerturbationModel, Slp};
use crate::startsys::{self, StartPair};
use crate::tracker::{self, great_circle, segment, TrackResult, TrackStatus, TrackerConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_EXPERIMENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "polyhom", version, about = "Certified homotopy continuation in the Bombieri-Weyl geometry")]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for trial-parallel work (output does not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a JSON run manifest here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a system by homotopy from a start pair.
    Solve(SolveArgs),
    /// Track the zeros of a start pair to a target system.
    Track(TrackArgs),
    /// Emit a start pair as JSON.
    SamplePair(SampleArgs),
    /// Run a Monte Carlo or optimization experiment.
    Stats(StatsArgs),
    /// Run a straight-line program as a round-off machine.
    Roundoff(RoundoffArgs),
    /// Continue eigenpairs from one matrix to another.
    Eigen(EigenArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StartKind {
    Shsm,
    Bc,
    Bp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathChoice {
    GreatCircle,
    Segment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct TrackerFlags {
    #[arg(long, default_value_t = 0.05)]
    pub lambda0: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
}

impl TrackerFlags {
    fn config(&self) -> Result<TrackerConfig> {
        let cfg = TrackerConfig {
            lambda0: self.lambda0,
            max_steps: self.max_steps,
            ..TrackerConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// System JSON file.
    pub system: PathBuf,
    #[arg(long, value_enum, default_value_t = StartKind::Bc)]
    pub start: StartKind,
    /// Track all Bézout-many zeros (BC start only).
    #[arg(long)]
    pub all: bool,
    #[command(flatten)]
    pub tracker: TrackerFlags,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// Start pair JSON file (as written by `sample-pair`).
    pub start: PathBuf,
    /// Target system JSON file.
    pub target: PathBuf,
    #[arg(long, value_enum, default_value_t = PathChoice::GreatCircle)]
    pub path: PathChoice,
    /// Write the per-step logs of all paths here as CSV.
    #[arg(long)]
    pub log_csv: Option<PathBuf>,
    #[command(flatten)]
    pub tracker: TrackerFlags,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = StartKind::Bp)]
    pub kind: StartKind,
    /// Comma-separated degree list, e.g. `2,2`.
    #[arg(long)]
    pub degrees: String,
    /// Trial index of the BP stream.
    #[arg(long, default_value_t = 0)]
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatsKind {
    Mu2,
    B1,
    FeketeUniform,
    FeketePoly,
    FeketeMin,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(value_enum)]
    pub kind: StatsKind,
    /// Number of equations.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Degree (of every equation, or the number of points for Fekete kinds).
    #[arg(long, default_value_t = 3)]
    pub d: u32,
    /// Explicit comma-separated degree list; overrides `--n`/`--d`.
    #[arg(long)]
    pub degrees: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Trapezoid subintervals on `[0, π]` for `b1`.
    #[arg(long, default_value_t = 32)]
    pub t_nodes: usize,
    /// Iteration cap per restart for `fekete-min`.
    #[arg(long, default_value_t = 20_000)]
    pub iters: usize,
    /// Start pair for `b1`.
    #[arg(long, value_enum, default_value_t = StartKind::Shsm)]
    pub start: StartKind,
    /// Pass tolerance: relative for `mu2`, standard errors for
    /// `fekete-uniform`, absolute for `fekete-poly`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write per-sample values here as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub tracker: TrackerFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Uniform,
    Sign,
    Adversarial,
}

#[derive(Debug, Args)]
pub struct RoundoffArgs {
    /// Program file in the `n3 = mul n1 n2` format.
    pub program: PathBuf,
    /// Comma-separated input values.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Perturbation bound δ.
    #[arg(long, conflicts_with = "epsilon")]
    pub delta: Option<f64>,
    /// Target relative accuracy; δ then comes from `--kind`.
    #[arg(long, requires = "kind")]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = parse_bound_kind)]
    pub kind: Option<BoundKind>,
    #[arg(long, value_enum, default_value_t = ModeChoice::Adversarial)]
    pub mode: ModeChoice,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_bound_kind(s: &str) -> std::result::Result<BoundKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    /// Start matrix JSON `{"n", "re", "im"}`.
    pub a0: PathBuf,
    /// Target matrix JSON.
    pub a1: PathBuf,
    /// Index of the start eigenpair (Schur order of `A0`).
    #[arg(long, default_value_t = 0)]
    pub pair: usize,
    /// Track every eigenpair.
    #[arg(long)]
    pub all: bool,
    #[command(flatten)]
    pub tracker: TrackerFlags,
}

/// Result of one command: the primary output and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub exit: i32,
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    subcommand: String,
    args: Vec<String>,
    seed: u64,
    version: String,
    wall_time_s: f64,
    exit_code: i32,
    inputs: Vec<InputDigest>,
    output_sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn parse_degrees(s: &str) -> Result<DegreeList> {
    let v: std::result::Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
    DegreeList::new(v.map_err(|e| Error::Parse(format!("degree list `{s}`: {e}")))?)
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("value `{t}`: {e}"))))
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidInput(_) | Error::Shape(_) | Error::DegreeViolation { .. } | Error::TooManyZeros { .. } => EXIT_PARSE,
        Error::ExperimentInvalid(_) => EXIT_EXPERIMENT,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Serialize)]
struct PathReport {
    index: usize,
    status: TrackStatus,
    zero: PointJson,
    /// Affine shadow `(ζ₁/ζ₀, …)`; absent for zeros at infinity.
    affine: Option<PointJson>,
    certified: bool,
    mu: f64,
    residual: f64,
    steps: usize,
    rejections: usize,
    l_kappa: f64,
    message: Option<String>,
}

impl PathReport {
    fn new(index: usize, r: &TrackResult) -> Self {
        PathReport {
            index,
            status: r.status,
            zero: PointJson::from(&r.endpoint),
            affine: affine_zero_of(&r.endpoint).ok().map(|z| PointJson::from_slice(&z)),
            certified: r.certificate.certified,
            mu: r.mu_end,
            residual: r.residual,
            steps: r.steps,
            rejections: r.rejections,
            l_kappa: r.l_kappa_estimate,
            message: r.message.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    start: String,
    degrees: Vec<u32>,
    bezout: u128,
    paths: Vec<PathReport>,
    failed: usize,
}

fn start_name(k: StartKind) -> &'static str {
    match k {
        StartKind::Shsm => "shsm",
        StartKind::Bc => "bc",
        StartKind::Bp => "bp",
    }
}

fn make_pair(kind: StartKind, degrees: &DegreeList, seed: u64, index: u64) -> Result<StartPair> {
    Ok(match kind {
        StartKind::Shsm => startsys::shsm_pair(degrees),
        StartKind::Bc => startsys::bc_pair(degrees)?,
        StartKind::Bp => startsys::bp_sample_indexed(degrees, seed, index),
    })
}

fn track_all(pair: &StartPair, path: &tracker::PathSpec, cfg: &TrackerConfig) -> Vec<TrackResult> {
    use rayon::prelude::*;
    pair.zeros.par_iter().map(|z| tracker::track(path, z, cfg)).collect()
}

fn cmd_solve(a: &SolveArgs, seed: u64) -> Result<Outcome> {
    let h = PolySystem::from_json(&read(&a.system)?)?;
    if a.all && a.start != StartKind::Bc {
        return Err(Error::InvalidInput("--all needs --start bc".into()));
    }
    let cfg = a.tracker.config()?;
    let degrees = h.degrees().clone();
    let mut pair = make_pair(a.start, &degrees, seed, 0)?;
    if !a.all {
        pair.zeros.truncate(1);
    }
    let path = great_circle(&pair.g, &h)?;
    let results = track_all(&pair, &path, &cfg);
    let paths: Vec<PathReport> = results.iter().enumerate().map(|(i, r)| PathReport::new(i, r)).collect();
    let failed = results.iter().filter(|r| !r.is_success()).count();
    let out = SolveOutput {
        start: start_name(a.start).into(),
        degrees: degrees.as_slice().to_vec(),
        bezout: degrees.bezout(),
        paths,
        failed,
    };
    Ok(Outcome {
        output: to_json(&out),
        exit: if failed > 0 { EXIT_NUMERICAL } else { EXIT_OK },
        inputs: vec![a.system.clone()],
    })
}

fn cmd_track(a: &TrackArgs) -> Result<Outcome> {
    let pair = StartPair::from_json(&read(&a.start)?)?;
    let h = PolySystem::from_json(&read(&a.target)?)?;
    let cfg = a.tracker.config()?;
    let path = match a.path {
        PathChoice::GreatCircle => great_circle(&pair.g, &h)?,
        PathChoice::Segment => segment(&pair.g, &h)?,
    };
    let results = track_all(&pair, &path, &cfg);
    if let Some(p) = &a.log_csv {
        let mut csv = String::from("path,step,t,mu,dt,newton_residual\n");
        for (i, r) in results.iter().enumerate() {
            for line in tracker::step_log_csv(&r.step_log).lines().skip(1) {
                let _ = writeln!(csv, "{i},{line}");
            }
        }
        write(p, &csv)?;
    }
    let failed = results.iter().filter(|r| !r.is_success()).count();
    let out = SolveOutput {
        start: "file".into(),
        degrees: h.degrees().as_slice().to_vec(),
        bezout: h.degrees().bezout(),
        paths: results.iter().enumerate().map(|(i, r)| PathReport::new(i, r)).collect(),
        failed,
    };
    Ok(Outcome {
        output: to_json(&out),
        exit: if failed > 0 { EXIT_NUMERICAL } else { EXIT_OK },
        inputs: vec![a.start.clone(), a.target.clone()],
    })
}

fn cmd_sample(a: &SampleArgs, seed: u64) -> Result<Outcome> {
    let degrees = parse_degrees(&a.degrees)?;
    let pair = make_pair(a.kind, &degrees, seed, a.index)?;
    let mut output = pair.to_json();
    output.push('\n');
    Ok(Outcome {
        output,
        exit: EXIT_OK,
        inputs: vec![],
    })
}

#[derive(Debug, Serialize)]
struct StatsOutput {
    kind: String,
    report: McReport,
    target: Option<f64>,
    tolerance: Option<f64>,
    /// `None` for report-only quantities.
    pass: Option<bool>,
}

#[derive(Debug, Serialize)]
struct FeketeMinOutput {
    kind: String,
    d: usize,
    energy: f64,
    grad_norm: f64,
    window: [f64; 2],
    restart_energies: Vec<f64>,
    bound_check: experiments::EnergyBoundReport,
    pass: bool,
}

fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<w$}  {v}");
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x}"))
}

fn stats_table(s: &StatsOutput) -> String {
    let r = &s.report;
    let mut rows = vec![
        ("kind".to_string(), s.kind.clone()),
        ("estimate".into(), format!("{}", r.estimate)),
        ("stderr".into(), format!("{}", r.stderr)),
        ("samples".into(), r.samples.to_string()),
        ("rejected".into(), r.rejected.to_string()),
        ("target".into(), fmt_opt(s.target)),
        ("tolerance".into(), fmt_opt(s.tolerance)),
        ("pass".into(), s.pass.map_or("report-only".into(), |p| p.to_string())),
    ];
    for (k, v) in &r.extra {
        rows.push((k.clone(), format!("{v}")));
    }
    table(&rows)
}

/// `[d²/4 − d ln d/4 − 0.4375d, d²/4 − d ln d/4 − 0.37d + 0.2d]`.
pub fn fekete_window(d: usize) -> [f64; 2] {
    let d = d as f64;
    let base = d * d / 4.0 - d * d.ln() / 4.0;
    [base - 0.4375 * d, base - 0.37 * d + 0.2 * d]
}

fn cmd_stats(a: &StatsArgs, seed: u64) -> Result<Outcome> {
    let degrees = match &a.degrees {
        Some(s) => parse_degrees(s)?,
        None => DegreeList::uniform(a.n, a.d)?,
    };
    let cfg = a.tracker.config()?;
    let d = a.d as usize;
    let (kind, report, tol, pass): (&str, McReport, Option<f64>, Option<bool>) = match a.kind {
        StatsKind::Mu2 => {
            let r = experiments::mc_sum_mu_squared(&degrees, a.samples, seed, &cfg)?;
            let tol = a.tol.unwrap_or(0.10);
            let p = r.within_rel(tol);
            ("mu2", r, Some(tol), Some(p))
        }
        StatsKind::B1 => {
            let pair = make_pair(a.start, &degrees, seed, 0)?;
            let r = experiments::estimate_b1(&pair, a.samples, a.t_nodes, seed, &cfg)?;
            ("b1", r, None, None)
        }
        StatsKind::FeketeUniform => {
            let r = experiments::mc_energy_uniform(d, a.samples, seed)?;
            let tol = a.tol.unwrap_or(3.0);
            let p = r.within_stderr(tol);
            ("fekete-uniform", r, Some(tol), Some(p))
        }
        StatsKind::FeketePoly => {
            let r = experiments::mc_energy_random_poly(d, a.samples, seed)?;
            let tol = a.tol.unwrap_or(0.3);
            let p = r.target.is_some_and(|t| (r.estimate - t).abs() <= tol);
            ("fekete-poly", r, Some(tol), Some(p))
        }
        StatsKind::FeketeMin => {
            let m = experiments::minimize_energy(d, a.iters, seed)?;
            let window = fekete_window(d);
            let out = FeketeMinOutput {
                kind: "fekete-min".into(),
                d,
                energy: m.energy,
                grad_norm: m.grad_norm,
                window,
                restart_energies: m.restart_energies.clone(),
                bound_check: experiments::shsm_energy_bound_check(&m.config)?,
                pass: m.energy >= window[0] && m.energy <= window[1],
            };
            let output = match a.format {
                Format::Json => to_json(&out),
                Format::Table => table(&[
                    ("kind".into(), out.kind.clone()),
                    ("d".into(), d.to_string()),
                    ("energy".into(), format!("{}", out.energy)),
                    ("grad_norm".into(), format!("{}", out.grad_norm)),
                    ("window".into(), format!("[{}, {}]", window[0], window[1])),
                    ("max_mu".into(), format!("{}", out.bound_check.max_mu)),
                    ("mu_bound".into(), format!("{}", out.bound_check.bound)),
                    ("pass".into(), out.pass.to_string()),
                ]),
            };
            return Ok(Outcome {
                output,
                exit: EXIT_OK,
                inputs: vec![],
            });
        }
    };
    if let Some(p) = &a.csv {
        write(p, &report.values_csv())?;
    }
    let out = StatsOutput {
        kind: kind.into(),
        target: report.target,
        report,
        tolerance: tol,
        pass,
    };
    let output = match a.format {
        Format::Json => to_json(&out),
        Format::Table => stats_table(&out),
    };
    Ok(Outcome {
        output,
        exit: EXIT_OK,
        inputs: vec![],
    })
}

#[derive(Debug, Serialize)]
struct RoundoffOutput {
    delta: f64,
    epsilon: Option<f64>,
    kind: Option<BoundKind>,
    mode: PerturbationMode,
    exact: f64,
    output: f64,
    /// Worst relative error over all trials for adversarial search.
    rel_error: f64,
    within_epsilon: Option<bool>,
    kappa: Option<f64>,
    posedness: Option<f64>,
    k: Option<f64>,
    input_size: Option<f64>,
    steps: usize,
    cost: f64,
    node_values: Vec<f64>,
}

fn cmd_roundoff(a: &RoundoffArgs, seed: u64) -> Result<Outcome> {
    let slp: Slp = read(&a.program)?.parse()?;
    let x = parse_reals(&a.x)?;
    let delta = match (a.delta, a.epsilon, a.kind) {
        (Some(d), _, _) => d,
        (None, Some(eps), Some(kind)) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidInput("ε must lie in (0, 1)".into()));
            }
            roundoff::delta_bound(kind, &x, eps)?
        }
        _ => return Err(Error::InvalidInput("give --delta, or --epsilon with --kind".into())),
    };
    let mode = match a.mode {
        ModeChoice::Uniform => PerturbationMode::RandomUniform,
        ModeChoice::Sign => PerturbationMode::RandomSign,
        ModeChoice::Adversarial => PerturbationMode::AdversarialSearch { trials: a.trials },
    };
    let model = PerturbationModel::new(delta, mode)?;
    let tr = roundoff::run_perturbed(&slp, &x, &model, seed)?;
    if tr.exact == 0.0 && tr.output != 0.0 {
        return Err(Error::IllPosed("exact output is 0, so no relative accuracy is attainable".into()));
    }
    let cond = a.kind.map(|k| (roundoff::kappa(k, &x), roundoff::posedness(k, &x), roundoff::k_value(k, &x)));
    if let Some((kap, _, _)) = cond {
        if kap.is_infinite() {
            return Err(Error::IllPosed("instance lies on the ill-posed set (κ = ∞)".into()));
        }
    }
    let out = RoundoffOutput {
        delta,
        epsilon: a.epsilon,
        kind: a.kind,
        mode,
        exact: tr.exact,
        output: tr.output,
        rel_error: tr.rel_error,
        within_epsilon: a.epsilon.map(|e| tr.rel_error < e),
        kappa: cond.map(|c| c.0),
        posedness: cond.map(|c| c.1),
        k: cond.map(|c| c.2),
        input_size: a.epsilon.zip(cond).map(|(e, c)| roundoff::input_size(&x, e, c.2)),
        steps: tr.t,
        cost: tr.cost,
        node_values: tr.node_values.clone(),
    };
    let output = match a.format {
        Format::Json => to_json(&out),
        Format::Table => {
            let mut rows: Vec<(String, String)> = x.iter().enumerate().map(|(i, v)| (format!("x{i}"), format!("{v}"))).collect();
            for (i, (n, v)) in slp.nodes.iter().zip(&tr.node_values).enumerate() {
                rows.push((format!("n{i} ({:?})", n.op).to_lowercase(), format!("{v}")));
            }
            rows.push(("delta".into(), format!("{delta}")));
            rows.push(("exact".into(), format!("{}", tr.exact)));
            rows.push(("rel_error".into(), format!("{}", tr.rel_error)));
            rows.push(("cost".into(), format!("{}", tr.cost)));
            table(&rows)
        }
    };
    Ok(Outcome {
        output,
        exit: EXIT_OK,
        inputs: vec![a.program.clone()],
    })
}

#[derive(Debug, Serialize)]
struct MuEigPoint {
    t: f64,
    mu_eig: f64,
}

#[derive(Debug, Serialize)]
struct EigenReport {
    pair: usize,
    status: TrackStatus,
    lambda: [f64; 2],
    v: PointJson,
    residual: f64,
    steps: usize,
    rejections: usize,
    length_estimate: f64,
    mu_eig_log: Vec<MuEigPoint>,
    message: Option<String>,
}

impl EigenReport {
    fn new(pair: usize, t: &EigenTrack) -> Self {
        EigenReport {
            pair,
            status: t.status,
            lambda: [t.end.lambda.re, t.end.lambda.im],
            v: PointJson::from_slice(t.end.v.as_slice()),
            residual: t.end.residual(),
            steps: t.steps,
            rejections: t.rejections,
            length_estimate: t.length_estimate,
            mu_eig_log: t.log.iter().map(|s| MuEigPoint { t: s.t, mu_eig: s.mu_eig }).collect(),
            message: t.message.clone(),
        }
    }
}

fn read_matrix(p: &Path) -> Result<crate::linalg::CMat> {
    let m: MatrixJson = serde_json::from_str(&read(p)?)?;
    m.to_matrix()
}

fn cmd_eigen(a: &EigenArgs) -> Result<Outcome> {
    let a0 = read_matrix(&a.a0)?;
    let a1 = read_matrix(&a.a1)?;
    if a0.shape() != a1.shape() {
        return Err(Error::Shape("A0 and A1 differ in size".into()));
    }
    let cfg = a.tracker.config()?;
    let starts = eigenpath::eigenpairs(&a0)?;
    let chosen: Vec<usize> = if a.all {
        (0..starts.len()).collect()
    } else {
        if a.pair >= starts.len() {
            return Err(Error::InvalidInput(format!("pair {} out of range (n = {})", a.pair, starts.len())));
        }
        vec![a.pair]
    };
    let mut reports = Vec::new();
    for i in chosen {
        let t = eigenpath::track_eigenpair(&a0, &a1, &starts[i], &cfg)?;
        reports.push(EigenReport::new(i, &t));
    }
    let failed = reports.iter().filter(|r| r.status != TrackStatus::Success).count();
    Ok(Outcome {
        output: to_json(&reports),
        exit: if failed > 0 { EXIT_NUMERICAL } else { EXIT_OK },
        inputs: vec![a.a0.clone(), a.a1.clone()],
    })
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Solve(_) => "solve",
        Command::Track(_) => "track",
        Command::SamplePair(_) => "sample-pair",
        Command::Stats(_) => "stats",
        Command::Roundoff(_) => "roundoff",
        Command::Eigen(_) => "eigen",
        Command::Version => "version",
    }
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, cli.seed),
        Command::Track(a) => cmd_track(a),
        Command::SamplePair(a) => cmd_sample(a, cli.seed),
        Command::Stats(a) => cmd_stats(a, cli.seed),
        Command::Roundoff(a) => cmd_roundoff(a, cli.seed),
        Command::Eigen(a) => cmd_eigen(a),
        Command::Version => Ok(Outcome {
            output: format!("polyhom {}\n", env!("CARGO_PKG_VERSION")),
            exit: EXIT_OK,
            inputs: vec![],
        }),
    }
}

/// Entry point for the binary: parse, run, write output and manifest, and
/// return the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return EXIT_PARSE;
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let start = Instant::now();
    let (output, exit, inputs) = match execute(&cli) {
        Ok(o) => (o.output, o.exit, o.inputs),
        Err(e) => {
            eprintln!("error: {e}");
            (String::new(), exit_code(&e), vec![])
        }
    };
    if !output.is_empty() {
        match &cli.out {
            Some(p) => {
                if let Err(e) = write(p, &output) {
                    eprintln!("error: {e}");
                    return EXIT_PARSE;
                }
            }
            None => print!("{output}"),
        }
    }
    if let Some(p) = &cli.manifest {
        let m = RunManifest {
            subcommand: subcommand_name(&cli.command).into(),
            args: args.iter().skip(1).cloned().collect(),
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_s: start.elapsed().as_secs_f64(),
            exit_code: exit,
            inputs: inputs
                .iter()
                .map(|p| InputDigest {
                    path: p.display().to_string(),
                    sha256: fs::read(p).map(|b| sha256_hex(&b)).unwrap_or_default(),
                })
                .collect(),
            output_sha256: sha256_hex(output.as_bytes()),
        };
        if let Err(e) = write(p, &to_json(&m)) {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    }
    exit
}
