//! Subcommand implementations. Each writes a CSV whose first line is a `#` header.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use sectorsum_core::bounds::{self, BoundKind};
use sectorsum_core::maxreg;

use crate::config::{config_hash, read_json, ExperimentConfig, FamilyConfig, LpnormConfig, MaxregConfig, OpsumConfig, Suite};
use crate::error::CliError;
use crate::model::{WitnessDump, WitnessFile};
use crate::report::{header_line, write_csv, ResultRow, RowSink};
use crate::suites::{self, MellinTable, OpsumSummary, Problems, SuiteContext};

pub const DEFAULT_OUT: &str = "sectorsum-results.csv";
/// Relative replay agreement required of every witness.
pub const REPLAY_TOL: f64 = 1e-12;

/// Command-line overrides for `run`; unset fields fall back to the config file.
#[derive(Debug, Clone, Default)]
pub struct RunArgs {
    pub config: Option<PathBuf>,
    pub suites: Vec<Suite>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol_scale: Option<f64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub witnesses: Option<PathBuf>,
    pub rows: Vec<ResultRow>,
}

impl RunOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Thread pool capped by `SECTORSUM_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("SECTORSUM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("SECTORSUM_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

#[derive(Serialize)]
struct HashInput<'a> {
    config: &'a ExperimentConfig,
    problems: &'a Problems,
}

/// Merges flags into the config file, runs the suites and writes the CSV
/// (and the bounds witnesses next to it).
pub fn run(args: &RunArgs) -> Result<RunOutcome, CliError> {
    let (mut cfg, base) = match &args.config {
        Some(p) => (read_json::<ExperimentConfig>(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (ExperimentConfig::default(), PathBuf::new()),
    };
    if !args.suites.is_empty() {
        cfg.suites = args.suites.clone();
    }
    cfg.seed = args.seed.or(cfg.seed).or(Some(0));
    cfg.out = args.out.clone().or(cfg.out).or_else(|| Some(PathBuf::from(DEFAULT_OUT)));
    cfg.tol_scale = args.tol_scale.or(cfg.tol_scale).or(Some(1.0));
    let suites = Suite::expand(&cfg.suites);
    if suites.is_empty() {
        return Err(CliError::Config("no suites selected".into()));
    }
    let tol_scale = cfg.tol_scale.unwrap_or(1.0);
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(CliError::Config(format!("tol_scale must be positive and finite, got {tol_scale}")));
    }
    if let Some((k, v)) = cfg.tolerances.iter().find(|(k, v)| !k.contains('.') || !(**v >= 0.0)) {
        return Err(CliError::Config(format!("tolerance override {k:?} = {v}: keys are suite.metric, values non-negative")));
    }
    let problems = Problems::load(&cfg.problems, &base)?;
    let seed = cfg.seed.unwrap_or(0);
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let hash = config_hash(&HashInput { config: &cfg, problems: &problems });

    let ctx = SuiteContext { seed, tol_scale, tolerances: &cfg.tolerances, problems: &problems };
    let pool = thread_pool()?;
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    for s in suites {
        let o = pool.install(|| suites::run_suite(s, &ctx))?;
        rows.extend(o.rows);
        witnesses.extend(o.witnesses);
    }
    write_csv(&out, &header_line(seed, &hash), &rows)?;
    let witness_path = if witnesses.is_empty() {
        None
    } else {
        let p = out.with_extension("witnesses.json");
        write_json(&p, &WitnessFile::Many(witnesses))?;
        Some(p)
    };
    Ok(RunOutcome { csv: out, witnesses: witness_path, rows })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn opsum(config: &Path, out: &Path) -> Result<Vec<OpsumSummary>, CliError> {
    let cfg: OpsumConfig = read_json(config)?;
    let norm = cfg.norm.to_spec()?;
    let records = thread_pool()?.install(|| {
        cfg.problems
            .par_iter()
            .map(|c| {
                let p = suites::pair_from_case(c, norm.clone())?;
                Ok(OpsumSummary::compute(&c.label, &p, cfg.trials, cfg.seed)?)
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    write_csv(out, &header_line(cfg.seed, &config_hash(&cfg)), &records)?;
    Ok(records)
}

pub fn lpnorm(config: &Path, out: &Path) -> Result<Vec<suites::LpnormRecord>, CliError> {
    let cfg: LpnormConfig = read_json(config)?;
    let records = thread_pool()?.install(|| {
        cfg.cases
            .par_iter()
            .enumerate()
            .map(|(k, c)| suites::evaluate_lpnorm_case(c, cfg.seed, k as u64))
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    write_csv(out, &header_line(cfg.seed, &config_hash(&cfg)), &records)?;
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindArg {
    R,
    Gamma,
    Lq,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub family: String,
    pub kind: &'static str,
    pub q: Option<f64>,
    pub n_ops: usize,
    pub trials: usize,
    pub lower_bound: f64,
    pub stderr: Option<f64>,
    pub singleton: f64,
}

/// Estimates one bound; the witness goes to `witness` (default: `out` with a `.json` extension).
pub fn bounds(family: &Path, kind: KindArg, out: &Path, witness: Option<&Path>) -> Result<(BoundRecord, PathBuf), CliError> {
    let cfg: FamilyConfig = read_json(family)?;
    let (fam, norm) = suites::family_from_config(&cfg)?;
    let est = thread_pool()?.install(|| match kind {
        KindArg::R => bounds::r_bound_estimate(&fam, &norm, cfg.n_ops, cfg.trials, cfg.seed),
        KindArg::Gamma => bounds::gamma_bound_estimate(&fam, &norm, cfg.n_ops, cfg.trials, cfg.mc_samples, cfg.seed),
        KindArg::Lq => bounds::lq_bound_estimate(&fam, cfg.q, &norm, cfg.n_ops, cfg.trials, cfg.seed),
    })?;
    let record = BoundRecord {
        family: cfg.label.clone(),
        kind: suites::kind_label(est.kind),
        q: match est.kind {
            BoundKind::Lq(q) => Some(q),
            _ => None,
        },
        n_ops: cfg.n_ops,
        trials: cfg.trials,
        lower_bound: est.lower_bound,
        stderr: est.stderr,
        singleton: est.singleton,
    };
    write_csv(out, &header_line(cfg.seed, &config_hash(&cfg)), std::slice::from_ref(&record))?;
    let wpath = witness.map(Path::to_path_buf).unwrap_or_else(|| out.with_extension("json"));
    write_json(&wpath, &suites::dump_estimates(&fam, &norm, std::slice::from_ref(&est)))?;
    Ok((record, wpath))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayRecord {
    pub family: String,
    pub kind: &'static str,
    pub recorded: f64,
    pub replayed: f64,
    pub rel_diff: f64,
    pub pass: bool,
}

/// Re-evaluates every estimate of a witness file.
pub fn replay(witnesses: &Path, out: &Path) -> Result<Vec<ReplayRecord>, CliError> {
    let file: WitnessFile = read_json(witnesses)?;
    let dumps: Vec<WitnessDump> = file.into_vec();
    let mut records = Vec::new();
    for d in &dumps {
        let (fam, norm) = d.family()?;
        for e in &d.estimates {
            let kind = e.bound_kind()?;
            let v = bounds::replay(&fam, &norm, kind, &e.witness()?)?;
            let rel_diff = if v == e.lower_bound { 0.0 } else { (v - e.lower_bound).abs() / e.lower_bound.abs() };
            records.push(ReplayRecord {
                family: d.family.clone(),
                kind: suites::kind_label(kind),
                recorded: e.lower_bound,
                replayed: v,
                rel_diff,
                pass: rel_diff <= REPLAY_TOL,
            });
        }
    }
    let text = std::fs::read(witnesses).map_err(|e| CliError::io(witnesses, e))?;
    write_csv(out, &header_line(0, &config_hash(&text)), &records)?;
    Ok(records)
}

/// One section of the mellin suite; this is how the reference tables are regenerated.
pub fn mellin(table: MellinTable, seed: u64, tol_scale: f64, out: &Path) -> Result<Vec<ResultRow>, CliError> {
    let overrides = Default::default();
    let mut sink = RowSink::new("mellin", tol_scale, &overrides);
    thread_pool()?.install(|| table.run(seed, &mut sink));
    write_csv(out, &header_line(seed, &config_hash(&format!("{table:?}"))), &sink.rows)?;
    Ok(sink.rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxregRecord {
    pub m: usize,
    pub dt: f64,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    #[serde(rename = "C_p")]
    pub c_p: f64,
    #[serde(rename = "C_inhom")]
    pub c_inhom: f64,
    #[serde(rename = "C_Ytheta")]
    pub c_ytheta: f64,
    #[serde(rename = "norm_AS")]
    pub norm_as: f64,
    #[serde(rename = "norm_BS")]
    pub norm_bs: f64,
}

pub fn maxreg(config: &Path, out: &Path) -> Result<Vec<MaxregRecord>, CliError> {
    let cfg: MaxregConfig = read_json(config)?;
    let prob = suites::problem_from_config(&cfg)?;
    let c = thread_pool()?.install(|| maxreg::maxreg_constant(&prob, cfg.trials, cfg.seed, cfg.levels))?;
    let records: Vec<MaxregRecord> = c
        .refinement_table
        .iter()
        .map(|r| MaxregRecord {
            m: r.m,
            dt: r.dt,
            p: cfg.p,
            q: cfg.q,
            theta: cfg.theta,
            c_p: r.c_p,
            c_inhom: r.c_inhom,
            c_ytheta: r.c_ytheta,
            norm_as: r.norm_as,
            norm_bs: r.norm_bs,
        })
        .collect();
    write_csv(out, &header_line(cfg.seed, &config_hash(&cfg)), &records)?;
    Ok(records)
}
