//! The `run` suites. Every suite is deterministic given the seed and problem files.

mod bounds;
mod calculus;
mod lpnorm;
mod maxreg;
mod mellin;
mod opsum;
mod sector;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use sectorsum_core::{linalg, CMat, CVec, C64};

use crate::config::{read_json, FamilyConfig, LpnormConfig, MaxregConfig, OpsumConfig, ProblemRefs, Suite};
use crate::error::CliError;
use crate::model::WitnessDump;
use crate::report::{ResultRow, RowSink};

pub use bounds::{dump_estimates, family_from_config, kind_label};
pub use lpnorm::{evaluate_case as evaluate_lpnorm_case, LpnormRecord};
pub use maxreg::problem_from_config;
pub use mellin::{MellinTable, MELLIN_TABLES};
pub use opsum::{pair_from_case, OpsumSummary};

/// Problem files referenced by an experiment config, already parsed.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Problems {
    pub opsum: Option<OpsumConfig>,
    pub lpnorm: Option<LpnormConfig>,
    pub bounds: Option<FamilyConfig>,
    pub maxreg: Option<MaxregConfig>,
}

impl Problems {
    /// Relative paths are resolved against `base`.
    pub fn load(refs: &ProblemRefs, base: &Path) -> Result<Self, CliError> {
        let path = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        Ok(Self {
            opsum: refs.opsum.as_deref().map(|p| read_json(&path(p))).transpose()?,
            lpnorm: refs.lpnorm.as_deref().map(|p| read_json(&path(p))).transpose()?,
            bounds: refs.bounds.as_deref().map(|p| read_json(&path(p))).transpose()?,
            maxreg: refs.maxreg.as_deref().map(|p| read_json(&path(p))).transpose()?,
        })
    }
}

pub struct SuiteContext<'a> {
    pub seed: u64,
    pub tol_scale: f64,
    pub tolerances: &'a BTreeMap<String, f64>,
    pub problems: &'a Problems,
}

#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub rows: Vec<ResultRow>,
    pub witnesses: Vec<WitnessDump>,
}

pub fn run_suite(suite: Suite, ctx: &SuiteContext) -> Result<SuiteOutput, CliError> {
    let mut sink = RowSink::new(suite.name(), ctx.tol_scale, ctx.tolerances);
    let mut witnesses = Vec::new();
    match suite {
        Suite::Sector => sector::run(ctx, &mut sink),
        Suite::Calculus => calculus::run(ctx, &mut sink),
        Suite::Opsum => opsum::run(ctx, &mut sink)?,
        Suite::Lpnorm => lpnorm::run(ctx, &mut sink)?,
        Suite::Bounds => witnesses = bounds::run(ctx, &mut sink)?,
        Suite::Mellin => mellin::run(ctx, &mut sink),
        Suite::Maxreg => maxreg::run(ctx, &mut sink)?,
        Suite::All => return Err(CliError::Config("suite \"all\" must be expanded before running".into())),
    }
    Ok(SuiteOutput { rows: sink.rows, witnesses })
}

type Value = sectorsum_core::Result<f64>;

/// Runs `f` on every item in parallel; rows keep the item order.
fn par_cases<T: Sync>(sink: &mut RowSink, items: &[T], f: impl Fn(&T, &mut RowSink) + Sync) {
    let base = sink.fork();
    let parts: Vec<RowSink> = items
        .par_iter()
        .map(|item| {
            let mut s = base.fork();
            f(item, &mut s);
            s
        })
        .collect();
    for p in parts {
        sink.absorb(p);
    }
}

fn rel_vec(a: &CVec, b: &CVec) -> f64 {
    let d = linalg::vec_norm2(&(a - b));
    if d == 0.0 {
        0.0
    } else {
        d / linalg::vec_norm2(b)
    }
}

fn rel_mat(a: &CMat, b: &CMat) -> f64 {
    let d = linalg::frobenius(&(a - b));
    if d == 0.0 {
        0.0
    } else {
        d / linalg::frobenius(b)
    }
}

fn rel_c(a: C64, b: C64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).norm() / b.norm()
    }
}
