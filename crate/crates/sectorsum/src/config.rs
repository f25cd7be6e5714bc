//! Configuration files. Unknown keys are rejected everywhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::model::{NormJson, OperatorSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sector,
    Calculus,
    Opsum,
    Lpnorm,
    Bounds,
    Mellin,
    Maxreg,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Sector, Suite::Calculus, Suite::Opsum, Suite::Lpnorm, Suite::Bounds, Suite::Mellin, Suite::Maxreg];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sector => "sector",
            Self::Calculus => "calculus",
            Self::Opsum => "opsum",
            Self::Lpnorm => "lpnorm",
            Self::Bounds => "bounds",
            Self::Mellin => "mellin",
            Self::Maxreg => "maxreg",
            Self::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| CliError::Config(format!("unknown suite {s:?}")))
    }

    /// `all` expanded; duplicates removed, order kept.
    pub fn expand(list: &[Suite]) -> Vec<Suite> {
        let mut out = Vec::new();
        for &s in list {
            let items: &[Suite] = if s == Suite::All { &Suite::ALL } else { std::slice::from_ref(&s) };
            for &i in items {
                if !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out
    }
}

/// Paths of per-suite problem files, relative to the experiment file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRefs {
    pub opsum: Option<PathBuf>,
    pub lpnorm: Option<PathBuf>,
    pub bounds: Option<PathBuf>,
    pub maxreg: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub suites: Vec<Suite>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol_scale: Option<f64>,
    /// Per-metric tolerance overrides keyed `suite.metric`.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub problems: ProblemRefs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpsumCase {
    pub label: String,
    pub a: OperatorSource,
    pub b: OperatorSource,
    /// Treat `a`, `b` as factors of `A (x) I + I (x) B`.
    #[serde(default)]
    pub kronecker: bool,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpsumConfig {
    pub problems: Vec<OpsumCase>,
    #[serde(default)]
    pub norm: NormJson,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpKind {
    /// `(int |t^{-theta} phi(tA) x|^p dt/t)^{1/p}`.
    Lp,
    /// Coordinatewise inner `L^q(dt/t)`, outer norm.
    Tl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpnormCase {
    pub label: String,
    pub operator: OperatorSource,
    pub symbol: String,
    pub kind: LpKind,
    /// `p` for `lp`, `q` for `tl`.
    pub exponent: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub norm: NormJson,
    /// The vector; seeded Gaussian when absent.
    pub x: Option<Vec<[f64; 2]>>,
    /// Angle for the `psi_*`/`phi_*` labels.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpnormConfig {
    pub cases: Vec<LpnormCase>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub label: String,
    pub members: Vec<OperatorSource>,
    #[serde(default)]
    pub norm: NormJson,
    #[serde(default = "default_n_ops")]
    pub n_ops: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Inner exponent of the `lq` kind.
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_mc")]
    pub mc_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxregConfig {
    /// Interior space nodes of the Dirichlet Laplacian.
    pub n: usize,
    pub m: usize,
    /// Step; `t_end / m` when absent.
    pub dt: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_q")]
    pub p: f64,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_q")]
    pub p_space: f64,
    #[serde(default = "default_ytheta_symbol")]
    pub symbol: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_maxreg_trials")]
    pub trials: usize,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_trials() -> usize {
    100
}
fn default_n_ops() -> usize {
    4
}
fn default_q() -> f64 {
    2.0
}
fn default_mc() -> usize {
    sectorsum_core::bounds::DEFAULT_MC_SAMPLES
}
fn default_t_end() -> f64 {
    1.0
}
fn default_theta() -> f64 {
    0.5
}
fn default_ytheta_symbol() -> String {
    "z2_over_1pz_4".into()
}
fn default_maxreg_trials() -> usize {
    8
}
fn default_levels() -> usize {
    3
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Lowercase hex SHA-256 of the compact JSON form of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configs serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}
