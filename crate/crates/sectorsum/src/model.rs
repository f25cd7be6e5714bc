//! JSON descriptions of operators, norms and complex vectors.

use serde::{Deserialize, Serialize};

use sectorsum_core::bounds::{BoundEstimate, BoundKind, OperatorFamily, Witness};
use sectorsum_core::operator::{self, LinearOperator};
use sectorsum_core::{CMat, CVec, MixedNormSpec, NormKind, C64};

use crate::error::CliError;

/// `{dim, entries, label, claimed_angle}` with row-major `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_angle: Option<f64>,
}

impl OperatorJson {
    pub fn from_operator(a: &LinearOperator) -> Self {
        let m = a.entries();
        let n = a.dim();
        let entries = (0..n * n).map(|k| {
            let z = m[(k / n, k % n)];
            [z.re, z.im]
        });
        Self { dim: n, entries: entries.collect(), label: a.label.clone(), claimed_angle: a.claimed_angle }
    }

    pub fn to_operator(&self) -> Result<LinearOperator, CliError> {
        let n = self.dim;
        if self.entries.len() != n * n {
            return Err(CliError::Config(format!("operator {:?}: {} entries for dimension {n}", self.label, self.entries.len())));
        }
        let m = CMat::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i * n + j];
            C64::new(re, im)
        });
        let mut a = LinearOperator::new(m, self.label.clone())?;
        a.claimed_angle = self.claimed_angle;
        Ok(a)
    }
}

/// Built-in operator generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Dirichlet Laplacian on `n` interior nodes of `(0, 1)`.
    Laplacian {
        n: usize,
    },
    /// Backward difference on `m` steps of size `dt`.
    TimeDerivative {
        m: usize,
        dt: f64,
    },
    Diagonal {
        values: Vec<[f64; 2]>,
    },
    Identity {
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSource {
    Explicit(OperatorJson),
    Generated(Generator),
}

impl OperatorSource {
    pub fn build(&self) -> Result<LinearOperator, CliError> {
        Ok(match self {
            Self::Explicit(j) => j.to_operator()?,
            Self::Generated(Generator::Laplacian { n }) => operator::dirichlet_laplacian_1d(*n, 1.0 / (*n as f64 + 1.0))?,
            Self::Generated(Generator::TimeDerivative { m, dt }) => operator::time_derivative_operator(*m, *dt)?,
            Self::Generated(Generator::Diagonal { values }) => {
                let d: Vec<C64> = values.iter().map(|&[re, im]| C64::new(re, im)).collect();
                LinearOperator::from_diagonal(&d, "diag")?
            }
            Self::Generated(Generator::Identity { n }) => LinearOperator::identity(*n),
        })
    }
}

/// A real exponent, or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(Infinity),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinity {
    Inf,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Named(Infinity::Inf) => f64::INFINITY,
        }
    }

    pub fn from_value(p: f64) -> Self {
        if p.is_infinite() {
            Self::Named(Infinity::Inf)
        } else {
            Self::Finite(p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedJson {
    pub outer_r: Exponent,
    pub inner_q: Exponent,
    pub block: usize,
}

/// Exactly one of `p` and `mixed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<MixedJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Default for NormJson {
    fn default() -> Self {
        Self { p: Some(Exponent::Finite(2.0)), mixed: None, weights: None }
    }
}

impl NormJson {
    pub fn to_spec(&self) -> Result<MixedNormSpec, CliError> {
        let spec = match (&self.p, &self.mixed) {
            (Some(p), None) => MixedNormSpec::p(p.value()),
            (None, Some(m)) => MixedNormSpec::mixed(m.outer_r.value(), m.inner_q.value(), m.block),
            _ => return Err(CliError::Config("a norm needs exactly one of \"p\" and \"mixed\"".into())),
        };
        Ok(match &self.weights {
            Some(w) => spec.with_weights(w.clone()),
            None => spec,
        })
    }

    pub fn from_spec(spec: &MixedNormSpec) -> Self {
        let (p, mixed) = match spec.kind {
            NormKind::P(p) => (Some(Exponent::from_value(p)), None),
            NormKind::Mixed { outer_r, inner_q, block } => {
                (None, Some(MixedJson { outer_r: Exponent::from_value(outer_r), inner_q: Exponent::from_value(inner_q), block }))
            }
        };
        Self { p, mixed, weights: spec.weights.clone() }
    }
}

pub fn vector_to_json(x: &CVec) -> Vec<[f64; 2]> {
    x.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&[re, im]| C64::new(re, im)))
}

/// Kind of an R-type bound, as written in witness files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    R,
    Gamma,
    Lq,
}

/// A reported lower bound together with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateJson {
    pub kind: KindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub lower_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub singleton: f64,
    pub indices: Vec<usize>,
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
}

impl EstimateJson {
    pub fn from_estimate(e: &BoundEstimate) -> Self {
        let (kind, q) = match e.kind {
            BoundKind::Rademacher => (KindJson::R, None),
            BoundKind::Gaussian => (KindJson::Gamma, None),
            BoundKind::Lq(q) => (KindJson::Lq, Some(q)),
        };
        Self {
            kind,
            q,
            lower_bound: e.lower_bound,
            stderr: e.stderr,
            singleton: e.singleton,
            indices: e.witness.indices.clone(),
            vectors: e.witness.vectors.iter().map(vector_to_json).collect(),
            mc_seed: e.witness.mc.map(|m| m.0),
            mc_samples: e.witness.mc.map(|m| m.1),
        }
    }

    pub fn bound_kind(&self) -> Result<BoundKind, CliError> {
        Ok(match (self.kind, self.q) {
            (KindJson::R, None) => BoundKind::Rademacher,
            (KindJson::Gamma, None) => BoundKind::Gaussian,
            (KindJson::Lq, Some(q)) => BoundKind::Lq(q),
            _ => return Err(CliError::Config("\"q\" is required for kind lq and only allowed there".into())),
        })
    }

    pub fn witness(&self) -> Result<Witness, CliError> {
        let mc = match (self.mc_seed, self.mc_samples) {
            (Some(s), Some(n)) => Some((s, n)),
            (None, None) => None,
            _ => return Err(CliError::Config("mc_seed and mc_samples go together".into())),
        };
        Ok(Witness { indices: self.indices.clone(), vectors: self.vectors.iter().map(|v| vector_from_json(v)).collect(), mc })
    }
}

/// A family with its norm and the estimates computed on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDump {
    pub family: String,
    pub members: Vec<OperatorJson>,
    pub norm: NormJson,
    pub estimates: Vec<EstimateJson>,
}

impl WitnessDump {
    pub fn new(fam: &OperatorFamily, norm: &MixedNormSpec, estimates: &[BoundEstimate]) -> Self {
        let members = fam
            .members
            .iter()
            .enumerate()
            .map(|(k, m)| OperatorJson {
                dim: m.nrows(),
                entries: m.transpose().iter().map(|z| [z.re, z.im]).collect(),
                label: format!("{}[{k}]", fam.label),
                claimed_angle: None,
            })
            .collect();
        Self {
            family: fam.label.clone(),
            members,
            norm: NormJson::from_spec(norm),
            estimates: estimates.iter().map(EstimateJson::from_estimate).collect(),
        }
    }

    pub fn family(&self) -> Result<(OperatorFamily, MixedNormSpec), CliError> {
        let members =
            self.members.iter().map(|m| m.to_operator().map(LinearOperator::into_entries)).collect::<Result<Vec<_>, _>>()?;
        Ok((OperatorFamily::new(members, self.family.clone())?, self.norm.to_spec()?))
    }
}

/// One dump or a list of them, as written by `bounds` and `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WitnessFile {
    One(WitnessDump),
    Many(Vec<WitnessDump>),
}

impl WitnessFile {
    pub fn into_vec(self) -> Vec<WitnessDump> {
        match self {
            Self::One(d) => vec![d],
            Self::Many(v) => v,
        }
    }
}
