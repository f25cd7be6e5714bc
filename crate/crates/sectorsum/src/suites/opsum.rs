use serde::Serialize;

use sectorsum_core::opsum::{self, OperatorSumProblem};
use sectorsum_core::{linalg, rng, MixedNormSpec, Result};

use super::{par_cases, rel_c, rel_mat, rel_vec, SuiteContext, Value};
use crate::cases::{self, PairCase};
use crate::config::OpsumCase;
use crate::error::CliError;
use crate::report::{Check, Provenance, RowSink};

pub fn pair_from_case(case: &OpsumCase, norm: MixedNormSpec) -> std::result::Result<OperatorSumProblem, CliError> {
    let (a, b) = (case.a.build()?, case.b.build()?);
    Ok(match (case.kronecker, case.rho) {
        (true, rho) => OperatorSumProblem::kronecker(&a, &b, rho, norm)?,
        (false, Some(rho)) => OperatorSumProblem::with_rho(a, b, rho, norm)?,
        (false, None) => OperatorSumProblem::new(a, b, norm)?,
    })
}

/// One line of the `opsum` subcommand output.
#[derive(Debug, Clone, Serialize)]
pub struct OpsumSummary {
    pub label: String,
    pub dim: usize,
    pub rho: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C_hom")]
    pub c_hom: f64,
    #[serde(rename = "norm_AS")]
    pub norm_as: f64,
    #[serde(rename = "norm_BS")]
    pub norm_bs: f64,
    /// Euclidean norms only.
    pub dpg_bound: Option<f64>,
    pub residual: f64,
}

impl OpsumSummary {
    pub fn compute(label: &str, prob: &OperatorSumProblem, trials: usize, seed: u64) -> Result<Self> {
        let s = opsum::build_sum_inverse(prob)?;
        let c = opsum::closedness_constant(prob, trials, seed)?;
        let dpg_bound = if prob.norm.is_euclidean() { Some(opsum::dpg_bound(prob)?.bound) } else { None };
        Ok(Self {
            label: label.to_string(),
            dim: prob.dim(),
            rho: prob.rho,
            n: prob.quad.node_count,
            c_hom: c.c_hom,
            norm_as: c.norm_as,
            norm_bs: c.norm_bs,
            dpg_bound,
            residual: opsum::verify_inverse(prob, &s),
        })
    }
}

fn inverse_rows(label: &str, p: &OperatorSumProblem, sink: &mut RowSink) {
    let s = match opsum::build_sum_inverse(p) {
        Ok(s) => s,
        Err(e) => return sink.push_error(label, "inverse_residual", &e, Provenance::DerivedOracle),
    };
    sink.push(label, "inverse_residual", opsum::verify_inverse(p, &s), Check::AtMost(1e-8), Provenance::DerivedOracle);
    sink.record(label, "lu_agreement", Check::AtMost(1e-8), Provenance::DerivedOracle, || -> Value {
        let lu = linalg::inverse(&(p.a.entries() + p.b.entries()))?;
        Ok(rel_mat(s.entries(), &lu))
    });
}

/// `max(|AS|, |BS|) <= C_hom <= |AS| + |BS|`; the value is the violation.
fn closedness_row(label: &str, p: &OperatorSumProblem, trials: usize, seed: u64, sink: &mut RowSink) {
    sink.record(label, "closedness_chain", Check::AtMost(1e-9), Provenance::DerivedOracle, || -> Value {
        let c = opsum::closedness_constant(p, trials, seed)?;
        let scale = c.norm_as + c.norm_bs;
        Ok((c.norm_as.max(c.norm_bs) - c.c_hom).max(c.c_hom - scale).max(0.0) / scale)
    });
}

fn dpg_row(label: &str, p: &OperatorSumProblem, sink: &mut RowSink) {
    sink.record(label, "dpg_slack", Check::AtLeast(0.0), Provenance::DerivedOracle, || -> Value {
        let d = opsum::dpg_bound(p)?;
        Ok(d.bound - d.norm_as)
    });
}

fn standard_case(case: &PairCase, seed: u64, index: u64, sink: &mut RowSink) {
    let p = &case.problem;
    let label = case.label.as_str();
    inverse_rows(label, p, sink);
    let mut r = rng::substream(seed, 1000 + index);
    let x = rng::complex_gaussian(&mut r, p.dim());
    let xp = rng::complex_gaussian(&mut r, p.dim());
    sink.record(label, "as_consistency", Check::AtMost(1e-8), Provenance::DerivedOracle, || -> Value {
        let direct = p.a.entries() * opsum::apply_sum_inverse(p, &x)?;
        Ok(rel_vec(&opsum::apply_as(p, &x)?, &direct))
    });
    if case.diagonal {
        sink.record(label, "key_lemma_pairing", Check::AtMost(1e-7), Provenance::DerivedOracle, || -> Value {
            let s = linalg::inverse(&(p.a.entries() + p.b.entries()))?;
            let exact = linalg::bilinear(&(p.a.entries() * s * &x), &xp);
            Ok(rel_c(opsum::reconstruct_as_pairing(p, &x, &xp)?, exact))
        });
    }
    dpg_row(label, p, sink);
    closedness_row(label, p, 100, seed ^ index, sink);
}

pub fn run(ctx: &SuiteContext, sink: &mut RowSink) -> std::result::Result<(), CliError> {
    let pairs = cases::standard_pairs(ctx.seed)?;
    let indexed: Vec<(u64, &PairCase)> = pairs.iter().enumerate().map(|(k, c)| (k as u64, c)).collect();
    par_cases(sink, &indexed, |(k, case), s| standard_case(case, ctx.seed, *k, s));

    if let Some(cfg) = &ctx.problems.opsum {
        let norm = cfg.norm.to_spec()?;
        let problems = cfg
            .problems
            .iter()
            .map(|c| pair_from_case(c, norm.clone()).map(|p| (format!("config:{}", c.label), p)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        par_cases(sink, &problems, |(label, p), s| {
            inverse_rows(label, p, s);
            if p.norm.is_euclidean() {
                dpg_row(label, p, s);
            }
            closedness_row(label, p, cfg.trials, cfg.seed, s);
        });
    }
    Ok(())
}
