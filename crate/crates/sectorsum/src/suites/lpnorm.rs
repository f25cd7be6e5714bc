use std::f64::consts::PI;

use serde::Serialize;

use sectorsum_core::lpnorms::{self, NormValue, SquareFunctionSpec};
use sectorsum_core::{linalg, rng, HolomorphicSymbol, LinearOperator, MixedNormSpec};

use super::{par_cases, SuiteContext, Value};
use crate::cases;
use crate::config::{LpKind, LpnormCase};
use crate::error::CliError;
use crate::model::vector_from_json;
use crate::report::{Check, Provenance, RowSink};

/// One line of the `lpnorm` subcommand output.
#[derive(Debug, Clone, Serialize)]
pub struct LpnormRecord {
    pub label: String,
    pub symbol: String,
    #[serde(rename = "p/q")]
    pub exponent: f64,
    pub theta: f64,
    pub value: f64,
    #[serde(rename = "grid_N")]
    pub grid_n: usize,
    pub refinement_defect: f64,
}

/// Evaluates one configured norm; `x` defaults to stream `index` of `seed`.
pub fn evaluate_case(case: &LpnormCase, seed: u64, index: u64) -> Result<LpnormRecord, CliError> {
    let a = case.operator.build()?;
    let symbol = HolomorphicSymbol::parse(&case.symbol, case.rho.unwrap_or(PI / 2.0))?;
    let x = match &case.x {
        Some(v) => vector_from_json(v),
        None => rng::complex_gaussian(&mut rng::substream(seed, index), a.dim()),
    };
    let spec = SquareFunctionSpec::new(symbol, case.exponent, case.theta, case.norm.to_spec()?)?;
    let v: NormValue = match case.kind {
        LpKind::Lp => lpnorms::lp_norm_detailed(&a, &x, &spec)?,
        LpKind::Tl => lpnorms::tl_norm_detailed(&a, &x, &spec)?,
    };
    Ok(LpnormRecord {
        label: case.label.clone(),
        symbol: case.symbol.clone(),
        exponent: case.exponent,
        theta: case.theta,
        value: v.value,
        grid_n: v.grid_n,
        refinement_defect: v.defect,
    })
}

/// Operator of gamma case `k`: positive diagonal for even `k`, SPD otherwise.
fn gamma_case(seed: u64, k: u64) -> sectorsum_core::Result<(LinearOperator, sectorsum_core::CVec)> {
    let dim = 1 + k as usize % 4;
    let mut r = rng::substream(seed, 2000 + k);
    let a = if k.is_multiple_of(2) {
        let d: Vec<f64> = (0..dim).map(|_| rng::uniform(&mut r, 0.2, 5.0)).collect();
        LinearOperator::from_real_diagonal(&d, format!("diag{k}"))?
    } else {
        cases::spd(dim, seed.wrapping_add(k))?
    };
    Ok((a, rng::complex_gaussian(&mut r, dim)))
}

pub const GAMMA_CASES: u64 = 50;
pub const GAMMA_SAMPLES: usize = 2000;

pub fn run(ctx: &SuiteContext, sink: &mut RowSink) -> Result<(), CliError> {
    let seed = ctx.seed;
    sink.record("spd6", "lp2_beta_oracle", Check::AtMost(1e-9), Provenance::DerivedOracle, || -> Value {
        let a = cases::spd(6, seed)?;
        let spec = SquareFunctionSpec::euclidean(HolomorphicSymbol::z_over_1pz_sq());
        let mut r = rng::substream(seed, 1);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let x = rng::complex_gaussian(&mut r, 6);
            let v = lpnorms::lp_norm(&a, &x, &spec)?;
            let oracle = linalg::vec_norm2(&x).powi(2) / 6.0;
            worst = worst.max((v * v - oracle).abs() / oracle);
        }
        Ok(worst)
    });

    let ks: Vec<u64> = (0..GAMMA_CASES).collect();
    let mut inner = sink.fork();
    par_cases(&mut inner, &ks, |&k, s| {
        s.record(format!("{k}"), "z", Check::AtMost(3.0), Provenance::DerivedOracle, || -> Value {
            let (a, x) = gamma_case(seed, k)?;
            let phi = HolomorphicSymbol::z_over_1pz_sq();
            let g = lpnorms::gamma_norm(&a, &phi, &x, None, &MixedNormSpec::euclidean(), GAMMA_SAMPLES, seed ^ (k << 8))?;
            let l = lpnorms::lp_norm(&a, &x, &SquareFunctionSpec::euclidean(phi))?;
            Ok((g.estimate - l).abs() / g.stderr)
        });
    });
    let passed = inner.rows.iter().filter(|r| r.value_re <= 3.0).count();
    sink.push(
        "hilbert_gamma",
        "gamma_within_3se_rate",
        passed as f64 / GAMMA_CASES as f64,
        Check::AtLeast(0.95),
        Provenance::DerivedOracle,
    );

    sink.record("spd4", "tl2_equals_lp2", Check::AtMost(1e-10), Provenance::Trivial, || -> Value {
        let a = cases::spd(4, seed)?;
        let spec = SquareFunctionSpec::new(HolomorphicSymbol::z2_over_1pz_4(), 2.0, 0.5, MixedNormSpec::euclidean())?;
        let x = rng::complex_gaussian(&mut rng::substream(seed, 3), 4);
        let (tl, lp) = (lpnorms::tl_norm(&a, &x, &spec)?, lpnorms::lp_norm(&a, &x, &spec)?);
        Ok((tl - lp).abs() / lp)
    });

    // sum_k |x_k|^2 a_k^{2 theta} B(3, 5) for theta = 1/2
    sink.record("diag_1_4", "tl_beta_oracle", Check::AtMost(1e-9), Provenance::DerivedOracle, || -> Value {
        let d = [1.0, 4.0];
        let a = LinearOperator::from_real_diagonal(&d, "d")?;
        let spec = SquareFunctionSpec::new(HolomorphicSymbol::z2_over_1pz_4(), 2.0, 0.5, MixedNormSpec::euclidean())?;
        let x = rng::complex_gaussian(&mut rng::substream(seed, 4), 2);
        let oracle: f64 = x.iter().zip(d).map(|(z, a)| z.norm_sqr() * a / 105.0).sum();
        let v = lpnorms::tl_norm(&a, &x, &spec)?;
        Ok((v * v - oracle).abs() / oracle)
    });

    if let Some(cfg) = &ctx.problems.lpnorm {
        let indexed: Vec<(u64, &LpnormCase)> = cfg.cases.iter().enumerate().map(|(k, c)| (k as u64, c)).collect();
        par_cases(sink, &indexed, |(k, case), s| {
            s.record(
                format!("config:{}", case.label),
                "refinement_defect",
                Check::AtMost(1e-7),
                Provenance::DerivedOracle,
                || evaluate_case(case, cfg.seed, *k).map(|r| r.refinement_defect),
            );
        });
    }
    Ok(())
}
