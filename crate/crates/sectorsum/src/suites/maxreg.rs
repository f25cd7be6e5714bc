use std::f64::consts::PI;

use sectorsum_core::maxreg::{self, MaxRegConstant, ParabolicProblem, RefinementRow, YThetaSpec};
use sectorsum_core::operator::dirichlet_laplacian_1d;
use sectorsum_core::{rng, CVec, HolomorphicSymbol, LinearOperator, C64};

use super::{rel_vec, SuiteContext, Value};
use crate::config::MaxregConfig;
use crate::error::CliError;
use crate::report::{Check, Provenance, RowSink};

/// Heat problem of a config with unit forcing; `dt` overrides `t_end / m`.
pub fn problem_from_config(cfg: &MaxregConfig) -> Result<ParabolicProblem, CliError> {
    let a0 = dirichlet_laplacian_1d(cfg.n, 1.0 / (cfg.n as f64 + 1.0))?;
    let dt = cfg.dt.unwrap_or(cfg.t_end / cfg.m as f64);
    let f = CVec::from_element(cfg.n * cfg.m, C64::new(1.0, 0.0));
    let ytheta =
        YThetaSpec { symbol: HolomorphicSymbol::parse(&cfg.symbol, PI / 2.0)?, theta: cfg.theta, q: cfg.q, p_space: cfg.p_space };
    Ok(ParabolicProblem::new(a0, cfg.m, dt, f)?.with_p(cfg.p)?.with_ytheta(ytheta)?)
}

fn opsum_vs_mild(prob: &ParabolicProblem, seed: u64) -> Value {
    let prob = prob.clone().with_forcing(rng::complex_gaussian(&mut rng::seeded(seed), prob.dim()))?;
    let sol = maxreg::solve_opsum(&prob, None, None)?;
    Ok(rel_vec(&sol.u, &maxreg::solve_mild(&prob)?))
}

/// `hi / lo - 1` over the refinement table.
fn spread(c: &MaxRegConstant, v: impl Fn(&RefinementRow) -> f64) -> f64 {
    let xs: Vec<f64> = c.refinement_table.iter().map(v).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    hi / lo - 1.0
}

/// `C_p >= max(|AS|, |BS|)` on every level; the value is the shortfall.
fn chain_rows(case: &str, c: &MaxRegConstant, sink: &mut RowSink) {
    for r in &c.refinement_table {
        let short = (r.norm_as.max(r.norm_bs) - r.c_p).max(0.0);
        sink.push(format!("{case} m={}", r.m), "norm_chain", short, Check::AtMost(1e-9), Provenance::DerivedOracle);
    }
}

pub fn run(ctx: &SuiteContext, sink: &mut RowSink) -> Result<(), CliError> {
    let seed = ctx.seed;
    for m in [16, 32, 64] {
        sink.record(format!("heat-8x{m}"), "opsum_vs_mild", Check::AtMost(1e-6), Provenance::DerivedOracle, || {
            opsum_vs_mild(&ParabolicProblem::heat(8, m, 1.0)?, seed.wrapping_add(m as u64))
        });
    }

    let heat = ParabolicProblem::heat(8, 16, 1.0)?;
    match maxreg::maxreg_constant(&heat, 8, seed, 3) {
        Ok(c) => {
            sink.push("heat-8 m=16,32,64", "c_p_spread", spread(&c, |r| r.c_p), Check::AtMost(0.2), Provenance::DerivedOracle);
            sink.push(
                "heat-8 m=16,32,64",
                "c_ytheta_spread",
                spread(&c, |r| r.c_ytheta),
                Check::AtMost(0.3),
                Provenance::DerivedOracle,
            );
            chain_rows("heat-8", &c, sink);
            sink.record("heat-8x16", "final_step_excess", Check::AtMost(1e-12), Provenance::Trivial, || -> Value {
                let mut last = CVec::zeros(heat.dim());
                last[heat.m - 1] = C64::new(1.0, 0.0);
                Ok(maxreg::lp_ratio(&heat, &last)? - c.c_p)
            });
        }
        Err(e) => sink.push_error("heat-8 m=16,32,64", "c_p_spread", &e, Provenance::DerivedOracle),
    }

    // A0 = 2I: the measured |A(A+B)^{-1}| against a dense SVD
    sink.record("2I m=16", "norm_as_vs_svd", Check::AtMost(1e-6), Provenance::DerivedOracle, || -> Value {
        let a0 = LinearOperator::from_real_diagonal(&[2.0, 2.0], "2I")?;
        let prob = ParabolicProblem::new(a0, 16, 1.0 / 16.0, CVec::zeros(32))?;
        let row = maxreg::maxreg_constant(&prob, 20, seed, 1)?.refinement_table[0];
        let sp = prob.sum_problem(None)?;
        let inv = sectorsum_core::linalg::inverse(&(sp.a.entries() + sp.b.entries()))?;
        let svd = (sp.a.entries() * inv).singular_values()[0];
        Ok((row.norm_as - svd).abs() / svd)
    });

    if let Some(cfg) = &ctx.problems.maxreg {
        let prob = problem_from_config(cfg)?;
        let case = format!("config:n={} m={}", cfg.n, cfg.m);
        sink.record(case.clone(), "opsum_vs_mild", Check::AtMost(1e-6), Provenance::DerivedOracle, || {
            opsum_vs_mild(&prob, cfg.seed)
        });
        match maxreg::maxreg_constant(&prob, cfg.trials, cfg.seed, cfg.levels) {
            Ok(c) => chain_rows(&format!("config:n={}", cfg.n), &c, sink),
            Err(e) => sink.push_error(case, "norm_chain", &e, Provenance::DerivedOracle),
        }
    }
    Ok(())
}
