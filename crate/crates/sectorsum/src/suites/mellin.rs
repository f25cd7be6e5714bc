use std::f64::consts::PI;

use sectorsum_core::dore_venni::{self, DoreVenniKernel};
use sectorsum_core::gamma::{self, symmetric_grid};
use sectorsum_core::mellin::{self, mellin_closed_form, mellin_rule, power_family};
use sectorsum_core::{linalg, rng, CMat, CVec, ContourKind, ContourQuadrature, HolomorphicSymbol, LinearOperator, C64};

use super::{rel_c, SuiteContext, Value};
use crate::report::{Check, Provenance, RowSink};

/// Sections of the mellin suite, each available on its own through the `mellin` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MellinTable {
    Gamma,
    Closedform,
    Plancherel,
    Nielsen,
    Dorevenni,
}

pub const MELLIN_TABLES: [MellinTable; 5] =
    [MellinTable::Gamma, MellinTable::Closedform, MellinTable::Plancherel, MellinTable::Nielsen, MellinTable::Dorevenni];

impl MellinTable {
    pub fn run(self, seed: u64, sink: &mut RowSink) {
        match self {
            Self::Gamma => gamma_table(sink),
            Self::Closedform => closed_form_table(sink),
            Self::Plancherel => plancherel_table(seed, sink),
            Self::Nielsen => nielsen_table(sink),
            Self::Dorevenni => dore_venni_table(seed, sink),
        }
    }
}

pub fn run(ctx: &SuiteContext, sink: &mut RowSink) {
    for t in MELLIN_TABLES {
        t.run(ctx.seed, sink);
    }
}

fn gamma_table(sink: &mut RowSink) {
    match gamma::gamma_identities(&[0.1, 0.5, 1.0, 2.0, 5.0, 10.0]) {
        Ok(rows) => {
            for r in rows {
                sink.push(
                    format!("sigma={}", r.sigma),
                    "gamma_vertical_identities",
                    r.max_rel_error,
                    Check::AtMost(1e-10),
                    Provenance::PaperTable,
                );
            }
        }
        Err(e) => sink.push_error("vertical", "gamma_vertical_identities", &e, Provenance::PaperTable),
    }
    sink.record("lattice", "gamma_recurrence", Check::AtMost(1e-11), Provenance::Trivial, || -> Value {
        let mut worst = 0.0f64;
        for re in [-2.5, -0.5, 0.3, 1.0, 4.5] {
            for im in [-3.0, 0.5, 2.0] {
                let z = C64::new(re, im);
                worst = worst.max(rel_c(gamma::gamma(z + 1.0)?, gamma::gamma(z)? * z));
                // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
                let refl = gamma::gamma(z)? * gamma::gamma(C64::new(1.0, 0.0) - z)?;
                worst = worst.max(rel_c(refl, C64::new(PI, 0.0) / (z * PI).sin()));
            }
        }
        Ok(worst)
    });
    sink.record("quarter", "gamma_quarter_constant", Check::AtLeast(1.0), Provenance::DerivedOracle, || {
        gamma::quarter_gamma_constant(&symmetric_grid(10.0, 0.05))
    });
}

fn closed_form_table(sink: &mut RowSink) {
    let args = [C64::new(1.0, 0.0), C64::from_polar(1.0, PI / 4.0), C64::from_polar(1.0, -2.0 * PI / 5.0)];
    for alpha in [0.0, 0.25, 1.0] {
        for beta in [0.5, 1.0, 2.0, 3.0] {
            if beta <= alpha {
                continue;
            }
            for a in args {
                for im in [-2.0, 0.0, 1.5] {
                    let case = format!("alpha={alpha} beta={beta} arg_a={:.4} im_s={im}", a.arg());
                    sink.record(case, "mellin_closed_form", Check::AtMost(1e-8), Provenance::PaperTable, || -> Value {
                        let s = C64::new(0.5 * (beta - 2.0 * alpha), im);
                        let quad = mellin_rule(alpha, beta - alpha, 0.5 * (PI - a.arg().abs()), s)?;
                        let num = mellin::mellin_numeric(|t| Ok(power_family(alpha, beta, a, t)), s, &quad)?;
                        Ok(rel_c(num, mellin_closed_form(alpha, beta, a, s)?))
                    });
                }
            }
        }
    }
    // f = 1/(1+t), g = t/(1+t)^2, fg = t/(1+t)^3
    sink.record("1/(1+t) * t/(1+t)^2", "mellin_convolution", Check::AtMost(1e-6), Provenance::DerivedOracle, || -> Value {
        let one = C64::new(1.0, 0.0);
        let s = C64::new(0.5, 0.3);
        let conv = mellin::mellin_convolution(
            |z| mellin_closed_form(0.0, 1.0, one, z),
            |z| mellin_closed_form(1.0, 2.0, one, z),
            s,
            0.25,
            30.0,
            6000,
        )?;
        Ok(rel_c(conv, mellin_closed_form(1.0, 3.0, one, s)?))
    });
}

/// `V diag(d) V^{-1}` with a fixed well-conditioned `V` and spectral angle `angle`.
fn sectorial_matrix(angle: f64) -> sectorsum_core::Result<LinearOperator> {
    let d: Vec<C64> = [0.5, 2.0, 7.0].iter().enumerate().map(|(k, &m)| C64::from_polar(m, angle * (1.0 - k as f64))).collect();
    let v = CMat::from_fn(3, 3, |i, j| C64::new(if i == j { 1.0 } else { 0.3 * (i + 2 * j) as f64 / 5.0 }, 0.0));
    let m = &v * CMat::from_diagonal(&CVec::from_vec(d)) * linalg::inverse(&v)?;
    LinearOperator::new(m, format!("angle{angle:.4}"))
}

fn plancherel_table(seed: u64, sink: &mut RowSink) {
    sink.record("t/(1+t)^2", "plancherel", Check::AtMost(1e-6), Provenance::DerivedOracle, || -> Value {
        let quad = mellin_rule(1.0, 1.0, PI / 2.0, C64::new(0.0, 0.0))?;
        let f = |t: f64| Ok(CVec::from_element(1, C64::new(t / (1.0 + t).powi(2), 0.0)));
        Ok(mellin::plancherel_pairing(f, f, &quad, 40.0)?.defect)
    });
    sink.record("key_pairing_scalar", "plancherel", Check::AtMost(1e-6), Provenance::DerivedOracle, || -> Value {
        let rho = PI / 2.0;
        let (a, b) = (1.5, 0.7);
        let (ps, ph) = (HolomorphicSymbol::psi_plus(rho), HolomorphicSymbol::phi_plus(rho));
        let quad = ContourQuadrature::auto(ContourKind::HalflineDtOverT, 0.5, 2.0, 0.5, 0.5, 0.5, 1e-13)?;
        let left = |t: f64| Ok(CVec::from_element(1, ps.eval(C64::new(t * b, 0.0))? * ph.eval(C64::new(t * a, 0.0))? * 2.0));
        let right = |t: f64| Ok(CVec::from_element(1, ph.eval(C64::new(t * a, 0.0))? * -1.0));
        Ok(mellin::plancherel_pairing(left, right, &quad, 60.0)?.defect)
    });

    let psi = HolomorphicSymbol::z_over_1pz_sq();
    for (k, (name, angle)) in [("0", 0.0), ("pi/6", PI / 6.0), ("pi/3", PI / 3.0)].into_iter().enumerate() {
        let x = rng::complex_gaussian(&mut rng::substream(seed, 300 + k as u64), 3);
        for sigma in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            sink.record(
                format!("angle={name} sigma={sigma}"),
                "bip_identity",
                Check::AtMost(1e-7),
                Provenance::DerivedOracle,
                || -> Value {
                    let a = sectorial_matrix(angle)?;
                    Ok(mellin::mellin_operator_identity(&psi, &a, sigma, &x)?.defect)
                },
            );
        }
    }
}

fn nielsen_table(sink: &mut RowSink) {
    let grid = symmetric_grid(10.0, 0.05);
    for k in 1..=9 {
        let tau = k as f64 / 10.0;
        match gamma::nielsen_bounds_check(tau, &grid) {
            Ok(r) => {
                let case = format!("tau={tau}");
                sink.push(
                    case.clone(),
                    "nielsen_violations",
                    r.violations.len() as f64,
                    Check::AtMost(0.0),
                    Provenance::PaperTable,
                );
                sink.push(
                    case,
                    "nielsen_equality",
                    r.equality_defect.unwrap_or(f64::NAN),
                    Check::AtMost(1e-12),
                    Provenance::PaperTable,
                );
            }
            Err(e) => sink.push_error(format!("tau={tau}"), "nielsen_violations", &e, Provenance::PaperTable),
        }
    }
}

/// Sum of four Gaussian bumps with seeded centres, widths and coefficients.
fn smooth_input(dim: usize, seed: u64) -> impl Fn(f64) -> CVec {
    let mut r = rng::seeded(seed);
    let bumps: Vec<(f64, f64, CVec)> = (0..4)
        .map(|_| (rng::uniform(&mut r, -3.0, 3.0), rng::uniform(&mut r, 0.5, 1.5), rng::complex_gaussian(&mut r, dim)))
        .collect();
    move |s| {
        let mut v = CVec::zeros(dim);
        for (mu, w, c) in &bumps {
            v += c * C64::new((-(s - mu) * (s - mu) / (2.0 * w * w)).exp(), 0.0);
        }
        v
    }
}

fn dore_venni_table(seed: u64, sink: &mut RowSink) {
    let rho = 3.0 * PI / 4.0;
    let bs = [("[1]", vec![1.0]), ("diag(1,4)", vec![1.0, 4.0])];
    for (name, d) in &bs {
        let b = || LinearOperator::from_real_diagonal(d, *name);
        sink.record(format!("B={name}"), "dv_ratio_refinement", Check::AtMost(0.2), Provenance::DerivedOracle, || -> Value {
            let coarse = DoreVenniKernel::new(b()?, rho, 1.0 / 16.0, 8.0)?;
            let fine = DoreVenniKernel::new(b()?, rho, 1.0 / 32.0, 16.0)?;
            let r1 = dore_venni::dore_venni_convolution(&coarse, smooth_input(d.len(), seed))?;
            let r2 = dore_venni::dore_venni_convolution(&fine, smooth_input(d.len(), seed))?;
            if !(r1.ratio.is_finite() && r1.ratio > 0.0) {
                return Ok(f64::INFINITY);
            }
            Ok((r2.ratio / r1.ratio - 1.0).abs())
        });
        sink.record(format!("B={name}"), "dv_block_defect", Check::AtMost(1e-12), Provenance::Trivial, || -> Value {
            let k = DoreVenniKernel::new(b()?, rho, 1.0 / 16.0, 8.0)?;
            Ok(dore_venni::dore_venni_convolution(&k, smooth_input(d.len(), seed))?.block_defect)
        });
        sink.record(
            format!("B={name}"),
            "dv_envelope_vs_simpson",
            Check::AtMost(1e-6),
            Provenance::DerivedOracle,
            || -> Value {
                let k = DoreVenniKernel::new(b()?, rho, 0.1, 8.0)?;
                let c = dore_venni::envelope_integral(&k);
                Ok((c - dore_venni::envelope_integral_simpson(&k)?).abs() / c)
            },
        );
        sink.record(format!("B={name}"), "dv_envelope_minus_g1", Check::AtLeast(0.0), Provenance::DerivedOracle, || -> Value {
            let k = DoreVenniKernel::new(b()?, rho, 0.1, 8.0)?;
            Ok(dore_venni::envelope_integral(&k) - dore_venni::g1_strong_l1(&k)?)
        });
    }
    // outside the admissible range the envelope keeps growing with the window
    sink.record(
        "B=diag(1,4) rho=pi+0.2",
        "dv_inadmissible_growth",
        Check::AtLeast(2.0),
        Provenance::DerivedOracle,
        || -> Value {
            let b = LinearOperator::from_real_diagonal(&[1.0, 4.0], "b")?;
            let k1 = DoreVenniKernel::new_unchecked(b.clone(), PI + 0.2, 0.1, 4.0)?;
            let k2 = DoreVenniKernel::new_unchecked(b, PI + 0.2, 0.1, 8.0)?;
            Ok(dore_venni::envelope_integral(&k2) / dore_venni::envelope_integral(&k1))
        },
    );
}
