use std::f64::consts::PI;

use sectorsum_core::operator::{estimate_sector_profile, DEFAULT_RAY_SAMPLES};
use sectorsum_core::{linalg, LinearOperator, C64};

use super::{rel_mat, SuiteContext, Value};
use crate::cases;
use crate::report::{Check, Provenance, RowSink};

pub fn run(ctx: &SuiteContext, sink: &mut RowSink) {
    sink.record("identity", "profile_at_3pi_4", Check::AtMost(1e-5), Provenance::Trivial, || -> Value {
        let p = estimate_sector_profile(&LinearOperator::identity(2), &[3.0 * PI / 4.0], DEFAULT_RAY_SAMPLES)?;
        Ok((p.constants[0] - 1.0).abs())
    });

    sink.record("rotated_pi_6", "resolvent_identity", Check::AtMost(1e-11), Provenance::Trivial, || -> Value {
        let a = cases::rotated_diagonalizable(PI / 6.0, ctx.seed)?;
        let (l, m) = (C64::from_polar(2.0, 3.0 * PI / 4.0), C64::from_polar(0.5, -2.0 * PI / 3.0));
        let (rl, rm) = (a.resolvent_matrix(l)?, a.resolvent_matrix(m)?);
        Ok(rel_mat(&(&rl - &rm), &(&rl * &rm * (m - l))))
    });

    sink.record("rotated_pi_6", "spectral_angle", Check::AtMost(1e-10), Provenance::Trivial, || -> Value {
        Ok((cases::rotated_diagonalizable(PI / 6.0, ctx.seed)?.spectral_angle() - PI / 6.0).abs())
    });

    sink.record("heat-8x16", "kronecker_commutator", Check::AtMost(1e-13), Provenance::Trivial, || -> Value {
        let p = cases::heat_pair(8, 16)?;
        let (a, b) = (p.a.entries(), p.b.entries());
        Ok(linalg::frobenius(&(a * b - b * a)) / (linalg::frobenius(a) * linalg::frobenius(b)))
    });

    // A^{-1} has the same sector constants as a normal A, up to ray sampling
    sink.record("normal_diag", "inverse_profile", Check::AtMost(1e-3), Provenance::DerivedOracle, || -> Value {
        let d = [C64::new(1.0, 0.0), C64::from_polar(3.0, PI / 6.0), C64::from_polar(0.5, -PI / 4.0)];
        let a = LinearOperator::from_diagonal(&d, "normal")?;
        let angles = [PI / 2.0, 3.0 * PI / 4.0];
        let p = estimate_sector_profile(&a, &angles, 1025)?;
        let q = estimate_sector_profile(&a.inverse()?, &angles, 1025)?;
        Ok(p.constants.iter().zip(&q.constants).map(|(x, y)| (x - y).abs() / x).fold(0.0, f64::max))
    });
}
