use std::f64::consts::PI;

use sectorsum_core::calculus::{self, bip_profile, fractional_power, functional_calculus, imaginary_power, symbol_matrix};
use sectorsum_core::{linalg, HolomorphicSymbol};

use super::{rel_mat, SuiteContext, Value};
use crate::cases;
use crate::report::{Check, Provenance, RowSink};

pub fn run(ctx: &SuiteContext, sink: &mut RowSink) {
    let seed = ctx.seed;
    sink.record("spd5", "sqrt_squared", Check::AtMost(1e-10), Provenance::DerivedOracle, || -> Value {
        let a = cases::spd(5, seed)?;
        let r = fractional_power(&a, 0.5)?;
        Ok(rel_mat(&(r.entries() * r.entries()), a.entries()))
    });

    sink.record("rotated_pi_6", "contour_vs_eigen", Check::AtMost(1e-9), Provenance::DerivedOracle, || -> Value {
        let a = cases::rotated_diagonalizable(PI / 6.0, seed)?;
        let phi = HolomorphicSymbol::z_over_1pz_sq();
        let contour = calculus::functional_calculus_auto(&a, &phi)?;
        let spectral = linalg::eigen(a.entries())?.try_apply(|z| phi.eval(z))?;
        Ok(rel_mat(contour.entries(), &spectral))
    });

    sink.record("rotated_pi_6", "contour_refinement", Check::AtMost(1e-10), Provenance::DerivedOracle, || -> Value {
        let a = cases::rotated_diagonalizable(PI / 6.0, seed)?;
        let phi = HolomorphicSymbol::z2_over_1pz_4();
        let quad = calculus::auto_contour(a.entries(), &phi)?;
        let coarse = functional_calculus(&a, &phi, &quad)?;
        let fine = functional_calculus(&a, &phi, &quad.refined()?)?;
        Ok(rel_mat(coarse.entries(), fine.entries()))
    });

    sink.record("rotated_pi_3", "imaginary_group_law", Check::AtMost(1e-10), Provenance::Trivial, || -> Value {
        let a = cases::rotated_diagonalizable(PI / 3.0, seed)?;
        let (s, t) = (imaginary_power(&a, 0.7)?, imaginary_power(&a, -0.3)?);
        Ok(rel_mat(&(s.entries() * t.entries()), imaginary_power(&a, 0.4)?.entries()))
    });

    sink.record("rotated_pi_3", "resolvent_symbol", Check::AtMost(1e-12), Provenance::Trivial, || -> Value {
        let a = cases::rotated_diagonalizable(PI / 3.0, seed)?;
        let r = symbol_matrix(a.entries(), &HolomorphicSymbol::one_over_1pz())?;
        let direct = linalg::inverse(&(linalg::identity(a.dim()) + a.entries()))?;
        Ok(rel_mat(&r, &direct))
    });

    sink.record("spd5", "bip_angle", Check::AtMost(1e-10), Provenance::Trivial, || -> Value {
        Ok(bip_profile(&cases::spd(5, seed)?, 10.0, 201)?.theta)
    });
}
