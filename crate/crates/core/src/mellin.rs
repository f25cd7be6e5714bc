//! Mellin transforms `M f(s) = int t^s f(t) dt/t`: closed forms for the
//! family `t^alpha (a + t)^{-beta}`, log-trapezoid quadrature, the operator
//! identity for `int t^{i sigma} psi(tA) x dt/t`, Plancherel pairings and
//! Mellin convolution.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::calculus::{self, MatrixFunctions, AUTO_TOL};
use crate::gamma::{gamma, pi_x_over_sinh};
use crate::quadrature::{ContourKind, ContourQuadrature, QuadValue};
use crate::{c64, linalg, CVec, Error, HolomorphicSymbol, LinearOperator, Result, C64};

fn on_cut(a: C64) -> bool {
    a.im == 0.0 && a.re <= 0.0
}

/// `M[t^alpha (a+t)^{-beta}](s) = a^{s+alpha-beta} Gamma(s+alpha) Gamma(beta-alpha-s) / Gamma(beta)`
/// for `-alpha < Re s < beta - alpha`.
pub fn mellin_closed_form(alpha: f64, beta: f64, a: C64, s: C64) -> Result<C64> {
    if !(beta > alpha && alpha >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("need beta > alpha >= 0 (got {alpha}, {beta})")));
    }
    if on_cut(a) {
        return Err(Error::BranchCut { symbol: "a^s".into(), re: a.re, im: a.im });
    }
    let (lower, upper) = (-alpha, beta - alpha);
    if !(s.re > lower && s.re < upper) {
        return Err(Error::StripViolation { re_s: s.re, lower, upper });
    }
    let power = ((s + alpha - beta) * a.ln()).exp();
    Ok(power * gamma(s + alpha)? * gamma(c64(beta - alpha, 0.0) - s)? / gamma(c64(beta, 0.0))?)
}

/// `t^alpha (a+t)^{-beta}` with principal powers.
pub fn power_family(alpha: f64, beta: f64, a: C64, t: f64) -> C64 {
    c64(t.powf(alpha), 0.0) / ((a + t).ln() * beta).exp()
}

/// Half-line rule for `t^s f(t)` with `f ~ t^{decay_zero}` at 0 and
/// `t^{-decay_inf}` at infinity, analytic for `|arg t| < strip`.
pub fn mellin_rule(decay_zero: f64, decay_inf: f64, strip: f64, s: C64) -> Result<ContourQuadrature> {
    mellin_rule_scaled(1.0, 1.0, decay_zero, decay_inf, strip, s)
}

fn mellin_rule_scaled(lo: f64, hi: f64, decay_zero: f64, decay_inf: f64, strip: f64, s: C64) -> Result<ContourQuadrature> {
    let (d0, dinf) = (decay_zero + s.re, decay_inf - s.re);
    if !(d0 > 0.0 && dinf > 0.0) {
        return Err(Error::StripViolation { re_s: s.re, lower: -decay_zero, upper: decay_inf });
    }
    // t^{i Im s} grows like e^{|Im s| d} on the edge of the strip
    let tol = AUTO_TOL * (-(s.im.abs() * strip).min(600.0)).exp();
    ContourQuadrature::auto(ContourKind::HalflineDtOverT, lo, hi, d0, dinf, strip, tol)
}

fn t_power(t: C64, s: C64) -> C64 {
    (s * t.re.ln()).exp()
}

/// Log-trapezoid `int t^s f(t) dt/t` on the given rule.
pub fn mellin_numeric(mut f: impl FnMut(f64) -> Result<C64>, s: C64, quad: &ContourQuadrature) -> Result<C64> {
    if quad.kind != ContourKind::HalflineDtOverT {
        return Err(Error::InvalidArgument("Mellin transforms need a half-line rule".into()));
    }
    quad.integrate_checked(|t| Ok(t_power(t, s) * f(t.re)?))
}

/// Numeric Mellin transform of a scalar symbol along `t > 0`.
pub fn symbol_mellin(phi: &HolomorphicSymbol, s: C64) -> Result<C64> {
    let (e0, einf) = phi.decays();
    let quad = mellin_rule(e0, einf, 0.5 * phi.holo_angle(), s)?;
    mellin_numeric(|t| phi.eval(c64(t, 0.0)), s, &quad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorIdentity {
    /// `int t^{i sigma} psi(tA) x dt/t`.
    pub lhs: CVec,
    /// `M psi(i sigma) A^{-i sigma} x`.
    pub rhs: CVec,
    pub defect: f64,
}

/// Both sides of `int t^{i sigma} psi(tA) x dt/t = M psi(i sigma) A^{-i sigma} x`.
pub fn mellin_operator_identity(psi: &HolomorphicSymbol, a: &LinearOperator, sigma: f64, x: &CVec) -> Result<OperatorIdentity> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: x.len() });
    }
    let m = a.entries();
    let omega = a.spectral_angle();
    let holo = psi.holo_angle();
    if omega >= holo {
        return Err(Error::ContourTooTight { rho: holo, spectral_angle: omega, upper: holo });
    }
    let (lo, hi) = calculus::scales(m);
    if !(lo > 0.0) {
        return Err(Error::SingularBase);
    }
    let (e0, einf) = psi.decays();
    let s = c64(0.0, sigma);
    let quad = mellin_rule_scaled(1.0 / hi, 1.0 / lo, e0, einf, 0.5 * (holo - omega), s)?;
    let funcs = MatrixFunctions::new(m);
    let lhs = quad.integrate_checked(|t| Ok(funcs.apply(psi, t, x)? * t_power(t, s)))?;
    let mpsi = symbol_mellin(psi, s)?;
    let rhs = calculus::matrix_power(m, c64(0.0, -sigma))? * x * mpsi;
    let scale = linalg::vec_norm2(&rhs);
    let diff = linalg::vec_norm2(&(&lhs - &rhs));
    let defect = if diff == 0.0 { 0.0 } else { diff / scale.max(f64::MIN_POSITIVE) };
    Ok(OperatorIdentity { lhs, rhs, defect })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelReport {
    /// `int <phi(t), psi(t)> dt/t`.
    pub time_side: C64,
    /// `(1/2 pi) int <M phi(i sigma), M psi(-i sigma)> d sigma`.
    pub mellin_side: C64,
    pub defect: f64,
}

/// Both sides of the Mellin-Plancherel identity for the bilinear pairing.
///
/// The transforms are sampled on `[-sigma_max, sigma_max]` with a step fine
/// enough to resolve the log-range of the rule. The discrete transform is
/// periodic with period `2 pi / h`, so `sigma_max` is capped at `pi / h`.
pub fn plancherel_pairing(
    mut phi: impl FnMut(f64) -> Result<CVec>,
    mut psi: impl FnMut(f64) -> Result<CVec>,
    quad: &ContourQuadrature,
    sigma_max: f64,
) -> Result<PlancherelReport> {
    if quad.kind != ContourKind::HalflineDtOverT {
        return Err(Error::InvalidArgument("Plancherel pairing needs a half-line rule".into()));
    }
    let ts = quad.t_nodes();
    let ss = quad.log_nodes();
    let (w, _) = quad.log_weights();
    let mut fs = Vec::with_capacity(ts.len());
    let mut gs = Vec::with_capacity(ts.len());
    for &t in &ts {
        fs.push(phi(t)?);
        gs.push(psi(t)?);
    }
    let time = quad.integrate_checked(|t| {
        let j = ts.iter().position(|&u| u == t.re).unwrap_or(0);
        Ok(linalg::bilinear(&fs[j], &gs[j]))
    });
    let time_side = match time {
        Ok(v) => v,
        Err(Error::NotConverged { .. }) if fs.iter().all(|f| f.iter().all(|z| *z == c64(0.0, 0.0))) => c64(0.0, 0.0),
        Err(e) => return Err(e),
    };
    // sigma step resolving a log-range of twice the rule's span
    let d_sigma = PI / (4.0 * quad.half_width);
    let sigma_max = sigma_max.min(PI / quad.step());
    let k = (sigma_max / d_sigma).floor() as i64;
    let dim = fs.first().map_or(0, |f| f.len());
    let mut mellin_side = c64(0.0, 0.0);
    for kk in -k..=k {
        let sigma = kk as f64 * d_sigma;
        let mut mf = CVec::zeros(dim);
        let mut mg = CVec::zeros(dim);
        for j in 0..ts.len() {
            let e = C64::from_polar(w[j], sigma * ss[j]);
            QuadValue::axpy(&mut mf, e, &fs[j]);
            QuadValue::axpy(&mut mg, e.conj(), &gs[j]);
        }
        let edge = if kk.abs() == k { 0.5 } else { 1.0 };
        mellin_side += linalg::bilinear(&mf, &mg) * (edge * d_sigma / (2.0 * PI));
    }
    let defect =
        if time_side == mellin_side { 0.0 } else { (time_side - mellin_side).norm() / time_side.norm().max(f64::MIN_POSITIVE) };
    Ok(PlancherelReport { time_side, mellin_side, defect })
}

/// `(1/2 pi i) int_{c - i inf}^{c + i inf} Mf(z) Mg(s - z) dz`, trapezoid on
/// `Im z in [-y_max, y_max]` with `n` intervals.
pub fn mellin_convolution(
    mut mf: impl FnMut(C64) -> Result<C64>,
    mut mg: impl FnMut(C64) -> Result<C64>,
    s: C64,
    c: f64,
    y_max: f64,
    n: usize,
) -> Result<C64> {
    if n < 2 || !(y_max > 0.0) {
        return Err(Error::InvalidArgument("convolution grid needs n >= 2, y_max > 0".into()));
    }
    let h = 2.0 * y_max / n as f64;
    let mut acc = c64(0.0, 0.0);
    for j in 0..=n {
        let y = -y_max + j as f64 * h;
        let z = c64(c, y);
        let wt = if j == 0 || j == n { 0.5 } else { 1.0 };
        acc += mf(z)? * mg(s - z)? * wt;
    }
    Ok(acc * (h / (2.0 * PI)))
}

/// `sup_sigma e^{-gamma |sigma|} |(pi sigma / sinh(pi sigma)) A^{-i sigma}|` on a grid,
/// with the fitted imaginary-power growth of `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipCharacterization {
    pub sup: f64,
    pub theta: f64,
    pub m: f64,
}

pub fn bip_characterization(
    a: &LinearOperator,
    gamma_weight: f64,
    sigma_max: f64,
    samples: usize,
) -> Result<BipCharacterization> {
    let profile = calculus::bip_profile(a, sigma_max, samples)?;
    let sup = profile
        .table
        .iter()
        .map(|r| (-gamma_weight * r.sigma).exp() * pi_x_over_sinh(r.sigma) * r.norm_plus.max(r.norm_minus))
        .fold(0.0, f64::max);
    Ok(BipCharacterization { sup, theta: profile.theta, m: profile.m })
}
