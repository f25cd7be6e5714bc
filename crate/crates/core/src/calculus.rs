//! Holomorphic functional calculus: Cauchy integrals over sector boundaries,
//! direct spectral evaluation, fractional and imaginary powers.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::linalg::{self, Eigen};
use crate::quadrature::{ContourKind, ContourQuadrature};
use crate::symbol::{HolomorphicSymbol, SymbolKind};
use crate::{c64, CMat, Error, LinearOperator, Result, C64};

/// Eigenvector condition up to which repeated evaluations go through the
/// eigendecomposition; worse-conditioned matrices use closed forms.
pub const SPECTRAL_ROUTE_CAP: f64 = 1e6;
/// Relative accuracy targeted by automatically chosen contour rules.
pub const AUTO_TOL: f64 = 1e-13;

/// `(smallest, largest)` of eigenvalue moduli and singular values.
pub fn scales(m: &CMat) -> (f64, f64) {
    let eig = linalg::eigenvalues(m);
    let svd = m.clone().svd(false, false).singular_values;
    let lo = eig.iter().map(|z| z.norm()).fold(svd.min(), f64::min);
    let hi = eig.iter().map(|z| z.norm()).fold(svd.max(), f64::max);
    (lo, hi)
}

/// `(1/2 pi i) int_Gamma phi(lambda) R(lambda, A) d lambda` on the given rule.
pub fn functional_calculus(a: &LinearOperator, phi: &HolomorphicSymbol, quad: &ContourQuadrature) -> Result<LinearOperator> {
    let m = contour_calculus(a.entries(), phi, quad)?;
    LinearOperator::new(m, alloc::format!("{}({})", phi.label, a.label))
}

/// [`functional_calculus`] with the contour angle and rule chosen from the
/// spectrum and the symbol.
pub fn functional_calculus_auto(a: &LinearOperator, phi: &HolomorphicSymbol) -> Result<LinearOperator> {
    let quad = auto_contour(a.entries(), phi)?;
    functional_calculus(a, phi, &quad)
}

/// Contour rule for `phi(M)`: angle halfway between the spectral angle of `M`
/// and the holomorphy angle of `phi`.
pub fn auto_contour(m: &CMat, phi: &HolomorphicSymbol) -> Result<ContourQuadrature> {
    let omega = linalg::spectral_angle(&linalg::eigenvalues(m));
    let sigma = phi.holo_angle();
    if omega >= sigma {
        return Err(Error::ContourTooTight { rho: sigma, spectral_angle: omega, upper: sigma });
    }
    let rho = 0.5 * (omega + sigma);
    let (lo, hi) = scales(m);
    let (e0, einf) = phi.decays();
    let invertible = lo > 0.0 && linalg::inverse_checked(m).is_ok();
    let d0 = e0 + if invertible { 1.0 } else { 0.0 };
    let strip = 0.5 * (sigma - omega);
    ContourQuadrature::auto(ContourKind::SectorBoundary { rho }, lo.max(1e-300), hi.max(1e-300), d0, einf, strip, AUTO_TOL)
}

pub(crate) fn contour_calculus(m: &CMat, phi: &HolomorphicSymbol, quad: &ContourQuadrature) -> Result<CMat> {
    let rho = quad.rho().ok_or_else(|| Error::InvalidArgument("functional calculus needs a sector-boundary contour".into()))?;
    let omega = linalg::spectral_angle(&linalg::eigenvalues(m));
    if rho <= omega {
        return Err(Error::ContourTooTight { rho, spectral_angle: omega, upper: phi.holo_angle() });
    }
    if rho >= phi.holo_angle() {
        return Err(Error::AngleViolation { rho, lower: omega, upper: phi.holo_angle() });
    }
    let n = m.nrows();
    quad.integrate_checked(|lambda| {
        let shifted = CMat::from_diagonal_element(n, n, lambda) - m;
        let (r, _) = linalg::inverse_checked(&shifted).map_err(|condition| Error::SingularResolvent {
            re: lambda.re,
            im: lambda.im,
            condition,
        })?;
        Ok(r * phi.eval(lambda)?)
    })
}

fn principal_pow(z: C64, a: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut { symbol: "z^a".into(), re: z.re, im: z.im });
    }
    Ok((a * z.ln()).exp())
}

/// Principal power `M^theta` for `Re theta` in `(-1, 1)`: spectral when `M`
/// is diagonalizable, otherwise through contour integrals of
/// `z^theta / (1+z)`.
pub fn matrix_power(m: &CMat, theta: C64) -> Result<CMat> {
    let n = m.nrows();
    if theta == c64(0.0, 0.0) {
        return Ok(linalg::identity(n));
    }
    let (inv, _) = linalg::inverse_checked(m).map_err(|_| Error::SingularBase)?;
    match linalg::eigen(m) {
        Ok(e) => e.try_apply(|z| principal_pow(z, theta)),
        Err(Error::NotDiagonalizable { .. }) => power_by_contour(m, &inv, theta),
        Err(e) => Err(e),
    }
}

fn power_by_contour(m: &CMat, inv: &CMat, theta: C64) -> Result<CMat> {
    let n = m.nrows();
    let half = c64(0.5, 0.0);
    if theta.re < 0.25 {
        // M^theta = M^{theta + 1/2} M^{1/2} M^{-1}
        let upper = power_by_contour(m, inv, theta + half)?;
        let root = power_by_contour(m, inv, half)?;
        return Ok(upper * root * inv);
    }
    if theta.re > 0.75 {
        let lower = power_by_contour(m, inv, theta - half)?;
        let root = power_by_contour(m, inv, half)?;
        return Ok(lower * root);
    }
    let sym = HolomorphicSymbol::one_over_1pz().power_shift_unchecked(theta);
    let quad = auto_contour(m, &sym)?;
    let core = contour_calculus(m, &sym, &quad)?;
    Ok(core * (linalg::identity(n) + m))
}

/// `A^alpha` for real `alpha` in `(-1, 1)`.
pub fn fractional_power(a: &LinearOperator, alpha: f64) -> Result<LinearOperator> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("fractional power {alpha} outside (-1, 1)")));
    }
    let m = matrix_power(a.entries(), c64(alpha, 0.0))?;
    LinearOperator::new(m, alloc::format!("{}^{alpha}", a.label))
}

/// `A^{i sigma}`.
pub fn imaginary_power(a: &LinearOperator, sigma: f64) -> Result<LinearOperator> {
    let m = matrix_power(a.entries(), c64(0.0, sigma))?;
    LinearOperator::new(m, alloc::format!("{}^(i{sigma})", a.label))
}

/// Repeated evaluation of `phi(tA)` for one matrix `A`.
#[derive(Debug, Clone)]
pub struct MatrixFunctions {
    matrix: CMat,
    eigen: Option<Eigen>,
}

impl MatrixFunctions {
    pub fn new(m: &CMat) -> Self {
        let eigen = linalg::eigen(m).ok().filter(|e| e.condition <= SPECTRAL_ROUTE_CAP);
        Self { matrix: m.clone(), eigen }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn is_spectral(&self) -> bool {
        self.eigen.is_some()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        match &self.eigen {
            Some(e) => e.values.clone(),
            None => linalg::eigenvalues(&self.matrix),
        }
    }

    /// `phi(t A) x`.
    pub fn apply(&self, phi: &HolomorphicSymbol, t: C64, x: &crate::CVec) -> Result<crate::CVec> {
        match &self.eigen {
            Some(e) => {
                let mut y = &e.inverse * x;
                for (yk, &lam) in y.iter_mut().zip(&e.values) {
                    *yk *= phi.eval(t * lam)?;
                }
                Ok(&e.vectors * y)
            }
            None => Ok(closed_form(&phi.kind, &(&self.matrix * t))? * x),
        }
    }

    /// `phi(t A) X` for a block of columns.
    pub fn apply_block(&self, phi: &HolomorphicSymbol, t: C64, x: &CMat) -> Result<CMat> {
        match &self.eigen {
            Some(e) => {
                let mut y = &e.inverse * x;
                for (k, &lam) in e.values.iter().enumerate() {
                    let f = phi.eval(t * lam)?;
                    for z in y.row_mut(k).iter_mut() {
                        *z *= f;
                    }
                }
                Ok(&e.vectors * y)
            }
            None => Ok(closed_form(&phi.kind, &(&self.matrix * t))? * x),
        }
    }

    /// `phi(t A)`.
    pub fn eval(&self, phi: &HolomorphicSymbol, t: C64) -> Result<CMat> {
        match &self.eigen {
            Some(e) => e.try_apply(|z| phi.eval(t * z)),
            None => closed_form(&phi.kind, &(&self.matrix * t)),
        }
    }
}

/// `phi(A)` evaluated directly (no contour), for any symbol of the library.
pub fn symbol_matrix(m: &CMat, phi: &HolomorphicSymbol) -> Result<CMat> {
    MatrixFunctions::new(m).eval(phi, c64(1.0, 0.0))
}

fn inv_or_pole(m: &CMat) -> Result<CMat> {
    linalg::inverse_checked(m).map(|(inv, _)| inv).map_err(|_| {
        let z = linalg::eigenvalues(m).into_iter().fold(c64(f64::INFINITY, 0.0), |a, b| if b.norm() < a.norm() { b } else { a });
        Error::PoleAt { re: z.re, im: z.im }
    })
}

/// Closed-form matrix evaluation: rational symbols through inverses, quarter
/// and half powers through Schur square roots, general powers through
/// [`matrix_power`]. Valid for defective matrices.
fn closed_form(kind: &SymbolKind, m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let id = linalg::identity(n);
    let shift = |c: C64| m + CMat::from_diagonal_element(n, n, c);
    Ok(match kind {
        SymbolKind::PsiPlus { rho } => inv_or_pole(&shift(C64::from_polar(1.0, *rho)))?,
        SymbolKind::PsiMinus { rho } => inv_or_pole(&shift(C64::from_polar(1.0, -*rho)))?,
        SymbolKind::PhiPlus { rho } | SymbolKind::PhiMinus { rho } => {
            let sign = if matches!(kind, SymbolKind::PhiPlus { .. }) { 1.0 } else { -1.0 };
            let label = || alloc::string::String::from(if sign > 0.0 { "phi_plus" } else { "phi_minus" });
            let cut = |e: Error| match e {
                Error::BranchCut { re, im, .. } => Error::BranchCut { symbol: label(), re, im },
                other => other,
            };
            let quarter = linalg::sqrtm(&linalg::sqrtm(m).map_err(cut)?).map_err(cut)?;
            let root = linalg::sqrtm(&shift(-C64::from_polar(1.0, sign * rho))).map_err(cut)?;
            quarter * inv_or_pole(&root)?
        }
        SymbolKind::RhoN { n: k } => {
            let a = inv_or_pole(&shift(c64(*k, 0.0)))?;
            let b = inv_or_pole(&(&id + m * c64(*k, 0.0)))?;
            (m * c64(k * k - 1.0, 0.0)) * a * b
        }
        SymbolKind::ZOver1pzSq | SymbolKind::Z2Over1pz4 | SymbolKind::ZOver1pzCubed | SymbolKind::OneOver1pz => {
            let r = inv_or_pole(&(&id + m))?;
            match kind {
                SymbolKind::ZOver1pzSq => m * &r * &r,
                SymbolKind::Z2Over1pz4 => {
                    let r2 = &r * &r;
                    m * m * &r2 * &r2
                }
                SymbolKind::ZOver1pzCubed => m * &r * &r * &r,
                _ => r,
            }
        }
        SymbolKind::PowerShift { theta, base } => matrix_power(m, *theta)? * closed_form(base, m)?,
        SymbolKind::Product(a, b) => closed_form(a, m)? * closed_form(b, m)?,
    })
}

/// Sampled growth of imaginary powers: `max(|A^{i s}|, |A^{-i s}|) <= M e^{theta s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipProfile {
    /// Smallest constant making the fitted bound hold on every sample.
    pub m: f64,
    /// Least-squares slope of the log-norms against `s`, clamped at 0.
    pub theta: f64,
    pub table: Vec<BipSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipSample {
    pub sigma: f64,
    pub norm_plus: f64,
    pub norm_minus: f64,
}

/// Fit of `log max(|A^{is}|, |A^{-is}|)` on `s = k sigma_max / (samples - 1)`.
pub fn bip_profile(a: &LinearOperator, sigma_max: f64, samples: usize) -> Result<BipProfile> {
    if samples < 2 || !(sigma_max > 0.0) {
        return Err(Error::InvalidArgument("bip profile needs samples >= 2, sigma_max > 0".into()));
    }
    let m = a.entries();
    linalg::inverse_checked(m).map_err(|_| Error::SingularBase)?;
    let eig = linalg::eigen(m).ok();
    let power = |s: f64| -> Result<CMat> {
        match &eig {
            Some(e) => e.try_apply(|z| principal_pow(z, c64(0.0, s))),
            None => matrix_power(m, c64(0.0, s)),
        }
    };
    let mut table = Vec::with_capacity(samples);
    for k in 0..samples {
        let sigma = sigma_max * k as f64 / (samples as f64 - 1.0);
        table.push(BipSample {
            sigma,
            norm_plus: linalg::op_norm2(&power(sigma)?),
            norm_minus: linalg::op_norm2(&power(-sigma)?),
        });
    }
    let (m, theta) = fit_growth(&table);
    Ok(BipProfile { m, theta, table })
}

/// Least-squares slope (clamped at 0) and the envelope constant.
pub fn fit_growth(table: &[BipSample]) -> (f64, f64) {
    let xs: Vec<f64> = table.iter().map(|s| s.sigma).collect();
    let ys: Vec<f64> = table.iter().map(|s| s.norm_plus.max(s.norm_minus).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let theta = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    let log_m = xs.iter().zip(&ys).map(|(x, y)| y - theta * x).fold(f64::NEG_INFINITY, f64::max);
    (log_m.exp(), theta)
}

/// Angle in `(0, pi)` between the sector angles of two operators, defaulting to the midpoint.
pub fn default_rho(omega_a: f64, omega_b: f64) -> Result<f64> {
    let upper = PI - omega_b;
    if omega_a >= upper {
        return Err(Error::AngleViolation { rho: 0.5 * (omega_a + upper), lower: omega_a, upper });
    }
    Ok(0.5 * (omega_a + upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use alloc::vec;

    fn mat(n: usize, rows: &[f64]) -> CMat {
        CMat::from_fn(n, n, |i, j| c64(rows[i * n + j], 0.0))
    }

    fn rel(a: &CMat, b: &CMat) -> f64 {
        linalg::frobenius(&(a - b)) / linalg::frobenius(b).max(1e-300)
    }

    #[test]
    fn calculus_on_diagonal() {
        let a = LinearOperator::from_real_diagonal(&[1.0, 4.0], "d").unwrap();
        let phi = HolomorphicSymbol::z_over_1pz_sq();
        let r = functional_calculus_auto(&a, &phi).unwrap();
        let oracle = CMat::from_diagonal(&crate::CVec::from_vec(vec![c64(0.25, 0.0), c64(0.16, 0.0)]));
        assert!(rel(r.entries(), &oracle) < 1e-11);
    }

    #[test]
    fn calculus_on_jordan_block() {
        // phi(1) I + phi'(1) N with phi'(1) = 0
        let a = LinearOperator::from_real_rows(2, &[1.0, 1.0, 0.0, 1.0], "j").unwrap();
        let r = functional_calculus_auto(&a, &HolomorphicSymbol::z_over_1pz_sq()).unwrap();
        assert!(linalg::frobenius(&(r.entries() - linalg::identity(2) * c64(0.25, 0.0))) < 1e-11);
    }

    #[test]
    fn calculus_phi_plus_scalar() {
        let a = LinearOperator::from_real_diagonal(&[1.0], "one").unwrap();
        let phi = HolomorphicSymbol::phi_plus(PI / 2.0);
        let r = functional_calculus_auto(&a, &phi).unwrap();
        let oracle = c64(1.0, -1.0).sqrt().inv();
        assert!((r.entries()[(0, 0)] - oracle).norm() < 1e-11);
    }

    #[test]
    fn contour_too_tight() {
        let a = LinearOperator::from_diagonal(&[c64(1.0, 0.0), C64::from_polar(2.0, 0.8)], "rot").unwrap();
        let quad = ContourQuadrature::sector(0.7, 0.0, 20.0, 401).unwrap();
        assert!(matches!(
            functional_calculus(&a, &HolomorphicSymbol::z_over_1pz_sq(), &quad),
            Err(Error::ContourTooTight { .. })
        ));
    }

    #[test]
    fn coarse_rule_reports_not_converged() {
        let a = LinearOperator::from_real_diagonal(&[1.0, 50.0], "d").unwrap();
        let quad = ContourQuadrature::sector(PI / 2.0, 0.0, 6.0, 7).unwrap();
        assert!(matches!(functional_calculus(&a, &HolomorphicSymbol::z_over_1pz_sq(), &quad), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn defect_shrinks_when_rule_doubles() {
        let a = LinearOperator::from_real_rows(3, &[1.0, 2.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 5.0], "t").unwrap();
        let phi = HolomorphicSymbol::z_over_1pz_cubed();
        let oracle = symbol_matrix(a.entries(), &phi).unwrap();
        let mut quad = ContourQuadrature::sector(PI / 2.0, 0.5, 6.0, 13).unwrap().with_defect_tol(f64::INFINITY);
        let mut prev = f64::INFINITY;
        for _ in 0..4 {
            let err = rel(functional_calculus(&a, &phi, &quad).unwrap().entries(), &oracle);
            assert!(err <= 0.1 * prev || err < 1e-12, "{prev} -> {err}");
            prev = err;
            quad = quad.refined().unwrap().extended().unwrap();
        }
    }

    fn random_sectorial(seed: u64, n: usize, angle: f64) -> LinearOperator {
        let mut r = rng::seeded(seed);
        let d: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(1.0 + 3.0 * k as f64 / n as f64, angle * (2.0 * ((k * 7) % n) as f64 / n as f64 - 1.0)))
            .collect();
        let v = CMat::from_fn(n, n, |i, j| if i == j { c64(2.0, 0.0) } else { c64(0.0, 0.0) })
            + CMat::from_fn(n, n, |_, _| c64(0.3 * rng::normal(&mut r), 0.3 * rng::normal(&mut r)));
        let vinv = v.clone().try_inverse().unwrap();
        LinearOperator::new(v * CMat::from_diagonal(&crate::CVec::from_vec(d)) * vinv, "rand").unwrap()
    }

    #[test]
    fn multiplicative_on_symbol_library() {
        let rho = 1.2;
        let lib = [
            HolomorphicSymbol::phi_plus(rho),
            HolomorphicSymbol::phi_minus(rho),
            HolomorphicSymbol::psi_plus(rho),
            HolomorphicSymbol::psi_minus(rho),
            HolomorphicSymbol::rho_n(4.0),
            HolomorphicSymbol::z_over_1pz_sq(),
            HolomorphicSymbol::z2_over_1pz_4(),
            HolomorphicSymbol::z_over_1pz_cubed(),
        ];
        let a = random_sectorial(11, 5, PI / 4.0 - 0.05);
        let quad = ContourQuadrature::auto(ContourKind::SectorBoundary { rho: 1.0 }, 0.05, 20.0, 1.25, 0.25, 0.2, 1e-13).unwrap();
        let each: Vec<CMat> = lib.iter().map(|p| functional_calculus(&a, p, &quad).expect(&p.label).into_entries()).collect();
        for i in 0..lib.len() {
            for j in i..lib.len() {
                let prod = functional_calculus(&a, &lib[i].product(&lib[j]), &quad).unwrap();
                let err = rel(prod.entries(), &(&each[i] * &each[j]));
                assert!(err < 1e-8, "{} * {}: {err}", lib[i].label, lib[j].label);
            }
        }
    }

    #[test]
    fn contour_matches_spectral_route() {
        let a = random_sectorial(5, 4, 0.6);
        for phi in [HolomorphicSymbol::phi_plus(1.1), HolomorphicSymbol::z2_over_1pz_4().power_shift(0.7).unwrap()] {
            let c = functional_calculus_auto(&a, &phi).unwrap();
            let s = symbol_matrix(a.entries(), &phi).unwrap();
            assert!(rel(c.entries(), &s) < 1e-9, "{}", phi.label);
        }
    }

    #[test]
    fn closed_forms_agree_with_spectral_route() {
        let a = random_sectorial(8, 4, 0.6);
        let m = a.entries();
        let e = linalg::eigen(m).unwrap();
        for phi in [
            HolomorphicSymbol::phi_plus(1.1),
            HolomorphicSymbol::phi_minus(1.1),
            HolomorphicSymbol::psi_plus(1.1),
            HolomorphicSymbol::rho_n(3.0),
            HolomorphicSymbol::z2_over_1pz_4(),
            HolomorphicSymbol::z_over_1pz_sq().power_shift(-0.5).unwrap(),
        ] {
            let spectral = e.try_apply(|z| phi.eval(z)).unwrap();
            let closed = closed_form(&phi.kind, m).unwrap();
            assert!(rel(&closed, &spectral) < 1e-10, "{}", phi.label);
        }
    }

    #[test]
    fn fractional_power_examples() {
        let a = LinearOperator::from_real_diagonal(&[4.0, 9.0], "d").unwrap();
        let r = fractional_power(&a, 0.5).unwrap();
        assert!((r.entries()[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-14);
        assert!((r.entries()[(1, 1)] - c64(3.0, 0.0)).norm() < 1e-14);

        let a = LinearOperator::from_diagonal(&[C64::from_polar(1.0, PI / 4.0)], "r").unwrap();
        let r = fractional_power(&a, 0.5).unwrap();
        assert!((r.entries()[(0, 0)] - C64::from_polar(1.0, PI / 8.0)).norm() < 1e-14);
    }

    #[test]
    fn fractional_power_random_spd() {
        let mut r = rng::seeded(21);
        let g = CMat::from_fn(6, 6, |_, _| c64(rng::normal(&mut r), 0.0));
        let spd = &g * g.transpose() + linalg::identity(6);
        let a = LinearOperator::new(spd.clone(), "spd").unwrap();
        let root = fractional_power(&a, 0.5).unwrap();
        assert!(rel(&(root.entries() * root.entries()), &spd) < 1e-10);
        let neg = fractional_power(&a, -0.5).unwrap();
        assert!(linalg::frobenius(&(root.entries() * neg.entries() - linalg::identity(6))) < 1e-10);
    }

    #[test]
    fn fractional_power_of_jordan_block_by_contour() {
        // (4 I + N)^alpha = 4^alpha I + alpha 4^{alpha-1} N
        let m = mat(2, &[4.0, 1.0, 0.0, 4.0]);
        for alpha in [0.5, 0.3, -0.4, 0.9] {
            let p = matrix_power(&m, c64(alpha, 0.0)).unwrap();
            let oracle = mat(2, &[4f64.powf(alpha), alpha * 4f64.powf(alpha - 1.0), 0.0, 4f64.powf(alpha)]);
            assert!(rel(&p, &oracle) < 1e-10, "alpha={alpha}: {}", rel(&p, &oracle));
        }
        let a = LinearOperator::new(m, "j").unwrap();
        let pa = fractional_power(&a, 0.3).unwrap();
        let pb = fractional_power(&a, -0.3).unwrap();
        assert!(linalg::frobenius(&(pa.entries() * pb.entries() - linalg::identity(2))) < 1e-10);
    }

    #[test]
    fn singular_base_rejected() {
        let a = LinearOperator::from_real_diagonal(&[0.0, 1.0], "s").unwrap();
        assert!(matches!(fractional_power(&a, 0.5), Err(Error::SingularBase)));
        assert!(matches!(imaginary_power(&a, 1.0), Err(Error::SingularBase)));
    }

    #[test]
    fn imaginary_power_examples() {
        let a = LinearOperator::from_real_diagonal(&[core::f64::consts::E], "e").unwrap();
        let r = imaginary_power(&a, 1.0).unwrap();
        assert!((r.entries()[(0, 0)] - c64(1f64.cos(), 1f64.sin())).norm() < 1e-14);

        let a = LinearOperator::from_real_diagonal(&[0.3, 2.0, 7.0], "d").unwrap();
        for s in [-5.0, 0.5, 12.0] {
            assert!((linalg::op_norm2(imaginary_power(&a, s).unwrap().entries()) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn imaginary_power_group_law() {
        let a = random_sectorial(3, 4, 0.9);
        let (s, t) = (0.7, -1.9);
        let p = imaginary_power(&a, s).unwrap();
        let q = imaginary_power(&a, t).unwrap();
        let pq = imaginary_power(&a, s + t).unwrap();
        assert!(rel(&(p.entries() * q.entries()), pq.entries()) < 1e-10);

        let j = LinearOperator::from_real_rows(2, &[2.0, 1.0, 0.0, 2.0], "j").unwrap();
        let p = imaginary_power(&j, s).unwrap();
        let q = imaginary_power(&j, t).unwrap();
        let pq = imaginary_power(&j, s + t).unwrap();
        assert!(rel(&(p.entries() * q.entries()), pq.entries()) < 1e-9);
    }

    #[test]
    fn bip_profile_examples() {
        let mut r = rng::seeded(4);
        let g = CMat::from_fn(5, 5, |_, _| c64(rng::normal(&mut r), 0.0));
        let spd = LinearOperator::new(&g * g.transpose() + linalg::identity(5), "spd").unwrap();
        assert!(bip_profile(&spd, 5.0, 21).unwrap().theta <= 1e-6);

        let beta = PI / 4.0;
        let rot = LinearOperator::from_diagonal(&[c64(1.0, 0.0), C64::from_polar(1.0, beta)], "rot").unwrap();
        let p = bip_profile(&rot, 4.0, 21).unwrap();
        assert!((p.theta - beta).abs() <= 0.02 * beta, "{}", p.theta);

        let p = bip_profile(&LinearOperator::identity(3), 4.0, 11).unwrap();
        assert!((p.m - 1.0).abs() < 1e-12 && p.theta == 0.0);
    }

    #[test]
    fn bip_profile_nonnormal_matches_hand_eigenvectors() {
        let a = LinearOperator::from_real_rows(2, &[1.0, 10.0, 0.0, 2.0], "nn").unwrap();
        let p = bip_profile(&a, 6.0, 25).unwrap();
        // V = [[1, 10], [0, 1]], A^{is} = V diag(1, 2^{is}) V^{-1}
        let v = mat(2, &[1.0, 10.0, 0.0, 1.0]);
        let vinv = mat(2, &[1.0, -10.0, 0.0, 1.0]);
        let oracle: Vec<BipSample> = p
            .table
            .iter()
            .map(|row| {
                let f = |s: f64| {
                    let d = CMat::from_diagonal(&crate::CVec::from_vec(vec![c64(1.0, 0.0), c64(0.0, s * 2f64.ln()).exp()]));
                    linalg::op_norm2(&(&v * d * &vinv))
                };
                BipSample { sigma: row.sigma, norm_plus: f(row.sigma), norm_minus: f(-row.sigma) }
            })
            .collect();
        for (x, y) in p.table.iter().zip(&oracle) {
            assert!((x.norm_plus - y.norm_plus).abs() < 1e-10 * y.norm_plus);
        }
        let (m, theta) = fit_growth(&oracle);
        assert!((p.theta - theta).abs() < 1e-9 && (p.m - m).abs() < 1e-9 * m);
        assert!(p.table.iter().any(|s| s.norm_plus > 5.0));
    }
}
