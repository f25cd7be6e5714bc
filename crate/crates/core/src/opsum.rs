//! Inverse of the sum of two commuting sectorial operators by a Cauchy
//! integral over the sector boundary, the contour formula for `A (A+B)^{-1}`,
//! the square-function pairing behind its boundedness, and measured
//! closedness constants.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::calculus::{self, MatrixFunctions, AUTO_TOL};
use crate::lpnorms;
use crate::operator::{self, LinearOperator};
use crate::quadrature::{ContourKind, ContourQuadrature};
use crate::{c64, linalg, rng, CMat, CVec, Error, HolomorphicSymbol, MixedNormSpec, Result, C64};

/// Relative commutator size accepted as "commuting".
pub const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct OperatorSumProblem {
    pub a: LinearOperator,
    pub b: LinearOperator,
    pub rho: f64,
    /// Sector-boundary rule for the inverse of the sum.
    pub quad: ContourQuadrature,
    pub norm: MixedNormSpec,
    /// `(A0, B0)` when `A = A0 (x) I` and `B = I (x) B0`.
    factors: Option<(LinearOperator, LinearOperator)>,
    omega_a: f64,
    omega_b: f64,
}

fn commutator_check(a: &CMat, b: &CMat) -> Result<()> {
    let c = linalg::frobenius(&(a * b - b * a));
    let scale = linalg::frobenius(a) * linalg::frobenius(b);
    if c > COMMUTATOR_TOL * scale {
        return Err(Error::InvalidArgument(format!("operators do not commute: |AB - BA|_F = {c:e}")));
    }
    Ok(())
}

fn check_rho(rho: f64, omega_a: f64, omega_b: f64) -> Result<()> {
    let upper = PI - omega_b;
    if !(rho > omega_a) {
        return Err(Error::ContourTooTight { rho, spectral_angle: omega_a, upper });
    }
    if !(rho < upper) {
        return Err(Error::AngleViolation { rho, lower: omega_a, upper });
    }
    Ok(())
}

impl OperatorSumProblem {
    /// Pair with `rho` at the midpoint of the admissible interval.
    pub fn new(a: LinearOperator, b: LinearOperator, norm: MixedNormSpec) -> Result<Self> {
        let rho = calculus::default_rho(a.sector_angle(), b.sector_angle())?;
        Self::with_rho(a, b, rho, norm)
    }

    pub fn with_rho(a: LinearOperator, b: LinearOperator, rho: f64, norm: MixedNormSpec) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        norm.validate(a.dim())?;
        commutator_check(a.entries(), b.entries())?;
        Self::assemble(a, b, None, rho, norm)
    }

    /// `A = A0 (x) I_m`, `B = I_n (x) B0`; vectors are indexed `i*m + k`.
    pub fn kronecker(a0: &LinearOperator, b0: &LinearOperator, rho: Option<f64>, norm: MixedNormSpec) -> Result<Self> {
        let (a, b) = operator::make_kronecker_pair(a0, b0);
        norm.validate(a.dim())?;
        let rho = match rho {
            Some(r) => r,
            None => calculus::default_rho(a0.sector_angle(), b0.sector_angle())?,
        };
        Self::assemble(a, b, Some((a0.clone(), b0.clone())), rho, norm)
    }

    fn assemble(
        a: LinearOperator,
        b: LinearOperator,
        factors: Option<(LinearOperator, LinearOperator)>,
        rho: f64,
        norm: MixedNormSpec,
    ) -> Result<Self> {
        let (omega_a, omega_b) = match &factors {
            Some((a0, b0)) => (a0.sector_angle(), b0.sector_angle()),
            None => (a.sector_angle(), b.sector_angle()),
        };
        check_rho(rho, omega_a, omega_b)?;
        let mut p = Self { quad: ContourQuadrature::sector(rho, 0.0, 1.0, 5)?, a, b, rho, norm, factors, omega_a, omega_b };
        p.quad = p.sector_rule(1.0, 1.0)?;
        Ok(p)
    }

    /// Replaces the rule for the inverse; `rho` follows the rule's angle.
    pub fn with_quadrature(mut self, quad: ContourQuadrature) -> Result<Self> {
        let rho = quad.rho().ok_or_else(|| Error::InvalidArgument("the sum inverse needs a sector-boundary rule".into()))?;
        check_rho(rho, self.omega_a, self.omega_b)?;
        self.rho = rho;
        self.quad = quad;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn factors(&self) -> Option<(&LinearOperator, &LinearOperator)> {
        self.factors.as_ref().map(|(a, b)| (a, b))
    }

    /// Measured sector angles `(omega_A, omega_B)`.
    pub fn angles(&self) -> (f64, f64) {
        (self.omega_a, self.omega_b)
    }

    /// Half-width of the analyticity strip in the log variable.
    pub fn strip(&self) -> f64 {
        (self.rho - self.omega_a).min(PI - self.omega_b - self.rho)
    }

    fn base_pair(&self) -> (&CMat, &CMat) {
        match &self.factors {
            Some((a0, b0)) => (a0.entries(), b0.entries()),
            None => (self.a.entries(), self.b.entries()),
        }
    }

    fn scales(&self) -> (f64, f64) {
        let (a, b) = self.base_pair();
        let (la, ha) = calculus::scales(a);
        let (lb, hb) = calculus::scales(b);
        (la.min(lb), ha.max(hb))
    }

    fn sector_rule(&self, decay0: f64, decay_inf: f64) -> Result<ContourQuadrature> {
        let (lo, hi) = self.scales();
        if !(lo > 0.0) {
            return Err(Error::SingularBase);
        }
        ContourQuadrature::auto(ContourKind::SectorBoundary { rho: self.rho }, lo, hi, decay0, decay_inf, self.strip(), AUTO_TOL)
    }

    /// Rule for the `A (A+B)^{-1}` contour integral (slower decay at infinity).
    pub fn as_rule(&self) -> Result<ContourQuadrature> {
        self.sector_rule(1.5, 0.5)
    }

    /// Half-line rule for the square-function pairing.
    pub fn pairing_rule(&self) -> Result<ContourQuadrature> {
        let (lo, hi) = self.scales();
        if !(lo > 0.0) {
            return Err(Error::SingularBase);
        }
        ContourQuadrature::auto(ContourKind::HalflineDtOverT, 1.0 / hi, 1.0 / lo, 0.5, 0.5, self.strip(), AUTO_TOL)
    }

    fn block_dims(&self) -> Option<(usize, usize)> {
        self.factors.as_ref().map(|(a0, b0)| (a0.dim(), b0.dim()))
    }
}

fn to_block(x: &CVec, n: usize, m: usize) -> CMat {
    CMat::from_fn(n, m, |i, k| x[i * m + k])
}

fn from_block(f: &CMat) -> CVec {
    let (n, m) = (f.nrows(), f.ncols());
    CVec::from_fn(n * m, |j, _| f[(j / m, j % m)])
}

fn singular_at(lambda: C64) -> impl Fn(f64) -> Error {
    move |condition| Error::SingularResolvent { re: lambda.re, im: lambda.im, condition }
}

fn shifted(m: &CMat, lambda: C64, sign: f64) -> CMat {
    // lambda I + sign M
    let n = m.nrows();
    CMat::from_diagonal_element(n, n, lambda) + m * c64(sign, 0.0)
}

fn inv_at(m: &CMat, lambda: C64, sign: f64) -> Result<CMat> {
    linalg::inverse_checked(&shifted(m, lambda, sign)).map(|(r, _)| r).map_err(singular_at(lambda))
}

/// `S = (1/2 pi i) int (lambda + B)^{-1} R(lambda, A) d lambda` as a dense matrix.
pub fn build_sum_inverse(prob: &OperatorSumProblem) -> Result<LinearOperator> {
    let s = sum_inverse_matrix(prob)?;
    LinearOperator::new(s, format!("({} + {})^-1", prob.a.label, prob.b.label))
}

fn sum_inverse_matrix(prob: &OperatorSumProblem) -> Result<CMat> {
    match &prob.factors {
        Some((a0, b0)) => prob.quad.integrate_checked(|lambda| {
            let ra = inv_at(a0.entries(), lambda, -1.0)?;
            let rb = inv_at(b0.entries(), lambda, 1.0)?;
            Ok(linalg::kron(&ra, &rb))
        }),
        None => {
            let (a, b) = (prob.a.entries(), prob.b.entries());
            prob.quad.integrate_checked(|lambda| {
                let prod = shifted(a, lambda, -1.0) * shifted(b, lambda, 1.0);
                linalg::inverse_checked(&prod).map(|(r, _)| r).map_err(singular_at(lambda))
            })
        }
    }
}

/// `S x` by per-node solves, without forming `S`.
pub fn apply_sum_inverse(prob: &OperatorSumProblem, x: &CVec) -> Result<CVec> {
    check_vec(prob, x)?;
    match &prob.factors {
        Some((a0, b0)) => {
            let f = to_block(x, a0.dim(), b0.dim());
            let y = prob.quad.integrate_checked(|lambda| {
                let left = solve_block(a0.entries(), lambda, -1.0, &f)?;
                right_solve(b0.entries(), lambda, &left)
            })?;
            Ok(from_block(&y))
        }
        None => prob.quad.integrate_checked(|lambda| {
            let y = solve_vec(prob.a.entries(), lambda, -1.0, x)?;
            solve_vec(prob.b.entries(), lambda, 1.0, &y)
        }),
    }
}

fn check_vec(prob: &OperatorSumProblem, x: &CVec) -> Result<()> {
    if x.len() != prob.dim() {
        return Err(Error::DimensionMismatch { expected: prob.dim(), found: x.len() });
    }
    Ok(())
}

fn solve_vec(m: &CMat, lambda: C64, sign: f64, y: &CVec) -> Result<CVec> {
    linalg::solve_checked(&shifted(m, lambda, sign), y).map_err(singular_at(lambda))
}

fn solve_block(m: &CMat, lambda: C64, sign: f64, y: &CMat) -> Result<CMat> {
    let lu = shifted(m, lambda, sign).lu();
    lu.solve(y).ok_or_else(|| singular_at(lambda)(f64::INFINITY))
}

/// `Y (lambda + B0)^{-T}`, the action of `I (x) (lambda + B0)^{-1}` on a block.
fn right_solve(b0: &CMat, lambda: C64, y: &CMat) -> Result<CMat> {
    Ok(solve_block(b0, lambda, 1.0, &y.transpose())?.transpose())
}

/// `||(A+B) S - I||_2`.
pub fn verify_inverse(prob: &OperatorSumProblem, s: &LinearOperator) -> f64 {
    let n = prob.dim();
    let sum = prob.a.entries() + prob.b.entries();
    linalg::op_norm2(&(sum * s.entries() - linalg::identity(n)))
}

/// `A S x` through `(1/2 pi i) int lambda^{1/2} (lambda+B)^{-1} A^{1/2} R(lambda, A) x d lambda`.
pub fn apply_as(prob: &OperatorSumProblem, x: &CVec) -> Result<CVec> {
    check_vec(prob, x)?;
    let quad = prob.as_rule()?;
    let half = c64(0.5, 0.0);
    match &prob.factors {
        Some((a0, b0)) => {
            let root = calculus::matrix_power(a0.entries(), half)?;
            let f = to_block(x, a0.dim(), b0.dim());
            let y = quad.integrate_checked(|lambda| {
                let r = solve_block(a0.entries(), lambda, -1.0, &f)?;
                let z = right_solve(b0.entries(), lambda, &(&root * r))?;
                Ok(z * lambda.sqrt())
            })?;
            Ok(from_block(&y))
        }
        None => {
            let root = calculus::matrix_power(prob.a.entries(), half)?;
            quad.integrate_checked(|lambda| {
                let r = solve_vec(prob.a.entries(), lambda, -1.0, x)?;
                let z = solve_vec(prob.b.entries(), lambda, 1.0, &(&root * r))?;
                Ok(z * lambda.sqrt())
            })
        }
    }
}

/// `psi_+- (z) = 1/(e^{+-i rho} + z)`.
pub fn psi(sign: Sign, rho: f64) -> HolomorphicSymbol {
    match sign {
        Sign::Plus => HolomorphicSymbol::psi_plus(rho),
        Sign::Minus => HolomorphicSymbol::psi_minus(rho),
    }
}

/// `phi_+- (z) = z^{1/4} (z - e^{+-i rho})^{-1/2}`.
pub fn phi(sign: Sign, rho: f64) -> HolomorphicSymbol {
    match sign {
        Sign::Plus => HolomorphicSymbol::phi_plus(rho),
        Sign::Minus => HolomorphicSymbol::phi_minus(rho),
    }
}

/// `int <psi(tB) phi(tA) x, phi(tA)' x'> dt/t` with the bilinear pairing.
pub fn key_lemma_pairing(prob: &OperatorSumProblem, x: &CVec, xp: &CVec, sign: Sign) -> Result<C64> {
    check_vec(prob, x)?;
    check_vec(prob, xp)?;
    let quad = prob.pairing_rule()?;
    let (ps, ph) = (psi(sign, prob.rho), phi(sign, prob.rho));
    let (a, b) = prob.base_pair();
    let (fa, fb) = (MatrixFunctions::new(a), MatrixFunctions::new(b));
    match prob.block_dims() {
        Some((n, m)) => {
            let f = to_block(x, n, m);
            let fp = to_block(xp, n, m);
            quad.integrate_checked(|t| {
                let y = fa.apply_block(&ph, t, &fa.apply_block(&ph, t, &f)?)?;
                let z = fb.apply_block(&ps, t, &y.transpose())?.transpose();
                Ok(fp.iter().zip(z.iter()).map(|(u, v)| u * v).sum::<C64>())
            })
        }
        None => quad.integrate_checked(|t| {
            let y = fa.apply(&ph, t, &fa.apply(&ph, t, x)?)?;
            Ok(linalg::bilinear(xp, &fb.apply(&ps, t, &y)?))
        }),
    }
}

/// Unimodular multiples of `1/(2 pi)` with `<A S x, x'> = c_+ P_+ + c_- P_-`,
/// `P_+-` the pairings of [`key_lemma_pairing`].
pub fn pairing_constants(rho: f64) -> (C64, C64) {
    let two_pi_i = c64(0.0, 2.0 * PI);
    (C64::from_polar(1.0, 1.5 * rho) / two_pi_i, -C64::from_polar(1.0, -1.5 * rho) / two_pi_i)
}

/// `c_+ P_+ + c_- P_-`.
pub fn reconstruct_as_pairing(prob: &OperatorSumProblem, x: &CVec, xp: &CVec) -> Result<C64> {
    let (cp, cm) = pairing_constants(prob.rho);
    Ok(cp * key_lemma_pairing(prob, x, xp, Sign::Plus)? + cm * key_lemma_pairing(prob, x, xp, Sign::Minus)?)
}

/// Measured constants of `|Au| + |Bu| <= C |(A+B)u|` and of its graph-norm form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosednessConstant {
    /// Best of the sampled and ascended witnesses.
    pub c_hom: f64,
    /// Best over the random trials alone.
    pub c_hom_sampled: f64,
    /// `(|u| + |Au| + |Bu|) / (|u| + |(A+B)u|)`, maximized over the same witnesses.
    pub c_graph: f64,
    pub norm_as: f64,
    pub norm_bs: f64,
    /// Whether `norm_as` and `norm_bs` are exact operator norms.
    pub exact: bool,
}

/// Witness search for the closedness constants with `(A+B)^{-1}` from a dense solve.
pub fn closedness_constant(prob: &OperatorSumProblem, trials: usize, seed: u64) -> Result<ClosednessConstant> {
    let n = prob.dim();
    let sum = prob.a.entries() + prob.b.entries();
    let (inv, _) = linalg::inverse_checked(&sum).map_err(|condition| Error::SingularSum { condition })?;
    let x = prob.a.entries() * &inv;
    let y = prob.b.entries() * &inv;
    let norm = &prob.norm;
    let on_x = norm.operator_norm(&x);
    let on_y = norm.operator_norm(&y);

    // everything is measured in v = (A+B) u
    let hom = |v: &CVec| (norm.norm(&(&x * v)) + norm.norm(&(&y * v))) / norm.norm(v);
    let graph = |v: &CVec| {
        let u = &inv * v;
        let nu = norm.norm(&u);
        (nu + norm.norm(&(&x * v)) + norm.norm(&(&y * v))) / (nu + norm.norm(v))
    };
    let mut r = rng::seeded(seed);
    let mut pool: Vec<CVec> = (0..trials).map(|_| rng::complex_gaussian(&mut r, n)).collect();
    let sampled = pool.iter().map(&hom).fold(0.0, f64::max);
    pool.push(on_x.maximizer.clone());
    pool.push(on_y.maximizer.clone());

    let dual = norm.dual();
    let (xt, yt) = (x.transpose(), y.transpose());
    let mut ranked: Vec<(f64, usize)> = pool.iter().enumerate().map(|(k, v)| (hom(v), k)).collect();
    ranked.sort_by(|p, q| q.0.total_cmp(&p.0));
    let mut ascended = Vec::new();
    for &(_, k) in ranked.iter().take(4) {
        let mut v = pool[k].clone();
        let mut value = hom(&v);
        for _ in 0..200 {
            let (xv, yv) = (&x * &v, &y * &v);
            let g = &xt * norm.dual_direction(&xv) + &yt * norm.dual_direction(&yv);
            let cand = dual.dual_direction(&g);
            if norm.norm(&cand) == 0.0 {
                break;
            }
            let c = hom(&cand);
            if c <= value * (1.0 + 1e-14) {
                break;
            }
            value = c;
            v = cand;
        }
        ascended.push(v);
    }
    pool.extend(ascended);
    let c_hom = pool.iter().map(&hom).fold(sampled, f64::max);
    let c_graph = pool.iter().map(&graph).fold(0.0, f64::max);
    Ok(ClosednessConstant {
        c_hom,
        c_hom_sampled: sampled,
        c_graph,
        norm_as: on_x.value,
        norm_bs: on_y.value,
        exact: on_x.exact && on_y.exact,
    })
}

/// Euclidean constants of `|A (A+B)^{-1}| <= (1/2 pi) sum M K K'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpgBound {
    pub bound: f64,
    pub norm_as: f64,
    /// `sup_t |psi_+-(tB)|`, sampled.
    pub m: [f64; 2],
    /// `|int phi_+-(tA)^* phi_+-(tA) dt/t|^{1/2}`.
    pub k: [f64; 2],
    /// The same for `phi_+-(tA)^T`.
    pub k_dual: [f64; 2],
}

/// Samples per ray used for `sup_t |psi(tB)|`.
pub const PSI_SUP_SAMPLES: usize = 1025;

pub fn dpg_bound(prob: &OperatorSumProblem) -> Result<DpgBound> {
    let (a, b) = prob.base_pair();
    let (lo, hi) = calculus::scales(b);
    let grid = operator::log_grid(1e-8 / hi, 1e8 / lo, PSI_SUP_SAMPLES);
    let fb = MatrixFunctions::new(b);
    let a_op = LinearOperator::new(a.clone(), "A")?;
    let mut out = DpgBound { bound: 0.0, norm_as: 0.0, m: [0.0; 2], k: [0.0; 2], k_dual: [0.0; 2] };
    for (j, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        let ps = psi(sign, prob.rho);
        // psi(0) = e^{-+i rho}, of modulus one
        let mut sup = 1.0f64;
        for &t in &grid {
            sup = sup.max(linalg::op_norm2(&fb.eval(&ps, c64(t, 0.0))?));
        }
        let ph = phi(sign, prob.rho);
        let g = lpnorms::square_function_gram(&a_op, &ph, None)?;
        let gd = lpnorms::dual_square_function_gram(&a_op, &ph, None)?;
        out.m[j] = sup;
        out.k[j] = lpnorms::gram_constant(&g);
        out.k_dual[j] = lpnorms::gram_constant(&gd);
        out.bound += sup * out.k[j] * out.k_dual[j] / (2.0 * PI);
    }
    let sum = prob.a.entries() + prob.b.entries();
    let (inv, _) = linalg::inverse_checked(&sum).map_err(|condition| Error::SingularSum { condition })?;
    out.norm_as = linalg::op_norm2(&(prob.a.entries() * inv));
    Ok(out)
}

/// `U_n = rho_n(e^{i(pi - rho)} A) rho_n(e^{-i rho} B)`.
pub fn approximant(prob: &OperatorSumProblem, n: f64) -> Result<CMat> {
    let r = HolomorphicSymbol::rho_n(n);
    let (a, b) = prob.base_pair();
    let ua = calculus::symbol_matrix(&(a * C64::from_polar(1.0, PI - prob.rho)), &r)?;
    let ub = calculus::symbol_matrix(&(b * C64::from_polar(1.0, -prob.rho)), &r)?;
    Ok(match prob.factors {
        Some(_) => linalg::kron(&ua, &ub),
        None => ua * ub,
    })
}

/// `|U_n x - x|` for each `n` in `ns`.
pub fn approximant_errors(prob: &OperatorSumProblem, x: &CVec, ns: &[f64]) -> Result<Vec<f64>> {
    check_vec(prob, x)?;
    ns.iter().map(|&n| Ok(prob.norm.norm(&(approximant(prob, n)? * x - x)))).collect()
}
