//! Littlewood-Paley norms `(int ||t^{-theta} phi(tA) x||^p dt/t)^{1/p}`,
//! square-function Gram operators, Gaussian (gamma) norms and the mixed
//! Triebel-Lizorkin norms with a coordinatewise inner `L^q(dt/t)` integral.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::calculus::MatrixFunctions;
use crate::quadrature::{ContourKind, ContourQuadrature};
use crate::{c64, linalg, rng, CMat, CVec, Error, HolomorphicSymbol, LinearOperator, MixedNormSpec, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SquareFunctionSpec {
    pub symbol: HolomorphicSymbol,
    /// `p` for [`lp_norm`], the inner `q` for [`tl_norm`].
    pub exponent: f64,
    pub theta: f64,
    /// Half-line rule; chosen from the operator when absent.
    pub quad: Option<ContourQuadrature>,
    pub norm: MixedNormSpec,
}

/// A norm value with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    /// Relative change of the value against the rule with twice the step.
    pub defect: f64,
    pub grid_n: usize,
}

impl SquareFunctionSpec {
    pub fn new(symbol: HolomorphicSymbol, exponent: f64, theta: f64, norm: MixedNormSpec) -> Result<Self> {
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!("integrability exponent {exponent} must lie in [1, inf)")));
        }
        check_weight(&symbol, theta)?;
        Ok(Self { symbol, exponent, theta, quad: None, norm })
    }

    pub fn euclidean(symbol: HolomorphicSymbol) -> Self {
        Self { symbol, exponent: 2.0, theta: 0.0, quad: None, norm: MixedNormSpec::euclidean() }
    }

    pub fn with_quadrature(mut self, quad: ContourQuadrature) -> Self {
        self.quad = Some(quad);
        self
    }

    /// The rule used for `A`: the stored one, or one chosen from the spectrum of `A`.
    pub fn rule_for(&self, m: &CMat) -> Result<ContourQuadrature> {
        match &self.quad {
            Some(q) if q.kind == ContourKind::HalflineDtOverT => Ok(q.clone()),
            Some(_) => Err(Error::InvalidArgument("square functions need a half-line dt/t rule".into())),
            None => halfline_rule(m, &self.symbol, self.theta, self.exponent),
        }
    }
}

/// `t^{-theta} phi(t .)` must stay in H-infinity-0.
pub fn check_weight(phi: &HolomorphicSymbol, theta: f64) -> Result<()> {
    let (e0, einf) = phi.decays();
    if theta < e0 && theta > -einf {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange { theta, lower: -einf, upper: e0, symbol: phi.label.clone() })
    }
}

/// Half-line rule resolving `||t^{-theta} phi(tM) x||^p` for the spectrum of `M`.
pub fn halfline_rule(m: &CMat, phi: &HolomorphicSymbol, theta: f64, p: f64) -> Result<ContourQuadrature> {
    check_weight(phi, theta)?;
    let (e0, einf) = phi.decays();
    let omega = linalg::spectral_angle(&linalg::eigenvalues(m));
    let sigma = phi.holo_angle();
    if omega >= sigma {
        return Err(Error::ContourTooTight { rho: sigma, spectral_angle: omega, upper: sigma });
    }
    let (lo, hi) = crate::calculus::scales(m);
    if !(lo > 0.0) {
        return Err(Error::SingularBase);
    }
    ContourQuadrature::auto(
        ContourKind::HalflineDtOverT,
        1.0 / hi,
        1.0 / lo,
        p * (e0 - theta),
        p * (einf + theta),
        0.5 * (sigma - omega),
        crate::calculus::AUTO_TOL,
    )
}

fn check_dim(a: &LinearOperator, x: &CVec, norm: &MixedNormSpec) -> Result<()> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: x.len() });
    }
    norm.validate(x.len())
}

/// `(int ||t^{-theta} phi(tA) x||^p dt/t)^{1/p}`.
pub fn lp_norm(a: &LinearOperator, x: &CVec, spec: &SquareFunctionSpec) -> Result<f64> {
    lp_norm_detailed(a, x, spec).map(|v| v.value)
}

pub fn lp_norm_detailed(a: &LinearOperator, x: &CVec, spec: &SquareFunctionSpec) -> Result<NormValue> {
    check_dim(a, x, &spec.norm)?;
    let quad = spec.rule_for(a.entries())?;
    let funcs = MatrixFunctions::new(a.entries());
    let p = spec.exponent;
    let r = quad.integrate(|t| {
        let y = funcs.apply(&spec.symbol, t, x)?;
        Ok((t.re.powf(-spec.theta) * spec.norm.norm(&y)).powf(p))
    })?;
    let value = r.value.powf(1.0 / p);
    let coarse = r.coarse.powf(1.0 / p);
    let defect = if value == 0.0 { 0.0 } else { (value - coarse).abs() / value };
    quad.check(r)?;
    Ok(NormValue { value, defect, grid_n: quad.node_count })
}

/// `G = int phi(tA)^* phi(tA) dt/t`; `||G||^{1/2}` is the best constant in
/// the Euclidean `p = 2` square-function estimate.
pub fn square_function_gram(a: &LinearOperator, phi: &HolomorphicSymbol, quad: Option<&ContourQuadrature>) -> Result<CMat> {
    gram_of(a.entries(), phi, quad, false)
}

/// `int conj(phi(tA)) phi(tA)^T dt/t`: the Gram operator of `t -> phi(tA)' x'`.
pub fn dual_square_function_gram(a: &LinearOperator, phi: &HolomorphicSymbol, quad: Option<&ContourQuadrature>) -> Result<CMat> {
    gram_of(a.entries(), phi, quad, true)
}

pub(crate) fn gram_of(m: &CMat, phi: &HolomorphicSymbol, quad: Option<&ContourQuadrature>, dual: bool) -> Result<CMat> {
    let quad = match quad {
        Some(q) => q.clone(),
        None => halfline_rule(m, phi, 0.0, 2.0)?,
    };
    let funcs = MatrixFunctions::new(m);
    let g = quad.integrate_checked(|t| {
        let f = funcs.eval(phi, t)?;
        Ok(if dual { f.conjugate() * f.transpose() } else { f.adjoint() * f })
    })?;
    Ok((&g + g.adjoint()) * c64(0.5, 0.0))
}

/// `||G||^{1/2}`.
pub fn gram_constant(g: &CMat) -> f64 {
    linalg::op_norm2(g).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Monte Carlo `(E || sum_j g_j T h_j ||^2)^{1/2}` for `T h = int h(t) phi(tA) x dt/t`,
/// with `h_j` the normalized indicator system of the quadrature grid.
pub fn gamma_norm(
    a: &LinearOperator,
    phi: &HolomorphicSymbol,
    x: &CVec,
    quad: Option<&ContourQuadrature>,
    norm: &MixedNormSpec,
    samples: usize,
    seed: u64,
) -> Result<GammaEstimate> {
    check_dim(a, x, norm)?;
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("gamma norm needs at least 2 samples, got {samples}")));
    }
    let quad = match quad {
        Some(q) => q.clone(),
        None => halfline_rule(a.entries(), phi, 0.0, 2.0)?,
    };
    let funcs = MatrixFunctions::new(a.entries());
    let (weights, _) = quad.log_weights();
    let mut columns = Vec::with_capacity(quad.node_count);
    for (t, w) in quad.t_nodes().into_iter().zip(weights) {
        columns.push(funcs.apply(phi, c64(t, 0.0), x)? * c64(w.sqrt(), 0.0));
    }
    let n = x.len();
    let mut r = rng::seeded(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let mut acc = CVec::zeros(n);
        for col in &columns {
            let g = rng::normal(&mut r);
            acc.zip_apply(col, |a, b| *a += b * g);
        }
        let v = norm.norm(&acc).powi(2);
        sum += v;
        sum_sq += v * v;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = ((sum_sq / k - mean * mean) * k / (k - 1.0)).max(0.0);
    let estimate = mean.sqrt();
    let stderr = if estimate > 0.0 { (var / k).sqrt() / (2.0 * estimate) } else { 0.0 };
    Ok(GammaEstimate { estimate, stderr })
}

/// Coordinatewise `(int |t^{-theta} y_k(t)|^q dt/t)^{1/q}` with `y(t)` from `values`.
pub(crate) fn inner_lq(
    quad: &ContourQuadrature,
    theta: f64,
    q: f64,
    dim: usize,
    mut values: impl FnMut(C64) -> Result<CVec>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = quad.integrate(|t| {
        let y = values(t)?;
        if y.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: y.len() });
        }
        let w = t.re.powf(-theta);
        Ok(CVec::from_iterator(dim, y.iter().map(|z| c64((w * z.norm()).powf(q), 0.0))))
    })?;
    let root = |v: &CVec| v.iter().map(|z| z.re.max(0.0).powf(1.0 / q)).collect::<Vec<f64>>();
    Ok((root(&r.value), root(&r.coarse)))
}

fn lattice_with_defect(norm: &MixedNormSpec, fine: &[f64], coarse: &[f64], quad: &ContourQuadrature) -> Result<NormValue> {
    let value = norm.lattice_norm(fine);
    let c = norm.lattice_norm(coarse);
    let defect = if value == 0.0 { 0.0 } else { (value - c).abs() / value };
    if !(defect <= quad.defect_tol) {
        return Err(Error::NotConverged { defect, tolerance: quad.defect_tol });
    }
    Ok(NormValue { value, defect, grid_n: quad.node_count })
}

/// `|| (int |t^{-theta} phi(tA) x|^q dt/t)^{1/q} ||` with the modulus taken
/// coordinatewise and the outer norm from `spec.norm`.
pub fn tl_norm(a: &LinearOperator, x: &CVec, spec: &SquareFunctionSpec) -> Result<f64> {
    tl_norm_detailed(a, x, spec).map(|v| v.value)
}

pub fn tl_norm_detailed(a: &LinearOperator, x: &CVec, spec: &SquareFunctionSpec) -> Result<NormValue> {
    check_dim(a, x, &spec.norm)?;
    let funcs = MatrixFunctions::new(a.entries());
    refine_until_converged(spec, a.entries(), |quad| {
        let (fine, coarse) = inner_lq(quad, spec.theta, spec.exponent, x.len(), |t| funcs.apply(&spec.symbol, t, x))?;
        lattice_with_defect(&spec.norm, &fine, &coarse, quad)
    })
}

/// Halvings of the automatic step tried when `|.|^q` is not smooth enough
/// for the first rule.
pub const TL_REFINEMENTS: usize = 3;

fn refine_until_converged(
    spec: &SquareFunctionSpec,
    m: &CMat,
    mut eval: impl FnMut(&ContourQuadrature) -> Result<NormValue>,
) -> Result<NormValue> {
    let mut quad = spec.rule_for(m)?;
    let retries = if spec.quad.is_some() { 0 } else { TL_REFINEMENTS };
    for _ in 0..retries {
        match eval(&quad) {
            Err(Error::NotConverged { .. }) if 2 * quad.node_count - 1 <= crate::quadrature::MAX_NODES => {
                quad = quad.refined()?
            }
            other => return other,
        }
    }
    eval(&quad)
}

/// [`tl_norm`] of `A0 (x) I_m` applied to `F` (rows: the `A0` index, columns:
/// the second factor), without forming the lifted operator.
pub fn tl_norm_lifted(a0: &LinearOperator, f: &CMat, spec: &SquareFunctionSpec) -> Result<NormValue> {
    let (n, m) = (f.nrows(), f.ncols());
    if n != a0.dim() {
        return Err(Error::DimensionMismatch { expected: a0.dim(), found: n });
    }
    spec.norm.validate(n * m)?;
    let funcs = MatrixFunctions::new(a0.entries());
    refine_until_converged(spec, a0.entries(), |quad| {
        let (fine, coarse) = inner_lq(quad, spec.theta, spec.exponent, n * m, |t| {
            let y = funcs.apply_block(&spec.symbol, t, f)?;
            // row-major flattening: index i*m + k
            Ok(CVec::from_iterator(n * m, (0..n).flat_map(|i| (0..m).map(move |k| (i, k))).map(|(i, k)| y[(i, k)])))
        })?;
        lattice_with_defect(&spec.norm, &fine, &coarse, quad)
    })
}

/// The dual Triebel-Lizorkin expression
/// `|| (int |t^{theta-1} phi(tA') (A')^{-1} x'|^{q'} dt/t)^{1/q'} ||_{X'}`,
/// for the primal weight `theta`, inner exponent `q` and outer norm in `spec`.
pub fn dual_tl_norm(a: &LinearOperator, xp: &CVec, spec: &SquareFunctionSpec) -> Result<f64> {
    let q = spec.exponent;
    let q_dual = if q == 1.0 { return Err(Error::InvalidArgument("dual of q = 1 needs q' = inf".into())) } else { q / (q - 1.0) };
    let ad = a.dual();
    let y = ad.inverse()?.entries() * xp;
    let dual_spec = SquareFunctionSpec {
        symbol: spec.symbol.clone(),
        exponent: q_dual,
        theta: 1.0 - spec.theta,
        quad: None,
        norm: spec.norm.dual(),
    };
    check_weight(&dual_spec.symbol, dual_spec.theta)?;
    tl_norm(&ad, &y, &dual_spec)
}

/// Two-sided ratio range `min/max of norm1(x)/norm2(x)` over a sample set.
pub fn equivalence_ratios(values_1: &[f64], values_2: &[f64]) -> (f64, f64) {
    values_1
        .iter()
        .zip(values_2)
        .filter(|(_, &b)| b > 0.0)
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::fractional_power;
    use crate::quadrature::ContourQuadrature;
    use core::f64::consts::PI;

    fn cv(xs: &[f64]) -> CVec {
        CVec::from_iterator(xs.len(), xs.iter().map(|&x| c64(x, 0.0)))
    }

    fn random_spd(seed: u64, n: usize) -> LinearOperator {
        let mut r = rng::seeded(seed);
        let g = CMat::from_fn(n, n, |_, _| c64(rng::normal(&mut r), 0.0));
        LinearOperator::new(&g * g.transpose() + linalg::identity(n) * c64(0.5, 0.0), "spd").unwrap()
    }

    /// Independent 1-d oracle: composite Simpson on `s in [-60, 60]` for `int f(e^s) ds`.
    fn simpson_log(f: impl Fn(f64) -> f64) -> f64 {
        let (a, b, n) = (-60.0, 60.0, 24000);
        let h = (b - a) / n as f64;
        let mut s = f(a.exp()) + f(b.exp());
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f((a + k as f64 * h).exp());
        }
        s * h / 3.0
    }

    #[test]
    fn beta_constant_for_diagonal() {
        for a in [0.01, 1.0, 300.0] {
            let op = LinearOperator::from_real_diagonal(&[a], "a").unwrap();
            let spec = SquareFunctionSpec::euclidean(HolomorphicSymbol::z_over_1pz_sq());
            let v = lp_norm(&op, &cv(&[2.0]), &spec).unwrap();
            assert!((v - 2.0 * (1.0f64 / 6.0).sqrt()).abs() < 1e-11, "{v}");
        }
        let op = LinearOperator::from_real_diagonal(&[1.0, 2.0], "a").unwrap();
        let spec = SquareFunctionSpec::euclidean(HolomorphicSymbol::z_over_1pz_sq());
        assert_eq!(lp_norm(&op, &CVec::zeros(2), &spec).unwrap(), 0.0);
    }

    #[test]
    fn spectral_expansion_for_spd() {
        let a = random_spd(9, 5);
        let spec = SquareFunctionSpec::euclidean(HolomorphicSymbol::z_over_1pz_sq());
        let mut r = rng::seeded(1);
        for _ in 0..5 {
            let x = rng::complex_gaussian(&mut r, 5);
            let v = lp_norm(&a, &x, &spec).unwrap();
            let oracle = linalg::vec_norm2(&x).powi(2) / 6.0;
            assert!((v * v - oracle).abs() < 1e-9 * oracle);
        }
    }

    #[test]
    fn dilation_invariance() {
        let a = LinearOperator::from_real_rows(2, &[1.0, 3.0, 0.0, 2.0], "nn").unwrap();
        let spec = SquareFunctionSpec::euclidean(HolomorphicSymbol::z2_over_1pz_4());
        let x = cv(&[0.3, -1.0]);
        let v = lp_norm(&a, &x, &spec).unwrap();
        let w = lp_norm(&a.scaled(c64(37.0, 0.0)), &x, &spec).unwrap();
        assert!((v - w).abs() < 1e-9 * v);
    }

    #[test]
    fn gram_examples() {
        let one = LinearOperator::from_real_diagonal(&[1.0], "1").unwrap();
        let g = square_function_gram(&one, &HolomorphicSymbol::z_over_1pz_sq(), None).unwrap();
        assert!((g[(0, 0)] - c64(1.0 / 6.0, 0.0)).norm() < 1e-12);

        let a = random_spd(2, 4);
        let g = square_function_gram(&a, &HolomorphicSymbol::z_over_1pz_sq(), None).unwrap();
        assert!(linalg::frobenius(&(g - linalg::identity(4) * c64(1.0 / 6.0, 0.0))) < 1e-11);
    }

    #[test]
    fn gram_of_jordan_block_is_refinement_stable() {
        let a = LinearOperator::from_real_rows(2, &[1.0, 1.0, 0.0, 1.0], "j").unwrap();
        let phi = HolomorphicSymbol::z_over_1pz_sq();
        let quad = halfline_rule(a.entries(), &phi, 0.0, 2.0).unwrap();
        let g = square_function_gram(&a, &phi, Some(&quad)).unwrap();
        let g2 = square_function_gram(&a, &phi, Some(&quad.refined().unwrap())).unwrap();
        assert!(linalg::is_hermitian(&g));
        let eig = linalg::eigenvalues(&g);
        assert!(eig.iter().all(|z| z.re >= -1e-14));
        let k2 = linalg::op_norm2(&g);
        assert!((k2 - linalg::op_norm2(&g2)).abs() < 1e-9 * k2);
        // the top eigenvector attains the Rayleigh maximum
        let (_, v, _) = linalg::top_singular(&g);
        let spec = SquareFunctionSpec::euclidean(phi).with_quadrature(quad);
        let ratio = lp_norm(&a, &v, &spec).unwrap() / linalg::vec_norm2(&v);
        assert!((ratio * ratio - k2).abs() < 1e-9 * k2);
    }

    #[test]
    fn gram_bound_is_sharp_on_witness_pool() {
        let a = LinearOperator::from_real_rows(3, &[1.0, 2.0, 0.0, 0.0, 3.0, -1.0, 0.0, 0.0, 0.5], "t").unwrap();
        let phi = HolomorphicSymbol::z_over_1pz_cubed();
        let quad = halfline_rule(a.entries(), &phi, 0.0, 2.0).unwrap();
        let g = square_function_gram(&a, &phi, Some(&quad)).unwrap();
        let k = gram_constant(&g);
        let spec = SquareFunctionSpec::euclidean(phi).with_quadrature(quad);
        let mut r = rng::seeded(5);
        let mut pool: Vec<CVec> = (0..200).map(|_| rng::complex_gaussian(&mut r, 3)).collect();
        pool.push(linalg::top_singular(&g).1);
        let best = pool.iter().map(|x| lp_norm(&a, x, &spec).unwrap() / linalg::vec_norm2(x)).fold(0.0, f64::max);
        assert!(best <= k * (1.0 + 1e-9));
        assert!((best - k).abs() < 1e-6);
    }

    #[test]
    fn gamma_matches_square_function_in_hilbert_case() {
        let one = LinearOperator::from_real_diagonal(&[1.0], "1").unwrap();
        let phi = HolomorphicSymbol::z_over_1pz_sq();
        let est = gamma_norm(&one, &phi, &cv(&[1.0]), None, &MixedNormSpec::euclidean(), 4000, 3).unwrap();
        assert!((est.estimate - (1.0f64 / 6.0).sqrt()).abs() <= 3.0 * est.stderr, "{est:?}");
        let zero = gamma_norm(&one, &phi, &cv(&[0.0]), None, &MixedNormSpec::euclidean(), 200, 3).unwrap();
        assert_eq!(zero.estimate, 0.0);
    }

    #[test]
    fn gamma_is_homogeneous_with_common_random_numbers() {
        let a = LinearOperator::from_real_diagonal(&[1.0, 5.0, 0.2], "d").unwrap();
        let phi = HolomorphicSymbol::z_over_1pz_sq();
        let inf = MixedNormSpec::p(f64::INFINITY);
        let x = cv(&[1.0, -2.0, 0.5]);
        let e1 = gamma_norm(&a, &phi, &x, None, &inf, 300, 17).unwrap();
        let e2 = gamma_norm(&a, &phi, &(&x * c64(2.0, 0.0)), None, &inf, 300, 17).unwrap();
        assert!((e2.estimate - 2.0 * e1.estimate).abs() <= 1e-12 * e2.estimate);
    }

    #[test]
    fn tl_norm_degenerate_cases() {
        let a = LinearOperator::from_real_diagonal(&[3.0], "a").unwrap();
        let phi = HolomorphicSymbol::z2_over_1pz_4();
        let lp = SquareFunctionSpec::new(phi.clone(), 3.0, 0.5, MixedNormSpec::p(3.0)).unwrap();
        let x = cv(&[-1.5]);
        assert!((tl_norm(&a, &x, &lp).unwrap() - lp_norm(&a, &x, &lp).unwrap()).abs() < 1e-12);

        let a2 = LinearOperator::from_real_diagonal(&[3.0, 3.0], "aa").unwrap();
        let mixed = SquareFunctionSpec::new(phi, 2.0, 0.0, MixedNormSpec::mixed(f64::INFINITY, 2.0, 1)).unwrap();
        let scalar = SquareFunctionSpec { norm: MixedNormSpec::euclidean(), ..mixed.clone() };
        let v = tl_norm(&a2, &cv(&[1.0, 1.0]), &mixed).unwrap();
        let s = tl_norm(&a, &cv(&[1.0]), &scalar).unwrap();
        assert!((v - s).abs() < 1e-13);
    }

    #[test]
    fn tl_norm_spectral_oracle() {
        // sum_k |x_k|^2 a_k^{2 theta} c with c = int s^{-2 theta} |phi(s)|^2 ds/s = B(3,5) = 1/105
        let a = LinearOperator::from_real_diagonal(&[1.0, 4.0], "d").unwrap();
        let phi = HolomorphicSymbol::z2_over_1pz_4();
        let spec = SquareFunctionSpec::new(phi.clone(), 2.0, 0.5, MixedNormSpec::euclidean()).unwrap();
        let x = cv(&[0.7, -1.3]);
        let v = tl_norm(&a, &x, &spec).unwrap();
        let c = simpson_log(|s| s.powf(-1.0) * phi.eval(c64(s, 0.0)).unwrap().norm_sqr());
        assert!((c - 1.0 / 105.0).abs() < 1e-12);
        let oracle = ((0.7f64 * 0.7 * 1.0 + 1.3 * 1.3 * 4.0) * c).sqrt();
        assert!((v - oracle).abs() < 1e-10 * oracle, "{v} {oracle}");
    }

    #[test]
    fn weight_out_of_range() {
        let e = SquareFunctionSpec::new(HolomorphicSymbol::z_over_1pz_sq(), 2.0, 1.0, MixedNormSpec::euclidean());
        assert!(matches!(e, Err(Error::WeightOutOfRange { .. })));
    }

    #[test]
    fn symbol_change_is_a_bounded_equivalence() {
        let a = LinearOperator::from_real_rows(3, &[2.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 6.0], "t").unwrap();
        let norm = MixedNormSpec::mixed(3.0, 2.0, 1);
        let s1 = SquareFunctionSpec::new(HolomorphicSymbol::z2_over_1pz_4(), 2.0, 0.5, norm.clone()).unwrap();
        let s2 = SquareFunctionSpec::new(HolomorphicSymbol::z_over_1pz_sq(), 2.0, 0.5, norm).unwrap();
        let mut r = rng::seeded(12);
        let xs: Vec<CVec> = (0..20).map(|_| rng::complex_gaussian(&mut r, 3)).collect();
        let v1: Vec<f64> = xs.iter().map(|x| tl_norm(&a, x, &s1).unwrap()).collect();
        let v2: Vec<f64> = xs.iter().map(|x| tl_norm(&a, x, &s2).unwrap()).collect();
        let (lo, hi) = equivalence_ratios(&v1, &v2);
        assert!(lo > 0.0 && hi.is_finite() && hi / lo < 20.0, "{lo} {hi}");
    }

    #[test]
    fn dual_tl_scalar_and_zero() {
        let a = LinearOperator::from_real_diagonal(&[2.0], "a").unwrap();
        let phi = HolomorphicSymbol::z2_over_1pz_4();
        let spec = SquareFunctionSpec::new(phi.clone(), 2.0, 0.25, MixedNormSpec::euclidean()).unwrap();
        let v = dual_tl_norm(&a, &cv(&[3.0]), &spec).unwrap();
        // |t^{-3/4} phi(2t) / 2 * 3|^2 integrated
        let oracle = simpson_log(|t| (t.powf(-0.75) * phi.eval(c64(2.0 * t, 0.0)).unwrap().norm() * 1.5).powi(2)).sqrt();
        assert!((v - oracle).abs() < 1e-10 * oracle, "{v} {oracle}");
        assert_eq!(dual_tl_norm(&a, &cv(&[0.0]), &spec).unwrap(), 0.0);
    }

    #[test]
    fn duality_sanity_constant_is_stable() {
        let a = LinearOperator::from_real_diagonal(&[0.5, 2.0, 9.0], "d").unwrap();
        let spec = SquareFunctionSpec::new(HolomorphicSymbol::z2_over_1pz_4(), 2.0, 0.5, MixedNormSpec::euclidean()).unwrap();
        let mut r = rng::seeded(8);
        let mut ratios = Vec::new();
        for _ in 0..100 {
            let x = rng::complex_gaussian(&mut r, 3);
            let xp = rng::complex_gaussian(&mut r, 3);
            let pairing = linalg::bilinear(&x, &xp).norm();
            ratios.push(pairing / (tl_norm(&a, &x, &spec).unwrap() * dual_tl_norm(&a, &xp, &spec).unwrap()));
        }
        let c = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(c.is_finite() && c < 1e3);
    }

    #[test]
    fn lifted_tl_norm_matches_dense_lift() {
        let a0 = LinearOperator::from_real_rows(2, &[2.0, 1.0, 0.0, 3.0], "a0").unwrap();
        let f = CMat::from_fn(2, 3, |i, k| c64(1.0 + i as f64 - 0.5 * k as f64, 0.2 * k as f64));
        let spec =
            SquareFunctionSpec::new(HolomorphicSymbol::z2_over_1pz_4(), 2.0, 0.5, MixedNormSpec::mixed(2.0, 2.0, 3)).unwrap();
        let lifted = tl_norm_lifted(&a0, &f, &spec).unwrap().value;
        let (a, _) = crate::operator::make_kronecker_pair(&a0, &LinearOperator::identity(3));
        let x = CVec::from_iterator(6, (0..2).flat_map(|i| (0..3).map(move |k| (i, k))).map(|(i, k)| f[(i, k)]));
        let dense = tl_norm(&a, &x, &spec).unwrap();
        assert!((lifted - dense).abs() < 1e-12 * dense);
    }

    #[test]
    fn half_power_norm_relation() {
        // theta-weighted square function of A at theta = 1/2 equals the unweighted one of A^{1/2} x
        let a = random_spd(3, 3);
        let phi = HolomorphicSymbol::z2_over_1pz_4();
        let weighted = SquareFunctionSpec::new(phi.clone(), 2.0, 0.5, MixedNormSpec::euclidean()).unwrap();
        let shifted = SquareFunctionSpec::euclidean(phi.power_shift(0.5).unwrap());
        let x = cv(&[1.0, 0.0, -1.0]);
        let v = lp_norm(&a, &x, &weighted).unwrap();
        let root = fractional_power(&a, 0.5).unwrap();
        let w = lp_norm(&a, &(root.entries() * &x), &shifted).unwrap();
        assert!((v - w).abs() < 1e-9 * v);
        let _ = ContourQuadrature::halfline(0.0, 1.0, 5).unwrap();
        let _ = PI;
    }
}
