//! The parabolic problem `u' + A0 u = f`, `u(0) = 0`, on a uniform backward
//! difference time grid: solution through the operator-sum inverse, the
//! forward-substitution oracle, and measured maximal-regularity constants.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::lpnorms::{self, SquareFunctionSpec};
use crate::operator::{self, LinearOperator};
use crate::opsum::{self, OperatorSumProblem};
use crate::quadrature::ContourQuadrature;
use crate::{c64, linalg, rng, CMat, CVec, Error, HolomorphicSymbol, MixedNormSpec, Result};

/// Residual accepted from the contour solve, relative to `|f|`.
pub const RESIDUAL_TOL: f64 = 1e-7;

/// Parameters of the `Y_theta` norm
/// `|| (int int |s^{-theta} phi(s A0) f(., t)|^q dt ds/s)^{1/q} ||_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct YThetaSpec {
    pub symbol: HolomorphicSymbol,
    pub theta: f64,
    pub q: f64,
    /// Exponent of the space norm `E`.
    pub p_space: f64,
}

impl Default for YThetaSpec {
    fn default() -> Self {
        Self { symbol: HolomorphicSymbol::z2_over_1pz_4(), theta: 0.5, q: 2.0, p_space: 2.0 }
    }
}

#[derive(Debug, Clone)]
pub struct ParabolicProblem {
    pub a0: LinearOperator,
    /// Number of time steps; unknowns sit at `t_k = k dt`, `k = 1..=m`.
    pub m: usize,
    pub dt: f64,
    /// Forcing, indexed `i*m + k` (space index `i`, time slot `k`).
    pub f: CVec,
    /// Exponent of the `L^p(0, T; l^p)` norm with quadrature weights.
    pub p: f64,
    pub ytheta: YThetaSpec,
}

impl ParabolicProblem {
    pub fn new(a0: LinearOperator, m: usize, dt: f64, f: CVec) -> Result<Self> {
        if m < 2 || !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("need m >= 2 and dt > 0 (got {m}, {dt})")));
        }
        if f.len() != a0.dim() * m {
            return Err(Error::DimensionMismatch { expected: a0.dim() * m, found: f.len() });
        }
        let angle = a0.sector_angle();
        if !(angle < PI / 2.0) {
            return Err(Error::InvalidArgument(format!("A0 has sector angle {angle} >= pi/2")));
        }
        Ok(Self { a0, m, dt, f, p: 2.0, ytheta: YThetaSpec::default() })
    }

    /// Dirichlet Laplacian on `n` interior nodes of `(0, 1)`, `m` steps up to `t_end`.
    pub fn heat(n: usize, m: usize, t_end: f64) -> Result<Self> {
        let a0 = operator::dirichlet_laplacian_1d(n, 1.0 / (n + 1) as f64)?;
        Self::new(a0, m, t_end / m as f64, CVec::from_element(n * m, c64(1.0, 0.0)))
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p = {p} < 1")));
        }
        self.p = p;
        Ok(self)
    }

    pub fn with_ytheta(mut self, spec: YThetaSpec) -> Result<Self> {
        lpnorms::check_weight(&spec.symbol, spec.theta)?;
        self.ytheta = spec;
        Ok(self)
    }

    pub fn with_forcing(mut self, f: CVec) -> Result<Self> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.len() });
        }
        self.f = f;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a0.dim()
    }

    pub fn dim(&self) -> usize {
        self.n() * self.m
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.m as f64
    }

    pub fn time_derivative(&self) -> Result<LinearOperator> {
        operator::time_derivative_operator(self.m, self.dt)
    }

    /// The lifted `L^p` norm, weights `dt^{1/p}`.
    pub fn norm(&self) -> MixedNormSpec {
        MixedNormSpec::p(self.p).with_weights(vec![self.dt.powf(1.0 / self.p); self.dim()])
    }

    pub fn ytheta_spec(&self) -> Result<SquareFunctionSpec> {
        let y = &self.ytheta;
        let outer = MixedNormSpec::mixed(y.p_space, y.q, self.m).with_weights(vec![self.dt.powf(1.0 / y.q); self.dim()]);
        SquareFunctionSpec::new(y.symbol.clone(), y.q, y.theta, outer)
    }

    /// `A0 (x) I_m` and the backward difference `I_n (x) D` as an operator-sum problem.
    pub fn sum_problem(&self, rho: Option<f64>) -> Result<OperatorSumProblem> {
        OperatorSumProblem::kronecker(&self.a0, &self.time_derivative()?, rho, self.norm())
    }

    /// The same problem on a grid `factor` times finer over the same horizon,
    /// forcing held piecewise constant.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let (n, m) = (self.n(), self.m);
        let mm = m * factor;
        let f = CVec::from_fn(n * mm, |j, _| self.f[(j / mm) * m + (j % mm) / factor]);
        let mut p = Self::new(self.a0.clone(), mm, self.dt / factor as f64, f)?;
        p.p = self.p;
        p.ytheta = self.ytheta.clone();
        Ok(p)
    }

    pub fn to_block(&self, x: &CVec) -> CMat {
        CMat::from_fn(self.n(), self.m, |i, k| x[i * self.m + k])
    }
}

fn flatten(f: &CMat) -> CVec {
    let (n, m) = (f.nrows(), f.ncols());
    CVec::from_fn(n * m, |j, _| f[(j / m, j % m)])
}

/// Backward difference of the columns of `U` with `u_0 = 0`.
fn time_difference(u: &CMat, dt: f64) -> CMat {
    CMat::from_fn(u.nrows(), u.ncols(), |i, k| {
        let prev = if k == 0 { c64(0.0, 0.0) } else { u[(i, k - 1)] };
        (u[(i, k)] - prev) / dt
    })
}

#[derive(Debug, Clone)]
pub struct ParabolicSolution {
    pub u: CVec,
    pub au: CVec,
    pub du: CVec,
    /// `|Au + u' - f| / |f|` in the problem norm.
    pub residual: f64,
}

fn assemble(prob: &ParabolicProblem, u: CVec) -> ParabolicSolution {
    let ub = prob.to_block(&u);
    let au = flatten(&(prob.a0.entries() * &ub));
    let du = flatten(&time_difference(&ub, prob.dt));
    let norm = prob.norm();
    let fnorm = norm.norm(&prob.f);
    let res = norm.norm(&(&au + &du - &prob.f));
    let residual = if fnorm == 0.0 { res } else { res / fnorm };
    ParabolicSolution { u, au, du, residual }
}

/// `u = (A + B)^{-1} f` by the sector contour integral.
pub fn solve_opsum(prob: &ParabolicProblem, rho: Option<f64>, quad: Option<ContourQuadrature>) -> Result<ParabolicSolution> {
    let mut sp = prob.sum_problem(rho)?;
    if let Some(q) = quad {
        sp = sp.with_quadrature(q)?;
    }
    let u = opsum::apply_sum_inverse(&sp, &prob.f)?;
    let sol = assemble(prob, u);
    if !(sol.residual <= RESIDUAL_TOL) {
        return Err(Error::NotConverged { defect: sol.residual, tolerance: RESIDUAL_TOL });
    }
    Ok(sol)
}

/// Forward substitution `(I + dt A0) u_k = u_{k-1} + dt f_k`, `u_0 = 0`.
pub fn solve_mild(prob: &ParabolicProblem) -> Result<CVec> {
    Ok(flatten(&mild_block(prob, &prob.to_block(&prob.f))?))
}

fn mild_block(prob: &ParabolicProblem, f: &CMat) -> Result<CMat> {
    let n = prob.n();
    let step = linalg::identity(n) + prob.a0.entries() * c64(prob.dt, 0.0);
    let lu = step.lu();
    let mut u = CMat::zeros(n, f.ncols());
    let mut prev = CVec::zeros(n);
    for k in 0..f.ncols() {
        let rhs = &prev + f.column(k) * c64(prob.dt, 0.0);
        prev = lu.solve(&rhs).ok_or(Error::SingularSum { condition: f64::INFINITY })?;
        u.set_column(k, &prev);
    }
    Ok(u)
}

/// Constants of one time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementRow {
    pub m: usize,
    pub dt: f64,
    /// `max (|Au| + |u'|) / |f|` in `L^p`.
    pub c_p: f64,
    /// `max (|u| + |Au| + |u'|) / |f|` in `L^p`.
    pub c_inhom: f64,
    /// `max (|Au| + |u'|) / |f|` in `Y_theta`.
    pub c_ytheta: f64,
    pub norm_as: f64,
    pub norm_bs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxRegConstant {
    pub c_p: f64,
    pub c_inhom: f64,
    pub c_ytheta: f64,
    /// Grids `m, 2m, 4m, ...`.
    pub refinement_table: Vec<RefinementRow>,
}

/// The ratio `(|Au| + |u'|) / |f|` in the `L^p` norm of `prob`.
pub fn lp_ratio(prob: &ParabolicProblem, f: &CVec) -> Result<f64> {
    let fb = prob.to_block(f);
    let u = mild_block(prob, &fb)?;
    let norm = prob.norm();
    let a = norm.norm(&flatten(&(prob.a0.entries() * &u)));
    let d = norm.norm(&flatten(&time_difference(&u, prob.dt)));
    Ok((a + d) / norm.norm(f))
}

fn grid_constants(prob: &ParabolicProblem, trials: usize, seed: u64) -> Result<RefinementRow> {
    let (n, m, dim) = (prob.n(), prob.m, prob.dim());
    let norm = prob.norm();
    let (a, b) = operator::make_kronecker_pair(&prob.a0, &prob.time_derivative()?);
    let sum = a.entries() + b.entries();
    let (inv, _) = linalg::inverse_checked(&sum).map_err(|condition| Error::SingularSum { condition })?;
    let on_a = norm.operator_norm(&(a.entries() * &inv));
    let on_b = norm.operator_norm(&(b.entries() * &inv));

    let mut pool: Vec<CVec> = (0..trials).map(|t| rng::complex_gaussian(&mut rng::substream(seed, t as u64), dim)).collect();
    // forcing in the last step only
    let mut last = CVec::zeros(dim);
    for i in 0..n {
        last[i * m + m - 1] = c64(1.0, 0.0);
    }
    pool.push(last);
    pool.push(on_a.maximizer);
    pool.push(on_b.maximizer);

    let yspec = prob.ytheta_spec()?;
    let ynorm = |x: &CMat| lpnorms::tl_norm_lifted(&prob.a0, x, &yspec).map(|v| v.value);
    let mut row =
        RefinementRow { m, dt: prob.dt, c_p: 0.0, c_inhom: 0.0, c_ytheta: 0.0, norm_as: on_a.value, norm_bs: on_b.value };
    for f in &pool {
        let fb = prob.to_block(f);
        let u = mild_block(prob, &fb)?;
        let au = prob.a0.entries() * &u;
        let du = time_difference(&u, prob.dt);
        let nf = norm.norm(f);
        let (nu, na, nd) = (norm.norm(&flatten(&u)), norm.norm(&flatten(&au)), norm.norm(&flatten(&du)));
        row.c_p = row.c_p.max((na + nd) / nf);
        row.c_inhom = row.c_inhom.max((nu + na + nd) / nf);
        row.c_ytheta = row.c_ytheta.max((ynorm(&au)? + ynorm(&du)?) / ynorm(&fb)?);
    }
    Ok(row)
}

/// Maximal-regularity constants over seeded random forcings plus the
/// maximizers of `|A (A+B)^{-1}|` and `|B (A+B)^{-1}|`, on `levels` grids
/// `m, 2m, 4m, ...` over the same horizon.
pub fn maxreg_constant(prob: &ParabolicProblem, trials: usize, seed: u64, levels: usize) -> Result<MaxRegConstant> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one refinement level".into()));
    }
    let mut table = Vec::with_capacity(levels);
    for level in 0..levels {
        let p = prob.refined(1 << level)?;
        table.push(grid_constants(&p, trials, seed)?);
    }
    let base = table[0];
    Ok(MaxRegConstant { c_p: base.c_p, c_inhom: base.c_inhom, c_ytheta: base.c_ytheta, refinement_table: table })
}
