//! Trapezoid rules in the logarithmic variable `t = e^s`, either along the
//! boundary of a sector or along `(0, inf)` with measure `dt/t`.
//!
//! Node counts are always odd, so the even-indexed nodes form the rule with
//! twice the step. Every integral is returned together with that coarse value
//! and the relative difference of the two, which is the convergence check.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::{c64, linalg, CMat, CVec, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourKind {
    /// `lambda = t e^{i rho}` for `t` from `inf` to `0`, then `lambda = t e^{-i rho}`
    /// for `t` from `0` to `inf`; the sector `|arg| < rho` lies to the left.
    SectorBoundary { rho: f64 },
    /// `(0, inf)` with measure `dt/t`.
    HalflineDtOverT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourQuadrature {
    pub kind: ContourKind,
    /// Log-variable shift: nodes are `s = center + u` with `u` uniform on `[-L, L]`.
    pub center: f64,
    pub half_width: f64,
    pub node_count: usize,
    /// Largest accepted relative difference between the rule and its coarse half.
    pub defect_tol: f64,
}

pub const DEFAULT_DEFECT_TOL: f64 = 1e-7;
pub const MAX_NODES: usize = 40_001;

/// Integral value with the coarse (step `2h`) companion.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub coarse: T,
    /// `|value - coarse| / |value|`.
    pub defect: f64,
}

pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    fn axpy(&mut self, w: C64, x: &Self);
    fn magnitude(&self) -> f64;
    fn distance(&self, other: &Self) -> f64;
}

impl QuadValue for C64 {
    fn zero_like(&self) -> Self {
        c64(0.0, 0.0)
    }
    fn axpy(&mut self, w: C64, x: &Self) {
        *self += w * x;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, w: C64, x: &Self) {
        *self += w.re * x;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl QuadValue for CMat {
    fn zero_like(&self) -> Self {
        CMat::zeros(self.nrows(), self.ncols())
    }
    fn axpy(&mut self, w: C64, x: &Self) {
        self.zip_apply(x, |a, b| *a += w * b);
    }
    fn magnitude(&self) -> f64 {
        linalg::frobenius(self)
    }
    fn distance(&self, other: &Self) -> f64 {
        linalg::frobenius(&(self - other))
    }
}

impl QuadValue for CVec {
    fn zero_like(&self) -> Self {
        CVec::zeros(self.len())
    }
    fn axpy(&mut self, w: C64, x: &Self) {
        self.zip_apply(x, |a, b| *a += w * b);
    }
    fn magnitude(&self) -> f64 {
        linalg::vec_norm2(self)
    }
    fn distance(&self, other: &Self) -> f64 {
        linalg::vec_norm2(&(self - other))
    }
}

impl<T: QuadValue> QuadResult<T> {
    pub fn map<U: QuadValue>(self, mut f: impl FnMut(T) -> U) -> QuadResult<U> {
        let value = f(self.value);
        let coarse = f(self.coarse);
        let defect = relative(&value, &coarse);
        QuadResult { value, coarse, defect }
    }
}

fn relative<T: QuadValue>(value: &T, coarse: &T) -> f64 {
    let d = value.distance(coarse);
    if d == 0.0 {
        0.0
    } else {
        d / value.magnitude().max(f64::MIN_POSITIVE)
    }
}

/// One quadrature node: evaluation point and fine/coarse weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub point: C64,
    pub weight: C64,
    pub coarse_weight: C64,
}

impl ContourQuadrature {
    pub fn new(kind: ContourKind, center: f64, half_width: f64, node_count: usize) -> Result<Self> {
        if node_count < 5 || node_count.is_multiple_of(2) || node_count > MAX_NODES {
            return Err(Error::InvalidArgument(format!("node count {node_count} must be odd, in [5, {MAX_NODES}]")));
        }
        if !(half_width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!("bad log range center={center}, L={half_width}")));
        }
        if let ContourKind::SectorBoundary { rho } = kind {
            if !(rho > 0.0 && rho < PI) {
                return Err(Error::AngleViolation { rho, lower: 0.0, upper: PI });
            }
        }
        Ok(Self { kind, center, half_width, node_count, defect_tol: DEFAULT_DEFECT_TOL })
    }

    pub fn sector(rho: f64, center: f64, half_width: f64, node_count: usize) -> Result<Self> {
        Self::new(ContourKind::SectorBoundary { rho }, center, half_width, node_count)
    }

    pub fn halfline(center: f64, half_width: f64, node_count: usize) -> Result<Self> {
        Self::new(ContourKind::HalflineDtOverT, center, half_width, node_count)
    }

    pub fn with_defect_tol(mut self, tol: f64) -> Self {
        self.defect_tol = tol;
        self
    }

    /// Rule resolving an integrand that decays like `t^{decay_zero}` below
    /// `scale_lo` and `t^{-decay_inf}` above `scale_hi`, analytic in a strip of
    /// half-width `strip` in the log variable, to relative accuracy `tol`.
    pub fn auto(
        kind: ContourKind,
        scale_lo: f64,
        scale_hi: f64,
        decay_zero: f64,
        decay_inf: f64,
        strip: f64,
        tol: f64,
    ) -> Result<Self> {
        if !(scale_lo > 0.0 && scale_hi >= scale_lo) {
            return Err(Error::InvalidArgument(format!("bad scales [{scale_lo}, {scale_hi}]")));
        }
        if !(decay_zero > 0.0 && decay_inf > 0.0) {
            return Err(Error::InvalidArgument(format!("integrand must decay at both ends (got {decay_zero}, {decay_inf})")));
        }
        if !(strip > 0.0) {
            return Err(Error::InvalidArgument(format!("analyticity strip {strip} must be positive")));
        }
        let digits = (1.0 / tol).ln();
        let lo = scale_lo.ln() - digits / decay_zero;
        let hi = scale_hi.ln() + digits / decay_inf;
        let center = 0.5 * (lo + hi);
        let half_width = 0.5 * (hi - lo);
        // the trapezoid error behaves like exp(-2 pi d / h)
        let h = (0.5 * 2.0 * PI * strip / digits).min(0.25);
        let half = (half_width / h).ceil() as usize;
        let node_count = (2 * half + 1).clamp(5, MAX_NODES);
        Self::new(kind, center, half_width, node_count)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.node_count as f64 - 1.0)
    }

    pub fn log_nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.node_count).map(|j| self.center - self.half_width + j as f64 * h).collect()
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        self.log_nodes().into_iter().map(f64::exp).collect()
    }

    /// Trapezoid weights in the log variable.
    pub fn log_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.node_count;
        let h = self.step();
        let fine = (0..n).map(|j| if j == 0 || j == n - 1 { 0.5 * h } else { h }).collect();
        let coarse = (0..n)
            .map(|j| {
                if j % 2 == 1 {
                    0.0
                } else if j == 0 || j == n - 1 {
                    h
                } else {
                    2.0 * h
                }
            })
            .collect();
        (fine, coarse)
    }

    /// Same range, half the step.
    pub fn refined(&self) -> Result<Self> {
        let mut q = Self::new(self.kind, self.center, self.half_width, 2 * self.node_count - 1)?;
        q.defect_tol = self.defect_tol;
        Ok(q)
    }

    /// Same step, twice the range.
    pub fn extended(&self) -> Result<Self> {
        let mut q = Self::new(self.kind, self.center, 2.0 * self.half_width, 2 * self.node_count - 1)?;
        q.defect_tol = self.defect_tol;
        Ok(q)
    }

    pub fn rho(&self) -> Option<f64> {
        match self.kind {
            ContourKind::SectorBoundary { rho } => Some(rho),
            ContourKind::HalflineDtOverT => None,
        }
    }

    /// Nodes and weights so that `sum w f(point)` approximates
    /// `(1/2 pi i) int_Gamma f(lambda) d lambda` (sector) or `int f(t) dt/t` (half-line).
    pub fn nodes(&self) -> Vec<Node> {
        let ts = self.t_nodes();
        let (fine, coarse) = self.log_weights();
        match self.kind {
            ContourKind::HalflineDtOverT => ts
                .iter()
                .zip(fine.iter().zip(&coarse))
                .map(|(&t, (&w, &wc))| Node { point: c64(t, 0.0), weight: c64(w, 0.0), coarse_weight: c64(wc, 0.0) })
                .collect(),
            ContourKind::SectorBoundary { rho } => {
                // d lambda = lambda ds; the upper ray runs inward (sign -1)
                let inv_2pi_i = c64(0.0, -1.0 / (2.0 * PI));
                let mut out = Vec::with_capacity(2 * ts.len());
                for (sign, phase) in [(-1.0, rho), (1.0, -rho)] {
                    for (j, &t) in ts.iter().enumerate() {
                        let lambda = C64::from_polar(t, phase);
                        let base = lambda * inv_2pi_i * sign;
                        out.push(Node { point: lambda, weight: base * fine[j], coarse_weight: base * coarse[j] });
                    }
                }
                out
            }
        }
    }

    /// Fine and coarse sums of `f` over the nodes.
    pub fn integrate<T: QuadValue>(&self, mut f: impl FnMut(C64) -> Result<T>) -> Result<QuadResult<T>> {
        let mut acc: Option<(T, T)> = None;
        for node in self.nodes() {
            let v = f(node.point)?;
            let (fine, coarse) = acc.get_or_insert_with(|| (v.zero_like(), v.zero_like()));
            fine.axpy(node.weight, &v);
            if node.coarse_weight != c64(0.0, 0.0) {
                coarse.axpy(node.coarse_weight, &v);
            }
        }
        let (value, coarse) = acc.expect("at least five nodes");
        let defect = relative(&value, &coarse);
        Ok(QuadResult { value, coarse, defect })
    }

    /// `NotConverged` when the defect exceeds `defect_tol`.
    pub fn check<T>(&self, r: QuadResult<T>) -> Result<QuadResult<T>> {
        if r.defect.is_finite() && r.defect <= self.defect_tol {
            Ok(r)
        } else {
            Err(Error::NotConverged { defect: r.defect, tolerance: self.defect_tol })
        }
    }

    pub fn integrate_checked<T: QuadValue>(&self, f: impl FnMut(C64) -> Result<T>) -> Result<T> {
        let r = self.integrate(f)?;
        self.check(r).map(|r| r.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfline_integral_of_rational() {
        // int_0^inf t/(1+t)^2 dt/t = 1
        let q = ContourQuadrature::auto(ContourKind::HalflineDtOverT, 1.0, 1.0, 1.0, 1.0, PI / 2.0, 1e-13).unwrap();
        let r = q.integrate(|t| Ok(t / ((1.0 + t) * (1.0 + t)))).unwrap();
        assert!((r.value - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(r.defect < 1e-6);
    }

    #[test]
    fn sector_contour_picks_up_residue() {
        // (1/2 pi i) int_Gamma 1/((lambda+3)(lambda-2)) d lambda = 1/5
        let q =
            ContourQuadrature::auto(ContourKind::SectorBoundary { rho: PI / 4.0 }, 2.0, 3.0, 1.0, 1.0, PI / 4.0, 1e-13).unwrap();
        let v = q.integrate_checked(|l| Ok(1.0 / ((l + 3.0) * (l - 2.0)))).unwrap();
        assert!((v - c64(0.2, 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn coarse_rule_uses_even_nodes() {
        let q = ContourQuadrature::halfline(0.0, 2.0, 9).unwrap();
        let (f, c) = q.log_weights();
        assert!((f.iter().sum::<f64>() - 4.0).abs() < 1e-14);
        assert!((c.iter().sum::<f64>() - 4.0).abs() < 1e-14);
        assert!(c.iter().skip(1).step_by(2).all(|&w| w == 0.0));
    }

    #[test]
    fn rejects_even_node_count() {
        assert!(ContourQuadrature::halfline(0.0, 1.0, 10).is_err());
    }

    #[test]
    fn refinement_shrinks_defect() {
        let q = ContourQuadrature::halfline(0.0, 30.0, 121).unwrap();
        let f = |t: C64| Ok(t / ((1.0 + t) * (1.0 + t)));
        let d1 = q.integrate(f).unwrap().defect;
        let d2 = q.refined().unwrap().integrate(f).unwrap().defect;
        assert!(d2 < 0.1 * d1 || d2 < 1e-12, "{d1} {d2}");
    }
}
