//! The operator-valued convolution kernel
//! `G(sigma) = e^{-i rho} e^{-rho sigma} pi / (i sinh(pi sigma)) B^{-i sigma}`
//! on a staggered grid, its split `G = G0 + G1` at `|sigma| = 1`, and the
//! unit-cell factorization of `G0 * f`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::calculus;
use crate::linalg::{self, Eigen};
use crate::{c64, CMat, CVec, Error, LinearOperator, Result, C64};

#[derive(Debug, Clone)]
pub struct DoreVenniKernel {
    pub b: LinearOperator,
    pub rho: f64,
    /// Grid spacing; inputs live on `(k + 1/2) h`, outputs on `k h`.
    pub h: f64,
    /// Half-length of the window `[-sigma_max, sigma_max]`.
    pub sigma_max: f64,
    pub split_point: f64,
    /// Fitted growth `|B^{i s}| <= M e^{theta |s|}`.
    pub bip_m: f64,
    pub bip_theta: f64,
    eigen: Option<Eigen>,
}

/// Range of `sigma` used to fit the imaginary-power growth of `B`.
pub const BIP_FIT_RANGE: f64 = 10.0;

impl DoreVenniKernel {
    /// Kernel for `rho` in `(theta_B, pi - theta_B)`, `theta_B` the fitted
    /// imaginary-power angle of `B`.
    pub fn new(b: LinearOperator, rho: f64, h: f64, sigma_max: f64) -> Result<Self> {
        let k = Self::new_unchecked(b, rho, h, sigma_max)?;
        let (lower, upper) = (k.bip_theta, PI - k.bip_theta);
        if !(rho > lower && rho < upper) {
            return Err(Error::AngleViolation { rho, lower, upper });
        }
        Ok(k)
    }

    /// Same kernel without the angle condition, for diagnostics.
    pub fn new_unchecked(b: LinearOperator, rho: f64, h: f64, sigma_max: f64) -> Result<Self> {
        if !(h > 0.0 && sigma_max > 1.0 && h < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!("grid needs 0 < h < 1 < sigma_max (got {h}, {sigma_max})")));
        }
        let profile = calculus::bip_profile(&b, BIP_FIT_RANGE, 201)?;
        let eigen = linalg::eigen(b.entries()).ok().filter(|e| e.condition <= calculus::SPECTRAL_ROUTE_CAP);
        Ok(Self { b, rho, h, sigma_max, split_point: 1.0, bip_m: profile.m, bip_theta: profile.theta, eigen })
    }

    /// `B^{-i sigma}`.
    pub fn b_power(&self, sigma: f64) -> Result<CMat> {
        match &self.eigen {
            Some(e) => e.try_apply(|z| {
                if z.im == 0.0 && z.re <= 0.0 {
                    return Err(Error::SingularBase);
                }
                Ok((c64(0.0, -sigma) * z.ln()).exp())
            }),
            None => calculus::matrix_power(self.b.entries(), c64(0.0, -sigma)),
        }
    }

    /// Scalar factor `e^{-i rho} e^{-rho sigma} pi / (i sinh(pi sigma))`.
    pub fn scalar(&self, sigma: f64) -> Result<C64> {
        if sigma == 0.0 {
            return Err(Error::PoleAt { re: 0.0, im: 0.0 });
        }
        // e^{-rho s} / sinh(pi s) without overflow
        let a = PI * sigma.abs();
        let mag = 2.0 * (-self.rho * sigma - a).exp() / (1.0 - (-2.0 * a).exp()) * sigma.signum();
        Ok(C64::from_polar(1.0, -self.rho) * c64(0.0, -PI * mag))
    }

    pub fn eval(&self, sigma: f64) -> Result<CMat> {
        Ok(self.b_power(sigma)? * self.scalar(sigma)?)
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    /// Input nodes `(k + 1/2) h` and output nodes `k h` covering the window.
    pub fn grids(&self) -> (Vec<f64>, Vec<f64>) {
        let k = (self.sigma_max / self.h).round() as i64;
        let inputs = (-k..k).map(|j| (j as f64 + 0.5) * self.h).collect();
        let outputs = (-k..=k).map(|j| j as f64 * self.h).collect();
        (inputs, outputs)
    }

    /// `2 pi / (1 - e^{-2 pi}) M e^{(rho - pi + theta) |sigma|}`, bounding `|G(sigma)|` for `|sigma| >= 1`.
    pub fn envelope(&self, sigma: f64) -> f64 {
        envelope_constant(self.bip_m) * ((self.rho - PI + self.bip_theta) * sigma.abs()).exp()
    }
}

fn envelope_constant(m: f64) -> f64 {
    2.0 * PI / (1.0 - (-2.0 * PI).exp()) * m
}

/// `int_{1 <= |sigma| <= sigma_max} envelope`, in closed form.
pub fn envelope_integral(kernel: &DoreVenniKernel) -> f64 {
    let kappa = PI - kernel.rho - kernel.bip_theta;
    let c = envelope_constant(kernel.bip_m);
    let s = kernel.sigma_max;
    if kappa == 0.0 {
        2.0 * c * (s - 1.0)
    } else {
        2.0 * c * ((-kappa).exp() - (-kappa * s).exp()) / kappa
    }
}

/// Composite Simpson rule for `int_a^b f` with `n` (even) intervals.
pub fn simpson(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, n: usize) -> Result<f64> {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a)? + f(b)?;
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h)?;
    }
    Ok(s * h / 3.0)
}

/// Simpson intervals per unit length for the `G1` integrals.
pub const SIMPSON_DENSITY: usize = 2000;

/// `int_{1 <= |sigma| <= sigma_max} envelope` by Simpson's rule.
pub fn envelope_integral_simpson(kernel: &DoreVenniKernel) -> Result<f64> {
    let n = ((kernel.sigma_max - 1.0) * SIMPSON_DENSITY as f64).ceil() as usize;
    let right = simpson(|s| Ok(kernel.envelope(s)), 1.0, kernel.sigma_max, n)?;
    Ok(2.0 * right)
}

/// `int_{1 <= |sigma| <= sigma_max} |G(sigma)|_2` by Simpson's rule.
pub fn g1_strong_l1(kernel: &DoreVenniKernel) -> Result<f64> {
    let n = ((kernel.sigma_max - 1.0) * SIMPSON_DENSITY as f64).ceil() as usize;
    let norm = |s: f64| Ok(linalg::op_norm2(&kernel.eval(s)?));
    Ok(simpson(norm, 1.0, kernel.sigma_max, n)? + simpson(|s| norm(-s), 1.0, kernel.sigma_max, n)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoreVenniReport {
    /// `|G * f|_2 / |f|_2` on the grid.
    pub ratio: f64,
    pub ratio_g0: f64,
    pub ratio_g1: f64,
    /// Relative difference between `G0 * f` computed directly and through the
    /// unit-cell factorization `B^{-i(tau - l)} (g0 * B^{i(. - l)} f)`.
    pub block_defect: f64,
    pub g1_l1: f64,
    pub envelope_integral: f64,
    pub envelope_simpson: f64,
    pub grid_points: usize,
}

fn l2(values: &[CVec], h: f64) -> f64 {
    (values.iter().map(|v| v.norm_squared()).sum::<f64>() * h).sqrt()
}

/// Discrete `G * f`, `G0 * f` and `G1 * f` for the sampled function `f`.
pub fn dore_venni_convolution(kernel: &DoreVenniKernel, mut f: impl FnMut(f64) -> CVec) -> Result<DoreVenniReport> {
    let (inputs, outputs) = kernel.grids();
    let h = kernel.h;
    let n = kernel.dim();
    let fs: Vec<CVec> = inputs.iter().map(|&s| f(s)).collect();
    if fs.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: fs.iter().map(|v| v.len()).find(|&l| l != n).unwrap_or(0) });
    }
    let k = inputs.len() as i64 / 2;
    // tau_i - sigma_j = (i - j - 1/2) h with i in [-k, k], j in [-k, k)
    let offset = 2 * k;
    let mut table = Vec::with_capacity((4 * k + 1) as usize);
    for d in -offset..=offset {
        table.push(kernel.eval((d as f64 - 0.5) * h)?);
    }
    let mut full = Vec::with_capacity(outputs.len());
    let mut near = Vec::with_capacity(outputs.len());
    let mut far = Vec::with_capacity(outputs.len());
    for io in 0..outputs.len() {
        let i = io as i64 - k;
        let (mut g0, mut g1) = (CVec::zeros(n), CVec::zeros(n));
        for (jo, fj) in fs.iter().enumerate() {
            let j = jo as i64 - k;
            let d = i - j;
            let diff = (d as f64 - 0.5) * h;
            let term = &table[(d + offset) as usize] * fj * c64(h, 0.0);
            if diff.abs() <= kernel.split_point {
                g0 += term;
            } else {
                g1 += term;
            }
        }
        full.push(&g0 + &g1);
        near.push(g0);
        far.push(g1);
    }
    let block = g0_by_cells(kernel, &inputs, &outputs, &fs)?;
    let diff: Vec<CVec> = block.iter().zip(&near).map(|(a, b)| a - b).collect();
    let nf = l2(&fs, h);
    let near_norm = l2(&near, h);
    let ratio = |v: &[CVec]| if nf == 0.0 { 0.0 } else { l2(v, h) / nf };
    Ok(DoreVenniReport {
        ratio: ratio(&full),
        ratio_g0: ratio(&near),
        ratio_g1: ratio(&far),
        block_defect: if near_norm == 0.0 { 0.0 } else { l2(&diff, h) / near_norm },
        g1_l1: g1_strong_l1(kernel)?,
        envelope_integral: envelope_integral(kernel),
        envelope_simpson: envelope_integral_simpson(kernel)?,
        grid_points: inputs.len(),
    })
}

/// `G0 * f` on cells `Q_l = [l - 1/2, l + 1/2)`: for `tau` in `Q_l`,
/// `B^{-i(tau - l)} sum_{|l' - l| <= 1} int g0(tau - sigma) B^{i(sigma - l)} f_{l'}(sigma) d sigma`.
fn g0_by_cells(kernel: &DoreVenniKernel, inputs: &[f64], outputs: &[f64], fs: &[CVec]) -> Result<Vec<CVec>> {
    let h = kernel.h;
    let n = kernel.dim();
    let cell = |x: f64| (x + 0.5).floor() as i64;
    let mut out = Vec::with_capacity(outputs.len());
    for &tau in outputs {
        let l = cell(tau);
        let mut acc = CVec::zeros(n);
        for (&sigma, fj) in inputs.iter().zip(fs) {
            if (cell(sigma) - l).abs() > 1 {
                continue;
            }
            let diff = tau - sigma;
            if diff.abs() > kernel.split_point {
                continue;
            }
            let shifted = kernel.b_power(-(sigma - l as f64))? * fj;
            acc += shifted * (kernel.scalar(diff)? * h);
        }
        out.push(kernel.b_power(tau - l as f64)? * acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn smooth_input(dim: usize, seed: u64) -> impl FnMut(f64) -> CVec {
        let mut r = rng::seeded(seed);
        let bumps: Vec<(f64, f64, CVec)> = (0..4)
            .map(|_| {
                (3.0 * rng::normal(&mut r).tanh(), 0.5 + rng::normal(&mut r).abs() * 0.5, rng::complex_gaussian(&mut r, dim))
            })
            .collect();
        move |s: f64| {
            let mut v = CVec::zeros(dim);
            for (mu, w, c) in &bumps {
                v += c * c64((-(s - mu) * (s - mu) / (2.0 * w * w)).exp(), 0.0);
            }
            v
        }
    }

    #[test]
    fn kernel_values() {
        let k = DoreVenniKernel::new(LinearOperator::identity(1), 3.0 * PI / 4.0, 0.1, 4.0).unwrap();
        let s = 0.7f64;
        let expect = C64::from_polar(1.0, -k.rho) * (-k.rho * s).exp() * PI / (c64(0.0, 1.0) * (PI * s).sinh());
        assert!((k.scalar(s).unwrap() - expect).norm() < 1e-14 * expect.norm());
        assert!(matches!(k.scalar(0.0), Err(Error::PoleAt { .. })));
        let b = LinearOperator::from_real_diagonal(&[1.0, 4.0], "b").unwrap();
        let k = DoreVenniKernel::new(b, 3.0 * PI / 4.0, 0.1, 4.0).unwrap();
        let p = k.b_power(0.5).unwrap();
        assert!((p[(1, 1)] - (c64(0.0, -0.5) * c64(4.0f64.ln(), 0.0)).exp()).norm() < 1e-14);
        assert!(k.bip_theta < 1e-10);
    }

    #[test]
    fn ratio_is_refinement_stable() {
        for b in [LinearOperator::identity(1), LinearOperator::from_real_diagonal(&[1.0, 4.0], "b").unwrap()] {
            let n = b.dim();
            let coarse = DoreVenniKernel::new(b.clone(), 3.0 * PI / 4.0, 1.0 / 16.0, 8.0).unwrap();
            let fine = DoreVenniKernel::new(b, 3.0 * PI / 4.0, 1.0 / 32.0, 16.0).unwrap();
            let r1 = dore_venni_convolution(&coarse, smooth_input(n, 5)).unwrap();
            let r2 = dore_venni_convolution(&fine, smooth_input(n, 5)).unwrap();
            assert!(r1.ratio.is_finite() && r1.ratio > 0.0);
            assert!((r2.ratio / r1.ratio - 1.0).abs() <= 0.2, "{r1:?} {r2:?}");
            assert!(r1.ratio <= r1.ratio_g0 + r1.ratio_g1 + 1e-12);
            assert!(r1.block_defect < 1e-12, "{r1:?}");
        }
    }

    #[test]
    fn envelope_closed_form_matches_simpson() {
        for b in [LinearOperator::identity(1), LinearOperator::from_real_diagonal(&[1.0, 4.0], "b").unwrap()] {
            let k = DoreVenniKernel::new(b, 3.0 * PI / 4.0, 0.1, 8.0).unwrap();
            let c = envelope_integral(&k);
            let s = envelope_integral_simpson(&k).unwrap();
            assert!((c - s).abs() <= 1e-6 * c, "{c} {s}");
            assert!(g1_strong_l1(&k).unwrap() <= c);
        }
    }

    #[test]
    fn inadmissible_angle() {
        let b = LinearOperator::from_real_diagonal(&[1.0, 4.0], "b").unwrap();
        assert!(matches!(DoreVenniKernel::new(b.clone(), PI + 0.2, 0.1, 4.0), Err(Error::AngleViolation { .. })));
        let k1 = DoreVenniKernel::new_unchecked(b.clone(), PI + 0.2, 0.1, 4.0).unwrap();
        let k2 = DoreVenniKernel::new_unchecked(b, PI + 0.2, 0.1, 8.0).unwrap();
        assert!(envelope_integral(&k2) > 2.0 * envelope_integral(&k1));
    }

    #[test]
    fn zero_input() {
        let k = DoreVenniKernel::new(LinearOperator::identity(1), 3.0 * PI / 4.0, 0.1, 4.0).unwrap();
        let r = dore_venni_convolution(&k, |_| CVec::zeros(1)).unwrap();
        assert_eq!(r.ratio, 0.0);
    }
}
