//! Complex Gamma function (Lanczos, g = 7, nine coefficients, reflection
//! below `Re z = 1/2`) and the classical identities on vertical lines.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::{c64, Error, Result, C64};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEvaluator {
    pub g: f64,
    pub coefficients: Vec<f64>,
    /// Below this real part the reflection formula is used.
    pub reflection_threshold: f64,
}

impl Default for GammaEvaluator {
    fn default() -> Self {
        Self { g: LANCZOS_G, coefficients: LANCZOS_COEFFS.to_vec(), reflection_threshold: 0.5 }
    }
}

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

impl GammaEvaluator {
    pub fn eval(&self, z: C64) -> Result<C64> {
        if is_pole(z) {
            return Err(Error::PoleAt { re: z.re, im: z.im });
        }
        if z.re < self.reflection_threshold {
            // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
            let s = (z * PI).sin();
            return Ok(c64(PI, 0.0) / (s * self.lanczos(c64(1.0, 0.0) - z)));
        }
        Ok(self.lanczos(z))
    }

    fn lanczos(&self, z: C64) -> C64 {
        let z = z - 1.0;
        let mut x = c64(self.coefficients[0], 0.0);
        for (k, &p) in self.coefficients.iter().enumerate().skip(1) {
            x += c64(p, 0.0) / (z + k as f64);
        }
        let t = z + self.g + 0.5;
        let log = (z + 0.5) * t.ln() - t + (2.0 * PI).sqrt().ln();
        log.exp() * x
    }
}

/// Principal Gamma function.
pub fn gamma(z: C64) -> Result<C64> {
    GammaEvaluator::default().eval(z)
}

/// `pi x / sinh(pi x)`, equal to 1 at the origin.
pub fn pi_x_over_sinh(x: f64) -> f64 {
    let y = PI * x;
    if y.abs() < 1e-8 {
        1.0 - y * y / 6.0
    } else if y.abs() > 700.0 {
        2.0 * y.abs() * (-y.abs()).exp()
    } else {
        y / y.sinh()
    }
}

/// One row of the vertical-line identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaIdentityRow {
    pub sigma: f64,
    /// `|sigma Gamma(i sigma)|^2` against `pi sigma / sinh(pi sigma)`.
    pub imaginary_axis: (f64, f64),
    /// `|Gamma(1/2 + i sigma)|^2` against `pi / cosh(pi sigma)`.
    pub half_line: (f64, f64),
    pub max_rel_error: f64,
}

pub fn gamma_identities(sigmas: &[f64]) -> Result<Vec<GammaIdentityRow>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let lhs1 = if sigma == 0.0 { 1.0 } else { (gamma(c64(0.0, sigma))? * sigma).norm_sqr() };
            let rhs1 = pi_x_over_sinh(sigma);
            let lhs2 = gamma(c64(0.5, sigma))?.norm_sqr();
            let rhs2 = PI / (PI * sigma).cosh();
            let err = ((lhs1 - rhs1) / rhs1).abs().max(((lhs2 - rhs2) / rhs2).abs());
            Ok(GammaIdentityRow { sigma, imaginary_axis: (lhs1, rhs1), half_line: (lhs2, rhs2), max_rel_error: err })
        })
        .collect()
}

/// Pointwise check of the Lerch bounds
/// `Gamma(1+tau)/sqrt(tau^2+sigma^2) <= |Gamma(tau+i sigma)| (sinh(pi sigma)/(pi sigma))^{1/2}
///  <= Gamma(1+tau) sqrt(1+sigma^2)/sqrt(tau^2+sigma^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NielsenReport {
    pub tau: f64,
    /// Smallest `(middle - lower) / lower` over the grid.
    pub min_lower_margin: f64,
    /// Smallest `(upper - middle) / upper` over the grid.
    pub min_upper_margin: f64,
    /// Grid points where a bound fails by more than the slack.
    pub violations: Vec<f64>,
    /// `|middle - lower| / lower` at `sigma = 0`, when the grid contains it.
    pub equality_defect: Option<f64>,
}

/// Relative slack allowed in the Lerch bounds.
pub const NIELSEN_SLACK: f64 = 1e-12;

pub fn nielsen_bounds_check(tau: f64, sigmas: &[f64]) -> Result<NielsenReport> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("tau = {tau} outside (0, 1)")));
    }
    let g1 = gamma(c64(1.0 + tau, 0.0))?.re;
    let mut report = NielsenReport {
        tau,
        min_lower_margin: f64::INFINITY,
        min_upper_margin: f64::INFINITY,
        violations: Vec::new(),
        equality_defect: None,
    };
    for &sigma in sigmas {
        let r = (tau * tau + sigma * sigma).sqrt();
        let lower = g1 / r;
        let upper = g1 * (1.0 + sigma * sigma).sqrt() / r;
        let middle = gamma(c64(tau, sigma))?.norm() / pi_x_over_sinh(sigma).sqrt();
        let lm = (middle - lower) / lower;
        let um = (upper - middle) / upper;
        report.min_lower_margin = report.min_lower_margin.min(lm);
        report.min_upper_margin = report.min_upper_margin.min(um);
        if lm < -NIELSEN_SLACK || um < -NIELSEN_SLACK {
            report.violations.push(sigma);
        }
        if sigma == 0.0 {
            report.equality_defect = Some(lm.abs());
        }
    }
    Ok(report)
}

/// Smallest `C` with
/// `C^{-1} (1+sigma^2)^{-1} pi sigma / sinh(pi sigma) <= |Gamma(1/4 + i sigma)|^2 <= C pi sigma / sinh(pi sigma)`
/// on the grid.
pub fn quarter_gamma_constant(sigmas: &[f64]) -> Result<f64> {
    let mut c = 1.0f64;
    for &sigma in sigmas {
        let g = gamma(c64(0.25, sigma))?.norm_sqr();
        let w = pi_x_over_sinh(sigma);
        c = c.max(g / w).max(w / ((1.0 + sigma * sigma) * g));
    }
    Ok(c)
}

/// `[-max, max]` with the given step, symmetric about and containing 0.
pub fn symmetric_grid(max: f64, step: f64) -> Vec<f64> {
    let k = (max / step).round() as i64;
    (-k..=k).map(|j| j as f64 * step).collect()
}
