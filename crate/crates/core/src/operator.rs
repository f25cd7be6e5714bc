//! Finite-dimensional stand-ins for sectorial operators: resolvents, sector
//! profiles, and the constructors used for parabolic problems.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::{c64, linalg, CMat, CVec, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    entries: CMat,
    pub label: String,
    /// Sectoriality angle asserted by the constructor; always cross-checked
    /// against the spectrum before use.
    pub claimed_angle: Option<f64>,
}

impl LinearOperator {
    pub fn new(entries: CMat, label: impl Into<String>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidArgument("operator dimension must be positive".into()));
        }
        Ok(Self { entries, label: label.into(), claimed_angle: None })
    }

    pub fn with_claimed_angle(mut self, angle: f64) -> Self {
        self.claimed_angle = Some(angle);
        self
    }

    pub fn from_diagonal(diag: &[C64], label: impl Into<String>) -> Result<Self> {
        Self::new(CMat::from_diagonal(&CVec::from_column_slice(diag)), label)
    }

    pub fn from_real_diagonal(diag: &[f64], label: impl Into<String>) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&x| c64(x, 0.0)).collect();
        Self::from_diagonal(&d, label)
    }

    /// Row-major real entries.
    pub fn from_real_rows(n: usize, rows: &[f64], label: impl Into<String>) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: rows.len() });
        }
        Self::new(CMat::from_fn(n, n, |i, j| c64(rows[i * n + j], 0.0)), label)
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: linalg::identity(n), label: format!("I_{n}"), claimed_angle: Some(0.0) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        linalg::eigenvalues(&self.entries)
    }

    /// Largest |arg| of the (nonzero) spectrum.
    pub fn spectral_angle(&self) -> f64 {
        linalg::spectral_angle(&self.eigenvalues())
    }

    /// Working sector angle: the claimed angle when present, never below the spectral angle.
    pub fn sector_angle(&self) -> f64 {
        let spectral = self.spectral_angle();
        self.claimed_angle.map_or(spectral, |c| c.max(spectral))
    }

    pub fn is_singular(&self) -> bool {
        linalg::inverse_checked(&self.entries).is_err()
    }

    pub fn inverse(&self) -> Result<Self> {
        let (inv, _) = linalg::inverse_checked(&self.entries).map_err(|condition| Error::SingularResolvent {
            re: 0.0,
            im: 0.0,
            condition,
        })?;
        Ok(Self { entries: inv, label: format!("{}^-1", self.label), claimed_angle: self.claimed_angle })
    }

    /// Banach-space adjoint for the bilinear pairing: the transpose.
    pub fn dual(&self) -> Self {
        Self { entries: self.entries.transpose(), label: format!("{}'", self.label), claimed_angle: self.claimed_angle }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { entries: &self.entries * s, label: format!("({s})*{}", self.label), claimed_angle: None }
    }

    /// `(lambda I - A)^{-1}` as a dense matrix.
    pub fn resolvent_matrix(&self, lambda: C64) -> Result<CMat> {
        let m = CMat::from_diagonal_element(self.dim(), self.dim(), lambda) - &self.entries;
        linalg::inverse_checked(&m).map(|(inv, _)| inv).map_err(|condition| Error::SingularResolvent {
            re: lambda.re,
            im: lambda.im,
            condition,
        })
    }
}

/// `x = (lambda I - A)^{-1} y`.
pub fn resolvent(a: &LinearOperator, lambda: C64, y: &CVec) -> Result<CVec> {
    if y.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: y.len() });
    }
    let m = CMat::from_diagonal_element(a.dim(), a.dim(), lambda) - a.entries();
    linalg::solve_checked(&m, y).map_err(|condition| Error::SingularResolvent { re: lambda.re, im: lambda.im, condition })
}

/// Sampled sectoriality constants `M(w) = sup ||lambda R(lambda, A)||` on the
/// rays `arg lambda = +-w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorProfile {
    pub angles: Vec<f64>,
    pub constants: Vec<f64>,
    pub ray_samples: usize,
    pub t_min: f64,
    pub t_max: f64,
}

/// Log-spaced ray parameters `t_min .. t_max` (inclusive).
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n as f64 - 1.0)).exp()).collect()
}

/// Default sampling range `[1e-6 s, 1e6 s]` with `s` the spectral radius.
pub fn default_ray_range(a: &LinearOperator) -> (f64, f64) {
    let radius = a.eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let s = if radius > 0.0 { radius } else { 1.0 };
    (1e-6 * s, 1e6 * s)
}

pub const DEFAULT_RAY_SAMPLES: usize = 256;

pub fn estimate_sector_profile(a: &LinearOperator, angles: &[f64], samples_per_ray: usize) -> Result<SectorProfile> {
    let (t_min, t_max) = default_ray_range(a);
    estimate_sector_profile_on(a, angles, samples_per_ray, t_min, t_max)
}

/// Sector profile on an explicit ray range (for matched-grid comparisons).
pub fn estimate_sector_profile_on(
    a: &LinearOperator,
    angles: &[f64],
    samples_per_ray: usize,
    t_min: f64,
    t_max: f64,
) -> Result<SectorProfile> {
    if samples_per_ray < 8 {
        return Err(Error::InvalidArgument(format!("samples_per_ray = {samples_per_ray} < 8")));
    }
    if angles.iter().any(|&w| !(w > 0.0 && w <= PI)) {
        return Err(Error::InvalidArgument("sector angles must lie in (0, pi]".into()));
    }
    let mut sorted: Vec<f64> = angles.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite angles"));
    let eig = a.eigenvalues();
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let ts = log_grid(t_min, t_max, samples_per_ray);
    let mut constants = Vec::with_capacity(sorted.len());
    for &w in &sorted {
        // spectrum on or outside the rays: the supremum over the complement is infinite
        if let Some(z) = eig.iter().find(|z| z.norm() > 1e-13 * radius && z.arg().abs() >= w - 1e-12) {
            return Err(Error::SingularResolvent { re: z.re, im: z.im, condition: f64::INFINITY });
        }
        let mut sup: f64 = 0.0;
        for sign in [1.0, -1.0] {
            for &t in &ts {
                let lambda = C64::from_polar(t, sign * w);
                let r = a.resolvent_matrix(lambda)?;
                sup = sup.max(linalg::op_norm2(&(r * lambda)));
            }
        }
        constants.push(sup);
    }
    Ok(SectorProfile { angles: sorted, constants, ray_samples: samples_per_ray, t_min, t_max })
}

/// Lifted commuting pair `A = A0 (x) I_m`, `B = I_n (x) B0` (index `i*m + k`).
pub fn make_kronecker_pair(a0: &LinearOperator, b0: &LinearOperator) -> (LinearOperator, LinearOperator) {
    let (n, m) = (a0.dim(), b0.dim());
    let a = LinearOperator {
        entries: linalg::kron(a0.entries(), &linalg::identity(m)),
        label: format!("{} (x) I_{m}", a0.label),
        claimed_angle: a0.claimed_angle,
    };
    let b = LinearOperator {
        entries: linalg::kron(&linalg::identity(n), b0.entries()),
        label: format!("I_{n} (x) {}", b0.label),
        claimed_angle: b0.claimed_angle,
    };
    (a, b)
}

/// `tridiag(-1, 2, -1) / h^2`: the negative Dirichlet Laplacian on `n` interior nodes.
pub fn dirichlet_laplacian_1d(n: usize, h: f64) -> Result<LinearOperator> {
    if n < 2 || !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("laplacian needs n >= 2, h > 0 (got {n}, {h})")));
    }
    let s = 1.0 / (h * h);
    let m = CMat::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => c64(2.0 * s, 0.0),
        1 => c64(-s, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    Ok(LinearOperator { entries: m, label: format!("laplacian(n={n},h={h})"), claimed_angle: Some(0.0) })
}

/// Backward-difference `d/dt` with `u(0) = 0`: `1/dt` on the diagonal,
/// `-1/dt` below it. Sectorial of angle `pi/2`.
pub fn time_derivative_operator(m: usize, dt: f64) -> Result<LinearOperator> {
    if m < 2 || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time derivative needs m >= 2, dt > 0 (got {m}, {dt})")));
    }
    let s = 1.0 / dt;
    let d = CMat::from_fn(m, m, |i, j| {
        if i == j {
            c64(s, 0.0)
        } else if i == j + 1 {
            c64(-s, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(LinearOperator { entries: d, label: format!("ddt(m={m},dt={dt})"), claimed_angle: Some(PI / 2.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn cv(xs: &[f64]) -> CVec {
        CVec::from_iterator(xs.len(), xs.iter().map(|&x| c64(x, 0.0)))
    }

    /// Plain Gaussian elimination with partial pivoting, written independently
    /// of the nalgebra LU used by the implementation.
    fn dense_lu_solve(m: &CMat, y: &CVec) -> CVec {
        let n = m.nrows();
        let mut a = m.clone();
        let mut b = y.clone();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[(i, k)].norm().partial_cmp(&a[(j, k)].norm()).unwrap()).unwrap();
            a.swap_rows(k, p);
            b.swap_rows(k, p);
            for i in (k + 1)..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= f * akj;
                }
                let bk = b[k];
                b[i] -= f * bk;
            }
        }
        let mut x = CVec::zeros(n);
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        x
    }

    #[test]
    fn resolvent_diagonal() {
        let a = LinearOperator::from_real_diagonal(&[1.0, 2.0], "d").unwrap();
        let x = resolvent(&a, c64(-1.0, 0.0), &cv(&[1.0, 1.0])).unwrap();
        assert!((x[0] - c64(-0.5, 0.0)).norm() < 1e-15);
        assert!((x[1] - c64(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resolvent_jordan_at_zero() {
        let a = LinearOperator::from_real_rows(2, &[1.0, 1.0, 0.0, 1.0], "j").unwrap();
        let x = resolvent(&a, c64(0.0, 0.0), &cv(&[1.0, 0.0])).unwrap();
        assert!((x - cv(&[-1.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn resolvent_laplacian_matches_dense_lu() {
        let a = dirichlet_laplacian_1d(8, 1.0).unwrap();
        let mut e1 = CVec::zeros(8);
        e1[0] = c64(1.0, 0.0);
        let x = resolvent(&a, c64(-1.0, 0.0), &e1).unwrap();
        let m = CMat::from_diagonal_element(8, 8, c64(-1.0, 0.0)) - a.entries();
        let oracle = dense_lu_solve(&m, &e1);
        assert!((x - oracle).norm() < 1e-12);
    }

    #[test]
    fn resolvent_at_eigenvalue_is_singular() {
        let a = LinearOperator::from_real_diagonal(&[1.0, 2.0], "d").unwrap();
        assert!(matches!(resolvent(&a, c64(2.0, 0.0), &cv(&[1.0, 1.0])), Err(Error::SingularResolvent { .. })));
    }

    #[test]
    fn resolvent_identity_holds() {
        let mut r = rng::seeded(7);
        let a = LinearOperator::new(
            CMat::from_fn(5, 5, |_, _| c64(rng::normal(&mut r), 0.0)) + CMat::identity(5, 5) * c64(6.0, 0.0),
            "rand",
        )
        .unwrap();
        for _ in 0..10 {
            let lam = c64(rng::normal(&mut r) * 3.0, 8.0 + rng::normal(&mut r));
            let mu = c64(rng::normal(&mut r) * 3.0, -8.0 + rng::normal(&mut r));
            let rl = a.resolvent_matrix(lam).unwrap();
            let rm = a.resolvent_matrix(mu).unwrap();
            let lhs = &rl - &rm;
            let rhs = (&rl * &rm) * (mu - lam);
            assert!(linalg::frobenius(&(lhs.clone() - rhs)) <= 1e-11 * linalg::frobenius(&lhs));
        }
    }

    #[test]
    fn scalar_profile_at_pi() {
        let a = LinearOperator::from_real_diagonal(&[1.0], "one").unwrap();
        let p = estimate_sector_profile(&a, &[PI], DEFAULT_RAY_SAMPLES).unwrap();
        assert!((p.constants[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn identity_profile_matches_scalar_oracle() {
        let a = LinearOperator::identity(4);
        let p = estimate_sector_profile(&a, &[PI / 2.0], DEFAULT_RAY_SAMPLES).unwrap();
        let oracle = log_grid(p.t_min, p.t_max, p.ray_samples)
            .iter()
            .map(|&t| {
                let l = C64::from_polar(t, PI / 2.0);
                (l / (l - 1.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!((p.constants[0] - oracle).abs() < 1e-12);
    }

    #[test]
    fn profile_detects_spectrum_on_ray() {
        let a = LinearOperator::from_diagonal(&[c64(1.0, 0.0), C64::from_polar(1.0, PI / 3.0)], "rot").unwrap();
        let inside = estimate_sector_profile(&a, &[PI / 3.0 + 0.01], DEFAULT_RAY_SAMPLES).unwrap();
        assert!(inside.constants[0].is_finite());
        assert!(matches!(
            estimate_sector_profile(&a, &[PI / 3.0 - 0.01], DEFAULT_RAY_SAMPLES),
            Err(Error::SingularResolvent { .. })
        ));
    }

    #[test]
    fn profile_is_nonincreasing_in_angle() {
        let a = LinearOperator::from_real_rows(2, &[1.0, 3.0, 0.0, 2.0], "nn").unwrap();
        let angles = [0.3, 0.6, 1.0, 1.6, 2.4, PI];
        let p = estimate_sector_profile(&a, &angles, 128).unwrap();
        for w in p.constants.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-3));
        }
    }

    #[test]
    fn inverse_has_same_profile_on_matched_grid() {
        // normal operators: both suprema are over the same scalar family, but the
        // sampled t-values differ, so they agree only to sampling accuracy
        let a = LinearOperator::from_diagonal(&[c64(0.5, 0.2), c64(3.0, -1.0), c64(7.0, 0.0)], "n").unwrap();
        let inv = a.inverse().unwrap();
        let angles = [0.6, 1.2, 2.0];
        let (t0, t1) = (1e-4, 1e4);
        let pa = estimate_sector_profile_on(&a, &angles, 1025, t0, t1).unwrap();
        let pi = estimate_sector_profile_on(&inv, &angles, 1025, 1.0 / t1, 1.0 / t0).unwrap();
        for (x, y) in pa.constants.iter().zip(&pi.constants) {
            assert!((x - y).abs() <= 1e-3 * x, "{x} vs {y}");
        }
    }

    #[test]
    fn kronecker_pair_commutes() {
        let a0 = LinearOperator::from_real_diagonal(&[1.0, 2.0], "a").unwrap();
        let b0 = LinearOperator::from_real_diagonal(&[3.0], "b").unwrap();
        let (a, b) = make_kronecker_pair(&a0, &b0);
        assert_eq!(a.entries(), &CMat::from_diagonal(&cv(&[1.0, 2.0])));
        assert_eq!(b.entries(), &CMat::from_diagonal(&cv(&[3.0, 3.0])));

        let n0 = LinearOperator::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0], "n").unwrap();
        let m0 = LinearOperator::from_real_rows(2, &[0.0, 0.0, 1.0, 0.0], "m").unwrap();
        let (a, b) = make_kronecker_pair(&n0, &m0);
        assert_eq!(linalg::frobenius(&(a.entries() * b.entries() - b.entries() * a.entries())), 0.0);

        let mut r = rng::seeded(3);
        let a0 = LinearOperator::new(rng::complex_gaussian(&mut r, 16).reshape_generic(nalgebra::Dyn(4), nalgebra::Dyn(4)), "ra")
            .unwrap();
        let b0 = LinearOperator::new(rng::complex_gaussian(&mut r, 16).reshape_generic(nalgebra::Dyn(4), nalgebra::Dyn(4)), "rb")
            .unwrap();
        let (a, b) = make_kronecker_pair(&a0, &b0);
        let comm = linalg::frobenius(&(a.entries() * b.entries() - b.entries() * a.entries()));
        assert!(comm <= 1e-13 * linalg::op_norm2(a.entries()) * linalg::op_norm2(b.entries()));
    }

    #[test]
    fn laplacian_spectrum() {
        let a = dirichlet_laplacian_1d(3, 1.0).unwrap();
        let mut ev: Vec<f64> = a.eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let s2 = 2f64.sqrt();
        for (x, y) in ev.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((x - y).abs() < 1e-13);
        }
        let a2 = dirichlet_laplacian_1d(2, 1.0).unwrap();
        assert_eq!(a2.entries(), &CMat::from_row_slice(2, 2, &[c64(2.0, 0.0), c64(-1.0, 0.0), c64(-1.0, 0.0), c64(2.0, 0.0)]));
        for n in [2, 5, 17] {
            let a = dirichlet_laplacian_1d(n, 1.0 / (n as f64 + 1.0)).unwrap();
            assert!(a.eigenvalues().iter().all(|z| z.re > 0.0));
        }
    }

    #[test]
    fn time_derivative_resolvent_is_discrete_convolution() {
        let b = time_derivative_operator(2, 1.0).unwrap();
        assert_eq!(b.entries(), &CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), C64::new(0.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0)]));
        assert!(b.eigenvalues().iter().all(|z| (z - c64(1.0, 0.0)).norm() < 1e-15));

        let (m, dt, lam) = (4, 0.5, 1.0);
        let b = time_derivative_operator(m, dt).unwrap();
        let mut e1 = CVec::zeros(m);
        e1[0] = c64(1.0, 0.0);
        // (lambda + B)^{-1} = -R(-lambda, B)
        let dense = -resolvent(&b, c64(-lam, 0.0), &e1).unwrap();
        // forward substitution: (lambda + 1/dt) u_k - u_{k-1}/dt = f_k
        let ratio = (1.0 / dt) / (lam + 1.0 / dt);
        let conv: Vec<f64> = (0..m).map(|k| ratio.powi(k as i32) / (lam + 1.0 / dt)).collect();
        for k in 0..m {
            assert!((dense[k] - c64(conv[k], 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn time_derivative_sectorial_beyond_right_angle() {
        let sups: Vec<f64> = [8usize, 16, 32]
            .iter()
            .map(|&m| {
                let b = time_derivative_operator(m, 1.0 / m as f64).unwrap();
                let p = estimate_sector_profile(&b, &[3.0 * PI / 4.0], 128).unwrap();
                p.constants[0]
            })
            .collect();
        // bounded uniformly in the grid: |lambda / (lambda - 1/dt)| <= 1/sin(pi/4) per mode
        // and the Toeplitz tail adds at most the same factor again
        for s in &sups {
            assert!(*s < 4.0, "{sups:?}");
        }
    }
}
