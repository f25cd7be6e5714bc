//! Dense complex linear algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::linalg::{Schur, SymmetricEigen};
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::{c64, CMat, CVec, Error, Result, C64};

/// Condition-number cap above which a solve is treated as singular.
pub const CONDITION_CAP: f64 = 1e12;
/// Eigenvector-matrix condition above which a matrix is treated as defective.
pub const EIGEN_CONDITION_CAP: f64 = 1e8;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm2(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn op_norm2(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Smallest singular value.
pub fn min_singular(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.min()
}

/// Largest singular value with the corresponding right and left singular vectors.
pub fn top_singular(m: &CMat) -> (f64, CVec, CVec) {
    let svd = m.clone().svd(true, true);
    let (idx, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let v_t = svd.v_t.expect("requested");
    let u = svd.u.expect("requested");
    let right = v_t.row(idx).adjoint();
    let left = u.column(idx).into_owned();
    (s, right, left)
}

fn norm1(m: &CMat) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Inverse together with its 1-norm condition number; fails above [`CONDITION_CAP`].
pub fn inverse_checked(m: &CMat) -> core::result::Result<(CMat, f64), f64> {
    let inv = match m.clone().lu().try_inverse() {
        Some(inv) => inv,
        None => return Err(f64::INFINITY),
    };
    let cond = norm1(m) * norm1(&inv);
    if !cond.is_finite() || cond > CONDITION_CAP {
        return Err(cond);
    }
    Ok((inv, cond))
}

/// LU solve with a pivot-ratio condition estimate (a lower bound on the true condition).
pub fn solve_checked(m: &CMat, y: &CVec) -> core::result::Result<CVec, f64> {
    let lu = m.clone().lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || max / min > CONDITION_CAP {
        return Err(if min == 0.0 { f64::INFINITY } else { max / min });
    }
    lu.solve(y).ok_or(f64::INFINITY)
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    inverse_checked(m).map(|(inv, _)| inv).map_err(|condition| Error::SingularSum { condition })
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn is_hermitian(m: &CMat) -> bool {
    let scale = frobenius(m).max(1.0);
    frobenius(&(m - m.adjoint())) <= 1e-14 * scale
}

pub fn is_diagonal(m: &CMat) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

/// Bilinear pairing `sum_k x_k y_k` (no conjugation), the finite-dimensional
/// dual pairing between X and X'.
pub fn bilinear(x: &CVec, y: &CVec) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// Eigenvalues: Hermitian solver when applicable, otherwise the Schur diagonal.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if is_diagonal(m) {
        return (0..n).map(|i| m[(i, i)]).collect();
    }
    if is_hermitian(m) {
        let eig = SymmetricEigen::new(m.clone());
        return eig.eigenvalues.iter().map(|&x| c64(x, 0.0)).collect();
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

/// Largest |arg| over the spectrum, ignoring eigenvalues of modulus below
/// `1e-13 * spectral_radius` (those sit at the origin).
pub fn spectral_angle(values: &[C64]) -> f64 {
    let radius = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    values.iter().filter(|z| z.norm() > 1e-13 * radius.max(f64::MIN_POSITIVE)).map(|z| z.arg().abs()).fold(0.0, f64::max)
}

/// Eigendecomposition `A = V diag(values) V^{-1}`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
    pub inverse: CMat,
    /// 2-norm condition number of `vectors` (1 for Hermitian input).
    pub condition: f64,
}

impl Eigen {
    /// `V diag(f(lambda_k)) V^{-1}`.
    pub fn apply<F: FnMut(C64) -> C64>(&self, mut f: F) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).scale_mut_complex(fj);
        }
        scaled * &self.inverse
    }

    pub fn try_apply<F: FnMut(C64) -> Result<C64>>(&self, mut f: F) -> Result<CMat> {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam)?;
            scaled.column_mut(j).scale_mut_complex(fj);
        }
        Ok(scaled * &self.inverse)
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, s: C64);
}

impl<S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>> ScaleComplex
    for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_complex(&mut self, s: C64) {
        for z in self.iter_mut() {
            *z *= s;
        }
    }
}

/// Eigendecomposition, or `NotDiagonalizable` when the eigenvector matrix is
/// worse conditioned than [`EIGEN_CONDITION_CAP`].
pub fn eigen(m: &CMat) -> Result<Eigen> {
    let n = m.nrows();
    if is_diagonal(m) {
        return Ok(Eigen {
            values: (0..n).map(|i| m[(i, i)]).collect(),
            vectors: identity(n),
            inverse: identity(n),
            condition: 1.0,
        });
    }
    if is_hermitian(m) {
        let eig = SymmetricEigen::new(m.clone());
        let inverse = eig.eigenvectors.adjoint();
        return Ok(Eigen {
            values: eig.eigenvalues.iter().map(|&x| c64(x, 0.0)).collect(),
            vectors: eig.eigenvectors,
            inverse,
            condition: 1.0,
        });
    }
    let (q, t) = Schur::new(m.clone()).unpack();
    let scale = frobenius(&t).max(f64::MIN_POSITIVE);
    let tol = 1e-13 * scale;
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = c64(1.0, 0.0);
        let lk = t[(k, k)];
        for j in (0..k).rev() {
            let mut num = C64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                num += t[(j, l)] * y[(l, k)];
            }
            let den = t[(j, j)] - lk;
            y[(j, k)] = if den.norm() > tol {
                -num / den
            } else if num.norm() <= tol {
                C64::new(0.0, 0.0)
            } else {
                // defective: the resulting column blows up and the condition test rejects it
                -num / c64(tol, 0.0)
            };
        }
        let norm = y.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for j in 0..=k {
            y[(j, k)] /= norm;
        }
    }
    let vectors = q * y;
    let svals = vectors.clone().svd(false, false).singular_values;
    let condition = svals.max() / svals.min();
    if !condition.is_finite() || condition > EIGEN_CONDITION_CAP {
        return Err(Error::NotDiagonalizable { condition });
    }
    let inverse = vectors.clone().lu().try_inverse().ok_or(Error::NotDiagonalizable { condition })?;
    Ok(Eigen { values: (0..n).map(|i| t[(i, i)]).collect(), vectors, inverse, condition })
}

/// Principal square root via the complex Schur form (Björck–Hammarling
/// recurrence). Valid for any matrix without eigenvalues on `(-inf, 0]`,
/// including defective ones.
pub fn sqrtm(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let (q, t) = Schur::new(m.clone()).unpack();
    let mut r = CMat::zeros(n, n);
    for i in 0..n {
        let d = t[(i, i)];
        if d.im == 0.0 && d.re <= 0.0 {
            return Err(Error::BranchCut { symbol: "sqrt".into(), re: d.re, im: d.im });
        }
        r[(i, i)] = d.sqrt();
    }
    for d in 1..n {
        for i in 0..(n - d) {
            let j = i + d;
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    Ok(&q * r * q.adjoint())
}

/// Max of `|z|` over a vector.
pub fn max_abs(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> CMat {
        let n = rows.len();
        CMat::from_fn(n, rows[0].len(), |i, j| c64(rows[i][j], 0.0))
    }

    #[test]
    fn eigen_of_nonnormal_diagonalizable() {
        let a = mat(&[&[1.0, 10.0], &[0.0, 2.0]]);
        let e = eigen(&a).unwrap();
        let back = e.apply(|z| z);
        assert!(frobenius(&(back - &a)) < 1e-12);
    }

    #[test]
    fn eigen_rejects_jordan_block() {
        let a = mat(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(eigen(&a), Err(Error::NotDiagonalizable { .. })));
    }

    #[test]
    fn sqrtm_of_jordan_block() {
        let a = mat(&[&[4.0, 1.0], &[0.0, 4.0]]);
        let r = sqrtm(&a).unwrap();
        assert!(frobenius(&(&r * &r - &a)) < 1e-13);
        // sqrt(4 I + N) = 2 I + N / 4
        assert!((r[(0, 1)].re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn inverse_checked_flags_singular() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(inverse_checked(&a).is_err());
    }
}
