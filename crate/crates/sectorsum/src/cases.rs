//! Standard seeded test problems shared by the suites.

use std::f64::consts::PI;

use sectorsum_core::operator::{dirichlet_laplacian_1d, time_derivative_operator, LinearOperator};
use sectorsum_core::opsum::OperatorSumProblem;
use sectorsum_core::{rng, CMat, MixedNormSpec, Result, C64};

pub struct PairCase {
    pub label: String,
    pub problem: OperatorSumProblem,
    /// Diagonal pairs, where the scalar pairing checks apply.
    pub diagonal: bool,
}

/// Heat pairs `(n, m)` with `dt = 1/m`; the last has dimension 256.
pub const HEAT_GRIDS: [(usize, usize); 6] = [(2, 2), (3, 4), (4, 8), (8, 8), (8, 16), (16, 16)];

fn sector_point(r: &mut rng::SeededRng, max_angle: f64) -> C64 {
    let modulus = rng::uniform(r, -1.0, 1.0).exp2() * 2.0;
    C64::from_polar(modulus, rng::uniform(r, -max_angle, max_angle))
}

fn nilpotent(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn heat_pair(n: usize, m: usize) -> Result<OperatorSumProblem> {
    let a0 = dirichlet_laplacian_1d(n, 1.0 / (n as f64 + 1.0))?;
    let b0 = time_derivative_operator(m, 1.0 / m as f64)?;
    OperatorSumProblem::kronecker(&a0, &b0, None, MixedNormSpec::euclidean())
}

/// 20 commuting pairs: 8 diagonal, 3 Jordan blocks, 3 polynomial pairs of a
/// triangular matrix and the Kronecker heat pairs of [`HEAT_GRIDS`].
pub fn standard_pairs(seed: u64) -> Result<Vec<PairCase>> {
    let mut out = Vec::with_capacity(20);
    let euclid = MixedNormSpec::euclidean;
    for k in 0..8u64 {
        let mut r = rng::substream(seed, k);
        let n = 2 + k as usize % 5;
        let da: Vec<C64> = (0..n).map(|_| sector_point(&mut r, PI / 4.0)).collect();
        let db: Vec<C64> = (0..n).map(|_| sector_point(&mut r, PI / 3.0)).collect();
        let a = LinearOperator::from_diagonal(&da, format!("diagA{k}"))?;
        let b = LinearOperator::from_diagonal(&db, format!("diagB{k}"))?;
        out.push(PairCase { label: format!("diagonal-{k}"), problem: OperatorSumProblem::new(a, b, euclid())?, diagonal: true });
    }
    for k in 0..3u64 {
        let mut r = rng::substream(seed, 8 + k);
        let n = 3 + k as usize;
        let nil = nilpotent(n);
        let id = CMat::identity(n, n);
        let (la, lb) = (rng::uniform(&mut r, 0.5, 3.0), rng::uniform(&mut r, 0.5, 3.0));
        let a = &id * C64::new(la, 0.0) + &nil * C64::new(rng::uniform(&mut r, 0.2, 1.0), 0.0);
        let b = &id * C64::new(lb, 0.0) + &nil * C64::new(0.5, 0.0) + &nil * &nil * C64::new(0.2, 0.0);
        let a = LinearOperator::new(a, format!("jordanA{k}"))?;
        let b = LinearOperator::new(b, format!("jordanB{k}"))?;
        out.push(PairCase { label: format!("jordan-{k}"), problem: OperatorSumProblem::new(a, b, euclid())?, diagonal: false });
    }
    for k in 0..3u64 {
        let mut r = rng::substream(seed, 11 + k);
        let n = 3 + k as usize;
        let t = CMat::from_fn(n, n, |i, j| match j.cmp(&i) {
            std::cmp::Ordering::Equal => C64::new(1.0 + i as f64, 0.0),
            std::cmp::Ordering::Greater => C64::new(0.3 * rng::normal(&mut r), 0.0),
            std::cmp::Ordering::Less => C64::new(0.0, 0.0),
        });
        let id = CMat::identity(n, n);
        let b = &id * C64::new(0.5, 0.0) + &t * C64::new(0.7, 0.0) + &t * &t * C64::new(0.1, 0.0);
        let a = LinearOperator::new(t, format!("triA{k}"))?;
        let b = LinearOperator::new(b, format!("triB{k}"))?;
        out.push(PairCase {
            label: format!("triangular-{k}"),
            problem: OperatorSumProblem::new(a, b, euclid())?,
            diagonal: false,
        });
    }
    for (n, m) in HEAT_GRIDS {
        out.push(PairCase { label: format!("heat-{n}x{m}"), problem: heat_pair(n, m)?, diagonal: false });
    }
    Ok(out)
}

/// Seeded symmetric positive definite matrix `G G^T + I`.
pub fn spd(n: usize, seed: u64) -> Result<LinearOperator> {
    let mut r = rng::seeded(seed);
    let g = CMat::from_fn(n, n, |_, _| C64::new(rng::normal(&mut r), 0.0));
    LinearOperator::new(&g * g.transpose() + CMat::identity(n, n), format!("spd{n}"))
}

/// `V diag(e^{+-i angle} d) V^{-1}` with a well-conditioned real `V`; spectral angle `angle`.
pub fn rotated_diagonalizable(angle: f64, seed: u64) -> Result<LinearOperator> {
    let mut r = rng::seeded(seed);
    let n = 3;
    let v = CMat::from_fn(n, n, |i, j| C64::new(if i == j { 1.0 } else { 0.3 * rng::normal(&mut r) }, 0.0));
    let d = [C64::from_polar(1.0, angle), C64::from_polar(2.5, -angle), C64::new(0.7, 0.0)];
    let vinv = v.clone().try_inverse().expect("diagonally dominant");
    let m = &v * CMat::from_diagonal(&sectorsum_core::CVec::from_row_slice(&d)) * vinv;
    LinearOperator::new(m, format!("rot{angle:.3}"))
}
