//! Lower-bound estimators for R-, gamma- and l^q-bounds of finite operator
//! families. Every reported value comes with the witness (members, vectors,
//! random-number seed) that reproduces it.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::operator::{self, LinearOperator, SectorProfile};
use crate::{c64, rng, CMat, CVec, Error, MixedNormSpec, Result, C64};

/// Largest family sample size for exact Rademacher enumeration.
pub const MAX_RADEMACHER_OPS: usize = 8;
pub const DEFAULT_MC_SAMPLES: usize = 10_000;
/// Monte Carlo samples used to rank candidate witnesses for the gamma bound.
pub const GAMMA_SCREEN_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    pub members: Vec<CMat>,
    pub label: String,
    /// Parameter values of sampled families.
    pub grid: Option<Vec<f64>>,
}

impl OperatorFamily {
    pub fn new(members: Vec<CMat>, label: impl Into<String>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidArgument("empty operator family".into()))?;
        let n = first.nrows();
        for m in &members {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows().max(m.ncols()) });
            }
        }
        Ok(Self { members, label: label.into(), grid: None })
    }

    /// `{T(t) : t in grid}`.
    pub fn sampled(mut generator: impl FnMut(f64) -> Result<CMat>, grid: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let members = grid.iter().map(|&t| generator(t)).collect::<Result<Vec<_>>>()?;
        let mut f = Self::new(members, label)?;
        f.grid = Some(grid);
        Ok(f)
    }

    /// `{lambda R(lambda, A) : lambda = t e^{+-i angle}, t in grid}`, upper ray first.
    pub fn resolvent_rays(a: &LinearOperator, angle: f64, grid: &[f64]) -> Result<Self> {
        let mut members = Vec::with_capacity(2 * grid.len());
        for phase in [angle, -angle] {
            for &t in grid {
                let lambda = C64::from_polar(t, phase);
                members.push(a.resolvent_matrix(lambda)? * lambda);
            }
        }
        let mut f = Self::new(members, format!("lambda R(lambda, {}) on arg = +-{angle}", a.label))?;
        f.grid = Some(grid.to_vec());
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.members[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    Rademacher,
    Gaussian,
    Lq(f64),
}

/// Members `T_{indices[n]}` paired with vectors `x_n`; Gaussian ratios also
/// record the Monte Carlo stream `(seed, samples)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub vectors: Vec<CVec>,
    pub mc: Option<(u64, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEstimate {
    pub kind: BoundKind,
    /// Certified lower bound: the ratio attained by `witness`.
    pub lower_bound: f64,
    pub witness: Witness,
    /// Monte Carlo standard error of the ratio (Gaussian kind only).
    pub stderr: Option<f64>,
    /// Largest operator norm of a single member.
    pub singleton: f64,
}

fn check_witness(fam: &OperatorFamily, w: &Witness) -> Result<()> {
    if w.indices.len() != w.vectors.len() || w.indices.is_empty() {
        return Err(Error::InvalidArgument("witness needs matching, non-empty indices and vectors".into()));
    }
    if let Some(&i) = w.indices.iter().find(|&&i| i >= fam.len()) {
        return Err(Error::InvalidArgument(format!("witness index {i} outside family of size {}", fam.len())));
    }
    if let Some(v) = w.vectors.iter().find(|v| v.len() != fam.dim()) {
        return Err(Error::DimensionMismatch { expected: fam.dim(), found: v.len() });
    }
    Ok(())
}

fn images(fam: &OperatorFamily, w: &Witness) -> Vec<CVec> {
    w.indices.iter().zip(&w.vectors).map(|(&i, x)| &fam.members[i] * x).collect()
}

/// `E |sum r_n v_n|^2` over all sign patterns.
fn rademacher_second_moment(vs: &[CVec], norm: &MixedNormSpec) -> f64 {
    let n = vs.len();
    let mut total = 0.0;
    // first sign fixed to +1: the norm is even
    for pattern in 0..(1u32 << (n - 1)) {
        let mut s = vs[0].clone();
        for (k, v) in vs.iter().enumerate().skip(1) {
            if pattern >> (k - 1) & 1 == 1 {
                s -= v;
            } else {
                s += v;
            }
        }
        total += norm.norm(&s).powi(2);
    }
    total / (1u32 << (n - 1)) as f64
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// `(E |sum r_n T_n x_n|^2 / E |sum r_n x_n|^2)^{1/2}`, exact.
pub fn rademacher_ratio(fam: &OperatorFamily, norm: &MixedNormSpec, w: &Witness) -> Result<f64> {
    check_witness(fam, w)?;
    if w.indices.len() > MAX_RADEMACHER_OPS {
        return Err(Error::InvalidArgument(format!("at most {MAX_RADEMACHER_OPS} operators for exact enumeration")));
    }
    let ys = images(fam, w);
    Ok(ratio_or_zero(rademacher_second_moment(&ys, norm), rademacher_second_moment(&w.vectors, norm)))
}

/// Gaussian ratio with common random numbers and its delta-method standard error.
pub fn gaussian_ratio(fam: &OperatorFamily, norm: &MixedNormSpec, w: &Witness, seed: u64, samples: usize) -> Result<(f64, f64)> {
    check_witness(fam, w)?;
    if samples < 2 {
        return Err(Error::InvalidArgument("gaussian ratio needs at least 2 samples".into()));
    }
    let ys = images(fam, w);
    let mut r = rng::seeded(seed);
    let dim = fam.dim();
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let (mut u, mut v) = (CVec::zeros(dim), CVec::zeros(dim));
        for (y, x) in ys.iter().zip(&w.vectors) {
            let g = c64(rng::normal(&mut r), 0.0);
            u += y * g;
            v += x * g;
        }
        let (a, b) = (norm.norm(&u).powi(2), norm.norm(&v).powi(2));
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
    }
    let k = samples as f64;
    let (ma, mb) = (sa / k, sb / k);
    if mb == 0.0 {
        return Ok((0.0, 0.0));
    }
    let c = k / (k - 1.0);
    let (va, vb, cab) = ((saa / k - ma * ma) * c, (sbb / k - mb * mb) * c, (sab / k - ma * mb) * c);
    let ratio = (ma / mb).sqrt();
    // d sqrt(a/b) = (1/(2 sqrt(a b))) da - (sqrt(a)/(2 b^{3/2})) db
    let (da, db) = (0.5 / (ma * mb).sqrt().max(f64::MIN_POSITIVE), -0.5 * ma.sqrt() / mb.powf(1.5));
    let var = (da * da * va + db * db * vb + 2.0 * da * db * cab).max(0.0) / k;
    Ok((ratio, var.sqrt()))
}

fn lq_sum(vs: &[CVec], q: f64) -> Vec<f64> {
    let dim = vs[0].len();
    (0..dim).map(|k| vs.iter().map(|v| v[k].norm().powf(q)).sum::<f64>().powf(1.0 / q)).collect()
}

/// `|(sum |T_n x_n|^q)^{1/q}| / |(sum |x_n|^q)^{1/q}|` with coordinatewise moduli.
pub fn lq_ratio(fam: &OperatorFamily, norm: &MixedNormSpec, q: f64, w: &Witness) -> Result<f64> {
    check_witness(fam, w)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("q = {q} outside [1, inf)")));
    }
    let ys = images(fam, w);
    let den = norm.lattice_norm(&lq_sum(&w.vectors, q));
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(norm.lattice_norm(&lq_sum(&ys, q)) / den)
}

/// Recomputes the ratio a witness certifies.
pub fn replay(fam: &OperatorFamily, norm: &MixedNormSpec, kind: BoundKind, w: &Witness) -> Result<f64> {
    match kind {
        BoundKind::Rademacher => rademacher_ratio(fam, norm, w),
        BoundKind::Lq(q) => lq_ratio(fam, norm, q, w),
        BoundKind::Gaussian => {
            let (seed, samples) =
                w.mc.ok_or_else(|| Error::InvalidArgument("gaussian witness without Monte Carlo stream".into()))?;
            gaussian_ratio(fam, norm, w, seed, samples).map(|r| r.0)
        }
    }
}

/// `trials` random witnesses of `n_ops` members; trial `t` draws from stream `t` of `seed`.
pub fn random_pool(family_len: usize, dim: usize, n_ops: usize, trials: usize, seed: u64) -> Vec<Witness> {
    (0..trials)
        .map(|t| {
            let mut r = rng::substream(seed, t as u64);
            let indices = (0..n_ops).map(|_| rand::Rng::random_range(&mut r, 0..family_len)).collect();
            let vectors = (0..n_ops).map(|_| rng::complex_gaussian(&mut r, dim)).collect();
            Witness { indices, vectors, mc: None }
        })
        .collect()
}

/// One member with its norm maximizer, padded with zero vectors.
fn singleton_witnesses(fam: &OperatorFamily, norm: &MixedNormSpec, n_ops: usize) -> (Vec<Witness>, f64) {
    let mut best = 0.0f64;
    let ws = fam
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let on = norm.operator_norm(m);
            best = best.max(on.value);
            let mut vectors = vec![CVec::zeros(fam.dim()); n_ops];
            vectors[0] = on.maximizer;
            Witness { indices: vec![i; n_ops], vectors, mc: None }
        })
        .collect();
    (ws, best)
}

/// Random coordinate ascent on the vectors; the stream depends only on `(seed, id)`.
fn polish(mut w: Witness, seed: u64, id: u64, mut ratio: impl FnMut(&Witness) -> Result<f64>) -> Result<(Witness, f64)> {
    let mut value = ratio(&w)?;
    let mut r = rng::substream(seed ^ 0x5eed_9a1d_0f0f_1234, id);
    let dim = w.vectors[0].len();
    for round in 0..3 {
        let scale = 0.5 / (1 << round) as f64;
        for n in 0..w.vectors.len() {
            for _ in 0..2 {
                let size = crate::linalg::vec_norm2(&w.vectors[n]).max(1.0);
                let step = rng::complex_gaussian(&mut r, dim) * c64(scale * size / (dim as f64).sqrt(), 0.0);
                let old = w.vectors[n].clone();
                w.vectors[n] += step;
                let v = ratio(&w)?;
                if v > value {
                    value = v;
                } else {
                    w.vectors[n] = old;
                }
            }
        }
    }
    Ok((w, value))
}

fn best_on_pool(
    fam: &OperatorFamily,
    norm: &MixedNormSpec,
    kind: BoundKind,
    pool: &[Witness],
    seed: u64,
    polish_all: bool,
) -> Result<BoundEstimate> {
    let n_ops = pool.first().map_or(1, |w| w.indices.len());
    let (singles, singleton) = singleton_witnesses(fam, norm, n_ops);
    let mut best: Option<(f64, Witness)> = None;
    let candidates = pool.iter().cloned().enumerate().map(|(k, w)| (k as u64, w));
    let singles = singles.into_iter().enumerate().map(|(k, w)| (u64::MAX - k as u64, w));
    for (id, w) in candidates.chain(singles) {
        let (w, v) = if polish_all {
            polish(w, seed, id, |w| replay(fam, norm, kind, w))?
        } else {
            let v = replay(fam, norm, kind, &w)?;
            (w, v)
        };
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, w));
        }
    }
    let (lower_bound, witness) = best.expect("non-empty candidate set");
    Ok(BoundEstimate { kind, lower_bound, witness, stderr: None, singleton })
}

/// R-bound lower estimate over a fixed witness pool plus the singleton
/// witnesses; monotone in the family for a fixed pool.
pub fn r_bound_on_pool(fam: &OperatorFamily, norm: &MixedNormSpec, pool: &[Witness], seed: u64) -> Result<BoundEstimate> {
    best_on_pool(fam, norm, BoundKind::Rademacher, pool, seed, true)
}

pub fn r_bound_estimate(
    fam: &OperatorFamily,
    norm: &MixedNormSpec,
    n_ops: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundEstimate> {
    check_ops(n_ops)?;
    norm.validate(fam.dim())?;
    let pool = random_pool(fam.len(), fam.dim(), n_ops, trials, seed);
    r_bound_on_pool(fam, norm, &pool, seed)
}

fn check_ops(n_ops: usize) -> Result<()> {
    if n_ops == 0 || n_ops > MAX_RADEMACHER_OPS {
        return Err(Error::InvalidArgument(format!("N_ops = {n_ops} outside [1, {MAX_RADEMACHER_OPS}]")));
    }
    Ok(())
}

/// Gamma-bound lower estimate: candidates are ranked with a short Monte
/// Carlo run and the best is re-evaluated with `mc_samples` samples.
pub fn gamma_bound_estimate(
    fam: &OperatorFamily,
    norm: &MixedNormSpec,
    n_ops: usize,
    trials: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<BoundEstimate> {
    check_ops(n_ops)?;
    norm.validate(fam.dim())?;
    let pool = random_pool(fam.len(), fam.dim(), n_ops, trials, seed);
    let (singles, singleton) = singleton_witnesses(fam, norm, n_ops);
    let screen_seed = seed.wrapping_add(1);
    let mut best: Option<(f64, Witness)> = None;
    for w in pool.into_iter().chain(singles) {
        let (v, _) = gaussian_ratio(fam, norm, &w, screen_seed, GAMMA_SCREEN_SAMPLES)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, w));
        }
    }
    let (_, mut witness) = best.expect("non-empty candidate set");
    let mc_seed = seed.wrapping_add(2);
    let (lower_bound, stderr) = gaussian_ratio(fam, norm, &witness, mc_seed, mc_samples)?;
    witness.mc = Some((mc_seed, mc_samples));
    Ok(BoundEstimate { kind: BoundKind::Gaussian, lower_bound, witness, stderr: Some(stderr), singleton })
}

pub fn lq_bound_on_pool(
    fam: &OperatorFamily,
    q: f64,
    norm: &MixedNormSpec,
    pool: &[Witness],
    seed: u64,
) -> Result<BoundEstimate> {
    best_on_pool(fam, norm, BoundKind::Lq(q), pool, seed, true)
}

pub fn lq_bound_estimate(
    fam: &OperatorFamily,
    q: f64,
    norm: &MixedNormSpec,
    n_ops: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundEstimate> {
    if n_ops == 0 {
        return Err(Error::InvalidArgument("N_ops must be positive".into()));
    }
    norm.validate(fam.dim())?;
    let pool = random_pool(fam.len(), fam.dim(), n_ops, trials, seed);
    lq_bound_on_pool(fam, q, norm, &pool, seed)
}

/// `(gamma ratio, its standard error, Rademacher ratio)` on one witness.
pub fn gamma_versus_r(
    fam: &OperatorFamily,
    norm: &MixedNormSpec,
    w: &Witness,
    seed: u64,
    samples: usize,
) -> Result<(f64, f64, f64)> {
    let (g, se) = gaussian_ratio(fam, norm, w, seed, samples)?;
    Ok((g, se, rademacher_ratio(fam, norm, w)?))
}

/// l^q-bound of the ray-sampled resolvent families, one constant per angle,
/// on the same rays as [`operator::estimate_sector_profile`].
pub fn rq_sectoriality_profile(
    a: &LinearOperator,
    q: f64,
    norm: &MixedNormSpec,
    angles: &[f64],
    n_ops: usize,
    trials: usize,
    seed: u64,
) -> Result<SectorProfile> {
    let plain = operator::estimate_sector_profile(a, angles, operator::DEFAULT_RAY_SAMPLES)?;
    let grid = operator::log_grid(plain.t_min, plain.t_max, plain.ray_samples);
    let mut constants = Vec::with_capacity(angles.len());
    for &angle in angles {
        let fam = OperatorFamily::resolvent_rays(a, angle, &grid)?;
        constants.push(lq_bound_estimate(&fam, q, norm, n_ops, trials, seed)?.lower_bound);
    }
    Ok(SectorProfile { angles: angles.to_vec(), constants, ..plain })
}
