//! Coordinate norms on `C^n`: weighted p-norms and the mixed `l^r(l^q)` norm
//! that models a Banach function space with an inner `l^q` structure.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent when a dependency links std
use num_traits::Float;

use crate::{linalg, CMat, CVec, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// Plain (weighted) p-norm, `p` in `[1, inf]`.
    P(f64),
    /// Contiguous blocks of `block` coordinates: inner `l^q` within a block,
    /// outer `l^r` across blocks.
    Mixed { outer_r: f64, inner_q: f64, block: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedNormSpec {
    pub kind: NormKind,
    /// Optional positive weight per coordinate: the norm of `x` is the norm of `w * x`.
    pub weights: Option<Vec<f64>>,
}

/// Operator norm value together with a vector attaining (or approaching) it.
#[derive(Debug, Clone)]
pub struct OperatorNorm {
    pub value: f64,
    /// `true` when the value is the exact induced norm; otherwise a certified lower bound.
    pub exact: bool,
    pub maximizer: CVec,
}

fn p_of(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 1.0 {
        values.sum()
    } else if p == 2.0 {
        values.map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let v: Vec<f64> = values.collect();
        let m = v.iter().cloned().fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        m * v.iter().map(|x| (x / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Unit-dual-norm functional `z` of the unweighted p-norm with `<z, u> = ||u||_p`.
fn p_dual_direction(u: &[C64], p: f64) -> Vec<C64> {
    let n = u.len();
    let norm = p_of(u.iter().map(|z| z.norm()), p);
    let mut z = vec![C64::new(0.0, 0.0); n];
    if norm == 0.0 {
        return z;
    }
    let phase = |w: C64| if w.norm() == 0.0 { C64::new(0.0, 0.0) } else { w.conj() / w.norm() };
    if p.is_infinite() {
        let (k, _) = u.iter().enumerate().fold((0, -1.0), |acc, (i, w)| if w.norm() > acc.1 { (i, w.norm()) } else { acc });
        z[k] = phase(u[k]);
    } else if p == 1.0 {
        for (zi, &ui) in z.iter_mut().zip(u) {
            *zi = phase(ui);
        }
    } else {
        for (zi, &ui) in z.iter_mut().zip(u) {
            *zi = phase(ui) * (ui.norm() / norm).powf(p - 1.0);
        }
    }
    z
}

impl MixedNormSpec {
    pub fn euclidean() -> Self {
        Self::p(2.0)
    }

    pub fn p(p: f64) -> Self {
        Self { kind: NormKind::P(p), weights: None }
    }

    pub fn mixed(outer_r: f64, inner_q: f64, block: usize) -> Self {
        Self { kind: NormKind::Mixed { outer_r, inner_q, block }, weights: None }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn is_euclidean(&self) -> bool {
        self.kind == NormKind::P(2.0) && self.weights.as_ref().is_none_or(|w| w.iter().all(|&x| x == 1.0))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |reason: alloc::string::String| Err(Error::IncompatibleSpec { dim, reason });
        let exponent_ok = |p: f64| p >= 1.0;
        match self.kind {
            NormKind::P(p) if !exponent_ok(p) => return bad(format!("p = {p} < 1")),
            NormKind::Mixed { outer_r, inner_q, block } => {
                if !exponent_ok(outer_r) || !exponent_ok(inner_q) {
                    return bad(format!("exponents ({outer_r}, {inner_q}) must be >= 1"));
                }
                if block == 0 || !dim.is_multiple_of(block) {
                    return bad(format!("dimension not divisible by block size {block}"));
                }
            }
            _ => {}
        }
        if let Some(w) = &self.weights {
            if w.len() != dim {
                return bad(format!("{} weights for dimension {dim}", w.len()));
            }
            if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return bad("weights must be positive and finite".into());
            }
        }
        Ok(())
    }

    fn weight(&self, k: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[k])
    }

    /// Norm of a nonnegative coordinate profile (the lattice norm of `|x|`).
    pub fn lattice_norm(&self, moduli: &[f64]) -> f64 {
        let weighted = moduli.iter().enumerate().map(|(k, &m)| m * self.weight(k));
        match self.kind {
            NormKind::P(p) => p_of(weighted, p),
            NormKind::Mixed { outer_r, inner_q, block } => {
                let w: Vec<f64> = weighted.collect();
                p_of(w.chunks(block).map(|b| p_of(b.iter().cloned(), inner_q)), outer_r)
            }
        }
    }

    /// The norm of `x`; panics only if the spec was not validated for `x.len()`.
    pub fn norm(&self, x: &CVec) -> f64 {
        let moduli: Vec<f64> = x.iter().map(|z| z.norm()).collect();
        self.lattice_norm(&moduli)
    }

    /// Dual norm with respect to the bilinear pairing `sum_k x_k y_k`.
    pub fn dual(&self) -> Self {
        let kind = match self.kind {
            NormKind::P(p) => NormKind::P(conjugate_exponent(p)),
            NormKind::Mixed { outer_r, inner_q, block } => {
                NormKind::Mixed { outer_r: conjugate_exponent(outer_r), inner_q: conjugate_exponent(inner_q), block }
            }
        };
        Self { kind, weights: self.weights.as_ref().map(|w| w.iter().map(|x| 1.0 / x).collect()) }
    }

    /// A functional `z` of unit dual norm with `sum_k z_k x_k = ||x||`.
    pub fn dual_direction(&self, x: &CVec) -> CVec {
        let n = x.len();
        let u: Vec<C64> = (0..n).map(|k| x[k] * self.weight(k)).collect();
        let z = match self.kind {
            NormKind::P(p) => p_dual_direction(&u, p),
            NormKind::Mixed { outer_r, inner_q, block } => {
                let block_norms: Vec<C64> =
                    u.chunks(block).map(|b| C64::new(p_of(b.iter().map(|z| z.norm()), inner_q), 0.0)).collect();
                let beta = p_dual_direction(&block_norms, outer_r);
                let mut z = Vec::with_capacity(n);
                for (b, chunk) in u.chunks(block).enumerate() {
                    for zi in p_dual_direction(chunk, inner_q) {
                        z.push(zi * beta[b].re);
                    }
                }
                z
            }
        };
        CVec::from_iterator(n, (0..n).map(|k| z[k] * self.weight(k)))
    }

    /// Induced operator norm of `t` on `(C^n, ||.||)`.
    ///
    /// Exact for unweighted or weighted p in {1, 2, inf}; for other norms the
    /// value comes from the monotone dual power iteration and is a lower bound.
    pub fn operator_norm(&self, t: &CMat) -> OperatorNorm {
        let n = t.ncols();
        let w: Vec<f64> = (0..n).map(|k| self.weight(k)).collect();
        // similarity W T W^{-1} reduces weighted p-norms to unweighted ones
        let scaled = CMat::from_fn(t.nrows(), n, |i, j| t[(i, j)] * (w[i] / w[j]));
        let unweight = |v: CVec| CVec::from_iterator(n, (0..n).map(|k| v[k] / w[k]));
        match self.kind {
            NormKind::P(2.0) => {
                let (value, right, _) = linalg::top_singular(&scaled);
                OperatorNorm { value, exact: true, maximizer: unweight(right) }
            }
            NormKind::P(1.0) => {
                let (j, value) = (0..n)
                    .map(|j| (j, scaled.column(j).iter().map(|z| z.norm()).sum::<f64>()))
                    .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
                let mut e = CVec::zeros(n);
                e[j] = C64::new(1.0, 0.0);
                OperatorNorm { value, exact: true, maximizer: unweight(e) }
            }
            NormKind::P(p) if p.is_infinite() => {
                let (i, value) = (0..scaled.nrows())
                    .map(|i| (i, scaled.row(i).iter().map(|z| z.norm()).sum::<f64>()))
                    .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
                let x = CVec::from_iterator(
                    n,
                    (0..n).map(|j| {
                        let z = scaled[(i, j)];
                        if z.norm() == 0.0 {
                            C64::new(1.0, 0.0)
                        } else {
                            z.conj() / z.norm()
                        }
                    }),
                );
                OperatorNorm { value, exact: true, maximizer: unweight(x) }
            }
            _ => self.power_norm(t),
        }
    }

    fn power_norm(&self, t: &CMat) -> OperatorNorm {
        let n = t.ncols();
        let dual = self.dual();
        let mut starts = vec![CVec::from_element(n, C64::new(1.0, 0.0))];
        starts.push(linalg::top_singular(t).1);
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = C64::new(1.0, 0.0);
            starts.push(e);
        }
        let mut best = OperatorNorm { value: 0.0, exact: false, maximizer: starts[0].clone() };
        let tt = t.transpose();
        for start in starts {
            let nx = self.norm(&start);
            if nx == 0.0 {
                continue;
            }
            let mut x = start / C64::new(nx, 0.0);
            let mut value = self.norm(&(t * &x));
            for _ in 0..200 {
                let z = self.dual_direction(&(t * &x));
                let w = &tt * z;
                let candidate = dual.dual_direction(&w);
                let nc = self.norm(&candidate);
                if nc == 0.0 {
                    break;
                }
                let candidate = candidate / C64::new(nc, 0.0);
                let v = self.norm(&(t * &candidate));
                if v <= value * (1.0 + 1e-15) {
                    if v > value {
                        value = v;
                        x = candidate;
                    }
                    break;
                }
                value = v;
                x = candidate;
            }
            if value > best.value {
                best = OperatorNorm { value, exact: false, maximizer: x };
            }
        }
        best
    }
}

/// `mixed_norm(x, spec)` with compatibility checking.
pub fn mixed_norm(x: &CVec, spec: &MixedNormSpec) -> Result<f64> {
    spec.validate(x.len())?;
    Ok(spec.norm(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> CVec {
        CVec::from_iterator(xs.len(), xs.iter().map(|&x| c64(x, 0.0)))
    }

    #[test]
    fn euclidean_three_four_five() {
        assert_eq!(mixed_norm(&v(&[3.0, 4.0]), &MixedNormSpec::euclidean()).unwrap(), 5.0);
    }

    #[test]
    fn mixed_outer_inf_inner_one() {
        let spec = MixedNormSpec::mixed(f64::INFINITY, 1.0, 2);
        assert_eq!(mixed_norm(&v(&[1.0, 1.0, 1.0, 1.0]), &spec).unwrap(), 2.0);
    }

    #[test]
    fn incompatible_block_is_rejected() {
        let spec = MixedNormSpec::mixed(2.0, 2.0, 3);
        assert!(matches!(mixed_norm(&v(&[1.0; 4]), &spec), Err(Error::IncompatibleSpec { .. })));
        let spec = MixedNormSpec::p(2.0).with_weights(vec![1.0, -1.0]);
        assert!(mixed_norm(&v(&[1.0, 1.0]), &spec).is_err());
    }

    #[test]
    fn dual_direction_attains_norm() {
        let x = CVec::from_iterator(6, (0..6).map(|k| c64(k as f64 - 2.5, 0.3 * k as f64)));
        let specs = [
            MixedNormSpec::p(3.0).with_weights(vec![1.0, 2.0, 0.5, 1.0, 3.0, 1.0]),
            MixedNormSpec::mixed(1.5, 3.0, 2),
            MixedNormSpec::mixed(f64::INFINITY, 1.0, 3),
        ];
        for spec in specs {
            let z = spec.dual_direction(&x);
            let pairing = linalg::bilinear(&z, &x);
            assert!((pairing.re - spec.norm(&x)).abs() < 1e-12);
            assert!(pairing.im.abs() < 1e-12);
            assert!((spec.dual().norm(&z) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_operator_norms() {
        let t = CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(-2.0, 0.0), c64(3.0, 0.0), c64(0.5, 1.0)]);
        let one = MixedNormSpec::p(1.0).operator_norm(&t);
        assert!((one.value - 4.0).abs() < 1e-14);
        let inf = MixedNormSpec::p(f64::INFINITY).operator_norm(&t);
        assert!((inf.value - (3.0 + 1.25f64.sqrt())).abs() < 1e-14);
        let spec = MixedNormSpec::p(f64::INFINITY);
        let attained = spec.norm(&(&t * &inf.maximizer)) / spec.norm(&inf.maximizer);
        assert!((attained - inf.value).abs() < 1e-14);
    }

    #[test]
    fn power_iteration_matches_exact_two_norm_for_p_near_two() {
        let t = CMat::from_fn(4, 4, |i, j| c64(((i * 7 + j * 3) % 5) as f64 - 2.0, 0.0));
        let exact = MixedNormSpec::p(2.0).operator_norm(&t).value;
        let lower = MixedNormSpec::mixed(2.0, 2.0, 2).operator_norm(&t);
        assert!(!lower.exact);
        assert!((lower.value - exact).abs() < 1e-9 * exact);
    }

    fn cvec_strategy(n: usize) -> impl Strategy<Value = CVec> {
        proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n)
            .prop_map(move |v| CVec::from_iterator(n, v.into_iter().map(|(a, b)| c64(a, b))))
    }

    fn spec_strategy() -> impl Strategy<Value = MixedNormSpec> {
        prop_oneof![
            (1.0f64..6.0).prop_map(MixedNormSpec::p),
            Just(MixedNormSpec::p(f64::INFINITY)),
            (1.0f64..5.0, 1.0f64..5.0).prop_map(|(r, q)| MixedNormSpec::mixed(r, q, 3)),
            (1.0f64..5.0).prop_map(|q| MixedNormSpec::mixed(f64::INFINITY, q, 2)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn norm_axioms(x in cvec_strategy(6), y in cvec_strategy(6), spec in spec_strategy(),
                       s in (-5.0f64..5.0, -5.0f64..5.0)) {
            let nx = spec.norm(&x);
            let ny = spec.norm(&y);
            prop_assert!(spec.norm(&(&x + &y)) <= nx + ny + 1e-12 * (1.0 + nx + ny));
            let s = c64(s.0, s.1);
            let scaled = spec.norm(&(&x * s));
            prop_assert!((scaled - s.norm() * nx).abs() <= 1e-12 * (1.0 + scaled));
        }
    }
}
