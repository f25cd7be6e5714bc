//! Holomorphic symbols on sectors, with their decay exponents at 0 and infinity.
//!
//! All powers use the principal branch (cut along `(-inf, 0]`).

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;

use crate::{c64, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `1 / (e^{i rho} + z)`
    PsiPlus {
        rho: f64,
    },
    /// `1 / (e^{-i rho} + z)`
    PsiMinus {
        rho: f64,
    },
    /// `z^{1/4} (z - e^{i rho})^{-1/2}`
    PhiPlus {
        rho: f64,
    },
    /// `z^{1/4} (z - e^{-i rho})^{-1/2}`
    PhiMinus {
        rho: f64,
    },
    /// `(n^2 - 1) z / ((n + z)(1 + n z))`
    RhoN {
        n: f64,
    },
    /// `z / (1+z)^2`
    ZOver1pzSq,
    /// `z^2 / (1+z)^4`
    Z2Over1pz4,
    /// `z / (1+z)^3`
    ZOver1pzCubed,
    /// `1 / (1+z)`
    OneOver1pz,
    /// `z^theta * base(z)`; theta may be complex (imaginary powers).
    PowerShift {
        theta: C64,
        base: Box<SymbolKind>,
    },
    Product(Box<SymbolKind>, Box<SymbolKind>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicSymbol {
    pub kind: SymbolKind,
    pub label: String,
}

/// Relative distance below which a point counts as lying on a branch cut.
const CUT_TOL: f64 = 1e-14;

fn on_negative_axis(w: C64) -> bool {
    w.re <= 0.0 && w.im.abs() <= CUT_TOL * w.norm().max(f64::MIN_POSITIVE) && w != c64(0.0, 0.0)
}

fn principal_pow(z: C64, a: C64) -> C64 {
    if z == c64(0.0, 0.0) {
        if a.re > 0.0 {
            c64(0.0, 0.0)
        } else {
            c64(f64::INFINITY, 0.0)
        }
    } else {
        (a * z.ln()).exp()
    }
}

impl SymbolKind {
    pub fn label(&self) -> String {
        match self {
            SymbolKind::PsiPlus { .. } => "psi_plus".into(),
            SymbolKind::PsiMinus { .. } => "psi_minus".into(),
            SymbolKind::PhiPlus { .. } => "phi_plus".into(),
            SymbolKind::PhiMinus { .. } => "phi_minus".into(),
            SymbolKind::RhoN { n } => format!("rho_n({n})"),
            SymbolKind::ZOver1pzSq => "z_over_1pz_sq".into(),
            SymbolKind::Z2Over1pz4 => "z2_over_1pz_4".into(),
            SymbolKind::ZOver1pzCubed => "z_over_1pz_cubed".into(),
            SymbolKind::OneOver1pz => "one_over_1pz".into(),
            SymbolKind::PowerShift { theta, base } => {
                if theta.im == 0.0 {
                    format!("power_shift({}, {})", theta.re, base.label())
                } else {
                    format!("power_shift({}+{}i, {})", theta.re, theta.im, base.label())
                }
            }
            SymbolKind::Product(a, b) => format!("{}*{}", a.label(), b.label()),
        }
    }

    fn eval(&self, z: C64) -> Result<C64> {
        let one = c64(1.0, 0.0);
        Ok(match self {
            SymbolKind::PsiPlus { rho } | SymbolKind::PsiMinus { rho } => {
                let sign = if matches!(self, SymbolKind::PsiPlus { .. }) { 1.0 } else { -1.0 };
                let d = C64::from_polar(1.0, sign * rho) + z;
                if d.norm() == 0.0 {
                    return Err(Error::PoleAt { re: z.re, im: z.im });
                }
                one / d
            }
            SymbolKind::PhiPlus { rho } | SymbolKind::PhiMinus { rho } => {
                let sign = if matches!(self, SymbolKind::PhiPlus { .. }) { 1.0 } else { -1.0 };
                let w = z - C64::from_polar(1.0, sign * rho);
                if on_negative_axis(z) || on_negative_axis(w) || w.norm() == 0.0 {
                    return Err(Error::BranchCut { symbol: self.label(), re: z.re, im: z.im });
                }
                principal_pow(z, c64(0.25, 0.0)) / w.sqrt()
            }
            SymbolKind::RhoN { n } => {
                let (a, b) = (z + n, one + z * n);
                if a.norm() == 0.0 || b.norm() == 0.0 {
                    return Err(Error::PoleAt { re: z.re, im: z.im });
                }
                // factored so that huge |z| does not overflow
                (z / a) * (n * n - 1.0) / b
            }
            SymbolKind::ZOver1pzSq | SymbolKind::Z2Over1pz4 | SymbolKind::ZOver1pzCubed | SymbolKind::OneOver1pz => {
                let p = one + z;
                if p.norm() == 0.0 {
                    return Err(Error::PoleAt { re: z.re, im: z.im });
                }
                let u = one / p;
                let v = z * u;
                match self {
                    SymbolKind::ZOver1pzSq => v * u,
                    SymbolKind::Z2Over1pz4 => (v * u) * (v * u),
                    SymbolKind::ZOver1pzCubed => v * u * u,
                    _ => u,
                }
            }
            SymbolKind::PowerShift { theta, base } => {
                if on_negative_axis(z) {
                    return Err(Error::BranchCut { symbol: self.label(), re: z.re, im: z.im });
                }
                principal_pow(z, *theta) * base.eval(z)?
            }
            SymbolKind::Product(a, b) => a.eval(z)? * b.eval(z)?,
        })
    }

    fn decays(&self) -> (f64, f64) {
        match self {
            SymbolKind::PsiPlus { .. } | SymbolKind::PsiMinus { .. } | SymbolKind::OneOver1pz => (0.0, 1.0),
            SymbolKind::PhiPlus { .. } | SymbolKind::PhiMinus { .. } => (0.25, 0.25),
            SymbolKind::RhoN { .. } | SymbolKind::ZOver1pzSq => (1.0, 1.0),
            SymbolKind::Z2Over1pz4 => (2.0, 2.0),
            SymbolKind::ZOver1pzCubed => (1.0, 2.0),
            SymbolKind::PowerShift { theta, base } => {
                let (a, b) = base.decays();
                (a + theta.re, b - theta.re)
            }
            SymbolKind::Product(x, y) => {
                let (a, b) = x.decays();
                let (c, d) = y.decays();
                (a + c, b + d)
            }
        }
    }

    fn holo_angle(&self) -> f64 {
        match self {
            SymbolKind::PsiPlus { rho } | SymbolKind::PsiMinus { rho } => PI - rho,
            SymbolKind::PhiPlus { rho } | SymbolKind::PhiMinus { rho } => *rho,
            SymbolKind::PowerShift { base, .. } => base.holo_angle(),
            SymbolKind::Product(a, b) => a.holo_angle().min(b.holo_angle()),
            _ => PI,
        }
    }
}

impl HolomorphicSymbol {
    pub fn new(kind: SymbolKind) -> Self {
        let label = kind.label();
        Self { kind, label }
    }

    pub fn psi_plus(rho: f64) -> Self {
        Self::new(SymbolKind::PsiPlus { rho })
    }
    pub fn psi_minus(rho: f64) -> Self {
        Self::new(SymbolKind::PsiMinus { rho })
    }
    pub fn phi_plus(rho: f64) -> Self {
        Self::new(SymbolKind::PhiPlus { rho })
    }
    pub fn phi_minus(rho: f64) -> Self {
        Self::new(SymbolKind::PhiMinus { rho })
    }
    pub fn rho_n(n: f64) -> Self {
        Self::new(SymbolKind::RhoN { n })
    }
    pub fn z_over_1pz_sq() -> Self {
        Self::new(SymbolKind::ZOver1pzSq)
    }
    pub fn z2_over_1pz_4() -> Self {
        Self::new(SymbolKind::Z2Over1pz4)
    }
    pub fn z_over_1pz_cubed() -> Self {
        Self::new(SymbolKind::ZOver1pzCubed)
    }
    pub fn one_over_1pz() -> Self {
        Self::new(SymbolKind::OneOver1pz)
    }

    /// `z^theta phi(z)`; theta must keep both decay exponents positive.
    pub fn power_shift(&self, theta: f64) -> Result<Self> {
        let (e0, einf) = self.decays();
        if !(theta > -e0 && theta < einf) {
            return Err(Error::WeightOutOfRange { theta, lower: -e0, upper: einf, symbol: self.label.clone() });
        }
        Ok(self.power_shift_unchecked(c64(theta, 0.0)))
    }

    /// `z^theta phi(z)` without the decay check (complex theta allowed).
    pub fn power_shift_unchecked(&self, theta: C64) -> Self {
        Self::new(SymbolKind::PowerShift { theta, base: Box::new(self.kind.clone()) })
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::new(SymbolKind::Product(Box::new(self.kind.clone()), Box::new(other.kind.clone())))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.kind.eval(z)
    }

    pub fn holo_angle(&self) -> f64 {
        self.kind.holo_angle()
    }

    /// `(decay_at_zero, decay_at_infinity)`.
    pub fn decays(&self) -> (f64, f64) {
        self.kind.decays()
    }

    pub fn decay_at_zero(&self) -> f64 {
        self.decays().0
    }

    pub fn decay_at_infinity(&self) -> f64 {
        self.decays().1
    }

    /// Both decay exponents positive.
    pub fn is_h_infinity_0(&self) -> bool {
        let (a, b) = self.decays();
        a > 0.0 && b > 0.0
    }

    /// Rational symbols (no fractional powers).
    pub fn is_rational(&self) -> bool {
        fn go(k: &SymbolKind) -> bool {
            match k {
                SymbolKind::PhiPlus { .. } | SymbolKind::PhiMinus { .. } | SymbolKind::PowerShift { .. } => false,
                SymbolKind::Product(a, b) => go(a) && go(b),
                _ => true,
            }
        }
        go(&self.kind)
    }

    /// Parse a configuration label. `rho` supplies the angle for the
    /// `psi_*`/`phi_*` families.
    pub fn parse(label: &str, rho: f64) -> Result<Self> {
        Ok(Self::new(parse_kind(label.trim(), rho)?))
    }
}

fn parse_kind(label: &str, rho: f64) -> Result<SymbolKind> {
    let bad = || Error::InvalidArgument(format!("unknown symbol label {label:?}"));
    Ok(match label {
        "psi_plus" => SymbolKind::PsiPlus { rho },
        "psi_minus" => SymbolKind::PsiMinus { rho },
        "phi_plus" => SymbolKind::PhiPlus { rho },
        "phi_minus" => SymbolKind::PhiMinus { rho },
        "z_over_1pz_sq" => SymbolKind::ZOver1pzSq,
        "z2_over_1pz_4" => SymbolKind::Z2Over1pz4,
        "z_over_1pz_cubed" => SymbolKind::ZOver1pzCubed,
        "one_over_1pz" => SymbolKind::OneOver1pz,
        _ => {
            let (name, args) = label.split_once('(').ok_or_else(bad)?;
            let args = args.strip_suffix(')').ok_or_else(bad)?;
            match name.trim() {
                "rho_n" => {
                    let n: f64 = args.trim().parse().map_err(|_| bad())?;
                    if !(n > 1.0) {
                        return Err(Error::InvalidArgument(format!("rho_n needs n > 1, got {n}")));
                    }
                    SymbolKind::RhoN { n }
                }
                "power_shift" => {
                    let (theta, base) = args.split_once(',').ok_or_else(bad)?;
                    let theta: f64 = theta.trim().parse().map_err(|_| bad())?;
                    let base = HolomorphicSymbol::new(parse_kind(base.trim(), rho)?);
                    base.power_shift(theta)?.kind
                }
                _ => return Err(bad()),
            }
        }
    })
}

impl core::fmt::Display for HolomorphicSymbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.label)
    }
}

impl From<SymbolKind> for HolomorphicSymbol {
    fn from(kind: SymbolKind) -> Self {
        Self::new(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn library(rho: f64) -> Vec<HolomorphicSymbol> {
        vec![
            HolomorphicSymbol::phi_plus(rho),
            HolomorphicSymbol::phi_minus(rho),
            HolomorphicSymbol::rho_n(4.0),
            HolomorphicSymbol::z_over_1pz_sq(),
            HolomorphicSymbol::z2_over_1pz_4(),
            HolomorphicSymbol::z_over_1pz_cubed(),
            HolomorphicSymbol::z2_over_1pz_4().power_shift(0.5).unwrap(),
        ]
    }

    #[test]
    fn phi_plus_principal_branch() {
        let v = HolomorphicSymbol::phi_plus(PI / 2.0).eval(c64(1.0, 0.0)).unwrap();
        let oracle = c64(1.0, -1.0).sqrt().inv();
        assert!((v - oracle).norm() < 1e-15);
    }

    #[test]
    fn phi_plus_cut_is_reported() {
        let rho = PI / 3.0;
        let z = C64::from_polar(1.0, rho) - 0.5;
        assert!(matches!(HolomorphicSymbol::phi_plus(rho).eval(z), Err(Error::BranchCut { .. })));
        assert!(HolomorphicSymbol::phi_minus(rho).eval(z).is_ok());
    }

    /// Sampled `sup |phi(z)| / min(|z|^e0, |z|^-einf)` over `|log|z|| <= span`.
    fn decay_constant(phi: &HolomorphicSymbol, arg: f64, span: f64) -> f64 {
        let (e0, einf) = phi.decays();
        let steps = (span / 0.05) as i32;
        (-steps..=steps)
            .map(|k| {
                let t = (k as f64 * 0.05).exp();
                phi.eval(C64::from_polar(t, arg)).unwrap().norm() / t.powf(e0).min(t.powf(-einf))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn decay_bounds_hold_on_rays() {
        let rho = 1.2;
        for phi in library(rho) {
            let sigma = phi.holo_angle();
            for arg in [0.0, sigma - 0.01, -(sigma - 0.01)] {
                let c = decay_constant(&phi, arg, 20.0);
                let wider = decay_constant(&phi, arg, 40.0);
                assert!(c.is_finite() && (wider - c).abs() <= 1e-6 * c, "{} at arg {arg}: {c} vs {wider}", phi.label);
            }
        }
    }

    #[test]
    fn rho_n_tends_to_one() {
        let z = c64(2.0, 1.0);
        let errs: Vec<f64> =
            [2.0, 8.0, 64.0].iter().map(|&n| (HolomorphicSymbol::rho_n(n).eval(z).unwrap() - 1.0).norm()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 0.05);
    }

    #[test]
    fn power_shift_range_checked() {
        let phi = HolomorphicSymbol::z2_over_1pz_4();
        assert!(phi.power_shift(1.9).is_ok());
        assert!(matches!(phi.power_shift(2.0), Err(Error::WeightOutOfRange { .. })));
        assert!(matches!(HolomorphicSymbol::z_over_1pz_sq().power_shift(-1.0), Err(Error::WeightOutOfRange { .. })));
    }

    #[test]
    fn labels_round_trip() {
        for label in [
            "psi_plus",
            "phi_minus",
            "rho_n(8)",
            "z_over_1pz_cubed",
            "power_shift(0.5, z2_over_1pz_4)",
            "power_shift(-0.25, z_over_1pz_sq)",
        ] {
            let s = HolomorphicSymbol::parse(label, 1.0).unwrap();
            let again = HolomorphicSymbol::parse(&s.label, 1.0).unwrap();
            assert_eq!(s, again);
        }
        assert!(HolomorphicSymbol::parse("sinc", 1.0).is_err());
    }

    #[test]
    fn psi_is_not_h_infinity_0() {
        assert!(!HolomorphicSymbol::psi_plus(1.0).is_h_infinity_0());
        assert!(HolomorphicSymbol::phi_plus(1.0).is_h_infinity_0());
    }
}
