//! Finite-dimensional operator-sum machinery for sectorial operators.
//!
//! The crate is `no_std` (it needs `alloc`). Every routine works on dense
//! complex matrices and is deterministic given its inputs and seed; IO, file
//! formats and the experiment driver live in the `sectorsum` crate.
#![no_std]
// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod calculus;
pub mod dore_venni;
pub mod error;
pub mod gamma;
pub mod linalg;
pub mod lpnorms;
pub mod maxreg;
pub mod mellin;
pub mod norms;
pub mod operator;
pub mod opsum;
pub mod quadrature;
pub mod rng;
pub mod symbol;

pub use error::{Error, Result};
pub use norms::{MixedNormSpec, NormKind};
pub use operator::{LinearOperator, SectorProfile};
pub use quadrature::{ContourKind, ContourQuadrature};
pub use symbol::{HolomorphicSymbol, SymbolKind};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;

pub(crate) const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
