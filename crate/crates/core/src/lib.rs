//! Genus-two ε-sewing of two tori for the free boson and its lattice
//! extensions.
//!
//! The closed formulas (period matrix, bilinear form, partition and
//! n-point functions) live in [`sewing`], [`partition`] and [`npoint`].
//! [`graphs`] and [`fock`] are independent oracles that rebuild the same
//! quantities from cycle enumeration and from Fock-space sums.

pub mod error;
pub mod fock;
pub mod graphs;
pub mod modular;
pub mod npoint;
pub mod partition;
pub mod quad;
pub mod series;
pub mod sewing;
pub mod taylor;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default truncations.
pub mod defaults {
    pub const K: usize = 16;
    pub const N: usize = 40;
    pub const D: u32 = 10;
    pub const N_MAX: u32 = 8;
}
