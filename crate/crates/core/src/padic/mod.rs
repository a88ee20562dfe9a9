//! Arithmetic in `Z/p^N` and linear algebra over it.

mod matrix;
mod ring;
mod smith;

pub use matrix::ModMatrix;
pub use ring::{is_prime, ModularInt, RingOp, RingParams, MAX_MODULUS};
pub use smith::{lattice_log_order, SmithForm};
