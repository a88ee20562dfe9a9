//! Finite-precision Iwasawa theory for potential cyclic `p`-towers.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`]: residues modulo `p^N` with valuations, matrices over that
//!   ring and their Smith normal form.
//! * [`lambda`]: polynomials in `T = h - 1` standing in for elements of the
//!   Iwasawa algebra, `omega_n`, Weierstrass preparation and quotient orders.
//! * [`module`]: finite abelian `p`-groups with an action of the generator `h`,
//!   their `H`-submodules, quotients and rank profiles.
//! * [`tower`]: class-group layers `X̄ / omega_n C̄`, stabilization checks and
//!   growth fitting.
//! * [`descent`]: finite models of `X ⋊ (H ⋊ Δ)` with inertia sections and a
//!   brute-force descent oracle.
//!
//! Everything here is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

mod error;

pub mod abelian;
pub mod descent;
pub mod lambda;
pub mod module;
pub mod padic;
pub mod tower;

pub use abelian::AbelianType;
pub use error::{Error, Result};
pub use lambda::{DistinguishedPoly, LambdaElement, WeierstrassData};
pub use module::{Element, FiniteHModule, Submodule};
pub use padic::{ModMatrix, ModularInt, RingParams, SmithForm};
