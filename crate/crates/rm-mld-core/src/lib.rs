//! Core algorithms for two-step majority-logic decoding of binary
//! Reed-Muller codes `RM(r, m)`, `1 <= r <= m/2`.
//!
//! The crate is organised around the geometry of `Z_2^m`:
//!
//! * [`gf2`] - bit-packed vectors, matrices and rank over GF(2), plus the
//!   position orderings of `Z_2^m` (lexicographic and the power ordering
//!   derived from a primitive modulus of `GF(2^m)`).
//! * [`geometry`] - affine `d`-flats in canonical form: enumeration,
//!   intersection, superflats and partial spreads.
//! * [`code`] - construction of `RM(r, m)` from flat incidence vectors,
//!   information sets and systematic encoding.
//! * [`families`] - admissible families of `r`-flats: the per-position
//!   check-flat systems that drive the first decoding step, explicit
//!   constructions, shipped witnesses and a heuristic search.
//! * [`decoder`] - compiled check systems, the two-step decoder over all
//!   positions or information positions only, puncturing support and
//!   majority-gate accounting.
//! * [`bounds`] - closed-form and integer-programming bounds on the minimal
//!   family size, plus the exclusion searches settling the small cases.
//! * [`analysis`] - invariants and clique censuses of 16-point information
//!   sets of `RM(2, 5)`.
//!
//! The crate is `no_std` (with `alloc`); all operations are deterministic
//! and all randomised searches are seeded.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod bounds;
mod cliques;
pub mod code;
pub mod decoder;
pub mod families;
pub mod geometry;
pub mod gf2;

mod error;

pub use error::{Error, Result};
