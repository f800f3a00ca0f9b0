//! Exact-arithmetic kernels for counting representations `B = E^2 + gamma*F^2`
//! of monic polynomials over odd-characteristic finite fields, together with
//! the Hankel-matrix, multiset, and character-sum machinery needed to verify
//! the closed-form mean and variance of those counts over short intervals.
//!
//! Everything here is exact: field arithmetic is carried out on canonical
//! residue vectors, multiplicities and census counts are arbitrary-precision
//! integers, character sums live in `Z[zeta_p]` as integer count vectors, and
//! rational quantities are `(numerator, q, exponent)` triples. There is no
//! floating point on any verification path.
//!
//! The crate is organised around one idea: every closed form ships next to an
//! independent brute-force enumeration oracle, and [`verify`] runs the two
//! against each other at desk scale.

pub mod charsum;
pub mod field;
pub mod hankel;
pub mod multiset;
pub mod polyring;
pub mod variance;
pub mod verify;

mod error;

pub use error::Error;
pub use field::{Field, FieldElement};
