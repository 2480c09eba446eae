//! Exact-arithmetic machinery for symplectic instanton bundles on P^3
//! presented by hyperwebs of quadrics.
//!
//! A hyperweb of charge N is an element of S²H_N^∨ ⊗ Λ²V^∨ (dim V = 4),
//! realized as a 4N×4N skew matrix that is symmetric in the H-indices and
//! antisymmetric in the V-indices. From a hyperweb of rank 2N+2r the crate
//! builds the associated symplectic quotient and monad, decides membership
//! in the (N, r)-instanton locus, computes cohomology tables of the monad
//! cohomology bundle, constructs instantons explicitly from (B, C) block
//! data and by restriction, and measures tangent dimensions of the rank
//! stratum against the closed-form dimension counts.
//!
//! All arithmetic is exact over a configurable prime field (optionally a
//! small extension for point sampling), and every sampler is deterministic
//! in a [`rng::Seed`].

pub mod construct;
pub mod error;
pub mod field;
pub mod hyperweb;
pub mod matrix;
pub mod membership;
pub mod monad;
pub mod rng;
pub mod tangent;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{ExtField, FieldOps, Fp, DEFAULT_PRIME};
pub use matrix::{FpMatrix, Matrix};
pub use rng::Seed;
