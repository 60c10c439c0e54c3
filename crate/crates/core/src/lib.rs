//! Minimal tensor-product decompositions of matrices on `H₁ ⊗ H₂` into sums
//! of real-symmetric or Hermitian factor pairs, and separability analysis of
//! quantum states built on those decompositions.
//!
//! - [`dense`]: matrices, `vec`, realignment, SVD and Hermitian eigenvalues
//! - [`pair_basis`]: symmetric/antisymmetric bases in `vec` coordinates
//! - [`sym_decomp`]: best approximation by real symmetric factor pairs
//! - [`herm_decomp`]: exact Hermitian decomposition of Hermitian matrices
//! - [`separability`]: shift protocol, `q`, eigenvalue bounds, gauge search
//! - [`multipartite`]: recursive decomposition of `l`-partite matrices
//! - [`states`]: Werner, Horodecki `2 × 4` and random test states
//! - [`cli`]: file formats and subcommands of the `schmidt-herm` binary

pub mod cli;
pub mod dense;
pub mod error;
pub mod herm_decomp;
pub mod multipartite;
pub mod pair_basis;
pub mod separability;
pub mod states;
pub mod sym_decomp;

pub use dense::{BipartiteDims, ComplexMatrix, RealMatrix};
pub use error::{Error, Result};
