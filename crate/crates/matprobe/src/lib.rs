//! Matrix probing for operators with smooth pseudodifferential symbols.
//!
//! A structured linear operator A that lies (approximately) in the span of a
//! family of basis matrices B₁,…,B_p can be recovered from its action on a
//! handful of random vectors: stack the vectors B_j u into a tall matrix L
//! and solve Lc = Au in the least-squares sense. The same mechanism applied
//! to v = Au recovers an approximate pseudoinverse, which makes a good
//! preconditioner for elliptic problems in smooth media. Whether any of this
//! is well conditioned is governed by two numbers of the family: the Gram
//! condition number κ(B) and the weak condition number λ(B).
//!
//! The crate provides the dense numerics substrate, discrete symbol calculus
//! on periodic grids, separable symbol basis families with O(n log n)
//! application, forward/backward probing with full conditioning diagnostics,
//! the reference operators (variable-media elliptic in 1D/2D, foveation), and
//! a CLI experiment harness (`matprobe`) that emits CSV tables.

pub mod basis;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod numerics;
pub mod operators;
pub mod probing;
pub mod symbol;

pub use error::{Error, Result};
pub use grid::Grid;
pub use numerics::{Cpx, Mat, RandomStream, SequenceKind};
