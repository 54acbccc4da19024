//! Exact linear algebra over the rationals.
//!
//! The refuter needs two primitives: exact rank of the linearization matrix
//! and an exact solution of `M a = f`. Fraction-free Bareiss elimination
//! ([`bareiss`]) provides both with determinant-sized intermediates; it is
//! the reference path and the rank checker. For the production solve the
//! p-adic lifting solver ([`dixon`]) is far faster at the sizes the
//! acceptance runs use and its output is verified exactly downstream.

pub mod bareiss;
pub mod dixon;
pub mod matrix;
pub mod modp;

pub use bareiss::{bareiss_rank, bareiss_solve};
pub use dixon::dixon_solve;
pub use matrix::RatMatrix;

use crate::Rat;

/// Solves `M x = rhs` exactly, returning any solution when one exists.
///
/// Uses p-adic lifting on the pivot square found modulo a prime; falls back
/// to Bareiss when the matrix is small or lifting hits a degenerate prime.
pub fn solve_exact(m: &RatMatrix, rhs: &[Rat]) -> Option<Vec<Rat>> {
    if m.rows() * m.cols() <= 64 * 64 {
        return bareiss_solve(m, rhs);
    }
    match dixon_solve(m, rhs) {
        dixon::DixonOutcome::Solved(x) => Some(x),
        dixon::DixonOutcome::BadPrimes => bareiss_solve(m, rhs),
    }
}
