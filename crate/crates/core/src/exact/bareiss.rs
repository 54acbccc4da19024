//! Fraction-free Gaussian elimination (Bareiss).
//!
//! Operating on a row-scaled integer copy of the input, every intermediate
//! entry is a minor of the original matrix and every division is exact, so
//! no rational reduction happens during the sweep. This is the exact rank
//! checker and the reference solver for small systems.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Rat;

use super::matrix::RatMatrix;

struct Elimination {
    /// Reduced integer matrix (augmented with the rhs when solving).
    m: Vec<Vec<BigInt>>,
    /// (row, col) pivot pairs in elimination order.
    pivots: Vec<(usize, usize)>,
}

#[allow(clippy::needless_range_loop)] // index form mirrors the elimination
/// Runs fraction-free elimination on integer rows. `ncols_active` limits the
/// pivot search so an augmented rhs column is never chosen as a pivot.
fn eliminate(mut m: Vec<Vec<BigInt>>, ncols_active: usize) -> Elimination {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut prev_pivot = BigInt::one();
    let mut rank = 0usize;

    for col in 0..ncols_active {
        if rank == nrows {
            break;
        }
        // Smallest nonzero entry by bit length keeps the minors small.
        let pr = (rank..nrows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].magnitude().bits());
        let Some(pr) = pr else { continue };
        m.swap(rank, pr);

        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for r in rest.iter_mut() {
            let factor = std::mem::replace(&mut r[col], BigInt::zero());
            if factor.is_zero() {
                // The Bareiss identity still rescales untouched rows; the
                // division by the previous pivot stays exact.
                for c in (col + 1)..ncols {
                    if !r[c].is_zero() {
                        r[c] = (&r[c] * &pivot) / &prev_pivot;
                    }
                }
            } else {
                for c in (col + 1)..ncols {
                    let v = &r[c] * &pivot - &factor * &pivot_row[c];
                    r[c] = v / &prev_pivot;
                }
            }
        }
        prev_pivot = pivot;
        pivots.push((rank, col));
        rank += 1;
    }
    Elimination { m, pivots }
}

/// Exact rank via fraction-free elimination.
pub fn bareiss_rank(m: &RatMatrix) -> usize {
    let rhs = vec![Rat::zero(); m.rows()];
    let (int_rows, _) = m.to_row_scaled_int(&rhs);
    eliminate(int_rows, m.cols()).pivots.len()
}

/// Exact determinant check for a square rational matrix.
pub fn is_nonsingular(m: &RatMatrix) -> bool {
    assert_eq!(m.rows(), m.cols());
    bareiss_rank(m) == m.rows()
}

/// Solves `M x = rhs` exactly. Free variables are set to zero; returns
/// `None` when the system is inconsistent.
#[allow(clippy::needless_range_loop)] // index form mirrors back substitution
pub fn bareiss_solve(m: &RatMatrix, rhs: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(rhs.len(), m.rows());
    let (mut int_rows, int_rhs) = m.to_row_scaled_int(rhs);
    for (row, b) in int_rows.iter_mut().zip(int_rhs) {
        row.push(b);
    }
    let elim = eliminate(int_rows, m.cols());

    // Inconsistent iff a fully reduced row has nonzero rhs.
    let rank = elim.pivots.len();
    for r in rank..m.rows() {
        if !elim.m[r][m.cols()].is_zero() {
            return None;
        }
    }

    // Back substitution over the pivot columns, in rationals.
    let mut x = vec![Rat::zero(); m.cols()];
    for &(row, col) in elim.pivots.iter().rev() {
        let mut acc = Rat::from_integer(elim.m[row][m.cols()].clone());
        for c in (col + 1)..m.cols() {
            let v = &elim.m[row][c];
            if !v.is_zero() && !x[c].is_zero() {
                acc -= Rat::from_integer(v.clone()) * &x[c];
            }
        }
        x[col] = acc / Rat::from_integer(elim.m[row][col].clone());
    }
    Some(x)
}
