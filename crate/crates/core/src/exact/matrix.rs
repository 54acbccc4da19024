//! Dense rational matrix with row-major storage.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::Rat;

#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows_data: Vec<Vec<Rat>>) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_data {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        RatMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `M x` for a rational vector.
    pub fn mul_vec(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Rat::zero();
                for (c, xc) in x.iter().enumerate() {
                    let m = self.get(r, c);
                    if !m.is_zero() && !xc.is_zero() {
                        acc += m * xc;
                    }
                }
                acc
            })
            .collect()
    }

    /// Clears denominators row by row: returns integer rows `S·M` and the
    /// correspondingly scaled copy of `rhs`. Row scaling by positive integers
    /// leaves the solution set of `M x = rhs` unchanged.
    pub fn to_row_scaled_int(&self, rhs: &[Rat]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        assert_eq!(rhs.len(), self.rows);
        let mut int_rows = Vec::with_capacity(self.rows);
        let mut int_rhs = Vec::with_capacity(self.rows);
        for (r, b) in rhs.iter().enumerate() {
            let mut scale = BigInt::one();
            for v in self.row(r).iter().chain(std::iter::once(b)) {
                if !v.is_zero() {
                    scale = scale.lcm(v.denom());
                }
            }
            let scaled_entry = |v: &Rat| -> BigInt {
                if v.is_zero() {
                    BigInt::zero()
                } else {
                    v.numer() * (&scale / v.denom())
                }
            };
            int_rows.push(self.row(r).iter().map(scaled_entry).collect());
            int_rhs.push(scaled_entry(b));
        }
        (int_rows, int_rhs)
    }
}
