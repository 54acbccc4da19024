//! Dense order-`D` coefficient tensors.
//!
//! A system's polynomial `g(x)` is recovered from its tensor as
//! `g(x) = <G, x^{⊗D}>`, so the coefficient of a monomial `x^α` is the sum
//! of tensor entries over all index tuples whose multiset equals `α`.
//! Distinct monomials therefore aggregate different numbers of entries,
//! which is the variance convention of a random-entry tensor.

use crate::error::CoreError;
use crate::multiset::MultisetIndex;
use crate::poly::HomogeneousPolynomial;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct CoefficientTensor<T> {
    order: u32,
    dims: usize,
    entries: Vec<T>,
}

impl<T: Scalar> CoefficientTensor<T> {
    /// Zero tensor of the given order and axis length. Fails when `n^D`
    /// does not fit in addressable memory.
    pub fn zeros(order: u32, dims: usize) -> Result<Self, CoreError> {
        let len = entry_count(order, dims)?;
        Ok(CoefficientTensor {
            order,
            dims,
            entries: vec![T::zero(); len],
        })
    }

    pub fn from_entries(order: u32, dims: usize, entries: Vec<T>) -> Result<Self, CoreError> {
        let len = entry_count(order, dims)?;
        if entries.len() != len {
            return Err(CoreError::DimensionMismatch {
                expected: len,
                got: entries.len(),
            });
        }
        Ok(CoefficientTensor {
            order,
            dims,
            entries,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Entries in row-major order (last index fastest).
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [T] {
        &mut self.entries
    }

    fn flat(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.order as usize);
        let mut f = 0;
        for &i in index {
            debug_assert!(i < self.dims);
            f = f * self.dims + i;
        }
        f
    }

    pub fn get(&self, index: &[usize]) -> &T {
        &self.entries[self.flat(index)]
    }

    pub fn set(&mut self, index: &[usize], value: T) {
        let f = self.flat(index);
        self.entries[f] = value;
    }

    /// `<G, v^{⊗D}> = Σ_tuple G[tuple] · Π_k v[tuple_k]`.
    pub fn apply_power(&self, v: &[T]) -> Result<T, CoreError> {
        if v.len() != self.dims {
            return Err(CoreError::DimensionMismatch {
                expected: self.dims,
                got: v.len(),
            });
        }
        let mut acc = T::zero();
        self.for_each_tuple(|tuple, entry| {
            if entry.is_zero() {
                return;
            }
            let mut term = entry.clone();
            for &i in tuple {
                term *= v[i].clone();
            }
            acc += term;
        });
        Ok(acc)
    }

    /// The polynomial `x ↦ <G, x^{⊗D}>`, aggregating entries by monomial.
    pub fn to_poly(&self) -> HomogeneousPolynomial<T> {
        let mut p = HomogeneousPolynomial::zero(self.dims, self.order);
        self.for_each_tuple(|tuple, entry| {
            if entry.is_zero() {
                return;
            }
            let idx = MultisetIndex::from_support(self.dims, tuple);
            p.add_coeff(&idx, entry.clone());
        });
        p
    }

    fn for_each_tuple(&self, mut f: impl FnMut(&[usize], &T)) {
        let d = self.order as usize;
        let mut tuple = vec![0usize; d];
        for (flat, entry) in self.entries.iter().enumerate() {
            let mut rem = flat;
            for k in (0..d).rev() {
                tuple[k] = rem % self.dims;
                rem /= self.dims;
            }
            f(&tuple, entry);
        }
    }
}

fn entry_count(order: u32, dims: usize) -> Result<usize, CoreError> {
    if dims == 0 {
        return Err(CoreError::invalid("tensor needs dims >= 1"));
    }
    let mut len: usize = 1;
    for _ in 0..order {
        len = len
            .checked_mul(dims)
            .filter(|&l| l <= 1 << 30)
            .ok_or_else(|| CoreError::invalid(format!("tensor too large: {dims}^{order}")))?;
    }
    Ok(len)
}
