//! Monomial exponent vectors and their enumeration.
//!
//! A `MultisetIndex` is the exponent vector of a monomial in `n` variables,
//! equivalently a multiset over `[n]`. The canonical total order is graded
//! lexicographic: first by total degree, then by exponent vector with the
//! leading variable's exponent decreasing, so for `n = 2, d = 2` the order is
//! `x1^2, x1 x2, x2^2`. This order is fixed for serialization and for matrix
//! row/column indexing.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::CoreError;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultisetIndex {
    exponents: Vec<u32>,
}

impl MultisetIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultisetIndex { exponents }
    }

    /// The zero exponent vector (the constant monomial).
    pub fn zero(num_vars: usize) -> Self {
        MultisetIndex {
            exponents: vec![0; num_vars],
        }
    }

    /// The exponent vector of the single variable `var`.
    pub fn unit(num_vars: usize, var: usize) -> Self {
        let mut exponents = vec![0; num_vars];
        exponents[var] = 1;
        MultisetIndex { exponents }
    }

    /// Builds the multiset from a list of (possibly repeated) variables.
    pub fn from_support(num_vars: usize, vars: &[usize]) -> Self {
        let mut exponents = vec![0; num_vars];
        for &v in vars {
            exponents[v] += 1;
        }
        MultisetIndex { exponents }
    }

    pub fn num_vars(&self) -> usize {
        self.exponents.len()
    }

    /// Total degree `|α|`.
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.exponents[var]
    }

    /// Multiset union `α + β`.
    pub fn add(&self, other: &MultisetIndex) -> Result<MultisetIndex, CoreError> {
        if self.num_vars() != other.num_vars() {
            return Err(CoreError::NumVarsMismatch {
                left: self.num_vars(),
                right: other.num_vars(),
            });
        }
        Ok(MultisetIndex {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Multiset difference `α - β`, defined only when `β ⊆ α`.
    pub fn checked_sub(&self, other: &MultisetIndex) -> Option<MultisetIndex> {
        if self.num_vars() != other.num_vars() {
            return None;
        }
        let mut exponents = Vec::with_capacity(self.exponents.len());
        for (a, b) in self.exponents.iter().zip(&other.exponents) {
            exponents.push(a.checked_sub(*b)?);
        }
        Some(MultisetIndex { exponents })
    }

    /// Componentwise containment `other ⊆ self`.
    pub fn contains(&self, other: &MultisetIndex) -> bool {
        self.num_vars() == other.num_vars()
            && self
                .exponents
                .iter()
                .zip(&other.exponents)
                .all(|(a, b)| a >= b)
    }
}

impl Ord for MultisetIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            // Within a degree, larger leading exponents come first.
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for MultisetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of degree-`d` monomials in `n` variables, `C(n+d-1, d)`.
pub fn count_multisets(n: usize, d: u32) -> u128 {
    binomial(n as u128 + d as u128 - 1, d as u128)
}

/// `C(a, b)` in u128, saturating on overflow.
pub fn binomial(a: u128, b: u128) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = match acc.checked_mul(a - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All exponent vectors with `|α| = d` over `n` variables, in the canonical
/// graded-lexicographic order. Length is `C(n+d-1, d)`.
pub fn enumerate_multisets(n: usize, d: u32) -> Vec<MultisetIndex> {
    assert!(n >= 1, "enumerate_multisets requires n >= 1");
    let mut out = Vec::with_capacity(count_multisets(n, d).min(1 << 24) as usize);
    let mut current = vec![0u32; n];
    fill(&mut out, &mut current, 0, d);
    out
}

fn fill(out: &mut Vec<MultisetIndex>, current: &mut Vec<u32>, var: usize, remaining: u32) {
    if var + 1 == current.len() {
        current[var] = remaining;
        out.push(MultisetIndex::new(current.clone()));
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        fill(out, current, var + 1, remaining - e);
        current[var] = 0;
    }
}
