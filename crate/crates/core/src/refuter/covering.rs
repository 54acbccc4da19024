//! Bucket coverings of degree-`d` multisets by size-`D` multisets.
//!
//! Split `[n]` into `t = floor((d-1)/(D-1))` buckets and take every size-`D`
//! multiset inside each bucket. Any multiset `α` of size `d` must place `D`
//! of its elements (with multiplicity) into one bucket — otherwise it has at
//! most `t(D-1) <= d-1` elements — so the list covers. One equation per
//! gamma plus one for the rhs identity block gives the equation budget.

use std::collections::HashSet;

use crate::error::CoreError;
use crate::multiset::{binomial, enumerate_multisets, MultisetIndex};

#[derive(Clone, Debug)]
pub struct CoveringPlan {
    pub n: usize,
    /// Equation degree `D`.
    pub block_size: u32,
    /// Proof degree `d`.
    pub target_size: u32,
    /// Bucket assignment of `[n]`, contiguous blocks.
    pub buckets: Vec<Vec<usize>>,
    /// The covering multisets, all of size `D`.
    pub gammas: Vec<MultisetIndex>,
}

fn check_params(n: usize, degree: u32, d: u32) -> Result<(), CoreError> {
    if degree < 2 {
        return Err(CoreError::invalid("covering needs D >= 2"));
    }
    if d < degree {
        return Err(CoreError::invalid("covering needs d >= D"));
    }
    if (d as usize) > n {
        return Err(CoreError::invalid(
            "covering needs d <= n (outside the construction's hypotheses)",
        ));
    }
    Ok(())
}

/// Number of buckets and per-bucket capacity used by the construction.
fn bucket_shape(n: usize, degree: u32, d: u32) -> (usize, usize) {
    let t = ((d - 1) / (degree - 1)) as usize;
    let s = n.div_ceil(t);
    (t, s)
}

pub fn build_covering(n: usize, degree: u32, d: u32) -> Result<CoveringPlan, CoreError> {
    check_params(n, degree, d)?;
    let (t, s) = bucket_shape(n, degree, d);
    let mut buckets = Vec::with_capacity(t);
    let mut start = 0usize;
    for _ in 0..t {
        let end = (start + s).min(n);
        buckets.push((start..end).collect::<Vec<_>>());
        start = end;
    }

    let mut gammas = Vec::new();
    for bucket in &buckets {
        if bucket.is_empty() {
            continue;
        }
        // All size-D multisets over the bucket's elements.
        for local in enumerate_multisets(bucket.len(), degree) {
            let mut exponents = vec![0u32; n];
            for (j, &e) in local.exponents().iter().enumerate() {
                exponents[bucket[j]] = e;
            }
            gammas.push(MultisetIndex::new(exponents));
        }
    }
    Ok(CoveringPlan {
        n,
        block_size: degree,
        target_size: d,
        buckets,
        gammas,
    })
}

impl CoveringPlan {
    /// In-bucket weight test: `α` is covered iff some bucket holds at least
    /// `D` of its elements counted with multiplicity. Returns the witness
    /// gamma extracted from that bucket.
    pub fn covering_witness(&self, alpha: &MultisetIndex) -> Option<MultisetIndex> {
        for bucket in &self.buckets {
            let weight: u32 = bucket.iter().map(|&v| alpha.exponent(v)).sum();
            if weight < self.block_size {
                continue;
            }
            let mut exponents = vec![0u32; self.n];
            let mut need = self.block_size;
            for &v in bucket {
                let take = alpha.exponent(v).min(need);
                exponents[v] = take;
                need -= take;
                if need == 0 {
                    break;
                }
            }
            return Some(MultisetIndex::new(exponents));
        }
        None
    }

    /// Brute-force coverage: every size-`d` multiset contains some gamma of
    /// the list. Returns the first uncovered multiset on failure.
    pub fn verify_coverage(&self) -> Result<(), MultisetIndex> {
        let gamma_set: HashSet<&MultisetIndex> = self.gammas.iter().collect();
        for alpha in enumerate_multisets(self.n, self.target_size) {
            match self.covering_witness(&alpha) {
                Some(gamma) => {
                    debug_assert!(alpha.contains(&gamma));
                    if !gamma_set.contains(&gamma) {
                        // The witness must be one of the emitted gammas.
                        return Err(alpha);
                    }
                }
                None => {
                    // Exhaustive fallback in case a non-bucket gamma covers.
                    if !self.gammas.iter().any(|g| alpha.contains(g)) {
                        return Err(alpha);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Equation budget `N + 1`: the uniform-bucket count of the construction
/// (`t` buckets of capacity `ceil(n/t)`, all size-`D` multisets each) plus
/// one equation for the rhs identity block.
pub fn required_m(n: usize, degree: u32, d: u32) -> Result<usize, CoreError> {
    check_params(n, degree, d)?;
    let (t, s) = bucket_shape(n, degree, d);
    let per_bucket = binomial((s + degree as usize - 1) as u128, degree as u128);
    let total = (t as u128) * per_bucket + 1;
    if total > usize::MAX as u128 {
        return Err(CoreError::invalid("required_m overflows"));
    }
    Ok(total as usize)
}

/// Closed-form count bound the construction satisfies: `n^2/(2(d-1)) + 3n`
/// for `D = 2` and `(4e)^D/D * n^D/d^{D-1} + 1` for `D >= 3`.
pub fn covering_count_bound(n: usize, degree: u32, d: u32) -> f64 {
    let nf = n as f64;
    let df = d as f64;
    if degree == 2 {
        nf * nf / (2.0 * (df - 1.0)) + 3.0 * nf
    } else {
        let deg = degree as f64;
        (4.0 * std::f64::consts::E).powf(deg) / deg * nf.powf(deg) / df.powf(deg - 1.0) + 1.0
    }
}
