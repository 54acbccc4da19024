//! Monte-Carlo oracles for the planted-distribution moments.
//!
//! Estimates `E_P[z^K · h_α(G) · h_β(b)]` by direct sampling of the planted
//! distribution, sharing one sample stream across all requested functionals.
//! These estimates are the independent check against the closed forms in
//! [`super::coeffs`] and against the pseudo-calibration coefficients.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::hermite::hermite_eval;
use crate::seeding::trial_rng;

use super::alpha::AlphaGraph;

/// One functional `E_P[z^K h_α(G) h_β(b)]`.
#[derive(Clone, Debug)]
pub struct MomentQuery {
    pub alpha: AlphaGraph,
    /// One entry per label; zero for labels absent from `alpha`.
    pub beta: Vec<u32>,
    /// Exponents of `z`; empty means no `z` factor.
    pub z_exponents: Vec<u32>,
}

impl MomentQuery {
    pub fn coefficient_query(alpha: AlphaGraph, beta: Vec<u32>) -> Self {
        let n = alpha.n();
        MomentQuery {
            alpha,
            beta,
            z_exponents: vec![0; n],
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

impl MomentEstimate {
    /// |mean - reference| in units of the standard error.
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        if self.std_err == 0.0 {
            if self.mean == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference).abs() / self.std_err
        }
    }
}

/// Runs the shared-sample estimator. All queries must agree on
/// `(n, m, D)`; `scaling` is the planted conditioning scale.
pub fn estimate_planted_moments(
    n: usize,
    m: usize,
    degree: u32,
    scaling: f64,
    queries: &[MomentQuery],
    samples: u64,
    seed: u64,
) -> Result<Vec<MomentEstimate>, CoreError> {
    for q in queries {
        if q.alpha.n() != n || q.alpha.m() != m || q.alpha.degree() != degree {
            return Err(CoreError::invalid("query shape mismatch"));
        }
        if q.beta.len() != m || q.z_exponents.len() != n {
            return Err(CoreError::invalid("query vector lengths"));
        }
    }
    let tensor_len = n.pow(degree);
    // Slots and multiplicities flattened per query for the hot loop.
    let compiled: Vec<CompiledQuery> = queries
        .iter()
        .map(|q| CompiledQuery::new(q, n, degree))
        .collect();

    let block_size: u64 = 1 << 14;
    let blocks = samples.div_ceil(block_size);
    let partials: Vec<Vec<(f64, f64)>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = trial_rng(seed, block);
            let count = block_size.min(samples - block * block_size);
            let mut sums = vec![(0.0f64, 0.0f64); compiled.len()];
            let mut z = vec![0.0f64; n];
            let mut b = vec![0.0f64; m];
            let mut tensors = vec![0.0f64; m * tensor_len];
            let mut z_power = vec![0.0f64; tensor_len];
            let root = 1.0 / (n as f64).sqrt();
            for _ in 0..count {
                draw_planted(
                    &mut rng,
                    n,
                    degree,
                    scaling,
                    root,
                    &mut z,
                    &mut b,
                    &mut tensors,
                    &mut z_power,
                );
                for (q, sums) in compiled.iter().zip(sums.iter_mut()) {
                    let v = q.evaluate(&z, &b, &tensors, tensor_len);
                    sums.0 += v;
                    sums.1 += v * v;
                }
            }
            sums
        })
        .collect();

    let mut totals = vec![(0.0f64, 0.0f64); compiled.len()];
    for block in partials {
        for (t, p) in totals.iter_mut().zip(block) {
            t.0 += p.0;
            t.1 += p.1;
        }
    }
    Ok(totals
        .into_iter()
        .map(|(sum, sumsq)| {
            let nn = samples as f64;
            let mean = sum / nn;
            let var = (sumsq / nn - mean * mean).max(0.0);
            MomentEstimate {
                mean,
                std_err: (var / nn).sqrt(),
                samples,
            }
        })
        .collect())
}

struct CompiledQuery {
    /// (flat tensor offset, multiplicity) per alpha entry.
    slots: Vec<(usize, u32)>,
    beta: Vec<u32>,
    z_exponents: Vec<u32>,
}

impl CompiledQuery {
    fn new(q: &MomentQuery, n: usize, degree: u32) -> Self {
        let tensor_len = n.pow(degree);
        let slots = q
            .alpha
            .edges()
            .map(|(s, tuple, mult)| {
                let mut flat = 0usize;
                for &v in &tuple {
                    flat = flat * n + v;
                }
                (s * tensor_len + flat, mult)
            })
            .collect();
        CompiledQuery {
            slots,
            beta: q.beta.clone(),
            z_exponents: q.z_exponents.clone(),
        }
    }

    fn evaluate(&self, z: &[f64], b: &[f64], tensors: &[f64], _tensor_len: usize) -> f64 {
        let mut v = 1.0f64;
        for &(offset, mult) in &self.slots {
            v *= hermite_eval(mult, tensors[offset]);
        }
        for (&bk, &bv) in self.beta.iter().zip(b) {
            if bk > 0 {
                v *= hermite_eval(bk, bv);
            }
        }
        for (&e, &zv) in self.z_exponents.iter().zip(z) {
            for _ in 0..e {
                v *= zv;
            }
        }
        v
    }
}

#[allow(clippy::too_many_arguments)]
fn draw_planted(
    rng: &mut impl Rng,
    n: usize,
    degree: u32,
    scaling: f64,
    root: f64,
    z: &mut [f64],
    b: &mut [f64],
    tensors: &mut [f64],
    z_power: &mut [f64],
) {
    for zi in z.iter_mut() {
        *zi = if rng.gen::<bool>() { root } else { -root };
    }
    let tensor_len = z_power.len();
    for (flat, zp) in z_power.iter_mut().enumerate() {
        let mut rem = flat;
        let mut prod = 1.0;
        for _ in 0..degree {
            prod *= z[rem % n];
            rem /= n;
        }
        *zp = prod;
    }
    let m = b.len();
    for s in 0..m {
        b[s] = StandardNormal.sample(rng);
        let block = &mut tensors[s * tensor_len..(s + 1) * tensor_len];
        let mut overlap = 0.0f64;
        for (e, zp) in block.iter_mut().zip(z_power.iter()) {
            *e = StandardNormal.sample(rng);
            overlap += *e * *zp;
        }
        let shift = scaling * b[s] - overlap;
        for (e, zp) in block.iter_mut().zip(z_power.iter()) {
            *e += shift * zp;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowdeg::coeffs::planted_hermite_coeff;

    #[test]
    fn double_loop_coefficient_agrees_with_closed_form() {
        // alpha = one label, multiplicity 2 on the (0,0) loop.
        let alpha = AlphaGraph::from_edges(2, 1, 2, &[(0, &[0, 0], 2)]).unwrap();
        let beta = vec![0u32];
        let closed = planted_hermite_coeff(&alpha, &beta, 0.0);
        let est = estimate_planted_moments(
            2,
            1,
            2,
            0.0,
            &[MomentQuery::coefficient_query(alpha, beta)],
            200_000,
            31,
        )
        .unwrap();
        assert!(
            est[0].sigmas_from(closed) < 4.0,
            "closed {closed} vs mc {} ± {}",
            est[0].mean,
            est[0].std_err
        );
    }

    #[test]
    fn odd_degree_coefficient_is_statistically_zero() {
        // A single non-loop edge has odd vertex degrees: coefficient 0.
        let alpha = AlphaGraph::from_edges(2, 1, 2, &[(0, &[0, 1], 1)]).unwrap();
        let est = estimate_planted_moments(
            2,
            1,
            2,
            0.3,
            &[MomentQuery::coefficient_query(alpha, vec![1])],
            100_000,
            5,
        )
        .unwrap();
        assert!(est[0].sigmas_from(0.0) < 4.0);
    }
}
