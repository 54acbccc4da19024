//! The linearization matrix of the degree-`d` ideal membership system.
//!
//! Writing `f = Σ_i a_i (g_i - b_i)` with homogeneous degree-`(d-D)` pieces
//! `a_i` and comparing coefficients gives a linear system `M_{G,b} â = f̂`.
//! Rows are indexed by multisets of size `d` (the product block, entries
//! `ĝ_i(α-β)`) followed by multisets of size `d-D` (the rhs block, entries
//! `-b_i` on the diagonal); columns are indexed by `(β, i)` pairs grouped by
//! equation.

use rayon::prelude::*;
use std::collections::HashMap;

use crate::distributions::PolynomialSystem;
use crate::error::CoreError;
use crate::exact::bareiss::bareiss_rank;
use crate::exact::RatMatrix;
use crate::multiset::{enumerate_multisets, MultisetIndex};
use crate::Rat;

use super::covering::CoveringPlan;

pub struct LinearizationMatrix {
    pub n: usize,
    /// Equation degree `D`.
    pub block_degree: u32,
    /// Proof degree `d`.
    pub proof_degree: u32,
    pub m: usize,
    /// Degree-`d` row indices, then the degree-`(d-D)` rhs-block rows.
    pub rows_top: Vec<MultisetIndex>,
    pub rows_bottom: Vec<MultisetIndex>,
    /// Column multiset indices (shared across equations).
    pub betas: Vec<MultisetIndex>,
    pub matrix: RatMatrix,
}

impl LinearizationMatrix {
    pub fn rows(&self) -> usize {
        self.rows_top.len() + self.rows_bottom.len()
    }

    pub fn cols(&self) -> usize {
        self.m * self.betas.len()
    }

    pub fn col_of(&self, equation: usize, beta_pos: usize) -> usize {
        equation * self.betas.len() + beta_pos
    }
}

pub fn build_linearization(
    system: &PolynomialSystem<Rat>,
    proof_degree: u32,
) -> Result<LinearizationMatrix, CoreError> {
    let degree = system.degree;
    if proof_degree < degree {
        return Err(CoreError::invalid("need d >= D"));
    }
    if !proof_degree.is_multiple_of(degree) {
        // The downstream identity assembles p^{d/D}, so d must be a
        // multiple of D.
        return Err(CoreError::invalid("need d to be a multiple of D"));
    }
    let n = system.n;
    let rows_top = enumerate_multisets(n, proof_degree);
    let rows_bottom = enumerate_multisets(n, proof_degree - degree);
    let betas = rows_bottom.clone();

    let top_lookup: HashMap<&MultisetIndex, usize> =
        rows_top.iter().enumerate().map(|(i, a)| (a, i)).collect();

    let num_rows = rows_top.len() + rows_bottom.len();
    let num_betas = betas.len();

    // Column blocks are independent across equations.
    let blocks: Vec<Vec<(usize, usize, Rat)>> = system
        .tensors
        .par_iter()
        .zip(system.rhs.par_iter())
        .enumerate()
        .map(|(eq, (tensor, b))| {
            let poly = tensor.to_poly();
            let mut entries = Vec::new();
            for (beta_pos, beta) in betas.iter().enumerate() {
                let col = eq * num_betas + beta_pos;
                for (gamma, coeff) in poly.terms() {
                    let alpha = beta.add(gamma).expect("same num_vars");
                    let row = top_lookup[&alpha];
                    entries.push((row, col, coeff.clone()));
                }
                if !num_traits::Zero::is_zero(b) {
                    entries.push((rows_top.len() + beta_pos, col, -b.clone()));
                }
            }
            entries
        })
        .collect();

    let mut matrix = RatMatrix::zeros(num_rows, system.m * num_betas);
    for block in blocks {
        for (r, c, v) in block {
            matrix.set(r, c, v);
        }
    }

    Ok(LinearizationMatrix {
        n,
        block_degree: degree,
        proof_degree,
        m: system.m,
        rows_top,
        rows_bottom,
        betas,
        matrix,
    })
}

/// Exact full-row-rank check by fraction-free elimination. The dimension
/// shortfall case (`cols < rows`) is decided without elimination.
pub fn check_full_row_rank(lin: &LinearizationMatrix) -> bool {
    if lin.cols() < lin.rows() {
        return false;
    }
    bareiss_rank(&lin.matrix) == lin.rows()
}

/// The square submatrices of the row-rank decomposition: one block per
/// covering gamma (with its own fresh equation) plus the rhs identity block.
///
/// Block for gamma with equation `i`: rows `α = β + γ`, columns `β`, entries
/// `ĝ_i(α - β)` where defined. The rhs block is `-b_i · Id`.
pub fn decomposition_blocks(
    system: &PolynomialSystem<Rat>,
    plan: &CoveringPlan,
    proof_degree: u32,
) -> Result<Vec<RatMatrix>, CoreError> {
    if system.m < plan.gammas.len() + 1 {
        return Err(CoreError::invalid(
            "need one fresh equation per gamma plus one for the rhs block",
        ));
    }
    let n = system.n;
    let betas = enumerate_multisets(n, proof_degree - system.degree);
    let mut blocks = Vec::with_capacity(plan.gammas.len() + 1);

    for (eq, gamma) in plan.gammas.iter().enumerate() {
        let poly = system.tensors[eq].to_poly();
        let mut block = RatMatrix::zeros(betas.len(), betas.len());
        for (r, beta_row) in betas.iter().enumerate() {
            let alpha = beta_row.add(gamma)?;
            for (c, beta_col) in betas.iter().enumerate() {
                if let Some(diff) = alpha.checked_sub(beta_col) {
                    block.set(r, c, poly.coeff(&diff));
                }
            }
        }
        blocks.push(block);
    }

    let b_last = &system.rhs[plan.gammas.len()];
    let mut rhs_block = RatMatrix::zeros(betas.len(), betas.len());
    for r in 0..betas.len() {
        rhs_block.set(r, r, -b_last.clone());
    }
    blocks.push(rhs_block);
    Ok(blocks)
}
