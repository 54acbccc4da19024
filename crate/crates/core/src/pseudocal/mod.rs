//! Pseudo-calibrated degree-4 moment matrices for homogeneous quadratic
//! systems `{x† G_s x = 0}` under the normalized booleanity `x_i² = 1/n`.
//!
//! The candidate pseudo-expectation assigns every even multilinear monomial
//! `x^K` (`|K| <= 4`) the truncated Hermite sum with the closed-form
//! coefficients of [`lambda::lambda_coeff`]; all odd moments are zero. The
//! moment matrix indexed by monomials of degree `<= 2` is assembled from the
//! same values after booleanity reduction, `M(I,J) = n^{-|I∩J|} pE[x^{I△J}]`.
//! The constraint operator `Q` maps a pseudo-expectation vector to all
//! residuals `pE[x^I (x† G_s x)]`; repairing projects onto its null space
//! through the pseudo-inverse of `Q Qᵀ`, and the spectrum report checks
//! positive semidefiniteness on the orthogonal complement of the repaired
//! matrix's constraint null directions.

pub mod lambda;
pub mod parity_sums;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::distributions::PolynomialSystem;
use crate::error::CoreError;

pub use lambda::lambda_coeff;
pub use parity_sums::{build_parity_sums, ParityMomentSums};

/// Even multilinear monomials `|K| ∈ {0, 2, 4}` in a canonical order.
#[derive(Clone, Debug)]
pub struct EvenMonomialBasis {
    pub n: usize,
    pub masks: Vec<u64>,
    pos: HashMap<u64, usize>,
}

impl EvenMonomialBasis {
    pub fn new(n: usize) -> Self {
        let mut masks = vec![0u64];
        for j in 1..n {
            for i in 0..j {
                masks.push((1 << i) | (1 << j));
            }
        }
        for l in 3..n {
            for k in 2..l {
                for j in 1..k {
                    for i in 0..j {
                        masks.push((1 << i) | (1 << j) | (1 << k) | (1 << l));
                    }
                }
            }
        }
        let pos = masks.iter().enumerate().map(|(p, &m)| (m, p)).collect();
        EvenMonomialBasis { n, masks, pos }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn position(&self, mask: u64) -> Option<usize> {
        self.pos.get(&mask).copied()
    }
}

/// Raw `n×n` constraint matrices of a degree-2 system.
pub fn system_matrices(system: &PolynomialSystem<f64>) -> Result<Vec<DMatrix<f64>>, CoreError> {
    if system.degree != 2 {
        return Err(CoreError::invalid("pseudo-calibration needs D = 2"));
    }
    Ok(system
        .tensors
        .iter()
        .map(|t| DMatrix::from_row_slice(system.n, system.n, t.entries()))
        .collect())
}

/// Monomials of degree `<= 2` indexing the moment matrix.
pub fn moment_index_masks(n: usize) -> Vec<u64> {
    let mut masks = vec![0u64];
    masks.extend((0..n).map(|i| 1u64 << i));
    for j in 1..n {
        for i in 0..j {
            masks.push((1 << i) | (1 << j));
        }
    }
    masks
}

/// Values `pE[x^K]` over the even monomial basis.
#[derive(Clone, Debug)]
pub struct PseudoExpectationVector {
    pub n: usize,
    pub tau: u32,
    pub basis: EvenMonomialBasis,
    pub values: DVector<f64>,
}

impl PseudoExpectationVector {
    pub fn value(&self, mask: u64) -> f64 {
        self.basis
            .position(mask)
            .map(|p| self.values[p])
            .unwrap_or(0.0)
    }

    /// `pE[1]`.
    pub fn normalization(&self) -> f64 {
        self.values[0]
    }
}

/// Builds the candidate pseudo-expectation at truncation `tau` from the
/// system matrices: `pE[x^K] = n^{-|K|/2} W(K)`.
pub fn build_pseudo_expectation(
    n: usize,
    tau: u32,
    mats: &[DMatrix<f64>],
) -> Result<PseudoExpectationVector, CoreError> {
    let sums = build_parity_sums(n, tau, mats)?;
    let basis = EvenMonomialBasis::new(n);
    let values = DVector::from_iterator(
        basis.len(),
        basis.masks.iter().map(|&mask| {
            let k = mask.count_ones() as f64;
            (n as f64).powf(-k / 2.0) * sums.value(mask)
        }),
    );
    Ok(PseudoExpectationVector {
        n,
        tau,
        basis,
        values,
    })
}

/// The degree-4 moment matrix over monomials of degree `<= 2`.
#[derive(Clone, Debug)]
pub struct MomentMatrix4 {
    pub n: usize,
    pub tau: u32,
    pub index_masks: Vec<u64>,
    pub mat: DMatrix<f64>,
}

/// Assembles the matrix from a pseudo-expectation vector:
/// `M(I,J) = n^{-|I∩J|} pE[x^{I△J}]`, zero when `|I| + |J|` is odd.
pub fn moment_matrix_from_pe(pe: &PseudoExpectationVector) -> MomentMatrix4 {
    let masks = moment_index_masks(pe.n);
    let dim = masks.len();
    let mut mat = DMatrix::<f64>::zeros(dim, dim);
    for (r, &mi) in masks.iter().enumerate() {
        for (c, &mj) in masks.iter().enumerate().skip(r) {
            if (mi.count_ones() + mj.count_ones()) % 2 != 0 {
                continue;
            }
            let overlap = (mi & mj).count_ones();
            let v = (pe.n as f64).powi(-(overlap as i32)) * pe.value(mi ^ mj);
            mat[(r, c)] = v;
            mat[(c, r)] = v;
        }
    }
    MomentMatrix4 {
        n: pe.n,
        tau: pe.tau,
        index_masks: masks,
        mat,
    }
}

/// Degenerate-regime check: the vector repair only has room to act when
/// `Q` has more columns than independent rows, i.e. roughly
/// `m < (1 + C(n,2) + C(n,4)) / (1 + C(n,2))`. Beyond that `null(Q)` is
/// trivial and the fixed vector is zero; `RepairInfo::null_dim` reports it.
///
/// One-call construction per the published interface.
pub fn build_moment_matrix(
    n: usize,
    tau: u32,
    mats: &[DMatrix<f64>],
) -> Result<(MomentMatrix4, PseudoExpectationVector), CoreError> {
    let pe = build_pseudo_expectation(n, tau, mats)?;
    Ok((moment_matrix_from_pe(&pe), pe))
}

/// Rows `(I, s)` with `|I| ∈ {0, 2}` of the constraint map
/// `pE ↦ pE[x^I (x† G_s x)]`, over the even monomial basis.
#[derive(Clone, Debug)]
pub struct ConstraintOperator {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<(u64, usize)>,
    pub basis: EvenMonomialBasis,
    pub q: DMatrix<f64>,
}

pub fn build_constraint_operator(
    n: usize,
    mats: &[DMatrix<f64>],
) -> Result<ConstraintOperator, CoreError> {
    for g in mats {
        if g.nrows() != n || g.ncols() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: g.nrows(),
            });
        }
    }
    let m = mats.len();
    let basis = EvenMonomialBasis::new(n);
    let mut row_sets: Vec<u64> = vec![0u64];
    for j in 1..n {
        for i in 0..j {
            row_sets.push((1 << i) | (1 << j));
        }
    }
    let rows: Vec<(u64, usize)> = row_sets
        .iter()
        .flat_map(|&i_mask| (0..m).map(move |s| (i_mask, s)))
        .collect();

    let mut q = DMatrix::<f64>::zeros(rows.len(), basis.len());
    for (r, &(i_mask, s)) in rows.iter().enumerate() {
        let g = &mats[s];
        // Off-diagonal pairs: (G_ij + G_ji) pE[x^I x_i x_j] with booleanity
        // reduction x_v^2 = 1/n for v ∈ I ∩ {i, j}.
        for j in 1..n {
            for i in 0..j {
                let w = g[(i, j)] + g[(j, i)];
                if w == 0.0 {
                    continue;
                }
                let pair = (1u64 << i) | (1u64 << j);
                let target = i_mask ^ pair;
                let overlap = (i_mask & pair).count_ones();
                if let Some(col) = basis.position(target) {
                    q[(r, col)] += w * (n as f64).powi(-(overlap as i32));
                }
            }
        }
        // Diagonal: Σ_i G_ii x_i^2 = (1/n) Σ_i G_ii.
        let trace: f64 = (0..n).map(|i| g[(i, i)]).sum();
        if let Some(col) = basis.position(i_mask) {
            q[(r, col)] += trace / n as f64;
        }
    }
    Ok(ConstraintOperator {
        n,
        m,
        rows,
        basis,
        q,
    })
}

impl ConstraintOperator {
    /// Residual vector `Q pE`.
    pub fn apply(&self, pe: &PseudoExpectationVector) -> DVector<f64> {
        &self.q * &pe.values
    }

    /// Eigendecomposition of `QᵀQ`, shared by the repair and the reports.
    fn gram_eigen(&self) -> (DMatrix<f64>, DVector<f64>) {
        let gram = self.q.transpose() * &self.q;
        let eig = gram.symmetric_eigen();
        (eig.eigenvectors, eig.eigenvalues)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepairInfo {
    pub residual_before: f64,
    pub residual_after: f64,
    /// `‖Q‖` (largest singular value).
    pub q_norm: f64,
    /// Smallest eigenvalue of `Q Qᵀ` kept above the cutoff: the spectral
    /// gap that makes the pseudo-inverse stable.
    pub qqt_gap: f64,
    pub correction_norm: f64,
    pub rank: usize,
    /// Dimension of null(Q): zero means the projection is degenerate (the
    /// fix annihilates every pseudo-expectation; see the asymptotic regime
    /// note on the module).
    pub null_dim: usize,
    pub svd_cutoff: f64,
}

/// Default relative singular-value cutoff of the pseudo-inverse.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-8;

/// `pE_fix = pE - Qᵀ (Q Qᵀ)† Q pE`: the orthogonal projection of the
/// pseudo-expectation vector onto the null space of `Q`. Singular values
/// below `svd_cutoff · σ_max` are treated as zero (`Q Qᵀ` is genuinely
/// rank deficient).
pub fn repair_constraints(
    pe: &PseudoExpectationVector,
    q: &ConstraintOperator,
    svd_cutoff: f64,
) -> (PseudoExpectationVector, RepairInfo) {
    let residual_before = q.apply(pe).norm();
    let (vectors, values) = q.gram_eigen();
    let lambda_max = values.iter().fold(0.0f64, |a, &b| a.max(b));
    let cut = svd_cutoff * svd_cutoff * lambda_max;

    let mut correction = DVector::<f64>::zeros(pe.values.len());
    let mut rank = 0usize;
    let mut qqt_gap = f64::INFINITY;
    for (idx, &lam) in values.iter().enumerate() {
        if lam > cut {
            rank += 1;
            qqt_gap = qqt_gap.min(lam);
            let v = vectors.column(idx);
            let coeff = v.dot(&pe.values);
            correction += v * coeff;
        }
    }
    if !qqt_gap.is_finite() {
        qqt_gap = 0.0;
    }
    let fixed = PseudoExpectationVector {
        n: pe.n,
        tau: pe.tau,
        basis: pe.basis.clone(),
        values: &pe.values - &correction,
    };
    let residual_after = q.apply(&fixed).norm();
    let info = RepairInfo {
        residual_before,
        residual_after,
        q_norm: lambda_max.sqrt(),
        qqt_gap,
        correction_norm: correction.norm(),
        rank,
        null_dim: pe.values.len() - rank,
        svd_cutoff,
    };
    (fixed, info)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSummary {
    pub m00: f64,
    pub m11_min_eig: f64,
    pub m11_max_eig: f64,
    pub m22_min_eig: f64,
    pub m22_max_eig: f64,
    /// Largest magnitude over the structurally zero odd blocks.
    pub odd_max_abs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub tau: u32,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Minimum eigenvalue restricted to the orthogonal complement of the
    /// constraint null directions.
    pub min_restricted_eig: f64,
    /// Dimension of the projected-out subspace.
    pub null_rank: usize,
    pub blocks: BlockSummary,
}

/// Spectrum of the (repaired) moment matrix, plus the PSD check on the
/// complement of the constraint directions.
///
/// The directions projected out are the vectors `ℓ_s` with
/// `ℓ_s[K] = coefficient of pE[x^K] in pE[x† G_s x]` for `|K| <= 2`; after
/// repair `M ℓ_s = 0` up to float error (each entry of `M ℓ_s` is a
/// constraint residual or an odd moment), realizing the null-space
/// restriction numerically.
pub fn spectrum_report(matrix: &MomentMatrix4, q: &ConstraintOperator) -> SpectrumReport {
    let dim = matrix.index_masks.len();
    let eig = matrix.mat.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.min();
    let max_eig = eig.eigenvalues.max();

    // Constraint directions lifted into the moment index basis.
    let mask_pos: HashMap<u64, usize> = matrix
        .index_masks
        .iter()
        .enumerate()
        .map(|(p, &m)| (m, p))
        .collect();
    let mut l = DMatrix::<f64>::zeros(dim, q.m);
    for (r, &(i_mask, s)) in q.rows.iter().enumerate() {
        if i_mask != 0 {
            continue;
        }
        for (col_pos, &col_mask) in q.basis.masks.iter().enumerate() {
            if col_mask.count_ones() <= 2 {
                if let Some(&p) = mask_pos.get(&col_mask) {
                    l[(p, s)] = q.q[(r, col_pos)];
                }
            }
        }
    }
    let svd = l.svd(true, false);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let u = svd.u.as_ref().expect("requested");
    let kept: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1e-9 * sigma_max.max(1.0))
        .map(|(i, _)| i)
        .collect();
    let null_rank = kept.len();

    // Orthonormal basis of the complement from the projector's spectrum.
    let mut projector = DMatrix::<f64>::zeros(dim, dim);
    for &k in &kept {
        let col = u.column(k);
        projector += col * col.transpose();
    }
    let peig = projector.symmetric_eigen();
    let comp_cols: Vec<usize> = (0..dim).filter(|&i| peig.eigenvalues[i] < 0.5).collect();
    let mut comp = DMatrix::<f64>::zeros(dim, comp_cols.len());
    for (out_c, &in_c) in comp_cols.iter().enumerate() {
        comp.set_column(out_c, &peig.eigenvectors.column(in_c));
    }
    let restricted = comp.transpose() * &matrix.mat * &comp;
    let min_restricted_eig = if comp_cols.is_empty() {
        0.0
    } else {
        restricted.symmetric_eigen().eigenvalues.min()
    };

    SpectrumReport {
        n: matrix.n,
        tau: matrix.tau,
        min_eig,
        max_eig,
        min_restricted_eig,
        null_rank,
        blocks: block_summary(matrix),
    }
}

fn block_summary(matrix: &MomentMatrix4) -> BlockSummary {
    let n = matrix.n;
    let dim = matrix.index_masks.len();
    let m00 = matrix.mat[(0, 0)];
    let m11 = matrix.mat.view((1, 1), (n, n)).into_owned();
    let m11_eig = m11.symmetric_eigen().eigenvalues;
    let pairs = dim - 1 - n;
    let m22 = matrix.mat.view((1 + n, 1 + n), (pairs, pairs)).into_owned();
    let m22_eig = m22.symmetric_eigen().eigenvalues;
    let mut odd_max_abs = 0.0f64;
    for (r, &mi) in matrix.index_masks.iter().enumerate() {
        for (c, &mj) in matrix.index_masks.iter().enumerate() {
            if (mi.count_ones() + mj.count_ones()) % 2 == 1 {
                odd_max_abs = odd_max_abs.max(matrix.mat[(r, c)].abs());
            }
        }
    }
    BlockSummary {
        m00,
        m11_min_eig: m11_eig.min(),
        m11_max_eig: m11_eig.max(),
        m22_min_eig: m22_eig.min(),
        m22_max_eig: m22_eig.max(),
        odd_max_abs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowdeg::AlphaGraph;
    use crate::seeding::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};

    fn random_mats(n: usize, m: usize, seed: u64) -> Vec<DMatrix<f64>> {
        let mut rng = rng_from_seed(seed);
        (0..m)
            .map(|_| DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng)))
            .collect()
    }

    #[test]
    fn tau_zero_matrix_is_scaled_identity_blocks() {
        let n = 6usize;
        let mats = random_mats(n, 4, 3);
        let (matrix, pe) = build_moment_matrix(n, 0, &mats).unwrap();
        assert_eq!(pe.normalization(), 1.0);
        assert_eq!(matrix.mat[(0, 0)], 1.0);
        for r in 0..matrix.index_masks.len() {
            for c in 0..matrix.index_masks.len() {
                let expected = if r != c {
                    0.0
                } else {
                    match matrix.index_masks[r].count_ones() {
                        0 => 1.0,
                        1 => 1.0 / n as f64,
                        _ => 1.0 / (n * n) as f64,
                    }
                };
                assert_eq!(matrix.mat[(r, c)], expected, "entry ({r},{c})");
            }
        }
        // Spectrum of the block-diagonal scaled identities: min = 1/n^2.
        let report = spectrum_report(&matrix, &build_constraint_operator(n, &mats).unwrap());
        assert!((report.min_eig - 1.0 / (n * n) as f64).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_symmetric_with_zero_odd_blocks() {
        let n = 5usize;
        let mats = random_mats(n, 3, 8);
        let (matrix, _) = build_moment_matrix(n, 4, &mats).unwrap();
        for r in 0..matrix.mat.nrows() {
            for c in 0..matrix.mat.ncols() {
                assert_eq!(matrix.mat[(r, c)], matrix.mat[(c, r)]);
            }
        }
        assert_eq!(block_summary(&matrix).odd_max_abs, 0.0);
    }

    #[test]
    fn constraint_row_at_tau_zero_is_scaled_trace() {
        let n = 5usize;
        let mats = random_mats(n, 3, 11);
        let q = build_constraint_operator(n, &mats).unwrap();
        let pe = build_pseudo_expectation(n, 0, &mats).unwrap();
        let res = q.apply(&pe);
        for (r, &(i_mask, s)) in q.rows.iter().enumerate() {
            if i_mask == 0 {
                let trace: f64 = (0..n).map(|i| mats[s][(i, i)]).sum();
                assert!((res[r] - trace / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constraint_operator_is_linear() {
        let n = 4usize;
        let mats = random_mats(n, 2, 21);
        let q = build_constraint_operator(n, &mats).unwrap();
        let pe1 = build_pseudo_expectation(n, 2, &mats).unwrap();
        let pe2 = build_pseudo_expectation(n, 4, &mats).unwrap();
        let combo = PseudoExpectationVector {
            n,
            tau: 4,
            basis: pe1.basis.clone(),
            values: 2.0 * &pe1.values - 0.5 * &pe2.values,
        };
        let lhs = q.apply(&combo);
        let rhs = 2.0 * q.apply(&pe1) - 0.5 * q.apply(&pe2);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn repair_zeroes_residual_and_is_idempotent() {
        // m small enough that Q has more columns than rows: the projection
        // has a genuine null space to land in.
        let n = 8usize;
        let mats = random_mats(n, 3, 5);
        let pe = build_pseudo_expectation(n, 4, &mats).unwrap();
        let q = build_constraint_operator(n, &mats).unwrap();
        let (fixed, info) = repair_constraints(&pe, &q, DEFAULT_SVD_CUTOFF);
        assert!(info.residual_before > 0.0);
        assert!(
            info.residual_after
                <= 1e-8 * info.q_norm * pe.values.norm().max(f64::MIN_POSITIVE),
            "after {}",
            info.residual_after
        );
        assert!(info.null_dim > 0, "test must run in the non-degenerate regime");
        assert!(fixed.values.norm() > 0.1 * pe.values.norm());
        // Projection idempotence to machine precision.
        let (fixed2, info2) = repair_constraints(&fixed, &q, DEFAULT_SVD_CUTOFF);
        assert!((&fixed2.values - &fixed.values).norm() <= 1e-12 * pe.values.norm());
        assert!(info2.correction_norm <= 1e-10 * pe.values.norm());
        // Correction magnitude obeys the operator-norm bound.
        assert!(
            info.correction_norm
                <= (1.0 / info.qqt_gap) * info.q_norm * info.residual_before + 1e-12
        );
    }

    #[test]
    fn repaired_matrix_annihilates_constraint_directions() {
        let n = 7usize;
        let mats = random_mats(n, 2, 17);
        let pe = build_pseudo_expectation(n, 4, &mats).unwrap();
        let q = build_constraint_operator(n, &mats).unwrap();
        let (fixed, _) = repair_constraints(&pe, &q, DEFAULT_SVD_CUTOFF);
        let matrix = moment_matrix_from_pe(&fixed);
        for s in 0..q.m {
            let mut ell = DVector::<f64>::zeros(matrix.index_masks.len());
            for (r, &(i_mask, s2)) in q.rows.iter().enumerate() {
                if i_mask != 0 || s2 != s {
                    continue;
                }
                for (col_pos, &col_mask) in q.basis.masks.iter().enumerate() {
                    if col_mask.count_ones() <= 2 {
                        let p = matrix
                            .index_masks
                            .iter()
                            .position(|&v| v == col_mask)
                            .unwrap();
                        ell[p] = q.q[(r, col_pos)];
                    }
                }
            }
            let image = &matrix.mat * &ell;
            assert!(
                image.norm() <= 1e-9 * matrix.mat.norm() * ell.norm(),
                "label {s}: residual {}",
                image.norm()
            );
        }
    }

    #[test]
    fn assembled_entries_match_direct_lambda_sum() {
        // Cross-check M(I, J) against the direct sum of
        // lambda_coeff(α, I, J) h_α(G) over raw indices with |α| <= 2.
        let n = 3usize;
        let m = 2usize;
        let mats = random_mats(n, m, 33);
        let (matrix, _) = build_moment_matrix(n, 2, &mats).unwrap();

        let slots: Vec<(usize, usize, usize)> = (0..m)
            .flat_map(|s| (0..n * n).map(move |f| (s, f / n, f % n)))
            .collect();
        let sets: Vec<(u64, Vec<usize>)> = vec![
            (0b000, vec![]),
            (0b011, vec![0, 1]),
            (0b101, vec![0, 2]),
            (0b110, vec![1, 2]),
        ];
        for (mi, i_set) in &sets {
            for (mj, j_set) in &sets {
                let mut direct = lambda_coeff(&AlphaGraph::empty(n, m, 2), i_set, j_set, n);
                for (a_pos, &(s1, i1, j1)) in slots.iter().enumerate() {
                    let alpha = AlphaGraph::from_edges(n, m, 2, &[(s1, &[i1, j1], 2)]).unwrap();
                    direct += lambda_coeff(&alpha, i_set, j_set, n)
                        * crate::hermite::hermite_eval(2, mats[s1][(i1, j1)]);
                    for &(s2, i2, j2) in slots.iter().skip(a_pos + 1) {
                        let alpha = AlphaGraph::from_edges(
                            n,
                            m,
                            2,
                            &[(s1, &[i1, j1], 1), (s2, &[i2, j2], 1)],
                        )
                        .unwrap();
                        let lam = lambda_coeff(&alpha, i_set, j_set, n);
                        if lam != 0.0 {
                            direct += lam * mats[s1][(i1, j1)] * mats[s2][(i2, j2)];
                        }
                    }
                }
                let r = matrix.index_masks.iter().position(|&v| v == *mi).unwrap();
                let c = matrix.index_masks.iter().position(|&v| v == *mj).unwrap();
                let got = matrix.mat[(r, c)];
                assert!(
                    (got - direct).abs() < 1e-9 * (1.0 + direct.abs()),
                    "I={i_set:?} J={j_set:?}: matrix {got} vs direct {direct}"
                );
            }
        }
    }
}
