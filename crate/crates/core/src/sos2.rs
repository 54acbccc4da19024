//! Degree-2 SoS feasibility: `X ⪰ 0, tr(G_i X) = b_i`.
//!
//! Feasibility is decided by alternating projections with explicit
//! certificates on both sides:
//!
//! * primal: project between the PSD cone (eigenvalue clipping) and the
//!   affine subspace `{tr(G_i X) = b_i}` (least-norm correction through the
//!   Gram matrix of the constraint matrices);
//! * dual: search `span{G_i}` for a positive definite combination
//!   `M = Σ c_i G_i` with `Σ c_i b_i < 0`, which contradicts any PSD
//!   solution by weak duality. Both sign orientations are tried since a PD
//!   direction alone carries no control over the sign of `Σ c_i b_i`.
//!
//! `Inconclusive` is a first-class verdict; the sweep reports its rate.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{sample_null_gaussian, PolynomialSystem};
use crate::error::CoreError;
use crate::seeding::{derive_seed, trial_rng};

#[derive(Clone, Debug)]
pub struct Sdp2Instance {
    pub n: usize,
    pub m: usize,
    /// Symmetrized constraint matrices; `tr(G X)` is unchanged for
    /// symmetric `X`.
    pub mats: Vec<DMatrix<f64>>,
    pub rhs: Vec<f64>,
}

impl Sdp2Instance {
    /// Builds from a degree-2 system, symmetrizing each tensor.
    pub fn from_system(system: &PolynomialSystem<f64>) -> Result<Self, CoreError> {
        if system.degree != 2 {
            return Err(CoreError::invalid("degree-2 SoS needs D = 2"));
        }
        let n = system.n;
        let mats = system
            .tensors
            .iter()
            .map(|t| {
                let g = DMatrix::from_row_slice(n, n, t.entries());
                (&g + g.transpose()) * 0.5
            })
            .collect();
        Ok(Sdp2Instance {
            n,
            m: system.m,
            mats,
            rhs: system.rhs.clone(),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Sdp2Verdict {
    /// PSD matrix meeting every affine constraint within tolerance.
    Feasible(DMatrix<f64>),
    /// Coefficients `c` with `Σ c_i G_i ⪰ ε Id` and `Σ c_i b_i < 0`.
    Infeasible(Vec<f64>),
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct Sdp2Outcome {
    pub verdict: Sdp2Verdict,
    pub iterations: usize,
    /// Affine residual of the primal candidate at exit.
    pub primal_residual: f64,
    /// Most negative eigenvalue of the primal candidate at exit.
    pub primal_min_eig: f64,
    pub gram_regularized: bool,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PocsParams {
    pub budget: usize,
    pub tol_psd_rel: f64,
    pub tol_aff_rel: f64,
    /// PD slack required of a dual certificate (at unit Frobenius norm).
    pub eps_pd: f64,
}

impl Default for PocsParams {
    fn default() -> Self {
        PocsParams {
            budget: 5000,
            tol_psd_rel: 1e-7,
            tol_aff_rel: 1e-7,
            eps_pd: 1e-6,
        }
    }
}

struct GramSolver {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    regularized: bool,
}

impl GramSolver {
    fn new(mats: &[DMatrix<f64>]) -> Self {
        let m = mats.len();
        let mut gram = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = mats[i].dot(&mats[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        match nalgebra::Cholesky::new(gram.clone()) {
            Some(chol) => GramSolver {
                chol,
                regularized: false,
            },
            None => {
                // Measure-zero degeneracy; ridge keeps the projection usable.
                let ridge = 1e-10 * gram.trace().max(1.0);
                for i in 0..m {
                    gram[(i, i)] += ridge;
                }
                GramSolver {
                    chol: nalgebra::Cholesky::new(gram).expect("ridge-regularized Gram"),
                    regularized: true,
                }
            }
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    /// Least-norm `c` with `Σ c_i G_i` closest to the matrix whose inner
    /// products with the `G_i` are `v`, subject to `Σ c_i b_i = -1`.
    fn project_slice(&self, inst: &Sdp2Instance, v: &DVector<f64>) -> DVector<f64> {
        let base = self.solve(v);
        let b = DVector::from_column_slice(&inst.rhs);
        let ginv_b = self.solve(&b);
        let denom = b.dot(&ginv_b);
        if denom.abs() < f64::MIN_POSITIVE {
            return base;
        }
        let lambda = (-1.0 - b.dot(&base)) / denom;
        base + ginv_b * lambda
    }
}

fn add_scaled(x: &mut DMatrix<f64>, s: f64, g: &DMatrix<f64>) {
    for (xv, gv) in x.iter_mut().zip(g.iter()) {
        *xv += s * gv;
    }
}

fn residuals(inst: &Sdp2Instance, x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(
        inst.m,
        inst.mats.iter().zip(&inst.rhs).map(|(g, b)| b - g.dot(x)),
    )
}

/// Projection onto the affine subspace: `X + Σ c_i G_i` with Gram-solved
/// least-norm correction.
fn project_affine(inst: &Sdp2Instance, gram: &GramSolver, x: &mut DMatrix<f64>) {
    let c = gram.solve(&residuals(inst, x));
    for (ci, g) in c.iter().zip(&inst.mats) {
        add_scaled(x, *ci, g);
    }
}

/// Eigenvalue clipping at `floor`.
fn project_psd(x: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let sym = (x + x.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let clipped = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&v| v.max(floor)),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
}

fn min_eigenvalue(x: &DMatrix<f64>) -> f64 {
    let sym = (x + x.transpose()) * 0.5;
    sym.symmetric_eigen().eigenvalues.min()
}

/// Primal phase: alternating projections from the least-norm affine point.
/// Resumable across budget chunks.
struct PrimalState {
    x: DMatrix<f64>,
    rhs_norm: f64,
    last_residual: f64,
    last_min_eig: f64,
}

impl PrimalState {
    fn new(inst: &Sdp2Instance, gram: &GramSolver) -> Self {
        let mut x = DMatrix::<f64>::zeros(inst.n, inst.n);
        project_affine(inst, gram, &mut x);
        PrimalState {
            x,
            rhs_norm: inst.rhs.iter().map(|b| b * b).sum::<f64>().sqrt(),
            last_residual: f64::INFINITY,
            last_min_eig: f64::NEG_INFINITY,
        }
    }

    fn run(
        &mut self,
        inst: &Sdp2Instance,
        gram: &GramSolver,
        params: &PocsParams,
        budget: usize,
    ) -> (Option<DMatrix<f64>>, usize) {
        for iter in 0..budget {
            self.x = project_psd(&self.x, 0.0);
            project_affine(inst, gram, &mut self.x);

            let min_eig = min_eigenvalue(&self.x);
            let x_norm = self.x.norm();
            self.last_residual = residuals(inst, &self.x).norm();
            self.last_min_eig = min_eig;
            if min_eig >= -params.tol_psd_rel * x_norm.max(1.0)
                && self.last_residual <= params.tol_aff_rel * self.rhs_norm.max(1.0)
            {
                return (Some(self.x.clone()), iter + 1);
            }
        }
        (None, budget)
    }
}

/// Dual phase, unconstrained orientation: alternating projections between
/// `{M ⪰ ε Id}` and `span{G_i}`, renormalized each sweep. Returns the span
/// coefficients on success; the sign of `Σ c_i b_i` is not controlled.
fn dual_search(
    inst: &Sdp2Instance,
    gram: &GramSolver,
    params: &PocsParams,
    budget: usize,
    flip: bool,
) -> (Option<Vec<f64>>, usize) {
    let n = inst.n;
    // Start from the span projection of ±Id.
    let seed_mat = DMatrix::<f64>::identity(n, n) * if flip { -1.0 } else { 1.0 };
    let mut coeff = gram.solve(&DVector::from_iterator(
        inst.m,
        inst.mats.iter().map(|g| g.dot(&seed_mat)),
    ));

    for iter in 0..budget {
        let mut m_mat = DMatrix::<f64>::zeros(n, n);
        for (ci, g) in coeff.iter().zip(&inst.mats) {
            add_scaled(&mut m_mat, *ci, g);
        }
        let norm = m_mat.norm();
        if norm > 0.0 {
            m_mat /= norm;
        }
        let min_eig = min_eigenvalue(&m_mat);
        if min_eig >= params.eps_pd {
            let scaled: Vec<f64> = coeff.iter().map(|c| c / norm).collect();
            return (Some(scaled), iter + 1);
        }
        // Push into the PD cone, then back into the span.
        let cone = project_psd(&m_mat, 2.0 * params.eps_pd);
        coeff = gram.solve(&DVector::from_iterator(
            inst.m,
            inst.mats.iter().map(|g| g.dot(&cone)),
        ));
    }
    (None, budget)
}

/// Dual phase, sign-constrained: alternating projections between
/// `{M ⪰ ε Id}` and the affine slice `{Σ c_i G_i : Σ c_i b_i = -1}`, which
/// hardwires the certificate sign. Resumable across budget chunks.
struct SliceDualState {
    coeff: DVector<f64>,
}

impl SliceDualState {
    fn new(inst: &Sdp2Instance, gram: &GramSolver) -> Self {
        let seed = DMatrix::<f64>::identity(inst.n, inst.n);
        let coeff = gram.project_slice(
            inst,
            &DVector::from_iterator(inst.m, inst.mats.iter().map(|g| g.dot(&seed))),
        );
        SliceDualState { coeff }
    }

    fn run(
        &mut self,
        inst: &Sdp2Instance,
        gram: &GramSolver,
        params: &PocsParams,
        budget: usize,
    ) -> (Option<Vec<f64>>, usize) {
        for iter in 0..budget {
            let mut m_mat = DMatrix::<f64>::zeros(inst.n, inst.n);
            for (ci, g) in self.coeff.iter().zip(&inst.mats) {
                add_scaled(&mut m_mat, *ci, g);
            }
            let norm = m_mat.norm().max(f64::MIN_POSITIVE);
            if min_eigenvalue(&m_mat) >= params.eps_pd * norm {
                return (Some(self.coeff.iter().copied().collect()), iter + 1);
            }
            let cone = project_psd(&m_mat, 2.0 * params.eps_pd * norm);
            self.coeff = gram.project_slice(
                inst,
                &DVector::from_iterator(inst.m, inst.mats.iter().map(|g| g.dot(&cone))),
            );
        }
        (None, budget)
    }
}

fn b_inner(inst: &Sdp2Instance, c: &[f64]) -> f64 {
    c.iter().zip(&inst.rhs).map(|(ci, bi)| ci * bi).sum()
}

/// Decides feasibility with certificates; `Inconclusive` at budget
/// exhaustion. The dual search runs both orientations because a PD
/// direction found in the span fixes `Σ c_i b_i` only up to sign.
pub fn decide_feasibility(inst: &Sdp2Instance, params: &PocsParams) -> Sdp2Outcome {
    if inst.m == 0 {
        return Sdp2Outcome {
            verdict: Sdp2Verdict::Feasible(DMatrix::zeros(inst.n, inst.n)),
            iterations: 0,
            primal_residual: 0.0,
            primal_min_eig: 0.0,
            gram_regularized: false,
        };
    }
    let gram = GramSolver::new(&inst.mats);
    let mut iterations = 0usize;

    // Cheap unconstrained dual pass first, both orientations: a PD
    // direction whose sign test passes ends the run in a handful of sweeps
    // deep in the infeasible regime. A wrong-sign PD direction triggers the
    // retry from the negated start.
    for flip in [false, true] {
        let (cand, used) = dual_search(inst, &gram, params, 50, flip);
        iterations += used;
        if let Some(c) = cand {
            if b_inner(inst, &c) < 0.0 {
                return Sdp2Outcome {
                    verdict: Sdp2Verdict::Infeasible(c),
                    iterations,
                    primal_residual: f64::NAN,
                    primal_min_eig: f64::NAN,
                    gram_regularized: gram.regularized,
                };
            }
        }
    }

    // Interleave the primal search with the sign-constrained dual search in
    // budget chunks so neither side starves near the threshold.
    let mut primal = PrimalState::new(inst, &gram);
    let mut dual = SliceDualState::new(inst, &gram);
    let chunk = 250usize;
    let mut spent = 0usize;
    while spent < params.budget {
        let step = chunk.min(params.budget - spent);

        let (cand, used) = dual.run(inst, &gram, params, step / 2);
        iterations += used;
        if let Some(c) = cand {
            if b_inner(inst, &c) < 0.0 {
                return Sdp2Outcome {
                    verdict: Sdp2Verdict::Infeasible(c),
                    iterations,
                    primal_residual: primal.last_residual,
                    primal_min_eig: primal.last_min_eig,
                    gram_regularized: gram.regularized,
                };
            }
        }

        let (found, used) = primal.run(inst, &gram, params, step);
        iterations += used;
        if let Some(x) = found {
            return Sdp2Outcome {
                verdict: Sdp2Verdict::Feasible(x),
                iterations,
                primal_residual: primal.last_residual,
                primal_min_eig: primal.last_min_eig,
                gram_regularized: gram.regularized,
            };
        }
        spent += step;
    }

    Sdp2Outcome {
        verdict: Sdp2Verdict::Inconclusive,
        iterations,
        primal_residual: primal.last_residual,
        primal_min_eig: primal.last_min_eig,
        gram_regularized: gram.regularized,
    }
}

/// Recomputes the certificate invariants with a fresh eigendecomposition.
pub fn verify_outcome(inst: &Sdp2Instance, outcome: &Sdp2Outcome, params: &PocsParams) -> bool {
    match &outcome.verdict {
        Sdp2Verdict::Feasible(x) => {
            let rhs_norm = inst.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
            let aff_ok = residuals(inst, x)
                .iter()
                .all(|r| r.abs() <= params.tol_aff_rel * rhs_norm.max(1.0));
            let psd_ok = min_eigenvalue(x) >= -params.tol_psd_rel * x.norm().max(1.0);
            aff_ok && psd_ok
        }
        Sdp2Verdict::Infeasible(c) => {
            if c.len() != inst.m {
                return false;
            }
            let mut m_mat = DMatrix::<f64>::zeros(inst.n, inst.n);
            for (ci, g) in c.iter().zip(&inst.mats) {
                add_scaled(&mut m_mat, *ci, g);
            }
            let norm = m_mat.norm();
            if norm == 0.0 {
                return false;
            }
            min_eigenvalue(&m_mat) >= params.eps_pd * norm && b_inner(inst, c) < 0.0
        }
        Sdp2Verdict::Inconclusive => false,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseSweepRow {
    pub m: usize,
    pub feasible: usize,
    pub infeasible: usize,
    pub inconclusive: usize,
    pub mean_iters: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseSweepTable {
    pub n: usize,
    pub trials: usize,
    pub rows: Vec<PhaseSweepRow>,
    /// First grid point where verified infeasible outnumber verified
    /// feasible verdicts.
    pub crossover_m: Option<usize>,
}

/// Runs `trials` seeded Gaussian instances per grid point, tallying only
/// verified verdicts.
pub fn phase_sweep(
    n: usize,
    m_grid: &[usize],
    trials: usize,
    seed: u64,
    params: &PocsParams,
) -> Result<PhaseSweepTable, CoreError> {
    if m_grid.is_empty() {
        return Err(CoreError::invalid("empty m grid"));
    }
    let mut rows = Vec::with_capacity(m_grid.len());
    for (gi, &m) in m_grid.iter().enumerate() {
        let results: Vec<(u8, usize)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(derive_seed(seed, gi as u64), t as u64);
                let system = sample_null_gaussian(n, m, 2, &mut rng).expect("params checked");
                let inst = Sdp2Instance::from_system(&system).expect("degree 2");
                let outcome = decide_feasibility(&inst, params);
                let tag = if !verify_outcome(&inst, &outcome, params) {
                    2u8
                } else {
                    match &outcome.verdict {
                        Sdp2Verdict::Feasible(_) => 0u8,
                        Sdp2Verdict::Infeasible(_) => 1u8,
                        Sdp2Verdict::Inconclusive => 2u8,
                    }
                };
                (tag, outcome.iterations)
            })
            .collect();
        let feasible = results.iter().filter(|(t, _)| *t == 0).count();
        let infeasible = results.iter().filter(|(t, _)| *t == 1).count();
        let inconclusive = trials - feasible - infeasible;
        let mean_iters =
            results.iter().map(|(_, it)| *it as f64).sum::<f64>() / trials.max(1) as f64;
        rows.push(PhaseSweepRow {
            m,
            feasible,
            infeasible,
            inconclusive,
            mean_iters,
        });
    }
    let crossover_m = rows
        .iter()
        .find(|r| r.infeasible > r.feasible)
        .map(|r| r.m);
    Ok(PhaseSweepTable {
        n,
        trials,
        rows,
        crossover_m,
    })
}

/// Renders the sweep as the CSV the CLI emits.
pub fn sweep_to_csv(table: &PhaseSweepTable) -> String {
    let mut out = String::from("m,feasible,infeasible,inconclusive,mean_iters\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{:.2}\n",
            r.m, r.feasible, r.infeasible, r.inconclusive, r.mean_iters
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Provenance;
    use crate::tensor::CoefficientTensor;

    fn scalar_instance(g: f64, b: f64) -> Sdp2Instance {
        let mut t = CoefficientTensor::<f64>::zeros(2, 1).unwrap();
        t.set(&[0, 0], g);
        let sys = PolynomialSystem::new(1, 2, vec![t], vec![b], Provenance::Custom).unwrap();
        Sdp2Instance::from_system(&sys).unwrap()
    }

    #[test]
    fn scalar_feasible_case() {
        // g X = b with b/g >= 0 is feasible: X = b/g >= 0.
        let inst = scalar_instance(2.0, 6.0);
        let params = PocsParams::default();
        let out = decide_feasibility(&inst, &params);
        assert!(matches!(out.verdict, Sdp2Verdict::Feasible(_)));
        assert!(verify_outcome(&inst, &out, &params));
        if let Sdp2Verdict::Feasible(x) = &out.verdict {
            assert!((x[(0, 0)] - 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn scalar_infeasible_case() {
        // b/g < 0: c = -sign(b)sign(g) certifies.
        let inst = scalar_instance(2.0, -6.0);
        let params = PocsParams::default();
        let out = decide_feasibility(&inst, &params);
        assert!(matches!(out.verdict, Sdp2Verdict::Infeasible(_)));
        assert!(verify_outcome(&inst, &out, &params));
    }

    #[test]
    fn empty_constraint_set_feasible_at_zero() {
        let inst = Sdp2Instance {
            n: 3,
            m: 0,
            mats: vec![],
            rhs: vec![],
        };
        let params = PocsParams::default();
        let out = decide_feasibility(&inst, &params);
        assert!(matches!(out.verdict, Sdp2Verdict::Feasible(_)));
    }

    #[test]
    fn verifier_rejects_tampered_certificates() {
        let params = PocsParams::default();
        let inst = scalar_instance(2.0, -6.0);
        let out = decide_feasibility(&inst, &params);
        let Sdp2Verdict::Infeasible(c) = &out.verdict else {
            panic!();
        };
        // Flipping the sign makes Σ c_i b_i positive.
        let flipped = Sdp2Outcome {
            verdict: Sdp2Verdict::Infeasible(c.iter().map(|v| -v).collect()),
            ..out.clone()
        };
        assert!(!verify_outcome(&inst, &flipped, &params));

        let feasible_inst = scalar_instance(2.0, 6.0);
        let out = decide_feasibility(&feasible_inst, &params);
        let Sdp2Verdict::Feasible(x) = &out.verdict else {
            panic!();
        };
        // An affine residual ten times the tolerance must be rejected.
        let off = x + DMatrix::from_element(1, 1, 10.0 * params.tol_aff_rel * 6.0 / 2.0);
        let shifted = Sdp2Outcome {
            verdict: Sdp2Verdict::Feasible(off),
            ..out.clone()
        };
        assert!(!verify_outcome(&feasible_inst, &shifted, &params));
    }

    #[test]
    fn mutual_exclusion_on_random_instances() {
        // Weak duality: tr((Σ c G) X) = Σ c b, nonnegative for PSD X and
        // PD combinations, so both certificates can never verify at once.
        let params = PocsParams::default();
        for seed in 0..6u64 {
            let mut rng = trial_rng(7777, seed);
            let system = sample_null_gaussian(8, 20 + 4 * seed as usize, 2, &mut rng).unwrap();
            let inst = Sdp2Instance::from_system(&system).unwrap();
            let out = decide_feasibility(&inst, &params);
            if !matches!(out.verdict, Sdp2Verdict::Feasible(_)) {
                continue;
            }
            let gram = GramSolver::new(&inst.mats);
            for flip in [false, true] {
                if let (Some(c), _) = dual_search(&inst, &gram, &params, 500, flip) {
                    let dual = Sdp2Outcome {
                        verdict: Sdp2Verdict::Infeasible(c),
                        ..out.clone()
                    };
                    assert!(
                        !(verify_outcome(&inst, &out, &params)
                            && verify_outcome(&inst, &dual, &params)),
                        "both certificates verified on seed {seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn deterministic_sweep_replay() {
        let params = PocsParams {
            budget: 400,
            ..Default::default()
        };
        let a = phase_sweep(6, &[4, 12], 6, 42, &params).unwrap();
        let b = phase_sweep(6, &[4, 12], 6, 42, &params).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.feasible, rb.feasible);
            assert_eq!(ra.infeasible, rb.infeasible);
            assert_eq!(ra.inconclusive, rb.inconclusive);
        }
    }
}
