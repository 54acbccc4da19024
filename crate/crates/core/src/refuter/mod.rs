//! Exact Nullstellensatz refutations of random polynomial systems.
//!
//! For a system `{g_i(x) = b_i}` with some `b_{i*} ≠ 0`, the identity
//! `(g_{i*} - b_{i*}) q = p^{d/D} - 1` with `p = g_{i*}/b_{i*}` and
//! `q = (1/b_{i*}) Σ_{k<d/D} p^k` turns membership of `-p^{d/D}` in the
//! degree-`d` generated ideal into the refutation
//! `-1 = Σ_i a_i (g_i - b_i)`. Membership itself is one exact linear solve
//! against the linearization matrix; when that matrix has full row rank the
//! solve succeeds for every homogeneous degree-`d` target.
//!
//! Certificates are verified by exact polynomial arithmetic with all
//! denominators cleared, so a `true` verdict is a polynomial identity, not a
//! tolerance check.

pub mod covering;
pub mod linearize;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::distributions::PolynomialSystem;
use crate::error::CoreError;
use crate::exact::bareiss::bareiss_solve;
use crate::exact::dixon::{LiftingSolver, PrepareOutcome};
use crate::multiset::MultisetIndex;
use crate::poly::Polynomial;
use crate::{Rat, RatPoly};

pub use covering::{build_covering, covering_count_bound, required_m, CoveringPlan};
pub use linearize::{
    build_linearization, check_full_row_rank, decomposition_blocks, LinearizationMatrix,
};

/// Multipliers `a_1..a_m` with `deg(a_i) <= d - D` witnessing
/// `-1 = Σ a_i (g_i - b_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefutationCertificate {
    pub proof_degree: u32,
    pub multipliers: Vec<Polynomial<Rat>>,
}

impl RefutationCertificate {
    /// JSON form `{d, a: [polynomial...]}` with rationals as `"p/q"`.
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.proof_degree,
            "a": self.multipliers.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CoreError> {
        let bad = |msg: &str| CoreError::Malformed(format!("certificate JSON: {msg}"));
        let proof_degree = v["d"].as_u64().ok_or_else(|| bad("d"))? as u32;
        let raw = v["a"].as_array().ok_or_else(|| bad("a"))?;
        let multipliers = raw
            .iter()
            .map(Polynomial::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RefutationCertificate {
            proof_degree,
            multipliers,
        })
    }
}

#[derive(Debug)]
pub enum RefuteOutcome {
    Refuted(RefutationCertificate),
    /// The membership solve failed: the linearization matrix is not full
    /// row rank (m below the completeness threshold or a measure-zero
    /// degeneracy).
    NotFound,
    /// Every `b_i = 0`; the system is satisfied by `x = 0`, no refutation
    /// exists.
    AllRhsZero,
}

/// Reusable ideal-membership solver for a fixed system and proof degree.
/// Holds the linearization and its factorization so multiple targets can be
/// expressed without re-eliminating.
pub struct IdealSolver {
    lin: LinearizationMatrix,
    solver: Option<LiftingSolver>,
}

impl IdealSolver {
    pub fn new(system: &PolynomialSystem<Rat>, proof_degree: u32) -> Result<Self, CoreError> {
        let lin = build_linearization(system, proof_degree)?;
        let solver = match LiftingSolver::prepare(&lin.matrix) {
            PrepareOutcome::Ready(s) => Some(s),
            PrepareOutcome::RankDeficient => None,
        };
        Ok(IdealSolver { lin, solver })
    }

    pub fn linearization(&self) -> &LinearizationMatrix {
        &self.lin
    }

    /// Expresses a homogeneous degree-`d` polynomial as
    /// `f = Σ a_i (g_i - b_i)` with homogeneous degree-`(d-D)` multipliers,
    /// or `None` when the membership system is unsolvable.
    pub fn express_in_ideal(&self, f: &RatPoly) -> Result<Option<Vec<Polynomial<Rat>>>, CoreError> {
        if f.num_vars() != self.lin.n {
            return Err(CoreError::NumVarsMismatch {
                left: self.lin.n,
                right: f.num_vars(),
            });
        }
        if f.degree() != self.lin.proof_degree {
            return Err(CoreError::DegreeMismatch {
                left: self.lin.proof_degree,
                right: f.degree(),
            });
        }
        let rhs: Vec<Rat> = self
            .lin
            .rows_top
            .iter()
            .map(|alpha| f.coeff(alpha))
            .chain(self.lin.rows_bottom.iter().map(|_| Rat::zero()))
            .collect();

        let solution = match &self.solver {
            Some(s) => match s.solve(&rhs) {
                Some(x) => Some(x),
                // Reconstruction hiccup: settle exactly.
                None => bareiss_solve(&self.lin.matrix, &rhs),
            },
            // Rank deficient under every tested prime: for all but
            // astronomically unlikely prime choices the matrix is exactly
            // rank deficient and membership fails; small systems get the
            // unconditional answer.
            None => {
                if self.lin.rows() * self.lin.cols() <= 128 * 128 {
                    bareiss_solve(&self.lin.matrix, &rhs)
                } else {
                    None
                }
            }
        };
        let Some(solution) = solution else {
            return Ok(None);
        };

        let num_betas = self.lin.betas.len();
        let layer_degree = self.lin.proof_degree - self.lin.block_degree;
        let mut multipliers = Vec::with_capacity(self.lin.m);
        for eq in 0..self.lin.m {
            let terms = self
                .lin
                .betas
                .iter()
                .enumerate()
                .map(|(pos, beta)| (beta.clone(), solution[eq * num_betas + pos].clone()));
            let h =
                crate::poly::HomogeneousPolynomial::from_terms(self.lin.n, layer_degree, terms)?;
            multipliers.push(Polynomial::from_homogeneous(h));
        }
        Ok(Some(multipliers))
    }
}

/// Finds and assembles a refutation certificate at proof degree `d`.
pub fn find_refutation(
    system: &PolynomialSystem<Rat>,
    proof_degree: u32,
) -> Result<RefuteOutcome, CoreError> {
    let Some(pivot_eq) = system.rhs.iter().position(|b| !b.is_zero()) else {
        return Ok(RefuteOutcome::AllRhsZero);
    };
    let solver = IdealSolver::new(system, proof_degree)?;

    let b_star = system.rhs[pivot_eq].clone();
    let g_star = system.tensors[pivot_eq].to_poly();
    let p = g_star.scale(&(Rat::one() / &b_star));
    let power = (proof_degree / system.degree) as usize;

    // p^0 .. p^{d/D}; the top power negated is the membership target, the
    // lower ones assemble q.
    let mut powers: Vec<RatPoly> = Vec::with_capacity(power + 1);
    powers.push(crate::poly::HomogeneousPolynomial::monomial(
        system.n,
        MultisetIndex::zero(system.n),
        Rat::one(),
    )?);
    for k in 1..=power {
        let next = powers[k - 1].mul(&p)?;
        powers.push(next);
    }

    let target = powers[power].neg();
    let Some(mut multipliers) = solver.express_in_ideal(&target)? else {
        return Ok(RefuteOutcome::NotFound);
    };

    // q = (1/b_star) Σ_{k < d/D} p^k, so (g_star - b_star) q = p^{d/D} - 1.
    let inv_b = Rat::one() / &b_star;
    let mut q = Polynomial::zero(system.n);
    for pk in powers.iter().take(power) {
        q.add_assign_homogeneous(&pk.scale(&inv_b))?;
    }
    multipliers[pivot_eq] = multipliers[pivot_eq].add(&q)?;

    Ok(RefuteOutcome::Refuted(RefutationCertificate {
        proof_degree,
        multipliers,
    }))
}

/// Why a certificate failed verification.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyFailure {
    WrongMultiplierCount { expected: usize, got: usize },
    /// `deg(a_i) + D` exceeds the certificate's proof degree.
    DegreeBound { equation: usize, degree: u32 },
    /// First monomial (in canonical order) where `Σ a_i (g_i - b_i) + 1`
    /// has a nonzero coefficient.
    NonzeroCoefficient { monomial: MultisetIndex },
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyFailure::WrongMultiplierCount { expected, got } => {
                write!(f, "certificate has {got} multipliers, system has {expected}")
            }
            VerifyFailure::DegreeBound { equation, degree } => {
                write!(f, "multiplier {equation} has degree {degree}, over the bound")
            }
            VerifyFailure::NonzeroCoefficient { monomial } => {
                write!(f, "identity residue at monomial {:?}", monomial.exponents())
            }
        }
    }
}

/// Exact check that `Σ a_i (g_i - b_i) + 1 = 0` identically and that every
/// multiplier obeys the degree accounting `deg(a_i) + D <= d`.
///
/// All arithmetic runs over the integers after clearing denominators: with
/// `L_a` the lcm of the multiplier denominators and `L_g` that of the
/// system's, the identity holds iff
/// `Σ (L_a a_i)·(L_g (g_i - b_i)) + L_a L_g = 0`.
pub fn verify_refutation(
    system: &PolynomialSystem<Rat>,
    cert: &RefutationCertificate,
) -> Result<(), VerifyFailure> {
    if cert.multipliers.len() != system.m {
        return Err(VerifyFailure::WrongMultiplierCount {
            expected: system.m,
            got: cert.multipliers.len(),
        });
    }
    for (eq, a) in cert.multipliers.iter().enumerate() {
        if let Some(deg) = a.total_degree() {
            if deg + system.degree > cert.proof_degree {
                return Err(VerifyFailure::DegreeBound {
                    equation: eq,
                    degree: deg,
                });
            }
        }
    }

    let mut l_mult = BigInt::one();
    for a in &cert.multipliers {
        for (_, layer) in a.layers() {
            for (_, c) in layer.terms() {
                l_mult = l_mult.lcm(c.denom());
            }
        }
    }
    let mut l_sys = BigInt::one();
    for t in &system.tensors {
        for e in t.entries() {
            if !e.is_zero() {
                l_sys = l_sys.lcm(e.denom());
            }
        }
    }
    for b in &system.rhs {
        if !b.is_zero() {
            l_sys = l_sys.lcm(b.denom());
        }
    }

    let scale_int = |c: &Rat, l: &BigInt| -> BigInt { c.numer() * (l / c.denom()) };

    let mut acc: BTreeMap<MultisetIndex, BigInt> = BTreeMap::new();
    let add = |acc: &mut BTreeMap<MultisetIndex, BigInt>, idx: MultisetIndex, v: BigInt| {
        if v.is_zero() {
            return;
        }
        *acc.entry(idx).or_insert_with(BigInt::zero) += v;
    };

    for (eq, a) in cert.multipliers.iter().enumerate() {
        let g = system.tensors[eq].to_poly();
        let g_terms: Vec<(MultisetIndex, BigInt)> = g
            .terms()
            .map(|(idx, c)| (idx.clone(), scale_int(c, &l_sys)))
            .collect();
        let b_scaled = scale_int(&system.rhs[eq], &l_sys);
        for (_, layer) in a.layers() {
            for (a_idx, a_c) in layer.terms() {
                let a_int = scale_int(a_c, &l_mult);
                for (g_idx, g_int) in &g_terms {
                    let idx = a_idx.add(g_idx).expect("same num_vars");
                    add(&mut acc, idx, &a_int * g_int);
                }
                if !b_scaled.is_zero() {
                    add(&mut acc, a_idx.clone(), -&a_int * &b_scaled);
                }
            }
        }
    }
    add(&mut acc, MultisetIndex::zero(system.n), &l_mult * &l_sys);

    for (idx, v) in acc {
        if !v.is_zero() {
            return Err(VerifyFailure::NonzeroCoefficient { monomial: idx });
        }
    }
    Ok(())
}
