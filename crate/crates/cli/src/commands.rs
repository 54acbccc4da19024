//! The experiment subcommands.
//!
//! Each runner takes its replayable config and returns results/summary JSON
//! plus the process exit code. Artifact files (certificates, CSV, reports)
//! are only written on live runs, never during replay.

use anyhow::{bail, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;

use polyrefute::distributions::{
    default_scaling, sample_null_gaussian, sample_null_rational, NiceRationalSpec,
};
use polyrefute::lowdeg::mc::{estimate_planted_moments, MomentQuery};
use polyrefute::lowdeg::{enumerate_valid_alphas, ldlr_norm_squared, planted_hermite_coeff};
use polyrefute::pseudocal;
use polyrefute::refuter::{self, RefuteOutcome};
use polyrefute::scalar::bit_complexity;
use polyrefute::seeding::rng_from_seed;
use polyrefute::sos2::{phase_sweep, sweep_to_csv, PocsParams};

pub struct CommandResult {
    pub results: Value,
    pub summary: Value,
    pub exit: i32,
}

fn ok(results: Value, summary: Value) -> CommandResult {
    CommandResult {
        results,
        summary,
        exit: 0,
    }
}

// ---------------------------------------------------------------------------
// refute

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct RefuteConfig {
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
    /// Equation degree.
    #[arg(long = "D", default_value_t = 2)]
    pub degree: u32,
    /// Proof degree (multiple of D).
    #[arg(long)]
    pub d: u32,
    /// Equation count, or "auto" for the covering budget.
    #[arg(long, default_value = "auto")]
    pub m: String,
    /// Bit bound of the nice rational coefficient distribution.
    #[arg(long = "coeff-bits", default_value_t = 32)]
    pub coeff_bits: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the certificate JSON here.
    #[arg(long = "emit-cert")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub emit_cert: Option<PathBuf>,
}

pub fn run_refute(config: &RefuteConfig, seed: u64, write_artifacts: bool) -> Result<CommandResult> {
    let m = match config.m.as_str() {
        "auto" => refuter::required_m(config.n, config.degree, config.d)?,
        other => other
            .parse::<usize>()
            .map_err(|_| anyhow::anyhow!("--m must be a number or \"auto\""))?,
    };
    if m < 1 {
        bail!("need m >= 1");
    }
    let spec = NiceRationalSpec::new(config.coeff_bits)?;
    let mut rng = rng_from_seed(seed);
    let system = sample_null_rational(config.n, m, config.degree, &spec, &mut rng)?;

    let outcome = refuter::find_refutation(&system, config.d)?;
    match outcome {
        RefuteOutcome::Refuted(cert) => {
            refuter::verify_refutation(&system, &cert)
                .map_err(|f| anyhow::anyhow!("emitted certificate failed verification: {f}"))?;
            let cert_json = cert.to_json();
            if write_artifacts {
                if let Some(path) = &config.emit_cert {
                    std::fs::write(path, serde_json::to_string_pretty(&cert_json)?)?;
                }
            }
            let max_bits = cert
                .multipliers
                .iter()
                .flat_map(|p| p.layers())
                .flat_map(|(_, layer)| layer.terms())
                .map(|(_, c)| bit_complexity(c))
                .max()
                .unwrap_or(0);
            println!("refuted: certificate verified (d = {}, m = {m})", config.d);
            Ok(ok(
                json!({"verdict": "refuted", "m": m, "certificate": cert_json}),
                json!({"verdict": "refuted", "m": m, "max_coeff_bits": max_bits}),
            ))
        }
        RefuteOutcome::NotFound => {
            println!("not found: linearization is not full row rank at m = {m}, d = {}", config.d);
            Ok(CommandResult {
                results: json!({"verdict": "not_found", "m": m}),
                summary: json!({"verdict": "not_found", "m": m}),
                exit: 2,
            })
        }
        RefuteOutcome::AllRhsZero => {
            println!("degenerate: all right-hand sides are zero; x = 0 satisfies the system");
            Ok(CommandResult {
                results: json!({"verdict": "all_rhs_zero", "m": m}),
                summary: json!({"verdict": "all_rhs_zero", "m": m}),
                exit: 3,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// phase2

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Phase2Config {
    #[arg(long)]
    pub n: usize,
    /// Grid as start:end:step (inclusive) or a comma list.
    #[arg(long = "m-grid")]
    pub m_grid: String,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Iteration budget per trial.
    #[arg(long, default_value_t = 5000)]
    pub budget: usize,
    /// CSV output path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<PathBuf>,
}

pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("grid must be start:end:step");
        }
        let (start, end, step): (usize, usize, usize) =
            (parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
        if step == 0 || end < start {
            bail!("grid must satisfy step > 0 and end >= start");
        }
        Ok((start..=end).step_by(step).collect())
    } else {
        text.split(',')
            .map(|v| v.trim().parse::<usize>().map_err(Into::into))
            .collect()
    }
}

pub fn run_phase2(config: &Phase2Config, seed: u64, write_artifacts: bool) -> Result<CommandResult> {
    let grid = parse_grid(&config.m_grid)?;
    if grid.is_empty() {
        bail!("empty m grid");
    }
    let params = PocsParams {
        budget: config.budget,
        ..Default::default()
    };
    let table = phase_sweep(config.n, &grid, config.trials, seed, &params)?;
    let csv = sweep_to_csv(&table);
    if write_artifacts {
        if let Some(path) = &config.out {
            std::fs::write(path, &csv)?;
        }
    }
    for row in &table.rows {
        println!(
            "m={:5}  feasible={:4} infeasible={:4} inconclusive={:4} mean_iters={:.1}",
            row.m, row.feasible, row.infeasible, row.inconclusive, row.mean_iters
        );
    }
    println!("crossover m: {:?}", table.crossover_m);
    Ok(ok(
        serde_json::to_value(&table)?,
        json!({"crossover_m": table.crossover_m, "grid_points": table.rows.len()}),
    ))
}

// ---------------------------------------------------------------------------
// ldlr and its Monte-Carlo oracle

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct LdlrConfig {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Truncation degree of the likelihood ratio.
    #[arg(long)]
    pub d: u32,
    /// Equation degree.
    #[arg(long = "D", default_value_t = 2)]
    pub degree: u32,
    /// Planted scaling; defaults to the configured small value.
    #[arg(long)]
    pub scaling: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report JSON path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<PathBuf>,
}

fn resolved_scaling(config: &LdlrConfig) -> f64 {
    config
        .scaling
        .unwrap_or_else(|| default_scaling(config.n, config.m, config.d.max(1)))
}

pub fn run_ldlr(config: &LdlrConfig, seed: u64, write_artifacts: bool) -> Result<CommandResult> {
    let scaling = resolved_scaling(config);
    let report = ldlr_norm_squared(config.n, config.m, config.d, config.degree, scaling)?;

    // Oracle spot check: a few closed-form coefficients against short
    // Monte-Carlo runs (6 sigma; failure means an implementation bug, not
    // statistical noise).
    let alphas = enumerate_valid_alphas(config.n, config.m, config.degree, config.d.min(2))?;
    let queries: Vec<(MomentQuery, f64)> = alphas
        .into_iter()
        .take(3)
        .map(|alpha| {
            let beta = vec![0u32; config.m];
            let closed = planted_hermite_coeff(&alpha, &beta, scaling);
            (MomentQuery::coefficient_query(alpha, beta), closed)
        })
        .collect();
    if !queries.is_empty() {
        let estimates = estimate_planted_moments(
            config.n,
            config.m,
            config.degree,
            scaling,
            &queries.iter().map(|(q, _)| q.clone()).collect::<Vec<_>>(),
            100_000,
            seed ^ 0x5bd1_e995,
        )?;
        for ((_, closed), est) in queries.iter().zip(&estimates) {
            if est.sigmas_from(*closed) > 6.0 {
                bail!(
                    "oracle spot check failed: closed {closed} vs mc {} ± {}",
                    est.mean,
                    est.std_err
                );
            }
        }
    }

    let value = serde_json::to_value(&report)?;
    if write_artifacts {
        if let Some(path) = &config.out {
            std::fs::write(path, serde_json::to_string_pretty(&value)?)?;
        }
    }
    println!(
        "E_N[(L^<={})^2] = {:.6}  advantage bound {:.6}  (n={}, m={}, D={}, c={:.3e})",
        report.d, report.total, report.advantage_bound, report.n, report.m, report.degree, scaling
    );
    Ok(ok(
        value,
        json!({"total": report.total, "advantage_bound": report.advantage_bound}),
    ))
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct LdlrMcConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: LdlrConfig,
    /// Monte-Carlo sample count (accepts 1e6 style).
    #[arg(long, default_value = "1e6")]
    pub samples: String,
}

pub fn run_ldlr_mc(config: &LdlrMcConfig, seed: u64, write_artifacts: bool) -> Result<CommandResult> {
    let samples = parse_samples(&config.samples)?;
    let base = &config.base;
    let scaling = resolved_scaling(base);
    let alphas = enumerate_valid_alphas(base.n, base.m, base.degree, base.d)?;

    // Every admissible (alpha, beta) pair within the truncation.
    let mut queries: Vec<MomentQuery> = Vec::new();
    let mut closed: Vec<f64> = Vec::new();
    for alpha in alphas {
        let counts = alpha.label_counts();
        let budget = base.d - alpha.total_edges();
        let mut betas: Vec<Vec<u32>> = vec![vec![]];
        for &count in &counts {
            let mut next = Vec::new();
            for prefix in &betas {
                let used: u32 = prefix.iter().sum();
                let mut b = count % 2;
                while b <= count.min(budget.saturating_sub(used)) {
                    let mut row = prefix.clone();
                    row.push(b);
                    next.push(row);
                    b += 2;
                }
            }
            betas = next;
        }
        for beta in betas {
            closed.push(planted_hermite_coeff(&alpha, &beta, scaling));
            queries.push(MomentQuery::coefficient_query(alpha.clone(), beta));
        }
    }
    let estimates =
        estimate_planted_moments(base.n, base.m, base.degree, scaling, &queries, samples, seed)?;

    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for ((query, est), closed) in queries.iter().zip(&estimates).zip(&closed) {
        let sigmas = est.sigmas_from(*closed);
        worst = worst.max(sigmas);
        rows.push(json!({
            "alpha": query
                .alpha
                .edges()
                .map(|(s, tuple, mult)| json!({"label": s, "tuple": tuple, "mult": mult}))
                .collect::<Vec<_>>(),
            "beta": query.beta,
            "closed_form": closed,
            "mc_mean": est.mean,
            "mc_std_err": est.std_err,
            "sigmas": sigmas,
        }));
    }
    let pass = worst <= 4.0;
    let results = json!({
        "n": base.n, "m": base.m, "d": base.d, "D": base.degree,
        "scaling": scaling, "samples": samples,
        "pairs": rows,
        "worst_sigmas": worst,
        "pass": pass,
    });
    if write_artifacts {
        if let Some(path) = &base.out {
            std::fs::write(path, serde_json::to_string_pretty(&results)?)?;
        }
    }
    println!(
        "{} coefficient pairs, worst deviation {:.2} standard errors: {}",
        queries.len(),
        worst,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(CommandResult {
        results,
        summary: json!({"pairs": queries.len(), "worst_sigmas": worst, "pass": pass}),
        exit: if pass { 0 } else { 2 },
    })
}

fn parse_samples(text: &str) -> Result<u64> {
    if let Ok(v) = text.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = text.parse()?;
    if !v.is_finite() || !(1.0..=1e12).contains(&v) {
        bail!("samples out of range");
    }
    Ok(v as u64)
}

// ---------------------------------------------------------------------------
// pseudocal

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct PseudocalConfig {
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, default_value_t = 4)]
    pub tau: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "svd-cutoff", default_value_t = pseudocal::DEFAULT_SVD_CUTOFF)]
    pub svd_cutoff: f64,
    /// Spectrum report path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<PathBuf>,
}

pub fn run_pseudocal(
    config: &PseudocalConfig,
    seed: u64,
    write_artifacts: bool,
) -> Result<CommandResult> {
    let mut rng = rng_from_seed(seed);
    let system = sample_null_gaussian(config.n, config.m, 2, &mut rng)?;
    let mats = pseudocal::system_matrices(&system)?;

    let (matrix, pe) = pseudocal::build_moment_matrix(config.n, config.tau, &mats)?;
    let q = pseudocal::build_constraint_operator(config.n, &mats)?;
    let (fixed, info) = pseudocal::repair_constraints(&pe, &q, config.svd_cutoff);
    let fixed_matrix = pseudocal::moment_matrix_from_pe(&fixed);
    let raw_report = pseudocal::spectrum_report(&matrix, &q);
    let fixed_report = pseudocal::spectrum_report(&fixed_matrix, &q);

    // Structural verification gate: odd blocks exactly zero, residual
    // reduced to the projection floor, and the repair idempotent.
    if raw_report.blocks.odd_max_abs != 0.0 {
        bail!("odd moment blocks must vanish identically");
    }
    let pe_scale = pe.values.norm().max(f64::MIN_POSITIVE);
    if info.residual_after > 1e-8 * info.q_norm * pe_scale {
        bail!(
            "constraint residual after repair too large: {}",
            info.residual_after
        );
    }
    let (fixed2, _) = pseudocal::repair_constraints(&fixed, &q, config.svd_cutoff);
    if (&fixed2.values - &fixed.values).norm() > 1e-10 * pe_scale {
        bail!("repair is not idempotent");
    }

    let results = json!({
        "n": config.n, "m": config.m, "tau": config.tau,
        "blocks": raw_report.blocks,
        "min_eig": raw_report.min_eig,
        "min_restricted_eig": raw_report.min_restricted_eig,
        "constraint_residual_before": info.residual_before,
        "constraint_residual_after": info.residual_after,
        "q_norm": info.q_norm,
        "qqt_gap": info.qqt_gap,
        "repair": info,
        "repaired_spectrum": fixed_report,
        "raw_spectrum": raw_report,
    });
    if write_artifacts {
        if let Some(path) = &config.out {
            std::fs::write(path, serde_json::to_string_pretty(&results)?)?;
        }
    }
    println!(
        "m00 = {:.4}; min eig {:.3e}; min restricted eig {:.3e}; residual {:.3e} -> {:.3e}; null(Q) dim {}",
        raw_report.blocks.m00,
        raw_report.min_eig,
        raw_report.min_restricted_eig,
        info.residual_before,
        info.residual_after,
        info.null_dim,
    );
    if info.null_dim == 0 {
        println!(
            "note: Q has full column rank at these parameters, so the exact \
             null-space projection sends the pseudo-expectation to zero; the \
             reported restricted spectrum of the constructed matrix is the \
             meaningful PSD probe"
        );
    }
    let summary = json!({
        "m00": raw_report.blocks.m00,
        "min_restricted_eig": raw_report.min_restricted_eig,
        "residual_after": info.residual_after,
        "null_dim": info.null_dim,
    });
    Ok(ok(results, summary))
}

// ---------------------------------------------------------------------------
// distinguish

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct DistinguishConfig {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Planted scaling; defaults to the configured small value.
    #[arg(long)]
    pub scaling: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<PathBuf>,
}

pub fn run_distinguish(
    config: &DistinguishConfig,
    seed: u64,
    write_artifacts: bool,
) -> Result<CommandResult> {
    let scaling = config
        .scaling
        .unwrap_or_else(|| default_scaling(config.n, config.m, 4));
    let report =
        polyrefute::lowdeg::spectral_experiment(config.n, config.m, scaling, config.trials, seed)?;
    if !report.auc.is_finite() || !(0.0..=1.0).contains(&report.auc) {
        bail!("AUC out of range");
    }
    let value = serde_json::to_value(&report)?;
    if write_artifacts {
        if let Some(path) = &config.out {
            std::fs::write(path, serde_json::to_string_pretty(&value)?)?;
        }
    }
    println!(
        "null mean {:.4}, planted mean {:.4}, AUC {:.4} (n={}, m={}, c={:.3e})",
        report.null_mean, report.planted_mean, report.auc, config.n, config.m, scaling
    );
    Ok(ok(
        value,
        json!({"auc": report.auc, "null_mean": report.null_mean, "planted_mean": report.planted_mean}),
    ))
}
