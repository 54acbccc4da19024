//! Samplers for random polynomial systems.
//!
//! Three instance families, all seeded and reproducible:
//! * nice-rational nulls: every tensor entry and right-hand side is a
//!   bounded-bit rational drawn as `k / 2^B` with `k` uniform in
//!   `[-2^B, 2^B]`, a B-bit truncation of the uniform distribution on
//!   `[-1, 1]`;
//! * Gaussian nulls: i.i.d. standard normal entries;
//! * planted systems: `z` uniform on the scaled hypercube, `b_i` standard
//!   normal, and each tensor sampled conditioned on `<G_i, z^{⊗D}> = c·b_i`.
//!   Conditioning a standard Gaussian vector on one unit-norm linear
//!   functional is exactly a rank-one correction, which is how the sampler
//!   realizes it.

use num_bigint::{BigInt, RandBigInt};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CoreError;
use crate::scalar::Scalar;
use crate::tensor::CoefficientTensor;
use crate::{Rat, RatTensor};

/// Parameters of a nice rational distribution: bit bound `B` and the atom
/// probability cap the distribution must satisfy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NiceRationalSpec {
    pub bits: u32,
    pub atom_cap: f64,
}

impl NiceRationalSpec {
    pub fn new(bits: u32) -> Result<Self, CoreError> {
        if bits < 8 {
            return Err(CoreError::invalid("nice rational spec needs B >= 8"));
        }
        // Uniform on (2^{B+1} + 1) atoms.
        let atom_cap = 1.0 / (2.0f64.powi(bits as i32 + 1) + 1.0);
        Ok(NiceRationalSpec { bits, atom_cap })
    }
}

/// One draw: numerator uniform in `[-2^B, 2^B]`, denominator `2^B`.
/// The reduced value keeps numerator and denominator within the bit bound.
pub fn sample_nice_rational(spec: &NiceRationalSpec, rng: &mut impl Rng) -> Rat {
    let bound = BigInt::from(1u8) << spec.bits;
    let numer = rng.gen_bigint_range(&(-&bound), &(&bound + 1));
    Rat::new(numer, bound)
}

/// Where a system came from; planted systems carry their witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Null,
    Planted { z: Vec<f64>, scaling: f64 },
    Custom,
}

/// `m` equations `<G_i, x^{⊗D}> = b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSystem<T> {
    pub n: usize,
    pub m: usize,
    pub degree: u32,
    pub tensors: Vec<CoefficientTensor<T>>,
    pub rhs: Vec<T>,
    pub provenance: Provenance,
}

impl<T: Scalar> PolynomialSystem<T> {
    pub fn new(
        n: usize,
        degree: u32,
        tensors: Vec<CoefficientTensor<T>>,
        rhs: Vec<T>,
        provenance: Provenance,
    ) -> Result<Self, CoreError> {
        if tensors.len() != rhs.len() {
            return Err(CoreError::DimensionMismatch {
                expected: tensors.len(),
                got: rhs.len(),
            });
        }
        for t in &tensors {
            if t.dims() != n || t.order() != degree {
                return Err(CoreError::invalid("tensor shape inconsistent with system"));
            }
        }
        Ok(PolynomialSystem {
            n,
            m: tensors.len(),
            degree,
            tensors,
            rhs,
            provenance,
        })
    }

    /// JSON form: `{n, m, D, tensors: [flat row-major], rhs, provenance}`.
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m": self.m,
            "D": self.degree,
            "tensors": self
                .tensors
                .iter()
                .map(|t| t.entries().iter().map(|e| e.coeff_to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "rhs": self.rhs.iter().map(|e| e.coeff_to_json()).collect::<Vec<_>>(),
            "provenance": self.provenance,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CoreError> {
        let bad = |msg: &str| CoreError::Malformed(format!("system JSON: {msg}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("n"))? as usize;
        let degree = v["D"].as_u64().ok_or_else(|| bad("D"))? as u32;
        let tensors_raw = v["tensors"].as_array().ok_or_else(|| bad("tensors"))?;
        let mut tensors = Vec::with_capacity(tensors_raw.len());
        for t in tensors_raw {
            let entries = t
                .as_array()
                .ok_or_else(|| bad("tensor entries"))?
                .iter()
                .map(T::coeff_from_json)
                .collect::<Result<Vec<_>, _>>()?;
            tensors.push(CoefficientTensor::from_entries(degree, n, entries)?);
        }
        let rhs = v["rhs"]
            .as_array()
            .ok_or_else(|| bad("rhs"))?
            .iter()
            .map(T::coeff_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let provenance = serde_json::from_value(v["provenance"].clone())
            .map_err(|e| bad(&format!("provenance: {e}")))?;
        PolynomialSystem::new(n, degree, tensors, rhs, provenance)
    }
}

fn check_dims(n: usize, m: usize, degree: u32) -> Result<(), CoreError> {
    if n < 1 || m < 1 {
        return Err(CoreError::invalid("need n >= 1 and m >= 1"));
    }
    if degree < 2 {
        return Err(CoreError::invalid("need D >= 2"));
    }
    Ok(())
}

/// Null system with nice-rational coefficients: every tensor entry and every
/// `b_i` drawn independently from the given bit-bounded distribution.
pub fn sample_null_rational(
    n: usize,
    m: usize,
    degree: u32,
    spec: &NiceRationalSpec,
    rng: &mut impl Rng,
) -> Result<PolynomialSystem<Rat>, CoreError> {
    check_dims(n, m, degree)?;
    let mut tensors = Vec::with_capacity(m);
    for _ in 0..m {
        let mut t = RatTensor::zeros(degree, n)?;
        for e in t.entries_mut() {
            *e = sample_nice_rational(spec, rng);
        }
        tensors.push(t);
    }
    let rhs = (0..m).map(|_| sample_nice_rational(spec, rng)).collect();
    PolynomialSystem::new(n, degree, tensors, rhs, Provenance::Null)
}

/// Null system with i.i.d. standard Gaussian entries.
pub fn sample_null_gaussian(
    n: usize,
    m: usize,
    degree: u32,
    rng: &mut impl Rng,
) -> Result<PolynomialSystem<f64>, CoreError> {
    check_dims(n, m, degree)?;
    let mut tensors = Vec::with_capacity(m);
    for _ in 0..m {
        let mut t = CoefficientTensor::<f64>::zeros(degree, n)?;
        for e in t.entries_mut() {
            *e = StandardNormal.sample(rng);
        }
        tensors.push(t);
    }
    let rhs = (0..m).map(|_| StandardNormal.sample(rng)).collect();
    PolynomialSystem::new(n, degree, tensors, rhs, Provenance::Null)
}

/// Witness of a planted system: `z` on the radius-1 scaled hypercube and the
/// scaling `c` with `<G_i, z^{⊗D}> = c·b_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlantedWitness {
    pub z: Vec<f64>,
    pub scaling: f64,
}

/// Default scaling `c = 1/(10 d sqrt(m) ln(n+1))`, comfortably inside the
/// `o(1/(d sqrt(m)))` requirement at any fixed size.
pub fn default_scaling(n: usize, m: usize, d: u32) -> f64 {
    1.0 / (10.0 * d as f64 * (m as f64).sqrt() * ((n + 1) as f64).ln())
}

/// Planted system: `z` uniform on `{±1/√n}^n`, `b_i ~ N(0,1)`, and
/// `G_i = H + (c·b_i - <H, z^{⊗D}>)·z^{⊗D}` for unconditioned Gaussian `H`.
/// Valid because `‖z^{⊗D}‖_2 = 1`.
pub fn sample_planted_system(
    n: usize,
    m: usize,
    degree: u32,
    scaling: f64,
    rng: &mut impl Rng,
) -> Result<(PolynomialSystem<f64>, PlantedWitness), CoreError> {
    check_dims(n, m, degree)?;
    if scaling < 0.0 {
        return Err(CoreError::invalid("scaling must be >= 0"));
    }
    let root = 1.0 / (n as f64).sqrt();
    let z: Vec<f64> = (0..n)
        .map(|_| if rng.gen::<bool>() { root } else { -root })
        .collect();
    let z_power = power_tensor(&z, degree)?;

    let mut tensors = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for _ in 0..m {
        let b: f64 = StandardNormal.sample(rng);
        let mut t = CoefficientTensor::<f64>::zeros(degree, n)?;
        for e in t.entries_mut() {
            *e = StandardNormal.sample(rng);
        }
        let overlap: f64 = t
            .entries()
            .iter()
            .zip(z_power.entries())
            .map(|(a, b)| a * b)
            .sum();
        let shift = scaling * b - overlap;
        for (e, zp) in t.entries_mut().iter_mut().zip(z_power.entries()) {
            *e += shift * zp;
        }
        tensors.push(t);
        rhs.push(b);
    }
    let witness = PlantedWitness {
        z: z.clone(),
        scaling,
    };
    let system = PolynomialSystem::new(
        n,
        degree,
        tensors,
        rhs,
        Provenance::Planted { z, scaling },
    )?;
    Ok((system, witness))
}

/// `z^{⊗D}` as a dense tensor.
fn power_tensor(z: &[f64], degree: u32) -> Result<CoefficientTensor<f64>, CoreError> {
    let n = z.len();
    let mut t = CoefficientTensor::<f64>::zeros(degree, n)?;
    let d = degree as usize;
    for (flat, e) in t.entries_mut().iter_mut().enumerate() {
        let mut rem = flat;
        let mut prod = 1.0;
        for _ in 0..d {
            prod *= z[rem % n];
            rem /= n;
        }
        *e = prod;
    }
    Ok(t)
}

/// The planted solution `x = z / c^{1/D}` of a planted system.
///
/// With `c = 0` the witness only solves the all-zero-rhs system, so any
/// nonzero rhs is rejected.
pub fn solve_planted(system: &PolynomialSystem<f64>) -> Result<Vec<f64>, CoreError> {
    let Provenance::Planted { z, scaling } = &system.provenance else {
        return Err(CoreError::invalid("system has no planted witness"));
    };
    if *scaling == 0.0 {
        if system.rhs.iter().all(|b| *b == 0.0) {
            return Ok(z.clone());
        }
        return Err(CoreError::invalid(
            "scaling = 0: witness solves only the homogeneous system",
        ));
    }
    let factor = scaling.powf(1.0 / system.degree as f64);
    Ok(z.iter().map(|v| v / factor).collect())
}

/// Max relative residual `|g_i(x) - b_i| / max(1, |b_i|)` over the system.
pub fn max_relative_residual(system: &PolynomialSystem<f64>, x: &[f64]) -> Result<f64, CoreError> {
    let mut worst = 0.0f64;
    for (t, b) in system.tensors.iter().zip(&system.rhs) {
        let val = t.apply_power(x)?;
        let rel = (val - b).abs() / b.abs().max(1.0);
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;
    use num_bigint::BigInt;
    use num_traits::Signed;

    #[test]
    fn nice_rational_stays_in_range_with_bounded_bits() {
        let spec = NiceRationalSpec::new(8).unwrap();
        let mut rng = rng_from_seed(1);
        let bound = BigInt::from(256);
        for _ in 0..500 {
            let v = sample_nice_rational(&spec, &mut rng);
            assert!(v.numer().abs() <= bound);
            assert!(v.denom() <= &bound);
            assert!(v.denom() > &BigInt::from(0));
            // 256 = 2^8 so the reduced denominator still divides 2^8.
            assert_eq!(&bound % v.denom(), BigInt::from(0));
        }
    }

    #[test]
    fn atom_probabilities_respect_the_cap() {
        // True atom mass is exactly 1/(2^{B+1}+1); the empirical maximum
        // over all atoms overshoots by sqrt-noise, so allow the
        // finite-sample factor.
        let spec = NiceRationalSpec::new(8).unwrap();
        let mut rng = rng_from_seed(77);
        let samples = 100_000usize;
        let mut counts: std::collections::HashMap<Rat, u32> = std::collections::HashMap::new();
        for _ in 0..samples {
            *counts.entry(sample_nice_rational(&spec, &mut rng)).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 513); // every atom of the B = 8 support hit
        let max_freq = *counts.values().max().unwrap() as f64 / samples as f64;
        let per_atom = samples as f64 * spec.atom_cap;
        let allowance = 1.0 + 5.0 / per_atom.sqrt();
        assert!(
            max_freq <= spec.atom_cap * allowance,
            "max empirical atom mass {max_freq} vs cap {}",
            spec.atom_cap
        );
    }

    #[test]
    fn fixed_seed_reproduces_and_distinct_seeds_differ() {
        let spec = NiceRationalSpec::new(16).unwrap();
        let a = sample_nice_rational(&spec, &mut rng_from_seed(7));
        let b = sample_nice_rational(&spec, &mut rng_from_seed(7));
        assert_eq!(a, b);
        let mut unequal = 0;
        for s in 0..100u64 {
            let x = sample_nice_rational(&spec, &mut rng_from_seed(1000 + s));
            let y = sample_nice_rational(&spec, &mut rng_from_seed(2000 + s));
            if x != y {
                unequal += 1;
            }
        }
        // Atom mass is 1/(2^17 + 1); 100 independent pairs colliding more
        // than a few times would be astronomically unlikely.
        assert!(unequal >= 95, "only {unequal}/100 pairs distinct");
    }

    #[test]
    fn rational_null_system_shape() {
        let spec = NiceRationalSpec::new(16).unwrap();
        let mut rng = rng_from_seed(3);
        let sys = sample_null_rational(3, 2, 2, &spec, &mut rng).unwrap();
        assert_eq!(sys.tensors.len(), 2);
        assert_eq!(sys.rhs.len(), 2);
        assert_eq!(sys.tensors[0].entries().len(), 9);
        let denom = BigInt::from(1u32) << 16;
        for t in &sys.tensors {
            for e in t.entries() {
                assert_eq!(&denom % e.denom(), BigInt::from(0));
            }
        }
    }

    #[test]
    fn planted_constraint_holds_to_tolerance() {
        let mut rng = rng_from_seed(11);
        let c = 0.25;
        let (sys, w) = sample_planted_system(6, 5, 2, c, &mut rng).unwrap();
        let zp = power_tensor(&w.z, 2).unwrap();
        for (t, b) in sys.tensors.iter().zip(&sys.rhs) {
            let overlap: f64 = t
                .entries()
                .iter()
                .zip(zp.entries())
                .map(|(a, b)| a * b)
                .sum();
            assert!((overlap - c * b).abs() < 1e-10, "constraint violated");
        }
        let norm: f64 = w.z.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planted_solution_residuals() {
        let mut rng = rng_from_seed(13);
        // c = 1/4, D = 2: ||x||_2 = 2.
        let (sys, _) = sample_planted_system(8, 6, 2, 0.25, &mut rng).unwrap();
        let x = solve_planted(&sys).unwrap();
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 2.0).abs() < 1e-10);
        assert!(max_relative_residual(&sys, &x).unwrap() < 1e-6);

        // D = 3, c = 1/8: cube root gives ||x||_2 = 2.
        let mut rng = rng_from_seed(17);
        let (sys3, _) = sample_planted_system(4, 3, 3, 0.125, &mut rng).unwrap();
        let x3 = solve_planted(&sys3).unwrap();
        let norm3: f64 = x3.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm3 - 2.0).abs() < 1e-10);
        assert!(max_relative_residual(&sys3, &x3).unwrap() < 1e-6);
    }

    #[test]
    fn scaling_zero_conditioning_is_homogeneous() {
        let mut rng = rng_from_seed(19);
        let (sys, w) = sample_planted_system(5, 4, 2, 0.0, &mut rng).unwrap();
        let zp = power_tensor(&w.z, 2).unwrap();
        for t in &sys.tensors {
            let overlap: f64 = t
                .entries()
                .iter()
                .zip(zp.entries())
                .map(|(a, b)| a * b)
                .sum();
            assert!(overlap.abs() < 1e-10);
        }
        // rhs is generically nonzero, so the witness does not solve it.
        assert!(solve_planted(&sys).is_err());
    }

    #[test]
    fn system_json_round_trip() {
        let spec = NiceRationalSpec::new(8).unwrap();
        let mut rng = rng_from_seed(23);
        let sys = sample_null_rational(2, 2, 2, &spec, &mut rng).unwrap();
        let back = PolynomialSystem::<Rat>::from_json(&sys.to_json()).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn identical_seeds_give_bit_identical_systems() {
        let a = sample_null_gaussian(4, 3, 2, &mut rng_from_seed(5)).unwrap();
        let b = sample_null_gaussian(4, 3, 2, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a, b);
    }
}
