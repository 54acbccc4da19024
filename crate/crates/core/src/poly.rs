//! Sparse polynomials keyed by monomial exponent vectors.
//!
//! [`HomogeneousPolynomial`] stores a single degree layer; absent monomials
//! have coefficient zero and zero coefficients are never stored.
//! [`Polynomial`] is a possibly inhomogeneous polynomial represented by its
//! homogeneous layers, which is the form refutation certificates take.

use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::multiset::MultisetIndex;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct HomogeneousPolynomial<T> {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<MultisetIndex, T>,
}

impl<T: Scalar> HomogeneousPolynomial<T> {
    pub fn zero(num_vars: usize, degree: u32) -> Self {
        HomogeneousPolynomial {
            num_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Single-term polynomial `coeff * x^index`.
    pub fn monomial(num_vars: usize, index: MultisetIndex, coeff: T) -> Result<Self, CoreError> {
        let mut p = HomogeneousPolynomial::zero(num_vars, index.total_degree());
        if index.num_vars() != num_vars {
            return Err(CoreError::NumVarsMismatch {
                left: num_vars,
                right: index.num_vars(),
            });
        }
        p.set_coeff(index, coeff);
        Ok(p)
    }

    /// Builds from `(index, coeff)` pairs; every index must have `|α| = degree`.
    pub fn from_terms(
        num_vars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (MultisetIndex, T)>,
    ) -> Result<Self, CoreError> {
        let mut p = HomogeneousPolynomial::zero(num_vars, degree);
        for (idx, c) in terms {
            if idx.num_vars() != num_vars {
                return Err(CoreError::NumVarsMismatch {
                    left: num_vars,
                    right: idx.num_vars(),
                });
            }
            if idx.total_degree() != degree {
                return Err(CoreError::DegreeMismatch {
                    left: degree,
                    right: idx.total_degree(),
                });
            }
            p.add_coeff(&idx, c);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in the canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultisetIndex, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, index: &MultisetIndex) -> T {
        self.terms.get(index).cloned().unwrap_or_else(T::zero)
    }

    fn set_coeff(&mut self, index: MultisetIndex, coeff: T) {
        debug_assert_eq!(index.total_degree(), self.degree);
        if coeff.is_zero() {
            self.terms.remove(&index);
        } else {
            self.terms.insert(index, coeff);
        }
    }

    pub fn add_coeff(&mut self, index: &MultisetIndex, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        let updated = match self.terms.get(index) {
            Some(existing) => existing.clone() + coeff,
            None => coeff,
        };
        self.set_coeff(index.clone(), updated);
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (idx, c) in other.terms() {
            out.add_coeff(idx, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &T) -> Self {
        if factor.is_zero() {
            return HomogeneousPolynomial::zero(self.num_vars, self.degree);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone() * factor.clone();
        }
        out
    }

    /// Product polynomial; coefficients are the convolution over multiset sums.
    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        if self.num_vars != other.num_vars {
            return Err(CoreError::NumVarsMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        let mut out = HomogeneousPolynomial::zero(self.num_vars, self.degree + other.degree);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let idx = a.add(b).expect("same num_vars");
                out.add_coeff(&idx, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Evaluates at a point: `Σ_α coeff(α) x^α`.
    pub fn eval(&self, x: &[T]) -> Result<T, CoreError> {
        if x.len() != self.num_vars {
            return Err(CoreError::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        let mut acc = T::zero();
        for (idx, c) in self.terms() {
            let mut term = c.clone();
            for (v, &e) in idx.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= x[v].clone();
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), CoreError> {
        if self.num_vars != other.num_vars {
            return Err(CoreError::NumVarsMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        if self.degree != other.degree {
            return Err(CoreError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    /// JSON form: `{num_vars, degree, terms: [{exponents, coeff}]}` with
    /// rationals as `"p/q"` strings and floats as numbers.
    pub fn to_json(&self) -> Value {
        json!({
            "num_vars": self.num_vars,
            "degree": self.degree,
            "terms": self
                .terms()
                .map(|(idx, c)| json!({"exponents": idx.exponents(), "coeff": c.coeff_to_json()}))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CoreError> {
        let (num_vars, degree, terms) = parse_poly_json(v)?;
        HomogeneousPolynomial::from_terms(num_vars, degree, terms)
    }
}

type ParsedTerms<T> = (usize, u32, Vec<(MultisetIndex, T)>);

fn parse_poly_json<T: Scalar>(v: &Value) -> Result<ParsedTerms<T>, CoreError> {
    let bad = |msg: &str| CoreError::Malformed(format!("polynomial JSON: {msg}"));
    let num_vars = v["num_vars"].as_u64().ok_or_else(|| bad("num_vars"))? as usize;
    let degree = v["degree"].as_u64().ok_or_else(|| bad("degree"))? as u32;
    let raw = v["terms"].as_array().ok_or_else(|| bad("terms"))?;
    let mut terms = Vec::with_capacity(raw.len());
    for t in raw {
        let exps: Vec<u32> = serde_json::from_value(t["exponents"].clone())
            .map_err(|e| bad(&format!("exponents: {e}")))?;
        let coeff = T::coeff_from_json(&t["coeff"])?;
        terms.push((MultisetIndex::new(exps), coeff));
    }
    Ok((num_vars, degree, terms))
}

/// Possibly inhomogeneous polynomial stored as homogeneous layers.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<T> {
    num_vars: usize,
    layers: BTreeMap<u32, HomogeneousPolynomial<T>>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            layers: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: T) -> Self {
        let mut p = Polynomial::zero(num_vars);
        if !c.is_zero() {
            p.layers.insert(
                0,
                HomogeneousPolynomial::monomial(num_vars, MultisetIndex::zero(num_vars), c)
                    .expect("zero index"),
            );
        }
        p
    }

    pub fn from_homogeneous(h: HomogeneousPolynomial<T>) -> Self {
        let mut p = Polynomial::zero(h.num_vars());
        if !h.is_zero() {
            p.layers.insert(h.degree(), h);
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.layers.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.layers.keys().next_back().copied()
    }

    pub fn layers(&self) -> impl Iterator<Item = (&u32, &HomogeneousPolynomial<T>)> {
        self.layers.iter()
    }

    pub fn layer(&self, degree: u32) -> Option<&HomogeneousPolynomial<T>> {
        self.layers.get(&degree)
    }

    pub fn coeff(&self, index: &MultisetIndex) -> T {
        self.layers
            .get(&index.total_degree())
            .map(|h| h.coeff(index))
            .unwrap_or_else(T::zero)
    }

    pub fn add_assign_homogeneous(&mut self, h: &HomogeneousPolynomial<T>) -> Result<(), CoreError> {
        if h.num_vars() != self.num_vars {
            return Err(CoreError::NumVarsMismatch {
                left: self.num_vars,
                right: h.num_vars(),
            });
        }
        if h.is_zero() {
            return Ok(());
        }
        let entry = self
            .layers
            .entry(h.degree())
            .or_insert_with(|| HomogeneousPolynomial::zero(self.num_vars, h.degree()));
        *entry = entry.add(h)?;
        if entry.is_zero() {
            self.layers.remove(&h.degree());
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        let mut out = self.clone();
        for (_, h) in other.layers() {
            out.add_assign_homogeneous(h)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for h in out.layers.values_mut() {
            *h = h.neg();
        }
        out
    }

    pub fn scale(&self, factor: &T) -> Self {
        if factor.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        let mut out = self.clone();
        for h in out.layers.values_mut() {
            *h = h.scale(factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        let mut out = Polynomial::zero(self.num_vars);
        for (_, ha) in self.layers() {
            for (_, hb) in other.layers() {
                out.add_assign_homogeneous(&ha.mul(hb)?)?;
            }
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[T]) -> Result<T, CoreError> {
        let mut acc = T::zero();
        for (_, h) in self.layers() {
            acc += h.eval(x)?;
        }
        Ok(acc)
    }

    /// Same JSON schema as the homogeneous form; `degree` is the total degree.
    pub fn to_json(&self) -> Value {
        json!({
            "num_vars": self.num_vars,
            "degree": self.total_degree().unwrap_or(0),
            "terms": self
                .layers()
                .flat_map(|(_, h)| h.terms())
                .map(|(idx, c)| json!({"exponents": idx.exponents(), "coeff": c.coeff_to_json()}))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CoreError> {
        let (num_vars, _, terms) = parse_poly_json(v)?;
        let mut p = Polynomial::zero(num_vars);
        for (idx, c) in terms {
            let h = HomogeneousPolynomial::monomial(num_vars, idx, c)?;
            p.add_assign_homogeneous(&h)?;
        }
        Ok(p)
    }
}
