//! Alternating 3-forms over ℚ.
//!
//! A [`Trivector`] on `ℚⁿ` stores one coefficient per strictly increasing
//! index triple; zero coefficients are never stored. Read as a trilinear form,
//! `ω(eᵢ, eⱼ, eₖ)` is the stored coefficient up to the sign of the permutation
//! sorting `(i, j, k)`.
//!
//! The product `x·y` of two vectors is the covector `z ↦ ω(x, y, z)`; this is
//! the intersection product `H₂ × H₂ → H₁` written in the dual basis.

mod parallel;
mod split;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{format_rational, parse_rational, LinAlgError, RatMatrix, Rational};

pub use parallel::{missing_duals, opp_para_check, ParallelismReport, PARALLEL_PAIRS};
pub use split::{
    analyze, check_witness, is_decomposable, k_endomorphism, obstruct, radical, rank3_split_dim6, strip_radical,
    Decomposition, ObstructionVerdict, Rank3Verdict, SplitReport, SplitWitness, StrippedForm,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("index triple ({0}, {1}, {2}) out of range for dimension {3}")]
    IndexOutOfRange(usize, usize, usize, usize),
    #[error("term ({0}, {1}, {2}) is not strictly increasing")]
    NotIncreasing(usize, usize, usize),
    #[error("dimension mismatch: form has dimension {expected}, vector has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("change of basis is singular")]
    SingularChange,
    #[error("zero form has no factorization")]
    ZeroForm,
    #[error("rank-3 split test needs dimension 6, found {0}")]
    NotSixDimensional(usize),
    #[error("rank-3 split test needs a trivial radical, found dimension {0}")]
    NonzeroRadical(usize),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("invalid form document: {0}")]
    Document(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Sign of the permutation sorting three distinct indices, with the sorted
/// triple; `None` when two indices coincide.
pub fn sort_triple(i: usize, j: usize, k: usize) -> Option<([usize; 3], i8)> {
    if i == j || j == k || i == k {
        return None;
    }
    let mut t = [i, j, k];
    let mut sign = 1;
    for a in 0..3 {
        for b in 0..2 - a {
            if t[b] > t[b + 1] {
                t.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    Some((t, sign))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivector {
    dim: usize,
    coefficients: BTreeMap<[usize; 3], Rational>,
}

impl Trivector {
    pub fn zero(dim: usize) -> Self {
        Trivector {
            dim,
            coefficients: BTreeMap::new(),
        }
    }

    /// Builds a form from `(i, j, k, coefficient)` terms in any order; repeated
    /// triples accumulate.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self, FormError> {
        let mut w = Trivector::zero(dim);
        for (i, j, k, c) in terms {
            w.add_term(i, j, k, c)?;
        }
        Ok(w)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize; 3], &Rational)> {
        self.coefficients.iter()
    }

    pub fn term_count(&self) -> usize {
        self.coefficients.len()
    }

    /// Adds `c·eᵢ∧eⱼ∧eₖ`. Repeated indices contribute nothing.
    pub fn add_term(&mut self, i: usize, j: usize, k: usize, c: Rational) -> Result<(), FormError> {
        if i >= self.dim || j >= self.dim || k >= self.dim {
            return Err(FormError::IndexOutOfRange(i, j, k, self.dim));
        }
        let Some((key, sign)) = sort_triple(i, j, k) else {
            return Ok(());
        };
        let c = if sign < 0 { -c } else { c };
        let entry = self.coefficients.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&key);
        }
        Ok(())
    }

    /// `ω(eᵢ, eⱼ, eₖ)`.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> Rational {
        match sort_triple(i, j, k) {
            Some((key, sign)) => match self.coefficients.get(&key) {
                Some(c) if sign < 0 => -c.clone(),
                Some(c) => c.clone(),
                None => Rational::zero(),
            },
            None => Rational::zero(),
        }
    }

    fn check_len(&self, v: &[Rational]) -> Result<(), FormError> {
        if v.len() != self.dim {
            return Err(FormError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[Rational], y: &[Rational], z: &[Rational]) -> Result<Rational, FormError> {
        self.check_len(x)?;
        self.check_len(y)?;
        self.check_len(z)?;
        let mut total = Rational::zero();
        for ([p, q, r], c) in &self.coefficients {
            let det = &x[*p] * (&y[*q] * &z[*r] - &y[*r] * &z[*q]) - &x[*q] * (&y[*p] * &z[*r] - &y[*r] * &z[*p])
                + &x[*r] * (&y[*p] * &z[*q] - &y[*q] * &z[*p]);
            if !det.is_zero() {
                total += c * det;
            }
        }
        Ok(total)
    }

    pub fn scale(&self, s: &Rational) -> Trivector {
        if s.is_zero() {
            return Trivector::zero(self.dim);
        }
        Trivector {
            dim: self.dim,
            coefficients: self.coefficients.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    pub fn add(&self, other: &Trivector) -> Result<Trivector, FormError> {
        if self.dim != other.dim {
            return Err(FormError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        for ([i, j, k], c) in &other.coefficients {
            out.add_term(*i, *j, *k, c.clone())?;
        }
        Ok(out)
    }

    /// Support indices used by some nonzero term.
    pub fn used_indices(&self) -> Vec<usize> {
        let mut used: Vec<usize> = self.coefficients.keys().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        used
    }

    pub fn to_document(&self) -> FormDocument {
        FormDocument {
            dim: self.dim,
            terms: self
                .coefficients
                .iter()
                .map(|([i, j, k], c)| {
                    (
                        *i,
                        *j,
                        *k,
                        CoefficientText::Text(format_rational(c)),
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_document()).expect("form serializes")
    }

    /// Parses `{"dim": n, "terms": [[i, j, k, "p/q"], ...]}`. Indices are
    /// 0-based and must be strictly increasing; coefficients may be strings
    /// or integers.
    pub fn from_json(text: &str) -> Result<Trivector, FormError> {
        let doc: FormDocument = serde_json::from_str(text).map_err(|e| FormError::Document(e.to_string()))?;
        Trivector::from_document(&doc)
    }

    pub fn from_document(doc: &FormDocument) -> Result<Trivector, FormError> {
        let mut w = Trivector::zero(doc.dim);
        for (i, j, k, c) in &doc.terms {
            if !(i < j && j < k) {
                return Err(FormError::NotIncreasing(*i, *j, *k));
            }
            let c = match c {
                CoefficientText::Text(s) => parse_rational(s)?,
                CoefficientText::Integer(n) => Rational::from_integer((*n).into()),
            };
            w.add_term(*i, *j, *k, c)?;
        }
        Ok(w)
    }

    /// Human-readable sum using the given basis labels, e.g. `a∧b∧c - 2 a∧e∧f`.
    pub fn render(&self, labels: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, ([i, j, k], c)) in self.coefficients.iter().enumerate() {
            let negative = c < &Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            match (n, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if mag != Rational::from_integer(1.into()) {
                out.push_str(&format_rational(&mag));
                out.push(' ');
            }
            out.push_str(&format!("{}∧{}∧{}", labels[*i], labels[*j], labels[*k]));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientText {
    Text(String),
    Integer(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDocument {
    pub dim: usize,
    pub terms: Vec<(usize, usize, usize, CoefficientText)>,
}

/// The covector `z ↦ ω(x, y, z)`.
pub fn product(w: &Trivector, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, FormError> {
    w.check_len(x)?;
    w.check_len(y)?;
    let mut out = vec![Rational::zero(); w.dim];
    let cross = |a: usize, b: usize| &x[a] * &y[b] - &x[b] * &y[a];
    for ([p, q, r], c) in &w.coefficients {
        // ω(x, y, e_r) = c (x_p y_q - x_q y_p), and cyclically
        for (a, b, target) in [(*p, *q, *r), (*q, *r, *p), (*r, *p, *q)] {
            let m = cross(a, b);
            if !m.is_zero() {
                out[target] += c * m;
            }
        }
    }
    Ok(out)
}

/// `ω(eᵢ, eⱼ, ·)` for basis vectors, without building dense inputs.
pub fn basis_product(w: &Trivector, i: usize, j: usize) -> Vec<Rational> {
    (0..w.dim).map(|k| w.coefficient(i, j, k)).collect()
}

/// `ω^N(x, y, z) = ω(Nx, Ny, Nz)`.
pub fn basis_change(w: &Trivector, n: &RatMatrix) -> Result<Trivector, FormError> {
    if !n.is_square() || n.rows() != w.dim {
        return Err(FormError::DimensionMismatch {
            expected: w.dim,
            found: n.rows(),
        });
    }
    if n.determinant()?.is_zero() {
        return Err(FormError::SingularChange);
    }
    Ok(pullback(w, n))
}

/// `ω(M·, M·, M·)` for any `dim(ω) × m` matrix `M`; the result lives on `ℚᵐ`.
pub(crate) fn pullback(w: &Trivector, n: &RatMatrix) -> Trivector {
    debug_assert_eq!(n.rows(), w.dim);
    let dim = n.cols();
    let mut out = Trivector::zero(dim);
    if w.is_zero() {
        return out;
    }
    let cols: Vec<Vec<Rational>> = (0..dim).map(|j| n.column(j)).collect();
    for a in 0..dim {
        for b in a + 1..dim {
            for c in b + 1..dim {
                let v = w
                    .evaluate(&cols[a], &cols[b], &cols[c])
                    .expect("columns have the form's dimension");
                if !v.is_zero() {
                    out.coefficients.insert([a, b, c], v);
                }
            }
        }
    }
    out
}
