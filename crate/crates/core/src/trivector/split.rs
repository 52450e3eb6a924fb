//! Radical, decomposability and the rank-3 split certificate in dimension 6.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{basis_product, pullback, FormError, Trivector};
use crate::exactlin::{format_rational, kernel, rref, RatMatrix, Rational};

/// Basis of `{x : ω(x, ·, ·) = 0}`.
pub fn radical(w: &Trivector) -> Vec<Vec<Rational>> {
    let n = w.dim();
    if n == 0 {
        return Vec::new();
    }
    let mut rows = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let row: Vec<Rational> = (0..n).map(|i| w.coefficient(i, j, k)).collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return (0..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                v
            })
            .collect();
    }
    kernel(&RatMatrix::from_rows(rows))
}

/// A form with its radical split off: `ω = form(P·, P·, P·)` where `P` is the
/// projection onto the complement along the radical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrippedForm {
    pub form: Trivector,
    /// Columns spanning a complement of the radical, as vectors of the
    /// original space.
    pub complement: Vec<Vec<Rational>>,
    pub radical: Vec<Vec<Rational>>,
    /// `dim(form) × dim(ω)` projection.
    pub projection: RatMatrix,
}

pub fn strip_radical(w: &Trivector) -> StrippedForm {
    let n = w.dim();
    let rad = radical(w);
    let mut chosen: Vec<Vec<Rational>> = rad.clone();
    let mut complement = Vec::new();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        chosen.push(e.clone());
        if RatMatrix::from_rows(chosen.clone()).rank() == chosen.len() {
            complement.push(e);
        } else {
            chosen.pop();
        }
    }
    let m = complement.len();
    let form = if m == 0 {
        Trivector::zero(0)
    } else {
        pullback(w, &RatMatrix::from_columns(n, &complement))
    };
    let mut all = complement.clone();
    all.extend(rad.iter().cloned());
    let projection = if n == 0 {
        RatMatrix::zeros(0, 0)
    } else {
        let inv = RatMatrix::from_columns(n, &all)
            .inverse()
            .expect("complement and radical together form a basis");
        RatMatrix::from_rows((0..m).map(|i| inv.row(i).to_vec()).collect())
    };
    StrippedForm {
        form,
        complement,
        radical: rad,
        projection,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub decomposable: bool,
    /// Dimension of the span of all contractions `δ(eᵢ, eⱼ, ·)`.
    pub span_dim: usize,
    /// `u, v, w` with `u∧v∧w = δ`, when decomposable.
    pub factors: Option<[Vec<Rational>; 3]>,
}

fn wedge_vanishes(d: &Trivector, v: &[Rational]) -> bool {
    let n = d.dim();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for e in c + 1..n {
                    let s = d.coefficient(a, b, c) * &v[e] - d.coefficient(a, b, e) * &v[c]
                        + d.coefficient(a, c, e) * &v[b]
                        - d.coefficient(b, c, e) * &v[a];
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub fn is_decomposable(d: &Trivector) -> Result<Decomposition, FormError> {
    if d.is_zero() {
        return Err(FormError::ZeroForm);
    }
    let n = d.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = basis_product(d, i, j);
            if v.iter().any(|c| !c.is_zero()) {
                rows.push(v);
            }
        }
    }
    let (r, pivots) = rref(&RatMatrix::from_rows(rows));
    let span: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
    let span_dim = span.len();
    let decomposable = span_dim == 3 && span.iter().all(|v| wedge_vanishes(d, v));
    let factors = if decomposable {
        let [u, v, w] = [span[0].clone(), span[1].clone(), span[2].clone()];
        let (&[p, q, s], c) = d.terms().next().expect("nonzero form");
        let minor = |a: &[Rational], b: &[Rational], e: &[Rational]| {
            &a[p] * (&b[q] * &e[s] - &b[s] * &e[q]) - &a[q] * (&b[p] * &e[s] - &b[s] * &e[p])
                + &a[s] * (&b[p] * &e[q] - &b[q] * &e[p])
        };
        let scale = c / minor(&u, &v, &w);
        let u: Vec<Rational> = u.iter().map(|x| x * &scale).collect();
        Some([u, v, w])
    } else {
        None
    };
    Ok(Decomposition {
        decomposable,
        span_dim,
        factors,
    })
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The endomorphism `x ↦ ι_xω ∧ ω` of `ℚ⁶`, reading 5-forms as vectors through
/// the standard volume `e₀∧…∧e₅`: component `m` is `(-1)^m` times the
/// coefficient on the 5-subset missing `m`.
pub fn k_endomorphism(w: &Trivector) -> Result<RatMatrix, FormError> {
    if w.dim() != 6 {
        return Err(FormError::NotSixDimensional(w.dim()));
    }
    let mut k = RatMatrix::zeros(6, 6);
    for a in 0..6 {
        for m in 0..6 {
            let idx: Vec<usize> = (0..6).filter(|&x| x != m).collect();
            let mut s = Rational::zero();
            for x in 0..5 {
                for y in x + 1..5 {
                    let (j, l) = (idx[x], idx[y]);
                    let c = w.coefficient(a, j, l);
                    if c.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = (0..5).filter(|&z| z != x && z != y).collect();
                    let t = w.coefficient(idx[rest[0]], idx[rest[1]], idx[rest[2]]);
                    if t.is_zero() {
                        continue;
                    }
                    let order = [x, y, rest[0], rest[1], rest[2]];
                    let sign = permutation_sign(&order);
                    s += c * t * Rational::from_integer(sign.into());
                }
            }
            if m % 2 == 1 {
                s = -s;
            }
            k[(m, a)] = s;
        }
    }
    Ok(k)
}

fn big_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Nonnegative rational square root, when it exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = big_sqrt_exact(q.numer())?;
    let d = big_sqrt_exact(q.denom())?;
    Some(Rational::new(n, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank3Verdict {
    Splits,
    DoesNotSplit,
    NotApplicable,
}

impl Rank3Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rank3Verdict::Splits => "splits",
            Rank3Verdict::DoesNotSplit => "does-not-split",
            Rank3Verdict::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitWitness {
    pub summands: [Trivector; 2],
    /// Three spanning vectors for each summand's support.
    pub supports: [Vec<Vec<Rational>>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitReport {
    pub dim: usize,
    pub radical_dim: usize,
    pub radical_basis: Vec<Vec<Rational>>,
    pub verdict: Rank3Verdict,
    /// `q = 0`.
    pub degenerate: bool,
    /// `K² = q·I`; absent when the rank-3 stage does not apply.
    pub q: Option<Rational>,
    pub witness: Option<SplitWitness>,
}

fn vectors_json(vs: &[Vec<Rational>]) -> serde_json::Value {
    serde_json::Value::Array(
        vs.iter()
            .map(|v| serde_json::Value::Array(v.iter().map(|c| format_rational(c).into()).collect()))
            .collect(),
    )
}

impl SplitReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "radical_dim": self.radical_dim,
            "radical_basis": vectors_json(&self.radical_basis),
            "rank3_verdict": self.verdict.as_str(),
            "degenerate": self.degenerate,
            "q": self.q.as_ref().map(format_rational),
            "witness": self.witness.as_ref().map(|w| serde_json::json!({
                "summands": [w.summands[0].to_json(), w.summands[1].to_json()],
                "supports": [vectors_json(&w.supports[0]), vectors_json(&w.supports[1])],
            })),
        })
    }
}

/// Decides whether a radical-free 6-dimensional form is a sum of two
/// decomposable forms with complementary supports.
pub fn rank3_split_dim6(w: &Trivector) -> Result<SplitReport, FormError> {
    if w.dim() != 6 {
        return Err(FormError::NotSixDimensional(w.dim()));
    }
    let rad = radical(w);
    if !rad.is_empty() {
        return Err(FormError::NonzeroRadical(rad.len()));
    }
    let k = k_endomorphism(w)?;
    let k2 = k.mul(&k)?;
    let q = k2.trace() / Rational::from_integer(6.into());
    if k2 != RatMatrix::identity(6).scale(&q) {
        return Err(FormError::Inconsistent("K² is not scalar".into()));
    }
    let mut report = SplitReport {
        dim: 6,
        radical_dim: 0,
        radical_basis: Vec::new(),
        verdict: Rank3Verdict::DoesNotSplit,
        degenerate: q.is_zero(),
        q: Some(q.clone()),
        witness: None,
    };
    if q.is_zero() {
        return Ok(report);
    }
    let Some(root) = rational_sqrt(&q) else {
        return Ok(report);
    };
    let id = RatMatrix::identity(6);
    let plus = kernel(&k.sub(&id.scale(&root)));
    let minus = kernel(&k.sub(&id.scale(&-root)));
    if plus.len() != 3 || minus.len() != 3 {
        return Err(FormError::Inconsistent(format!(
            "eigenspaces of K have dimensions {} and {}",
            plus.len(),
            minus.len()
        )));
    }
    let mut cols = plus.clone();
    cols.extend(minus.iter().cloned());
    let n = RatMatrix::from_columns(6, &cols);
    let adapted = pullback(w, &n);
    let stray = adapted.terms().any(|(t, _)| *t != [0, 1, 2] && *t != [3, 4, 5]);
    if stray {
        return Err(FormError::Inconsistent("eigenspace basis does not separate the form".into()));
    }
    let inv = n.inverse()?;
    let part = |t: [usize; 3]| -> Result<Trivector, FormError> {
        let c = adapted.coefficient(t[0], t[1], t[2]);
        let local = Trivector::from_terms(6, [(t[0], t[1], t[2], c)])?;
        Ok(pullback(&local, &inv))
    };
    let d1 = part([0, 1, 2])?;
    let d2 = part([3, 4, 5])?;
    let witness = SplitWitness {
        summands: [d1, d2],
        supports: [plus, minus],
    };
    check_witness(w, &witness)?;
    report.verdict = Rank3Verdict::Splits;
    report.witness = Some(witness);
    Ok(report)
}

/// Recombination, decomposability and complementary supports.
pub fn check_witness(w: &Trivector, witness: &SplitWitness) -> Result<(), FormError> {
    let [d1, d2] = &witness.summands;
    if &d1.add(d2)? != w {
        return Err(FormError::Inconsistent("witness does not recombine".into()));
    }
    for d in [d1, d2] {
        if d.is_zero() || !is_decomposable(d)?.decomposable {
            return Err(FormError::Inconsistent("witness summand is not decomposable".into()));
        }
    }
    let mut all = witness.supports[0].clone();
    all.extend(witness.supports[1].iter().cloned());
    let total = RatMatrix::from_rows(all).rank();
    if witness.supports[0].len() != 3 || witness.supports[1].len() != 3 || total != w.dim() {
        return Err(FormError::Inconsistent("witness supports are not complementary".into()));
    }
    Ok(())
}

/// Strips the radical and runs the rank-3 test when six dimensions remain.
/// Witness summands are reported on the original space.
pub fn analyze(w: &Trivector) -> Result<SplitReport, FormError> {
    let stripped = strip_radical(w);
    let mut report = SplitReport {
        dim: w.dim(),
        radical_dim: stripped.radical.len(),
        radical_basis: stripped.radical.clone(),
        verdict: Rank3Verdict::NotApplicable,
        degenerate: false,
        q: None,
        witness: None,
    };
    if stripped.form.dim() != 6 {
        return Ok(report);
    }
    let inner = rank3_split_dim6(&stripped.form)?;
    report.verdict = inner.verdict;
    report.degenerate = inner.degenerate;
    report.q = inner.q;
    report.witness = match inner.witness {
        Some(wit) => {
            let p = &stripped.projection;
            let c = RatMatrix::from_columns(w.dim(), &stripped.complement);
            let lift = |vs: &[Vec<Rational>]| -> Result<Vec<Vec<Rational>>, FormError> {
                vs.iter().map(|v| Ok(c.mul_vec(v)?)).collect()
            };
            let mapped = SplitWitness {
                summands: [pullback(&wit.summands[0], p), pullback(&wit.summands[1], p)],
                supports: [lift(&wit.supports[0])?, lift(&wit.supports[1])?],
            };
            if &mapped.summands[0].add(&mapped.summands[1])? != w {
                return Err(FormError::Inconsistent("lifted witness does not recombine".into()));
            }
            Some(mapped)
        }
        None => None,
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionVerdict {
    pub obstructed: bool,
    pub report: SplitReport,
}

impl ObstructionVerdict {
    pub fn summary(&self) -> &'static str {
        if self.obstructed {
            "obstructed from tree-graph-manifold cobordism"
        } else {
            "no obstruction from this invariant"
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "obstructed": self.obstructed,
            "verdict": self.summary(),
            "report": self.report.to_json(),
        })
    }
}

/// A rank-6 form with no rank-1 summand and no rank-3 split cannot be the
/// ring of a tree graph manifold.
pub fn obstruct(w: &Trivector) -> Result<ObstructionVerdict, FormError> {
    let report = analyze(w)?;
    let obstructed = w.dim() == 6 && report.radical_dim == 0 && report.verdict == Rank3Verdict::DoesNotSplit;
    Ok(ObstructionVerdict { obstructed, report })
}

#[cfg(test)]
mod tests {
    use super::super::basis_change;
    use super::*;
    use crate::exactlin::{rat, ratio};

    fn awkward() -> Trivector {
        Trivector::from_terms(6, [(0, 1, 2, rat(1)), (0, 4, 5, rat(1)), (1, 3, 4, rat(1))]).unwrap()
    }

    fn split_form() -> Trivector {
        Trivector::from_terms(6, [(0, 1, 2, rat(1)), (3, 4, 5, rat(1))]).unwrap()
    }

    #[test]
    fn radicals() {
        assert!(radical(&awkward()).is_empty());
        assert_eq!(radical(&Trivector::zero(4)).len(), 4);
        // a1 b1 s + a2 b2 s with an unused second surface slot
        let w = Trivector::from_terms(6, [(0, 1, 4, rat(1)), (2, 3, 4, rat(1))]).unwrap();
        let r = radical(&w);
        assert_eq!(r, vec![vec![rat(0), rat(0), rat(0), rat(0), rat(0), rat(1)]]);
    }

    #[test]
    fn strip_keeps_form() {
        let w = Trivector::from_terms(5, [(0, 1, 3, rat(2)), (1, 2, 3, rat(1))]).unwrap();
        let s = strip_radical(&w);
        assert_eq!(s.radical.len() + s.form.dim(), 5);
        assert_eq!(pullback(&s.form, &s.projection), w);
        assert!(radical(&s.form).is_empty());
    }

    #[test]
    fn decomposability() {
        let e = Trivector::from_terms(6, [(0, 1, 2, rat(1))]).unwrap();
        let d = is_decomposable(&e).unwrap();
        assert!(d.decomposable);
        assert_eq!(d.span_dim, 3);
        let [u, v, w] = d.factors.unwrap();
        let rebuilt = pullback(&e, &RatMatrix::identity(6));
        assert_eq!(rebuilt, e);
        let t = Trivector::from_terms(6, [(0, 1, 2, rat(1))]).unwrap();
        assert_eq!(t.evaluate(&u, &v, &w).unwrap(), rat(1));

        let d = is_decomposable(&split_form()).unwrap();
        assert!(!d.decomposable);
        assert_eq!(d.span_dim, 6);

        let f = Trivector::from_terms(6, [(0, 1, 2, rat(1)), (0, 3, 4, rat(1))]).unwrap();
        assert!(!is_decomposable(&f).unwrap().decomposable);

        // (e0 + e3)∧e1∧e2 written out
        let g = Trivector::from_terms(6, [(0, 1, 2, rat(3)), (1, 2, 3, rat(3))]).unwrap();
        assert!(is_decomposable(&g).unwrap().decomposable);
        assert_eq!(is_decomposable(&Trivector::zero(3)), Err(FormError::ZeroForm));
    }

    #[test]
    fn k_matrix_regressions() {
        let k = k_endomorphism(&split_form()).unwrap();
        let mut want = RatMatrix::identity(6);
        for i in 3..6 {
            want[(i, i)] = rat(-1);
        }
        assert_eq!(k, want);

        let k = k_endomorphism(&awkward()).unwrap();
        let mut want = RatMatrix::zeros(6, 6);
        want[(2, 4)] = rat(2);
        want[(3, 0)] = rat(-2);
        want[(5, 1)] = rat(-2);
        assert_eq!(k, want);
        assert!(k.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn awkward_form_does_not_split() {
        let r = rank3_split_dim6(&awkward()).unwrap();
        assert_eq!(r.verdict, Rank3Verdict::DoesNotSplit);
        assert!(r.degenerate);
        assert_eq!(r.q, Some(rat(0)));
        assert!(obstruct(&awkward()).unwrap().obstructed);
    }

    #[test]
    fn split_form_splits() {
        let r = rank3_split_dim6(&split_form()).unwrap();
        assert_eq!(r.verdict, Rank3Verdict::Splits);
        assert_eq!(r.q, Some(rat(1)));
        let wit = r.witness.unwrap();
        check_witness(&split_form(), &wit).unwrap();
        assert!(!obstruct(&split_form()).unwrap().obstructed);

        let scaled = Trivector::from_terms(6, [(0, 1, 2, rat(2)), (3, 4, 5, rat(3))]).unwrap();
        let r = rank3_split_dim6(&scaled).unwrap();
        assert_eq!(r.q, Some(rat(36)));
        assert_eq!(r.verdict, Rank3Verdict::Splits);
    }

    #[test]
    fn split_survives_basis_change() {
        let n = RatMatrix::from_i64(&[
            &[1, 2, 0, 0, 1, 0],
            &[0, 1, 0, 3, 0, 0],
            &[1, 0, 1, 0, 0, 2],
            &[0, 0, 0, 1, 0, 1],
            &[2, 0, 0, 0, 1, 0],
            &[0, 1, 1, 0, 0, 1],
        ]);
        let w = basis_change(&split_form(), &n).unwrap();
        let r = rank3_split_dim6(&w).unwrap();
        assert_eq!(r.verdict, Rank3Verdict::Splits);
        let det = n.determinant().unwrap();
        assert_eq!(r.q, Some(&det * &det));

        let w = basis_change(&awkward(), &n).unwrap();
        assert_eq!(rank3_split_dim6(&w).unwrap().verdict, Rank3Verdict::DoesNotSplit);
    }

    #[test]
    fn non_square_q() {
        let w = Trivector::from_terms(6, [(0, 1, 2, rat(1)), (3, 4, 5, rat(2))]).unwrap();
        assert_eq!(rank3_split_dim6(&w).unwrap().q, Some(rat(4)));

        // real part of (e0 + i e1)(e2 + i e3)(e4 + i e5)
        let w = Trivector::from_terms(
            6,
            [(0, 2, 4, rat(1)), (0, 3, 5, rat(-1)), (1, 2, 5, rat(-1)), (1, 3, 4, rat(-1))],
        )
        .unwrap();
        let r = rank3_split_dim6(&w).unwrap();
        assert_eq!(r.verdict, Rank3Verdict::DoesNotSplit);
        assert!(!r.degenerate);
        assert!(r.q.unwrap() < rat(0));

        // ace + 2(adf + bcf + bde), conjugate summands over ℚ(√2)
        let w = Trivector::from_terms(
            6,
            [(0, 2, 4, rat(1)), (0, 3, 5, rat(2)), (1, 2, 5, rat(2)), (1, 3, 4, rat(2))],
        )
        .unwrap();
        let r = rank3_split_dim6(&w).unwrap();
        assert_eq!(r.verdict, Rank3Verdict::DoesNotSplit);
        let q = r.q.unwrap();
        assert!(q > rat(0));
        assert_eq!(rational_sqrt(&q), None);
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(rational_sqrt(&rat(2)), None);
        assert_eq!(rational_sqrt(&rat(-4)), None);
    }

    #[test]
    fn analyze_strips_radical() {
        // split form on coordinates 1..=6 of a 7-space
        let w = Trivector::from_terms(7, [(1, 2, 3, rat(1)), (4, 5, 6, rat(1))]).unwrap();
        let r = analyze(&w).unwrap();
        assert_eq!(r.radical_dim, 1);
        assert_eq!(r.verdict, Rank3Verdict::Splits);
        let wit = r.witness.unwrap();
        assert_eq!(wit.summands[0].add(&wit.summands[1]).unwrap(), w);
        assert!(!obstruct(&w).unwrap().obstructed);

        let r = analyze(&Trivector::zero(3)).unwrap();
        assert_eq!(r.radical_dim, 3);
        assert_eq!(r.verdict, Rank3Verdict::NotApplicable);
        assert!(matches!(rank3_split_dim6(&w), Err(FormError::NotSixDimensional(7))));
    }
}
