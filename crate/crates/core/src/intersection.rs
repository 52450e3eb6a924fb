//! Intersection product `H₂ × H₂ → H₁` of a graph manifold, as a table over
//! the dual basis and as an alternating 3-form.
//!
//! Dual classes sit in the same order as the generators of [`H1Basis`]:
//! `A`/`B` are the tori over `α`/`β` curves, `D` the Klein bottles over `δ`
//! curves, `C` the plumbing tori over graph loops and `T` the kernel surfaces
//! dual to surviving fibers.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{format_rational, Rational};
use crate::homology::{GeneratorKind, H1Basis, Provenance, SurfaceRecipe};
use crate::plumbing::PlumbingGraph;
use crate::trivector::{basis_product, Trivector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectionError {
    #[error("table is not alternating at ({0}, {1}, {2})")]
    NotAlternating(usize, usize, usize),
    #[error("form has dimension {found}, table basis has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DualKind {
    A,
    B,
    D,
    C,
    T,
}

impl DualKind {
    pub fn of(kind: GeneratorKind) -> DualKind {
        match kind {
            GeneratorKind::Alpha => DualKind::A,
            GeneratorKind::Beta => DualKind::B,
            GeneratorKind::Delta => DualKind::D,
            GeneratorKind::Gamma => DualKind::C,
            GeneratorKind::Fiber => DualKind::T,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DualClass {
    pub kind: DualKind,
    pub provenance: Provenance,
    pub label: String,
}

/// Dual classes in generator order, labelled `A1, B1, …, D1, …, C1, …, F_<node>`.
pub fn dual_basis(basis: &H1Basis) -> Vec<DualClass> {
    basis
        .generators
        .iter()
        .map(|g| {
            let kind = DualKind::of(g.kind);
            let label = match (&g.provenance, kind) {
                (Provenance::Fiber { node }, _) => format!("F_{node}"),
                (_, DualKind::A) => g.label.replacen("alpha", "A", 1),
                (_, DualKind::B) => g.label.replacen("beta", "B", 1),
                (_, DualKind::D) => g.label.replacen("delta", "D", 1),
                _ => g.label.replacen("gamma", "C", 1),
            };
            DualClass {
                kind,
                provenance: g.provenance.clone(),
                label,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTable {
    pub basis: Vec<DualClass>,
    /// Labels of the `H₁` generators that products are written over.
    pub generators: Vec<String>,
    /// Nonzero products `(i, j)` with `i < j`.
    products: BTreeMap<(usize, usize), Vec<Rational>>,
    /// Pairs `(i, j)`, `i < j`, whose entries depend on how kernel surfaces
    /// are routed near graph loops.
    pub convention_dependent: BTreeSet<(usize, usize)>,
}

impl ProductTable {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn empty(basis: Vec<DualClass>, generators: Vec<String>) -> Self {
        ProductTable {
            basis,
            generators,
            products: BTreeMap::new(),
            convention_dependent: BTreeSet::new(),
        }
    }

    fn accumulate(&mut self, i: usize, j: usize, k: usize, c: Rational) {
        if i == j || c.is_zero() {
            return;
        }
        let (key, c) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        let n = self.dim();
        let row = self.products.entry(key).or_insert_with(|| vec![Rational::zero(); n]);
        row[k] += c;
        if row.iter().all(Zero::is_zero) {
            self.products.remove(&key);
        }
    }

    /// Product of dual classes `i` and `j` over the generators.
    pub fn entry(&self, i: usize, j: usize) -> Vec<Rational> {
        let zero = || vec![Rational::zero(); self.dim()];
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => zero(),
            std::cmp::Ordering::Less => self.products.get(&(i, j)).cloned().unwrap_or_else(zero),
            std::cmp::Ordering::Greater => self
                .products
                .get(&(j, i))
                .map(|v| v.iter().map(|c| -c).collect())
                .unwrap_or_else(zero),
        }
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<Rational>)> {
        self.products.iter()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|d| d.label == label)
    }

    /// The form with `ω(i, j, k)` equal to the `k`-th coordinate of entry
    /// `(i, j)`, after checking every ordered triple agrees with it.
    pub fn to_trivector(&self) -> Result<Trivector, IntersectionError> {
        let n = self.dim();
        let mut w = Trivector::zero(n);
        for (&(i, j), row) in &self.products {
            for (k, c) in row.iter().enumerate() {
                if j < k && !c.is_zero() {
                    w.add_term(i, j, k, c.clone()).expect("indices in range");
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let row = self.entry(i, j);
                for (k, c) in row.iter().enumerate() {
                    if *c != w.coefficient(i, j, k) {
                        return Err(IntersectionError::NotAlternating(i, j, k));
                    }
                }
            }
        }
        Ok(w)
    }

    /// Reads a table back out of a form by contraction.
    pub fn from_trivector(
        w: &Trivector,
        basis: Vec<DualClass>,
        generators: Vec<String>,
    ) -> Result<ProductTable, IntersectionError> {
        if w.dim() != basis.len() {
            return Err(IntersectionError::DimensionMismatch {
                expected: basis.len(),
                found: w.dim(),
            });
        }
        let mut t = ProductTable::empty(basis, generators);
        for i in 0..w.dim() {
            for j in i + 1..w.dim() {
                let row = basis_product(w, i, j);
                if row.iter().any(|c| !c.is_zero()) {
                    t.products.insert((i, j), row);
                }
            }
        }
        Ok(t)
    }

    /// Whether the products of two tables agree (basis metadata ignored).
    pub fn same_products(&self, other: &ProductTable) -> bool {
        self.products == other.products
    }

    pub fn format_entry(&self, v: &[Rational]) -> String {
        linear_combination(v, &self.generators)
    }

    /// Aligned square table with dual labels on both axes.
    pub fn render(&self) -> String {
        let n = self.dim();
        let mut cells: Vec<Vec<String>> = Vec::with_capacity(n + 1);
        let mut header = vec!["·".to_string()];
        header.extend(self.basis.iter().map(|d| d.label.clone()));
        cells.push(header);
        for i in 0..n {
            let mut row = vec![self.basis[i].label.clone()];
            for j in 0..n {
                let mut s = self.format_entry(&self.entry(i, j));
                let key = (i.min(j), i.max(j));
                if self.convention_dependent.contains(&key) {
                    s.push('*');
                }
                row.push(s);
            }
            cells.push(row);
        }
        let widths: Vec<usize> = (0..=n)
            .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (r, row) in cells.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, s)| format!("{s:>w$}", w = widths[c]))
                .collect();
            out.push_str(&format!("{} | {}\n", line[0], line[1..].join("  ")));
            if r == 0 {
                let total = widths[0] + 3 + widths[1..].iter().sum::<usize>() + 2 * n.saturating_sub(1);
                out.push_str(&"-".repeat(total));
                out.push('\n');
            }
        }
        if !self.convention_dependent.is_empty() {
            out.push_str("* depends on the routing of kernel surfaces near graph loops\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let table: Vec<serde_json::Value> = self
            .products
            .iter()
            .flat_map(|(&(i, j), row)| {
                row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, c)| {
                    serde_json::json!([i, j, k, format_rational(c)])
                })
            })
            .collect();
        serde_json::json!({
            "basis": self.basis,
            "generators": self.generators,
            "table": table,
            "convention_dependent": self.convention_dependent.iter().map(|(i, j)| [i, j]).collect::<Vec<_>>(),
        })
    }
}

/// `2beta1 - t_R` style rendering; `0` for the zero vector.
pub fn linear_combination(v: &[Rational], labels: &[String]) -> String {
    let mut out = String::new();
    for (c, label) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let negative = c < &Rational::zero();
        let mag = if negative { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if !mag.is_one() {
            let s = format_rational(&mag);
            if s.contains('/') {
                out.push_str(&format!("({s})"));
            } else {
                out.push_str(&s);
            }
        }
        out.push_str(label);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

/// Builds the table from the basis and one kernel surface per surviving
/// fiber.
///
/// * `A_j·B_j` is the fiber of `j`'s node.
/// * `A_j·T_k = -c β_j` and `B_j·T_k = c α_j` with `c` the scaled multiplicity
///   of `j`'s node in surface `k`.
/// * For a loop edge `e = (x, y)`, `C_e·T_k = ±(c_x t_y - c_y t_x)` with the
///   edge sign, `c` from surface `k` and `t` the fiber expressions.
/// * `T_k·T_l` is forced by alternation from the `C·T` entries.
/// * Everything else, including all of `D`, is zero.
pub fn product_table(g: &PlumbingGraph, basis: &H1Basis, surfaces: &[SurfaceRecipe]) -> ProductTable {
    assert_eq!(surfaces.len(), basis.surviving.len(), "one surface per surviving fiber");
    let duals = dual_basis(basis);
    let mut t = ProductTable::empty(duals, basis.labels());
    let r = basis.surviving.len();
    let fiber_gens: Vec<usize> = (0..r).map(|k| basis.fiber_generator(k)).collect();
    let fiber_vector = |node: &str| -> Vec<Rational> { basis.fiber_of(node).map(<[_]>::to_vec).unwrap_or_else(|| vec![Rational::zero(); r]) };

    for (i, gen) in basis.generators.iter().enumerate() {
        if gen.kind != GeneratorKind::Alpha {
            continue;
        }
        let Provenance::Base { node, index } = &gen.provenance else {
            continue;
        };
        let b = basis
            .base_generator(GeneratorKind::Beta, node, *index)
            .expect("every alpha has a beta");
        for (k, c) in fiber_vector(node).into_iter().enumerate() {
            t.accumulate(i, b, fiber_gens[k], c);
        }
        for (k, surface) in surfaces.iter().enumerate() {
            let c = surface.scaled(node);
            let tk = fiber_gens[k];
            t.accumulate(i, tk, b, -c.clone());
            t.accumulate(b, tk, i, c);
        }
    }

    for (e_index, &edge) in basis.tree.extra.iter().enumerate() {
        let ce = basis.loop_generator(edge).expect("loop generator per extra edge");
        debug_assert_eq!(basis.generators[ce].label, format!("gamma{}", e_index + 1));
        let e = &g.edges()[edge];
        let sign = Rational::from_integer(e.sign.value().into());
        let (x, y) = (&e.ends.0, &e.ends.1);
        let (tx, ty) = (fiber_vector(x), fiber_vector(y));
        for (k, surface) in surfaces.iter().enumerate() {
            let (cx, cy) = (surface.scaled(x), surface.scaled(y));
            for l in 0..r {
                let c = &sign * (&cx * &ty[l] - &cy * &tx[l]);
                t.accumulate(ce, fiber_gens[k], fiber_gens[l], c.clone());
                // ω(T_k, T_l, C_e) = ω(C_e, T_k, T_l)
                if k < l {
                    t.accumulate(fiber_gens[k], fiber_gens[l], ce, c);
                }
            }
        }
    }
    if !basis.tree.extra.is_empty() {
        for k in 0..r {
            for l in k + 1..r {
                let (a, b) = (fiber_gens[k], fiber_gens[l]);
                t.convention_dependent.insert((a.min(b), a.max(b)));
            }
        }
    }
    t
}
