//! Connected sums of block rings for tree graph manifolds.
//!
//! Each orientable node contributes the ring of a closed surface times a
//! circle. Blocks are glued over `T = ℚ[F₁,…,F_r]/⟨FᵢFⱼ⟩` (plain `ℚ` when no
//! fiber survives): the base torus class of block `i` goes to
//! `Σₖ (1/cᵢₖ) Fₖ` where `cᵢₖ` is the node's integer multiplicity in the
//! `k`-th kernel surface (terms with `cᵢₖ = 0` dropped), fundamental classes
//! are identified along a chain, and each fiber is set equal to its expression
//! over the surviving fibers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{format_rational, RatMatrix, Rational};
use crate::homology::{h1_basis, kernel_surfaces, GeneratorKind, H1Basis, SurfaceRecipe};
use crate::intersection::{product_table, IntersectionError};
use crate::plumbing::PlumbingGraph;
use crate::trivector::{basis_change, FormError, Trivector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsumError {
    #[error("graph has a cycle: {0} edge(s) outside a spanning tree")]
    NotTree(usize),
    #[error("node {0} has a nonorientable base")]
    Nonorientable(String),
    #[error("glue pattern invalid: {0}")]
    InvalidGlue(String),
    #[error("coefficient ({i}, {j}, {k}) differs: direct {direct}, connected sum {consum}")]
    Mismatch {
        i: usize,
        j: usize,
        k: usize,
        direct: String,
        consum: String,
    },
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Cohomology of `Σ̂_g × S¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRing {
    pub label: String,
    pub genus: usize,
}

impl BlockRing {
    /// Ranks in degrees 0 through 3.
    pub fn ranks(&self) -> [usize; 4] {
        let n = 2 * self.genus + 1;
        [1, n, n, 1]
    }

    /// `Σ αᵢ∧βᵢ∧t` over `A₁, B₁, …, A_g, B_g, Σ`.
    pub fn form(&self) -> Trivector {
        let t = 2 * self.genus;
        Trivector::from_terms(
            t + 1,
            (0..self.genus).map(|i| (2 * i, 2 * i + 1, t, Rational::one())),
        )
        .expect("indices in range")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Plain connected sum: only degree 0 is matched.
    Rational,
    /// `ℚ[F₁,…,F_r]/⟨FᵢFⱼ⟩`.
    Truncated { generators: usize },
}

/// A surface class of the glued ring, given by integer copies of block torus
/// classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedSurface {
    pub label: String,
    pub components: Vec<(String, BigInt)>,
}

impl SharedSurface {
    pub fn multiplicity(&self, block: &str) -> BigInt {
        self.components
            .iter()
            .find(|(b, _)| b == block)
            .map_or_else(BigInt::zero, |(_, c)| c.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluePattern {
    pub target: Target,
    /// Image of each block's torus class, as coefficients on `F₁, …, F_r`.
    pub epsilon: Vec<(String, Vec<Rational>)>,
    /// Consecutive fundamental classes set equal.
    pub iota: Vec<(String, String)>,
    /// Fibers of non-reference blocks over the reference fibers.
    pub fiber_identifications: Vec<(String, Vec<Rational>)>,
    /// Blocks whose fibers stay as generators, one per surviving fiber.
    pub references: Vec<String>,
}

impl GluePattern {
    fn epsilon_of(&self, block: &str) -> Option<&[Rational]> {
        self.epsilon.iter().find(|(b, _)| b == block).map(|(_, v)| v.as_slice())
    }

    /// `ε(ι(1))` for a block, in coordinates `(1, F₁, …, F_r)`. Fundamental
    /// classes have degree 3 and `ε` only sees degrees 0 and 1.
    pub fn epsilon_iota(&self, _block: &str) -> Vec<Rational> {
        let r = match self.target {
            Target::Rational => 0,
            Target::Truncated { generators } => generators,
        };
        vec![Rational::zero(); r + 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPresentation {
    pub blocks: Vec<BlockRing>,
    pub glue: GluePattern,
    pub surfaces: Vec<SharedSurface>,
    /// More than one surviving fiber: the glue goes beyond a single `F`.
    pub extended: bool,
}

impl RingPresentation {
    /// Generators of the fiber product before taking the quotient: the unit,
    /// block `A`/`B` tori, shared surfaces, block curves, block fibers and
    /// block fundamental classes.
    pub fn generating_set(&self) -> Vec<String> {
        let mut out = vec!["1".to_string()];
        for b in &self.blocks {
            for i in 1..=b.genus {
                out.push(format!("A{i}_{}", b.label));
                out.push(format!("B{i}_{}", b.label));
            }
        }
        out.extend(self.surfaces.iter().map(|s| s.label.clone()));
        for b in &self.blocks {
            for i in 1..=b.genus {
                out.push(format!("alpha{i}_{}", b.label));
                out.push(format!("beta{i}_{}", b.label));
            }
        }
        out.extend(self.blocks.iter().map(|b| format!("t_{}", b.label)));
        out.extend(self.blocks.iter().map(|b| format!("M_{}", b.label)));
        out
    }

    /// Ranks of the quotient in degrees 0 through 3.
    pub fn quotient_ranks(&self) -> [usize; 4] {
        let ab: usize = self.blocks.iter().map(|b| 2 * b.genus).sum();
        let curves = ab + self.blocks.len() - self.glue.fiber_identifications.len();
        let surfaces = ab + self.surfaces.len();
        let tops = self.blocks.len() - self.glue.iota.len();
        [1, curves, surfaces, tops]
    }

    /// Labels of the quotient's surface basis: block `A`/`B` classes, then
    /// shared surfaces.
    pub fn basis_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for i in 1..=b.genus {
                out.push(format!("A{i}_{}", b.label));
                out.push(format!("B{i}_{}", b.label));
            }
        }
        out.extend(self.surfaces.iter().map(|s| s.label.clone()));
        out
    }

    /// Fiber of a block over the reference fibers.
    pub fn fiber_of(&self, block: &str) -> Vec<Rational> {
        let r = self.glue.references.len();
        if let Some(k) = self.glue.references.iter().position(|b| b == block) {
            let mut v = vec![Rational::zero(); r];
            v[k] = Rational::one();
            return v;
        }
        self.glue
            .fiber_identifications
            .iter()
            .find(|(b, _)| b == block)
            .map_or_else(|| vec![Rational::zero(); r], |(_, v)| v.clone())
    }

    /// Checks `ε∘ι` agreement, that every shared surface lies in the fiber
    /// product, and the rank bookkeeping.
    pub fn validate(&self) -> Result<(), ConsumError> {
        let first = self.blocks.first().map(|b| self.glue.epsilon_iota(&b.label));
        for b in &self.blocks {
            if Some(self.glue.epsilon_iota(&b.label)) != first {
                return Err(ConsumError::InvalidGlue(format!("ε∘ι differs on {}", b.label)));
            }
        }
        for (k, s) in self.surfaces.iter().enumerate() {
            if self.glue.target == Target::Rational {
                continue;
            }
            for (block, c) in &s.components {
                if c.is_zero() {
                    continue;
                }
                let eps = self
                    .glue
                    .epsilon_of(block)
                    .ok_or_else(|| ConsumError::InvalidGlue(format!("no ε for {block}")))?;
                if Rational::from_integer(c.clone()) * &eps[k] != Rational::one() {
                    return Err(ConsumError::InvalidGlue(format!(
                        "{} does not map to F{} in block {block}",
                        s.label,
                        k + 1
                    )));
                }
            }
        }
        let [d0, d1, d2, d3] = self.quotient_ranks();
        if d0 != 1 || d3 != 1 || d1 != d2 {
            return Err(ConsumError::InvalidGlue(format!("ranks ({d0}, {d1}, {d2}, {d3})")));
        }
        Ok(())
    }

    /// Plain connected sum of blocks: each block keeps its own fiber and its
    /// own torus class.
    pub fn pure(blocks: Vec<BlockRing>) -> RingPresentation {
        let iota = blocks
            .windows(2)
            .map(|w| (w[0].label.clone(), w[1].label.clone()))
            .collect();
        let surfaces = blocks
            .iter()
            .map(|b| SharedSurface {
                label: format!("S_{}", b.label),
                components: vec![(b.label.clone(), BigInt::one())],
            })
            .collect();
        let references = blocks.iter().map(|b| b.label.clone()).collect();
        RingPresentation {
            blocks,
            glue: GluePattern {
                target: Target::Rational,
                epsilon: Vec::new(),
                iota,
                fiber_identifications: Vec::new(),
                references,
            },
            surfaces,
            extended: false,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vec_json = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        serde_json::json!({
            "blocks": self.blocks.iter().map(|b| serde_json::json!({
                "label": b.label, "genus": b.genus, "ranks": b.ranks(),
            })).collect::<Vec<_>>(),
            "target": match self.glue.target {
                Target::Rational => "Q".to_string(),
                Target::Truncated { generators } => format!("Q[F1..F{generators}]/(FiFj)"),
            },
            "epsilon": self.glue.epsilon.iter().map(|(b, v)| serde_json::json!({"block": b, "image": vec_json(v)})).collect::<Vec<_>>(),
            "iota": self.glue.iota,
            "fiber_identifications": self.glue.fiber_identifications.iter().map(|(b, v)| serde_json::json!({"block": b, "over_references": vec_json(v)})).collect::<Vec<_>>(),
            "references": self.glue.references,
            "surfaces": self.surfaces.iter().map(|s| serde_json::json!({
                "label": s.label,
                "components": s.components.iter().map(|(b, c)| serde_json::json!([b, c.to_string()])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "generating_set": self.generating_set(),
            "quotient_ranks": self.quotient_ranks(),
            "extended_glue": self.extended,
        })
    }
}

fn require_orientable_tree(g: &PlumbingGraph) -> Result<(), ConsumError> {
    if !g.is_tree() {
        return Err(ConsumError::NotTree(g.first_betti()));
    }
    if let Some(n) = g.nodes().iter().find(|n| !n.is_orientable()) {
        return Err(ConsumError::Nonorientable(n.id.clone()));
    }
    Ok(())
}

pub fn build_connected_sum(
    g: &PlumbingGraph,
    basis: &H1Basis,
    surfaces: &[SurfaceRecipe],
) -> Result<RingPresentation, ConsumError> {
    require_orientable_tree(g)?;
    let r = basis.surviving.len();
    let blocks: Vec<BlockRing> = g
        .nodes()
        .iter()
        .map(|n| BlockRing {
            label: n.id.clone(),
            genus: n.genus as usize,
        })
        .collect();
    let epsilon = blocks
        .iter()
        .map(|b| {
            let image = surfaces
                .iter()
                .map(|s| {
                    let c = s.multiplicity(&b.label);
                    if c.is_zero() {
                        Rational::zero()
                    } else {
                        Rational::new(BigInt::one(), c)
                    }
                })
                .collect();
            (b.label.clone(), image)
        })
        .collect();
    let iota = blocks
        .windows(2)
        .map(|w| (w[0].label.clone(), w[1].label.clone()))
        .collect();
    let fiber_identifications = blocks
        .iter()
        .filter(|b| !basis.surviving.contains(&b.label))
        .map(|b| {
            let v = basis.fiber_of(&b.label).expect("node in basis").to_vec();
            (b.label.clone(), v)
        })
        .collect();
    let shared = surfaces
        .iter()
        .enumerate()
        .map(|(k, s)| SharedSurface {
            label: format!("sigma{}", k + 1),
            components: s.multiplicities.clone(),
        })
        .collect();
    let p = RingPresentation {
        blocks,
        glue: GluePattern {
            target: Target::Truncated { generators: r },
            epsilon,
            iota,
            fiber_identifications,
            references: basis.surviving.clone(),
        },
        surfaces: shared,
        extended: r > 1,
    };
    p.validate()?;
    Ok(p)
}

/// The form of the glued ring over [`RingPresentation::basis_labels`]:
/// `ω(Aᵢ, Bᵢ, σₗ)` is the coefficient of the block fiber against `σₗ`.
pub fn presentation_to_trivector(p: &RingPresentation) -> Trivector {
    let ab: usize = p.blocks.iter().map(|b| 2 * b.genus).sum();
    let dim = ab + p.surfaces.len();
    let mut w = Trivector::zero(dim);
    let mut offset = 0;
    for b in &p.blocks {
        let fiber = p.fiber_of(&b.label);
        for (l, s) in p.surfaces.iter().enumerate() {
            let c: Rational = p
                .glue
                .references
                .iter()
                .zip(&fiber)
                .map(|(reference, e)| e * Rational::from_integer(s.multiplicity(reference)))
                .sum();
            for i in 0..b.genus {
                w.add_term(offset + 2 * i, offset + 2 * i + 1, ab + l, c.clone())
                    .expect("indices in range");
            }
        }
        offset += 2 * b.genus;
    }
    w
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsumCheckReport {
    pub presentation: RingPresentation,
    /// Columns: images of the glued ring's surface basis in the dual basis of
    /// the direct computation.
    pub basis_map: RatMatrix,
    pub direct: Trivector,
    pub glued: Trivector,
}

impl ConsumCheckReport {
    pub fn to_json(&self) -> serde_json::Value {
        let map: Vec<Vec<String>> = (0..self.basis_map.rows())
            .map(|i| self.basis_map.row(i).iter().map(format_rational).collect())
            .collect();
        serde_json::json!({
            "presentation": self.presentation.to_json(),
            "basis_labels": self.presentation.basis_labels(),
            "basis_map": map,
            "direct": self.direct.to_json(),
            "connected_sum": self.glued.to_json(),
            "match": true,
        })
    }
}

/// Builds both forms and the change of basis between them; fails with the
/// first coefficient that disagrees.
pub fn check_theorem_5_3(g: &PlumbingGraph) -> Result<ConsumCheckReport, ConsumError> {
    require_orientable_tree(g)?;
    let basis = h1_basis(g);
    let surfaces = kernel_surfaces(g, &basis);
    let direct = product_table(g, &basis, &surfaces).to_trivector()?;
    let presentation = build_connected_sum(g, &basis, &surfaces)?;
    let glued = presentation_to_trivector(&presentation);
    let n = direct.dim();
    if glued.dim() != n {
        return Err(ConsumError::InvalidGlue(format!(
            "glued ring has {} surfaces, direct computation {n}",
            glued.dim()
        )));
    }

    let mut map = RatMatrix::zeros(n, n);
    let mut col = 0;
    for b in &presentation.blocks {
        for i in 1..=b.genus {
            for kind in [GeneratorKind::Alpha, GeneratorKind::Beta] {
                let row = basis.base_generator(kind, &b.label, i).expect("block curve in basis");
                map[(row, col)] = Rational::one();
                col += 1;
            }
        }
    }
    for (l, s) in surfaces.iter().enumerate() {
        map[(basis.fiber_generator(l), col)] = s.scale.recip();
        col += 1;
    }

    let pulled = basis_change(&direct, &map)?;
    if pulled != glued {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b) = (pulled.coefficient(i, j, k), glued.coefficient(i, j, k));
                    if a != b {
                        return Err(ConsumError::Mismatch {
                            i,
                            j,
                            k,
                            direct: format_rational(&a),
                            consum: format_rational(&b),
                        });
                    }
                }
            }
        }
    }
    Ok(ConsumCheckReport {
        presentation,
        basis_map: map,
        direct,
        glued,
    })
}
