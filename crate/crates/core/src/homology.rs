//! First rational homology of a graph manifold.
//!
//! Generators come in five kinds: symplectic pairs `α, β` on orientable bases,
//! `δ` curves on nonorientable bases (one per crosscap but the last), graph
//! loops `γ` (one per edge outside the maximal tree) and the regular fibers
//! that survive over ℚ. Which fibers survive is decided by the connectivity
//! matrix of the orientable subgraph: the free columns of its rref.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactlin::{clear_denominators, free_column_basis, rat, RatMatrix, Rational};
use crate::plumbing::{PlumbingGraph, SpanningTree};

/// Symmetric matrix over the orientable nodes: `-Σ a/b` on the diagonal and
/// signed edge counts off it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityMatrix {
    pub order: Vec<String>,
    pub matrix: RatMatrix,
}

pub fn connectivity_matrix(g: &PlumbingGraph) -> ConnectivityMatrix {
    let h = g.orientable_subgraph();
    let n = h.nodes().len();
    let mut matrix = RatMatrix::zeros(n, n);
    for (i, node) in h.nodes().iter().enumerate() {
        matrix[(i, i)] = -node.fiber_sum();
    }
    for ((i, j), count) in h.signed_adjacency() {
        matrix[(i, j)] = rat(count);
    }
    ConnectivityMatrix {
        order: h.nodes().iter().map(|n| n.id.clone()).collect(),
        matrix,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Alpha,
    Beta,
    Delta,
    Gamma,
    Fiber,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "from", rename_all = "lowercase")]
pub enum Provenance {
    /// `index` counts from 1 within the node's base surface.
    Base { node: String, index: usize },
    /// Edge index in the graph document.
    Loop { edge: usize },
    Fiber { node: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub provenance: Provenance,
    pub label: String,
}

impl Generator {
    pub fn node(&self) -> Option<&str> {
        match &self.provenance {
            Provenance::Base { node, .. } | Provenance::Fiber { node } => Some(node),
            Provenance::Loop { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankParts {
    pub b: usize,
    pub r: usize,
    pub g_plus_doubled: usize,
    pub g_minus: usize,
}

impl RankParts {
    pub fn total(&self) -> usize {
        self.b + self.r + self.g_plus_doubled + self.g_minus
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Basis {
    pub generators: Vec<Generator>,
    /// Nodes whose fibers are the surviving generators, in generator order.
    pub surviving: Vec<String>,
    /// Every node's regular fiber over the surviving fibers, in node order.
    pub fiber_expression: Vec<(String, Vec<Rational>)>,
    pub rank: RankParts,
    pub connectivity: ConnectivityMatrix,
    pub tree: SpanningTree,
}

impl H1Basis {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn fiber_of(&self, node: &str) -> Option<&[Rational]> {
        self.fiber_expression
            .iter()
            .find(|(n, _)| n == node)
            .map(|(_, v)| v.as_slice())
    }

    /// Position of the `k`-th surviving fiber among the generators.
    pub fn fiber_generator(&self, k: usize) -> usize {
        self.position(|g| matches!(&g.provenance, Provenance::Fiber { node } if *node == self.surviving[k]))
            .expect("surviving fiber has a generator")
    }

    pub fn base_generator(&self, kind: GeneratorKind, node: &str, index: usize) -> Option<usize> {
        self.position(|g| {
            g.kind == kind && matches!(&g.provenance, Provenance::Base { node: n, index: i } if n == node && *i == index)
        })
    }

    pub fn loop_generator(&self, edge: usize) -> Option<usize> {
        self.position(|g| g.provenance == Provenance::Loop { edge })
    }

    fn position(&self, pred: impl Fn(&Generator) -> bool) -> Option<usize> {
        self.generators.iter().position(pred)
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.label.clone()).collect()
    }
}

pub fn h1_basis(g: &PlumbingGraph) -> H1Basis {
    let connectivity = connectivity_matrix(g);
    let tree = g.spanning_tree();
    let (free, null_vectors) = free_column_basis(&connectivity.matrix);
    let surviving: Vec<String> = free.iter().map(|&c| connectivity.order[c].clone()).collect();

    let mut generators = Vec::new();
    let mut pair = 0;
    for node in g.nodes().iter().filter(|n| n.is_orientable()) {
        for index in 1..=node.genus as usize {
            pair += 1;
            for (kind, name) in [(GeneratorKind::Alpha, "alpha"), (GeneratorKind::Beta, "beta")] {
                generators.push(Generator {
                    kind,
                    provenance: Provenance::Base {
                        node: node.id.clone(),
                        index,
                    },
                    label: format!("{name}{pair}"),
                });
            }
        }
    }
    let mut deltas = 0;
    for node in g.nodes().iter().filter(|n| !n.is_orientable()) {
        // the last crosscap curve is eliminated by the boundary relation
        for index in 1..node.genus.unsigned_abs() as usize {
            deltas += 1;
            generators.push(Generator {
                kind: GeneratorKind::Delta,
                provenance: Provenance::Base {
                    node: node.id.clone(),
                    index,
                },
                label: format!("delta{deltas}"),
            });
        }
    }
    for (k, &edge) in tree.extra.iter().enumerate() {
        generators.push(Generator {
            kind: GeneratorKind::Gamma,
            provenance: Provenance::Loop { edge },
            label: format!("gamma{}", k + 1),
        });
    }
    for node in &surviving {
        generators.push(Generator {
            kind: GeneratorKind::Fiber,
            provenance: Provenance::Fiber { node: node.clone() },
            label: format!("t_{node}"),
        });
    }

    let r = surviving.len();
    let fiber_expression = g
        .nodes()
        .iter()
        .map(|node| {
            let expr = match connectivity.order.iter().position(|id| *id == node.id) {
                Some(row) => null_vectors.iter().map(|v| v[row].clone()).collect(),
                None => vec![Rational::zero(); r],
            };
            (node.id.clone(), expr)
        })
        .collect();

    let rank = RankParts {
        b: tree.extra.len(),
        r,
        g_plus_doubled: g
            .nodes()
            .iter()
            .filter(|n| n.is_orientable())
            .map(|n| 2 * n.genus as usize)
            .sum(),
        g_minus: g
            .nodes()
            .iter()
            .filter(|n| !n.is_orientable())
            .map(|n| n.genus.unsigned_abs() as usize - 1)
            .sum(),
    };
    debug_assert_eq!(rank.total(), generators.len());

    H1Basis {
        generators,
        surviving,
        fiber_expression,
        rank,
        connectivity,
        tree,
    }
}

/// Integer combination of orientable base surfaces closing up to a surface
/// dual to one surviving fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceRecipe {
    /// The surviving fiber this surface is dual to.
    pub fiber: String,
    /// Copies of each orientable base, in connectivity order.
    pub multiplicities: Vec<(String, BigInt)>,
    /// Punctured Klein bottles needed in each nonorientable piece touched by
    /// the surface.
    pub klein_caps: Vec<(String, BigInt)>,
    /// `scale · multiplicity(fiber) = 1`.
    pub scale: Rational,
}

impl SurfaceRecipe {
    pub fn multiplicity(&self, node: &str) -> BigInt {
        self.multiplicities
            .iter()
            .find(|(n, _)| n == node)
            .map_or_else(BigInt::zero, |(_, c)| c.clone())
    }

    /// Multiplicity of `node` in the dual class, i.e. after scaling.
    pub fn scaled(&self, node: &str) -> Rational {
        Rational::from_integer(self.multiplicity(node)) * &self.scale
    }

    /// Intersection number with the regular fiber of `node`.
    pub fn pairing(&self, node: &str) -> Rational {
        self.scaled(node)
    }
}

/// One recipe per surviving fiber, in the order of `basis.surviving`.
pub fn kernel_surfaces(g: &PlumbingGraph, basis: &H1Basis) -> Vec<SurfaceRecipe> {
    let order = &basis.connectivity.order;
    (0..basis.surviving.len())
        .map(|k| {
            let column: Vec<Rational> = order
                .iter()
                .map(|id| basis.fiber_of(id).expect("orientable node")[k].clone())
                .collect();
            let (mut ints, _) = clear_denominators(&column);

            // boundary left on each nonorientable piece, as a multiple of its fiber
            let residues = nonorientable_residues(g, order, &ints);
            if residues.values().any(|r| r.is_odd()) {
                for c in &mut ints {
                    *c *= 2;
                }
            }
            let klein_caps = nonorientable_residues(g, order, &ints)
                .into_iter()
                .map(|(node, r)| (node, r.abs() / 2))
                .collect();

            let own = order
                .iter()
                .position(|id| *id == basis.surviving[k])
                .expect("surviving node is orientable");
            debug_assert!(ints[own].is_positive());
            let scale = Rational::new(BigInt::one(), ints[own].clone());
            SurfaceRecipe {
                fiber: basis.surviving[k].clone(),
                multiplicities: order.iter().cloned().zip(ints).collect(),
                klein_caps,
                scale,
            }
        })
        .collect()
}

fn nonorientable_residues(g: &PlumbingGraph, order: &[String], ints: &[BigInt]) -> BTreeMap<String, BigInt> {
    let mut out = BTreeMap::new();
    for e in g.edges() {
        let (x, y) = (&e.ends.0, &e.ends.1);
        for (inner, outer) in [(x, y), (y, x)] {
            let Some(i) = order.iter().position(|id| id == inner) else {
                continue;
            };
            if g.node(outer).is_some_and(|n| !n.is_orientable()) {
                *out.entry(outer.clone()).or_insert_with(BigInt::zero) += &ints[i] * e.sign.value();
            }
        }
    }
    out
}
