//! Decorated plumbing graphs.
//!
//! A node is a Seifert fibered piece: a base surface of signed genus (negative
//! genus `-g` is the connected sum of `g` projective planes) together with its
//! critical fibers. An edge plumbs two pieces by `+J` or `-J`.
//!
//! [`RawGraph`] is what a document describes before validation: it may carry
//! self-loops and arbitrary determinant `-1` gluing matrices. [`normalize`]
//! turns it into a [`PlumbingGraph`].

mod gluing;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{ratio, Rational};

pub use gluing::{normalize_gluing, ColumnOp, GluingNormalization, OpSide};
pub use parse::{parse, parse_json, parse_raw, parse_raw_json, to_json, to_text};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlumbingError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid JSON document: {0}")]
    Json(String),
    #[error("self-loop at node `{0}`")]
    SelfLoop(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no nodes")]
    Empty,
    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),
    #[error("edge refers to unknown node `{0}`")]
    UnknownNode(String),
    #[error("critical fiber {b}/{a} is not a coprime pair with a >= 1 and b != 0")]
    BadFiber { b: i64, a: i64 },
    #[error("gluing matrix [{a} {b}; {c} {d}] has determinant {det}, expected -1")]
    GluingDeterminant {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        det: i64,
    },
    #[error("edge {0}-{1} carries a raw gluing matrix; run normalization first")]
    UnnormalizedGluing(String, String),
    #[error("invalid node label `{0}`")]
    BadLabel(String),
}

/// Critical fiber with framing `b/a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalFiber {
    b: i64,
    a: i64,
}

impl CriticalFiber {
    pub fn new(b: i64, a: i64) -> Result<Self, PlumbingError> {
        if b == 0 || a < 1 || b.gcd(&a) != 1 {
            return Err(PlumbingError::BadFiber { b, a });
        }
        Ok(CriticalFiber { b, a })
    }

    /// The fiber of type `1/n` added by one column operation.
    pub fn unit_over(n: i64) -> Self {
        assert!(n != 0, "1/0 is not a critical fiber");
        CriticalFiber {
            b: n.signum(),
            a: n.abs(),
        }
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    /// `a/b`, the quantity entering the connectivity matrix.
    pub fn a_over_b(&self) -> Rational {
        ratio(self.a, self.b)
    }

    /// Whether `0 < a < |b|` holds. Only a lint: fibers of type `1/n` and
    /// `n/1` are accepted everywhere.
    pub fn within_framing_bound(&self) -> bool {
        0 < self.a && self.a < self.b.abs()
    }
}

impl fmt::Display for CriticalFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.b, self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertNode {
    pub id: String,
    /// Negative values denote nonorientable bases.
    pub genus: i64,
    pub fibers: Vec<CriticalFiber>,
}

impl SeifertNode {
    pub fn new(id: impl Into<String>, genus: i64, fibers: Vec<CriticalFiber>) -> Self {
        SeifertNode {
            id: id.into(),
            genus,
            fibers,
        }
    }

    pub fn is_orientable(&self) -> bool {
        self.genus >= 0
    }

    /// `Σ a/b` over the critical fibers.
    pub fn fiber_sum(&self) -> Rational {
        self.fibers.iter().map(CriticalFiber::a_over_b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSign {
    Plus,
    Minus,
}

impl EdgeSign {
    pub fn value(self) -> i64 {
        match self {
            EdgeSign::Plus => 1,
            EdgeSign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(EdgeSign::Plus),
            -1 => Some(EdgeSign::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            EdgeSign::Plus => '+',
            EdgeSign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlumbingEdge {
    pub ends: (String, String),
    pub sign: EdgeSign,
}

impl PlumbingEdge {
    pub fn new(left: impl Into<String>, right: impl Into<String>, sign: EdgeSign) -> Self {
        PlumbingEdge {
            ends: (left.into(), right.into()),
            sign,
        }
    }
}

/// Torus gluing `μ ↦ aμ + cλ`, `λ ↦ bμ + dλ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GluingMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GluingMatrix {
    pub const J: GluingMatrix = GluingMatrix {
        a: 0,
        b: 1,
        c: 1,
        d: 0,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        GluingMatrix { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn validate(&self) -> Result<(), PlumbingError> {
        let det = self.det();
        if det != -1 {
            return Err(PlumbingError::GluingDeterminant {
                a: self.a,
                b: self.b,
                c: self.c,
                d: self.d,
                det,
            });
        }
        Ok(())
    }

    /// `Some(sign)` when the matrix is `±J`.
    pub fn as_sign(&self) -> Option<EdgeSign> {
        match (self.a, self.b, self.c, self.d) {
            (0, 1, 1, 0) => Some(EdgeSign::Plus),
            (0, -1, -1, 0) => Some(EdgeSign::Minus),
            _ => None,
        }
    }

    pub fn signed_j(sign: EdgeSign) -> Self {
        let s = sign.value();
        GluingMatrix::new(0, s, s, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gluing {
    Sign(EdgeSign),
    Matrix(GluingMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdge {
    pub ends: (String, String),
    pub gluing: Gluing,
}

/// Unvalidated graph as written in a document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawGraph {
    pub nodes: Vec<SeifertNode>,
    pub edges: Vec<RawEdge>,
}

impl RawGraph {
    /// Replaces every self-loop at `X` by `X - X~kA - X~kB - X` through two
    /// genus-0 fiberless pieces. The first two edges are `+J`; the closing
    /// edge keeps the loop's original gluing.
    pub fn resolve_self_loops(&self) -> RawGraph {
        let mut taken: BTreeSet<String> = self.nodes.iter().map(|n| n.id.clone()).collect();
        let mut fresh = |base: &str| -> String {
            let mut k = 0;
            loop {
                let candidate = format!("{base}~{k}");
                if taken.insert(candidate.clone()) {
                    return candidate;
                }
                k += 1;
            }
        };
        let mut out = RawGraph {
            nodes: self.nodes.clone(),
            edges: Vec::with_capacity(self.edges.len()),
        };
        for edge in &self.edges {
            if edge.ends.0 != edge.ends.1 {
                out.edges.push(edge.clone());
                continue;
            }
            let x = &edge.ends.0;
            let first = fresh(x);
            let second = fresh(x);
            out.nodes.push(SeifertNode::new(first.clone(), 0, vec![]));
            out.nodes.push(SeifertNode::new(second.clone(), 0, vec![]));
            let plus = Gluing::Sign(EdgeSign::Plus);
            out.edges.push(RawEdge {
                ends: (x.clone(), first.clone()),
                gluing: plus,
            });
            out.edges.push(RawEdge {
                ends: (first, second.clone()),
                gluing: plus,
            });
            out.edges.push(RawEdge {
                ends: (second, x.clone()),
                gluing: edge.gluing,
            });
        }
        out
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|e| e.ends.0 == e.ends.1)
    }
}

/// Record of what [`normalize`] changed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalizationLog {
    pub resolved_loops: usize,
    /// `(edge index in the output, normalization)` for every raw matrix edge.
    pub gluings: Vec<(usize, GluingNormalization)>,
}

/// Resolves self-loops, reduces every gluing matrix to `±J` and validates.
pub fn normalize(raw: &RawGraph) -> Result<(PlumbingGraph, NormalizationLog), PlumbingError> {
    let resolved = raw.resolve_self_loops();
    let mut log = NormalizationLog {
        resolved_loops: raw.edges.iter().filter(|e| e.ends.0 == e.ends.1).count(),
        gluings: vec![],
    };
    let index: HashMap<String, usize> = resolved
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.clone(), i))
        .collect();
    let mut nodes = resolved.nodes.clone();
    let mut edges = Vec::with_capacity(resolved.edges.len());
    for (k, edge) in resolved.edges.iter().enumerate() {
        let sign = match edge.gluing {
            Gluing::Sign(s) => s,
            Gluing::Matrix(m) => {
                m.validate()?;
                let li = *index
                    .get(&edge.ends.0)
                    .ok_or_else(|| PlumbingError::UnknownNode(edge.ends.0.clone()))?;
                let ri = *index
                    .get(&edge.ends.1)
                    .ok_or_else(|| PlumbingError::UnknownNode(edge.ends.1.clone()))?;
                let result = normalize_gluing(&m, &nodes[li], &nodes[ri]);
                nodes[li] = result.left.clone();
                nodes[ri] = result.right.clone();
                let sign = result.sign;
                log.gluings.push((k, result));
                sign
            }
        };
        edges.push(PlumbingEdge {
            ends: edge.ends.clone(),
            sign,
        });
    }
    Ok((PlumbingGraph::new(nodes, edges)?, log))
}

/// Validated plumbing graph: unique labels, no self-loops, connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    nodes: Vec<SeifertNode>,
    edges: Vec<PlumbingEdge>,
}

/// Maximal tree and the remaining edges, as edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub tree: Vec<usize>,
    pub extra: Vec<usize>,
}

impl PlumbingGraph {
    pub fn new(nodes: Vec<SeifertNode>, edges: Vec<PlumbingEdge>) -> Result<Self, PlumbingError> {
        let g = Self::unchecked(nodes, edges)?;
        if g.nodes.is_empty() {
            return Err(PlumbingError::Empty);
        }
        if !g.is_connected() {
            return Err(PlumbingError::Disconnected);
        }
        Ok(g)
    }

    /// Checks everything except connectivity.
    fn unchecked(nodes: Vec<SeifertNode>, edges: Vec<PlumbingEdge>) -> Result<Self, PlumbingError> {
        let mut seen = BTreeSet::new();
        for node in &nodes {
            if !parse::valid_label(&node.id) {
                return Err(PlumbingError::BadLabel(node.id.clone()));
            }
            if !seen.insert(node.id.as_str()) {
                return Err(PlumbingError::DuplicateNode(node.id.clone()));
            }
            for f in &node.fibers {
                CriticalFiber::new(f.b, f.a)?;
            }
        }
        for edge in &edges {
            for end in [&edge.ends.0, &edge.ends.1] {
                if !seen.contains(end.as_str()) {
                    return Err(PlumbingError::UnknownNode(end.clone()));
                }
            }
            if edge.ends.0 == edge.ends.1 {
                return Err(PlumbingError::SelfLoop(edge.ends.0.clone()));
            }
        }
        Ok(PlumbingGraph { nodes, edges })
    }

    pub fn nodes(&self) -> &[SeifertNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[PlumbingEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&SeifertNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Endpoint indices of edge `k`.
    pub fn edge_endpoints(&self, k: usize) -> (usize, usize) {
        let e = &self.edges[k];
        (
            self.node_index(&e.ends.0).expect("validated edge"),
            self.node_index(&e.ends.1).expect("validated edge"),
        )
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut uf = UnionFind::new(self.nodes.len());
        for k in 0..self.edges.len() {
            let (i, j) = self.edge_endpoints(k);
            uf.union(i, j);
        }
        let root = uf.find(0);
        (0..self.nodes.len()).all(|i| uf.find(i) == root)
    }

    /// `|edges| - |nodes| + |components|`.
    pub fn first_betti(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        let mut cycles = 0;
        for k in 0..self.edges.len() {
            let (i, j) = self.edge_endpoints(k);
            if !uf.union(i, j) {
                cycles += 1;
            }
        }
        cycles
    }

    pub fn is_tree(&self) -> bool {
        self.first_betti() == 0
    }

    /// Greedy maximal tree: edges are taken in document order and kept unless
    /// they close a cycle.
    pub fn spanning_tree(&self) -> SpanningTree {
        let mut uf = UnionFind::new(self.nodes.len());
        let mut tree = Vec::new();
        let mut extra = Vec::new();
        for k in 0..self.edges.len() {
            let (i, j) = self.edge_endpoints(k);
            if uf.union(i, j) {
                tree.push(k);
            } else {
                extra.push(k);
            }
        }
        SpanningTree { tree, extra }
    }

    /// Induced subgraph on the orientable nodes. It may be disconnected or
    /// empty.
    pub fn orientable_subgraph(&self) -> PlumbingGraph {
        let nodes: Vec<SeifertNode> = self
            .nodes
            .iter()
            .filter(|n| n.is_orientable())
            .cloned()
            .collect();
        let keep: BTreeSet<&str> = nodes.iter().map(|n| n.id.as_str()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(e.ends.0.as_str()) && keep.contains(e.ends.1.as_str()))
            .cloned()
            .collect();
        PlumbingGraph { nodes, edges }
    }

    /// Signed edge count between each pair of node indices.
    pub fn signed_adjacency(&self) -> BTreeMap<(usize, usize), i64> {
        let mut adj = BTreeMap::new();
        for k in 0..self.edges.len() {
            let (i, j) = self.edge_endpoints(k);
            let s = self.edges[k].sign.value();
            *adj.entry((i, j)).or_insert(0) += s;
            *adj.entry((j, i)).or_insert(0) += s;
        }
        adj
    }

    /// Warnings for critical fibers outside `0 < a < |b|`.
    pub fn lints(&self) -> Vec<String> {
        self.nodes
            .iter()
            .flat_map(|n| {
                n.fibers
                    .iter()
                    .filter(|f| !f.within_framing_bound())
                    .map(move |f| {
                        format!(
                            "node {}: fiber {} is outside the framing range 0 < a < |b|",
                            n.id, f
                        )
                    })
            })
            .collect()
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RawEdge {
                    ends: e.ends.clone(),
                    gluing: Gluing::Sign(e.sign),
                })
                .collect(),
        }
    }
}

impl TryFrom<RawGraph> for PlumbingGraph {
    type Error = PlumbingError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        let mut edges = Vec::with_capacity(raw.edges.len());
        for e in raw.edges {
            let sign = match e.gluing {
                Gluing::Sign(s) => s,
                Gluing::Matrix(m) => {
                    m.validate()?;
                    m.as_sign()
                        .ok_or_else(|| PlumbingError::UnnormalizedGluing(e.ends.0.clone(), e.ends.1.clone()))?
                }
            };
            if e.ends.0 == e.ends.1 {
                return Err(PlumbingError::SelfLoop(e.ends.0));
            }
            edges.push(PlumbingEdge { ends: e.ends, sign });
        }
        PlumbingGraph::new(raw.nodes, edges)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[rb] = ra;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib(b: i64, a: i64) -> CriticalFiber {
        CriticalFiber::new(b, a).unwrap()
    }

    fn triangle() -> PlumbingGraph {
        PlumbingGraph::new(
            vec![
                SeifertNode::new("P", -3, vec![fib(1, 1)]),
                SeifertNode::new("Q", 1, vec![fib(-1, 2)]),
                SeifertNode::new("R", 1, vec![fib(-2, 1)]),
            ],
            vec![
                PlumbingEdge::new("P", "Q", EdgeSign::Plus),
                PlumbingEdge::new("Q", "R", EdgeSign::Plus),
                PlumbingEdge::new("R", "P", EdgeSign::Plus),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fiber_validation() {
        assert!(CriticalFiber::new(2, 4).is_err());
        assert!(CriticalFiber::new(0, 1).is_err());
        assert!(CriticalFiber::new(3, 0).is_err());
        assert!(CriticalFiber::new(3, -2).is_err());
        assert_eq!(CriticalFiber::unit_over(-4), fib(-1, 4));
        assert!(fib(5, 2).within_framing_bound());
        assert!(!fib(1, 1).within_framing_bound());
    }

    #[test]
    fn orientable_subgraph_of_triangle() {
        let h = triangle().orientable_subgraph();
        let ids: Vec<&str> = h.nodes().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["Q", "R"]);
        assert_eq!(h.edges(), &[PlumbingEdge::new("Q", "R", EdgeSign::Plus)]);
    }

    #[test]
    fn orientable_subgraph_extremes() {
        let all = PlumbingGraph::new(
            vec![SeifertNode::new("A", 0, vec![]), SeifertNode::new("B", 2, vec![])],
            vec![PlumbingEdge::new("A", "B", EdgeSign::Minus)],
        )
        .unwrap();
        assert_eq!(all.orientable_subgraph(), all);
        let none = PlumbingGraph::new(
            vec![SeifertNode::new("A", -1, vec![]), SeifertNode::new("B", -2, vec![])],
            vec![PlumbingEdge::new("A", "B", EdgeSign::Plus)],
        )
        .unwrap();
        let h = none.orientable_subgraph();
        assert!(h.nodes().is_empty() && h.edges().is_empty());
    }

    #[test]
    fn spanning_trees() {
        let t = triangle().spanning_tree();
        assert_eq!(t.tree, vec![0, 1]);
        assert_eq!(t.extra, vec![2]);

        let multi = PlumbingGraph::new(
            vec![SeifertNode::new("A", 0, vec![]), SeifertNode::new("B", 0, vec![])],
            vec![
                PlumbingEdge::new("A", "B", EdgeSign::Plus),
                PlumbingEdge::new("B", "A", EdgeSign::Minus),
                PlumbingEdge::new("A", "B", EdgeSign::Plus),
            ],
        )
        .unwrap();
        let t = multi.spanning_tree();
        assert_eq!(t.tree.len(), 1);
        assert_eq!(t.extra.len(), 2);
        assert_eq!(multi.first_betti(), 2);
    }

    #[test]
    fn validation_errors() {
        let looped = PlumbingGraph::new(
            vec![SeifertNode::new("P", 0, vec![])],
            vec![PlumbingEdge::new("P", "P", EdgeSign::Plus)],
        );
        assert_eq!(looped, Err(PlumbingError::SelfLoop("P".into())));
        let split = PlumbingGraph::new(
            vec![SeifertNode::new("P", 0, vec![]), SeifertNode::new("Q", 0, vec![])],
            vec![],
        );
        assert_eq!(split, Err(PlumbingError::Disconnected));
        let dup = PlumbingGraph::new(
            vec![SeifertNode::new("P", 0, vec![]), SeifertNode::new("P", 1, vec![])],
            vec![],
        );
        assert_eq!(dup, Err(PlumbingError::DuplicateNode("P".into())));
    }

    #[test]
    fn self_loop_resolution() {
        let raw = RawGraph {
            nodes: vec![SeifertNode::new("X", 1, vec![])],
            edges: vec![RawEdge {
                ends: ("X".into(), "X".into()),
                gluing: Gluing::Sign(EdgeSign::Minus),
            }],
        };
        let (g, log) = normalize(&raw).unwrap();
        assert_eq!(log.resolved_loops, 1);
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.first_betti(), 1);
        assert!(g.nodes()[1..].iter().all(|n| n.genus == 0 && n.fibers.is_empty()));
        assert_eq!(g.edges()[2].sign, EdgeSign::Minus);

        let twice = RawGraph {
            nodes: raw.nodes.clone(),
            edges: vec![raw.edges[0].clone(), raw.edges[0].clone()],
        };
        let (g, _) = normalize(&twice).unwrap();
        assert_eq!(g.nodes().len(), 5);
        assert_eq!(g.edges().len(), 6);
        assert_eq!(g.first_betti(), 2);

        let plain = triangle().to_raw();
        assert_eq!(plain.resolve_self_loops(), plain);
    }
}
