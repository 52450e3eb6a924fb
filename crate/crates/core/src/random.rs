//! Seeded random instances: trees, connected multigraphs, gluing matrices and
//! rational matrices. Everything is driven by a caller-owned ChaCha stream so
//! a seed fixes the output.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlin::{rat, RatMatrix};
use crate::plumbing::{CriticalFiber, EdgeSign, GluingMatrix, PlumbingEdge, PlumbingGraph, SeifertNode};

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_nodes: usize,
    pub max_genus: i64,
    pub max_fibers: usize,
    pub max_entry: i64,
    pub orientable_only: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_nodes: 6,
            max_genus: 2,
            max_fibers: 2,
            max_entry: 5,
            orientable_only: true,
        }
    }
}

fn nonzero(rng: &mut Stream, bound: i64) -> i64 {
    let v = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

pub fn random_fiber(rng: &mut Stream, max_entry: i64) -> CriticalFiber {
    loop {
        let b = nonzero(rng, max_entry);
        let a = rng.gen_range(1..=max_entry);
        if b.gcd(&a) == 1 {
            return CriticalFiber::new(b, a).expect("coprime with a ≥ 1");
        }
    }
}

fn random_node(rng: &mut Stream, id: String, bounds: &Bounds) -> SeifertNode {
    let genus = if !bounds.orientable_only && rng.gen_bool(0.25) {
        -rng.gen_range(1..=bounds.max_genus + 1)
    } else {
        rng.gen_range(0..=bounds.max_genus)
    };
    let count = rng.gen_range(0..=bounds.max_fibers);
    let fibers = (0..count).map(|_| random_fiber(rng, bounds.max_entry)).collect();
    SeifertNode::new(id, genus, fibers)
}

fn random_sign(rng: &mut Stream) -> EdgeSign {
    if rng.gen_bool(0.5) {
        EdgeSign::Plus
    } else {
        EdgeSign::Minus
    }
}

/// Random labelled tree: node `k > 0` attaches to a uniformly chosen earlier
/// node. Labels are `N0, N1, …`.
pub fn random_tree(rng: &mut Stream, bounds: &Bounds) -> PlumbingGraph {
    let n = rng.gen_range(1..=bounds.max_nodes.max(1));
    random_tree_with(rng, bounds, n)
}

/// [`random_tree`] with a fixed node count.
pub fn random_tree_with(rng: &mut Stream, bounds: &Bounds, n: usize) -> PlumbingGraph {
    let nodes: Vec<SeifertNode> = (0..n).map(|i| random_node(rng, format!("N{i}"), bounds)).collect();
    let edges = (1..n)
        .map(|i| {
            let j = rng.gen_range(0..i);
            PlumbingEdge::new(format!("N{j}"), format!("N{i}"), random_sign(rng))
        })
        .collect();
    PlumbingGraph::new(nodes, edges).expect("random tree is valid")
}

/// A random tree plus up to `max_extra` further edges between distinct nodes.
pub fn random_graph(rng: &mut Stream, bounds: &Bounds, max_extra: usize) -> PlumbingGraph {
    let tree = random_tree(rng, bounds);
    let n = tree.nodes().len();
    let mut edges = tree.edges().to_vec();
    if n > 1 {
        let extra = rng.gen_range(0..=max_extra);
        for _ in 0..extra {
            let mut ends: Vec<usize> = (0..n).collect();
            ends.shuffle(rng);
            edges.push(PlumbingEdge::new(
                format!("N{}", ends[0]),
                format!("N{}", ends[1]),
                random_sign(rng),
            ));
        }
    }
    PlumbingGraph::new(tree.nodes().to_vec(), edges).expect("random graph is valid")
}

/// Determinant `-1` matrix with entries in `[-max_entry, max_entry]`.
pub fn random_gluing(rng: &mut Stream, max_entry: i64) -> GluingMatrix {
    loop {
        let a = rng.gen_range(-max_entry..=max_entry);
        let b = rng.gen_range(-max_entry..=max_entry);
        if a.gcd(&b) != 1 {
            continue;
        }
        // solve a d - b c = -1 and pick a random solution within bounds
        let ext = a.extended_gcd(&b);
        let (x, y) = (ext.x, ext.y); // a x + b y = 1
        let (d0, c0) = (-x, y);
        let mut options = Vec::new();
        for t in -2 * max_entry - 2..=2 * max_entry + 2 {
            let (c, d) = (c0 + t * a, d0 + t * b);
            if c.abs() <= max_entry && d.abs() <= max_entry {
                options.push((c, d));
            }
        }
        if let Some(&(c, d)) = options.choose(rng) {
            let m = GluingMatrix::new(a, b, c, d);
            debug_assert_eq!(m.det(), -1);
            return m;
        }
    }
}

pub fn random_integer_matrix(rng: &mut Stream, rows: usize, cols: usize, max_entry: i64) -> RatMatrix {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| rat(rng.gen_range(-max_entry..=max_entry))).collect())
        .collect();
    RatMatrix::from_rows(data)
}

/// Invertible integer matrix, by rejection.
pub fn random_invertible(rng: &mut Stream, n: usize, max_entry: i64) -> RatMatrix {
    loop {
        let m = random_integer_matrix(rng, n, n, max_entry);
        if m.rank() == n {
            return m;
        }
    }
}

pub fn random_symmetric(rng: &mut Stream, n: usize, max_entry: i64) -> RatMatrix {
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rat(rng.gen_range(-max_entry..=max_entry));
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}
