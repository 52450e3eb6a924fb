//! Independent oracles and fixtures shared by the integration tests. Nothing
//! here calls into the pipeline code it is used to check, apart from reading
//! graph data.

#![allow(dead_code)]

use std::path::PathBuf;

use graphring::exactlin::{rat, RatMatrix, Rational};
use graphring::plumbing::{parse, PlumbingGraph};
use num_traits::{One, Zero};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture present")
}

pub fn fixture_graph(name: &str) -> PlumbingGraph {
    parse(&fixture_text(name)).expect("fixture parses")
}

/// Rank by plain Gaussian elimination on a row list.
pub fn rank_of(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &pivot;
                for k in 0..cols {
                    let v = &m[rank][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `H₁(M; ℚ)` read straight off a presentation: every node's fiber,
/// every crosscap curve of a nonorientable base, symplectic curves of
/// orientable bases and one loop per independent cycle, subject to one
/// relation per orientable node (`-Σ a/b · t + Σ ±t_neighbour = 0`) and, for
/// each nonorientable node, `2 Σ δ = Σ ±t_neighbour` and `t = 0`.
pub fn relation_corank(g: &PlumbingGraph) -> usize {
    let nodes = g.nodes();
    let n = nodes.len();
    let mut delta_offset = Vec::new();
    let mut next = n;
    for node in nodes {
        delta_offset.push(next);
        if node.genus < 0 {
            next += node.genus.unsigned_abs() as usize;
        }
    }
    let deltas = next - n;
    let free_curves: usize = nodes.iter().filter(|v| v.genus >= 0).map(|v| 2 * v.genus as usize).sum();
    let loops = g.edges().len() + 1 - n;
    let vars = n + deltas;

    let mut rows = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        let mut neighbours = vec![Rational::zero(); vars];
        for e in g.edges() {
            let s = rat(e.sign.value());
            if e.ends.0 == node.id {
                let k = nodes.iter().position(|v| v.id == e.ends.1).unwrap();
                neighbours[k] += &s;
            }
            if e.ends.1 == node.id {
                let k = nodes.iter().position(|v| v.id == e.ends.0).unwrap();
                neighbours[k] += &s;
            }
        }
        if node.genus >= 0 {
            let mut row = neighbours;
            let mut sum = Rational::zero();
            for f in &node.fibers {
                sum += Rational::new(f.a().into(), f.b().into());
            }
            row[i] -= sum;
            rows.push(row);
        } else {
            let mut row: Vec<Rational> = neighbours.iter().map(|c| -c).collect();
            for d in 0..node.genus.unsigned_abs() as usize {
                row[delta_offset[i] + d] = rat(2);
            }
            rows.push(row);
            let mut dead = vec![Rational::zero(); vars];
            dead[i] = Rational::one();
            rows.push(dead);
        }
    }
    vars - rank_of(&rows) + free_curves + loops
}

/// The six dual coefficients of `u·x` for `ω = abc + aef + bde`, written out
/// term by term with `u = Σ n1[i] eᵢ` and `x = Σ n4[i] eᵢ` (0-based).
pub fn product_expansion(n1: &[Rational], n4: &[Rational]) -> [Rational; 6] {
    let p = |i: usize, j: usize| &n1[i - 1] * &n4[j - 1];
    [
        p(2, 3) - p(3, 2) + p(5, 6) - p(6, 5),
        -p(1, 3) + p(3, 1) + p(4, 5) - p(5, 4),
        p(1, 2) - p(2, 1),
        -p(2, 5) + p(5, 2),
        -p(1, 6) + p(6, 1) + p(2, 4) - p(4, 2),
        p(1, 5) - p(5, 1),
    ]
}

/// Column operation of a gluing-reduction step, written as the explicit
/// matrix update: reducing the first column by `n` times the second gives
/// `[[a - nb, b], [c - nd, d]]`; the mirror step reduces the second column.
pub fn column_update(m: [i64; 4], right_side: bool, n: i64) -> [i64; 4] {
    let [a, b, c, d] = m;
    if right_side {
        [a - n * b, b, c - n * d, d]
    } else {
        [a, b - n * a, c, d - n * c]
    }
}

/// `abc + aef + bde` on `a, …, f`.
pub fn awkward_terms() -> Vec<(usize, usize, usize, Rational)> {
    vec![(0, 1, 2, rat(1)), (0, 4, 5, rat(1)), (1, 3, 4, rat(1))]
}

/// `uvw + xyz`.
pub fn split_terms() -> Vec<(usize, usize, usize, Rational)> {
    vec![(0, 1, 2, rat(1)), (3, 4, 5, rat(1))]
}

pub fn matrix(rows: &[&[Rational]]) -> RatMatrix {
    RatMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
}
