//! Parallelism conditions on the rows of a candidate change of basis taking
//! `abc + aef + bde` to `uvw + xyz`.

use num_traits::Zero;

use super::{product, Trivector};
use crate::exactlin::Rational;

/// Coordinate pairs `(p, q)` whose 2×2 determinants appear as whole
/// coefficients in the expansion of a product, with the dual generator
/// carrying that coefficient: `(a,b) → C`, `(b,e) → D`, `(a,e) → F`.
pub const PARALLEL_PAIRS: [((usize, usize), usize); 3] = [((0, 1), 2), ((1, 4), 3), ((0, 4), 5)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelismReport {
    /// `(i, j, pair index)` with `i` in `{0,1,2}`, `j` in `{3,4,5}` where the
    /// projections of rows `i` and `j` onto the pair are not parallel.
    pub opp_para_violations: Vec<(usize, usize, usize)>,
    /// Pair indices along which every two rows are parallel.
    pub all_para_pairs: Vec<usize>,
    /// Dual indices forced to vanish from every product by `all_para_pairs`.
    pub forced_missing: Vec<usize>,
}

impl ParallelismReport {
    pub fn opp_para_holds(&self) -> bool {
        self.opp_para_violations.is_empty()
    }
}

fn minor(r: &[Rational], s: &[Rational], (p, q): (usize, usize)) -> Rational {
    &r[p] * &s[q] - &r[q] * &s[p]
}

/// Evaluates every parallelism condition on six row vectors `u, …, z`
/// expressed over `a, …, f`.
pub fn opp_para_check(rows: &[Vec<Rational>]) -> ParallelismReport {
    assert_eq!(rows.len(), 6, "six candidate vectors expected");
    let mut opp_para_violations = Vec::new();
    for i in 0..3 {
        for j in 3..6 {
            for (idx, (pair, _)) in PARALLEL_PAIRS.iter().enumerate() {
                if !minor(&rows[i], &rows[j], *pair).is_zero() {
                    opp_para_violations.push((i, j, idx));
                }
            }
        }
    }
    let all_para_pairs: Vec<usize> = (0..PARALLEL_PAIRS.len())
        .filter(|&idx| {
            let pair = PARALLEL_PAIRS[idx].0;
            (0..6).all(|i| (i + 1..6).all(|j| minor(&rows[i], &rows[j], pair).is_zero()))
        })
        .collect();
    let forced_missing = all_para_pairs.iter().map(|&idx| PARALLEL_PAIRS[idx].1).collect();
    ParallelismReport {
        opp_para_violations,
        all_para_pairs,
        forced_missing,
    }
}

/// Dual indices with zero coefficient in every product among `vectors`.
pub fn missing_duals(w: &Trivector, vectors: &[Vec<Rational>]) -> Vec<usize> {
    let mut seen = vec![false; w.dim()];
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let p = product(w, &vectors[i], &vectors[j]).expect("vectors match the form");
            for (k, c) in p.iter().enumerate() {
                if !c.is_zero() {
                    seen[k] = true;
                }
            }
        }
    }
    (0..w.dim()).filter(|&k| !seen[k]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn rows(data: [[i64; 6]; 6]) -> Vec<Vec<Rational>> {
        data.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    fn awkward() -> Trivector {
        Trivector::from_terms(6, [(0, 1, 2, rat(1)), (0, 4, 5, rat(1)), (1, 3, 4, rat(1))]).unwrap()
    }

    #[test]
    fn identity_rows() {
        let id = rows([
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 1],
        ]);
        let r = opp_para_check(&id);
        // a·e, b·e fail for (u, y); nothing else touches the pairs
        assert_eq!(r.opp_para_violations, vec![(0, 4, 2), (1, 4, 1)]);
        assert!(r.all_para_pairs.is_empty());
    }

    #[test]
    fn constructed_violation() {
        let mut m = rows([[0; 6]; 6]);
        m[0][0] = rat(1);
        m[3][1] = rat(1);
        let r = opp_para_check(&m);
        assert_eq!(r.opp_para_violations, vec![(0, 3, 0)]);
    }

    #[test]
    fn forced_dual_is_missing() {
        // every row has zero b-coordinate, so (a,b) and (b,e) are parallel everywhere
        let m = rows([
            [1, 0, 2, 0, 1, 0],
            [0, 0, 1, 1, 0, 0],
            [2, 0, 0, 0, 1, 1],
            [0, 0, 1, 0, 0, 3],
            [1, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 1],
        ]);
        let r = opp_para_check(&m);
        assert!(r.all_para_pairs.contains(&0));
        assert!(r.all_para_pairs.contains(&1));
        let missing = missing_duals(&awkward(), &m);
        for k in &r.forced_missing {
            assert!(missing.contains(k), "dual {k} should be missing");
        }
    }
}
