//! Reduction of a determinant `-1` gluing matrix to `±J` by column
//! operations, each realized by adding a critical fiber of type `1/n`.

use super::{CriticalFiber, EdgeSign, GluingMatrix, SeifertNode};

/// Which column is reduced, and therefore which piece receives the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpSide {
    /// `col0 -= n·col1`, i.e. `[[a - nb, b], [c - nd, d]]`. The second-listed
    /// (right) piece gains a `1/n` fiber.
    Right,
    /// `col1 -= n·col0`. The first-listed (left) piece gains a `1/n` fiber.
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnOp {
    pub side: OpSide,
    pub n: i64,
}

impl ColumnOp {
    pub fn apply(&self, m: &GluingMatrix) -> GluingMatrix {
        let n = self.n;
        match self.side {
            OpSide::Right => GluingMatrix::new(m.a - n * m.b, m.b, m.c - n * m.d, m.d),
            OpSide::Left => GluingMatrix::new(m.a, m.b - n * m.a, m.c, m.d - n * m.c),
        }
    }

    pub fn undo(&self, m: &GluingMatrix) -> GluingMatrix {
        ColumnOp {
            side: self.side,
            n: -self.n,
        }
        .apply(m)
    }

    pub fn fiber(&self) -> CriticalFiber {
        CriticalFiber::unit_over(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingNormalization {
    pub sign: EdgeSign,
    pub left: SeifertNode,
    pub right: SeifertNode,
    /// Operations in the order they were applied to the original matrix.
    pub trace: Vec<ColumnOp>,
}

impl GluingNormalization {
    /// Applies the trace to `original`; the result should be `sign·J`.
    pub fn replay_forward(&self, original: &GluingMatrix) -> GluingMatrix {
        self.trace.iter().fold(*original, |m, op| op.apply(&m))
    }

    /// Undoes the trace starting from `sign·J`, recovering the original matrix.
    pub fn replay_backward(&self) -> GluingMatrix {
        self.trace
            .iter()
            .rev()
            .fold(GluingMatrix::signed_j(self.sign), |m, op| op.undo(&m))
    }
}

/// Euclid on the first row with alternating column operations until the
/// matrix is antidiagonal, then clears the last diagonal entry. Operations
/// with `n = 0` are skipped.
///
/// Panics if `det(m) != -1`.
pub fn normalize_gluing(m: &GluingMatrix, left: &SeifertNode, right: &SeifertNode) -> GluingNormalization {
    assert_eq!(m.det(), -1, "gluing matrix must have determinant -1");
    let mut cur = *m;
    let mut trace = Vec::new();
    let mut push = |cur: &mut GluingMatrix, side: OpSide, n: i64| {
        if n != 0 {
            let op = ColumnOp { side, n };
            *cur = op.apply(cur);
            trace.push(op);
        }
    };
    while cur.a != 0 {
        if cur.b == 0 {
            // det = ad = -1 so a = ±1; make b = a, next step zeroes a
            push(&mut cur, OpSide::Left, -1);
        } else if cur.a.abs() >= cur.b.abs() {
            let n = cur.a / cur.b;
            push(&mut cur, OpSide::Right, n);
        } else {
            let n = cur.b / cur.a;
            push(&mut cur, OpSide::Left, n);
        }
    }
    // a = 0 forces b = c = ±1
    let n = cur.d / cur.c;
    push(&mut cur, OpSide::Left, n);
    let sign = cur.as_sign().expect("reduction ends at ±J");

    let mut left = left.clone();
    let mut right = right.clone();
    for op in &trace {
        match op.side {
            OpSide::Right => right.fibers.push(op.fiber()),
            OpSide::Left => left.fibers.push(op.fiber()),
        }
    }
    GluingNormalization {
        sign,
        left,
        right,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blank(id: &str) -> SeifertNode {
        SeifertNode::new(id, 0, vec![])
    }

    #[test]
    fn plus_and_minus_j_are_fixed() {
        for (m, s) in [
            (GluingMatrix::J, EdgeSign::Plus),
            (GluingMatrix::new(0, -1, -1, 0), EdgeSign::Minus),
        ] {
            let out = normalize_gluing(&m, &blank("M"), &blank("N"));
            assert_eq!(out.sign, s);
            assert!(out.trace.is_empty());
            assert_eq!(out.left, blank("M"));
            assert_eq!(out.right, blank("N"));
        }
    }

    #[test]
    fn single_column_operation() {
        // [[n,1],[1,0]] - n·col1 = J
        let m = GluingMatrix::new(5, 1, 1, 0);
        let out = normalize_gluing(&m, &blank("M"), &blank("N"));
        assert_eq!(out.sign, EdgeSign::Plus);
        assert_eq!(out.trace, vec![ColumnOp { side: OpSide::Right, n: 5 }]);
        assert_eq!(out.right.fibers, vec![CriticalFiber::new(1, 5).unwrap()]);
        assert!(out.left.fibers.is_empty());
    }

    #[test]
    fn lower_triangular_input() {
        // [[1,0],[n,-1]] needs three operations
        let m = GluingMatrix::new(1, 0, 4, -1);
        let out = normalize_gluing(&m, &blank("M"), &blank("N"));
        assert_eq!(out.replay_forward(&m), GluingMatrix::signed_j(out.sign));
        assert_eq!(out.replay_backward(), m);
        assert_eq!(out.trace.len(), 3);
        assert_eq!(out.left.fibers.len() + out.right.fibers.len(), 3);
    }

    #[test]
    fn column_update_rule() {
        let m = GluingMatrix::new(3, 2, 7, 5);
        let op = ColumnOp { side: OpSide::Right, n: 2 };
        assert_eq!(op.apply(&m), GluingMatrix::new(3 - 2 * 2, 2, 7 - 2 * 5, 5));
        assert_eq!(op.undo(&op.apply(&m)), m);
    }
}
