mod common;

use graphring::exactlin::{kernel, rat, ratio, RatMatrix, Rational};
use graphring::homology::{connectivity_matrix, h1_basis, kernel_surfaces};
use graphring::intersection::product_table;
use graphring::plumbing::{
    normalize, normalize_gluing, parse, parse_raw, EdgeSign, GluingMatrix, OpSide, SeifertNode,
};
use graphring::trivector::{
    analyze, basis_change, is_decomposable, missing_duals, obstruct, opp_para_check, radical, strip_radical,
    Rank3Verdict, Trivector,
};
use num_bigint::BigInt;

use common::*;

fn form(dim: usize, terms: &[(usize, usize, usize, i64)]) -> Trivector {
    Trivector::from_terms(dim, terms.iter().map(|&(i, j, k, c)| (i, j, k, rat(c))).collect::<Vec<_>>()).unwrap()
}

fn ring(name: &str) -> (Vec<String>, graphring::intersection::ProductTable) {
    let g = fixture_graph(name);
    let basis = h1_basis(&g);
    let surfaces = kernel_surfaces(&g, &basis);
    (basis.labels(), product_table(&g, &basis, &surfaces))
}

#[test]
fn two_node_kernel_is_one_dimensional() {
    let a = connectivity_matrix(&fixture_graph("two_node.txt")).matrix;
    let k = kernel(&a);
    assert_eq!(k.len(), 1);
    // proportional to (-1, 2)
    assert_eq!(&k[0][0] * rat(-2), k[0][1]);
}

#[test]
fn two_node_fiber_expression() {
    let basis = h1_basis(&fixture_graph("two_node.txt"));
    assert_eq!(basis.surviving, ["P"]);
    assert_eq!(basis.fiber_of("S"), Some(&[ratio(-1, 2)][..]));
    assert_eq!(basis.len(), 5);
}

#[test]
fn chain_ring_entries() {
    let (labels, t) = ring("chain.txt");
    assert_eq!(labels, ["alpha1", "beta1", "alpha2", "beta2", "alpha3", "beta3", "t_R"]);
    let ab = |i: usize| t.format_entry(&t.entry(i, i + 1));
    assert_eq!([ab(0), ab(2), ab(4)], ["2t_R", "-t_R", "t_R"]);
    let w = t.to_trivector().unwrap();
    assert_eq!(w, form(7, &[(0, 1, 6, 2), (2, 3, 6, -1), (4, 5, 6, 1)]));
}

#[test]
fn triangle_orientable_subgraph_drops_p() {
    let g = fixture_graph("triangle.txt");
    let sub = g.orientable_subgraph();
    let ids: Vec<&str> = sub.nodes().iter().map(|n| n.id.as_str()).collect();
    assert_eq!(ids, ["Q", "R"]);
    let basis = h1_basis(&g);
    assert_eq!(basis.rank.r, 1);
    assert_eq!(basis.rank.b, 1);
    assert_eq!(basis.rank.g_minus, 2);
}

#[test]
fn triangle_surface_needs_two_copies() {
    let g = fixture_graph("triangle.txt");
    let basis = h1_basis(&g);
    let s = &kernel_surfaces(&g, &basis)[0];
    assert_eq!(s.multiplicity("R"), BigInt::from(2));
    assert_eq!(s.multiplicity("Q"), BigInt::from(-4));
    assert_eq!(s.scale, ratio(1, 2));
    assert_eq!(s.scaled("R"), rat(1));
}

#[test]
fn triangle_render_lists_every_row() {
    let (_, t) = ring("triangle.txt");
    let text = t.render();
    for label in ["A1", "B1", "A2", "B2", "D1", "D2", "C1", "F_R"] {
        assert!(text.contains(label), "{label} missing from\n{text}");
    }
    assert!(t.convention_dependent.is_empty());
}

#[test]
fn genus_two_product_form() {
    let g = parse("node S genus 2\n").unwrap();
    let basis = h1_basis(&g);
    let surfaces = kernel_surfaces(&g, &basis);
    let w = product_table(&g, &basis, &surfaces).to_trivector().unwrap();
    assert_eq!(w, form(5, &[(0, 1, 4, 1), (2, 3, 4, 1)]));
    let d = is_decomposable(&w).unwrap();
    assert!(!d.decomposable);
    assert_eq!(radical(&w).len(), 0);
}

#[test]
fn radical_examples() {
    assert_eq!(radical(&Trivector::zero(4)).len(), 4);
    assert_eq!(radical(&form(4, &[(0, 1, 2, 1)])), vec![vec![rat(0), rat(0), rat(0), rat(1)]]);
    assert!(radical(&form(6, &[(0, 1, 2, 1), (0, 4, 5, 1), (1, 3, 4, 1)])).is_empty());

    let stripped = strip_radical(&form(5, &[(0, 1, 3, 1), (0, 1, 4, 1)]));
    assert_eq!(stripped.radical.len(), 2);
    assert_eq!(stripped.form.dim(), 3);
}

#[test]
fn decomposability_examples() {
    let d = is_decomposable(&form(3, &[(0, 1, 2, 5)])).unwrap();
    assert!(d.decomposable);
    assert_eq!(d.span_dim, 3);

    // (a + b) ∧ c ∧ d
    let d = is_decomposable(&form(4, &[(0, 2, 3, 1), (1, 2, 3, 1)])).unwrap();
    assert!(d.decomposable);
    let [u, v, w] = d.factors.unwrap();
    let mut rebuilt = Trivector::zero(4);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let c = &u[i] * &v[j] * &w[k];
                if i < j && j < k {
                    rebuilt.add_term(i, j, k, c).unwrap();
                } else if let Some((t, s)) = graphring::trivector::sort_triple(i, j, k) {
                    rebuilt.add_term(t[0], t[1], t[2], c * rat(s.into())).unwrap();
                }
            }
        }
    }
    assert_eq!(rebuilt, form(4, &[(0, 2, 3, 1), (1, 2, 3, 1)]));

    assert!(!is_decomposable(&Trivector::from_terms(6, awkward_terms()).unwrap()).unwrap().decomposable);
    assert!(is_decomposable(&Trivector::zero(3)).is_err());
}

#[test]
fn standard_basis_violates_opposite_parallelism() {
    let rows: Vec<Vec<Rational>> = (0..6).map(|i| RatMatrix::identity(6).row(i).to_vec()).collect();
    let report = opp_para_check(&rows);
    assert!(!report.opp_para_holds());
    assert!(report.opp_para_violations.contains(&(0, 4, 2)));
    assert!(report.all_para_pairs.is_empty());
}

#[test]
fn parallel_rows_force_missing_duals() {
    // every row has zero first and second coordinate, so all (a,b) minors vanish
    let rows: Vec<Vec<Rational>> = (0..6)
        .map(|i| (0..6).map(|k| if k >= 2 { rat(((i * 7 + k * 3) % 5) as i64 - 2) } else { rat(0) }).collect())
        .collect();
    let report = opp_para_check(&rows);
    assert!(report.all_para_pairs.contains(&0));
    let w = Trivector::from_terms(6, awkward_terms()).unwrap();
    let missing = missing_duals(&w, &rows);
    for k in report.forced_missing {
        assert!(missing.contains(&k));
    }
}

#[test]
fn awkward_form_is_obstructed() {
    let w = Trivector::from_json(&fixture_text("awkward.json")).unwrap();
    let v = obstruct(&w).unwrap();
    assert!(v.obstructed);
    assert_eq!(v.report.q, Some(rat(0)));
    assert!(v.report.degenerate);
}

#[test]
fn split_fixture_and_padded_copy() {
    let w = Trivector::from_json(&fixture_text("split.json")).unwrap();
    assert_eq!(analyze(&w).unwrap().verdict, Rank3Verdict::Splits);

    let padded = form(7, &[(0, 1, 2, 1), (3, 4, 5, 1)]);
    let r = analyze(&padded).unwrap();
    assert_eq!(r.radical_dim, 1);
    assert_eq!(r.verdict, Rank3Verdict::Splits);
    assert_eq!(basis_change(&padded, &RatMatrix::identity(7)).unwrap(), padded);
}

#[test]
fn identity_gluing_needs_no_fibers() {
    let x = SeifertNode::new("X", 0, vec![]);
    let out = normalize_gluing(&GluingMatrix::new(0, 1, 1, 0), &x, &x);
    assert!(out.trace.is_empty());
    assert_eq!(out.sign, EdgeSign::Plus);
    let out = normalize_gluing(&GluingMatrix::new(0, -1, -1, 0), &x, &x);
    assert!(out.trace.is_empty());
    assert_eq!(out.sign, EdgeSign::Minus);
}

#[test]
fn lower_triangular_gluing_takes_three_steps() {
    let x = SeifertNode::new("X", 0, vec![]);
    let y = SeifertNode::new("Y", 0, vec![]);
    let m = GluingMatrix::new(1, 0, 2, -1);
    let out = normalize_gluing(&m, &x, &y);
    let sides: Vec<OpSide> = out.trace.iter().map(|op| op.side).collect();
    assert_eq!(sides, [OpSide::Left, OpSide::Right, OpSide::Left]);
    assert_eq!(out.replay_backward(), m);
    assert_eq!(out.left.fibers.len(), 2);
    assert_eq!(out.right.fibers.len(), 1);
}

#[test]
fn self_loop_resolution_keeps_first_betti() {
    let raw = parse_raw(&fixture_text("loops.txt")).unwrap();
    assert!(raw.has_self_loops());
    let (g, log) = normalize(&raw).unwrap();
    assert_eq!(log.resolved_loops, 1);
    assert_eq!(g.nodes().len(), 4);
    assert_eq!(g.first_betti(), 1);
    assert!(g.node("X~0").is_some() && g.node("X~1").is_some());
    assert_eq!(log.gluings.len(), 1);
}

#[test]
fn loops_mark_fiber_products_convention_dependent() {
    // opposite-sign parallel edges cancel in the connectivity matrix, leaving a star
    let g = parse(
        "node Y genus 0\nnode X genus 0\nnode Z genus 0\nnode W genus 0\n\
         edge Y X +\nedge Y Z +\nedge Y W +\nedge X Z +\nedge X Z -\n",
    )
    .unwrap();
    let basis = h1_basis(&g);
    assert_eq!((basis.rank.r, basis.rank.b), (2, 2));
    let surfaces = kernel_surfaces(&g, &basis);
    let t = product_table(&g, &basis, &surfaces);
    assert!(!t.convention_dependent.is_empty());
    t.to_trivector().unwrap();
}
