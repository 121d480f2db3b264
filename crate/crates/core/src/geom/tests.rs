use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

use super::export::{to_off, to_svg_path};
use super::*;

fn p2(x: f64, y: f64) -> RealVector {
    rvec(&[x, y])
}

fn box_points(d: usize, h: f64) -> Vec<RealVector> {
    (0..1usize << d).map(|m| RealVector::from_iterator(d, (0..d).map(|i| if m >> i & 1 == 1 { h } else { -h }))).collect()
}

fn sorted(mut v: Vec<RealVector>) -> Vec<RealVector> {
    v.sort_by(lex_cmp);
    v
}

fn close(a: &[RealVector], b: &[RealVector], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

#[test]
fn hull_drops_interior_point() {
    let pts = [p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0), p2(1.0, 1.0), p2(0.5, 0.5)];
    let h = convex_hull(&pts).unwrap();
    assert_eq!(h.n_vertices(), 4);
    assert_eq!(h.vertices()[0], p2(0.0, 0.0));
    assert!(h.vertices().iter().all(|v| v != &p2(0.5, 0.5)));
}

#[test]
fn hull_of_cube() {
    let h = convex_hull(&box_points(3, 1.0)).unwrap();
    assert_eq!((h.n_vertices(), h.n_edges(), h.n_facets()), (8, 12, 6));
    assert!(h.facets().iter().all(|f| f.vertices.len() == 4));
}

#[test]
fn hull_of_circle_points_keeps_all() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    use rand::{Rng, SeedableRng};
    let pts: Vec<RealVector> = (0..50)
        .map(|_| {
            let t: f64 = rng.gen_range(0.0..2.0 * PI);
            p2(t.cos(), t.sin())
        })
        .collect();
    // oracle: each p is the unique maximizer of <p, .> over the set
    let extreme = pts.iter().enumerate().all(|(i, p)| pts.iter().enumerate().all(|(j, q)| i == j || p.dot(p) > p.dot(q)));
    assert!(extreme);
    let h = convex_hull(&pts).unwrap();
    assert_eq!(h.n_vertices(), 50);
    assert!(close(h.vertices(), &sorted(pts), 0.0));
}

#[test]
fn hull_rejects_degenerate_input() {
    let pts = [p2(0.0, 0.0), p2(1.0, 1.0), p2(2.0, 2.0)];
    assert_eq!(convex_hull(&pts), Err(GeomError::DegenerateHull));
    let flat = [rvec(&[0.0, 0.0, 0.0]), rvec(&[1.0, 0.0, 0.0]), rvec(&[0.0, 1.0, 0.0]), rvec(&[1.0, 1.0, 0.0])];
    assert_eq!(convex_hull(&flat), Err(GeomError::DegenerateHull));
}

fn hp(n: &[f64], o: f64) -> Hyperplane {
    Hyperplane::new(rvec(n), o).unwrap()
}

#[test]
fn halfspace_square() {
    let hs = [hp(&[1.0, 0.0], 1.0), hp(&[-1.0, 0.0], 1.0), hp(&[0.0, 1.0], 1.0), hp(&[0.0, -1.0], 1.0)];
    let p = halfspace_intersection(&hs).unwrap();
    assert!(close(p.vertices(), &sorted(box_points(2, 1.0)), 1e-12));
}

#[test]
fn halfspace_octahedron_matches_vertex_enumeration() {
    let signs: Vec<[f64; 3]> = (0..8).map(|m| [0, 1, 2].map(|i| if m >> i & 1 == 1 { 1.0 } else { -1.0 })).collect();
    let hs: Vec<Hyperplane> = signs.iter().map(|s| Hyperplane { normal: rvec(s) / 3f64.sqrt(), offset: 3.0 / 3f64.sqrt() }).collect();
    let p = halfspace_intersection(&hs).unwrap();
    // oracle: solve every 3x3 system of active constraints, keep feasible solutions
    let mut oracle: Vec<RealVector> = Vec::new();
    for t in signs.iter().combinations(3) {
        let m = Matrix3::from_rows(&[t[0], t[1], t[2]].map(|s| Vector3::from_row_slice(s).transpose()));
        let Some(inv) = m.try_inverse() else { continue };
        let x = inv * Vector3::new(3.0, 3.0, 3.0);
        let x = rvec(&[x[0], x[1], x[2]]);
        if signs.iter().all(|s| rvec(s).dot(&x) <= 3.0 + 1e-9) && oracle.iter().all(|y| (y - &x).norm() > 1e-9) {
            oracle.push(x);
        }
    }
    assert_eq!(oracle.len(), 6);
    assert!(close(p.vertices(), &sorted(oracle), 1e-9));
    assert_eq!(p.n_facets(), 8);
}

#[test]
fn halfspace_infeasible_and_unbounded() {
    let hs = [hp(&[1.0, 0.0], 1.0), hp(&[-1.0, 0.0], -2.0), hp(&[0.0, 1.0], 1.0), hp(&[0.0, -1.0], 1.0)];
    assert_eq!(halfspace_intersection(&hs), Err(GeomError::Empty));
    let open = [hp(&[1.0, 0.0], 1.0), hp(&[0.0, 1.0], 1.0)];
    assert_eq!(halfspace_intersection(&open), Err(GeomError::Unbounded));
    assert_eq!(Hyperplane::new(rvec(&[0.0, 0.0]), 1.0), Err(GeomError::ZeroVector));
}

fn segment(a: RealVector) -> Body {
    let b = -&a;
    Body::from_points(a.len(), &[b, a])
}

#[test]
fn minkowski_examples() {
    let sq = Body::from_points(2, &box_points(2, 1.0));
    let zero = Body::point(p2(0.0, 0.0));
    assert!(minkowski_sum(&sq, &zero).unwrap().hausdorff(&sq) < 1e-12);
    let s = minkowski_sum(&segment(p2(1.0, 0.0)), &segment(p2(0.0, 1.0))).unwrap();
    assert!(close(&s.vertices(), &sorted(box_points(2, 1.0)), 1e-12));
    let hex = minkowski_sum(&s, &segment(p2(1.0, 1.0))).unwrap();
    let expected = [p2(2.0, 2.0), p2(2.0, 0.0), p2(0.0, -2.0), p2(-2.0, -2.0), p2(-2.0, 0.0), p2(0.0, 2.0)];
    assert!(close(&hex.vertices(), &sorted(expected.to_vec()), 1e-12));
    // oracle: hull of all 8 signed generator sums
    let gens = [p2(1.0, 0.0), p2(0.0, 1.0), p2(1.0, 1.0)];
    let sums: Vec<RealVector> = (0..8).map(|m| (0..3).map(|i| if m >> i & 1 == 1 { gens[i].clone() } else { -&gens[i] }).sum()).collect();
    assert!(Body::from_points(2, &sums).hausdorff(&hex) < 1e-12);
    let cube = Body::from_points(3, &box_points(3, 1.0));
    assert_eq!(minkowski_sum(&sq, &cube), Err(GeomError::DimensionMismatch(2, 3)));
}

#[test]
fn minkowski_difference_examples() {
    let sq = Body::from_points(2, &box_points(2, 1.0));
    let d = minkowski_diff_segment(&sq, &p2(0.5, 0.0)).unwrap();
    // oracle: the slab intersection [-1,1]² ∩ ([-1,1]² ± (0.5, 0)) directly
    let slab = Body::from_points(2, &[p2(-0.5, -1.0), p2(0.5, -1.0), p2(-0.5, 1.0), p2(0.5, 1.0)]);
    assert!(d.hausdorff(&slab) < 1e-12);
    assert!(minkowski_diff_segment(&sq, &p2(0.0, 0.0)).unwrap().hausdorff(&sq) < 1e-12);
    assert!(minkowski_diff_segment(&sq, &p2(2.0, 0.0)).unwrap().is_empty());
    let flat = minkowski_diff_segment(&sq, &p2(1.0, 0.0)).unwrap();
    assert_eq!(flat.affine_dim(), 1);
}

#[test]
fn measure_examples() {
    let sq = convex_hull(&[p2(0.0, 0.0), p2(1.0, 0.0), p2(0.0, 1.0), p2(1.0, 1.0)]).unwrap();
    let m = polytope_measure(&sq);
    assert!((m.volume - 1.0).abs() < 1e-15);
    assert_eq!(m.facets.len(), 4);
    assert!(m.facets.iter().all(|(_, a)| (a - 1.0).abs() < 1e-15));

    let oct: Vec<RealVector> = (0..3).flat_map(|i| [3.0, -3.0].map(|s| RealVector::from_fn(3, |j, _| if i == j { s } else { 0.0 }))).collect();
    let m = polytope_measure(&convex_hull(&oct).unwrap());
    // 8 simplices of volume 27/6
    assert!((m.volume - 36.0).abs() < 1e-9);
    assert_eq!(m.facets.len(), 8);
    assert!(m.facets.iter().all(|(_, a)| (a - 4.5 * 3f64.sqrt()).abs() < 1e-9));
}

fn zonotope_points(gens: &[RealVector]) -> Vec<RealVector> {
    let d = gens[0].len();
    (0..1usize << gens.len())
        .map(|m| gens.iter().enumerate().fold(RealVector::zeros(d), |acc, (i, g)| if m >> i & 1 == 1 { acc + g } else { acc }))
        .collect()
}

fn mcmullen_volume(gens: &[RealVector]) -> f64 {
    let d = gens[0].len();
    gens.iter()
        .combinations(d)
        .map(|c| nalgebra::DMatrix::from_columns(&c.into_iter().cloned().collect::<Vec<_>>()).determinant().abs())
        .sum()
}

#[test]
fn zonotope_volume_matches_mcmullen() {
    let gens2 = [p2(1.0, 0.0), p2(0.3, 1.0), p2(-0.7, 0.4), p2(0.2, -0.9)];
    let m = polytope_measure(&convex_hull(&zonotope_points(&gens2)).unwrap());
    assert!((m.volume - mcmullen_volume(&gens2)).abs() < 1e-9);
    let gens3 = [rvec(&[1.0, 0.0, 0.0]), rvec(&[0.0, 1.0, 0.2]), rvec(&[0.1, 0.3, 1.0]), rvec(&[1.0, 1.0, 1.0]), rvec(&[-0.5, 0.7, 0.2])];
    let m = polytope_measure(&convex_hull(&zonotope_points(&gens3)).unwrap());
    assert!((m.volume - mcmullen_volume(&gens3)).abs() < 1e-9);
}

#[test]
fn off_and_svg_format() {
    let cube = convex_hull(&box_points(3, 1.0)).unwrap();
    let off = to_off(&cube).unwrap();
    let lines: Vec<&str> = off.lines().collect();
    assert_eq!(lines[0], "OFF");
    assert_eq!(lines[1], "8 6 12");
    assert_eq!(lines[2], "-1.000000000 -1.000000000 -1.000000000");
    assert!(lines[10..].iter().all(|l| l.starts_with("4 ")));
    assert_eq!(lines.len(), 2 + 8 + 6);
    let sq = convex_hull(&box_points(2, 1.0)).unwrap();
    assert_eq!(
        to_svg_path(&sq).unwrap(),
        "M -1.000000000 -1.000000000 L 1.000000000 -1.000000000 L 1.000000000 1.000000000 L -1.000000000 1.000000000 Z"
    );
    assert_eq!(to_off(&sq), Err(GeomError::UnsupportedDimension(2)));
    assert_eq!(to_svg_path(&cube), Err(GeomError::UnsupportedDimension(3)));
}

#[test]
fn generalized_cross_is_orthogonal_and_positive() {
    let a = rvec(&[1.0, 2.0, 0.5]);
    let b = rvec(&[-0.3, 1.0, 2.0]);
    let n = generalized_cross(&[a.clone(), b.clone()]);
    assert!(n.dot(&a).abs() < 1e-12 && n.dot(&b).abs() < 1e-12);
    let m = nalgebra::DMatrix::from_columns(&[a, b, n]);
    assert!(m.determinant() > 0.0);
    // d = 2: rotation by +90°
    assert_eq!(generalized_cross(&[p2(1.0, 0.0)]), p2(0.0, 1.0));
}

fn arb_points(d: usize) -> impl Strategy<Value = Vec<RealVector>> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), d + 4..30)
        .prop_map(|pts| pts.into_iter().map(RealVector::from_vec).collect())
}

fn facets_as_halfspaces(p: &ConvexPolytope) -> Vec<Hyperplane> {
    p.facets().iter().map(|f| Hyperplane { normal: f.normal.clone(), offset: f.offset }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_halfspace_round_trip(pts in prop_oneof![arb_points(2), arb_points(3)]) {
        let Ok(p) = convex_hull(&pts) else { return Ok(()) };
        prop_assume!(polytope_measure(&p).volume > 1e-3);
        let q = halfspace_intersection(&facets_as_halfspaces(&p)).unwrap();
        let r = convex_hull(q.vertices()).unwrap();
        prop_assert!(Body::Full(r).hausdorff(&Body::Full(p.clone())) <= 1e-9 * p.scale().max(1.0));
    }

    #[test]
    fn facets_close_up(pts in prop_oneof![arb_points(2), arb_points(3)]) {
        let Ok(p) = convex_hull(&pts) else { return Ok(()) };
        let m = polytope_measure(&p);
        let mut s = RealVector::zeros(p.dim());
        for (n, a) in &m.facets {
            s += n * *a;
        }
        prop_assert!(s.norm() <= 1e-9 * p.scale().powi(p.dim() as i32 - 1).max(1.0));
        prop_assert!(m.volume > 0.0);
    }

    #[test]
    fn difference_then_sum_stays_inside(pts in prop_oneof![arb_points(2), arb_points(3)], v in prop::collection::vec(-3.0f64..3.0, 3)) {
        let Ok(p) = convex_hull(&pts) else { return Ok(()) };
        let d = p.dim();
        let v = RealVector::from_iterator(d, v.into_iter().take(d));
        let body = Body::Full(p.clone());
        let diff = minkowski_diff_segment(&body, &v).unwrap();
        let tol = 1e-9 * p.scale().max(1.0);
        for x in diff.vertices() {
            prop_assert!(p.contains(&(&x + &v), tol));
            prop_assert!(p.contains(&(&x - &v), tol));
        }
    }

    #[test]
    fn coset_count_matches_enumeration(v in prop::collection::vec(-5i64..=5, 2..=3)) {
        let v = IntVector(v);
        prop_assume!(!v.is_zero());
        let k = kernel_sublattice(&v).unwrap();
        for b in &k.basis {
            prop_assert_eq!(b.dot(&v), 0);
        }
        let cells = k.frame().cell_points();
        prop_assert_eq!(cells.len() as u64, k.coset_count);
        prop_assert!((k.cell_measure * v.norm() - k.coset_count as f64).abs() < 1e-9);
        // brute force: representatives of distinct cosets in a box
        let frame = k.frame();
        let r = 2 * v.max_abs() + 2;
        let dim = v.dim();
        let mut reps = std::collections::BTreeSet::new();
        let ranges: Vec<Vec<i64>> = (0..dim).map(|_| (-r..=r).collect()).collect();
        for x in ranges.into_iter().multi_cartesian_product() {
            reps.insert(frame.reduce(&IntVector(x)));
        }
        prop_assert_eq!(reps.len() as u64, k.coset_count);
    }
}
