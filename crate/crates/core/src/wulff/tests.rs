use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::{convex_hull, rvec, Body};

fn sf(dim: usize, atoms: Vec<(RealVector, f64)>, mode: EvalMode) -> SupportFunction {
    SupportFunction::new(dim, atoms, mode)
}

fn axes(d: usize, w: f64) -> Vec<(RealVector, f64)> {
    (0..d)
        .flat_map(|i| {
            let e = RealVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
            [(e.clone(), w), (-e, w)]
        })
        .collect()
}

fn octahedron(r: f64) -> Body {
    Body::from_points(3, &[rvec(&[r, 0.0, 0.0]), rvec(&[-r, 0.0, 0.0]), rvec(&[0.0, r, 0.0]), rvec(&[0.0, -r, 0.0]), rvec(&[0.0, 0.0, r]), rvec(&[0.0, 0.0, -r])])
}

fn random_directions(d: usize, n: usize, seed: u64) -> Vec<RealVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| loop {
            let v = RealVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
            if v.norm() > 0.1 {
                break v.normalize();
            }
        })
        .collect()
}

#[test]
fn zonotope_square() {
    let phi = sf(2, axes(2, 1.0), EvalMode::PositivePart);
    let w = zonotope_of(&phi).unwrap();
    let sq = Body::from_points(2, &[rvec(&[-1.0, -1.0]), rvec(&[1.0, -1.0]), rvec(&[-1.0, 1.0]), rvec(&[1.0, 1.0])]);
    assert!(w.body.hausdorff(&sq) < 1e-12);
    assert!(!w.degenerate);
    assert_eq!(w.provenance, Provenance::Zonotope);
}

#[test]
fn single_atom_is_a_segment() {
    let phi = sf(2, vec![(rvec(&[1.0, 0.0]), 1.0)], EvalMode::PositivePart);
    let w = zonotope_of(&phi).unwrap();
    assert!(w.degenerate);
    assert_eq!(w.body.affine_dim(), 1);
    assert!(w.body.hausdorff(&Body::from_points(2, &[rvec(&[0.0, 0.0]), rvec(&[1.0, 0.0])])) < 1e-15);
}

#[test]
fn fcc_zonohedron_support() {
    let phi = ScanFamily::FccMinusAxes(EvalMode::PositivePart).support_function(1.0).split_signs().0;
    assert_eq!(phi.atoms.len(), 12);
    let w = zonotope_of(&phi).unwrap();
    assert!((w.support(&rvec(&[1.0, 0.0, 0.0])) - 4.0).abs() < 1e-12);
    for u in random_directions(3, 1000, 1) {
        assert!((w.support(&u) - phi.eval(&u)).abs() < 1e-9);
    }
    let cl = classify_shape(&w).unwrap();
    // truncated octahedron
    assert_eq!((cl.n_vertices, cl.n_edges, cl.n_facets), (24, 36, 14));
    assert!(cl.zonotope);
}

#[test]
fn mixed_signs_rejected_by_zonotope() {
    let phi = ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue).support_function(0.75);
    assert_eq!(zonotope_of(&phi), Err(WulffError::MixedSigns));
}

#[test]
fn fcc_minus_axes_gives_octahedron() {
    let phi = ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue).support_function(0.75);
    let w = signed_wulff(&phi).unwrap();
    assert!(!w.degenerate);
    assert!(w.body.hausdorff(&octahedron(3.0)) < 1e-9);
    let cl = classify_shape(&w).unwrap();
    assert_eq!((cl.n_vertices, cl.n_edges, cl.n_facets), (6, 12, 8));
    assert!(cl.centrally_symmetric && !cl.zonotope);
    assert_eq!(cl.label, OCTAHEDRON);
    // oracle: halfspaces on a fine grid of directions
    let mut dirs = random_directions(3, 4000, 9);
    dirs.extend(fan_directions(&phi));
    let grid_body = halfspace_wulff(&phi, &dirs).unwrap();
    assert!(grid_body.body.hausdorff(&octahedron(3.0)) < 1e-9);
}

#[test]
fn fcc_minus_axes_degenerates_below_half() {
    let phi = ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue).support_function(0.4);
    let d = rvec(&[1.0, 1.0, 1.0]);
    assert!((phi.eval(&d) - (12.0 * 0.4 - 6.0)).abs() < 1e-12);
    let w = signed_wulff(&phi).unwrap();
    assert!(w.degenerate && w.body.is_empty());
}

#[test]
fn no_negative_part_equals_zonotope() {
    let phi = ScanFamily::Pyritohedron.support_function(0.0);
    let a = zonotope_of(&phi.split_signs().0).unwrap();
    let b = signed_wulff(&phi).unwrap();
    assert!(a.body.hausdorff(&b.body) < 1e-12);
}

#[test]
fn positivity_examples() {
    let phi = sf(2, vec![(rvec(&[1.0, 0.0]), 1.0), (rvec(&[0.0, 1.0]), 1.0)], EvalMode::AbsoluteValue);
    let p = positivity_check(&phi);
    assert!((p.min - 1.0).abs() < 1e-12);
    assert!((p.argmin.clone() - rvec(&[1.0, 0.0])).norm() < 1e-12);
    let phi = ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue).support_function(0.5);
    let p = positivity_check(&phi);
    assert!(p.min.abs() < 1e-12);
    assert!((p.argmin.clone() - rvec(&[1.0, 1.0, 1.0]) / 3f64.sqrt()).norm() < 1e-9);
    let phi = sf(3, vec![(rvec(&[1.0, 0.0, 0.0]), 1.0), (rvec(&[0.0, 1.0, 0.0]), 2.0)], EvalMode::PositivePart);
    let p = positivity_check(&phi);
    assert_eq!(p.min, 0.0);
}

#[test]
fn positivity_matches_dense_sampling() {
    for (c, fam) in [(0.6, ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue)), (0.8, ScanFamily::Icosahedral), (0.2, ScanFamily::Pyritohedron)] {
        let phi = fam.support_function(c);
        let p = positivity_check(&phi);
        assert!((phi.eval(&p.argmin) - p.min).abs() < 1e-12);
        let sampled = random_directions(3, 20_000, 3).iter().map(|u| phi.eval(u)).fold(f64::INFINITY, f64::min);
        assert!(p.min <= sampled + 1e-12, "{c}: {} > {sampled}", p.min);
    }
}

#[test]
fn classify_examples() {
    let cube = zonotope_of(&sf(3, axes(3, 1.0), EvalMode::PositivePart)).unwrap();
    let cl = classify_shape(&cube).unwrap();
    assert_eq!((cl.n_vertices, cl.n_edges, cl.n_facets), (8, 12, 6));
    assert!(cl.centrally_symmetric && cl.zonotope);
    let hex = zonotope_of(&sf(2, vec![(rvec(&[1.0, 0.0]), 1.0), (rvec(&[0.0, 1.0]), 1.0), (rvec(&[1.0, 1.0]), 1.0)], EvalMode::AbsoluteValue)).unwrap();
    let cl = classify_shape(&hex).unwrap();
    assert_eq!(cl.n_vertices, 6);
    assert!(cl.zonotope);
    let seg = zonotope_of(&sf(2, vec![(rvec(&[1.0, 0.0]), 1.0)], EvalMode::PositivePart)).unwrap();
    assert_eq!(classify_shape(&seg), Err(WulffError::Degenerate));
    let tri = WulffShape::new(Body::Full(convex_hull(&[rvec(&[0.0, 0.0]), rvec(&[1.0, 0.0]), rvec(&[0.0, 1.0])]).unwrap()), Provenance::Halfspace);
    assert!(!classify_shape(&tri).unwrap().zonotope);
}

#[test]
fn fcc_scan_finds_octahedron_interval() {
    let fam = ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue);
    let rep = parameter_scan(fam, &grid(0.30, 1.20, 0.05)).unwrap();
    assert_eq!(rep.rows.len(), 19);
    let oct = rep.intervals_of(|c| c == OCTAHEDRON);
    assert!(oct.iter().any(|i| i.lo <= 0.75 + 1e-12 && 0.75 - 1e-12 <= i.hi));
    assert_eq!(rep.claimed, Some(("octahedron".to_string(), 0.25, 0.5)));
    let csv = scan_to_csv(&rep);
    assert!(csv.starts_with("c,n_vertices,n_facets,zonotope,positivity_min\n"));
    assert_eq!(csv.lines().count(), 20);
}

#[test]
fn pyritohedron_appears_for_large_negative_weight() {
    let rep = parameter_scan(ScanFamily::Pyritohedron, &grid(0.0, 0.6, 0.05)).unwrap();
    let pyrito = rep.rows.iter().any(|r| r.n_facets == 12 && r.n_vertices == 20);
    assert!(pyrito, "{:?}", rep.intervals);
}

#[test]
fn scan_shapes_are_nested() {
    // φ decreases in c, so W shrinks; once empty it stays empty
    for fam in [ScanFamily::Pyritohedron, ScanFamily::FccMinusAxes(EvalMode::AbsoluteValue)] {
        let mut last = f64::INFINITY;
        for c in grid(0.0, 1.2, 0.025) {
            let w = signed_wulff(&fam.support_function(if fam == ScanFamily::Pyritohedron { c / 2.0 } else { 1.2 - c })).unwrap();
            let vol = w.body.as_polytope().map_or(0.0, |p| crate::geom::polytope_measure(p).volume);
            assert!(vol <= last * (1.0 + 1e-9), "{} at {c}: {vol} > {last}", fam.name());
            last = vol;
        }
    }
    let rep = parameter_scan(ScanFamily::Pyritohedron, &grid(0.0, 0.6, 0.025)).unwrap();
    let first_empty = rep.rows.iter().position(|r| r.class == "empty").unwrap();
    assert!(rep.rows[first_empty..].iter().all(|r| r.class == "empty"));
}

#[test]
fn segment_subtraction_matches_one_shot_difference() {
    let phi = ScanFamily::Pyritohedron.support_function(0.1);
    let (pos, neg) = phi.split_signs();
    let mut body = zonotope_of(&pos).unwrap().body;
    for (v, w) in &neg.atoms {
        body = minkowski_diff_segment(&body, &(v * *w)).unwrap();
    }
    assert!(body.is_full());
    assert!(body.hausdorff(&signed_wulff(&phi).unwrap().body) < 1e-9);
}

#[test]
fn icosahedral_family_is_dodecahedral_at_five_sixths() {
    let phi = ScanFamily::Icosahedral.support_function(5.0 / 6.0);
    assert_eq!(phi.atoms.len(), 42);
    let w = signed_wulff(&phi).unwrap();
    let cl = classify_shape(&w).unwrap();
    assert_eq!((cl.n_vertices, cl.n_facets), (20, 12));
    assert_eq!(cl.facet_sizes.get(&5), Some(&12));
}

fn arb_atoms(d: usize) -> impl Strategy<Value = Vec<(RealVector, f64)>> {
    prop::collection::vec((prop::collection::vec(-2.0f64..2.0, d), 0.05f64..2.0), 2..7)
        .prop_map(|a| a.into_iter().map(|(v, w)| (RealVector::from_vec(v), w)).filter(|(v, _)| v.norm() > 0.1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn sum_law(d in 2usize..=3, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut atoms = || -> Vec<(RealVector, f64)> {
            (0..rng.gen_range(2..6)).map(|_| (RealVector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0)), rng.gen_range(0.1..2.0))).collect()
        };
        let a = sf(d, atoms(), EvalMode::PositivePart);
        let b = sf(d, atoms(), EvalMode::PositivePart);
        let wa = zonotope_of(&a).unwrap();
        let wb = zonotope_of(&b).unwrap();
        let wab = zonotope_of(&a.sum(&b)).unwrap();
        let sum = crate::geom::minkowski_sum(&wa.body, &wb.body).unwrap();
        prop_assert!(wab.body.hausdorff(&sum) <= 1e-9);
    }

    #[test]
    fn signed_matches_halfspace_oracles(pos in arb_atoms(3), neg in arb_atoms(3), k in 0.05f64..0.5) {
        let mut atoms = pos.clone();
        atoms.extend(neg.iter().map(|(v, w)| (v.clone(), -w * k)));
        for mode in [EvalMode::AbsoluteValue, EvalMode::PositivePart] {
            let phi = sf(3, atoms.clone(), mode);
            let a = signed_wulff(&phi).unwrap();
            let b = wulff_from_zonotope_normals(&phi);
            let c = wulff_from_fan(&phi);
            if let (false, Ok(b), Ok(c)) = (a.degenerate, b, c) {
                if !b.degenerate && !c.degenerate {
                    prop_assert!(a.body.hausdorff(&b.body) <= 1e-9 * (1.0 + a.body.as_polytope().unwrap().scale()));
                    prop_assert!(a.body.hausdorff(&c.body) <= 1e-9 * (1.0 + a.body.as_polytope().unwrap().scale()));
                }
            }
        }
    }

    #[test]
    fn support_consistency(pos in arb_atoms(2), neg in arb_atoms(2), k in 0.0f64..0.4) {
        let mut atoms = pos.clone();
        atoms.extend(neg.iter().map(|(v, w)| (v.clone(), -w * k)));
        let phi = sf(2, atoms, EvalMode::AbsoluteValue);
        let w = signed_wulff(&phi).unwrap();
        prop_assume!(!w.degenerate);
        for (v, _) in &phi.atoms {
            let u = v.normalize();
            prop_assert!(w.support(&u) <= phi.eval(&u) + 1e-9);
        }
        for f in w.body.as_polytope().unwrap().facets() {
            prop_assert!((w.support(&f.normal) - phi.eval(&f.normal)).abs() <= 1e-9);
        }
    }

    #[test]
    fn scale_equivariance(pos in arb_atoms(3), lambda in 0.1f64..5.0) {
        let phi = sf(3, pos, EvalMode::AbsoluteValue);
        let w = zonotope_of(&phi).unwrap();
        let ws = zonotope_of(&phi.scaled(lambda)).unwrap();
        prop_assert!(ws.body.hausdorff(&w.body.scaled(lambda)) <= 1e-9 * lambda.max(1.0));
    }
}
