use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::geom::{convex_hull, rvec};

fn iv(c: &[i64]) -> IntVector {
    IntVector(c.to_vec())
}

fn nn() -> Potential {
    Potential::nearest_neighbor(2, -1.0)
}

fn square_grid(n: i64) -> Configuration {
    Configuration::new(2, (0..n).flat_map(|x| (0..n).map(move |y| iv(&[x, y]))))
}

fn unit_square() -> ConvexPolytope {
    convex_hull(&[rvec(&[0.0, 0.0]), rvec(&[1.0, 0.0]), rvec(&[0.0, 1.0]), rvec(&[1.0, 1.0])]).unwrap()
}

fn regular_polygon(m: usize, area: f64) -> ConvexPolytope {
    let r = (2.0 * area / (m as f64 * (2.0 * PI / m as f64).sin())).sqrt();
    let pts: Vec<_> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            rvec(&[r * t.cos(), r * t.sin()])
        })
        .collect();
    convex_hull(&pts).unwrap()
}

// brute-force oracles: explicit double loops over X and a box around it
fn brute_total(x: &Configuration, v: &Potential) -> f64 {
    let mut e = 0.0;
    for a in x.points() {
        for b in x.points() {
            if a != b {
                e += v.weight(&(b - a));
            }
        }
    }
    e
}

fn brute_surface(x: &Configuration, v: &Potential) -> f64 {
    let reach = v.support().iter().map(|w| w.max_abs()).max().unwrap_or(0);
    let mut f = 0.0;
    for a in x.points() {
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                let b = a + &iv(&[dx, dy]);
                if !x.contains(&b) && (dx, dy) != (0, 0) {
                    f -= v.weight(&iv(&[dx, dy]));
                }
            }
        }
    }
    f
}

#[test]
fn total_energy_examples() {
    let v = nn();
    assert_eq!(total_energy(&Configuration::new(2, [iv(&[3, 4])]), &v), 0.0);
    let x = square_grid(2);
    assert_eq!(total_energy(&x, &v), -8.0);
    assert_eq!(brute_total(&x, &v), -8.0);
    assert_eq!(v.bulk_constant(), -4.0);
    assert_eq!(surface_energy(&x, &v), 8.0);
    assert_eq!(v.bulk_constant() * x.len() as f64 + surface_energy(&x, &v), total_energy(&x, &v));
}

#[test]
fn surface_energy_examples() {
    let v = nn();
    assert_eq!(surface_energy(&Configuration::new(2, []), &v), 0.0);
    assert_eq!(surface_energy(&Configuration::new(2, [iv(&[0, 0])]), &v), 4.0);
    for n in [3, 5, 8] {
        let x = square_grid(n);
        assert_eq!(surface_energy(&x, &v), 4.0 * n as f64);
        assert_eq!(brute_surface(&x, &v), 4.0 * n as f64);
    }
}

#[test]
fn split_energy_examples() {
    let v = nn();
    let x = square_grid(2);
    let ch = SublatticeChannel { v: iv(&[1, 0]), tau: iv(&[0, 0]) };
    assert_eq!(split_surface_energy(&x, &v, &ch).unwrap(), 2.0);
    let total: f64 = v
        .support()
        .iter()
        .flat_map(SublatticeChannel::all_for)
        .map(|c| split_surface_energy(&x, &v, &c).unwrap())
        .sum();
    assert_eq!(total, 8.0);
    let diag = SublatticeChannel::all_for(&iv(&[1, 1]));
    let taus: Vec<_> = diag.iter().map(|c| c.tau.clone()).collect();
    assert_eq!(taus, vec![iv(&[0, 0]), iv(&[1, 0])]);
    let bad = SublatticeChannel { v: iv(&[1, 1]), tau: iv(&[0, 0]) };
    assert!(matches!(split_surface_energy(&x, &v, &bad), Err(EnergyError::ChannelNotInSupport(_))));
}

#[test]
fn phi_examples() {
    let v = nn();
    let l = BasisMatrix::identity(2);
    assert!((phi_v(&rvec(&[1.0, 0.0]), &v, &l).unwrap() - 1.0).abs() < 1e-15);
    let diag = rvec(&[1.0, 1.0]) / 2f64.sqrt();
    assert!((phi_v(&diag, &v, &l).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let v2 = Potential::new(
        [iv(&[2, 0]), iv(&[-2, 0]), iv(&[0, 2]), iv(&[0, -2])].map(|w| (w, -1.0)),
        Convention::Crystal,
        EvalMode::PositivePart,
    )
    .unwrap();
    let l2 = BasisMatrix::scaled_identity(2, 2);
    assert!((phi_v(&rvec(&[1.0, 0.0]), &v2, &l2).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(phi_v(&rvec(&[0.0, 0.0]), &v, &l), Err(EnergyError::ZeroDirection));
}

#[test]
fn perimeter_examples() {
    let v = nn();
    let l = BasisMatrix::identity(2);
    assert!((perimeter_p_v(&unit_square(), &v, &l) - 4.0).abs() < 1e-12);
    let disk = regular_polygon(512, 1.0);
    assert!((perimeter_p_v(&disk, &v, &l) - 8.0 / PI.sqrt()).abs() < 1e-3);
    let big = disk.scaled(3.0);
    assert!((perimeter_p_v(&big, &v, &l) - 3.0 * perimeter_p_v(&disk, &v, &l)).abs() < 1e-9);
}

#[test]
fn symmetrize_examples() {
    let v = Potential::new([(iv(&[1, 0]), -2.0), (iv(&[0, 1]), -1.0), (iv(&[0, -1]), -1.0)], Convention::Crystal, EvalMode::PositivePart)
        .unwrap();
    let s = symmetrize(&v);
    assert_eq!(s.weight(&iv(&[1, 0])), -1.0);
    assert_eq!(s.weight(&iv(&[-1, 0])), -1.0);
    let n = nn();
    assert_eq!(symmetrize(&n), n);
}

#[test]
fn transform_identity_and_scaling() {
    let v = nn();
    let x = square_grid(3);
    let (v1, x1) = transform_by_map(&v, &x, &BasisMatrix::identity(2)).unwrap();
    assert_eq!((v1, x1), (v.clone(), x.clone()));

    let v2 = Potential::new(
        [iv(&[2, 0]), iv(&[-2, 0]), iv(&[0, 2]), iv(&[2, 2])].map(|w| (w, -1.5)),
        Convention::Crystal,
        EvalMode::PositivePart,
    )
    .unwrap();
    let x2 = Configuration::new(2, [iv(&[0, 0]), iv(&[2, 0]), iv(&[2, 2]), iv(&[4, 2])]);
    let m = BasisMatrix::scaled_identity(2, 2);
    let (vm, xm) = transform_by_map(&v2, &x2, &m).unwrap();
    assert_eq!(total_energy(&xm, &vm), total_energy(&x2, &v2));
    let e = regular_polygon(7, 2.0);
    let lhs = perimeter_p_v(&e, &v2, &BasisMatrix::identity(2)) / 4.0;
    let rhs = perimeter_p_v(&e.scaled(0.5), &vm, &BasisMatrix::identity(2));
    assert!((lhs - rhs).abs() < 1e-9);

    let singular = BasisMatrix::from_int_columns(vec![iv(&[1, 1]), iv(&[2, 2])]);
    assert_eq!(transform_by_map(&v, &x, &singular), Err(EnergyError::SingularMap));
    assert!(matches!(transform_by_map(&v, &x, &m), Err(EnergyError::NotInLattice(_))));
}

#[test]
fn recovery_examples() {
    let sq = unit_square();
    let r = recovery_configuration(&sq, 9).unwrap();
    assert_eq!(r.configuration, square_grid(3));
    assert_eq!(r.correction, 0);
    // sqrt(10)·[0,1)² holds the 4×4 grid, so six points nearest the corner go
    let r = recovery_configuration(&sq, 10).unwrap();
    assert_eq!(r.y_count, 16);
    assert_eq!(r.correction, -6);
    let removed = [[0, 0], [0, 1], [1, 0], [1, 1], [0, 2], [1, 2]].map(|p| iv(&p));
    let kept: Vec<_> = square_grid(4).points().iter().filter(|p| !removed.contains(p)).cloned().collect();
    assert_eq!(r.configuration.points(), kept.as_slice());
    for n in [2, 4, 7, 11] {
        let r = recovery_configuration(&sq, n * n).unwrap();
        let f = surface_energy(&r.configuration, &nn());
        assert_eq!(f, 4.0 * n as f64);
    }
    assert!(matches!(recovery_configuration(&sq, 0), Err(EnergyError::InfeasibleCount { .. })));
}

#[test]
fn recovery_counts_are_exact() {
    let disk = regular_polygon(64, 1.0);
    for n in [50, 333, 1000, 4321] {
        let r = recovery_configuration(&disk, n).unwrap();
        assert_eq!(r.configuration.len(), n);
        assert_eq!(r.configuration.len() as i64, r.y_count as i64 + r.correction);
    }
}

#[test]
fn perimeter_bound_examples() {
    let v = nn();
    let b = perimeter_bound(&Configuration::new(2, [iv(&[0, 0])]), &v).unwrap();
    assert_eq!((b.perimeter, b.surface_energy, b.k), (4.0, 4.0, 4.0));
    assert!(b.holds);
    let b = perimeter_bound(&square_grid(6), &v).unwrap();
    assert_eq!((b.perimeter, b.surface_energy), (24.0, 24.0));
    assert!(b.holds);
    let diag = Potential::new(
        [iv(&[1, 1]), iv(&[-1, -1]), iv(&[1, -1]), iv(&[-1, 1])].map(|w| (w, -1.0)),
        Convention::Crystal,
        EvalMode::PositivePart,
    )
    .unwrap();
    assert!(matches!(perimeter_bound(&square_grid(2), &diag), Err(EnergyError::SpanDeficient { rank: 2, .. })));
}

fn fcc_minus_axes(c_plus: f64) -> Potential {
    let mut atoms = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            for si in [-1, 1] {
                for sj in [-1, 1] {
                    let mut w = vec![0; 3];
                    w[i] = si;
                    w[j] = sj;
                    atoms.push((IntVector(w), c_plus));
                }
            }
        }
        atoms.push((IntVector::unit(3, i), -1.0));
        atoms.push((IntVector::unit(3, i).scaled(-1), -1.0));
    }
    Potential::new(atoms, Convention::Signed, EvalMode::AbsoluteValue).unwrap()
}

#[test]
fn fcc_axes_are_not_reachable_by_fcc_steps() {
    // FCC steps preserve the parity of x1 + x2 + x3, so no axis vector is reachable
    let rep = potential_structure(&fcc_minus_axes(0.75), &[], 1.0).unwrap();
    assert!(!rep.connected);
    assert_eq!(rep.unreachable.len(), 6);
    assert!(rep.spans_lattice);
}

#[test]
fn pathology_probe_violates_stability() {
    let v = pathology_potential(2.0);
    let probes: Vec<_> = [100, 2500, 10_000].iter().map(|&n| pathology_configuration(n)).collect();
    let rep = potential_structure(&v, &probes, 1e-3).unwrap();
    assert!(!rep.connected);
    assert!(rep.probes.iter().all(|p| !p.holds && p.f_v < 0.0));
    // more negative as N grows
    assert!(rep.probes[2].f_v < rep.probes[1].f_v && rep.probes[1].f_v < rep.probes[0].f_v);
}

#[test]
fn stability_trivial_without_negative_part() {
    let v = Potential::new([(iv(&[1, 0]), 2.0), (iv(&[-1, 0]), 2.0), (iv(&[0, 1]), 0.5), (iv(&[0, -1]), 0.5)], Convention::Signed, EvalMode::PositivePart)
        .unwrap();
    let rep = potential_structure(&v, &[square_grid(4), Configuration::new(2, [iv(&[0, 0])])], 0.5).unwrap();
    assert!(rep.connected);
    assert_eq!(rep.c1, Some(1.0));
    assert_eq!(rep.epsilon_certified, Some(0.5));
    assert!(rep.probes.iter().all(|p| p.holds));
}

#[test]
fn connected_signed_potential_certifies_epsilon() {
    // N₊ = axes, N₋ = diagonals reachable in two steps
    let mut atoms: Vec<(IntVector, f64)> = Vec::new();
    for i in 0..2 {
        atoms.push((IntVector::unit(2, i), 1.0));
        atoms.push((IntVector::unit(2, i).scaled(-1), 1.0));
    }
    for s in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
        atoms.push((iv(&s), -0.1));
    }
    let v = Potential::new(atoms, Convention::Signed, EvalMode::PositivePart).unwrap();
    let probes: Vec<_> = (1..6).map(square_grid).collect();
    let rep = potential_structure(&v, &probes, 0.0).unwrap();
    assert!(rep.connected);
    let eps = rep.epsilon_certified.unwrap();
    for p in &rep.probes {
        assert!(p.f_v >= eps * p.f_indicator - 1e-9);
    }
}

#[test]
fn pathology_configuration_counts() {
    // even root r: the even points of the diamond |x1|+|x2| <= r number (r+1)²
    for r in [10usize, 20, 100] {
        assert_eq!(pathology_configuration(r * r).len(), (r + 1) * (r + 1));
    }
}

fn arb_potential(signed: bool) -> impl Strategy<Value = Potential> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), -2.0f64..2.0), 1..8).prop_filter_map("nonempty", move |atoms| {
        let atoms: Vec<_> = atoms
            .into_iter()
            .filter(|((a, b), _)| (*a, *b) != (0, 0))
            .map(|((a, b), w)| (iv(&[a, b]), if signed { w } else { -w.abs() - 0.01 }))
            .collect();
        let conv = if signed { Convention::Signed } else { Convention::Crystal };
        Potential::new(atoms, conv, EvalMode::PositivePart).ok().filter(|p| !p.is_empty())
    })
}

fn arb_config() -> impl Strategy<Value = Configuration> {
    prop::collection::vec((-6i64..6, -6i64..6), 0..60).prop_map(|pts| Configuration::new(2, pts.into_iter().map(|(a, b)| iv(&[a, b]))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bulk_identity(x in arb_config(), v in arb_potential(false)) {
        let e = total_energy(&x, &v);
        let rhs = v.bulk_constant() * x.len() as f64 + surface_energy(&x, &v);
        prop_assert!((e - rhs).abs() <= 1e-12 * (1.0 + e.abs()));
        prop_assert!((e - brute_total(&x, &v)).abs() <= 1e-12 * (1.0 + e.abs()));
    }

    #[test]
    fn splitting_identity(x in arb_config(), v in arb_potential(true)) {
        let f = surface_energy(&x, &v);
        let split: f64 = v.support().iter()
            .flat_map(SublatticeChannel::all_for)
            .map(|c| split_surface_energy(&x, &v, &c).unwrap())
            .sum();
        prop_assert!((f - split).abs() <= 1e-12 * (1.0 + f.abs()));
    }

    #[test]
    fn phi_convex_and_homogeneous(v in arb_potential(false), a in (-1.0f64..1.0, -1.0f64..1.0), b in (-1.0f64..1.0, -1.0f64..1.0), t in 0.01f64..10.0) {
        let l = BasisMatrix::identity(2);
        let x = rvec(&[a.0, a.1]);
        let y = rvec(&[b.0, b.1]);
        prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3 && (&x + &y).norm() > 1e-3);
        let f = |n: &RealVector| phi_v(n, &v, &l).unwrap();
        prop_assert!(f(&((&x + &y) / 2.0)) <= (f(&x) + f(&y)) / 2.0 + 1e-12);
        prop_assert!((f(&(&x * t)) - t * f(&x)).abs() <= 1e-12 * (1.0 + t * f(&x)));
    }

    #[test]
    fn symmetrization_preserves_perimeter(v in arb_potential(false), m in 3usize..12, area in 0.5f64..3.0) {
        let e = regular_polygon(m, area).translated(&rvec(&[0.3, -0.7]));
        let l = BasisMatrix::identity(2);
        let a = perimeter_p_v(&e, &v, &l);
        let b = perimeter_p_v(&e, &symmetrize(&v), &l);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }
}
