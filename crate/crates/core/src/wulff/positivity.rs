//! Exact minimum of a piecewise-linear support function on the unit sphere.
//!
//! φ is linear on every cell of the fan cut out by the hyperplanes ν ⊥ v. On
//! a cell with gradient c the minimum of ⟨c, ν⟩ over the sphere is at a
//! vertex of the cell, at −c/|c| projected onto one of its bounding great
//! circles, or at −c/|c| itself. Evaluating φ at every such candidate over
//! all cells gives the global minimum.

use std::collections::HashSet;
use std::f64::consts::PI;

use super::plane_normal;
use crate::anisotropy::{EvalMode, SupportFunction};
use crate::geom::{cross3, lex_cmp, rvec, RealVector};

#[derive(Clone, Debug, PartialEq)]
pub struct Positivity {
    pub min: f64,
    /// Lexicographically greatest minimizer.
    pub argmin: RealVector,
}

fn push_unique(out: &mut Vec<RealVector>, v: RealVector) {
    if out.iter().all(|u| (u - &v).norm() > 1e-10) {
        out.push(v);
    }
}

/// Unit plane normals of the fan: atom directions up to sign, plus the
/// coordinate planes so that every cell has a vertex.
fn fan_planes(phi: &SupportFunction) -> Vec<RealVector> {
    let mut planes: Vec<RealVector> = Vec::new();
    let axes = (0..phi.dim).map(|i| RealVector::from_fn(phi.dim, |j, _| if i == j { 1.0 } else { 0.0 }));
    for n in phi.atoms.iter().filter(|(v, w)| *w != 0.0 && v.norm() > 0.0).map(|(v, _)| v.normalize()).chain(axes) {
        if planes.iter().all(|p| (p - &n).norm() > 1e-10 && (p + &n).norm() > 1e-10) {
            planes.push(n);
        }
    }
    planes
}

/// Rays of the fan: the vertices of the spherical arrangement.
pub fn fan_directions(phi: &SupportFunction) -> Vec<RealVector> {
    let planes = fan_planes(phi);
    let mut out = Vec::new();
    match phi.dim {
        2 => {
            for n in &planes {
                let t = rvec(&[-n[1], n[0]]);
                push_unique(&mut out, -&t);
                push_unique(&mut out, t);
            }
        }
        3 => {
            for (i, a) in planes.iter().enumerate() {
                for b in &planes[i + 1..] {
                    if let Some(r) = plane_normal(a, b) {
                        push_unique(&mut out, -&r);
                        push_unique(&mut out, r);
                    }
                }
            }
        }
        _ => {}
    }
    out.sort_by(lex_cmp);
    out
}

/// Gradient of φ on the cell entered from `at` along `into`.
fn cell_gradient(phi: &SupportFunction, at: &RealVector, into: &RealVector) -> RealVector {
    let mut c = RealVector::zeros(phi.dim);
    for (v, w) in &phi.atoms {
        let scale = v.norm();
        let a = v.dot(at);
        let s = if a.abs() > 1e-10 * scale { a.signum() } else { v.dot(into).signum() };
        let f = match phi.mode {
            EvalMode::PositivePart => {
                if s > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            EvalMode::AbsoluteValue => s,
        };
        if f != 0.0 {
            c += v * (w * f);
        }
    }
    c
}

/// Collects vectors, dropping repeats up to rounding at 1e-9.
#[derive(Default)]
struct Dedup {
    seen: HashSet<Vec<i64>>,
    items: Vec<RealVector>,
}

impl Dedup {
    fn push(&mut self, v: RealVector) {
        let key: Vec<i64> = v.iter().map(|c| (c * 1e9).round() as i64).collect();
        if self.seen.insert(key) {
            self.items.push(v);
        }
    }
}

fn gradients(phi: &SupportFunction, planes: &[RealVector], rays: &[RealVector]) -> Vec<RealVector> {
    let mut grads = Dedup::default();
    match phi.dim {
        2 => {
            let mut ang: Vec<f64> = rays.iter().map(|r| r[1].atan2(r[0])).collect();
            ang.sort_by(f64::total_cmp);
            for (i, a) in ang.iter().enumerate() {
                let b = if i + 1 < ang.len() { ang[i + 1] } else { ang[0] + 2.0 * PI };
                let m = 0.5 * (a + b);
                let mid = rvec(&[m.cos(), m.sin()]);
                grads.push(cell_gradient(phi, &mid, &mid));
            }
        }
        _ => {
            for r in rays {
                let through: Vec<&RealVector> = planes.iter().filter(|n| n.dot(r).abs() < 1e-10).collect();
                let (u, w) = crate::geom::plane_basis(r);
                let mut tang: Vec<f64> = Vec::new();
                for n in &through {
                    let t = cross3(n, r);
                    let a = t.dot(&w).atan2(t.dot(&u));
                    tang.push(a);
                    tang.push(if a > 0.0 { a - PI } else { a + PI });
                }
                tang.sort_by(f64::total_cmp);
                for (i, a) in tang.iter().enumerate() {
                    let b = if i + 1 < tang.len() { tang[i + 1] } else { tang[0] + 2.0 * PI };
                    let m = 0.5 * (a + b);
                    let dir = &u * m.cos() + &w * m.sin();
                    grads.push(cell_gradient(phi, r, &dir));
                }
            }
        }
    }
    grads.items
}

/// Minimum of φ on the unit sphere and a minimizing direction.
pub fn positivity_check(phi: &SupportFunction) -> Positivity {
    let planes = fan_planes(phi);
    let rays = fan_directions(phi);
    let grads = gradients(phi, &planes, &rays);
    let mut cands = rays.clone();
    for c in &grads {
        if c.norm() > 1e-14 {
            cands.push(-c.normalize());
            if phi.dim == 3 {
                for n in &planes {
                    let p = c - n * c.dot(n);
                    if p.norm() > 1e-14 {
                        cands.push(-p.normalize());
                    }
                }
            }
        }
    }
    let vals: Vec<f64> = cands.iter().map(|n| phi.eval(n)).collect();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let scale: f64 = phi.atoms.iter().map(|(v, w)| w.abs() * v.norm()).sum::<f64>().max(1.0);
    let argmin = cands
        .iter()
        .zip(&vals)
        .filter(|(_, &f)| f <= min + 1e-12 * scale)
        .map(|(n, _)| n)
        .max_by(|a, b| crate::geom::lex_cmp_tol(a, b, 1e-12))
        .cloned()
        .unwrap_or_else(|| RealVector::zeros(phi.dim));
    Positivity { min, argmin }
}
