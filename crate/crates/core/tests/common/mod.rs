//! Random instances shared by the integration tests.

#![allow(dead_code)]

use coconvex::geom::Vector;
use coconvex::{Atom, CFullSet, Cone, DiscreteMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn quadrant() -> Cone {
    Cone::new(2, &[Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0)]).unwrap()
}

pub fn octant() -> Cone {
    Cone::new(3, &[Vector::basis(3, 0), Vector::basis(3, 1), Vector::basis(3, 2)]).unwrap()
}

pub fn unit_circle(theta: f64) -> Vector {
    Vector::xy(theta.cos(), theta.sin())
}

/// Uniform random unit vector.
pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = Vector::from_slice(&c).unwrap();
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random rotation of space (Gram–Schmidt of random vectors).
fn random_frame(rng: &mut ChaCha8Rng) -> [Vector; 3] {
    let a = random_unit(rng, 3);
    let mut b = random_unit(rng, 3);
    b = (b - a * a.dot(&b)).normalized().unwrap();
    [a, b, a.cross(&b)]
}

/// A planar cone with opening angle in `[0.5, 2.5]` and a random orientation,
/// or a spatial cone with 3 to 5 rays around a random axis.
pub fn random_cone(rng: &mut ChaCha8Rng, dim: usize) -> Cone {
    if dim == 2 {
        let start = rng.random_range(0.0..std::f64::consts::TAU);
        let span = rng.random_range(0.5..2.5);
        return Cone::new(2, &[unit_circle(start), unit_circle(start + span)]).unwrap();
    }
    let k = rng.random_range(3..=5);
    let [x, y, z] = random_frame(rng);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let gens: Vec<Vector> = (0..k)
        .map(|i| {
            let az = phase
                + std::f64::consts::TAU * (i as f64 + rng.random_range(-0.2..0.2)) / k as f64;
            let polar: f64 = rng.random_range(0.5..0.9);
            z * polar.cos() + (x * az.cos() + y * az.sin()) * polar.sin()
        })
        .collect();
    Cone::new(3, &gens).unwrap()
}

/// Random window atom with boundary margin at least `min_margin`.
pub fn random_window_atom(rng: &mut ChaCha8Rng, cone: &Cone, min_margin: f64) -> Vector {
    let (center, _) = cone.incenter();
    loop {
        let u = random_unit(rng, cone.dim());
        // bias towards the window: mix with its incenter
        let u = (u + center * rng.random_range(0.0..2.0)).normalized().unwrap();
        let (inside, _) = cone.omega_contains(&u);
        if inside && cone.boundary_margin(&[u]).unwrap() >= min_margin {
            return u;
        }
    }
}

/// Random measure with `1..=max_atoms` atoms of margin at least `min_margin`
/// and masses in `[lo, hi]`.
pub fn random_measure(
    rng: &mut ChaCha8Rng,
    cone: &Cone,
    max_atoms: usize,
    min_margin: f64,
    (lo, hi): (f64, f64),
) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let atoms: Vec<Atom> = (0..n)
        .map(|_| Atom {
            u: random_window_atom(rng, cone, min_margin),
            mass: rng.random_range(lo..=hi),
        })
        .collect();
    DiscreteMeasure::new(atoms).unwrap()
}

/// Support numbers of a strictly convex set in a simplicial cone: the image
/// of `{x_1 ⋯ x_d >= s^d}` under the linear map taking the basis to the rays.
/// Every cut then touches the set in exactly one point, so every normal
/// yields a facet of positive area after truncation.
pub fn strictly_convex_support(cone: &Cone, u: &Vector, s: f64) -> f64 {
    let g = cone.generators();
    let d = cone.dim();
    assert_eq!(g.len(), d, "simplicial cones only");
    let prod: f64 = g.iter().map(|gi| -gi.dot(u)).product();
    -(d as f64) * s * prod.powf(1.0 / d as f64)
}

/// A random simplicial cone.
pub fn random_simplicial_cone(rng: &mut ChaCha8Rng, dim: usize) -> Cone {
    loop {
        let c = random_cone(rng, dim);
        if c.generators().len() == dim {
            return c;
        }
        if dim == 3 {
            let [x, y, z] = random_frame(rng);
            let gens: Vec<Vector> = (0..3)
                .map(|i| {
                    let az = std::f64::consts::TAU * (i as f64 + rng.random_range(-0.2..0.2)) / 3.0;
                    let polar: f64 = rng.random_range(0.5..0.9);
                    z * polar.cos() + (x * az.cos() + y * az.sin()) * polar.sin()
                })
                .collect();
            return Cone::new(3, &gens).unwrap();
        }
    }
}

/// Random admissible C-full set: tangent cuts of a strictly convex set.
pub fn random_cfull(rng: &mut ChaCha8Rng, dim: usize, max_atoms: usize) -> CFullSet {
    let cone = random_simplicial_cone(rng, dim);
    let n = rng.random_range(1..=max_atoms);
    let s = rng.random_range(0.3..2.0);
    let mut normals: Vec<Vector> = Vec::new();
    while normals.len() < n {
        let u = random_window_atom(rng, &cone, 0.05);
        if normals.iter().all(|v| v.dist(&u) > 1e-3) {
            normals.push(u);
        }
    }
    let h: Vec<f64> = normals.iter().map(|u| strictly_convex_support(&cone, u, s)).collect();
    CFullSet::build(&cone, &normals, &h).unwrap()
}
