//! Generators for two boundary phenomena: a set in the octant with finite total
//! surface area whose excavated region is unbounded, and locally finite
//! measures that blow up towards the boundary of the window.

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::geom::Vector;
use crate::measures::{Atom, DiscreteMeasure};

/// Largest `N` accepted by [`gen_orthant_example`].
pub const MAX_BANDS: usize = 100_000;
/// Largest atom count accepted by [`gen_boundary_blowup_measure`].
pub const MAX_BLOWUP_ATOMS: usize = 60;

/// The trapezoid `p_n, q_n, q_{n+1}, p_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandFacet {
    pub normal: Vector,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthantExample {
    /// `p_1, q_1, p_2, q_2, …, p_{N+1}, q_{N+1}`.
    pub vertices: Vec<Vector>,
    pub facets: Vec<BandFacet>,
    /// `(1/√2) Σ_{n ≤ N} (a_n + a_{n+1})`, dropping the slant of each band.
    pub paper_series: f64,
    /// Sum of the exact band areas.
    pub exact_series: f64,
}

fn a(n: usize) -> f64 {
    let n = n as f64;
    1.0 / (n * n)
}

fn p(n: usize) -> Vector {
    Vector::xyz(a(n), 0.0, n as f64 - 1.0)
}

fn q(n: usize) -> Vector {
    Vector::xyz(0.0, a(n), n as f64 - 1.0)
}

/// The convex hull of `p_n = (a_n, 0, n−1)`, `q_n = (0, a_n, n−1)`,
/// `a_n = 1/n²`, and the rays along `e1`, `e2` from `p_1`, `q_1`; bands up to `N`.
pub fn gen_orthant_example(n_bands: usize) -> Result<OrthantExample> {
    if !(1..=MAX_BANDS).contains(&n_bands) {
        return Err(Error::InvalidInput(format!(
            "band count must be in 1..={MAX_BANDS}, got {n_bands}"
        )));
    }
    let mut vertices = Vec::with_capacity(2 * n_bands + 2);
    for n in 1..=n_bands + 1 {
        vertices.push(p(n));
        vertices.push(q(n));
    }
    let mut facets = Vec::with_capacity(n_bands);
    let (mut paper, mut exact) = (0.0, 0.0);
    for n in 1..=n_bands {
        let (an, an1) = (a(n), a(n + 1));
        let normal = -Vector::xyz(1.0, 1.0, an - an1).normalized()?;
        let slant = (1.0 + (an1 - an).powi(2) / 2.0).sqrt();
        let area = (an + an1) / 2.0_f64.sqrt() * slant;
        facets.push(BandFacet { normal, area });
        paper += (an + an1) / 2.0_f64.sqrt();
        exact += area;
    }
    Ok(OrthantExample {
        vertices,
        facets,
        paper_series: paper,
        exact_series: exact,
    })
}

/// Area of the planar convex hull of `pts`, given a frame `(e1, e2)` of their plane.
fn planar_hull_area(pts: &[Vector], origin: Vector, e1: Vector, e2: Vector) -> f64 {
    let mut xy: Vec<(f64, f64)> = pts
        .iter()
        .map(|v| {
            let d = *v - origin;
            (d.dot(&e1), d.dot(&e2))
        })
        .collect();
    xy.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    // monotone chain
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(xy.iter())
        } else {
            Box::new(xy.iter().rev())
        };
        for &pt in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0.0
            {
                hull.pop();
            }
            hull.push(pt);
        }
        hull.pop();
    }
    let k = hull.len();
    (0..k)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % k]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Band areas recomputed from the vertex set alone: for each band, the plane
/// through `p_n, q_n, p_{n+1}` is checked to support the whole set (all
/// vertices and points along the two rays), and the area is that of the planar
/// hull of the vertices lying on it.
pub fn orthant_hull_areas(ex: &OrthantExample) -> Result<Vec<f64>> {
    let mut probe = ex.vertices.clone();
    for r in [2.0, 10.0, 1e3] {
        probe.push(Vector::xyz(r, 0.0, 0.0));
        probe.push(Vector::xyz(0.0, r, 0.0));
    }
    let mut areas = Vec::with_capacity(ex.facets.len());
    for n in 1..=ex.facets.len() {
        let (pn, qn, pn1) = (ex.vertices[2 * n - 2], ex.vertices[2 * n - 1], ex.vertices[2 * n]);
        let mut m = (qn - pn).cross(&(pn1 - pn)).normalized()?;
        // outer normal: the rays go into the set
        if m.dot(&Vector::xyz(1.0, 0.0, 0.0)) > 0.0 {
            m = -m;
        }
        let level = m.dot(&pn);
        let scale = 1.0 + probe.iter().fold(0.0_f64, |s, v| s.max(v.norm_inf()));
        let tol = 1e-13 * scale;
        if probe.iter().any(|v| m.dot(v) > level + tol) {
            return Err(Error::InvalidInput(format!("band {n} plane does not support the set")));
        }
        let on: Vec<Vector> = ex
            .vertices
            .iter()
            .filter(|v| (m.dot(v) - level).abs() <= tol)
            .copied()
            .collect();
        let e1 = (qn - pn).normalized()?;
        let e2 = m.cross(&e1);
        areas.push(planar_hull_area(&on, pn, e1, e2));
    }
    Ok(areas)
}

/// Atoms at boundary margins `δ_k = 2^{-k}`, `k = 1..=count`, with masses
/// `k δ_k^{-(d-1)}`, placed on the geodesic from the nearest boundary point
/// of the window's incenter towards the incenter.
///
/// Each atom sits a hair (relative `1e-9`) inside its margin so that it falls
/// in the bin `[δ_k, 2δ_k)` despite rounding.
pub fn gen_boundary_blowup_measure(cone: &Cone, count: usize) -> Result<DiscreteMeasure> {
    if count > MAX_BLOWUP_ATOMS {
        return Err(Error::InvalidInput(format!(
            "at most {MAX_BLOWUP_ATOMS} atoms, got {count}"
        )));
    }
    let (center, inradius) = cone.incenter();
    if inradius <= 0.5 {
        return Err(Error::InvalidInput(format!(
            "window inradius {inradius} is too small for margins up to 1/2"
        )));
    }
    // nearest boundary arc of the incenter: the generator with the largest <c, g>
    let g = cone
        .generators()
        .iter()
        .copied()
        .max_by(|a, b| center.dot(a).total_cmp(&center.dot(b)))
        .expect("cone has generators");
    let foot = (center - g * center.dot(&g)).normalized()?;
    let toward = -g;
    let d = cone.dim() as i32;
    let atoms = (1..=count).map(|k| {
        let delta = 0.5_f64.powi(k as i32);
        let at = delta * (1.0 + 1e-9);
        let u = (foot * at.cos() + toward * at.sin()).unitize().expect("unit");
        Atom {
            u,
            mass: k as f64 * delta.powi(-(d - 1)),
        }
    });
    DiscreteMeasure::new(atoms)
}
