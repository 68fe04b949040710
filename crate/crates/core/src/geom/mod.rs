//! Geometric kernel for the plane and for space: halfspace intersection,
//! volumes, facet areas and distances between bounded convex polytopes.

mod clip;
mod vector;

pub use vector::Vector;

use crate::error::{Error, Result};
use clip::{Polygon, Polyhedron};

/// Incidence and containment tolerance, scaled by `1 + |x|_inf`.
pub const EPS_GEO: f64 = 1e-9;
/// Absolute radius under which two vertices are considered the same point.
pub const VERTEX_DEDUP: f64 = 1e-9;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// The closed halfspace `{x : <normal, x> <= offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    /// Builds a halfspace, rescaling a non-unit normal together with the offset.
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let len = normal.norm();
        let unit = normal.unitize()?;
        let offset = if unit == normal { offset } else { offset / len };
        Ok(Self {
            normal: unit,
            offset,
        })
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.normal.dot(x) - self.offset <= tol * (1.0 + x.norm_inf())
    }
}

/// A facet (an edge in the plane) of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
    /// Vertex indices: the two endpoints in the plane, a counterclockwise
    /// cycle around `normal` in space.
    pub vertices: Vec<usize>,
    /// Edge length in the plane, polygon area in space.
    pub area: f64,
    /// Index of the input halfspace this facet lies on.
    pub source: usize,
}

/// Bounded, full-dimensional convex polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet_from(&self, source: usize) -> Option<&Facet> {
        self.facets.iter().find(|f| f.source == source)
    }

    pub fn centroid(&self) -> Vector {
        let n = self.vertices.len() as f64;
        self.vertices
            .iter()
            .fold(Vector::zero(self.dim), |acc, v| acc + *v)
            / n
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.facets.iter().all(|f| {
            f.normal.dot(x) - f.offset <= tol * (1.0 + x.norm_inf())
        })
    }

    /// Unordered vertex pairs forming the edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for f in &self.facets {
            let k = f.vertices.len();
            if self.dim == 2 {
                edges.push((f.vertices[0].min(f.vertices[1]), f.vertices[0].max(f.vertices[1])));
            } else {
                for j in 0..k {
                    let (a, b) = (f.vertices[j], f.vertices[(j + 1) % k]);
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

/// Whether some nonzero direction `y` has `<n, y> <= 0` for every normal.
fn has_recession_direction(dim: usize, normals: &[Vector]) -> bool {
    const TOL: f64 = 1e-12;
    let recedes = |y: &Vector| normals.iter().all(|n| n.dot(y) <= TOL);
    if dim == 2 {
        return normals.iter().any(|n| {
            let y = n.rot90();
            recedes(&y) || recedes(&-y)
        });
    }
    let mut independent_pair = false;
    for (i, a) in normals.iter().enumerate() {
        for b in &normals[i + 1..] {
            let axis = a.cross(b);
            if axis.norm() < 1e-12 {
                continue;
            }
            let y = axis / axis.norm();
            independent_pair = true;
            if recedes(&y) || recedes(&-y) {
                return true;
            }
        }
    }
    !independent_pair
}

fn scale_of(halfspaces: &[Halfspace]) -> f64 {
    halfspaces
        .iter()
        .fold(1.0_f64, |m, h| m.max(h.offset.abs()))
}

/// Intersection of halfspaces in the plane or in space.
///
/// Redundant halfspaces produce no facet. Inputs are clipped out of a box that
/// grows until no box face survives.
pub fn halfspace_intersection(dim: usize, halfspaces: &[Halfspace]) -> Result<Polytope> {
    check_dim(dim)?;
    if halfspaces.len() < dim + 1 {
        return Err(Error::TooFewHalfspaces {
            needed: dim + 1,
            found: halfspaces.len(),
        });
    }
    for h in halfspaces {
        if h.normal.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: h.normal.dim(),
            });
        }
        if !h.normal.is_finite() || !h.offset.is_finite() || !h.normal.is_unit(1e-12) {
            return Err(Error::InvalidInput(format!("bad halfspace {h:?}")));
        }
    }
    let normals: Vec<Vector> = halfspaces.iter().map(|h| h.normal).collect();
    if has_recession_direction(dim, &normals) {
        return Err(Error::Unbounded);
    }

    let mut half = 4.0 * scale_of(halfspaces);
    for _ in 0..40 {
        let attempt = if dim == 2 {
            intersect_plane(halfspaces, half)?
        } else {
            intersect_space(halfspaces, half)?
        };
        if let Some(p) = attempt {
            return Ok(p);
        }
        half *= 8.0;
    }
    Err(Error::Unbounded)
}

fn intersect_plane(hs: &[Halfspace], half: f64) -> Result<Option<Polytope>> {
    let mut poly = Polygon::square(half);
    for (i, h) in hs.iter().enumerate() {
        poly.clip(h, i)?;
    }
    if poly.tags.iter().any(|t| t.is_none()) {
        return Ok(None);
    }
    poly.polish(hs);

    // merge near-coincident consecutive vertices; the later edge label wins
    let mut verts: Vec<Vector> = Vec::new();
    let mut tags = Vec::new();
    for (v, t) in poly.verts.iter().zip(&poly.tags) {
        if let Some(last) = verts.last() {
            if v.dist(last) <= VERTEX_DEDUP {
                *tags.last_mut().unwrap() = *t;
                continue;
            }
        }
        verts.push(*v);
        tags.push(*t);
    }
    while verts.len() > 1 && verts[0].dist(verts.last().unwrap()) <= VERTEX_DEDUP {
        // the dropped vertex only started the zero-length closing edge
        verts.pop();
        tags.pop();
    }
    if verts.len() < 3 {
        return Err(Error::Degenerate);
    }
    let n = verts.len();
    let facets = (0..n)
        .map(|i| {
            let src = tags[i].expect("box edges rejected above");
            let h = &hs[src];
            let j = (i + 1) % n;
            Facet {
                normal: h.normal,
                offset: h.offset,
                vertices: vec![i, j],
                area: verts[i].dist(&verts[j]),
                source: src,
            }
        })
        .collect();
    Ok(Some(Polytope {
        dim: 2,
        vertices: verts,
        facets,
    }))
}

fn intersect_space(hs: &[Halfspace], half: f64) -> Result<Option<Polytope>> {
    let mut poly = Polyhedron::cube(half);
    for (i, h) in hs.iter().enumerate() {
        poly.clip(h, i)?;
    }
    if poly.faces.iter().any(|f| f.tag.is_none()) {
        return Ok(None);
    }
    poly.polish(hs);

    let mut verts: Vec<Vector> = Vec::new();
    let mut remap = vec![0usize; poly.verts.len()];
    for (i, v) in poly.verts.iter().enumerate() {
        match verts.iter().position(|w| w.dist(v) <= VERTEX_DEDUP) {
            Some(j) => remap[i] = j,
            None => {
                remap[i] = verts.len();
                verts.push(*v);
            }
        }
    }
    let mut facets = Vec::with_capacity(poly.faces.len());
    for face in &poly.faces {
        let mut cycle: Vec<usize> = Vec::with_capacity(face.cycle.len());
        for &i in &face.cycle {
            let j = remap[i];
            if cycle.last() != Some(&j) && !cycle.contains(&j) {
                cycle.push(j);
            }
        }
        if cycle.len() < 3 {
            continue;
        }
        let src = face.tag.expect("box faces rejected above");
        let h = &hs[src];
        let area = polygon_area(&verts, &cycle, &h.normal);
        if area <= 0.0 {
            continue;
        }
        facets.push(Facet {
            normal: h.normal,
            offset: h.offset,
            vertices: cycle,
            area,
            source: src,
        });
    }
    if facets.len() < 4 {
        return Err(Error::Degenerate);
    }
    // keep only vertices that still belong to a facet
    let mut used = vec![false; verts.len()];
    for f in &facets {
        for &i in &f.vertices {
            used[i] = true;
        }
    }
    let mut renum = vec![usize::MAX; verts.len()];
    let mut kept = Vec::new();
    for (i, v) in verts.iter().enumerate() {
        if used[i] {
            renum[i] = kept.len();
            kept.push(*v);
        }
    }
    for f in &mut facets {
        for i in &mut f.vertices {
            *i = renum[*i];
        }
    }
    Ok(Some(Polytope {
        dim: 3,
        vertices: kept,
        facets,
    }))
}

fn polygon_area(verts: &[Vector], cycle: &[usize], normal: &Vector) -> f64 {
    let o = verts[cycle[0]];
    let mut sum = Vector::zero(3);
    for w in cycle[1..].windows(2) {
        sum += (verts[w[0]] - o).cross(&(verts[w[1]] - o));
    }
    0.5 * sum.dot(normal).abs()
}

/// Lebesgue measure of `p`, by fanning facets from the vertex centroid.
pub fn volume(p: &Polytope) -> f64 {
    let c = p.centroid();
    let d = p.dim as f64;
    p.facets
        .iter()
        .map(|f| f.area * (f.offset - f.normal.dot(&c)) / d)
        .sum()
}

/// `(normal, area)` for every facet.
pub fn facet_areas(p: &Polytope) -> Vec<(Vector, f64)> {
    p.facets.iter().map(|f| (f.normal, f.area)).collect()
}

fn closest_on_segment(a: &Vector, b: &Vector, x: &Vector) -> f64 {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return x.dist(a);
    }
    let s = ((*x - *a).dot(&ab) / len2).clamp(0.0, 1.0);
    x.dist(&(*a + ab * s))
}

/// Euclidean distance from `x` to the polytope (zero inside).
pub fn distance_to(p: &Polytope, x: &Vector) -> f64 {
    if p.facets.iter().all(|f| f.normal.dot(x) <= f.offset) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for v in &p.vertices {
        best = best.min(x.dist(v));
    }
    for (a, b) in p.edges() {
        best = best.min(closest_on_segment(&p.vertices[a], &p.vertices[b], x));
    }
    if p.dim == 3 {
        for f in &p.facets {
            let gap = f.normal.dot(x) - f.offset;
            let foot = *x - f.normal * gap;
            let k = f.vertices.len();
            let inside = (0..k).all(|j| {
                let a = p.vertices[f.vertices[j]];
                let b = p.vertices[f.vertices[(j + 1) % k]];
                (b - a).cross(&(foot - a)).dot(&f.normal) >= 0.0
            });
            if inside {
                best = best.min(gap.abs());
            }
        }
    }
    best
}

/// Hausdorff distance of two polytopes of the same dimension.
///
/// The distance to a convex set is a convex function, so each one-sided
/// supremum is attained at a vertex.
pub fn hausdorff(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            found: q.dim,
        });
    }
    let one_sided = |a: &Polytope, b: &Polytope| {
        a.vertices
            .iter()
            .map(|v| distance_to(b, v))
            .fold(0.0_f64, f64::max)
    };
    Ok(one_sided(p, q).max(one_sided(q, p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(n: Vector, b: f64) -> Halfspace {
        Halfspace::new(n, b).unwrap()
    }

    fn square(half: f64) -> Polytope {
        let e1 = Vector::xy(1.0, 0.0);
        let e2 = Vector::xy(0.0, 1.0);
        halfspace_intersection(
            2,
            &[hs(e1, half), hs(-e1, half), hs(e2, half), hs(-e2, half)],
        )
        .unwrap()
    }

    fn cube() -> Polytope {
        let mut h = Vec::new();
        for i in 0..3 {
            h.push(hs(Vector::basis(3, i), 1.0));
            h.push(hs(-Vector::basis(3, i), 1.0));
        }
        halfspace_intersection(3, &h).unwrap()
    }

    fn orthant_simplex() -> Polytope {
        let w = Vector::xyz(1.0, 1.0, 1.0).normalized().unwrap();
        let h = [
            hs(-Vector::basis(3, 0), 0.0),
            hs(-Vector::basis(3, 1), 0.0),
            hs(-Vector::basis(3, 2), 0.0),
            hs(w, 1.0),
        ];
        halfspace_intersection(3, &h).unwrap()
    }

    #[test]
    fn axis_box_in_the_plane() {
        let sq = square(1.0);
        assert_eq!(sq.vertices().len(), 4);
        assert!((volume(&sq) - 4.0).abs() < 1e-12);
        let areas = facet_areas(&sq);
        assert_eq!(areas.len(), 4);
        for (n, a) in areas {
            assert!((a - 2.0).abs() < 1e-12);
            assert!((n.norm_inf() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cube_volume() {
        let c = cube();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert!((volume(&c) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn orthant_simplex_volume_and_slanted_facet() {
        let s = orthant_simplex();
        assert_eq!(s.vertices().len(), 4);
        let expected = 3.0_f64.sqrt().powi(3) / 6.0;
        assert!((volume(&s) - expected).abs() < 1e-12);
        assert!((expected - 0.8660254037844386).abs() < 1e-15);
        let slanted = s.facet_from(3).unwrap();
        assert!((slanted.area - 1.5 * 3.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_and_unbounded_are_reported() {
        let e1 = Vector::xy(1.0, 0.0);
        let e2 = Vector::xy(0.0, 1.0);
        let err = halfspace_intersection(
            2,
            &[hs(e1, -1.0), hs(-e1, -1.0), hs(e2, 1.0), hs(-e2, 1.0)],
        );
        assert_eq!(err.unwrap_err(), Error::EmptyIntersection);
        let err = halfspace_intersection(2, &[hs(e1, 1.0), hs(-e1, 1.0), hs(e2, 1.0)]);
        assert_eq!(err.unwrap_err(), Error::Unbounded);
        let err = halfspace_intersection(
            3,
            &[
                hs(Vector::basis(3, 0), 1.0),
                hs(-Vector::basis(3, 0), 1.0),
                hs(Vector::basis(3, 1), 1.0),
                hs(-Vector::basis(3, 1), 1.0),
            ],
        );
        assert_eq!(err.unwrap_err(), Error::Unbounded);
        let err = halfspace_intersection(2, &[hs(e1, 1.0), hs(-e1, 1.0)]);
        assert!(matches!(err, Err(Error::TooFewHalfspaces { .. })));
    }

    #[test]
    fn needle_is_rejected_at_construction() {
        let e1 = Vector::xy(1.0, 0.0);
        let e2 = Vector::xy(0.0, 1.0);
        let err = halfspace_intersection(
            2,
            &[hs(e1, 1.0), hs(-e1, 1.0), hs(e2, 0.0), hs(-e2, 0.0)],
        );
        assert_eq!(err.unwrap_err(), Error::Degenerate);
    }

    #[test]
    fn redundant_halfspaces_are_dropped() {
        let e1 = Vector::xy(1.0, 0.0);
        let e2 = Vector::xy(0.0, 1.0);
        let p = halfspace_intersection(
            2,
            &[
                hs(e1, 1.0),
                hs(-e1, 1.0),
                hs(e2, 1.0),
                hs(-e2, 1.0),
                hs(e1, 3.0),
                hs(e1, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(p.facets().len(), 4);
        assert!(p.facet_from(4).is_none());
    }

    #[test]
    fn distances() {
        let unit = square(0.5);
        assert_eq!(distance_to(&unit, &Vector::xy(0.1, 0.2)), 0.0);
        let sq = halfspace_intersection(
            2,
            &[
                hs(Vector::xy(1.0, 0.0), 1.0),
                hs(Vector::xy(-1.0, 0.0), 0.0),
                hs(Vector::xy(0.0, 1.0), 1.0),
                hs(Vector::xy(0.0, -1.0), 0.0),
            ],
        )
        .unwrap();
        assert!((distance_to(&sq, &Vector::xy(2.0, 0.0)) - 1.0).abs() < 1e-15);
        let c = cube();
        assert!((distance_to(&c, &Vector::xyz(3.0, 0.2, -0.4)) - 2.0).abs() < 1e-12);
        assert!((distance_to(&c, &Vector::xyz(2.0, 2.0, 0.0)) - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn origin_vertex_has_zero_distance() {
        // convex hull of o, (0,1.4), (0.6,0.6), (1.4,0)
        let hull = halfspace_intersection(
            2,
            &[
                hs(Vector::xy(-1.0, 0.0), 0.0),
                hs(Vector::xy(0.0, -1.0), 0.0),
                hs(Vector::xy(1.0, 1.0), 1.4),
            ],
        )
        .unwrap();
        assert_eq!(hull.vertices().len(), 3);
        assert_eq!(distance_to(&hull, &Vector::zero(2)), 0.0);
        assert!(hull.contains(&Vector::xy(0.6, 0.6), EPS_GEO));
    }

    #[test]
    fn hausdorff_examples() {
        let sq = square(0.5);
        assert_eq!(hausdorff(&sq, &sq).unwrap(), 0.0);
        let shifted = halfspace_intersection(
            2,
            &[
                hs(Vector::xy(1.0, 0.0), 0.8),
                hs(Vector::xy(-1.0, 0.0), 0.2),
                hs(Vector::xy(0.0, 1.0), 0.5),
                hs(Vector::xy(0.0, -1.0), 0.5),
            ],
        )
        .unwrap();
        assert!((hausdorff(&sq, &shifted).unwrap() - 0.3).abs() < 1e-12);

        let u = -Vector::xy(1.0, 1.0).normalized().unwrap();
        let quad_cut = |depth: f64| {
            halfspace_intersection(
                2,
                &[
                    hs(Vector::xy(-1.0, 0.0), 0.0),
                    hs(Vector::xy(0.0, -1.0), 0.0),
                    hs(u, -depth),
                    hs(-u, 5.0),
                ],
            )
            .unwrap()
        };
        let d = hausdorff(&quad_cut(1.0), &quad_cut(1.1)).unwrap();
        assert!((d - 0.1).abs() < 1e-12, "{d}");
        assert!(matches!(
            hausdorff(&sq, &cube()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn closed_surface_identity_on_simplex() {
        let s = orthant_simplex();
        let total: f64 = s.facets().iter().map(|f| f.area).sum();
        let sum = s
            .facets()
            .iter()
            .fold(Vector::zero(3), |acc, f| acc + f.normal * f.area);
        assert!(sum.norm() <= 1e-9 * total);
    }

    #[test]
    fn degenerate_apex_with_four_planes() {
        // square pyramid: four side planes meet at the apex
        let mut h = Vec::new();
        for (x, y) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            h.push(hs(Vector::xyz(x, y, 1.0), 0.0));
        }
        h.push(hs(Vector::xyz(0.0, 0.0, -1.0), 1.0));
        let p = halfspace_intersection(3, &h).unwrap();
        assert_eq!(p.vertices().len(), 5);
        assert_eq!(p.facets().len(), 5);
        assert!((volume(&p) - 4.0 / 3.0).abs() < 1e-12);
    }
}
