//! Polyhedral pointed cones, their polar cones and the spherical window of
//! outer normals on which surface area measures live.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{check_dim, halfspace_intersection, Halfspace, Polytope, Vector};

const RAY_TOL: f64 = 1e-12;

/// A pointed, full-dimensional polyhedral cone with apex at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vector>,
    facet_normals: Vec<Vector>,
    w: Vector,
}

/// JSON form of a cone; generators need not be unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDoc {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
}

impl Cone {
    /// Builds the cone spanned by `generators`, keeping only extreme rays.
    ///
    /// In the plane the rays are ordered counterclockwise; in space they are
    /// ordered counterclockwise around `w`, and facet `i` lies between rays
    /// `i` and `i + 1`.
    pub fn new(dim: usize, generators: &[Vector]) -> Result<Self> {
        check_dim(dim)?;
        if generators.len() < dim {
            return Err(Error::NotFullDim);
        }
        let mut units = Vec::with_capacity(generators.len());
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
            units.push(g.unitize().map_err(|_| Error::NotFullDim)?);
        }
        let cone = if dim == 2 {
            Self::planar(units)?
        } else {
            Self::spatial(units)?
        };
        let w_ok = cone.generators.iter().all(|g| g.dot(&cone.w) > 0.0)
            && cone.facet_normals.iter().all(|n| n.dot(&cone.w) < 0.0);
        if !w_ok {
            return Err(Error::InvalidInput(
                "sum of extreme rays does not lie in the interior of both the cone and the negative polar".into(),
            ));
        }
        Ok(cone)
    }

    fn planar(units: Vec<Vector>) -> Result<Self> {
        let mut angles: Vec<(f64, Vector)> = units.iter().map(|g| (g[1].atan2(g[0]), *g)).collect();
        angles.sort_by(|a, b| a.0.total_cmp(&b.0));
        angles.dedup_by(|b, a| (b.0 - a.0).abs() <= RAY_TOL);
        if angles.len() > 1 && (angles[0].0 + 2.0 * PI - angles.last().unwrap().0) <= RAY_TOL {
            angles.pop();
        }
        if angles.len() < 2 {
            return Err(Error::NotFullDim);
        }
        // the largest circular gap between consecutive directions
        let k = angles.len();
        let (mut gap, mut after) = (f64::NEG_INFINITY, 0);
        for i in 0..k {
            let next = (i + 1) % k;
            let mut g = angles[next].0 - angles[i].0;
            if next == 0 {
                g += 2.0 * PI;
            }
            if g > gap {
                gap = g;
                after = next;
            }
        }
        if gap <= PI + RAY_TOL {
            return Err(Error::NotPointed);
        }
        let first = angles[after].1;
        let second = angles[(after + k - 1) % k].1;
        let normals = vec![-first.rot90(), second.rot90()];
        let w = (first + second).normalized()?;
        Ok(Self {
            dim: 2,
            generators: vec![first, second],
            facet_normals: normals,
            w,
        })
    }

    fn spatial(units: Vec<Vector>) -> Result<Self> {
        let mut max_det = 0.0_f64;
        for i in 0..units.len() {
            for j in i + 1..units.len() {
                let c = units[i].cross(&units[j]);
                for g in &units[j + 1..] {
                    max_det = max_det.max(c.dot(g).abs());
                }
            }
        }
        if max_det <= RAY_TOL {
            return Err(Error::NotFullDim);
        }

        let mut planes: Vec<Vector> = Vec::new();
        for i in 0..units.len() {
            for j in i + 1..units.len() {
                let Ok(n) = units[i].cross(&units[j]).normalized() else {
                    continue;
                };
                if units[i].cross(&units[j]).norm() <= RAY_TOL {
                    continue;
                }
                for cand in [n, -n] {
                    if units.iter().all(|g| cand.dot(g) <= RAY_TOL)
                        && !planes.iter().any(|p| p.dist(&cand) <= 1e-9)
                    {
                        planes.push(cand);
                    }
                }
            }
        }
        let spans = planes.len() >= 3
            && planes.iter().enumerate().any(|(i, a)| {
                planes[i + 1..].iter().enumerate().any(|(j, b)| {
                    let c = a.cross(b);
                    planes[i + j + 2..].iter().any(|p| c.dot(p).abs() > 1e-9)
                })
            });
        if !spans {
            return Err(Error::NotPointed);
        }

        let mut rays: Vec<Vector> = Vec::new();
        for g in &units {
            let on = planes.iter().filter(|p| p.dot(g).abs() <= 1e-9).count();
            if on >= 2 && !rays.iter().any(|r| r.dist(g) <= 1e-9) {
                rays.push(*g);
            }
        }
        if rays.len() < 3 {
            return Err(Error::NotPointed);
        }
        let w = rays
            .iter()
            .fold(Vector::zero(3), |acc, r| acc + *r)
            .normalized()?;
        let helper = if w[0].abs() < 0.9 {
            Vector::basis(3, 0)
        } else {
            Vector::basis(3, 1)
        };
        let e1 = (helper - w * helper.dot(&w)).normalized()?;
        let e2 = w.cross(&e1);
        rays.sort_by(|a, b| {
            let ta = a.dot(&e2).atan2(a.dot(&e1));
            let tb = b.dot(&e2).atan2(b.dot(&e1));
            ta.total_cmp(&tb)
        });
        let k = rays.len();
        let mut normals = Vec::with_capacity(k);
        for i in 0..k {
            let mut n = -(rays[i].cross(&rays[(i + 1) % k])).normalized()?;
            if n.dot(&w) > 0.0 {
                n = -n;
            }
            if rays.iter().any(|g| n.dot(g) > 1e-9) {
                return Err(Error::NotPointed);
            }
            normals.push(n);
        }
        Ok(Self {
            dim: 3,
            generators: rays,
            facet_normals: normals,
            w,
        })
    }

    pub fn from_doc(doc: &ConeDoc) -> Result<Self> {
        let gens = doc
            .generators
            .iter()
            .map(|g| {
                let v = Vector::from_slice(g)?;
                if v.dim() != doc.dim {
                    return Err(Error::DimensionMismatch {
                        expected: doc.dim,
                        found: v.dim(),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.dim, &gens)
    }

    pub fn to_doc(&self) -> ConeDoc {
        ConeDoc {
            dim: self.dim,
            generators: self.generators.iter().map(|g| g.coords().to_vec()).collect(),
        }
    }

    /// Coordinate-wise comparison of the extreme rays.
    pub fn same_as(&self, other: &Cone) -> bool {
        self.dim == other.dim
            && self.generators.len() == other.generators.len()
            && self
                .generators
                .iter()
                .all(|g| other.generators.iter().any(|h| g.dist(h) <= RAY_TOL))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit extreme rays.
    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// Outer unit facet normals, so the cone is `{x : <n, x> <= 0}`.
    pub fn facet_normals(&self) -> &[Vector] {
        &self.facet_normals
    }

    /// Distinguished direction in the interior of the cone, with `-w` in the
    /// interior of the polar cone.
    pub fn w(&self) -> Vector {
        self.w
    }

    /// The facet inequalities of the cone.
    pub fn facet_halfspaces(&self) -> Vec<Halfspace> {
        self.facet_normals
            .iter()
            .map(|n| Halfspace {
                normal: *n,
                offset: 0.0,
            })
            .collect()
    }

    /// The polar cone: generated by the facet normals.
    pub fn polar(&self) -> Result<Cone> {
        Cone::new(self.dim, &self.facet_normals)
    }

    /// Membership of `u` in the open window, with margin `min_g -<u, g>`.
    pub fn omega_contains(&self, u: &Vector) -> (bool, f64) {
        let margin = self
            .generators
            .iter()
            .map(|g| -u.dot(g))
            .fold(f64::INFINITY, f64::min);
        (margin > 0.0, margin)
    }

    pub(crate) fn check_atoms(&self, atoms: &[Vector]) -> Result<()> {
        for (index, u) in atoms.iter().enumerate() {
            if u.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: u.dim(),
                });
            }
            let (inside, margin) = self.omega_contains(u);
            if !inside {
                return Err(Error::AtomOutsideOmega { index, margin });
            }
        }
        Ok(())
    }

    /// The bounded slab `C ∩ {<w, x> <= t}`; the top facet has source index
    /// `facet_normals().len()`.
    pub fn truncate(&self, t: f64) -> Result<Polytope> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("truncation height {t} must be positive")));
        }
        let mut hs = self.facet_halfspaces();
        hs.push(Halfspace {
            normal: self.w,
            offset: t,
        });
        halfspace_intersection(self.dim, &hs)
    }

    /// Spherical measure of the unit sphere inside the cone.
    pub fn aperture(&self) -> f64 {
        if self.dim == 2 {
            let (a, b) = (self.generators[0], self.generators[1]);
            return a.perp_dot(&b).abs().atan2(a.dot(&b));
        }
        let k = self.generators.len();
        let mut angle_sum = 0.0;
        for i in 0..k {
            let g = self.generators[i];
            let prev = self.generators[(i + k - 1) % k];
            let next = self.generators[(i + 1) % k];
            let tp = prev - g * prev.dot(&g);
            let tn = next - g * next.dot(&g);
            angle_sum += tp.cross(&tn).norm().atan2(tp.dot(&tn));
        }
        angle_sum - (k as f64 - 2.0) * PI
    }

    /// Geodesic distance from the atoms to the boundary of the window.
    pub fn boundary_margin(&self, atoms: &[Vector]) -> Result<f64> {
        self.check_atoms(atoms)?;
        Ok(atoms
            .iter()
            .map(|u| self.margin_of(u))
            .fold(f64::INFINITY, f64::min))
    }

    /// Margin of a single (already validated) atom.
    pub(crate) fn margin_of(&self, u: &Vector) -> f64 {
        let mut best = f64::INFINITY;
        for g in &self.generators {
            let s = u.dot(g);
            let foot = (*u - *g * s).normalized();
            let on_arc = foot
                .map(|v| self.generators.iter().all(|h| v.dot(h) <= 1e-12))
                .unwrap_or(false);
            if on_arc {
                best = best.min((-s).clamp(-1.0, 1.0).asin());
            } else {
                for n in self.facet_normals.iter().filter(|n| n.dot(g).abs() <= 1e-9) {
                    best = best.min(u.dot(n).clamp(-1.0, 1.0).acos());
                }
            }
        }
        best
    }

    /// Brute-force boundary distance over a sampling of the window boundary
    /// with spacing at most `resolution` radians.
    pub fn boundary_margin_sampled(&self, atoms: &[Vector], resolution: f64) -> Result<f64> {
        self.check_atoms(atoms)?;
        let mut samples = Vec::new();
        if self.dim == 2 {
            samples.extend_from_slice(&self.facet_normals);
        } else {
            let k = self.generators.len();
            for i in 0..k {
                // arc of the boundary orthogonal to ray i, between facets i-1 and i
                let a = self.facet_normals[(i + k - 1) % k];
                let b = self.facet_normals[i];
                let len = a.dot(&b).clamp(-1.0, 1.0).acos();
                let steps = (len / resolution).ceil().max(1.0) as usize;
                let ortho = (b - a * a.dot(&b)).normalized()?;
                for s in 0..=steps {
                    let th = len * s as f64 / steps as f64;
                    samples.push(a * th.cos() + ortho * th.sin());
                }
            }
        }
        Ok(atoms
            .iter()
            .map(|u| {
                samples
                    .iter()
                    .map(|v| u.dot(v).clamp(-1.0, 1.0).acos())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min))
    }

    /// The constant `a` with `a |x| <= |<x, u>|` on the cone for every atom `u`.
    pub fn normal_gap(&self, atoms: &[Vector]) -> Result<f64> {
        self.check_atoms(atoms)?;
        Ok(atoms
            .iter()
            .map(|u| -self.max_on_unit_cone(u))
            .fold(f64::INFINITY, f64::min))
    }

    /// `max <x, u>` over unit vectors of the cone, by enumerating faces.
    fn max_on_unit_cone(&self, u: &Vector) -> f64 {
        let mut best = self
            .generators
            .iter()
            .map(|g| g.dot(u))
            .fold(f64::NEG_INFINITY, f64::max);
        if self.dim == 3 {
            let k = self.generators.len();
            for i in 0..k {
                let (a, b) = (self.generators[i], self.generators[(i + 1) % k]);
                let m = self.facet_normals[i];
                let p = *u - m * u.dot(&m);
                let Ok(x) = p.normalized() else { continue };
                let ab = a.cross(&b);
                if a.cross(&x).dot(&ab) >= 0.0 && x.cross(&b).dot(&ab) >= 0.0 {
                    best = best.max(x.dot(u));
                }
            }
        }
        best
    }

    /// Point of the window farthest from its boundary, with its margin.
    pub fn incenter(&self) -> (Vector, f64) {
        let gens = &self.generators;
        let score = |u: &Vector| {
            gens.iter()
                .map(|g| -u.dot(g))
                .fold(f64::INFINITY, f64::min)
        };
        let mut candidates: Vec<Vector> = gens.iter().map(|g| -*g).collect();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if let Ok(u) = (-(gens[i] + gens[j])).normalized() {
                    candidates.push(u);
                }
                if self.dim == 3 {
                    for l in j + 1..gens.len() {
                        if let Some(u) = equidistant(gens[i], gens[j], gens[l]) {
                            candidates.push(u);
                        }
                    }
                }
            }
        }
        let best = candidates
            .into_iter()
            .max_by(|a, b| score(a).total_cmp(&score(b)))
            .expect("cone has generators");
        let margin = self.margin_of(&best);
        (best, margin)
    }
}

/// Unit `u` with `-<u, a> = -<u, b> = -<u, c>` and positive common value.
fn equidistant(a: Vector, b: Vector, c: Vector) -> Option<Vector> {
    let det = a.cross(&b).dot(&c);
    if det.abs() < 1e-12 {
        return None;
    }
    // solve <u, g> = -1 for the three rows
    let u = (b.cross(&c) * -1.0 + c.cross(&a) * -1.0 + a.cross(&b) * -1.0) / det;
    u.normalized().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    pub(crate) fn quadrant() -> Cone {
        Cone::new(2, &[Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0)]).unwrap()
    }

    pub(crate) fn octant() -> Cone {
        Cone::new(3, &[Vector::basis(3, 0), Vector::basis(3, 1), Vector::basis(3, 2)]).unwrap()
    }

    fn same_set(a: &[Vector], b: &[Vector], tol: f64) -> bool {
        a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| x.dist(y) <= tol))
    }

    #[test]
    fn quadrant_and_octant_directions() {
        let q = quadrant();
        assert!(q.w().dist(&Vector::xy(FRAC_1_SQRT_2, FRAC_1_SQRT_2)) < 1e-15);
        let o = octant();
        let s = 1.0 / 3.0_f64.sqrt();
        assert!(o.w().dist(&Vector::xyz(s, s, s)) < 1e-15);
        assert_eq!(o.facet_normals().len(), 3);
    }

    #[test]
    fn halfplane_is_not_pointed() {
        let err = Cone::new(
            2,
            &[Vector::xy(1.0, 0.0), Vector::xy(-1.0, 0.0), Vector::xy(0.0, 1.0)],
        );
        assert_eq!(err.unwrap_err(), Error::NotPointed);
        let err = Cone::new(2, &[Vector::xy(1.0, 0.0), Vector::xy(2.0, 0.0)]);
        assert_eq!(err.unwrap_err(), Error::NotFullDim);
        let err = Cone::new(
            3,
            &[Vector::basis(3, 0), Vector::basis(3, 1), Vector::xyz(1.0, 1.0, 0.0)],
        );
        assert_eq!(err.unwrap_err(), Error::NotFullDim);
        let wedge = Cone::new(
            3,
            &[
                Vector::basis(3, 0),
                -Vector::basis(3, 0),
                Vector::basis(3, 1),
                Vector::basis(3, 2),
            ],
        );
        assert_eq!(wedge.unwrap_err(), Error::NotPointed);
    }

    #[test]
    fn interior_generators_are_dropped() {
        let c = Cone::new(
            3,
            &[
                Vector::basis(3, 0),
                Vector::basis(3, 1),
                Vector::basis(3, 2),
                Vector::xyz(1.0, 1.0, 1.0),
                Vector::xyz(1.0, 1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(same_set(c.generators(), octant().generators(), 1e-15));
    }

    #[test]
    fn polar_examples() {
        let p = quadrant().polar().unwrap();
        assert!(same_set(
            p.generators(),
            &[Vector::xy(-1.0, 0.0), Vector::xy(0.0, -1.0)],
            1e-15
        ));
        let p = octant().polar().unwrap();
        let neg: Vec<Vector> = (0..3).map(|i| -Vector::basis(3, i)).collect();
        assert!(same_set(p.generators(), &neg, 1e-15));

        let c = Cone::new(2, &[Vector::xy(1.0, 0.0), Vector::xy(1.0, 1.0)]).unwrap();
        let p = c.polar().unwrap();
        let expect = [Vector::xy(0.0, -1.0), Vector::xy(-FRAC_1_SQRT_2, FRAC_1_SQRT_2)];
        assert!(same_set(p.generators(), &expect, 1e-15), "{:?}", p.generators());
        for g in p.generators() {
            for h in c.generators() {
                assert!(g.dot(h) <= 1e-15);
            }
        }
    }

    #[test]
    fn polar_is_an_involution() {
        let c = Cone::new(
            3,
            &[
                Vector::xyz(1.0, 0.2, 0.3),
                Vector::xyz(0.1, 1.0, 0.2),
                Vector::xyz(-0.3, 0.4, 1.0),
                Vector::xyz(0.5, -0.4, 1.0),
            ],
        )
        .unwrap();
        let back = c.polar().unwrap().polar().unwrap();
        assert!(same_set(back.generators(), c.generators(), 1e-12));
    }

    #[test]
    fn omega_membership() {
        let q = quadrant();
        let u = -Vector::xy(1.0, 1.0).normalized().unwrap();
        let (inside, margin) = q.omega_contains(&u);
        assert!(inside);
        assert!((margin - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(!q.omega_contains(&Vector::xy(-1.0, 0.0)).0);
        let o = octant();
        let u = -Vector::xyz(1.0, 1.0, 1.0).normalized().unwrap();
        let (inside, margin) = o.omega_contains(&u);
        assert!(inside);
        assert!((margin - 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn truncations() {
        let o = octant().truncate(1.0).unwrap();
        assert!((crate::geom::volume(&o) - 3.0_f64.sqrt() / 2.0).abs() < 1e-12);
        let q = quadrant().truncate(1.0).unwrap();
        assert!((crate::geom::volume(&q) - 1.0).abs() < 1e-12);
        let r2 = 2.0_f64.sqrt();
        for expect in [Vector::zero(2), Vector::xy(r2, 0.0), Vector::xy(0.0, r2)] {
            assert!(q.vertices().iter().any(|v| v.dist(&expect) < 1e-12));
        }
        for c in [quadrant(), octant()] {
            let v1 = crate::geom::volume(&c.truncate(1.5).unwrap());
            let v2 = crate::geom::volume(&c.truncate(3.0).unwrap());
            assert!((v2 / v1 - 2f64.powi(c.dim() as i32)).abs() < 1e-9);
        }
        assert!(quadrant().truncate(0.0).is_err());
    }

    #[test]
    fn apertures() {
        assert!((quadrant().aperture() - FRAC_PI_2).abs() < 1e-15);
        assert!((octant().aperture() - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn boundary_margins() {
        let q = quadrant();
        let u = -Vector::xy(1.0, 1.0).normalized().unwrap();
        assert!((q.boundary_margin(&[u]).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let pair = [Vector::xy(-0.6, -0.8), Vector::xy(-0.8, -0.6)];
        assert!((q.boundary_margin(&pair).unwrap() - 0.6_f64.asin()).abs() < 1e-15);
        assert!((0.6_f64.asin() - 0.6435).abs() < 1e-4);
        let o = octant();
        let u = -Vector::xyz(1.0, 1.0, 1.0).normalized().unwrap();
        let m = o.boundary_margin(&[u]).unwrap();
        assert!((m - (1.0 / 3.0_f64.sqrt()).asin()).abs() < 1e-15);
        assert!((m - 0.6155).abs() < 1e-4);
        assert!(matches!(
            q.boundary_margin(&[Vector::xy(1.0, 0.0)]),
            Err(Error::AtomOutsideOmega { index: 0, .. })
        ));
    }

    #[test]
    fn normal_gaps() {
        let q = quadrant();
        let pair = [Vector::xy(-0.6, -0.8), Vector::xy(-0.8, -0.6)];
        assert!((q.normal_gap(&pair).unwrap() - 0.6).abs() < 1e-15);
        let u = -Vector::xy(1.0, 1.0).normalized().unwrap();
        assert!((q.normal_gap(&[u]).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        for u in pair {
            let a = q.normal_gap(&[u]).unwrap();
            let delta = q.boundary_margin(&[u]).unwrap();
            assert!((a - delta.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn incenter_of_symmetric_cones() {
        let (u, m) = quadrant().incenter();
        assert!(u.dist(&-Vector::xy(1.0, 1.0).normalized().unwrap()) < 1e-15);
        assert!((m - FRAC_PI_4).abs() < 1e-15);
        let (u, _) = octant().incenter();
        assert!(u.dist(&-Vector::xyz(1.0, 1.0, 1.0).normalized().unwrap()) < 1e-12);
    }

    #[test]
    fn doc_round_trip_normalizes() {
        let doc: ConeDoc =
            serde_json::from_str(r#"{"dim": 2, "generators": [[2, 0], [0, 3]]}"#).unwrap();
        let c = Cone::from_doc(&doc).unwrap();
        assert!(c.same_as(&quadrant()));
        let again = Cone::from_doc(&c.to_doc()).unwrap();
        assert_eq!(again, c);
    }
}
