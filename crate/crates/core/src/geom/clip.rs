//! Incremental clipping of a large box by halfspaces.
//!
//! Both backends keep the boundary as oriented cycles tagged with the index of
//! the halfspace that produced them (`None` for box faces). A box face that
//! survives all clips means the box was too small; the caller retries with a
//! larger one.

use std::collections::HashMap;

use super::{Halfspace, Vector};
use crate::error::Error;

pub(super) type Tag = Option<usize>;

/// Classification tolerance relative to `1 + |v|_inf`.
const CLASSIFY_TOL: f64 = 1e-11;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    In,
    On,
    Out,
}

fn classify(h: &Halfspace, v: &Vector) -> (Side, f64) {
    let d = h.normal.dot(v) - h.offset;
    let tol = CLASSIFY_TOL * (1.0 + v.norm_inf());
    let side = if d > tol {
        Side::Out
    } else if d < -tol {
        Side::In
    } else {
        Side::On
    };
    (side, d)
}

fn edge_point(a: &Vector, b: &Vector, da: f64, db: f64) -> Vector {
    let s = da / (da - db);
    *a + (*b - *a) * s
}

/// Counterclockwise polygon; `tags[i]` labels the edge from vertex `i` to `i + 1`.
pub(super) struct Polygon {
    pub verts: Vec<Vector>,
    pub tags: Vec<Tag>,
}

impl Polygon {
    pub fn square(half: f64) -> Self {
        Self {
            verts: vec![
                Vector::xy(-half, -half),
                Vector::xy(half, -half),
                Vector::xy(half, half),
                Vector::xy(-half, half),
            ],
            tags: vec![None; 4],
        }
    }

    pub fn clip(&mut self, h: &Halfspace, tag: usize) -> Result<(), Error> {
        let n = self.verts.len();
        let cls: Vec<(Side, f64)> = self.verts.iter().map(|v| classify(h, v)).collect();
        if cls.iter().all(|c| c.0 != Side::Out) {
            return Ok(());
        }
        if cls.iter().all(|c| c.0 != Side::In) {
            return Err(if cls.iter().all(|c| c.0 == Side::Out) {
                Error::EmptyIntersection
            } else {
                Error::Degenerate
            });
        }
        let mut verts = Vec::with_capacity(n + 1);
        let mut tags = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (sa, da) = cls[i];
            let (sb, db) = cls[j];
            match (sa, sb) {
                (Side::In, Side::Out) => {
                    verts.push(self.verts[i]);
                    tags.push(self.tags[i]);
                    verts.push(edge_point(&self.verts[i], &self.verts[j], da, db));
                    tags.push(Some(tag));
                }
                (Side::On, Side::Out) => {
                    verts.push(self.verts[i]);
                    tags.push(Some(tag));
                }
                (Side::Out, Side::In) => {
                    verts.push(edge_point(&self.verts[i], &self.verts[j], da, db));
                    tags.push(self.tags[i]);
                }
                (Side::Out, _) => {}
                _ => {
                    verts.push(self.verts[i]);
                    tags.push(self.tags[i]);
                }
            }
        }
        if verts.len() < 3 {
            return Err(Error::Degenerate);
        }
        self.verts = verts;
        self.tags = tags;
        Ok(())
    }

    /// Re-solve every vertex from its two incident lines.
    pub fn polish(&mut self, hs: &[Halfspace]) {
        let n = self.verts.len();
        for i in 0..n {
            let prev = self.tags[(i + n - 1) % n];
            let next = self.tags[i];
            if let (Some(a), Some(b)) = (prev, next) {
                if let Some(p) = solve2(&hs[a], &hs[b]) {
                    if p.dist(&self.verts[i]) <= 1e-6 * (1.0 + self.verts[i].norm_inf()) {
                        self.verts[i] = p;
                    }
                }
            }
        }
    }
}

fn solve2(a: &Halfspace, b: &Halfspace) -> Option<Vector> {
    let det = a.normal.perp_dot(&b.normal);
    if det.abs() < 1e-12 {
        return None;
    }
    let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
    let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
    Some(Vector::xy(x, y))
}

pub(super) struct Face {
    pub tag: Tag,
    pub normal: Vector,
    pub cycle: Vec<usize>,
}

/// Convex polyhedron as a vertex pool plus oriented face cycles.
pub(super) struct Polyhedron {
    pub verts: Vec<Vector>,
    pub faces: Vec<Face>,
}

/// Order coplanar points counterclockwise around `normal`.
pub(super) fn order_around(points: &[Vector], idx: &mut [usize], normal: &Vector) {
    let k = idx.len() as f64;
    let c = idx
        .iter()
        .fold(Vector::zero(3), |acc, &i| acc + points[i])
        / k;
    let far = idx
        .iter()
        .copied()
        .max_by(|&a, &b| {
            points[a]
                .dist(&c)
                .partial_cmp(&points[b].dist(&c))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty");
    let e1 = match (points[far] - c).normalized() {
        Ok(e) => e,
        Err(_) => return,
    };
    let e2 = normal.cross(&e1);
    let angle = |i: usize| {
        let d = points[i] - c;
        d.dot(&e2).atan2(d.dot(&e1))
    };
    idx.sort_by(|&a, &b| {
        angle(a)
            .partial_cmp(&angle(b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

impl Polyhedron {
    pub fn cube(half: f64) -> Self {
        let mut verts = Vec::with_capacity(8);
        for &x in &[-half, half] {
            for &y in &[-half, half] {
                for &z in &[-half, half] {
                    verts.push(Vector::xyz(x, y, z));
                }
            }
        }
        let mut faces = Vec::with_capacity(6);
        for axis in 0..3 {
            for &sign in &[-1.0, 1.0] {
                let normal = Vector::basis(3, axis) * sign;
                let mut cycle: Vec<usize> = (0..8)
                    .filter(|&i| verts[i][axis] * sign > 0.0)
                    .collect();
                order_around(&verts, &mut cycle, &normal);
                faces.push(Face {
                    tag: None,
                    normal,
                    cycle,
                });
            }
        }
        Self { verts, faces }
    }

    pub fn clip(&mut self, h: &Halfspace, tag: usize) -> Result<(), Error> {
        let cls: Vec<(Side, f64)> = self.verts.iter().map(|v| classify(h, v)).collect();
        if cls.iter().all(|c| c.0 != Side::Out) {
            return Ok(());
        }
        if cls.iter().all(|c| c.0 != Side::In) {
            return Err(if cls.iter().all(|c| c.0 == Side::Out) {
                Error::EmptyIntersection
            } else {
                Error::Degenerate
            });
        }
        let mut verts = self.verts.clone();
        let mut side: Vec<Side> = cls.iter().map(|c| c.0).collect();
        let mut cut: HashMap<(usize, usize), usize> = HashMap::new();
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        let mut cap: Vec<usize> = Vec::new();

        for face in &self.faces {
            let k = face.cycle.len();
            let mut cycle = Vec::with_capacity(k + 1);
            for j in 0..k {
                let a = face.cycle[j];
                let b = face.cycle[(j + 1) % k];
                if cls[a].0 != Side::Out {
                    cycle.push(a);
                    if cls[a].0 == Side::On {
                        cap.push(a);
                    }
                }
                let crosses = matches!(
                    (cls[a].0, cls[b].0),
                    (Side::In, Side::Out) | (Side::Out, Side::In)
                );
                if crosses {
                    let key = (a.min(b), a.max(b));
                    let idx = *cut.entry(key).or_insert_with(|| {
                        verts.push(edge_point(
                            &self.verts[a],
                            &self.verts[b],
                            cls[a].1,
                            cls[b].1,
                        ));
                        side.push(Side::On);
                        verts.len() - 1
                    });
                    cycle.push(idx);
                    cap.push(idx);
                }
            }
            if cycle.len() >= 3 {
                faces.push(Face {
                    tag: face.tag,
                    normal: face.normal,
                    cycle,
                });
            }
        }

        cap.sort_unstable();
        cap.dedup();
        if cap.len() >= 3 {
            let normal = h.normal.with_dim(3);
            order_around(&verts, &mut cap, &normal);
            faces.push(Face {
                tag: Some(tag),
                normal,
                cycle: cap,
            });
        }
        if faces.len() < 4 {
            return Err(Error::Degenerate);
        }

        // compact away the removed vertices
        let mut remap = vec![usize::MAX; verts.len()];
        let mut kept = Vec::with_capacity(verts.len());
        for (i, v) in verts.iter().enumerate() {
            if side[i] != Side::Out {
                remap[i] = kept.len();
                kept.push(*v);
            }
        }
        for f in &mut faces {
            for i in &mut f.cycle {
                *i = remap[*i];
            }
        }
        self.verts = kept;
        self.faces = faces;
        Ok(())
    }

    /// Re-solve each vertex from the best-conditioned triple of incident planes.
    pub fn polish(&mut self, hs: &[Halfspace]) {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.verts.len()];
        for f in &self.faces {
            if let Some(t) = f.tag {
                for &i in &f.cycle {
                    incident[i].push(t);
                }
            }
        }
        for (i, tags) in incident.iter_mut().enumerate() {
            tags.sort_unstable();
            tags.dedup();
            if tags.len() < 3 {
                continue;
            }
            let mut best: Option<(f64, [usize; 3])> = None;
            for a in 0..tags.len() {
                for b in a + 1..tags.len() {
                    for c in b + 1..tags.len() {
                        let (na, nb, nc) =
                            (&hs[tags[a]].normal, &hs[tags[b]].normal, &hs[tags[c]].normal);
                        let det = na.cross(nb).dot(nc).abs();
                        if best.is_none_or(|(d, _)| det > d) {
                            best = Some((det, [tags[a], tags[b], tags[c]]));
                        }
                    }
                }
            }
            if let Some((det, [a, b, c])) = best {
                if det < 1e-9 {
                    continue;
                }
                if let Some(p) = solve3(&hs[a], &hs[b], &hs[c]) {
                    let v = self.verts[i];
                    if p.dist(&v) <= 1e-6 * (1.0 + v.norm_inf()) {
                        self.verts[i] = p;
                    }
                }
            }
        }
    }
}

fn solve3(a: &Halfspace, b: &Halfspace, c: &Halfspace) -> Option<Vector> {
    let (na, nb, nc) = (a.normal, b.normal, c.normal);
    let det = na.cross(&nb).dot(&nc);
    if det.abs() < 1e-12 {
        return None;
    }
    let p = (nb.cross(&nc) * a.offset + nc.cross(&na) * b.offset + na.cross(&nb) * c.offset) / det;
    Some(p)
}
