//! Exact planar construction: the boundary of `K` inside a planar cone is a
//! polygonal chain whose edges are the atoms rotated by 90 degrees and scaled
//! by their masses.

use crate::coconvex::CFullSet;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// Builds the planar C-full set with surface area measure `phi` directly.
///
/// The chain starts on the second ray of the cone, walks the atoms in
/// counterclockwise order of their normals and ends on the first ray; the two
/// free endpoint parameters come from a 2×2 solve.
pub fn solve_chain_2d(cone: &Cone, phi: &DiscreteMeasure) -> Result<CFullSet> {
    if cone.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: cone.dim(),
        });
    }
    let support = phi.support();
    for u in &support {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: u.dim(),
            });
        }
    }
    cone.check_atoms(&support)?;
    if phi.is_empty() {
        return CFullSet::build(cone, &[], &[]);
    }
    let (first, second) = (cone.generators()[0], cone.generators()[1]);
    let start = second.rot90();
    let mut order: Vec<usize> = (0..phi.len()).collect();
    let angle = |i: usize| {
        let u = support[i];
        start.perp_dot(&u).atan2(start.dot(&u))
    };
    order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));

    let atoms = phi.atoms();
    let edges: Vec<_> = order.iter().map(|&i| atoms[i].u.rot90() * atoms[i].mass).collect();
    let total = edges.iter().fold(crate::geom::Vector::zero(2), |acc, e| acc + *e);
    // s·first − t·second = total
    let det = first.perp_dot(&(-second));
    let s = total.perp_dot(&(-second)) / det;
    let t = first.perp_dot(&total) / det;
    if s < 0.0 || t < 0.0 {
        return Err(Error::NegativeEndpoint { s, t });
    }
    let mut h = vec![0.0; phi.len()];
    let mut p = second * t;
    for (k, &i) in order.iter().enumerate() {
        h[i] = p.dot(&atoms[i].u).min(0.0);
        p += edges[k];
    }
    CFullSet::build(cone, &support, &h)
}
