//! C-full sets given by support numbers, and the quantities attached to them:
//! surface area measure, support function, coconvex volume, clearance radius,
//! Hausdorff distance and the a-priori bounds.
//!
//! A set `K = C ∩ ⋂ {<u_i, x> <= h_i}` with `h_i <= 0` is unbounded, so all
//! geometry is done on the truncation `K ∩ {<w, x> <= t}` for a height `t`
//! certified to lie above the excavated region `C \ K`.

use serde::{Deserialize, Serialize};

use crate::cone::{Cone, ConeDoc};
use crate::error::{Error, Result};
use crate::geom::{self, distance_to, halfspace_intersection, Halfspace, Polytope, Vector};
use crate::measures::{bl_norm, Atom, DiscreteMeasure};

const MAX_DOUBLINGS: usize = 20;
/// Relative agreement required of the top facet with that of the bare truncation.
const TOP_FACET_TOL: f64 = 1e-9;
/// Normals may deviate this much from unit length; they are re-unitized.
const NORMAL_TOL: f64 = 1e-9;
const CHECK_TOL: f64 = 1e-9;

/// A C-full set with its certified truncation.
#[derive(Debug, Clone)]
pub struct CFullSet {
    cone: Cone,
    normals: Vec<Vector>,
    support: Vec<f64>,
    trunc_height: f64,
    body: Polytope,
}

/// One atom of a body document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyAtom {
    pub u: Vector,
    pub h: f64,
}

/// JSON form of a C-full set; the cone may be omitted when given separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeDoc>,
    pub atoms: Vec<BodyAtom>,
}

/// Whether the top facet of `body` matches that of the bare truncation and
/// every cut facet stays below half the height.
fn certified(cone: &Cone, body: &Polytope, cuts: usize, top_area: f64, t: f64) -> bool {
    let n_cone = cone.facet_normals().len();
    let top_source = n_cone + cuts;
    let Some(top) = body.facet_from(top_source) else {
        return false;
    };
    if (top.area - top_area).abs() > TOP_FACET_TOL * top_area {
        return false;
    }
    let w = cone.w();
    body.facets()
        .iter()
        .filter(|f| f.source >= n_cone && f.source < top_source)
        .all(|f| f.vertices.iter().all(|&i| w.dot(&body.vertices()[i]) <= t / 2.0))
}

/// Area of the top facet of `C_t`, `t^{d-1}` times that of `C_1`.
fn top_area(cone: &Cone, t: f64) -> Result<f64> {
    let c1 = cone.truncate(1.0)?;
    let a1 = c1
        .facet_from(cone.facet_normals().len())
        .map(|f| f.area)
        .ok_or(Error::Degenerate)?;
    Ok(a1 * t.powi(cone.dim() as i32 - 1))
}

/// Cone facets, then the cuts, then the top plane.
fn halfspaces(cone: &Cone, normals: &[Vector], support: &[f64], t: f64) -> Vec<Halfspace> {
    let mut hs = cone.facet_halfspaces();
    hs.extend(normals.iter().zip(support).map(|(&normal, &offset)| Halfspace { normal, offset }));
    hs.push(Halfspace {
        normal: cone.w(),
        offset: t,
    });
    hs
}

impl CFullSet {
    /// Builds `K` and certifies a truncation height, starting from
    /// `4 (1 + max|h| / a)` with `a` the normal gap of the normals and doubling.
    pub fn build(cone: &Cone, normals: &[Vector], support: &[f64]) -> Result<Self> {
        if normals.len() != support.len() {
            return Err(Error::LengthMismatch {
                normals: normals.len(),
                support: support.len(),
            });
        }
        let mut units = Vec::with_capacity(normals.len());
        for (index, u) in normals.iter().enumerate() {
            if u.dim() != cone.dim() {
                return Err(Error::DimensionMismatch {
                    expected: cone.dim(),
                    found: u.dim(),
                });
            }
            let norm = u.norm();
            if !((norm - 1.0).abs() <= NORMAL_TOL) {
                return Err(Error::NonUnitAtom { index, norm });
            }
            units.push(u.unitize()?);
        }
        cone.check_atoms(&units)?;
        for (index, &value) in support.iter().enumerate() {
            if !(value <= 0.0) || !value.is_finite() {
                return Err(Error::PositiveSupportNumber { index, value });
            }
        }
        let t0 = if units.is_empty() {
            4.0
        } else {
            let a = cone.normal_gap(&units)?;
            let hmax = support.iter().fold(0.0_f64, |m, h| m.max(h.abs()));
            4.0 * (1.0 + hmax / a)
        };
        let mut t = t0;
        for _ in 0..=MAX_DOUBLINGS {
            if let Some(k) = Self::try_at(cone, &units, support, t)? {
                return Ok(k);
            }
            t *= 2.0;
        }
        Err(Error::CertificationFailed(format!(
            "no certified truncation height up to {t}"
        )))
    }

    /// The truncation at height `t`, if it passes the certificate.
    fn try_at(cone: &Cone, normals: &[Vector], support: &[f64], t: f64) -> Result<Option<Self>> {
        let hs = halfspaces(cone, normals, support, t);
        let body = match halfspace_intersection(cone.dim(), &hs) {
            Ok(b) => b,
            Err(Error::EmptyIntersection | Error::Degenerate) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !certified(cone, &body, normals.len(), top_area(cone, t)?, t) {
            return Ok(None);
        }
        Ok(Some(Self {
            cone: cone.clone(),
            normals: normals.to_vec(),
            support: support.to_vec(),
            trunc_height: t,
            body,
        }))
    }

    /// The same set truncated at a larger height, re-certified.
    pub fn at_height(&self, t: f64) -> Result<Self> {
        if t < self.trunc_height {
            return Err(Error::InvalidInput(format!(
                "height {t} is below the certified height {}",
                self.trunc_height
            )));
        }
        Self::try_at(&self.cone, &self.normals, &self.support, t)?.ok_or_else(|| {
            Error::CertificationFailed(format!("truncation at height {t} failed the certificate"))
        })
    }

    pub fn from_doc(doc: &BodyDoc, cone: Option<&Cone>) -> Result<Self> {
        let own = doc.cone.as_ref().map(Cone::from_doc).transpose()?;
        let cone = match (own.as_ref(), cone) {
            (Some(a), Some(b)) if !a.same_as(b) => return Err(Error::ConeMismatch),
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(Error::InvalidInput("body document names no cone".into()))
            }
        };
        let normals: Vec<Vector> = doc.atoms.iter().map(|a| a.u).collect();
        let support: Vec<f64> = doc.atoms.iter().map(|a| a.h).collect();
        Self::build(cone, &normals, &support)
    }

    pub fn to_doc(&self) -> BodyDoc {
        BodyDoc {
            cone: Some(self.cone.to_doc()),
            atoms: self
                .normals
                .iter()
                .zip(&self.support)
                .map(|(&u, &h)| BodyAtom { u, h })
                .collect(),
        }
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn trunc_height(&self) -> f64 {
        self.trunc_height
    }

    /// The certified truncation `K ∩ {<w, x> <= t}`.
    pub fn body(&self) -> &Polytope {
        &self.body
    }

    /// Facet area for each input normal, zero where the cut is redundant.
    pub fn cut_areas(&self) -> Vec<f64> {
        let n_cone = self.cone.facet_normals().len();
        let mut areas = vec![0.0; self.normals.len()];
        for f in self.body.facets() {
            if f.source >= n_cone && f.source < n_cone + self.normals.len() {
                areas[f.source - n_cone] = f.area;
            }
        }
        areas
    }

    /// The surface area measure on the window: one atom per cut facet.
    pub fn surface_area_measure(&self) -> DiscreteMeasure {
        let atoms = self
            .normals
            .iter()
            .zip(self.cut_areas())
            .filter(|(_, a)| *a > 0.0)
            .map(|(&u, mass)| Atom { u, mass });
        DiscreteMeasure::new(atoms).expect("facet areas are positive and normals unit")
    }

    /// Support function at a direction of the closed window.
    pub fn support_value(&self, u: &Vector) -> Result<f64> {
        let (_, margin) = self.cone.omega_contains(u);
        if margin < -1e-12 {
            return Err(Error::DirectionOutsideClosure { margin });
        }
        Ok(self
            .body
            .vertices()
            .iter()
            .map(|x| x.dot(u))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `V(C \ K)` as `-(1/d) Σ h_i S(K, {u_i})`.
    pub fn coconvex_volume_integral(&self) -> f64 {
        let d = self.cone.dim() as f64;
        -self
            .support
            .iter()
            .zip(self.cut_areas())
            .map(|(h, a)| h * a)
            .sum::<f64>()
            / d
    }

    /// `V(C \ K)` as `V(C_t) − V(K ∩ C_t)`.
    pub fn coconvex_volume_direct(&self) -> Result<f64> {
        let ct = self.cone.truncate(self.trunc_height)?;
        Ok(geom::volume(&ct) - geom::volume(&self.body))
    }

    pub fn coconvex_volume(&self, method: VolumeMethod) -> Result<f64> {
        match method {
            VolumeMethod::Integral => Ok(self.coconvex_volume_integral()),
            VolumeMethod::Direct => self.coconvex_volume_direct(),
        }
    }

    /// Radius of the largest ball around the origin missing the interior of `K`.
    pub fn clearance_radius(&self) -> f64 {
        distance_to(&self.body, &Vector::zero(self.cone.dim()))
    }

    /// A-priori bounds for `K` over the window atoms `omega`, given `b` at
    /// least the total surface area.
    pub fn bounds_report(&self, omega: &[Vector], b: f64) -> Result<BoundsReport> {
        let sam = self.surface_area_measure();
        let total = sam.total();
        if !(b >= total - 1e-12 * (1.0 + total)) {
            return Err(Error::InsufficientBound { bound: b, total });
        }
        for (index, atom) in sam.atoms().iter().enumerate() {
            if !omega.iter().any(|v| v.dist(&atom.u) <= 1e-9) {
                return Err(Error::WindowMissesAtom { index });
            }
        }
        let d = self.cone.dim() as f64;
        let r = self.clearance_radius();
        let c1 = (b.max(0.0) / self.cone.aperture()).powf(1.0 / (d - 1.0));
        let a = self.cone.normal_gap(omega)?;
        let c8 = if a.is_finite() { c1 / a } else { 0.0 };
        let values = omega
            .iter()
            .map(|u| self.support_value(u))
            .collect::<Result<Vec<f64>>>()?;
        let norm = bl_norm(
            |u| {
                let i = omega.iter().position(|v| v == u).expect("point of omega");
                values[i]
            },
            omega,
        );
        let h_in_range = values.iter().all(|&h| -r - CHECK_TOL <= h && h <= CHECK_TOL);
        let all_checks_pass = r <= c1 + CHECK_TOL
            && h_in_range
            && norm.sup <= c1 + CHECK_TOL
            && norm.lip <= c8 + CHECK_TOL;
        Ok(BoundsReport {
            r,
            c1,
            a,
            c8,
            sup_abs_h: norm.sup,
            lip_h: norm.lip,
            bl_h: norm.bl,
            all_checks_pass,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    Integral,
    Direct,
}

/// Clearance radius, constants `c1`, `a`, `c8 = c1 / a`, and norms of the
/// support function over the window atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub r: f64,
    pub c1: f64,
    pub a: f64,
    pub c8: f64,
    pub sup_abs_h: f64,
    pub lip_h: f64,
    pub bl_h: f64,
    pub all_checks_pass: bool,
}

/// Hausdorff distance of two C-full sets of the same cone.
///
/// Both are truncated at twice the larger certified height; the value is
/// confirmed by repeating at twice that height.
pub fn hausdorff_cfull(k: &CFullSet, l: &CFullSet) -> Result<f64> {
    if !k.cone.same_as(&l.cone) {
        return Err(Error::ConeMismatch);
    }
    let t = 2.0 * k.trunc_height.max(l.trunc_height);
    let at = |t: f64| -> Result<f64> {
        geom::hausdorff(k.at_height(t)?.body(), l.at_height(t)?.body())
    };
    let first = at(t)?;
    let second = at(2.0 * t)?;
    if (first - second).abs() > 1e-9 * (1.0 + first) {
        return Err(Error::CertificationFailed(format!(
            "Hausdorff distance changed from {first} to {second} when doubling the height"
        )));
    }
    Ok(first)
}
