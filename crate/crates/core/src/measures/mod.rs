//! Finite discrete measures on the unit sphere, the Lévy–Prokhorov distance
//! between them and bounded-Lipschitz norms of functions on finite sets.

mod flow;
mod lp;

pub use lp::{lp_distance, lp_distance_oracle, ORACLE_ATOM_LIMIT};

use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::geom::Vector;

/// Atoms closer than this are the same point.
pub const ATOM_MERGE: f64 = 1e-12;
/// Allowed deviation of an atom from unit length.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub u: Vector,
    pub mass: f64,
}

/// A finite measure with positive masses at distinct unit vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

/// JSON form of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Validates atoms and merges duplicates by adding their masses.
    /// Order of first appearance is kept.
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let mut merged: Vec<Atom> = Vec::new();
        let mut dim = None;
        for (index, a) in atoms.into_iter().enumerate() {
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::NonpositiveMass {
                    index,
                    mass: a.mass,
                });
            }
            let norm = a.u.norm();
            if !((norm - 1.0).abs() <= UNIT_TOL) {
                return Err(Error::NonUnitAtom { index, norm });
            }
            match dim {
                None => dim = Some(a.u.dim()),
                Some(d) if d != a.u.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: a.u.dim(),
                    })
                }
                _ => {}
            }
            match merged.iter_mut().find(|b| b.u.dist(&a.u) <= ATOM_MERGE) {
                Some(b) => b.mass += a.mass,
                None => merged.push(a),
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Convenience constructor from `(u, mass)` pairs.
    pub fn from_pairs(pairs: &[(Vector, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(u, mass)| Atom { u, mass }))
    }

    pub fn from_doc(doc: &MeasureDoc) -> Result<Self> {
        Self::new(doc.atoms.iter().copied())
    }

    pub fn to_doc(&self) -> MeasureDoc {
        MeasureDoc {
            atoms: self.atoms.clone(),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<Vector> {
        self.atoms.iter().map(|a| a.u).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Mass at `u`, zero if `u` is not an atom.
    pub fn mass_at(&self, u: &Vector) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.u.dist(u) <= ATOM_MERGE)
            .map_or(0.0, |a| a.mass)
    }

    /// Keeps the atoms at boundary margin at least `delta` in the window of `cone`.
    pub fn restrict_margin(&self, cone: &Cone, delta: f64) -> Result<DiscreteMeasure> {
        cone.check_atoms(&self.support())?;
        Ok(Self {
            atoms: self
                .atoms
                .iter()
                .filter(|a| cone.margin_of(&a.u) >= delta)
                .copied()
                .collect(),
        })
    }
}

/// Lipschitz constant, sup norm and their sum for a function on a finite set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlNorm {
    pub lip: f64,
    pub sup: f64,
    pub bl: f64,
}

/// Bounded-Lipschitz norm of `f` restricted to `omega`.
pub fn bl_norm<F: Fn(&Vector) -> f64>(f: F, omega: &[Vector]) -> BlNorm {
    let vals: Vec<f64> = omega.iter().map(&f).collect();
    let sup = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut lip = 0.0_f64;
    for i in 0..omega.len() {
        for j in i + 1..omega.len() {
            let d = omega[i].dist(&omega[j]);
            if d > 0.0 {
                lip = lip.max((vals[i] - vals[j]).abs() / d);
            }
        }
    }
    BlNorm {
        lip,
        sup,
        bl: lip + sup,
    }
}

/// `|∫ f dμ − ∫ f dν|` for `f` given on the union of the supports.
pub fn pairing_gap<F: Fn(&Vector) -> Option<f64>>(
    f: F,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<f64> {
    let integrate = |m: &DiscreteMeasure, offset: usize| -> Result<f64> {
        m.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                f(&a.u)
                    .map(|v| v * a.mass)
                    .ok_or(Error::MissingValue { index: offset + i })
            })
            .sum()
    };
    Ok((integrate(mu, 0)? - integrate(nu, mu.len())?).abs())
}

/// Constant used when comparing pairing gaps with Lévy–Prokhorov distances:
/// `1 + max(|μ|, |ν|) + ||μ| − |ν||`.
pub fn pairing_constant(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let (a, b) = (mu.total(), nu.total());
    1.0 + a.max(b) + (a - b).abs()
}

/// Lookup table as a function, matching points within [`ATOM_MERGE`].
pub fn table_fn(table: &[(Vector, f64)]) -> impl Fn(&Vector) -> Option<f64> + '_ {
    move |u| {
        table
            .iter()
            .find(|(v, _)| v.dist(u) <= ATOM_MERGE)
            .map(|&(_, x)| x)
    }
}
