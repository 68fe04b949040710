//! Coconvex sets in pointed polyhedral cones of dimension 2 and 3: the discrete
//! Minkowski problem, surface area measures, coconvex volumes, and
//! Lévy–Prokhorov and Hausdorff distances.

pub mod cli;
pub mod coconvex;
pub mod cone;
pub mod error;
pub mod geom;
pub mod measures;
pub mod solver;

pub use coconvex::{hausdorff_cfull, CFullSet};
pub use cone::Cone;
pub use error::{Error, Result};
pub use geom::{Halfspace, Polytope, Vector};
pub use measures::{Atom, DiscreteMeasure};
