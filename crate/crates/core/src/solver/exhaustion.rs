//! Solving on growing restrictions of a measure, and the boundary growth
//! profile of a measure.

use serde::Serialize;

use super::{solve, SolveOptions};
use crate::coconvex::{hausdorff_cfull, CFullSet};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// One stage of an exhaustion run.
#[derive(Debug, Clone)]
pub struct ExhaustionStage {
    pub delta: f64,
    pub atom_count: usize,
    pub body: CFullSet,
    pub converged: bool,
    pub residual_inf: f64,
    pub volume: f64,
    pub clearance: f64,
    pub c1: f64,
    /// `(c1 / d) · φ(total)`.
    pub volume_bound: f64,
    pub bound_holds: bool,
    pub hausdorff_to_previous: Option<f64>,
}

/// Solves for `φ` restricted to atoms of margin at least `δ_j` for each of the
/// strictly decreasing `margins`.
pub fn solve_exhaustion(
    cone: &Cone,
    phi: &DiscreteMeasure,
    margins: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<ExhaustionStage>> {
    if margins.is_empty() || margins.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidInput("margins must be positive".into()));
    }
    if margins.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("margins must be strictly decreasing".into()));
    }
    let total = phi.total();
    let d = cone.dim() as f64;
    let mut stages: Vec<ExhaustionStage> = Vec::with_capacity(margins.len());
    for &delta in margins {
        let restricted = phi.restrict_margin(cone, delta)?;
        let rep = solve(cone, &restricted, opts)?;
        let body = rep.body;
        let volume = body.coconvex_volume_integral();
        // the solve matches φ only to tolerance, so budget for the larger total
        let budget = total.max(body.surface_area_measure().total());
        let bounds = body.bounds_report(&restricted.support(), budget)?;
        let volume_bound = bounds.c1 / d * total;
        let hausdorff_to_previous = match stages.last() {
            Some(prev) => Some(hausdorff_cfull(&prev.body, &body)?),
            None => None,
        };
        stages.push(ExhaustionStage {
            delta,
            atom_count: restricted.len(),
            clearance: body.clearance_radius(),
            body,
            converged: rep.converged,
            residual_inf: rep.residual_inf,
            volume,
            c1: bounds.c1,
            volume_bound,
            bound_holds: volume <= volume_bound + 1e-9,
            hausdorff_to_previous,
        });
    }
    Ok(stages)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub delta: f64,
    /// Atoms with margin in `[δ, 2δ)`.
    pub count: usize,
    pub mass: f64,
    /// `δ^{d-1}` times the bin mass.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    /// Sorted by decreasing `δ`.
    pub rows: Vec<ProfileRow>,
    pub unbounded_suspect: bool,
}

/// Decades of `δ` inspected at the small end when flagging growth.
const FLAG_DECADES: f64 = 4.0;

/// Bins the atoms by boundary margin in `[δ, 2δ)` and reports `δ^{d-1}` times
/// each bin mass. The profile is flagged when, over the last four decades of
/// `δ`, the values never decrease as `δ` shrinks, end positive, and at least
/// double.
pub fn necessary_profile(phi: &DiscreteMeasure, cone: &Cone, margins: &[f64]) -> Result<Profile> {
    if margins.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidInput("margins must be positive".into()));
    }
    let support = phi.support();
    cone.check_atoms(&support)?;
    let atom_margins: Vec<f64> = support.iter().map(|u| cone.margin_of(u)).collect();
    let mut deltas = margins.to_vec();
    deltas.sort_by(|a, b| b.total_cmp(a));
    deltas.dedup();
    let e = cone.dim() as i32 - 1;
    let rows: Vec<ProfileRow> = deltas
        .iter()
        .map(|&delta| {
            let (count, mass) = phi
                .atoms()
                .iter()
                .zip(&atom_margins)
                .filter(|(_, &m)| delta <= m && m < 2.0 * delta)
                .fold((0, 0.0), |(c, s), (a, _)| (c + 1, s + a.mass));
            ProfileRow {
                delta,
                count,
                mass,
                value: delta.powi(e) * mass,
            }
        })
        .collect();
    let unbounded_suspect = match rows.last() {
        Some(last) => {
            let floor = last.delta * 10f64.powf(FLAG_DECADES);
            let window: Vec<f64> = rows
                .iter()
                .filter(|r| r.delta <= floor)
                .map(|r| r.value)
                .collect();
            window.len() >= 2
                && window.windows(2).all(|w| w[1] >= w[0])
                && window[window.len() - 1] > 0.0
                && window[window.len() - 1] >= 2.0 * window[0]
        }
        None => false,
    };
    Ok(Profile {
        rows,
        unbounded_suspect,
    })
}

/// `2^{-1}, 2^{-2}, …` down to the first power of two at most `10^{-decades}`.
pub fn dyadic_margins(decades: u32) -> Vec<f64> {
    let floor = 10f64.powi(-(decades as i32));
    let mut out = Vec::new();
    let mut delta = 0.5;
    loop {
        out.push(delta);
        if delta <= floor {
            return out;
        }
        delta /= 2.0;
    }
}
