//! Empirical stability of the solution under perturbation of the measure.
//!
//! Each trial perturbs masses and atom positions, solves both problems and
//! compares the Lévy–Prokhorov distance of the surface area measures with the
//! Hausdorff distance of the bodies. The ratio `dh / lp^{1/d}` estimates the
//! stability constant; the exponent is probed by regression over a ladder of
//! jitters.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coconvex::hausdorff_cfull;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::geom::Vector;
use crate::measures::{lp_distance, Atom, DiscreteMeasure};
use crate::solver::{solve, SolveOptions, SolveReport};

/// Rungs `jitter, jitter/2, …, jitter/2^5`.
pub const LADDER_RUNGS: u32 = 6;
pub const MIN_TRIALS: usize = 10;
/// Atoms must keep this many jitters of boundary margin.
const MARGIN_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRecord {
    pub trial: usize,
    pub jitter: f64,
    pub lp: f64,
    pub dh: f64,
    /// `dh / lp^{1/d}`; absent when `lp = 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRun {
    pub records: Vec<StabilityRecord>,
    /// Largest ratio, 0 when no ratio is defined.
    pub c_hat: f64,
    /// Least-squares slope of `ln dh` against `ln lp` over records with both
    /// positive; absent with fewer than two such records or no spread in `lp`.
    pub slope: Option<f64>,
}

impl StabilityRun {
    /// CSV with header `trial,jitter,lp,dh,ratio`; an undefined ratio is empty.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "trial,jitter,lp,dh,ratio")?;
        for r in &self.records {
            let ratio = r.ratio.map(|x| format!("{x:e}")).unwrap_or_default();
            writeln!(out, "{},{:e},{:e},{:e},{}", r.trial, r.jitter, r.lp, r.dh, ratio)?;
        }
        Ok(())
    }
}

fn converged(cone: &Cone, phi: &DiscreteMeasure) -> Result<SolveReport> {
    let rep = solve(cone, phi, &SolveOptions::default())?;
    if !rep.converged {
        return Err(Error::NoConvergence {
            residual: rep.residual_inf,
            iterations: rep.iterations,
        });
    }
    Ok(rep)
}

/// A unit tangent to the sphere at `u`.
fn tangent(rng: &mut ChaCha8Rng, u: &Vector) -> Vector {
    if u.dim() == 2 {
        let t = u.rot90();
        return if rng.random_bool(0.5) { t } else { -t };
    }
    loop {
        let v = Vector::xyz(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let t = v - *u * v.dot(u);
        if t.norm() > 1e-3 && v.norm() <= 1.0 {
            return t.normalized().expect("nonzero tangent");
        }
    }
}

/// Masses scaled by `1 + U[-j, j]`, atoms moved uniformly within geodesic radius `j`.
fn perturb(rng: &mut ChaCha8Rng, cone: &Cone, phi: &DiscreteMeasure, jitter: f64) -> Result<DiscreteMeasure> {
    let d = cone.dim() as i32;
    let mut atoms = Vec::with_capacity(phi.len());
    for a in phi.atoms() {
        let factor = 1.0 + jitter * rng.random_range(-1.0..=1.0);
        let angle = jitter * rng.random::<f64>().powf(1.0 / (d - 1) as f64);
        let t = tangent(rng, &a.u);
        let u = (a.u * angle.cos() + t * angle.sin()).unitize()?;
        atoms.push(Atom {
            u,
            mass: a.mass * factor,
        });
    }
    let moved = DiscreteMeasure::new(atoms)?;
    cone.check_atoms(&moved.support())?;
    Ok(moved)
}

fn slope(records: &[StabilityRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.lp > 0.0 && r.dh > 0.0)
        .map(|r| (r.lp.ln(), r.dh.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs `trials` perturbations at each rung of the jitter ladder.
///
/// Trial `k` of rung `j` draws from its own ChaCha stream, so the records of
/// the first trials do not depend on how many trials are requested.
pub fn run_stability(
    cone: &Cone,
    phi: &DiscreteMeasure,
    jitter: f64,
    trials: usize,
    seed: u64,
) -> Result<StabilityRun> {
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::InvalidInput(format!("jitter must be nonnegative, got {jitter}")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_TRIALS} trials are needed, got {trials}"
        )));
    }
    let required = MARGIN_FACTOR * jitter;
    for (index, u) in phi.support().iter().enumerate() {
        let margin = cone.margin_of(u);
        if margin < required {
            return Err(Error::MarginTooSmall {
                index,
                margin,
                required,
            });
        }
    }
    let base = converged(cone, phi)?;
    let base_sam = base.body.surface_area_measure();
    let expo = 1.0 / cone.dim() as f64;

    let mut records = Vec::with_capacity(trials * LADDER_RUNGS as usize);
    for rung in 0..LADDER_RUNGS {
        let j = jitter / 2f64.powi(rung as i32);
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((rung as u64) << 32) | trial as u64);
            let moved = perturb(&mut rng, cone, phi, j)?;
            let rep = converged(cone, &moved)?;
            let lp = lp_distance(&base_sam, &rep.body.surface_area_measure());
            let dh = hausdorff_cfull(&base.body, &rep.body)?;
            records.push(StabilityRecord {
                trial,
                jitter: j,
                lp,
                dh,
                ratio: (lp > 0.0).then(|| dh / lp.powf(expo)),
            });
        }
    }
    let c_hat = records
        .iter()
        .filter_map(|r| r.ratio)
        .fold(0.0_f64, f64::max);
    Ok(StabilityRun {
        slope: slope(&records),
        records,
        c_hat,
    })
}
