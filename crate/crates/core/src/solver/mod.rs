//! The discrete Minkowski problem in a cone: find a C-full set whose surface
//! area measure is a prescribed finite measure on the window.
//!
//! Writing `p = -h`, the coconvex volume `V(p)` is convex with gradient equal to
//! the facet areas `F(p)`, so `Φ(p) = V(p) − <f, p>` is a convex potential whose
//! critical point is the solution. It is minimized by damped Newton steps on a
//! finite-difference Hessian with an Armijo line search. A facet that has
//! vanished contributes nothing to the Hessian, so its plane is instead moved
//! back onto the body, which can only lower `Φ`.

mod chain;
mod examples;
mod exhaustion;

pub use chain::solve_chain_2d;
pub use examples::{
    gen_boundary_blowup_measure, gen_orthant_example, orthant_hull_areas, BandFacet,
    OrthantExample,
};
pub use exhaustion::{
    dyadic_margins, necessary_profile, solve_exhaustion, ExhaustionStage, Profile, ProfileRow,
};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coconvex::CFullSet;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::geom::Vector;
use crate::measures::DiscreteMeasure;

/// Central-difference step, relative to `p_j`.
const FD_STEP: f64 = 1e-6;
/// Tikhonov term on the Hessian, relative to its largest diagonal entry.
const RIDGE: f64 = 1e-12;
/// Relative depth by which a re-seated facet plane cuts into the body.
const RESEAT_DEPTH: f64 = 1e-3;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
/// A step may shrink no support number below this fraction of its value.
const MIN_SHRINK: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Jitters the initial `θ` by `U(-0.5, 0.5)` per atom.
    pub seed: Option<u64>,
    /// Multiplies the initial support numbers.
    pub init_scale: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            seed: None,
            init_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub body: CFullSet,
    /// Target masses in atom order.
    pub target: Vec<f64>,
    /// Facet areas of `body` in atom order.
    pub achieved: Vec<f64>,
    pub residual_inf: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Residual sup-norm after every accepted step.
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionAtom {
    pub u: Vector,
    pub h: f64,
    pub target_mass: f64,
    pub achieved_mass: f64,
}

/// JSON form of a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub atoms: Vec<SolutionAtom>,
    pub residual_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    pub coconvex_volume: f64,
}

impl SolveReport {
    pub fn to_doc(&self) -> SolutionDoc {
        let atoms = self
            .body
            .normals()
            .iter()
            .zip(self.body.support())
            .zip(self.target.iter().zip(&self.achieved))
            .map(|((&u, &h), (&target_mass, &achieved_mass))| SolutionAtom {
                u,
                h,
                target_mass,
                achieved_mass,
            })
            .collect();
        SolutionDoc {
            atoms,
            residual_inf: self.residual_inf,
            iterations: self.iterations,
            converged: self.converged,
            coconvex_volume: self.body.coconvex_volume_integral(),
        }
    }
}

struct Problem<'a> {
    cone: &'a Cone,
    normals: Vec<Vector>,
    target: Vec<f64>,
}

struct State {
    p: DVector<f64>,
    body: CFullSet,
    areas: Vec<f64>,
    residual: DVector<f64>,
    res_inf: f64,
    potential: f64,
}

impl Problem<'_> {
    fn areas(&self, p: &DVector<f64>) -> Result<Vec<f64>> {
        let h: Vec<f64> = p.iter().map(|x| -x).collect();
        Ok(CFullSet::build(self.cone, &self.normals, &h)?.cut_areas())
    }

    fn eval(&self, p: DVector<f64>) -> Result<State> {
        let h: Vec<f64> = p.iter().map(|x| -x).collect();
        let body = CFullSet::build(self.cone, &self.normals, &h)?;
        let areas = body.cut_areas();
        let residual = DVector::from_iterator(
            areas.len(),
            areas.iter().zip(&self.target).map(|(a, f)| a - f),
        );
        let res_inf = residual.amax();
        let d = self.cone.dim() as f64;
        let potential = p
            .iter()
            .zip(areas.iter().zip(&self.target))
            .map(|(p, (a, f))| p * (a / d - f))
            .sum();
        Ok(State {
            p,
            body,
            areas,
            residual,
            res_inf,
            potential,
        })
    }

    /// Symmetrized `∂F_i/∂p_j` over the facets in `live`.
    fn hessian(&self, p: &DVector<f64>, live: &[usize]) -> Result<DMatrix<f64>> {
        let m = live.len();
        let mut hess = DMatrix::zeros(m, m);
        for (c, &j) in live.iter().enumerate() {
            let step = FD_STEP * p[j];
            let mut plus = p.clone();
            plus[j] += step;
            let mut minus = p.clone();
            minus[j] -= step;
            let (fp, fm) = (self.areas(&plus)?, self.areas(&minus)?);
            for (r, &i) in live.iter().enumerate() {
                hess[(r, c)] = (fp[i] - fm[i]) / (2.0 * step);
            }
        }
        Ok((&hess + hess.transpose()) * 0.5)
    }

    /// Newton step on the live facets, re-seating move on the vanished ones.
    fn direction(&self, state: &State) -> Result<DVector<f64>> {
        let n = state.p.len();
        let live: Vec<usize> = (0..n).filter(|&i| state.areas[i] > 0.0).collect();
        let mut dir = DVector::zeros(n);
        if !live.is_empty() {
            let hess = self.hessian(&state.p, &live)?;
            let scale = hess.diagonal().amax().max(f64::MIN_POSITIVE);
            let rhs = DVector::from_iterator(live.len(), live.iter().map(|&i| -state.residual[i]));
            // a positive definite system keeps the step a descent direction for Φ
            let mut ridge = RIDGE * scale;
            let step = loop {
                let mut sys = hess.clone();
                for k in 0..live.len() {
                    sys[(k, k)] += ridge;
                }
                match sys.cholesky() {
                    Some(ch) => break ch.solve(&rhs),
                    None => ridge *= 10.0,
                }
            };
            for (k, &i) in live.iter().enumerate() {
                dir[i] = step[k];
            }
        }
        for (i, u) in self.normals.iter().enumerate() {
            if state.areas[i] <= 0.0 {
                let reach = -state.body.support_value(u)? * (1.0 + RESEAT_DEPTH);
                dir[i] = (reach - state.p[i]).max(RESEAT_DEPTH * state.p[i]);
            }
        }
        Ok(dir)
    }
}

/// Solves for the C-full set whose surface area measure is `phi`.
///
/// Non-convergence is not an error: the report carries `converged = false`.
pub fn solve(cone: &Cone, phi: &DiscreteMeasure, opts: &SolveOptions) -> Result<SolveReport> {
    let normals = phi.support();
    for u in &normals {
        if u.dim() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                found: u.dim(),
            });
        }
    }
    cone.check_atoms(&normals)?;
    let target: Vec<f64> = phi.atoms().iter().map(|a| a.mass).collect();
    let scale = target.iter().fold(1.0_f64, |m, &f| m.max(f));
    let goal = opts.tol * scale;
    let problem = Problem {
        cone,
        normals,
        target: target.clone(),
    };
    let n = target.len();
    let d = cone.dim() as f64;
    let sigma = cone.aperture();

    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let p0 = DVector::from_iterator(
        n,
        target.iter().map(|&f| {
            let jitter = rng.as_mut().map_or(0.0, |r| r.random_range(-0.5..0.5));
            (f / sigma).powf(1.0 / (d - 1.0)) * opts.init_scale * f64::exp(jitter)
        }),
    );
    let mut state = problem.eval(p0)?;
    // V is homogeneous of degree d, so Φ(s p) is minimized in closed form
    let pushed: f64 = state.p.iter().zip(&target).map(|(p, f)| p * f).sum();
    let held: f64 = state.p.iter().zip(&state.areas).map(|(p, a)| p * a).sum();
    if n > 0 && held > 0.0 {
        let s = (pushed / held).powf(1.0 / (d - 1.0));
        let scaled = problem.eval(&state.p * s)?;
        if scaled.potential < state.potential {
            state = scaled;
        }
    }

    let mut trace = vec![state.res_inf];
    let mut iterations = 0;
    while state.res_inf > goal && iterations < opts.max_iter {
        iterations += 1;
        let dir = problem.direction(&state)?;
        let slope = state.residual.dot(&dir);
        let slack = 1e-13 * (1.0 + state.potential.abs());
        let mut alpha: f64 = 1.0;
        for (i, &x) in dir.iter().enumerate() {
            if x < 0.0 {
                alpha = alpha.min((MIN_SHRINK - 1.0) * state.p[i] / x);
            }
        }
        let mut next = None;
        for _ in 0..MAX_HALVINGS {
            if let Ok(trial) = problem.eval(&state.p + &dir * alpha) {
                let armijo = trial.potential <= state.potential + ARMIJO * alpha * slope;
                let flat = trial.potential <= state.potential + slack && trial.res_inf < state.res_inf;
                if armijo || flat {
                    next = Some(trial);
                    break;
                }
            }
            alpha /= 2.0;
        }
        match next {
            Some(trial) => {
                state = trial;
                trace.push(state.res_inf);
            }
            None => break,
        }
    }

    let converged = state.res_inf <= goal;
    Ok(SolveReport {
        body: state.body,
        target,
        achieved: state.areas,
        residual_inf: state.res_inf,
        iterations,
        converged,
        objective_trace: trace,
    })
}
