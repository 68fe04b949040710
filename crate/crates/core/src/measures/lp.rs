//! Exact Lévy–Prokhorov distance between finite discrete measures.
//!
//! Masses are converted to exact rationals, so the deficiency
//! `max_A μ(A) − ν(A_ε)` carries no rounding error. The open neighbourhood
//! `A_ε = {x : |x − y| < ε for some y ∈ A}` only changes when `ε` crosses a
//! pairwise atom distance; on `(D_k, D_{k+1}]` the atoms joined are those at
//! distance at most `D_k`.

use num::{BigRational, ToPrimitive, Zero};

use super::flow::Network;
use super::DiscreteMeasure;
use crate::error::{Error, Result};

/// Largest total number of atoms accepted by [`lp_distance_oracle`].
pub const ORACLE_ATOM_LIMIT: usize = 16;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

struct Setup {
    mu: Vec<BigRational>,
    nu: Vec<BigRational>,
    dist: Vec<Vec<f64>>,
    breaks: Vec<f64>,
}

fn setup(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Setup {
    let dist: Vec<Vec<f64>> = mu
        .atoms()
        .iter()
        .map(|a| nu.atoms().iter().map(|b| a.u.dist(&b.u)).collect())
        .collect();
    let mut breaks: Vec<f64> = dist.iter().flatten().copied().collect();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    Setup {
        mu: mu.atoms().iter().map(|a| exact(a.mass)).collect(),
        nu: nu.atoms().iter().map(|a| exact(a.mass)).collect(),
        dist,
        breaks,
    }
}

/// `max_A from(A) − to(A_ε)` over the bipartite graph with edges `joined(i, j)`.
fn deficiency_flow(
    from: &[BigRational],
    to: &[BigRational],
    joined: impl Fn(usize, usize) -> bool,
) -> BigRational {
    let (m, n) = (from.len(), to.len());
    let total: BigRational = from.iter().sum();
    let (s, t) = (0, m + n + 1);
    let mut g = Network::new(m + n + 2);
    let unbounded = &total + BigRational::from_integer(1.into());
    for (i, a) in from.iter().enumerate() {
        g.add_edge(s, 1 + i, a.clone());
        for j in 0..n {
            if joined(i, j) {
                g.add_edge(1 + i, 1 + m + j, unbounded.clone());
            }
        }
    }
    for (j, b) in to.iter().enumerate() {
        g.add_edge(1 + m + j, t, b.clone());
    }
    total - g.max_flow(s, t)
}

/// Two-sided deficiency with atoms joined at distance at most `radius`.
fn two_sided_flow(st: &Setup, radius: f64) -> BigRational {
    let a = deficiency_flow(&st.mu, &st.nu, |i, j| st.dist[i][j] <= radius);
    let b = deficiency_flow(&st.nu, &st.mu, |j, i| st.dist[i][j] <= radius);
    a.max(b)
}

/// Exact Lévy–Prokhorov distance.
///
/// The deficiency is nonincreasing in `ε` and the breakpoints increase, so the
/// first feasible interval is found by bisection; on it the infimum is
/// `max(G_k, D_k)`.
pub fn lp_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let st = setup(mu, nu);
    let m = st.breaks.len();
    let feasible = |k: usize| -> bool {
        if k + 1 >= m {
            return true;
        }
        two_sided_flow(&st, st.breaks[k]) <= exact(st.breaks[k + 1])
    };
    let k = (0..m).collect::<Vec<_>>().partition_point(|&k| !feasible(k));
    let g = two_sided_flow(&st, st.breaks[k]);
    if g > exact(st.breaks[k]) {
        to_f64(&g)
    } else {
        st.breaks[k]
    }
}

/// Brute-force Lévy–Prokhorov distance by enumerating all atom subsets.
///
/// Returns the smallest candidate `c` (a pairwise distance or a deficiency
/// value) whose right-limit deficiency is at most `c`.
pub fn lp_distance_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let found = mu.len() + nu.len();
    if found > ORACLE_ATOM_LIMIT {
        return Err(Error::TooManyAtoms {
            limit: ORACLE_ATOM_LIMIT,
            found,
        });
    }
    let st = setup(mu, nu);
    let deficiency = |radius: &BigRational| -> BigRational {
        let within = |i: usize, j: usize| &exact(st.dist[i][j]) <= radius;
        let one_side = |from: &[BigRational], to: &[BigRational], near: &dyn Fn(usize, usize) -> bool| {
            let mut best = BigRational::zero();
            for mask in 0u32..(1u32 << from.len()) {
                let mut d = BigRational::zero();
                for (i, x) in from.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        d += x;
                    }
                }
                for (j, y) in to.iter().enumerate() {
                    if (0..from.len()).any(|i| mask >> i & 1 == 1 && near(i, j)) {
                        d -= y;
                    }
                }
                if d > best {
                    best = d;
                }
            }
            best
        };
        let a = one_side(&st.mu, &st.nu, &|i, j| within(i, j));
        let b = one_side(&st.nu, &st.mu, &|j, i| within(i, j));
        a.max(b)
    };

    let mut candidates: Vec<BigRational> = st.breaks.iter().map(|&d| exact(d)).collect();
    let extra: Vec<BigRational> = candidates.iter().map(&deficiency).collect();
    candidates.extend(extra);
    candidates.sort();
    candidates.dedup();
    let best = candidates
        .into_iter()
        .find(|c| deficiency(c) <= *c)
        .expect("the total masses are feasible");
    Ok(to_f64(&best))
}
