//! Exact max-flow on small dense networks (Edmonds–Karp).

use std::collections::VecDeque;

use num::{BigRational, Zero};

/// Residual network on a dense capacity matrix.
pub(crate) struct Network {
    cap: Vec<Vec<BigRational>>,
}

impl Network {
    pub fn new(nodes: usize) -> Self {
        Self {
            cap: vec![vec![BigRational::zero(); nodes]; nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: BigRational) {
        self.cap[from][to] += cap;
    }

    /// Value of a maximum flow from `s` to `t`.
    pub fn max_flow(mut self, s: usize, t: usize) -> BigRational {
        let n = self.cap.len();
        let mut total = BigRational::zero();
        loop {
            let mut prev = vec![usize::MAX; n];
            prev[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                if v == t {
                    break;
                }
                for w in 0..n {
                    if prev[w] == usize::MAX && self.cap[v][w] > BigRational::zero() {
                        prev[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return total;
            }
            let mut bottleneck: Option<BigRational> = None;
            let mut v = t;
            while v != s {
                let u = prev[v];
                let c = &self.cap[u][v];
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("augmenting path has an edge");
            let mut v = t;
            while v != s {
                let u = prev[v];
                self.cap[u][v] -= &b;
                self.cap[v][u] += &b;
                v = u;
            }
            total += b;
        }
    }
}
