//! Epsilon-insensitive support vector regression with an RBF kernel.
//!
//! The dual is solved in the single-coefficient form
//!
//! ```text
//! minimize   D(b) = 1/2 b'Kb - y'b + eps * |b|_1
//! subject to sum(b) = 0,  -C <= b_i <= C
//! ```
//!
//! where `b_i = alpha_i - alpha_i*`. Each iteration picks the maximal
//! violating pair and minimizes the piecewise-quadratic objective exactly
//! along the direction that keeps the equality constraint, so `D` never
//! increases.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub epsilon: f64,
    pub cost: f64,
    pub gamma: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    /// One pass is `n` pair updates.
    pub max_passes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub support: Vec<Vec<f64>>,
    pub coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
}

impl SvrModel {
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, c)| c * rbf(s, x, self.gamma))
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Debug, Clone)]
pub struct SvrFit {
    pub model: SvrModel,
    /// Full dual coefficient vector, aligned with the training rows.
    pub beta: Vec<f64>,
    /// Dual objective before the first update and after every update.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub max_violation: f64,
    pub converged: bool,
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

pub fn kernel_matrix(x: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        k[i][i] = 1.0;
        for j in 0..i {
            let v = rbf(&x[i], &x[j], gamma);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

/// Dual objective of `beta`, computed from scratch.
pub fn dual_objective(k: &[Vec<f64>], y: &[f64], beta: &[f64], epsilon: f64) -> f64 {
    let mut quad = 0.0;
    for (i, bi) in beta.iter().enumerate() {
        if *bi != 0.0 {
            quad += bi * k[i].iter().zip(beta).map(|(kij, bj)| kij * bj).sum::<f64>();
        }
    }
    0.5 * quad - y.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>()
        + epsilon * beta.iter().map(|b| b.abs()).sum::<f64>()
}

struct Solver<'a> {
    k: &'a [Vec<f64>],
    beta: Vec<f64>,
    /// Gradient of the smooth part: K b - y.
    grad: Vec<f64>,
    eps: f64,
    cost: f64,
}

impl Solver<'_> {
    fn right(&self, i: usize) -> f64 {
        if self.beta[i] >= 0.0 {
            self.eps
        } else {
            -self.eps
        }
    }

    fn left(&self, i: usize) -> f64 {
        if self.beta[i] > 0.0 {
            self.eps
        } else {
            -self.eps
        }
    }

    /// (i to increase, j to decrease, violation)
    fn select(&self) -> Option<(usize, usize, f64)> {
        let mut up: Option<(usize, f64)> = None;
        let mut down: Option<(usize, f64)> = None;
        for t in 0..self.beta.len() {
            if self.beta[t] < self.cost {
                let v = self.grad[t] + self.right(t);
                if up.is_none_or(|(_, best)| v < best) {
                    up = Some((t, v));
                }
            }
            if self.beta[t] > -self.cost {
                let v = self.grad[t] + self.left(t);
                if down.is_none_or(|(_, best)| v > best) {
                    down = Some((t, v));
                }
            }
        }
        let ((i, vi), (j, vj)) = (up?, down?);
        Some((i, j, vj - vi))
    }

    /// Objective change for moving `t` from i to j.
    fn delta(&self, i: usize, j: usize, a: f64, g: f64, t: f64) -> f64 {
        let (bi, bj) = (self.beta[i], self.beta[j]);
        // |bi + t| - |bi| and |bj - t| - |bj| for t >= 0, without cancellation
        let up = if bi >= 0.0 {
            t
        } else if t <= -bi {
            -t
        } else {
            t + 2.0 * bi
        };
        let down = if bj <= 0.0 {
            t
        } else if t <= bj {
            -t
        } else {
            t - 2.0 * bj
        };
        0.5 * a * t * t + g * t + self.eps * (up + down)
    }

    /// Exact minimizer of the pair objective over `[0, hi]`.
    fn line_search(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.k;
        let a = (k[i][i] + k[j][j] - 2.0 * k[i][j]).max(0.0);
        let g = self.grad[i] - self.grad[j];
        let (bi, bj) = (self.beta[i], self.beta[j]);
        let hi = (self.cost - bi).min(bj + self.cost).max(0.0);

        let mut points = vec![0.0, hi];
        for bp in [-bi, bj] {
            if bp > 0.0 && bp < hi {
                points.push(bp);
            }
        }
        points.sort_by(f64::total_cmp);

        let mut best = (0.0, 0.0);
        for w in points.windows(2) {
            let (l, r) = (w[0], w[1]);
            let mut cands = vec![l, r];
            if a > 1e-14 && r > l {
                let mid = 0.5 * (l + r);
                let si = (bi + mid).signum();
                let sj = (bj - mid).signum();
                let t = -(g + self.eps * (si - sj)) / a;
                cands.push(t.clamp(l, r));
            }
            for t in cands {
                let d = self.delta(i, j, a, g, t);
                if d < best.1 {
                    best = (t, d);
                }
            }
        }
        best
    }

    fn apply(&mut self, i: usize, j: usize, t: f64) {
        let hi_i = self.cost - self.beta[i];
        let hi_j = self.beta[j] + self.cost;
        self.beta[i] = if t == hi_i { self.cost } else { self.beta[i] + t };
        self.beta[j] = if t == hi_j { -self.cost } else { self.beta[j] - t };
        let (ki, kj) = (&self.k[i], &self.k[j]);
        for ((g, a), b) in self.grad.iter_mut().zip(ki).zip(kj) {
            *g += t * (a - b);
        }
    }

    fn bias(&self) -> f64 {
        let mut sum = 0.0;
        let mut free = 0usize;
        for (t, &b) in self.beta.iter().enumerate() {
            if b != 0.0 && b.abs() < self.cost {
                sum += self.grad[t] + self.eps * b.signum();
                free += 1;
            }
        }
        if free > 0 {
            return -sum / free as f64;
        }
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for t in 0..self.beta.len() {
            if self.beta[t] < self.cost {
                hi = hi.min(self.grad[t] + self.right(t));
            }
            if self.beta[t] > -self.cost {
                lo = lo.max(self.grad[t] + self.left(t));
            }
        }
        let mid = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        };
        -mid
    }
}

/// Fits the regressor on rows `x` (already scaled) with targets `y`.
pub fn fit(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> SvrFit {
    let k = kernel_matrix(x, params.gamma);
    fit_with_kernel(x, &k, y, params)
}

pub fn fit_with_kernel(x: &[Vec<f64>], k: &[Vec<f64>], y: &[f64], params: &SvrParams) -> SvrFit {
    let n = y.len();
    let mut solver = Solver {
        k,
        beta: vec![0.0; n],
        grad: y.iter().map(|v| -v).collect(),
        eps: params.epsilon,
        cost: params.cost,
    };
    let mut objective = 0.0;
    let mut trace = vec![objective];
    let max_iter = params.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut violation = 0.0;
    let mut converged = n < 2;

    while !converged && iterations < max_iter {
        let Some((i, j, v)) = solver.select() else {
            converged = true;
            break;
        };
        violation = v;
        if v < params.tolerance {
            converged = true;
            break;
        }
        let (t, d) = solver.line_search(i, j);
        if !(d < 0.0) || t == 0.0 {
            // no representable descent left along the best pair
            converged = v < params.tolerance;
            break;
        }
        solver.apply(i, j, t);
        objective += d;
        trace.push(objective);
        iterations += 1;
    }
    if !converged && iterations >= max_iter {
        violation = solver.select().map_or(0.0, |s| s.2);
    }

    let bias = solver.bias();
    let mut support = Vec::new();
    let mut coef = Vec::new();
    for (row, &b) in x.iter().zip(&solver.beta) {
        if b != 0.0 {
            support.push(row.clone());
            coef.push(b);
        }
    }
    SvrFit {
        model: SvrModel {
            support,
            coef,
            bias,
            gamma: params.gamma,
        },
        beta: solver.beta,
        objective_trace: trace,
        iterations,
        max_violation: violation,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eps: f64, cost: f64, gamma: f64) -> SvrParams {
        SvrParams {
            epsilon: eps,
            cost,
            gamma,
            tolerance: 1e-10,
            max_passes: 10_000,
        }
    }

    #[test]
    fn objective_never_increases() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 10.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 0.5 + 0.4 * r[0].sin()).collect();
        let fit = fit(&x, &y, &params(0.02, 1.0, 1.0));
        assert!(fit.converged, "violation {} after {}", fit.max_violation, fit.iterations);
        for w in fit.objective_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let k = kernel_matrix(&x, 1.0);
        let exact = dual_objective(&k, &y, &fit.beta, 0.02);
        assert!((exact - fit.objective_trace.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn constraints_hold() {
        let x: Vec<Vec<f64>> = (0..25).map(|i| vec![(i % 7) as f64, (i % 5) as f64]).collect();
        let y: Vec<f64> = (0..25).map(|i| ((i * 37) % 11) as f64 / 10.0).collect();
        let fit = fit(&x, &y, &params(0.05, 0.5, 0.3));
        assert!(fit.beta.iter().sum::<f64>().abs() < 1e-9);
        assert!(fit.beta.iter().all(|b| b.abs() <= 0.5));
    }

    #[test]
    fn wide_tube_predicts_constant() {
        // every label within epsilon of 0.5: b = 0 is optimal
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let y = vec![0.45, 0.5, 0.55, 0.5, 0.48];
        let fit = fit(&x, &y, &params(0.1, 1.0, 1.0));
        assert!(fit.beta.iter().all(|&b| b == 0.0));
        for row in &x {
            let p = fit.model.predict_one(row);
            assert!((p - 0.5).abs() <= 0.1 + 1e-12, "{p}");
        }
    }
}
