//! Derivative-free minimization for the likelihood surfaces in this crate:
//! a standard Nelder-Mead simplex search followed by a finite-difference
//! Newton polish that drives the gradient norm down far enough for the
//! optimum to pass a first-order check.
//!
//! All objectives are minimized; callers hand in the negative
//! log-likelihood. Parameter points where the objective is undefined should
//! return `f64::INFINITY` (the search treats them as rejections).

use nalgebra::{DMatrix, DVector};

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective evaluations spent across all phases.
    pub evaluations: usize,
    /// Whether the simplex contracted below tolerance before the budget ran
    /// out (the Newton polish afterwards never unsets this).
    pub converged: bool,
}

/// Nelder-Mead simplex minimization with standard coefficients.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    tol: f64,
) -> OptimResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if n == 0 {
        let value = eval(x0, &mut evals);
        return OptimResult { x: vec![], value, evaluations: evals, converged: true };
    }

    // Initial simplex: x0 plus one vertex per coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if v[i].abs() > 1.0 { step * v[i].abs() } else { step };
        let fv = eval(&v, &mut evals);
        simplex.push((v, fv));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let diameter: f64 = (1..=n)
            .map(|i| {
                simplex[i]
                    .0
                    .iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if best.is_finite() && spread <= tol * (1.0 + best.abs()) && diameter <= 1e-7 {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for vertex in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&vertex.0) {
                *c += x / n as f64;
            }
        }

        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n].0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let f_reflect = eval(&reflect, &mut evals);

        if f_reflect < simplex[0].1 {
            // Try to expand.
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            let f_expand = eval(&expand, &mut evals);
            simplex[n] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[n - 1].1 {
            simplex[n] = (reflect, f_reflect);
        } else {
            // Contract toward the better of worst/reflected.
            let (anchor, f_anchor) = if f_reflect < simplex[n].1 {
                (&reflect, f_reflect)
            } else {
                (&simplex[n].0.clone(), simplex[n].1)
            };
            let contract: Vec<f64> = centroid
                .iter()
                .zip(anchor)
                .map(|(c, a)| c + rho * (a - c))
                .collect();
            let f_contract = eval(&contract, &mut evals);
            if f_contract < f_anchor {
                simplex[n] = (contract, f_contract);
            } else {
                // Shrink everything toward the best vertex.
                let best_point = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (x, b) in vertex.0.iter_mut().zip(&best_point) {
                        *x = b + sigma * (*x - b);
                    }
                    vertex.1 = eval(&vertex.0.clone(), &mut evals);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    OptimResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        evaluations: evals,
        converged,
    }
}

/// Central-difference gradient.
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let hi = h * (1.0 + x[i].abs());
        probe[i] = x[i] + hi;
        let up = f(&probe);
        probe[i] = x[i] - hi;
        let down = f(&probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * hi);
    }
    grad
}

/// Central-difference Hessian (symmetric by construction).
fn fd_hessian<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    let f0 = f(x);
    let steps: Vec<f64> = x.iter().map(|v| h * (1.0 + v.abs())).collect();
    for i in 0..n {
        // Diagonal: (f(x+h) - 2 f(x) + f(x-h)) / h^2.
        probe[i] = x[i] + steps[i];
        let up = f(&probe);
        probe[i] = x[i] - steps[i];
        let down = f(&probe);
        probe[i] = x[i];
        hess[(i, i)] = (up - 2.0 * f0 + down) / (steps[i] * steps[i]);
        for j in 0..i {
            probe[i] = x[i] + steps[i];
            probe[j] = x[j] + steps[j];
            let pp = f(&probe);
            probe[j] = x[j] - steps[j];
            let pm = f(&probe);
            probe[i] = x[i] - steps[i];
            let mm = f(&probe);
            probe[j] = x[j] + steps[j];
            let mp = f(&probe);
            probe[i] = x[i];
            probe[j] = x[j];
            let val = (pp - pm - mp + mm) / (4.0 * steps[i] * steps[j]);
            hess[(i, j)] = val;
            hess[(j, i)] = val;
        }
    }
    hess
}

/// Newton refinement with a regularized finite-difference Hessian and
/// halving line search. Returns the improved point (never worse than the
/// input) and the evaluations spent.
pub fn newton_polish<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    iterations: usize,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut evals = 0usize;
    let mut count = |v: f64, evals: &mut usize| -> f64 {
        *evals += 1;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x = x0.to_vec();
    let mut fx = {
        let v = f(&x);
        count(v, &mut evals)
    };
    if n == 0 || !fx.is_finite() {
        return (x, fx, evals);
    }

    let h = 1e-4;
    for _ in 0..iterations {
        let grad = {
            let mut wrapped = |p: &[f64]| {
                let v = f(p);
                count(v, &mut evals)
            };
            fd_gradient(&mut wrapped, &x, h)
        };
        let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm < 1e-9 {
            break;
        }
        let hess = {
            let mut wrapped = |p: &[f64]| {
                let v = f(p);
                count(v, &mut evals)
            };
            fd_hessian(&mut wrapped, &x, h)
        };
        let g = DVector::from_column_slice(&grad);

        // Regularize until the Hessian is positive definite so the Newton
        // direction is a descent direction.
        let mut ridge = 0.0;
        let scale = hess.diagonal().amax().max(1.0);
        let direction = loop {
            let reg = &hess + DMatrix::identity(n, n) * ridge;
            if let Some(chol) = reg.clone().cholesky() {
                break chol.solve(&g);
            }
            ridge = if ridge == 0.0 { 1e-8 * scale } else { ridge * 10.0 };
            if ridge > 1e12 * scale {
                break g.clone() / scale;
            }
        };

        // Backtracking line search on the Newton step.
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x
                .iter()
                .zip(direction.iter())
                .map(|(xi, di)| xi - step * di)
                .collect();
            let ft = {
                let v = f(&trial);
                count(v, &mut evals)
            };
            if ft < fx {
                x = trial;
                fx = ft;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx, evals)
}

/// Nelder-Mead followed by a Newton polish: the workhorse for every MLE in
/// this crate.
pub fn minimize<F: FnMut(&[f64]) -> f64 + Clone>(
    f: F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
) -> OptimResult {
    let nm = nelder_mead(f.clone(), x0, step, max_evals, 1e-10);
    let (x, value, polish_evals) = newton_polish(f, &nm.x, 12);
    OptimResult {
        x,
        value,
        evaluations: nm.evaluations + polish_evals,
        converged: nm.converged && value.is_finite(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn quadratic_bowl_is_solved_to_high_precision() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2) + 5.0;
        let out = minimize(f, &[0.0, 0.0], 0.5, 4000);
        assert!(out.converged);
        assert!((out.x[0] - 3.0).abs() < 1e-6);
        assert!((out.x[1] + 1.0).abs() < 1e-6);
        assert!((out.value - 5.0).abs() < 1e-10);
    }

    #[test]
    fn rosenbrock_valley_is_followed_to_the_minimum() {
        let out = minimize(rosenbrock, &[-1.2, 1.0], 0.5, 20_000);
        assert!((out.x[0] - 1.0).abs() < 1e-4, "x = {:?}", out.x);
        assert!((out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn polish_leaves_the_gradient_tiny() {
        let f = |x: &[f64]| (x[0] - 0.7).powi(4) + (x[1] * x[0] - 0.2).powi(2) + 1.0;
        let out = minimize(f, &[2.0, 2.0], 0.3, 8000);
        let grad = fd_gradient(f, &out.x, 1e-5);
        let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        assert!(gnorm < 1e-4, "gradient max-norm {gnorm}");
    }

    #[test]
    fn rejection_regions_are_avoided() {
        // Objective undefined (infinite) on half the plane.
        let f = |x: &[f64]| {
            if x[0] <= 0.0 {
                f64::INFINITY
            } else {
                (x[0].ln()).powi(2) + x[1].powi(2)
            }
        };
        let out = minimize(f, &[2.0, 1.0], 0.4, 6000);
        assert!((out.x[0] - 1.0).abs() < 1e-5);
        assert!(out.x[1].abs() < 1e-5);
    }

    #[test]
    fn zero_dimensional_problems_return_immediately() {
        let out = nelder_mead(|_| 7.0, &[], 0.5, 100, 1e-10);
        assert!(out.converged);
        assert_eq!(out.value, 7.0);
    }
}
