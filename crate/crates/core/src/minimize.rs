//! Unconstrained smooth minimization over `R^n` by BFGS with a backtracking
//! Armijo line search.
//!
//! Knows nothing about the objective beyond values and gradients; the
//! variational parallel-sum oracle relies on that.

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Absolute gradient-norm target.
    pub grad_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f`, where `f(x, grad)` returns the value and writes the
/// gradient into `grad`.
pub fn bfgs<F>(mut f: F, x0: Vec<f64>, opts: MinimizeOptions) -> Minimum
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut value = f(&x, &mut g);
    if n == 0 {
        return Minimum {
            x,
            value,
            gradient_norm: 0.0,
            iterations: 0,
            converged: true,
        };
    }

    // Inverse Hessian approximation, row-major.
    let mut h = identity(n);
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut stalled = 0;
    let mut flat_steps = 0;

    for iter in 0..opts.max_iter {
        let gnorm = norm(&g);
        if gnorm <= opts.grad_tol {
            return Minimum {
                x,
                value,
                gradient_norm: gnorm,
                iterations: iter,
                converged: true,
            };
        }

        for i in 0..n {
            dir[i] = -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>();
        }
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            // Not a descent direction; restart from steepest descent.
            h = identity(n);
            for i in 0..n {
                dir[i] = -g[i];
            }
            slope = -gnorm * gnorm;
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut value_new = value;
        for _ in 0..80 {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            value_new = f(&x_new, &mut g_new);
            if value_new.is_finite() && value_new <= value + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No measurable decrease: the objective is flat at rounding level.
            stalled += 1;
            h = identity(n);
            if stalled > 2 {
                return Minimum {
                    x,
                    value,
                    gradient_norm: gnorm,
                    iterations: iter,
                    converged: false,
                };
            }
            continue;
        }
        stalled = 0;
        // Accepted steps that no longer move the value: rounding floor.
        if value - value_new <= 4.0 * f64::EPSILON * value.abs().max(f64::MIN_POSITIVE) {
            flat_steps += 1;
            if flat_steps >= 10 {
                return Minimum {
                    x: x_new,
                    value: value_new,
                    gradient_norm: norm(&g_new),
                    iterations: iter + 1,
                    converged: norm(&g_new) <= opts.grad_tol,
                };
            }
        } else {
            flat_steps = 0;
        }

        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if iter == 0 {
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            update_inverse_hessian(&mut h, &s, &y, sy);
        }

        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        value = value_new;
    }

    let gnorm = norm(&g);
    Minimum {
        x,
        value,
        gradient_norm: gnorm,
        iterations: opts.max_iter,
        converged: gnorm <= opts.grad_tol,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

// H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
fn update_inverse_hessian(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
