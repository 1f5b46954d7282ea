//! Unconstrained minimizers over `R^d` used by the likelihood fit.
//!
//! Objectives report infeasible points as `f64::INFINITY`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Objective decrease below which a step counts as stalled.
    pub f_tol: f64,
    /// Max-norm step size below which a step counts as stalled.
    pub x_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn central_gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], out: &mut [f64]) -> bool {
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-5 * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return false;
        }
        out[i] = (up - down) / (2.0 * h);
    }
    true
}

/// BFGS on the inverse Hessian with central-difference gradients and an
/// Armijo backtracking line search.
///
/// Converges when a step improves the objective by less than `f_tol` and
/// moves less than `x_tol`, or when no descent step can be found and the
/// gradient is at the numerical noise floor.
pub fn bfgs<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], tol: Tolerances) -> Minimum {
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = vec![0.0; d];
    if !fx.is_finite() || !central_gradient(&mut f, &x, &mut g) {
        return Minimum { x, value: fx, iterations: 0, converged: false };
    }
    let g_tol = 1e-5 * fx.abs().max(1.0);
    let mut h_inv = identity(d);
    let mut scaled = false;
    let mut dir = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut g_new = vec![0.0; d];

    for iter in 1..=tol.max_iter {
        for i in 0..d {
            dir[i] = -(0..d).map(|j| h_inv[i * d + j] * g[j]).sum::<f64>();
        }
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            h_inv = identity(d);
            for i in 0..d {
                dir[i] = -g[i];
            }
            slope = -dot(&g, &g);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..d {
                trial[i] = x[i] + t * dir[i];
            }
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
                accepted = Some(ft);
                break;
            }
            t *= 0.5;
        }
        let Some(f_new) = accepted else {
            let converged = max_abs(&g) <= g_tol;
            return Minimum { x, value: fx, iterations: iter, converged };
        };

        if !central_gradient(&mut f, &trial, &mut g_new) {
            return Minimum { x, value: fx, iterations: iter, converged: false };
        }
        let s: Vec<f64> = (0..d).map(|i| trial[i] - x[i]).collect();
        let y: Vec<f64> = (0..d).map(|i| g_new[i] - g[i]).collect();
        let improvement = fx - f_new;
        x.copy_from_slice(&trial);
        fx = f_new;
        g.copy_from_slice(&g_new);

        if improvement < tol.f_tol && (max_abs(&s) < tol.x_tol || max_abs(&g) <= g_tol) {
            return Minimum { x, value: fx, iterations: iter, converged: true };
        }

        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                for v in &mut h_inv {
                    *v *= gamma;
                }
                scaled = true;
            }
            bfgs_update(&mut h_inv, &s, &y, sy, d);
        }
    }
    Minimum { x, value: fx, iterations: tol.max_iter, converged: false }
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

// H <- (I - rho s y') H (I - rho y s') + rho s s'
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, d: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..d).map(|i| (0..d).map(|j| h[i * d + j] * y[j]).sum()).collect();
    let yhy = dot(y, &hy);
    for i in 0..d {
        for j in 0..d {
            h[i * d + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
    }
}

/// Nelder-Mead simplex search, the fallback when quasi-Newton stalls away
/// from a stationary point.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    tol: Tolerances,
) -> Minimum {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for iter in 1..=tol.max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread < tol.f_tol && size < tol.x_tol {
            return Minimum {
                x: simplex[0].clone(),
                value: values[0],
                iterations: iter,
                converged: true,
            };
        }

        let centroid: Vec<f64> =
            (0..d).map(|j| simplex[..d].iter().map(|v| v[j]).sum::<f64>() / d as f64).collect();
        let along = |coef: f64| -> Vec<f64> {
            (0..d).map(|j| centroid[j] + coef * (simplex[d][j] - centroid[j])).collect()
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[d] {
            let c = along(-0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(0.5);
            let fc = f(&c);
            (c, fc)
        };
        if fc < values[d].min(fr) {
            simplex[d] = contracted;
            values[d] = fc;
            continue;
        }
        for i in 1..=d {
            for j in 0..d {
                simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
            }
            values[i] = f(&simplex[i]);
        }
    }
    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), value: values[best], iterations: tol.max_iter, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    const TOL: Tolerances = Tolerances { f_tol: 1e-12, x_tol: 1e-9, max_iter: 2000 };

    #[test]
    fn bfgs_rosenbrock() {
        let m = bfgs(rosenbrock, &[-1.2, 1.0], TOL);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], 0.5, TOL);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn infeasible_start_does_not_converge() {
        let m = bfgs(|_| f64::INFINITY, &[0.0], TOL);
        assert!(!m.converged);
    }
}
