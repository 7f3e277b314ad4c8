//! Classical minimisers used by the variational loop.
//!
//! Both take an [`Objective`], which may be noisy: shot-sampled energies
//! return a different value on every call.

use crate::error::{Error, Result};

/// Function being minimised. `end_iteration` is called once per optimiser
/// iteration, which lets a noisy backend advance its trial clock.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> f64;

    fn end_iteration(&mut self) {}
}

impl<F> Objective for F
where
    F: FnMut(&[f64]) -> f64,
{
    fn evaluate(&mut self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Stopping controls shared by both methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iter: usize,
    /// Energy change below which the search is considered converged.
    pub tol: f64,
    /// Central-difference step (quasi-Newton only).
    pub fd_step: f64,
}

impl StopRule {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidOptimizer(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidOptimizer(format!(
                "finite-difference step must be positive, got {}",
                self.fd_step
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidOptimizer("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// False when the iteration cap was hit; `x`, `f` are then best-so-far.
    pub converged: bool,
}

struct Counted<'a, O: Objective + ?Sized> {
    inner: &'a mut O,
    evaluations: usize,
}

impl<O: Objective + ?Sized> Counted<'_, O> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let f = self.inner.evaluate(x);
        if f.is_nan() {
            f64::INFINITY
        } else {
            f
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn central_gradient<O: Objective + ?Sized>(obj: &mut Counted<'_, O>, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = obj.eval(&probe);
            probe[i] = x[i] - h;
            let down = obj.eval(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// BFGS with central finite-difference gradients and a backtracking
/// Armijo line search.
pub fn optimize_quasinewton<O>(obj: &mut O, x0: &[f64], rule: &StopRule) -> Result<Minimum>
where
    O: Objective + ?Sized,
{
    rule.validate()?;
    let n = x0.len();
    let mut obj = Counted {
        inner: obj,
        evaluations: 0,
    };
    let gtol = rule.tol.sqrt();
    let mut x = x0.to_vec();
    let mut f = obj.eval(&x);
    let mut g = central_gradient(&mut obj, &x, rule.fd_step);
    let mut hinv = identity(n);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < rule.max_iter {
        if max_abs(&g) < gtol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut d = matvec_neg(&hinv, &g);
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hinv = identity(n);
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let ft = obj.eval(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        obj.inner.end_iteration();

        let Some((x_new, f_new)) = accepted else {
            if is_identity(&hinv) {
                // No descent along -g: numerical minimum for this step size.
                converged = max_abs(&g) < gtol;
                break;
            }
            hinv = identity(n);
            continue;
        };

        let g_new = central_gradient(&mut obj, &x_new, rule.fd_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 {
            bfgs_update(&mut hinv, &s, &y, sy);
        }
        let delta = (f - f_new).abs();
        x = x_new;
        f = f_new;
        g = g_new;
        if delta < rule.tol {
            converged = true;
            break;
        }
    }
    Ok(Minimum {
        x,
        f,
        evaluations: obj.evaluations,
        iterations,
        converged,
    })
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn is_identity(m: &[Vec<f64>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, &v)| v == if i == j { 1.0 } else { 0.0 })
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn matvec_neg(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| -dot(row, v)).collect()
}

/// `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`, `ρ = 1 / yᵀs`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = h.iter().map(|row| dot(row, y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Nelder–Mead simplex search with dimension-adaptive coefficients.
/// Never evaluates gradients.
pub fn optimize_direct<O>(obj: &mut O, x0: &[f64], rule: &StopRule) -> Result<Minimum>
where
    O: Objective + ?Sized,
{
    rule.validate()?;
    let n = x0.len();
    let mut obj = Counted {
        inner: obj,
        evaluations: 0,
    };
    if n == 0 {
        let f = obj.eval(x0);
        return Ok(Minimum {
            x: vec![],
            f,
            evaluations: 1,
            iterations: 0,
            converged: true,
        });
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if n > 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let initial_step = 0.5;

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = obj.eval(x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += initial_step;
        let fv = obj.eval(&v);
        simplex.push((v, fv));
    }

    let mut converged = false;
    let mut iterations = 0;
    while iterations < rule.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| max_abs(&sub(v, &simplex[0].0)))
            .fold(0.0, f64::max);
        if spread < rule.tol && size < rule.tol.sqrt() {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / nf)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = obj.eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(alpha * gamma);
            let fe = obj.eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(alpha * rho);
                let fc = obj.eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = obj.eval(&xc);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    let fv = obj.eval(&v);
                    *vertex = (v, fv);
                }
            }
        }
        obj.inner.end_iteration();
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        f,
        evaluations: obj.evaluations,
        iterations,
        converged,
    })
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
