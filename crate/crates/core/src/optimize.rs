//! Box-constrained Nelder-Mead.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Converged once every vertex is within `x_tol` of the best one in
    /// each coordinate...
    pub x_tol: f64,
    /// ...and the spread of values is below `f_tol * (1 + |best|)`.
    pub f_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            x_tol: 1e-7,
            f_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

impl NelderMead {
    /// Minimizes `f` starting from `x0` with initial simplex edge `step`.
    /// Trial points are clamped into `[lower, upper]`.
    pub fn minimize<F>(
        &self,
        f: F,
        x0: &[f64],
        step: &[f64],
        lower: &[f64],
        upper: &[f64],
    ) -> Result<Minimum>
    where
        F: Fn(&[f64]) -> f64,
    {
        let dim = x0.len();
        let clamp = |x: &mut Vec<f64>| {
            for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
                *xi = xi.clamp(*lo, *hi);
            }
        };
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let mut start = x0.to_vec();
        clamp(&mut start);
        simplex.push((start.clone(), eval(&start)));
        for i in 0..dim {
            let mut v = start.clone();
            v[i] += step[i];
            if v[i] > upper[i] {
                v[i] = start[i] - step[i];
            }
            clamp(&mut v);
            let fv = eval(&v);
            simplex.push((v, fv));
        }

        let mut spread = f64::INFINITY;
        for iter in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[dim].1;
            spread = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread < self.x_tol && (worst - best).abs() <= self.f_tol * (1.0 + best.abs()) {
                return Ok(Minimum {
                    x: simplex[0].0.clone(),
                    value: best,
                    iterations: iter,
                });
            }

            let centroid: Vec<f64> = (0..dim)
                .map(|j| simplex[..dim].iter().map(|(v, _)| v[j]).sum::<f64>() / dim as f64)
                .collect();
            let along = |t: f64| {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[dim].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect();
                clamp(&mut p);
                p
            };

            let xr = along(-1.0);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst {
                    let xc = along(-0.5);
                    let fc = eval(&xc);
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = eval(&xc);
                    (xc, fc)
                };
                if fc < fr.min(worst) {
                    simplex[dim] = (xc, fc);
                } else {
                    let best_x = simplex[0].0.clone();
                    for (v, fv) in simplex.iter_mut().skip(1) {
                        for (vi, bi) in v.iter_mut().zip(&best_x) {
                            *vi = bi + 0.5 * (*vi - bi);
                        }
                        *fv = eval(v);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        Err(Error::NoConvergence {
            iterations: self.max_iter,
            spread,
            best: simplex[0].1,
        })
    }
}
