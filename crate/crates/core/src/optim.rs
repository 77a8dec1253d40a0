//! Small derivative-free optimisation helpers used by the likelihood fits.

/// Result of a Nelder–Mead minimisation.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_iter: 20_000, f_tol: 1e-12, x_tol: 1e-10 }
    }
}

impl NelderMead {
    /// Minimises `f` starting from `x0` with initial simplex offsets `step`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64], step: &[f64]) -> Minimum {
        let n = x0.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut p = x0.to_vec();
            p[i] += if step[i] != 0.0 { step[i] } else { 1e-3 };
            simplex.push(p);
        }
        let mut vals: Vec<f64> = simplex.iter().map(|p| nan_to_inf(f(p))).collect();
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let mut iterations = 0;
        let mut converged = false;
        // Restart once from the best point to avoid premature collapse.
        let mut restarts = 0;
        while iterations < self.max_iter {
            iterations += 1;
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let spread = (vals[n] - vals[0]).abs();
            let diam =
                simplex[1..].iter().map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
            if spread <= self.f_tol * (1.0 + vals[0].abs()) && diam <= self.x_tol * (1.0 + norm_inf(&simplex[0])) {
                if restarts >= 1 {
                    converged = true;
                    break;
                }
                restarts += 1;
                let best = simplex[0].clone();
                for i in 0..n {
                    let mut p = best.clone();
                    p[i] += 0.05 * step[i].abs().max(1e-6);
                    simplex[i + 1] = p;
                    vals[i + 1] = nan_to_inf(f(&simplex[i + 1]));
                }
                continue;
            }

            let mut centroid = vec![0.0; n];
            for p in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(p) {
                    *c += v / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect() };
            let xr = along(-alpha);
            let fr = nan_to_inf(f(&xr));
            if fr < vals[0] {
                let xe = along(-gamma);
                let fe = nan_to_inf(f(&xe));
                if fe < fr {
                    simplex[n] = xe;
                    vals[n] = fe;
                } else {
                    simplex[n] = xr;
                    vals[n] = fr;
                }
            } else if fr < vals[n - 1] {
                simplex[n] = xr;
                vals[n] = fr;
            } else {
                let (xc, fc) = if fr < vals[n] {
                    let x = along(-rho);
                    let v = nan_to_inf(f(&x));
                    (x, v)
                } else {
                    let x = along(rho);
                    let v = nan_to_inf(f(&x));
                    (x, v)
                };
                if fc < vals[n].min(fr) {
                    simplex[n] = xc;
                    vals[n] = fc;
                } else {
                    let best = simplex[0].clone();
                    for i in 1..=n {
                        simplex[i] = best.iter().zip(&simplex[i]).map(|(b, p)| b + sigma * (p - b)).collect();
                        vals[i] = nan_to_inf(f(&simplex[i]));
                    }
                }
            }
        }
        let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        Minimum { x: simplex[best].clone(), value: vals[best], iterations, converged }
    }
}

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Central-difference Hessian of `f` at `x` with per-coordinate steps `h`.
pub fn numerical_hessian<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let f0 = f(x);
    let mut hess = vec![vec![0.0; n]; n];
    let mut p = x.to_vec();
    for i in 0..n {
        p[i] = x[i] + h[i];
        let fp = f(&p);
        p[i] = x[i] - h[i];
        let fm = f(&p);
        p[i] = x[i];
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| {
                p[i] = x[i] + si * h[i];
                p[j] = x[j] + sj * h[j];
                let v = f(&p);
                p[i] = x[i];
                p[j] = x[j];
                v
            };
            let v = (eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0)) / (4.0 * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::default().minimize(rosen, &[-1.2, 1.0], &[0.5, 0.5]);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn hessian_of_quadratic() {
        let f = |x: &[f64]| 3.0 * x[0] * x[0] + 2.0 * x[0] * x[1] + 5.0 * x[1] * x[1];
        let h = numerical_hessian(f, &[0.3, -0.2], &[1e-3, 1e-3]);
        assert!((h[0][0] - 6.0).abs() < 1e-6);
        assert!((h[0][1] - 2.0).abs() < 1e-6);
        assert!((h[1][1] - 10.0).abs() < 1e-6);
    }
}
