//! Derivative-free minimisation with the Nelder-Mead simplex.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han (2012), which
//! behave much better than the textbook (1, 2, 0.5, 0.5) beyond a handful
//! of dimensions. Non-finite objective values are treated as +inf so an
//! objective can reject infeasible points by returning NaN or infinity.

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Stop when `f_worst - f_best <= f_tol * (1 + |f_best|)` ...
    pub f_tol: f64,
    /// ... and every vertex lies within `x_tol` of the best one (max norm).
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            f_tol: 1e-10,
            x_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimises `f` from `x0`; the initial simplex offsets coordinate `i`
    /// by `step[i]`.
    pub fn minimize<F>(&self, f: F, x0: &[f64], step: &[f64]) -> Minimum
    where
        F: Fn(&[f64]) -> f64,
    {
        assert_eq!(x0.len(), step.len(), "step must match dimension");
        let n = x0.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        if n == 0 {
            let value = eval(x0);
            return Minimum {
                x: Vec::new(),
                value,
                iterations: 0,
                evaluations,
                converged: true,
            };
        }

        let nf = n as f64;
        let reflect = 1.0;
        let expand = 1.0 + 2.0 / nf;
        let contract = 0.75 - 1.0 / (2.0 * nf);
        let shrink = 1.0 - 1.0 / nf;

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += if step[i] != 0.0 { step[i] } else { 0.05 };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

        let mut iterations = 0;
        let mut converged = false;
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        while iterations < self.max_iter {
            // order best..worst; ties keep insertion order so runs are reproducible
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let (best, worst) = (values[0], values[n]);
            let spread = simplex[1..]
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if best.is_finite()
                && worst - best <= self.f_tol * (1.0 + best.abs())
                && spread <= self.x_tol
            {
                converged = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for v in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }
            for ((o, c), w) in trial.iter_mut().zip(&centroid).zip(&simplex[n]) {
                *o = c + reflect * (c - w);
            }
            let reflected = trial.clone();
            let f_r = eval(&reflected);

            if f_r < values[0] {
                for ((o, c), r) in trial.iter_mut().zip(&centroid).zip(&reflected) {
                    *o = c + expand * (r - c);
                }
                let f_e = eval(&trial);
                if f_e < f_r {
                    simplex[n] = trial.clone();
                    values[n] = f_e;
                } else {
                    simplex[n] = reflected;
                    values[n] = f_r;
                }
                continue;
            }
            if f_r < values[n - 1] {
                simplex[n] = reflected;
                values[n] = f_r;
                continue;
            }
            let (candidate, f_c) = if f_r < values[n] {
                for ((o, c), r) in trial.iter_mut().zip(&centroid).zip(&reflected) {
                    *o = c + contract * (r - c);
                }
                let f_c = eval(&trial);
                (f_c <= f_r).then(|| (trial.clone(), f_c)).unzip()
            } else {
                for ((o, c), w) in trial.iter_mut().zip(&centroid).zip(&simplex[n]) {
                    *o = c + contract * (w - c);
                }
                let f_c = eval(&trial);
                (f_c < values[n]).then(|| (trial.clone(), f_c)).unzip()
            };
            if let (Some(x), Some(v)) = (candidate, f_c) {
                simplex[n] = x;
                values[n] = v;
                continue;
            }
            let best_vertex = simplex[0].clone();
            for i in 1..=n {
                for (x, b) in simplex[i].iter_mut().zip(&best_vertex) {
                    *x = b + shrink * (*x - b);
                }
                values[i] = eval(&simplex[i]);
            }
        }

        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("simplex is nonempty");
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
            evaluations,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
        let m = NelderMead::default().minimize(f, &[0.0, 0.0], &[0.5, 0.5]);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let m = NelderMead::default().minimize(f, &[-1.2, 1.0], &[0.1, 0.1]);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn rejects_infeasible_region() {
        // minimum of x^2 subject to x >= 0.5, encoded with NaN
        let f = |x: &[f64]| if x[0] < 0.5 { f64::NAN } else { x[0] * x[0] };
        let m = NelderMead::default().minimize(f, &[2.0], &[0.3]);
        assert!(m.value.is_finite());
        assert!((m.x[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let nm = NelderMead {
            max_iter: 3,
            ..NelderMead::default()
        };
        let m = nm.minimize(f, &[5.0, 5.0, 5.0], &[1.0, 1.0, 1.0]);
        assert!(!m.converged);
        assert_eq!(m.iterations, 3);
    }
}
