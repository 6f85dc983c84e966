//! GARCH(1,1) with a linear mean equation:
//!
//! ```text
//! y_t   = mu + x_t' b + e_t
//! s2_t  = alpha0 + alpha1 * e_{t-1}^2 + beta1 * s2_{t-1}
//! ```
//!
//! Innovations are either Gaussian or Student-t parameterised so that
//! `s2_t` is the actual conditional variance (the scale is `(nu - 2) s2_t`).
//!
//! Estimation maximises the log-likelihood with a Nelder-Mead search over
//! unconstrained coordinates:
//!
//! - `alpha0 = exp(w)`
//! - `alpha1 + beta1 = CAP * logistic(p)` and `alpha1 = (alpha1 + beta1) * logistic(s)`,
//!   which keeps both non-negative and the persistence at most `CAP`
//! - `nu = 2 + exp(v)`
//!
//! The search runs from several deterministic starting points and keeps
//! the best.

mod diagnostics;
mod simulate;

pub use diagnostics::{qq_data, standardized_residuals, QqReference};
pub use simulate::simulate;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::optim::{Minimum, NelderMead};
use crate::regress::ols_fit;

/// Upper bound on `alpha1 + beta1` enforced by the parameter transform.
pub const PERSISTENCE_CAP: f64 = 0.9999;

/// Shortest series `fit` accepts.
pub const MIN_OBSERVATIONS: usize = 30;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Distribution {
    Normal,
    #[default]
    StudentT,
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(Distribution::Normal),
            "t" | "student-t" | "student_t" | "studentt" => Ok(Distribution::StudentT),
            other => Err(format!("unknown distribution `{other}` (expected normal or t)")),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Normal => "normal",
            Distribution::StudentT => "t",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EstimationMode {
    /// Mean and variance parameters maximised together.
    #[default]
    Joint,
    /// OLS for the mean equation, then the variance parameters on its residuals.
    TwoStep,
}

impl FromStr for EstimationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "joint" => Ok(EstimationMode::Joint),
            "two-step" => Ok(EstimationMode::TwoStep),
            other => Err(format!("unknown estimation mode `{other}` (expected joint or two-step)")),
        }
    }
}

impl fmt::Display for EstimationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimationMode::Joint => "joint",
            EstimationMode::TwoStep => "two-step",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub mu: f64,
    /// One per exogenous regressor, in column order.
    pub betas: Vec<f64>,
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    /// Degrees of freedom; required for Student-t innovations.
    pub nu: Option<f64>,
}

impl GarchParams {
    pub fn new(mu: f64, alpha0: f64, alpha1: f64, beta1: f64) -> Self {
        Self {
            mu,
            betas: Vec::new(),
            alpha0,
            alpha1,
            beta1,
            nu: None,
        }
    }

    pub fn with_betas(mut self, betas: Vec<f64>) -> Self {
        self.betas = betas;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn persistence(&self) -> f64 {
        self.alpha1 + self.beta1
    }

    /// `alpha0 / (1 - alpha1 - beta1)`.
    pub fn unconditional_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.persistence())
    }

    pub fn validate(&self, dist: Distribution) -> Result<()> {
        let finite = [self.mu, self.alpha0, self.alpha1, self.beta1]
            .iter()
            .chain(&self.betas)
            .chain(self.nu.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.alpha0 <= 0.0 {
            return Err(Error::InvalidParams(format!("alpha0 = {} must be > 0", self.alpha0)));
        }
        if self.alpha1 < 0.0 || self.beta1 < 0.0 {
            return Err(Error::InvalidParams("alpha1 and beta1 must be >= 0".into()));
        }
        if self.persistence() >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "alpha1 + beta1 = {} must be < 1",
                self.persistence()
            )));
        }
        if dist == Distribution::StudentT {
            match self.nu {
                Some(nu) if nu > 2.0 => {}
                Some(nu) => return Err(Error::NuOutOfRange(nu)),
                None => return Err(Error::InvalidParams("Student-t needs nu".into())),
            }
        }
        Ok(())
    }

    /// Values in the order of [`GarchParams::names`].
    pub fn to_vec(&self, dist: Distribution) -> Vec<f64> {
        let mut v = vec![self.mu];
        v.extend(&self.betas);
        v.extend([self.alpha0, self.alpha1, self.beta1]);
        if dist == Distribution::StudentT {
            v.push(self.nu.unwrap_or(f64::NAN));
        }
        v
    }

    /// `mu, beta_1.., alpha0, alpha1, beta1[, nu]`, with exogenous names
    /// substituted for the betas when given.
    pub fn names(&self, dist: Distribution, exog_names: &[String]) -> Vec<String> {
        let mut v = vec!["mu".to_string()];
        v.extend((0..self.betas.len()).map(|i| {
            exog_names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("beta_{}", i + 1))
        }));
        v.extend(["alpha0", "alpha1", "beta1"].map(String::from));
        if dist == Distribution::StudentT {
            v.push("nu".into());
        }
        v
    }
}

/// Mean-equation fit statistics carried over from the OLS step of a
/// two-step estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEquationStats {
    pub r2: f64,
    pub adj_r2: f64,
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub params: GarchParams,
    pub distribution: Distribution,
    pub mode: EstimationMode,
    /// Conditional variance per observation.
    pub variance_path: Vec<f64>,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Same order as `params.to_vec`; absent when the Hessian at the
    /// optimum is not positive definite.
    pub std_errors: Option<Vec<f64>>,
    /// Only for [`EstimationMode::TwoStep`].
    pub mean_equation: Option<MeanEquationStats>,
    pub n_obs: usize,
}

/// `s2_1 = sigma2_init`, then `s2_t = alpha0 + alpha1 e_{t-1}^2 + beta1 s2_{t-1}`.
pub fn variance_recursion(params: &GarchParams, residuals: &[f64], sigma2_init: f64) -> Result<Vec<f64>> {
    if !sigma2_init.is_finite() || sigma2_init <= 0.0 {
        return Err(Error::NonpositiveVariance(sigma2_init));
    }
    if residuals.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFiniteInput("residuals"));
    }
    let mut path = Vec::with_capacity(residuals.len());
    let mut s2 = sigma2_init;
    path.push(s2);
    for prev in &residuals[..residuals.len().saturating_sub(1)] {
        s2 = params.alpha0 + params.alpha1 * prev * prev + params.beta1 * s2;
        path.push(s2);
    }
    path.truncate(residuals.len());
    Ok(path)
}

/// Log density of the variance-`sigma2` Student-t at `eps`.
pub fn student_t_logpdf(eps: f64, sigma2: f64, nu: f64) -> Result<f64> {
    if !nu.is_finite() || nu <= 2.0 {
        return Err(Error::NuOutOfRange(nu));
    }
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::NonpositiveVariance(sigma2));
    }
    let scale = (nu - 2.0) * sigma2;
    Ok(ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (PI * scale).ln()
        - (nu + 1.0) / 2.0 * (eps * eps / scale).ln_1p())
}

pub fn normal_logpdf(eps: f64, sigma2: f64) -> f64 {
    -0.5 * (LN_2PI + sigma2.ln() + eps * eps / sigma2)
}

/// Mean-equation residuals `y_t - mu - x_t' b`.
pub fn mean_residuals(params: &GarchParams, y: &[f64], x: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_shapes(y, x)?;
    if x.ncols() != params.betas.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} exogenous columns but {} betas",
            x.ncols(),
            params.betas.len()
        )));
    }
    let mut eps: Vec<f64> = y.iter().map(|v| v - params.mu).collect();
    for (j, b) in params.betas.iter().enumerate() {
        for (e, xv) in eps.iter_mut().zip(x.column(j).iter()) {
            *e -= b * xv;
        }
    }
    Ok(eps)
}

fn check_shapes(y: &[f64], x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "y has {} rows, X has {}",
            y.len(),
            x.nrows()
        )));
    }
    if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("GARCH data"));
    }
    Ok(())
}

/// Variance of `eps` about its mean (n denominator); falls back to the
/// unconditional variance when the residuals are constant.
fn initial_variance(eps: &[f64], params: &GarchParams) -> f64 {
    let n = eps.len() as f64;
    let mean = eps.iter().sum::<f64>() / n;
    let var = eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    if var > 0.0 && var.is_finite() {
        var
    } else {
        params.unconditional_variance()
    }
}

/// Log-likelihood of already-computed residuals. Returns NaN rather than
/// an error so the optimiser can treat bad regions as infeasible.
fn residual_loglik(
    params: &GarchParams,
    eps: &[f64],
    dist: Distribution,
    mut path: Option<&mut Vec<f64>>,
) -> f64 {
    let mut s2 = initial_variance(eps, params);
    let (a0, a1, b1) = (params.alpha0, params.alpha1, params.beta1);
    let mut ll = 0.0;
    match dist {
        Distribution::Normal => {
            let mut prev = 0.0;
            for (t, &e) in eps.iter().enumerate() {
                if t > 0 {
                    s2 = a0 + a1 * prev * prev + b1 * s2;
                }
                ll -= s2.ln() + e * e / s2;
                prev = e;
                if let Some(p) = path.as_deref_mut() {
                    p.push(s2);
                }
            }
            ll = 0.5 * (ll - eps.len() as f64 * LN_2PI);
        }
        Distribution::StudentT => {
            let nu = params.nu.unwrap_or(f64::NAN);
            let nu_m2 = nu - 2.0;
            let half_nu1 = 0.5 * (nu + 1.0);
            let mut prev = 0.0;
            for (t, &e) in eps.iter().enumerate() {
                if t > 0 {
                    s2 = a0 + a1 * prev * prev + b1 * s2;
                }
                ll -= 0.5 * s2.ln() + half_nu1 * (e * e / (nu_m2 * s2)).ln_1p();
                prev = e;
                if let Some(p) = path.as_deref_mut() {
                    p.push(s2);
                }
            }
            let c = ln_gamma(half_nu1) - ln_gamma(0.5 * nu) - 0.5 * (PI * nu_m2).ln();
            ll += eps.len() as f64 * c;
        }
    }
    ll
}

pub fn log_likelihood(params: &GarchParams, y: &[f64], x: &DMatrix<f64>, dist: Distribution) -> Result<f64> {
    params.validate(dist)?;
    let eps = mean_residuals(params, y, x)?;
    if eps.is_empty() {
        return Err(Error::EmptyInput("no observations"));
    }
    let ll = residual_loglik(params, &eps, dist, None);
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::NonFiniteLikelihood)
    }
}

/// Conditional variance path implied by `params` on `(y, x)`.
pub fn conditional_variance(params: &GarchParams, y: &[f64], x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eps = mean_residuals(params, y, x)?;
    if eps.is_empty() {
        return Err(Error::EmptyInput("no observations"));
    }
    variance_recursion(params, &eps, initial_variance(&eps, params))
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Number of starting points; the first is the moment-based guess.
    pub starts: usize,
    /// Seeds the perturbations of the later starting points.
    pub seed: u64,
    /// Extra simplex restarts from each run's optimum.
    pub restarts: usize,
    pub optimizer: NelderMead,
    pub std_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 5,
            seed: 0,
            restarts: 2,
            optimizer: NelderMead {
                max_iter: 4000,
                f_tol: 1e-10,
                x_tol: 1e-6,
            },
            std_errors: true,
        }
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates of the variance equation.
#[derive(Debug, Clone, Copy)]
struct VarianceCoords {
    student: bool,
}

impl VarianceCoords {
    fn dim(&self) -> usize {
        if self.student {
            4
        } else {
            3
        }
    }

    fn encode(&self, alpha0: f64, alpha1: f64, beta1: f64, nu: f64) -> Vec<f64> {
        let p = alpha1 + beta1;
        let mut v = vec![alpha0.ln(), logit(p / PERSISTENCE_CAP), logit(alpha1 / p)];
        if self.student {
            v.push((nu - 2.0).ln());
        }
        v
    }

    /// (alpha0, alpha1, beta1, nu)
    fn decode(&self, theta: &[f64]) -> (f64, f64, f64, Option<f64>) {
        let p = PERSISTENCE_CAP * logistic(theta[1]);
        let s = logistic(theta[2]);
        let nu = self.student.then(|| 2.0 + theta[3].exp());
        (theta[0].exp(), p * s, p * (1.0 - s), nu)
    }

    /// Jacobian of the decoded (alpha0, alpha1, beta1[, nu]) w.r.t. theta.
    fn jacobian(&self, theta: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        let mut j = DMatrix::zeros(d, d);
        let sp = logistic(theta[1]);
        let p = PERSISTENCE_CAP * sp;
        let dp = PERSISTENCE_CAP * sp * (1.0 - sp);
        let s = logistic(theta[2]);
        let ds = s * (1.0 - s);
        j[(0, 0)] = theta[0].exp();
        j[(1, 1)] = s * dp;
        j[(1, 2)] = p * ds;
        j[(2, 1)] = (1.0 - s) * dp;
        j[(2, 2)] = -p * ds;
        if self.student {
            j[(3, 3)] = theta[3].exp();
        }
        j
    }

    fn default_step(&self) -> Vec<f64> {
        let mut v = vec![0.5, 0.5, 0.5];
        if self.student {
            v.push(0.3);
        }
        v
    }

    fn perturbation_scale(&self) -> Vec<f64> {
        let mut v = vec![0.5, 1.0, 0.7];
        if self.student {
            v.push(0.7);
        }
        v
    }
}

fn params_from(mu: f64, betas: &[f64], var: (f64, f64, f64, Option<f64>)) -> GarchParams {
    GarchParams {
        mu,
        betas: betas.to_vec(),
        alpha0: var.0,
        alpha1: var.1,
        beta1: var.2,
        nu: var.3,
    }
}

/// Maximum-likelihood GARCH(1,1) fit. `x` holds the exogenous regressors
/// without an intercept column (it may have zero columns).
pub fn fit(
    y: &[f64],
    x: &DMatrix<f64>,
    dist: Distribution,
    mode: EstimationMode,
    options: &FitOptions,
) -> Result<GarchFit> {
    check_shapes(y, x)?;
    if y.len() < MIN_OBSERVATIONS {
        return Err(Error::TooFewPoints {
            required: MIN_OBSERVATIONS,
            got: y.len(),
        });
    }
    let n = y.len();
    let k = x.ncols();
    let columns: Vec<Vec<f64>> = (0..k).map(|j| x.column(j).iter().copied().collect()).collect();
    let design = DMatrix::from_fn(n, k + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let ols = ols_fit(y, &design)?;
    let resid_var = ols.rss / n as f64;

    let coords = VarianceCoords {
        student: dist == Distribution::StudentT,
    };
    let var_start = coords.encode(resid_var * 0.1, 0.05, 0.85, 8.0);
    let options = FitOptions {
        starts: options.starts.max(1),
        ..options.clone()
    };

    match mode {
        EstimationMode::Joint => {
            let mean_step: Vec<f64> = ols
                .std_errors
                .iter()
                .zip(&ols.coefficients)
                .map(|(&se, &b)| {
                    if se.is_finite() && se > 0.0 {
                        se
                    } else {
                        0.1 * b.abs() + 1e-4
                    }
                })
                .collect();
            let mut x0 = ols.coefficients.clone();
            x0.extend(&var_start);
            let mut step = mean_step.clone();
            step.extend(coords.default_step());
            let mut scale = mean_step;
            scale.extend(coords.perturbation_scale());

            let objective = |theta: &[f64]| -> f64 {
                let p = params_from(theta[0], &theta[1..=k], coords.decode(&theta[k + 1..]));
                let mut eps: Vec<f64> = y.iter().map(|v| v - p.mu).collect();
                for (b, col) in p.betas.iter().zip(&columns) {
                    for (e, xv) in eps.iter_mut().zip(col) {
                        *e -= b * xv;
                    }
                }
                -residual_loglik(&p, &eps, dist, None)
            };
            let (best, iterations) = multi_start(&objective, &x0, &step, &scale, &options);
            let theta = &best.x;
            let params = params_from(theta[0], &theta[1..=k], coords.decode(&theta[k + 1..]));
            let std_errors = if options.std_errors {
                let h = numerical_hessian(&objective, theta, &step);
                let mut jac = DMatrix::identity(theta.len(), theta.len());
                jac.view_mut((k + 1, k + 1), (coords.dim(), coords.dim()))
                    .copy_from(&coords.jacobian(&theta[k + 1..]));
                covariance_std_errors(&h, &jac)
            } else {
                None
            };
            finish(params, y, x, dist, mode, best.converged, iterations, std_errors, None)
        }
        EstimationMode::TwoStep => {
            let mu = ols.coefficients[0];
            let betas = ols.coefficients[1..].to_vec();
            let eps = ols.residuals.clone();
            let objective = |theta: &[f64]| -> f64 {
                let p = params_from(mu, &betas, coords.decode(theta));
                -residual_loglik(&p, &eps, dist, None)
            };
            let step = coords.default_step();
            let (best, iterations) =
                multi_start(&objective, &var_start, &step, &coords.perturbation_scale(), &options);
            let params = params_from(mu, &betas, coords.decode(&best.x));
            let std_errors = if options.std_errors {
                let h = numerical_hessian(&objective, &best.x, &step);
                covariance_std_errors(&h, &coords.jacobian(&best.x)).map(|var_se| {
                    let mut se = ols.std_errors.clone();
                    se.extend(var_se);
                    se
                })
            } else {
                None
            };
            let stats = MeanEquationStats {
                r2: ols.r2,
                adj_r2: ols.adj_r2,
                f_statistic: ols.f_statistic,
                f_p_value: ols.f_p_value,
            };
            finish(params, y, x, dist, mode, best.converged, iterations, std_errors, Some(stats))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: GarchParams,
    y: &[f64],
    x: &DMatrix<f64>,
    dist: Distribution,
    mode: EstimationMode,
    converged: bool,
    iterations: usize,
    std_errors: Option<Vec<f64>>,
    mean_equation: Option<MeanEquationStats>,
) -> Result<GarchFit> {
    let eps = mean_residuals(&params, y, x)?;
    let mut path = Vec::with_capacity(eps.len());
    let log_likelihood = residual_loglik(&params, &eps, dist, Some(&mut path));
    if !log_likelihood.is_finite() {
        return Err(Error::NonFiniteLikelihood);
    }
    Ok(GarchFit {
        params,
        distribution: dist,
        mode,
        variance_path: path,
        log_likelihood,
        converged,
        iterations,
        std_errors,
        mean_equation,
        n_obs: y.len(),
    })
}

/// Runs the simplex from `x0` and from `starts - 1` seeded perturbations of
/// it, each followed by `restarts` re-launches from its own optimum.
/// Returns the best run and its total iteration count.
fn multi_start<F>(f: &F, x0: &[f64], step: &[f64], scale: &[f64], options: &FitOptions) -> (Minimum, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let mut best: Option<(Minimum, usize)> = None;
    for start in 0..options.starts {
        let init: Vec<f64> = if start == 0 {
            x0.to_vec()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(start as u64));
            x0.iter()
                .zip(scale)
                .map(|(v, s)| v + s * rng.random_range(-1.0..1.0))
                .collect()
        };
        let mut run = options.optimizer.minimize(f, &init, step);
        let mut iterations = run.iterations;
        for _ in 0..options.restarts {
            let again = options.optimizer.minimize(f, &run.x, step);
            iterations += again.iterations;
            let improved = again.value < run.value - 1e-9 * (1.0 + run.value.abs());
            let keep = again.value <= run.value;
            if keep {
                run = again;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| run.value < b.value) {
            best = Some((run, iterations));
        }
    }
    best.expect("at least one start")
}

/// Central-difference Hessian; step for coordinate `i` is
/// `1e-4 * max(|x_i|, typical_i)`.
fn numerical_hessian<F>(f: &F, x: &[f64], typical: &[f64]) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let d = x.len();
    let h: Vec<f64> = x
        .iter()
        .zip(typical)
        .map(|(v, t)| 1e-4 * v.abs().max(t.abs()).max(1e-8))
        .collect();
    let f0 = f(x);
    let mut at = x.to_vec();
    let mut eval = |deltas: &[(usize, f64)]| {
        for &(i, dv) in deltas {
            at[i] += dv;
        }
        let v = f(&at);
        for &(i, dv) in deltas {
            at[i] -= dv;
        }
        v
    };
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        let fp = eval(&[(i, h[i])]);
        let fm = eval(&[(i, -h[i])]);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = eval(&[(i, h[i]), (j, h[j])]);
            let fpm = eval(&[(i, h[i]), (j, -h[j])]);
            let fmp = eval(&[(i, -h[i]), (j, h[j])]);
            let fmm = eval(&[(i, -h[i]), (j, -h[j])]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Standard errors of `g(theta)` from the Hessian of the negative
/// log-likelihood in theta, via the delta method with Jacobian `jac`.
fn covariance_std_errors(hess: &DMatrix<f64>, jac: &DMatrix<f64>) -> Option<Vec<f64>> {
    if hess.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let chol = hess.clone().cholesky()?;
    let cov_theta = chol.inverse();
    let cov = jac * cov_theta * jac.transpose();
    let se: Vec<f64> = cov.diagonal().iter().map(|v| v.sqrt()).collect();
    se.iter().all(|v| v.is_finite() && *v > 0.0).then_some(se)
}

/// Two-sided normal p-values for `coef / se`.
pub fn wald_p_values(coefficients: &[f64], std_errors: &[f64]) -> Vec<f64> {
    use statrs::distribution::{ContinuousCDF, Normal};
    let normal = Normal::standard();
    coefficients
        .iter()
        .zip(std_errors)
        .map(|(b, se)| (2.0 * normal.sf((b / se).abs())).min(1.0))
        .collect()
}
