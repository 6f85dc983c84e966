//! Ordinary least squares and the residual diagnostics run on the mean
//! equation: Breusch-Pagan (heteroscedasticity), Durbin-Watson
//! (first-order autocorrelation) and variance inflation factors.
//!
//! Coefficients come from a Householder QR factorisation of the design
//! rather than from inverting the Gram matrix.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

use crate::error::{Error, Result};

/// Relative tolerance on |R_jj| / ||x_j|| below which a column is treated
/// as linearly dependent on the preceding ones.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    /// Intercept first, then one per regressor column.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    /// `None` for an intercept-only model.
    pub f_statistic: Option<f64>,
    pub f_p_value: Option<f64>,
    pub rss: f64,
    pub n_obs: usize,
    /// Regressors excluding the intercept.
    pub n_regressors: usize,
}

impl OlsFit {
    pub fn df_resid(&self) -> usize {
        self.n_obs - self.n_regressors - 1
    }
}

/// Stacks `columns` after a leading column of ones.
pub fn design_with_intercept(columns: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::DimensionMismatch("design columns differ in length".into()));
    }
    Ok(DMatrix::from_fn(n, columns.len() + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            columns[j - 1][i]
        }
    }))
}

/// Stacks `columns` as-is.
pub fn design_matrix(columns: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::DimensionMismatch("design columns differ in length".into()));
    }
    Ok(DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]))
}

/// Fits `y = X b + e`; `x` must carry the intercept as its first column.
pub fn ols_fit(y: &[f64], x: &DMatrix<f64>) -> Result<OlsFit> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {} rows, X has {n}",
            y.len()
        )));
    }
    if p == 0 || x.column(0).iter().any(|&v| v != 1.0) {
        return Err(Error::InvalidDesign("first column must be the intercept (all ones)"));
    }
    if n <= p {
        return Err(Error::InsufficientObservations { required: p, got: n });
    }
    if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("regression data"));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..p {
        let col_norm = x.column(j).norm();
        if r[(j, j)].abs() <= RANK_TOL * col_norm.max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient);
        }
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;

    let fitted = x * &beta;
    let resid = &yv - &fitted;
    let rss = resid.norm_squared();
    let mean_y = yv.mean();
    let tss: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    if tss == 0.0 {
        return Err(Error::ConstantResponse);
    }

    let k = p - 1;
    let df = (n - p) as f64;
    let sigma2 = rss / df;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::RankDeficient)?;
    let std_errors: Vec<f64> = (0..p)
        .map(|j| (sigma2 * r_inv.row(j).norm_squared()).sqrt())
        .collect();

    let t_dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let t_values: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| b / se)
        .collect();
    let p_values = t_values
        .iter()
        .map(|&t| two_sided_p(t, |z| t_dist.sf(z)))
        .collect();

    let r2 = 1.0 - rss / tss;
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df;
    let (f_statistic, f_p_value) = if k == 0 {
        (None, None)
    } else {
        let f = (r2 / k as f64) / ((1.0 - r2) / df);
        let p = if f.is_finite() {
            FisherSnedecor::new(k as f64, df).expect("positive dof").sf(f)
        } else {
            0.0
        };
        (Some(f), Some(p))
    };

    Ok(OlsFit {
        coefficients,
        std_errors,
        t_values,
        p_values,
        residuals: resid.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
        r2,
        adj_r2,
        f_statistic,
        f_p_value,
        rss,
        n_obs: n,
        n_regressors: k,
    })
}

fn two_sided_p(stat: f64, sf: impl Fn(f64) -> f64) -> f64 {
    if stat.is_nan() {
        f64::NAN
    } else if stat.is_infinite() {
        0.0
    } else {
        (2.0 * sf(stat.abs())).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestName {
    BreuschPagan,
    DurbinWatson,
}

impl fmt::Display for TestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestName::BreuschPagan => "breusch_pagan",
            TestName::DurbinWatson => "durbin_watson",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: TestName,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub degrees_of_freedom: Option<usize>,
    /// Set when the p-value comes from an asymptotic approximation.
    pub approximate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BpVariant {
    /// Koenker's studentised statistic, n·R² of e² on X.
    #[default]
    Koenker,
    /// Original form: half the explained sum of squares of e²/σ̂² on X.
    Classical,
}

pub fn breusch_pagan(fit: &OlsFit, x: &DMatrix<f64>, variant: BpVariant) -> Result<TestResult> {
    let n = fit.residuals.len();
    if x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "fit has {n} residuals, X has {} rows",
            x.nrows()
        )));
    }
    let e2: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();
    let statistic = match variant {
        BpVariant::Koenker => n as f64 * ols_fit(&e2, x)?.r2,
        BpVariant::Classical => {
            let sigma2 = fit.rss / n as f64;
            let g: Vec<f64> = e2.iter().map(|v| v / sigma2).collect();
            let aux = ols_fit(&g, x)?;
            let mean = g.iter().sum::<f64>() / n as f64;
            let tss: f64 = g.iter().map(|v| (v - mean).powi(2)).sum();
            (tss - aux.rss) / 2.0
        }
    };
    let df = x.ncols() - 1;
    let p_value = if df > 0 {
        Some(ChiSquared::new(df as f64).expect("df > 0").sf(statistic))
    } else {
        None
    };
    Ok(TestResult {
        name: TestName::BreuschPagan,
        statistic,
        p_value,
        degrees_of_freedom: Some(df),
        approximate: false,
    })
}

/// `Σ(e_t - e_{t-1})² / Σ e_t²`. The p-value is two-sided from the
/// large-sample approximation DW ~ N(2, 4/n) and is flagged approximate.
pub fn durbin_watson(residuals: &[f64]) -> Result<TestResult> {
    if residuals.len() < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            got: residuals.len(),
        });
    }
    if residuals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("residuals"));
    }
    let denom: f64 = residuals.iter().map(|e| e * e).sum();
    if denom == 0.0 {
        return Err(Error::AllZeroResiduals);
    }
    let num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    let statistic = num / denom;
    let n = residuals.len() as f64;
    let z = (statistic - 2.0) / (4.0 / n).sqrt();
    let normal = Normal::standard();
    Ok(TestResult {
        name: TestName::DurbinWatson,
        statistic,
        p_value: Some(two_sided_p(z, |v| normal.sf(v))),
        degrees_of_freedom: None,
        approximate: true,
    })
}

/// Variance inflation factor per column of `x` (no intercept column).
/// A column that is an exact linear combination of the others gets
/// `f64::INFINITY`.
pub fn vif(x: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (n, k) = x.shape();
    if k < 2 {
        return Err(Error::InvalidDesign("VIF needs at least two columns"));
    }
    (0..k)
        .map(|j| {
            let y: Vec<f64> = x.column(j).iter().copied().collect();
            let aux = DMatrix::from_fn(n, k, |i, c| match c {
                0 => 1.0,
                c if c <= j => x[(i, c - 1)],
                c => x[(i, c)],
            });
            match ols_fit(&y, &aux) {
                Ok(fit) if fit.r2 < 1.0 => Ok(1.0 / (1.0 - fit.r2)),
                Ok(_) | Err(Error::RankDeficient) | Err(Error::ConstantResponse) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = xs.iter().map(|x| 2.0 + 3.0 * x).collect();
        let fit = ols_fit(&y, &design_with_intercept(&[xs]).unwrap()).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn hand_solved_normal_equations() {
        // X'X = [[4, 10], [10, 30]], X'y = [9, 27]  =>  b = (0, 0.9)
        let fit = ols_fit(
            &[1.0, 2.0, 2.0, 4.0],
            &design_with_intercept(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap(),
        )
        .unwrap();
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.coefficients[1] - 0.9).abs() < 1e-12);
        // RSS = 0.1^2 + 0.2^2 + 0.7^2 + 0.4^2 = 0.7, TSS = 4.75
        assert!((fit.rss - 0.7).abs() < 1e-12);
        assert!((fit.r2 - (1.0 - 0.7 / 4.75)).abs() < 1e-12);
        assert!((fit.adj_r2 - (1.0 - (0.7 / 4.75) * 3.0 / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let c = vec![1.0, 2.0, 4.0, 8.0, 3.0];
        let x = design_with_intercept(&[c.clone(), c]).unwrap();
        assert!(matches!(ols_fit(&[1.0, 2.0, 3.0, 1.0, 0.0], &x), Err(Error::RankDeficient)));
    }

    #[test]
    fn design_errors() {
        let x = design_matrix(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(ols_fit(&[1.0, 2.0, 3.0], &x), Err(Error::InvalidDesign(_))));
        let x = design_with_intercept(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            ols_fit(&[1.0, 2.0], &x),
            Err(Error::InsufficientObservations { .. })
        ));
        assert!(design_with_intercept(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn dw_fixtures() {
        assert_eq!(durbin_watson(&[1.0, 1.0, 1.0, 1.0]).unwrap().statistic, 0.0);
        assert_eq!(durbin_watson(&[1.0, -1.0, 1.0, -1.0]).unwrap().statistic, 3.0);
        assert!(matches!(durbin_watson(&[0.0, 0.0]), Err(Error::AllZeroResiduals)));
        assert!(matches!(durbin_watson(&[1.0]), Err(Error::TooFewPoints { .. })));
        let r = durbin_watson(&[0.3, -0.1, 0.2, 0.5, -0.4]).unwrap();
        assert!(r.approximate);
        assert!(r.p_value.is_some_and(|p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn vif_orthogonal_columns() {
        let a = vec![1.0, -1.0, 1.0, -1.0];
        let b = vec![1.0, 1.0, -1.0, -1.0];
        let v = vif(&design_matrix(&[a, b]).unwrap()).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vif_collinear_is_infinite() {
        let a = vec![1.0, 2.0, 3.0, 5.0, 8.0];
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v + 1.0).collect();
        let c = vec![0.3, -0.2, 0.9, 0.1, 0.4];
        let v = vif(&design_matrix(&[a, b, c]).unwrap()).unwrap();
        // c's auxiliary design contains the collinear pair, so it is degenerate too
        assert!(v.iter().all(|x| x.is_infinite()));
        assert!(vif(&design_matrix(&[vec![1.0, 2.0]]).unwrap()).is_err());
    }

    #[test]
    fn bp_reports_df() {
        let x1: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let x2: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64).collect();
        let y: Vec<f64> = (0..20).map(|i| ((i * 13) % 11) as f64).collect();
        let x = design_with_intercept(&[x1, x2]).unwrap();
        let fit = ols_fit(&y, &x).unwrap();
        for variant in [BpVariant::Koenker, BpVariant::Classical] {
            let bp = breusch_pagan(&fit, &x, variant).unwrap();
            assert_eq!(bp.degrees_of_freedom, Some(2));
            assert!(bp.statistic >= 0.0);
            assert!(bp.p_value.is_some_and(|p| (0.0..=1.0).contains(&p)));
        }
    }
}
