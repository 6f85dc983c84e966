use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{mean_residuals, GarchFit};
use crate::error::{Error, Result};

/// `e_t / sigma_t` using the fitted variance path.
pub fn standardized_residuals(fit: &GarchFit, y: &[f64], x: &DMatrix<f64>) -> Result<Vec<f64>> {
    if y.len() != fit.variance_path.len() {
        return Err(Error::DimensionMismatch(format!(
            "fit covers {} observations, y has {}",
            fit.variance_path.len(),
            y.len()
        )));
    }
    let eps = mean_residuals(&fit.params, y, x)?;
    Ok(eps
        .iter()
        .zip(&fit.variance_path)
        .map(|(e, s2)| e / s2.sqrt())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QqReference {
    Normal,
    /// Student-t rescaled to unit variance; requires `nu > 2`.
    StudentT(f64),
}

impl QqReference {
    fn quantile_fn(&self) -> Result<Box<dyn Fn(f64) -> f64>> {
        match *self {
            QqReference::Normal => {
                let d = Normal::standard();
                Ok(Box::new(move |p| d.inverse_cdf(p)))
            }
            QqReference::StudentT(nu) => {
                if !nu.is_finite() || nu <= 2.0 {
                    return Err(Error::NuOutOfRange(nu));
                }
                let d = StudentsT::new(0.0, 1.0, nu).map_err(|_| Error::NuOutOfRange(nu))?;
                let scale = ((nu - 2.0) / nu).sqrt();
                Ok(Box::new(move |p| d.inverse_cdf(p) * scale))
            }
        }
    }
}

/// `(theoretical, empirical)` pairs: sorted values against reference
/// quantiles at plotting positions `(i - 0.5) / n`.
pub fn qq_data(values: &[f64], reference: QqReference) -> Result<Vec<(f64, f64)>> {
    if values.len() < 3 {
        return Err(Error::TooFewPoints {
            required: 3,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("Q-Q values"));
    }
    let quantile = reference.quantile_fn()?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let p = (i as f64 + 0.5) / n;
            // both references are symmetric about zero
            let q = if p == 0.5 { 0.0 } else { quantile(p) };
            (q, v)
        })
        .collect())
}
