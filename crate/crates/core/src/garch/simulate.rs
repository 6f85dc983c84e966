use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal, StudentT};

use super::{Distribution, GarchParams};
use crate::error::{Error, Result};

/// Simulates `len` observations, returning `(y, sigma2)`.
///
/// The variance starts at its unconditional level. Student-t draws are
/// rescaled by `sqrt((nu - 2) / nu)` to unit variance. Output is a pure
/// function of the arguments.
pub fn simulate(
    params: &GarchParams,
    exog: Option<&DMatrix<f64>>,
    len: usize,
    seed: u64,
    dist: Distribution,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate(dist)?;
    if len == 0 {
        return Err(Error::InvalidParams("simulation length must be >= 1".into()));
    }
    match exog {
        Some(x) if x.ncols() != params.betas.len() || x.nrows() < len => {
            return Err(Error::DimensionMismatch(format!(
                "exogenous matrix is {}x{}, need at least {len} rows and {} columns",
                x.nrows(),
                x.ncols(),
                params.betas.len()
            )));
        }
        None if !params.betas.is_empty() => {
            return Err(Error::DimensionMismatch("betas given without exogenous data".into()));
        }
        _ => {}
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_dist = match (dist, params.nu) {
        (Distribution::StudentT, Some(nu)) => {
            Some((StudentT::new(nu).map_err(|e| Error::InvalidParams(e.to_string()))?, ((nu - 2.0) / nu).sqrt()))
        }
        _ => None,
    };

    let mut y = Vec::with_capacity(len);
    let mut sigma2 = Vec::with_capacity(len);
    let mut s2 = params.unconditional_variance();
    let mut prev_eps = 0.0;
    for t in 0..len {
        if t > 0 {
            s2 = params.alpha0 + params.alpha1 * prev_eps * prev_eps + params.beta1 * s2;
        }
        let z: f64 = match &t_dist {
            Some((d, scale)) => d.sample(&mut rng) * scale,
            None => StandardNormal.sample(&mut rng),
        };
        let eps = s2.sqrt() * z;
        let mean = params.mu
            + exog.map_or(0.0, |x| {
                params.betas.iter().enumerate().map(|(j, b)| b * x[(t, j)]).sum()
            });
        y.push(mean + eps);
        sigma2.push(s2);
        prev_eps = eps;
    }
    Ok((y, sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::describe;

    #[test]
    fn constant_variance_matches_alpha0() {
        let p = GarchParams::new(0.5, 0.3, 0.0, 0.0);
        let (y, s2) = simulate(&p, None, 10_000, 11, Distribution::Normal).unwrap();
        assert!(s2.iter().all(|&v| v == 0.3));
        let centered: Vec<f64> = y.iter().map(|v| v - 0.5).collect();
        let var = centered.iter().map(|v| v * v).sum::<f64>() / centered.len() as f64;
        assert!((var / 0.3 - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn deterministic_given_seed() {
        let p = GarchParams::new(0.0, 0.1, 0.1, 0.8).with_nu(6.0);
        let a = simulate(&p, None, 500, 42, Distribution::StudentT).unwrap();
        let b = simulate(&p, None, 500, 42, Distribution::StudentT).unwrap();
        assert_eq!(a, b);
        let c = simulate(&p, None, 500, 43, Distribution::StudentT).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn student_t_has_fatter_tails() {
        let base = GarchParams::new(0.0, 1.0, 0.0, 0.0);
        let (yn, _) = simulate(&base, None, 20_000, 5, Distribution::Normal).unwrap();
        let (yt, _) = simulate(&base.clone().with_nu(5.0), None, 20_000, 5, Distribution::StudentT).unwrap();
        let kn = describe(&yn).unwrap().excess_kurtosis;
        let kt = describe(&yt).unwrap().excess_kurtosis;
        assert!(kt > kn + 1.0, "t {kt} vs normal {kn}");
        // unit-variance scaling
        let var_t = describe(&yt).unwrap().std_dev.powi(2);
        assert!((var_t - 1.0).abs() < 0.1, "{var_t}");
    }

    #[test]
    fn exogenous_mean() {
        let x = DMatrix::from_fn(4, 1, |i, _| i as f64);
        let p = GarchParams::new(1.0, 1e-12, 0.0, 0.0).with_betas(vec![2.0]);
        let (y, _) = simulate(&p, Some(&x), 4, 0, Distribution::Normal).unwrap();
        for (i, v) in y.iter().enumerate() {
            assert!((v - (1.0 + 2.0 * i as f64)).abs() < 1e-4);
        }
        assert!(simulate(&p, None, 4, 0, Distribution::Normal).is_err());
    }

    #[test]
    fn rejects_invalid_params() {
        let p = GarchParams::new(0.0, 0.1, 0.5, 0.5);
        assert!(simulate(&p, None, 10, 0, Distribution::Normal).is_err());
        let ok = GarchParams::new(0.0, 0.1, 0.1, 0.5);
        assert!(simulate(&ok, None, 0, 0, Distribution::Normal).is_err());
    }
}
