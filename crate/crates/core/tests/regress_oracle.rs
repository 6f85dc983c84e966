use newsvol_core::regress::{breusch_pagan, design_matrix, design_with_intercept, durbin_watson, ols_fit, vif, BpVariant};
use proptest::prelude::*;

/// Solves the normal equations `X'X b = X'y` by Gauss-Jordan elimination
/// with partial pivoting. Independent of the QR path under test.
fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> Vec<f64> {
    let n = y.len();
    let mut x: Vec<Vec<f64>> = vec![vec![1.0; n]];
    x.extend(cols.iter().cloned());
    let p = x.len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..n).map(|t| x[i][t] * x[j][t]).sum();
        }
        a[i][p] = (0..n).map(|t| x[i][t] * y[t]).sum();
    }
    for c in 0..p {
        let piv = (c..p).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
        a.swap(c, piv);
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c {
                let f = row[c] / pivot[c];
                for (x, pv) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * pv;
                }
            }
        }
    }
    (0..p).map(|i| a[i][p] / a[i][i]).collect()
}

/// (R², adjusted R², F) computed from oracle coefficients.
fn oracle_stats(y: &[f64], cols: &[Vec<f64>], b: &[f64]) -> (f64, f64, f64) {
    let n = y.len() as f64;
    let k = cols.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let rss: f64 = (0..y.len())
        .map(|t| {
            let fit = b[0] + cols.iter().zip(&b[1..]).map(|(c, bj)| c[t] * bj).sum::<f64>();
            (y[t] - fit).powi(2)
        })
        .sum();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = 1.0 - rss / tss;
    let adj = 1.0 - (1.0 - r2) * (n - 1.0) / (n - k - 1.0);
    let f = (r2 / k) / ((1.0 - r2) / (n - k - 1.0));
    (r2, adj, f)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn problem() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (1usize..=5).prop_flat_map(|k| {
        (k + 3..=50).prop_flat_map(move |n| {
            (
                prop::collection::vec(-10.0..10.0f64, n),
                prop::collection::vec(prop::collection::vec(-5.0..5.0f64, n), k),
            )
        })
    })
}

proptest! {
    #[test]
    fn qr_matches_normal_equations((y, cols) in problem()) {
        let fit = ols_fit(&y, &design_with_intercept(&cols).unwrap()).unwrap();
        let b = normal_equations(&y, &cols);
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        for (got, want) in fit.coefficients.iter().zip(&b) {
            prop_assert!((got - want).abs() <= 1e-8 * norm);
        }
        let (r2, adj, f) = oracle_stats(&y, &cols, &b);
        prop_assert!(rel(fit.r2, r2) <= 1e-8);
        prop_assert!(rel(fit.adj_r2, adj) <= 1e-8);
        prop_assert!(rel(fit.f_statistic.unwrap(), f) <= 1e-8);
    }

    #[test]
    fn residuals_sum_to_zero_and_are_orthogonal((y, cols) in problem()) {
        let fit = ols_fit(&y, &design_with_intercept(&cols).unwrap()).unwrap();
        let scale = 1.0 + y.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!(fit.residuals.iter().sum::<f64>().abs() <= 1e-9 * scale);
        for c in &cols {
            let dot: f64 = c.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() <= 1e-8 * scale * 5.0);
        }
        prop_assert!(fit.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn shifting_y_moves_only_the_intercept((y, cols) in problem(), c in -100.0..100.0f64) {
        let x = design_with_intercept(&cols).unwrap();
        let a = ols_fit(&y, &x).unwrap();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let b = ols_fit(&shifted, &x).unwrap();
        prop_assert!((b.coefficients[0] - a.coefficients[0] - c).abs() <= 1e-8 * (1.0 + c.abs()));
        for j in 1..a.coefficients.len() {
            prop_assert!((b.coefficients[j] - a.coefficients[j]).abs() <= 1e-8 * (1.0 + c.abs()));
        }
        prop_assert!((a.r2 - b.r2).abs() <= 1e-8);
    }

    #[test]
    fn durbin_watson_in_range(e in prop::collection::vec(-10.0..10.0f64, 2..200)) {
        prop_assume!(e.iter().any(|v| *v != 0.0));
        let dw = durbin_watson(&e).unwrap().statistic;
        prop_assert!((0.0..=4.0).contains(&dw));
    }

    #[test]
    fn vif_at_least_one((_, cols) in problem()) {
        prop_assume!(cols.len() >= 2);
        for v in vif(&design_matrix(&cols).unwrap()).unwrap() {
            prop_assert!(v >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn bp_statistic_nonnegative((y, cols) in problem()) {
        let x = design_with_intercept(&cols).unwrap();
        let fit = ols_fit(&y, &x).unwrap();
        for variant in [BpVariant::Koenker, BpVariant::Classical] {
            let bp = breusch_pagan(&fit, &x, variant).unwrap();
            prop_assert!(bp.statistic >= -1e-9);
            prop_assert_eq!(bp.degrees_of_freedom, Some(cols.len()));
            let p = bp.p_value.unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn dw_fixtures_are_exact() {
    assert_eq!(durbin_watson(&[0.7; 10]).unwrap().statistic, 0.0);
    assert_eq!(durbin_watson(&[1.0, -1.0, 1.0, -1.0]).unwrap().statistic, 3.0);
}

#[test]
fn bivariate_vif_from_correlation() {
    // centre two columns and orthogonalise, then mix to correlation exactly 0.8
    let z1 = [0.3, -1.2, 0.8, 2.1, -0.4, 1.5, -2.2, 0.1];
    let z2 = [1.1, 0.4, -0.9, 0.2, 1.7, -1.3, 0.5, -0.6];
    let centre = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| x - m).collect::<Vec<f64>>()
    };
    let unit = |v: Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
    };
    let a = unit(centre(&z1));
    let b0 = centre(&z2);
    let proj: f64 = a.iter().zip(&b0).map(|(x, y)| x * y).sum();
    let b = unit(b0.iter().zip(&a).map(|(y, x)| y - proj * x).collect());
    let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.8 * x + 0.6 * y).collect();
    let v = vif(&design_matrix(&[a, c]).unwrap()).unwrap();
    for value in v {
        assert!((value - 1.0 / 0.36).abs() < 1e-9, "{value}");
    }
}
