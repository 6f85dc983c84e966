//! Log returns, natural cubic spline interpolation, and descriptive statistics.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::MarketSeries;

/// `ln(P_t / P_{t-1})`, dated at `t`.
pub fn log_returns(prices: &MarketSeries) -> Result<MarketSeries> {
    let pts = prices.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            got: pts.len(),
        });
    }
    if let Some(&(date, value)) = pts.iter().find(|(_, v)| *v <= 0.0) {
        return Err(Error::NonpositivePrice { date, value });
    }
    let points = pts
        .windows(2)
        .map(|w| (w[1].0, (w[1].1 / w[0].1).ln()))
        .collect();
    MarketSeries::new(prices.name(), points)
}

/// Natural cubic spline: piecewise cubic, C² at the knots, zero second
/// derivative at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second_derivs: Vec<f64>,
}

impl Spline {
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn second_derivs(&self) -> &[f64] {
        &self.second_derivs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Evaluates the interpolant. Knots return their `y` exactly.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        let idx = self.xs.partition_point(|&k| k < x);
        if idx < self.xs.len() && self.xs[idx] == x {
            return Ok(self.ys[idx]);
        }
        Ok(self.piece_value(idx - 1, x))
    }

    /// Index of the segment `[x_i, x_{i+1}]` containing `x` (clamped).
    pub fn segment(&self, x: f64) -> usize {
        let idx = self.xs.partition_point(|&k| k <= x);
        idx.clamp(1, self.xs.len() - 1) - 1
    }

    /// Cubic of segment `seg`, evaluated at any `x` (no range check, so the
    /// piece can be followed past its own knots).
    pub fn piece_value(&self, seg: usize, x: f64) -> f64 {
        let (h, a, b, m0, m1, y0, y1) = self.piece(seg, x);
        m0 * a * a * a / (6.0 * h)
            + m1 * b * b * b / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * a
            + (y1 / h - m1 * h / 6.0) * b
    }

    pub fn piece_derivative(&self, seg: usize, x: f64) -> f64 {
        let (h, a, b, m0, m1, y0, y1) = self.piece(seg, x);
        -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0)
            + (y1 / h - m1 * h / 6.0)
    }

    pub fn piece_second_derivative(&self, seg: usize, x: f64) -> f64 {
        let (h, a, b, m0, m1, _, _) = self.piece(seg, x);
        (m0 * a + m1 * b) / h
    }

    fn piece(&self, seg: usize, x: f64) -> (f64, f64, f64, f64, f64, f64, f64) {
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        (
            x1 - x0,
            x1 - x,
            x - x0,
            self.second_derivs[seg],
            self.second_derivs[seg + 1],
            self.ys[seg],
            self.ys[seg + 1],
        )
    }
}

/// Solves the tridiagonal system for the interior second derivatives
/// (Thomas algorithm; the system is strictly diagonally dominant).
pub fn fit_natural_spline(knots: &[(f64, f64)]) -> Result<Spline> {
    let n = knots.len();
    if n < 2 {
        return Err(Error::TooFewPoints { required: 2, got: n });
    }
    if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonFiniteInput("spline knots"));
    }
    if let Some(i) = knots.windows(2).position(|w| w[1].0 <= w[0].0) {
        return Err(Error::DuplicateX(i + 1));
    }
    let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
    let ys: Vec<f64> = knots.iter().map(|k| k.1).collect();
    let mut m = vec![0.0; n];
    if n > 2 {
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let interior = n - 2;
        let mut diag = vec![0.0; interior];
        let mut upper = vec![0.0; interior];
        let mut rhs = vec![0.0; interior];
        for j in 0..interior {
            let i = j + 1;
            diag[j] = 2.0 * (h[i - 1] + h[i]);
            upper[j] = h[i];
            rhs[j] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        // forward sweep; the sub-diagonal entry of row j is h[j]
        for j in 1..interior {
            let w = h[j] / diag[j - 1];
            diag[j] -= w * upper[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        m[interior] = rhs[interior - 1] / diag[interior - 1];
        for j in (0..interior - 1).rev() {
            m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
        }
    }
    Ok(Spline {
        xs,
        ys,
        second_derivs: m,
    })
}

pub fn spline_eval(s: &Spline, x: f64) -> Result<f64> {
    s.eval(x)
}

/// Re-samples `series` on `target_dates`. Dates already in the series keep
/// their value; the rest are read off a natural spline whose x-axis is the
/// day offset from the first observation.
pub fn fill_missing(series: &MarketSeries, target_dates: &[NaiveDate]) -> Result<MarketSeries> {
    let pts = series.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            got: pts.len(),
        });
    }
    let first = pts[0].0;
    let last = pts[pts.len() - 1].0;
    if let Some(&d) = target_dates.iter().find(|&&d| d < first || d > last) {
        return Err(Error::TargetOutsideSpan(d));
    }
    let offset = |d: NaiveDate| (d - first).num_days() as f64;
    let mut spline: Option<Spline> = None;
    let mut out = Vec::with_capacity(target_dates.len());
    for &d in target_dates {
        let value = match pts.binary_search_by_key(&d, |p| p.0) {
            Ok(i) => pts[i].1,
            Err(_) => {
                if spline.is_none() {
                    let knots: Vec<(f64, f64)> = pts.iter().map(|&(d, v)| (offset(d), v)).collect();
                    spline = Some(fit_natural_spline(&knots)?);
                }
                spline.as_ref().expect("spline fitted above").eval(offset(d))?
            }
        };
        out.push((d, value));
    }
    MarketSeries::new(series.name(), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Sample moments. `std_dev` uses the n-1 denominator; skewness and excess
/// kurtosis are the moment ratios m3/m2^1.5 and m4/m2^2 - 3 (zero for
/// constant input).
pub fn describe(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("describe needs at least one value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("describe"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let ss = m2;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std_dev = if values.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        count: values.len(),
        // rounding can push the mean of near-constant data just outside [min, max]
        mean: mean.clamp(min, max),
        std_dev,
        min,
        max,
        skewness,
        excess_kurtosis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(n: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, 1).unwrap() + chrono::Duration::days(n)
    }

    fn series(vals: &[(i64, f64)]) -> MarketSeries {
        MarketSeries::new("X", vals.iter().map(|&(d, v)| (day(d), v)).collect()).unwrap()
    }

    #[test]
    fn returns_basic() {
        let r = log_returns(&series(&[(0, 100.0), (1, 100.0)])).unwrap();
        assert_eq!(r.points(), &[(day(1), 0.0)]);
        let r = log_returns(&series(&[(0, 100.0), (1, 105.0)])).unwrap();
        assert!((r.points()[0].1 - 0.048_790_164_169_432_0).abs() < 1e-15);
        assert_eq!(r.points()[0].0, day(1));
    }

    #[test]
    fn returns_errors() {
        let err = log_returns(&series(&[(0, 100.0), (1, 0.0)])).unwrap_err();
        assert!(matches!(err, Error::NonpositivePrice { date, .. } if date == day(1)));
        assert!(matches!(
            log_returns(&series(&[(0, 100.0)])),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn spline_collinear() {
        let s = fit_natural_spline(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert!(s.second_derivs().iter().all(|&m| m == 0.0));
        assert!((s.eval(1.5).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn spline_hat_fixture() {
        // 4 M_1 = 6 * ((0 - 1) - (1 - 0))  =>  M_1 = -3
        let s = fit_natural_spline(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        assert_eq!(s.second_derivs(), &[0.0, -3.0, 0.0]);
        // -3 * 0.5^3 / 6 + 1 * 0.5 + (1 + 0.5) * 0.5 ... on [0, 1]
        assert!((s.eval(0.5).unwrap() - 0.6875).abs() < 1e-12);
        assert!((s.eval(1.5).unwrap() - 0.6875).abs() < 1e-12);
    }

    #[test]
    fn spline_two_knots() {
        let s = fit_natural_spline(&[(0.0, 5.0), (3.0, 5.0)]).unwrap();
        for x in [0.0, 0.7, 1.5, 3.0] {
            assert_eq!(s.eval(x).unwrap(), 5.0);
        }
        let line = fit_natural_spline(&[(1.0, 1.0), (3.0, 5.0)]).unwrap();
        assert!((line.eval(2.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn spline_errors() {
        assert!(matches!(fit_natural_spline(&[(0.0, 1.0)]), Err(Error::TooFewPoints { .. })));
        assert!(matches!(
            fit_natural_spline(&[(0.0, 1.0), (1.0, 2.0), (1.0, 3.0)]),
            Err(Error::DuplicateX(2))
        ));
        let s = fit_natural_spline(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!(matches!(s.eval(1.0001), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.eval(f64::NAN), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn spline_knots_exact() {
        let knots = [(0.0, 0.1), (0.3, -2.7), (1.1, 3.3), (2.0, 1.0 / 3.0), (7.5, 1e-3)];
        let s = fit_natural_spline(&knots).unwrap();
        for (x, y) in knots {
            assert_eq!(s.eval(x).unwrap(), y);
        }
    }

    #[test]
    fn fill_midpoint_and_identity() {
        let s = series(&[(0, 1.0), (2, 3.0)]);
        let out = fill_missing(&s, &[day(0), day(1), day(2)]).unwrap();
        assert_eq!(out.points()[1].1, 2.0);
        let same = fill_missing(&s, &[day(0), day(2)]).unwrap();
        assert_eq!(same.points(), s.points());
    }

    #[test]
    fn fill_uses_day_offsets() {
        // knots at days 0, 2, 4 with values (0, 1, 0): the hat spline scaled by 2,
        // so day 1 maps to x = 0.5 of the unit fixture.
        let s = series(&[(0, 0.0), (2, 1.0), (4, 0.0)]);
        let out = fill_missing(&s, &[day(1), day(3)]).unwrap();
        assert!((out.points()[0].1 - 0.6875).abs() < 1e-12);
        assert!((out.points()[1].1 - 0.6875).abs() < 1e-12);
    }

    #[test]
    fn fill_errors() {
        let s = series(&[(1, 0.0), (3, 1.0)]);
        assert!(matches!(fill_missing(&s, &[day(0)]), Err(Error::TargetOutsideSpan(_))));
        assert!(matches!(fill_missing(&s, &[day(4)]), Err(Error::TargetOutsideSpan(_))));
        let one = series(&[(1, 0.0)]);
        assert!(matches!(fill_missing(&one, &[day(1)]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn describe_fixtures() {
        let c = describe(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((c.mean, c.std_dev, c.skewness, c.excess_kurtosis), (1.0, 0.0, 0.0, 0.0));
        let s = describe(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        // sqrt(5/3)
        assert!((s.std_dev - 1.290_994_448_735_805_6).abs() < 1e-15);
        assert_eq!((s.min, s.max, s.count), (1.0, 4.0, 4));
        // uniform four-point: m4/m2^2 = 2.5625/1.5625
        assert!((s.excess_kurtosis - (2.5625 / 1.5625 - 3.0)).abs() < 1e-12);
        let sym = describe(&[-1.0, 1.0]).unwrap();
        assert_eq!((sym.mean, sym.skewness), (0.0, 0.0));
        assert!(matches!(describe(&[]), Err(Error::EmptyInput(_))));
        let single = describe(&[7.0]).unwrap();
        assert_eq!(single.std_dev, 0.0);
    }
}
