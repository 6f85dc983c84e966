use chrono::NaiveDate;
use newsvol_core::sentiment::{
    aggregate_daily, category_distribution, predict_class, sentiment_score, softmax,
};
use newsvol_core::{Logits, ScoreMode, ScoredHeadline};
use proptest::prelude::*;

fn logit() -> impl Strategy<Value = f64> {
    -30.0..30.0f64
}

fn logits() -> impl Strategy<Value = Logits> {
    (logit(), logit(), logit()).prop_map(|(p, n, u)| Logits::new(p, n, u))
}

fn argmax(v: &[f64]) -> usize {
    // first maximum, matching positive > negative > neutral tie order
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(l in logits()) {
        let p = softmax(&l.as_array()).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn softmax_shift_invariant(l in logits(), c in -500.0..500.0f64) {
        let a = softmax(&l.as_array()).unwrap();
        let shifted: Vec<f64> = l.as_array().iter().map(|v| v + c).collect();
        let b = softmax(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn softmax_keeps_the_argmax(l in logits()) {
        let raw = l.as_array();
        let label = predict_class(l).unwrap();
        prop_assert_eq!(label as usize, argmax(&raw));
        let p = softmax(&raw).unwrap();
        prop_assert!(p[label as usize] >= p.iter().cloned().fold(f64::MIN, f64::max) - 1e-15);
    }

    #[test]
    fn prob_diff_bounded_and_antisymmetric(l in logits()) {
        let s = sentiment_score(l, ScoreMode::ProbDiff).unwrap();
        prop_assert!(s > -1.0 && s < 1.0);
        let swapped = Logits::new(l.negative, l.positive, l.neutral);
        let t = sentiment_score(swapped, ScoreMode::ProbDiff).unwrap();
        prop_assert!((s + t).abs() <= 1e-12);
    }

    #[test]
    fn prob_diff_open_interval_at_extremes(a in -1e6..1e6f64, b in -1e6..1e6f64, c in -1e6..1e6f64) {
        let s = sentiment_score(Logits::new(a, b, c), ScoreMode::ProbDiff).unwrap();
        prop_assert!(s > -1.0 && s < 1.0);
    }

    #[test]
    fn logit_diff_is_the_raw_difference(l in logits()) {
        let s = sentiment_score(l, ScoreMode::LogitDiff).unwrap();
        prop_assert_eq!(s, l.positive - l.negative);
    }

    #[test]
    fn daily_counts_and_means(
        rows in prop::collection::vec((0u32..10, logits()), 1..60),
    ) {
        let base = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
        let scored: Vec<ScoredHeadline> = rows
            .iter()
            .map(|(d, l)| {
                ScoredHeadline::from_logits(base + chrono::Days::new(*d as u64), *l, ScoreMode::ProbDiff)
                    .unwrap()
            })
            .collect();
        let daily = aggregate_daily(&scored).unwrap();
        prop_assert_eq!(daily.points.iter().map(|p| p.count).sum::<usize>(), scored.len());
        prop_assert!(daily.points.windows(2).all(|w| w[0].date < w[1].date));
        let weighted: f64 = daily.points.iter().map(|p| p.mean_score * p.count as f64).sum();
        let total: f64 = scored.iter().map(|s| s.score).sum();
        prop_assert!((weighted - total).abs() <= 1e-9 * (1.0 + total.abs()));
        let counts = category_distribution(&scored);
        prop_assert_eq!(counts.total(), scored.len());
    }
}
