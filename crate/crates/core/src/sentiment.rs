//! Headline scoring from three-class classifier logits.
//!
//! The classifier itself is external; this module only sees its raw outputs.
//! A headline's score is either the positive-minus-negative softmax
//! probability ([`ScoreMode::ProbDiff`], the default) or the raw
//! positive-minus-negative logit difference ([`ScoreMode::LogitDiff`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw class outputs for one headline, in (positive, negative, neutral) order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logits {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

impl Logits {
    pub const fn new(positive: f64, negative: f64, neutral: f64) -> Self {
        Self {
            positive,
            negative,
            neutral,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.positive, self.negative, self.neutral]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    fn check(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteInput("logits"))
        }
    }
}

impl From<[f64; 3]> for Logits {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
    Neutral,
}

impl Label {
    /// Tie-break order for argmax.
    pub const ALL: [Label; 3] = [Label::Positive, Label::Negative, Label::Neutral];

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScoreMode {
    /// P(positive) - P(negative); bounded in (-1, 1).
    #[default]
    ProbDiff,
    /// logit(positive) - logit(negative).
    LogitDiff,
}

impl FromStr for ScoreMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "prob-diff" => Ok(ScoreMode::ProbDiff),
            "logit-diff" => Ok(ScoreMode::LogitDiff),
            other => Err(format!("unknown score mode `{other}` (expected prob-diff or logit-diff)")),
        }
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::ProbDiff => "prob-diff",
            ScoreMode::LogitDiff => "logit-diff",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredHeadline {
    pub date: NaiveDate,
    /// Softmax probabilities, (positive, negative, neutral).
    pub probs: [f64; 3],
    pub label: Label,
    pub score: f64,
}

impl ScoredHeadline {
    pub fn from_logits(date: NaiveDate, logits: Logits, mode: ScoreMode) -> Result<Self> {
        let p = softmax(&logits.as_array())?;
        Ok(Self {
            date,
            probs: [p[0], p[1], p[2]],
            label: predict_class(logits)?,
            score: sentiment_score(logits, mode)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyPoint {
    pub date: NaiveDate,
    pub mean_score: f64,
    pub count: usize,
}

/// Mean headline score per calendar date, sorted by date.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DailySentimentSeries {
    pub points: Vec<DailyPoint>,
}

impl DailySentimentSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub positive: usize,
    pub negative: usize,
    pub neutral: usize,
}

impl CategoryCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
            Label::Neutral => self.neutral,
        }
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative + self.neutral
    }
}

/// Numerically stable softmax (the maximum is subtracted before exponentiating).
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::EmptyInput("softmax needs at least one logit"));
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("logits"));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// Argmax class; ties resolve positive, then negative, then neutral.
pub fn predict_class(logits: Logits) -> Result<Label> {
    logits.check()?;
    let values = logits.as_array();
    let mut best = 0;
    for i in 1..3 {
        if values[i] > values[best] {
            best = i;
        }
    }
    Ok(Label::ALL[best])
}

/// Largest `f64` below one. Probability differences are open-interval
/// quantities; at extreme logit gaps the subtraction would otherwise round
/// onto the boundary.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

pub fn sentiment_score(logits: Logits, mode: ScoreMode) -> Result<f64> {
    logits.check()?;
    match mode {
        ScoreMode::LogitDiff => Ok(logits.positive - logits.negative),
        ScoreMode::ProbDiff => {
            let p = softmax(&logits.as_array())?;
            Ok((p[0] - p[1]).clamp(-BELOW_ONE, BELOW_ONE))
        }
    }
}

pub fn aggregate_daily(scored: &[ScoredHeadline]) -> Result<DailySentimentSeries> {
    if scored.is_empty() {
        return Err(Error::EmptyInput("no scored headlines to aggregate"));
    }
    let mut by_date: BTreeMap<NaiveDate, (f64, usize)> = BTreeMap::new();
    for h in scored {
        let slot = by_date.entry(h.date).or_insert((0.0, 0));
        slot.0 += h.score;
        slot.1 += 1;
    }
    let points = by_date
        .into_iter()
        .map(|(date, (sum, count))| DailyPoint {
            date,
            mean_score: sum / count as f64,
            count,
        })
        .collect();
    Ok(DailySentimentSeries { points })
}

pub fn category_distribution(scored: &[ScoredHeadline]) -> CategoryCounts {
    let mut counts = CategoryCounts::default();
    for h in scored {
        match h.label {
            Label::Positive => counts.positive += 1,
            Label::Negative => counts.negative += 1,
            Label::Neutral => counts.neutral += 1,
        }
    }
    counts
}

const POSITIVE_WORDS: &[&str] = &[
    "rally", "rallies", "gain", "gains", "rise", "rises", "surge", "surges", "rebound",
    "recovery", "growth", "boost", "optimism", "ceasefire", "peace", "truce", "agreement",
    "deal", "aid", "support", "win", "wins", "progress", "relief", "calm", "stabilize",
];

const NEGATIVE_WORDS: &[&str] = &[
    "war", "crisis", "loss", "losses", "fall", "falls", "drop", "drops", "decline", "plunge",
    "slump", "attack", "attacks", "strike", "strikes", "invasion", "sanctions", "fear", "fears",
    "threat", "threats", "escalates", "escalation", "killed", "casualties", "recession",
    "shortage", "turmoil", "selloff",
];

/// Toy lexicon scorer for demos without classifier output: pseudo-logits are
/// the positive and negative word hit counts, with a fixed 0.5 neutral logit.
///
/// Expects text already passed through [`crate::ingest::normalize_text`].
/// This is not a stand-in for a trained classifier.
pub fn lexicon_score(text: &str) -> Logits {
    let mut pos = 0usize;
    let mut neg = 0usize;
    for word in text.split_whitespace() {
        if POSITIVE_WORDS.contains(&word) {
            pos += 1;
        } else if NEGATIVE_WORDS.contains(&word) {
            neg += 1;
        }
    }
    Logits::new(pos as f64, neg as f64, 0.5)
}
