//! Headline and market-series ingestion, text normalisation, keyword
//! filtering, and alignment of everything onto the trading calendar.
//!
//! Headline files are CSV (header row; `date`, `title` required; `source`,
//! `body` and the logit columns `pos`, `neg`, `neu` optional) or JSONL (one
//! object per line with `date`, `title`, optional `source`, `body` and
//! `logits = [pos, neg, neu]`). Dates are ISO-8601 `YYYY-MM-DD`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::{DailySentimentSeries, Logits};
use crate::timeseries::fill_missing;

/// Column name used for the daily sentiment regressor.
pub const SENTIMENT_COLUMN: &str = "Sentiment";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub date: NaiveDate,
    pub source: String,
    pub title: String,
    pub body: Option<String>,
    pub logits: Option<Logits>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadlineFormat {
    Csv,
    Jsonl,
}

impl HeadlineFormat {
    /// `.jsonl` / `.ndjson` are JSONL, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("jsonl") || ext.eq_ignore_ascii_case("ndjson") => {
                HeadlineFormat::Jsonl
            }
            _ => HeadlineFormat::Csv,
        }
    }
}

impl FromStr for HeadlineFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(HeadlineFormat::Csv),
            "jsonl" | "ndjson" => Ok(HeadlineFormat::Jsonl),
            other => Err(format!("unknown headline format `{other}` (expected csv or jsonl)")),
        }
    }
}

/// A named, strictly date-ordered series of finite values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSeries {
    name: String,
    points: Vec<(NaiveDate, f64)>,
}

impl MarketSeries {
    pub fn new(name: impl Into<String>, points: Vec<(NaiveDate, f64)>) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidSeries {
                name,
                reason: "empty name".into(),
            });
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("dates not strictly increasing at {}", w[1].0),
            });
        }
        if let Some((d, _)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("non-finite value on {d}"),
            });
        }
        Ok(Self { name, points })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by_key(&date, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    fn span(&self) -> Option<(NaiveDate, NaiveDate)> {
        Some((self.points.first()?.0, self.points.last()?.0))
    }
}

impl DailySentimentSeries {
    pub fn to_series(&self) -> Result<MarketSeries> {
        MarketSeries::new(
            SENTIMENT_COLUMN,
            self.points.iter().map(|p| (p.date, p.mean_score)).collect(),
        )
    }
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d);
    }
    // tolerate full timestamps such as 2024-03-01T09:30:00Z
    match s.as_bytes().get(10) {
        Some(b'T') | Some(b' ') => NaiveDate::parse_from_str(&s[..10], "%Y-%m-%d").ok(),
        _ => None,
    }
}

fn read_file(path: &Path) -> Result<String> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(source) => Err(Error::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn malformed(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::MalformedRecord {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

pub fn load_headlines(path: impl AsRef<Path>, format: HeadlineFormat) -> Result<Vec<Headline>> {
    let path = path.as_ref();
    let text = read_file(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    let headlines = match format {
        HeadlineFormat::Csv => parse_headlines_csv(path, &text)?,
        HeadlineFormat::Jsonl => parse_headlines_jsonl(path, &text)?,
    };
    if headlines.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    Ok(headlines)
}

fn find_column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
}

fn parse_headlines_csv(path: &Path, text: &str) -> Result<Vec<Headline>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(path, 1, e.to_string()))?
        .clone();
    let require = |names: &[&str]| {
        find_column(&headers, names).ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: names[0].to_string(),
        })
    };
    let date_col = require(&["date"])?;
    let title_col = require(&["title"])?;
    let source_col = find_column(&headers, &["source"]);
    let body_col = find_column(&headers, &["body"]);
    let logit_cols = [
        find_column(&headers, &["pos", "positive"]),
        find_column(&headers, &["neg", "negative"]),
        find_column(&headers, &["neu", "neutral"]),
    ];
    let has_logits = logit_cols.iter().all(Option::is_some);
    if !has_logits && logit_cols.iter().any(Option::is_some) {
        return Err(malformed(path, 1, "logit columns must be pos, neg and neu together"));
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let raw_date = field(date_col);
        let date = parse_date(raw_date)
            .ok_or_else(|| malformed(path, line, format!("invalid date {raw_date:?}")))?;
        let logits = if has_logits {
            let cells: Vec<&str> = logit_cols.iter().map(|c| field(c.unwrap())).collect();
            if cells.iter().all(|c| c.is_empty()) {
                None
            } else {
                let mut v = [0.0; 3];
                for (slot, cell) in v.iter_mut().zip(&cells) {
                    *slot = cell
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| malformed(path, line, format!("invalid logit {cell:?}")))?;
                }
                Some(Logits::from(v))
            }
        } else {
            None
        };
        out.push(Headline {
            date,
            source: source_col.map(|c| field(c).to_string()).unwrap_or_default(),
            title: field(title_col).to_string(),
            body: body_col.map(field).filter(|b| !b.is_empty()).map(str::to_string),
            logits,
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
struct JsonHeadline {
    date: String,
    title: String,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    logits: Option<[f64; 3]>,
}

fn parse_headlines_jsonl(path: &Path, text: &str) -> Result<Vec<Headline>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: JsonHeadline =
            serde_json::from_str(raw).map_err(|e| malformed(path, line, e.to_string()))?;
        let date = parse_date(&rec.date)
            .ok_or_else(|| malformed(path, line, format!("invalid date {:?}", rec.date)))?;
        let logits = rec.logits.map(Logits::from);
        if logits.is_some_and(|l| !l.is_finite()) {
            return Err(malformed(path, line, "non-finite logits"));
        }
        out.push(Headline {
            date,
            source: rec.source.unwrap_or_default(),
            title: rec.title,
            body: rec.body.filter(|b| !b.trim().is_empty()),
            logits,
        });
    }
    Ok(out)
}

/// Lowercases, strips everything but letters, digits and whitespace, and
/// collapses whitespace runs to a single space.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else if c.is_alphanumeric() {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

/// Keeps headlines whose normalised title or body contains at least one
/// normalised keyword as a substring. Order is preserved.
pub fn filter_by_keywords<S: AsRef<str>>(
    headlines: &[Headline],
    keywords: &[S],
) -> Result<Vec<Headline>> {
    let keywords: Vec<String> = keywords
        .iter()
        .map(|k| normalize_text(k.as_ref()))
        .filter(|k| !k.is_empty())
        .collect();
    if keywords.is_empty() {
        return Err(Error::EmptyKeywords);
    }
    Ok(headlines
        .iter()
        .filter(|h| {
            let title = normalize_text(&h.title);
            let body = h.body.as_deref().map(normalize_text).unwrap_or_default();
            keywords
                .iter()
                .any(|k| title.contains(k.as_str()) || body.contains(k.as_str()))
        })
        .cloned()
        .collect())
}

pub fn load_market_series(
    path: impl AsRef<Path>,
    name: &str,
    date_column: &str,
    value_column: &str,
) -> Result<MarketSeries> {
    let path = path.as_ref();
    let text = read_file(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(path, 1, e.to_string()))?
        .clone();
    let column = |n: &str| {
        find_column(&headers, &[n]).ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: n.to_string(),
        })
    };
    let date_idx = column(date_column)?;
    let value_idx = column(value_column)?;

    let mut rows: Vec<(NaiveDate, f64, u64)> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let raw_date = record.get(date_idx).unwrap_or("").trim();
        let date = parse_date(raw_date)
            .ok_or_else(|| malformed(path, line, format!("invalid date {raw_date:?}")))?;
        let raw_value = record.get(value_idx).unwrap_or("").trim();
        let value = raw_value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::NonNumericValue {
                path: path.to_path_buf(),
                line,
                row: row + 1,
                value: raw_value.to_string(),
            })?;
        rows.push((date, value, line));
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    rows.sort_by_key(|r| (r.0, r.2));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate {
            path: path.to_path_buf(),
            line: w[1].2,
            date: w[1].0,
        });
    }
    MarketSeries::new(name, rows.into_iter().map(|(d, v, _)| (d, v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FillMode {
    /// Interpolate interior gaps with a natural cubic spline.
    #[default]
    Spline,
    /// Drop trading days on which any column is missing.
    Drop,
}

impl FromStr for FillMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spline" => Ok(FillMode::Spline),
            "drop" => Ok(FillMode::Drop),
            other => Err(format!("unknown fill mode `{other}` (expected spline or drop)")),
        }
    }
}

impl fmt::Display for FillMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FillMode::Spline => "spline",
            FillMode::Drop => "drop",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Returns, sentiment and exogenous regressors on a shared trading calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPanel {
    dates: Vec<NaiveDate>,
    returns: Vec<f64>,
    sentiment: Vec<f64>,
    exog: Vec<Column>,
    /// Number of interpolated cells per column, sentiment first.
    filled: Vec<(String, usize)>,
}

impl AlignedPanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        returns: Vec<f64>,
        sentiment: Vec<f64>,
        exog: Vec<Column>,
        filled: Vec<(String, usize)>,
    ) -> Result<Self> {
        let n = dates.len();
        if n == 0 {
            return Err(Error::EmptyInput("aligned panel has no dates"));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DimensionMismatch("panel dates must be strictly increasing".into()));
        }
        let lengths_ok = returns.len() == n
            && sentiment.len() == n
            && exog.iter().all(|c| c.values.len() == n);
        if !lengths_ok {
            return Err(Error::DimensionMismatch(format!(
                "every panel column must have {n} rows"
            )));
        }
        let all_finite = returns
            .iter()
            .chain(&sentiment)
            .chain(exog.iter().flat_map(|c| &c.values))
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::NonFiniteInput("aligned panel"));
        }
        Ok(Self {
            dates,
            returns,
            sentiment,
            exog,
            filled,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn sentiment(&self) -> &[f64] {
        &self.sentiment
    }

    pub fn exog(&self) -> &[Column] {
        &self.exog
    }

    pub fn fill_counts(&self) -> &[(String, usize)] {
        &self.filled
    }

    /// Regressor names in design order: sentiment, then exogenous columns.
    pub fn regressor_names(&self) -> Vec<String> {
        std::iter::once(SENTIMENT_COLUMN.to_string())
            .chain(self.exog.iter().map(|c| c.name.clone()))
            .collect()
    }

    /// Regressor columns in the same order as [`Self::regressor_names`].
    pub fn regressor_columns(&self) -> Vec<Vec<f64>> {
        std::iter::once(self.sentiment.clone())
            .chain(self.exog.iter().map(|c| c.values.clone()))
            .collect()
    }

    /// `date,returns,Sentiment,<exog...>` with full-precision values.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["date".to_string(), "returns".to_string()];
        header.extend(self.regressor_names());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row = vec![self.dates[i].to_string(), self.returns[i].to_string()];
            row.push(self.sentiment[i].to_string());
            row.extend(self.exog.iter().map(|c| c.values[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the layout produced by [`Self::write_csv`].
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = read_file(path)?;
        if text.trim().is_empty() {
            return Err(Error::EmptyFile(path.to_path_buf()));
        }
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| malformed(path, 1, e.to_string()))?
            .clone();
        let expect = |i: usize, name: &str| -> Result<()> {
            match headers.get(i) {
                Some(h) if h.trim().eq_ignore_ascii_case(name) => Ok(()),
                _ => Err(Error::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.to_string(),
                }),
            }
        };
        expect(0, "date")?;
        expect(1, "returns")?;
        expect(2, SENTIMENT_COLUMN)?;
        let exog_names: Vec<String> = headers.iter().skip(3).map(|h| h.trim().to_string()).collect();
        let (mut dates, mut returns, mut sentiment) = (Vec::new(), Vec::new(), Vec::new());
        let mut exog: Vec<Vec<f64>> = vec![Vec::new(); exog_names.len()];
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                malformed(path, line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let raw = record.get(0).unwrap_or("");
            dates.push(
                parse_date(raw).ok_or_else(|| malformed(path, line, format!("invalid date {raw:?}")))?,
            );
            let num = |i: usize| -> Result<f64> {
                let cell = record.get(i).unwrap_or("").trim();
                cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::NonNumericValue {
                        path: path.to_path_buf(),
                        line,
                        row: row + 1,
                        value: cell.to_string(),
                    }
                })
            };
            returns.push(num(1)?);
            sentiment.push(num(2)?);
            for (j, col) in exog.iter_mut().enumerate() {
                col.push(num(3 + j)?);
            }
        }
        let exog = exog_names
            .into_iter()
            .zip(exog)
            .map(|(name, values)| Column { name, values })
            .collect();
        Self::new(dates, returns, sentiment, exog, Vec::new())
    }
}

/// Joins returns, daily sentiment and exogenous series on the dates where a
/// return exists.
///
/// Every column must observe at least one trading date. In spline mode the
/// calendar is clipped to the span every column covers and interior gaps are
/// interpolated; in drop mode only dates observed by every column survive.
pub fn align_panel(
    returns: &MarketSeries,
    sentiment: &DailySentimentSeries,
    exog: &[MarketSeries],
    fill: FillMode,
) -> Result<AlignedPanel> {
    if returns.is_empty() {
        return Err(Error::EmptyInput("return series is empty"));
    }
    if sentiment.is_empty() {
        return Err(Error::EmptyInput("sentiment series is empty"));
    }
    if let Some(s) = exog.iter().find(|s| s.is_empty()) {
        return Err(Error::InvalidSeries {
            name: s.name().to_string(),
            reason: "series is empty".into(),
        });
    }
    let sentiment = sentiment.to_series()?;
    let columns: Vec<&MarketSeries> = std::iter::once(&sentiment).chain(exog.iter()).collect();

    for col in &columns {
        if !returns.dates().any(|d| col.get(d).is_some()) {
            return Err(Error::EmptyIntersection(col.name().to_string()));
        }
    }

    let calendar: Vec<NaiveDate> = match fill {
        FillMode::Drop => returns
            .dates()
            .filter(|&d| columns.iter().all(|c| c.get(d).is_some()))
            .collect(),
        FillMode::Spline => {
            if let Some(c) = columns.iter().find(|c| c.len() < 2) {
                return Err(Error::SplineFillImpossible(c.name().to_string()));
            }
            let spans: Vec<_> = columns.iter().filter_map(|c| c.span()).collect();
            returns
                .dates()
                .filter(|&d| spans.iter().all(|&(lo, hi)| d >= lo && d <= hi))
                .collect()
        }
    };
    if calendar.is_empty() {
        return Err(Error::EmptyIntersection("all columns".into()));
    }

    let mut filled = Vec::with_capacity(columns.len());
    let mut values = Vec::with_capacity(columns.len());
    for col in &columns {
        let missing = calendar.iter().filter(|&&d| col.get(d).is_none()).count();
        let series = if missing > 0 {
            fill_missing(col, &calendar)?
        } else {
            MarketSeries::new(
                col.name(),
                calendar.iter().map(|&d| (d, col.get(d).unwrap())).collect(),
            )?
        };
        filled.push((col.name().to_string(), missing));
        values.push(series.values().collect::<Vec<_>>());
    }
    let returns_col = calendar
        .iter()
        .map(|&d| returns.get(d).expect("calendar is drawn from return dates"))
        .collect();
    let mut values = values.into_iter();
    let sentiment_col = values.next().expect("sentiment column");
    let exog_cols = exog
        .iter()
        .zip(values)
        .map(|(s, v)| Column {
            name: s.name().to_string(),
            values: v,
        })
        .collect();
    AlignedPanel::new(calendar, returns_col, sentiment_col, exog_cols, filled)
}

/// Reads a `.jsonl`/`.csv` headline file, choosing the format by extension.
pub fn load_headlines_auto(path: impl AsRef<Path>) -> Result<Vec<Headline>> {
    let path: PathBuf = path.as_ref().to_path_buf();
    let format = HeadlineFormat::from_path(&path);
    load_headlines(path, format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentiment::DailyPoint;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, day).unwrap()
    }

    fn temp_file(ext: &str, body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    fn headline(title: &str) -> Headline {
        Headline {
            date: d(1),
            source: String::new(),
            title: title.into(),
            body: None,
            logits: None,
        }
    }

    fn daily(days: &[u32]) -> DailySentimentSeries {
        DailySentimentSeries {
            points: days
                .iter()
                .map(|&day| DailyPoint {
                    date: d(day),
                    mean_score: day as f64 / 10.0,
                    count: 1,
                })
                .collect(),
        }
    }

    fn series(name: &str, vals: &[(u32, f64)]) -> MarketSeries {
        MarketSeries::new(name, vals.iter().map(|&(day, v)| (d(day), v)).collect()).unwrap()
    }

    #[test]
    fn csv_headlines_with_logits() {
        let f = temp_file(
            ".csv",
            "date,title,pos,neg,neu\n2024-01-02,a,1,2,3\n2024-01-03,b,0.5,-1,0\n2024-01-03,c,0,0,0\n",
        );
        let hs = load_headlines(f.path(), HeadlineFormat::Csv).unwrap();
        assert_eq!(hs.len(), 3);
        assert_eq!(hs[0].logits, Some(Logits::new(1.0, 2.0, 3.0)));
        assert_eq!(hs[1].date, d(3));
        assert_eq!(hs[2].title, "c");
    }

    #[test]
    fn csv_bad_date_names_line() {
        let f = temp_file(".csv", "date,title,pos,neg,neu\n2024-01-02,a,1,2,3\n2024-13-40,b,1,2,3\n");
        match load_headlines(f.path(), HeadlineFormat::Csv) {
            Err(Error::MalformedRecord { line, reason, .. }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("2024-13-40"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jsonl_optional_logits() {
        let f = temp_file(
            ".jsonl",
            "{\"date\":\"2024-01-02\",\"title\":\"war\",\"logits\":[0.1,0.2,0.3]}\n\n{\"date\":\"2024-01-04\",\"title\":\"peace\",\"body\":\"text\"}\n",
        );
        let hs = load_headlines(f.path(), HeadlineFormat::from_path(f.path())).unwrap();
        assert_eq!(hs.len(), 2);
        assert!(hs[0].logits.is_some());
        assert_eq!(hs[1].logits, None);
        assert_eq!(hs[1].body.as_deref(), Some("text"));
    }

    #[test]
    fn jsonl_malformed_line() {
        let f = temp_file(".jsonl", "{\"date\":\"2024-01-02\",\"title\":\"x\"}\n{oops\n");
        assert!(matches!(
            load_headlines(f.path(), HeadlineFormat::Jsonl),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn missing_and_empty_files() {
        assert!(matches!(
            load_headlines("/nonexistent/h.csv", HeadlineFormat::Csv),
            Err(Error::FileNotFound(_))
        ));
        let empty = temp_file(".csv", "");
        assert!(matches!(
            load_headlines(empty.path(), HeadlineFormat::Csv),
            Err(Error::EmptyFile(_))
        ));
        let header_only = temp_file(".csv", "date,title\n");
        assert!(matches!(
            load_headlines(header_only.path(), HeadlineFormat::Csv),
            Err(Error::EmptyFile(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_text("WAR!!  In   Ukraine?"), "war in ukraine");
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("S&P 500 drops 2%"), "sp 500 drops 2");
        assert_eq!(normalize_text("  \t tabs\nand\r\nlines  "), "tabs and lines");
        assert_eq!(normalize_text("!!! ???"), "");
    }

    #[test]
    fn keyword_filter() {
        let hs = vec![headline("war escalates"), headline("markets rally")];
        let kept = filter_by_keywords(&hs, &["war"]).unwrap();
        assert_eq!(kept, vec![hs[0].clone()]);
        assert!(filter_by_keywords(&hs, &["zzz"]).unwrap().is_empty());
        let ukr = vec![headline("Ukraine talks")];
        assert_eq!(filter_by_keywords(&ukr, &["ukraine"]).unwrap().len(), 1);
        assert!(matches!(
            filter_by_keywords::<&str>(&hs, &[]),
            Err(Error::EmptyKeywords)
        ));
        assert!(matches!(filter_by_keywords(&hs, &["!!"]), Err(Error::EmptyKeywords)));
    }

    #[test]
    fn keyword_matches_body() {
        let mut h = headline("Markets today");
        h.body = Some("Russia announced...".into());
        assert_eq!(filter_by_keywords(&[h], &["Russia"]).unwrap().len(), 1);
    }

    #[test]
    fn market_series_loading() {
        let f = temp_file(
            ".csv",
            "date,close\n2024-01-05,5\n2024-01-01,1\n2024-01-02,2\n2024-01-03,3\n2024-01-04,4\n",
        );
        let s = load_market_series(f.path(), "SP500", "date", "close").unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.points()[0], (d(1), 1.0));
        assert_eq!(s.points()[4], (d(5), 5.0));

        let dup = temp_file(".csv", "date,close\n2024-01-01,1\n2024-01-01,2\n");
        assert!(matches!(
            load_market_series(dup.path(), "X", "date", "close"),
            Err(Error::DuplicateDate { .. })
        ));
        let nan = temp_file(".csv", "date,close\n2024-01-01,1\n2024-01-02,n/a\n");
        match load_market_series(nan.path(), "X", "date", "close") {
            Err(Error::NonNumericValue { row, value, line, .. }) => {
                assert_eq!((row, line, value.as_str()), (2, 3, "n/a"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_market_series(f.path(), "X", "date", "price"),
            Err(Error::MissingColumn { .. })
        ));
    }

    #[test]
    fn align_spline_fills_gap() {
        let ret = series("SP500", &[(1, 0.01), (2, -0.02), (3, 0.03)]);
        let epu = series("EPU", &[(1, 100.0), (3, 120.0)]);
        let panel = align_panel(&ret, &daily(&[1, 2, 3]), &[epu], FillMode::Spline).unwrap();
        assert_eq!(panel.len(), 3);
        assert_eq!(panel.exog()[0].values, vec![100.0, 110.0, 120.0]);
        assert_eq!(panel.fill_counts(), &[("Sentiment".into(), 0), ("EPU".into(), 1)]);
        assert_eq!(panel.regressor_names(), vec!["Sentiment", "EPU"]);
    }

    #[test]
    fn align_drop_removes_incomplete() {
        let ret = series("SP500", &[(1, 0.01), (2, -0.02), (3, 0.03)]);
        let epu = series("EPU", &[(1, 100.0), (3, 120.0)]);
        let panel = align_panel(&ret, &daily(&[1, 2, 3]), &[epu], FillMode::Drop).unwrap();
        assert_eq!(panel.dates(), &[d(1), d(3)]);
        assert_eq!(panel.returns(), &[0.01, 0.03]);
    }

    #[test]
    fn align_weekend_sentiment_is_empty_intersection() {
        // 2024-01-06/07 and 13/14 are weekends
        let ret = series("SP500", &[(8, 0.0), (9, 0.0), (10, 0.0), (11, 0.0), (12, 0.0)]);
        for fill in [FillMode::Spline, FillMode::Drop] {
            assert!(matches!(
                align_panel(&ret, &daily(&[6, 7, 13, 14]), &[], fill),
                Err(Error::EmptyIntersection(_))
            ));
        }
    }

    #[test]
    fn align_spline_needs_two_points() {
        let ret = series("SP500", &[(1, 0.0), (2, 0.0)]);
        let one = series("VIX", &[(1, 13.0)]);
        assert!(matches!(
            align_panel(&ret, &daily(&[1, 2]), &[one], FillMode::Spline),
            Err(Error::SplineFillImpossible(name)) if name == "VIX"
        ));
    }

    #[test]
    fn align_clips_to_common_span() {
        let ret = series("SP500", &[(1, 0.1), (2, 0.2), (3, 0.3), (4, 0.4)]);
        let bond = series("Bond", &[(2, 4.0), (4, 4.2)]);
        let panel = align_panel(&ret, &daily(&[1, 2, 3, 4]), &[bond], FillMode::Spline).unwrap();
        assert_eq!(panel.dates(), &[d(2), d(3), d(4)]);
    }

    #[test]
    fn panel_rejects_ragged_columns() {
        let err = AlignedPanel::new(vec![d(1), d(2)], vec![0.0], vec![0.0, 0.0], vec![], vec![]);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn panel_csv_round_trip() {
        let ret = series("SP500", &[(1, 0.01), (2, -1.0 / 3.0), (3, 0.03)]);
        let epu = series("EPU", &[(1, 100.0), (3, 120.0)]);
        let panel = align_panel(&ret, &daily(&[1, 2, 3]), &[epu], FillMode::Spline).unwrap();
        let mut buf = Vec::new();
        panel.write_csv(&mut buf).unwrap();
        let f = temp_file(".csv", std::str::from_utf8(&buf).unwrap());
        let back = AlignedPanel::read_csv(f.path()).unwrap();
        assert_eq!(back.returns(), panel.returns());
        assert_eq!(back.regressor_columns(), panel.regressor_columns());
    }
}
