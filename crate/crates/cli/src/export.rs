//! Plot-ready CSV series. Each file has a header and is sorted by its
//! first column.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use newsvol_core::sentiment::CategoryCounts;
use newsvol_core::Label;

use crate::pipeline::{csv_string, write_file, PipelineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    ItemsPerDay,
    DailySentiment,
    CategoryDistribution,
    ResidualsVsSentiment,
    Qq,
}

impl FigureKind {
    pub const ALL: [FigureKind; 5] = [
        FigureKind::ItemsPerDay,
        FigureKind::DailySentiment,
        FigureKind::CategoryDistribution,
        FigureKind::ResidualsVsSentiment,
        FigureKind::Qq,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureKind::ItemsPerDay => "items_per_day",
            FigureKind::DailySentiment => "daily_sentiment",
            FigureKind::CategoryDistribution => "category_distribution",
            FigureKind::ResidualsVsSentiment => "residuals_vs_sentiment",
            FigureKind::Qq => "qq",
        }
    }

    pub fn header(&self) -> [&'static str; 2] {
        match self {
            FigureKind::ItemsPerDay => ["date", "count"],
            FigureKind::DailySentiment => ["date", "mean_score"],
            FigureKind::CategoryDistribution => ["label", "count"],
            FigureKind::ResidualsVsSentiment => ["sentiment", "residual"],
            FigureKind::Qq => ["theoretical", "empirical"],
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.as_str())
    }
}

impl fmt::Display for FigureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        FigureKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown figure `{s}`"))
    }
}

/// Series backing the figures; `None` where the inputs were not available
/// (e.g. headline-derived series when starting from a saved panel).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureData {
    pub items_per_day: Option<Vec<(NaiveDate, usize)>>,
    pub daily_sentiment: Option<Vec<(NaiveDate, f64)>>,
    pub categories: Option<CategoryCounts>,
    pub residuals_vs_sentiment: Option<Vec<(f64, f64)>>,
    pub qq: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("figure data `{0}` is not available")]
    MissingSeries(FigureKind),
    #[error(transparent)]
    Write(#[from] PipelineError),
}

fn sorted_pairs(pairs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut v = pairs.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

pub fn figure_csv(data: &FigureData, which: FigureKind) -> Result<String, ExportError> {
    let missing = || ExportError::MissingSeries(which);
    let header = which.header();
    let rows: Vec<Vec<String>> = match which {
        FigureKind::ItemsPerDay => {
            let mut v = data.items_per_day.clone().ok_or_else(missing)?;
            v.sort();
            v.into_iter().map(|(d, n)| vec![d.to_string(), n.to_string()]).collect()
        }
        FigureKind::DailySentiment => {
            let mut v = data.daily_sentiment.clone().ok_or_else(missing)?;
            v.sort_by_key(|p| p.0);
            v.into_iter().map(|(d, s)| vec![d.to_string(), s.to_string()]).collect()
        }
        FigureKind::CategoryDistribution => {
            let c = data.categories.ok_or_else(missing)?;
            let mut labels = Label::ALL;
            labels.sort_by_key(|l| l.as_str());
            labels.iter().map(|l| vec![l.to_string(), c.get(*l).to_string()]).collect()
        }
        FigureKind::ResidualsVsSentiment | FigureKind::Qq => {
            let pairs = match which {
                FigureKind::Qq => data.qq.as_ref(),
                _ => data.residuals_vs_sentiment.as_ref(),
            }
            .ok_or_else(missing)?;
            sorted_pairs(pairs).into_iter().map(|(x, y)| vec![x.to_string(), y.to_string()]).collect()
        }
    };
    Ok(csv_string(&header, rows))
}

/// Writes `<dir>/<which>.csv` and returns its path.
pub fn export_figure_data(data: &FigureData, which: FigureKind, dir: &Path) -> Result<PathBuf, ExportError> {
    let text = figure_csv(data, which)?;
    let path = dir.join(which.file_name());
    write_file(&path, text)?;
    Ok(path)
}
