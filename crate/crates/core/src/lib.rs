//! Sentiment-to-volatility toolkit.
//!
//! The crate is organised along the analysis pipeline:
//!
//! - [`ingest`]: headline and market-series loading, text normalisation,
//!   keyword filtering, and calendar alignment.
//! - [`sentiment`]: softmax scoring of classifier logits and daily aggregation.
//! - [`timeseries`]: log returns, natural cubic splines, descriptive statistics.
//! - [`regress`]: OLS with Breusch-Pagan, Durbin-Watson and VIF diagnostics.
//! - [`garch`]: GARCH(1,1) with normal or Student-t innovations, estimated by
//!   maximum likelihood with a multi-start simplex search.

pub mod error;
pub mod garch;
pub mod ingest;
pub mod optim;
pub mod regress;
pub mod sentiment;
pub mod timeseries;

pub use error::{Error, Result};
pub use garch::{Distribution, EstimationMode, GarchFit, GarchParams};
pub use ingest::{AlignedPanel, FillMode, Headline, HeadlineFormat, MarketSeries};
pub use regress::{OlsFit, TestResult};
pub use sentiment::{DailySentimentSeries, Label, Logits, ScoreMode, ScoredHeadline};
pub use timeseries::{Spline, SummaryStats};

/// Re-exported so callers can build design matrices without naming nalgebra.
pub use nalgebra::DMatrix;
