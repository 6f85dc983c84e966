//! End-to-end orchestration: ingest → sentiment → align → OLS and
//! diagnostics → GARCH → residual diagnostics → files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use newsvol_core::garch::{self, qq_data, standardized_residuals, FitOptions, QqReference};
use newsvol_core::ingest::{align_panel, filter_by_keywords, load_headlines_auto, load_market_series};
use newsvol_core::regress::{breusch_pagan, design_with_intercept, durbin_watson, ols_fit, vif, BpVariant};
use newsvol_core::sentiment::{aggregate_daily, category_distribution, lexicon_score, CategoryCounts};
use newsvol_core::timeseries::{describe, log_returns};
use newsvol_core::{
    AlignedPanel, DMatrix, DailySentimentSeries, Distribution, EstimationMode, GarchFit, Headline, MarketSeries,
    OlsFit, ScoreMode, ScoredHeadline, SummaryStats, TestResult,
};

use crate::config::PipelineConfig;
use crate::export::{FigureData, FigureKind};
use crate::report::{
    fmt4, render_coefficient_table, render_diagnostics_table, render_summary_table, render_vif_table,
    CoefficientTable, DiagnosticsTable, TableStyle,
};

pub const OLS_TITLE: &str = "OLS Estimates of Returns on News Sentiment and Controls";
pub const GARCH_TITLE: &str = "Coefficient Estimates from GARCH (1,1) Model";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Sentiment,
    Align,
    Ols,
    Garch,
    Diagnostics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Sentiment => "sentiment",
            Stage::Align => "align",
            Stage::Ols => "ols",
            Stage::Garch => "garch",
            Stage::Diagnostics => "diagnostics",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] newsvol_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

#[derive(Debug, thiserror::Error)]
#[error("{stage}: {failure}")]
pub struct PipelineError {
    pub stage: Stage,
    pub failure: Failure,
}

impl PipelineError {
    pub fn new(stage: Stage, failure: impl Into<Failure>) -> Self {
        Self {
            stage,
            failure: failure.into(),
        }
    }

    /// 1 for bad input, 2 for numerical failure, 3 for internal errors.
    pub fn exit_code(&self) -> u8 {
        match &self.failure {
            Failure::Core(newsvol_core::Error::NonFiniteLikelihood) => 2,
            Failure::Core(_) | Failure::Io { .. } | Failure::Input(_) => 1,
            Failure::Internal(_) => 3,
        }
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<Failure>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e))
    }
}

/// Headlines after filtering and scoring.
#[derive(Debug, Clone)]
pub struct ScoredCorpus {
    pub loaded: usize,
    pub kept: Vec<Headline>,
    pub scored: Vec<ScoredHeadline>,
    /// Headlines without classifier logits, scored by the keyword lexicon.
    pub lexicon_scored: usize,
    pub daily: DailySentimentSeries,
    pub categories: CategoryCounts,
}

pub fn load_corpus(path: &Path, keywords: &[String], mode: ScoreMode) -> Result<ScoredCorpus, PipelineError> {
    let all = load_headlines_auto(path).at(Stage::Ingest)?;
    let loaded = all.len();
    let kept = if keywords.is_empty() {
        all
    } else {
        filter_by_keywords(&all, keywords).at(Stage::Ingest)?
    };
    if kept.is_empty() {
        return Err(PipelineError::new(
            Stage::Ingest,
            Failure::Input(format!("{}: no headline matches the keywords", path.display())),
        ));
    }
    let mut lexicon_scored = 0;
    let scored = kept
        .iter()
        .map(|h| {
            let logits = h.logits.unwrap_or_else(|| {
                lexicon_scored += 1;
                let text = match &h.body {
                    Some(body) => format!("{} {body}", h.title),
                    None => h.title.clone(),
                };
                lexicon_score(&text)
            });
            ScoredHeadline::from_logits(h.date, logits, mode)
        })
        .collect::<Result<Vec<_>, _>>()
        .at(Stage::Sentiment)?;
    let daily = aggregate_daily(&scored).at(Stage::Sentiment)?;
    let categories = category_distribution(&scored);
    Ok(ScoredCorpus {
        loaded,
        kept,
        scored,
        lexicon_scored,
        daily,
        categories,
    })
}

/// Picks `value` if present, otherwise the first non-`date` column.
fn value_column(path: &Path) -> String {
    let header = csv::Reader::from_path(path).ok().and_then(|mut r| r.headers().ok().cloned());
    let Some(header) = header else {
        return "value".into();
    };
    if header.iter().any(|h| h.trim().eq_ignore_ascii_case("value")) {
        return "value".into();
    }
    header
        .iter()
        .map(str::trim)
        .find(|h| !h.eq_ignore_ascii_case("date"))
        .unwrap_or("value")
        .to_string()
}

pub fn load_market(name: &str, path: &Path) -> Result<MarketSeries, PipelineError> {
    load_market_series(path, name, "date", &value_column(path)).at(Stage::Ingest)
}

/// Price series for `returns` plus regressors, in configuration order.
pub fn load_markets(cfg: &PipelineConfig) -> Result<(MarketSeries, Vec<MarketSeries>), PipelineError> {
    if !cfg.markets.iter().any(|(n, _)| *n == cfg.returns) {
        return Err(PipelineError::new(
            Stage::Ingest,
            Failure::Input(format!("no market path for the return series `{}`", cfg.returns)),
        ));
    }
    let mut prices = None;
    let mut exog = Vec::new();
    for (name, path) in &cfg.markets {
        let series = load_market(name, path)?;
        if *name == cfg.returns {
            prices = Some(series);
        } else {
            exog.push(series);
        }
    }
    Ok((prices.expect("checked above"), exog))
}

pub fn build_panel(cfg: &PipelineConfig) -> Result<(ScoredCorpus, AlignedPanel), PipelineError> {
    let corpus = load_corpus(&cfg.headlines, &cfg.keywords, cfg.score_mode)?;
    let (prices, exog) = load_markets(cfg)?;
    let returns = log_returns(&prices).at(Stage::Align)?;
    let returns = if cfg.return_scale == 1.0 {
        returns
    } else {
        let scaled = returns.points().iter().map(|&(d, r)| (d, r * cfg.return_scale)).collect();
        MarketSeries::new(returns.name(), scaled).at(Stage::Align)?
    };
    let panel = align_panel(&returns, &corpus.daily, &exog, cfg.fill).at(Stage::Align)?;
    Ok((corpus, panel))
}

#[derive(Debug, Clone)]
pub struct OlsStage {
    pub fit: OlsFit,
    pub table: CoefficientTable,
    pub breusch_pagan: TestResult,
    pub durbin_watson: TestResult,
    pub diagnostics: DiagnosticsTable,
    /// Empty with a single regressor.
    pub vif: Vec<(String, f64)>,
}

pub fn fit_ols_stage(panel: &AlignedPanel) -> Result<OlsStage, PipelineError> {
    let names = panel.regressor_names();
    let columns = panel.regressor_columns();
    let x = design_with_intercept(&columns).at(Stage::Ols)?;
    let fit = ols_fit(panel.returns(), &x).at(Stage::Ols)?;
    let bp = breusch_pagan(&fit, &x, BpVariant::Koenker).at(Stage::Diagnostics)?;
    let dw = durbin_watson(&fit.residuals).at(Stage::Diagnostics)?;
    let vif = if columns.len() >= 2 {
        let values = vif(&x.columns(1, columns.len()).into_owned()).at(Stage::Diagnostics)?;
        names.iter().cloned().zip(values).collect()
    } else {
        Vec::new()
    };
    Ok(OlsStage {
        table: CoefficientTable::from_ols(OLS_TITLE, &fit, &names),
        diagnostics: DiagnosticsTable::from_tests(&bp, &dw),
        fit,
        breusch_pagan: bp,
        durbin_watson: dw,
        vif,
    })
}

#[derive(Debug, Clone)]
pub struct GarchStage {
    pub fit: GarchFit,
    pub table: CoefficientTable,
    pub standardized: Vec<f64>,
    /// Standardised residuals against the normal reference.
    pub qq: Vec<(f64, f64)>,
}

pub fn regressor_matrix(panel: &AlignedPanel) -> DMatrix<f64> {
    let columns = panel.regressor_columns();
    DMatrix::from_fn(panel.len(), columns.len(), |i, j| columns[j][i])
}

pub fn fit_garch_stage(
    panel: &AlignedPanel,
    dist: Distribution,
    mode: EstimationMode,
    seed: u64,
) -> Result<GarchStage, PipelineError> {
    let x = regressor_matrix(panel);
    let options = FitOptions {
        seed,
        ..FitOptions::default()
    };
    let fit = garch::fit(panel.returns(), &x, dist, mode, &options).at(Stage::Garch)?;
    let standardized = standardized_residuals(&fit, panel.returns(), &x).at(Stage::Diagnostics)?;
    let qq = qq_data(&standardized, QqReference::Normal).at(Stage::Diagnostics)?;
    Ok(GarchStage {
        table: CoefficientTable::from_garch(GARCH_TITLE, &fit, &panel.regressor_names()),
        fit,
        standardized,
        qq,
    })
}

pub fn summary_stats(panel: &AlignedPanel) -> Result<Vec<(String, SummaryStats)>, PipelineError> {
    let mut rows = vec![("Returns".to_string(), describe(panel.returns()).at(Stage::Diagnostics)?)];
    for (name, values) in panel.regressor_names().into_iter().zip(panel.regressor_columns()) {
        rows.push((name, describe(&values).at(Stage::Diagnostics)?));
    }
    Ok(rows)
}

/// Everything derived from an aligned panel.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub ols: OlsStage,
    pub garch: GarchStage,
    pub summary: Vec<(String, SummaryStats)>,
}

pub fn analyse(
    panel: &AlignedPanel,
    dist: Distribution,
    mode: EstimationMode,
    seed: u64,
) -> Result<Analysis, PipelineError> {
    Ok(Analysis {
        ols: fit_ols_stage(panel)?,
        garch: fit_garch_stage(panel, dist, mode, seed)?,
        summary: summary_stats(panel)?,
    })
}

pub fn residuals_vs_sentiment(panel: &AlignedPanel, ols: &OlsFit) -> Vec<(f64, f64)> {
    panel.sentiment().iter().copied().zip(ols.residuals.iter().copied()).collect()
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub config: PipelineConfig,
    pub corpus: ScoredCorpus,
    pub panel: AlignedPanel,
    pub analysis: Analysis,
    pub figures: FigureData,
}

impl ReportBundle {
    pub fn converged(&self) -> bool {
        self.analysis.garch.fit.converged
    }

    pub fn metadata(&self) -> String {
        let mut s = format!("{} {}\n\n[config]\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
        s.push_str(&self.config.echo());
        s.push_str(&data_section(&self.panel, Some(&self.corpus)));
        s.push_str(&garch_section(&self.analysis.garch.fit));
        s
    }

    pub fn report_markdown(&self) -> String {
        let mut s = String::from("# Sentiment and Volatility Report\n\n");
        s.push_str(&format!(
            "Headlines: {} loaded, {} kept after keyword filtering, {} scored by the fallback lexicon. \
             Sentiment score: {}. Gap filling: {}.\n\n",
            self.corpus.loaded,
            self.corpus.kept.len(),
            self.corpus.lexicon_scored,
            self.config.score_mode,
            self.config.fill
        ));
        s.push_str(&analysis_markdown(&self.panel, &self.analysis));
        s
    }
}

fn data_section(panel: &AlignedPanel, corpus: Option<&ScoredCorpus>) -> String {
    let mut s = String::from("\n[data]\n");
    let first = panel.dates().first().map_or(String::new(), NaiveDate::to_string);
    let last = panel.dates().last().map_or(String::new(), NaiveDate::to_string);
    s.push_str(&format!("first_date = {first}\nlast_date = {last}\ntrading_days = {}\n", panel.len()));
    if let Some(c) = corpus {
        s.push_str(&format!(
            "headlines_loaded = {}\nheadlines_kept = {}\nheadlines_lexicon_scored = {}\n",
            c.loaded,
            c.kept.len(),
            c.lexicon_scored
        ));
    }
    for (name, n) in panel.fill_counts() {
        s.push_str(&format!("filled.{name} = {n}\n"));
    }
    s
}

fn garch_section(fit: &GarchFit) -> String {
    format!(
        "\n[garch]\ndistribution = {}\nmode = {}\nconverged = {}\niterations = {}\nlog_likelihood = {}\nstd_errors = {}\n",
        fit.distribution,
        fit.mode,
        fit.converged,
        fit.iterations,
        fit.log_likelihood,
        if fit.std_errors.is_some() { "hessian" } else { "absent (Hessian not positive definite)" }
    )
}

pub fn analysis_markdown(panel: &AlignedPanel, a: &Analysis) -> String {
    let style = TableStyle::Markdown;
    let mut s = String::new();
    s.push_str("## Mean equation (OLS)\n\n");
    s.push_str(&render_coefficient_table(&a.ols.table, style));
    s.push_str("\n## Residual diagnostics\n\n");
    s.push_str(&render_diagnostics_table(&a.ols.diagnostics, style));
    if !a.ols.vif.is_empty() {
        s.push('\n');
        s.push_str(&render_vif_table(&a.ols.vif, style));
    }
    s.push_str("\n## GARCH(1,1)\n\n");
    s.push_str(&render_coefficient_table(&a.garch.table, style));
    let fit = &a.garch.fit;
    s.push_str(&format!(
        "\nInnovations: {}. Estimation: {}. Converged: {}. Persistence alpha1 + beta1 = {}.\n",
        match fit.distribution {
            Distribution::Normal => "normal",
            Distribution::StudentT => "Student-t",
        },
        fit.mode,
        if fit.converged { "yes" } else { "no" },
        fmt4(fit.params.persistence())
    ));
    if fit.std_errors.is_none() {
        s.push_str("Standard errors are omitted: the Hessian at the optimum is not positive definite.\n");
    }
    s.push_str("\n## Summary statistics\n\n");
    s.push_str(&render_summary_table(&a.summary, style));
    s.push_str("\n## Interpolated cells\n\n| Column | Filled |\n| :--- | ---: |\n");
    for (name, n) in panel.fill_counts() {
        s.push_str(&format!("| {name} | {n} |\n"));
    }
    s
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| {
        PipelineError::new(
            Stage::Output,
            Failure::Io {
                path: path.to_path_buf(),
                source,
            },
        )
    }
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io(parent))?;
    }
    fs::write(path, contents).map_err(io(path))
}

/// Serialises rows with a header; floats use the shortest round-trip form.
pub fn csv_string<R, I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn ols_coefficients_csv(stage: &OlsStage) -> String {
    let fit = &stage.fit;
    let rows = stage.table.rows.iter().enumerate().map(|(i, r)| {
        vec![
            r.variable.clone(),
            fit.coefficients[i].to_string(),
            fit.std_errors[i].to_string(),
            fit.t_values[i].to_string(),
            fit.p_values[i].to_string(),
        ]
    });
    csv_string(&["variable", "coefficient", "std_error", "t_value", "p_value"], rows)
}

pub fn garch_coefficients_csv(stage: &GarchStage) -> String {
    let rows = stage.table.rows.iter().chain(&stage.table.variance_rows).map(|r| {
        vec![r.variable.clone(), opt(r.coefficient), opt(r.std_error), opt(r.p_value)]
    });
    csv_string(&["variable", "coefficient", "std_error", "p_value"], rows)
}

pub fn diagnostics_csv(stage: &OlsStage) -> String {
    let rows = [&stage.breusch_pagan, &stage.durbin_watson].map(|t| {
        vec![
            t.name.to_string(),
            t.statistic.to_string(),
            opt(t.p_value),
            t.degrees_of_freedom.map_or_else(String::new, |d| d.to_string()),
            t.approximate.to_string(),
        ]
    });
    csv_string(&["test", "statistic", "p_value", "df", "approximate"], rows)
}

pub fn vif_csv(stage: &OlsStage) -> String {
    csv_string(&["variable", "vif"], stage.vif.iter().map(|(n, v)| vec![n.clone(), v.to_string()]))
}

pub fn summary_csv(rows: &[(String, SummaryStats)]) -> String {
    let header = ["variable", "count", "mean", "std_dev", "min", "max", "skewness", "excess_kurtosis"];
    csv_string(
        &header,
        rows.iter().map(|(n, s)| {
            vec![
                n.clone(),
                s.count.to_string(),
                s.mean.to_string(),
                s.std_dev.to_string(),
                s.min.to_string(),
                s.max.to_string(),
                s.skewness.to_string(),
                s.excess_kurtosis.to_string(),
            ]
        }),
    )
}

pub fn fill_counts_csv(panel: &AlignedPanel) -> String {
    csv_string(
        &["column", "filled"],
        panel.fill_counts().iter().map(|(n, c)| vec![n.clone(), c.to_string()]),
    )
}

pub fn variance_path_csv(panel: &AlignedPanel, stage: &GarchStage) -> String {
    let rows = panel
        .dates()
        .iter()
        .zip(&stage.fit.variance_path)
        .zip(&stage.standardized)
        .map(|((d, s2), z)| vec![d.to_string(), s2.to_string(), z.to_string()]);
    csv_string(&["date", "sigma2", "standardized_residual"], rows)
}

pub fn panel_csv(panel: &AlignedPanel) -> Result<String, PipelineError> {
    let mut buf = Vec::new();
    panel
        .write_csv(&mut buf)
        .map_err(|e| PipelineError::new(Stage::Output, Failure::Internal(e.to_string())))?;
    String::from_utf8(buf).map_err(|e| PipelineError::new(Stage::Output, Failure::Internal(e.to_string())))
}

/// Writes the analysis files shared by `run` and `report`.
pub fn write_analysis(dir: &Path, panel: &AlignedPanel, a: &Analysis) -> Result<(), PipelineError> {
    write_file(&dir.join("ols_coefficients.csv"), ols_coefficients_csv(&a.ols))?;
    write_file(&dir.join("garch_coefficients.csv"), garch_coefficients_csv(&a.garch))?;
    write_file(&dir.join("diagnostics.csv"), diagnostics_csv(&a.ols))?;
    write_file(&dir.join("vif.csv"), vif_csv(&a.ols))?;
    write_file(&dir.join("summary_stats.csv"), summary_csv(&a.summary))?;
    write_file(&dir.join("fill_counts.csv"), fill_counts_csv(panel))?;
    write_file(&dir.join("variance_path.csv"), variance_path_csv(panel, &a.garch))?;
    write_file(&dir.join("panel.csv"), panel_csv(panel)?)?;
    Ok(())
}

/// Runs every stage and writes all outputs under `cfg.out_dir`. A fit that
/// fails to converge still produces outputs; callers inspect
/// [`ReportBundle::converged`].
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<ReportBundle, PipelineError> {
    let (corpus, panel) = build_panel(cfg)?;
    let analysis = analyse(&panel, cfg.distribution, cfg.mode, cfg.seed)?;
    let figures = FigureData {
        items_per_day: Some(corpus.daily.points.iter().map(|p| (p.date, p.count)).collect()),
        daily_sentiment: Some(corpus.daily.points.iter().map(|p| (p.date, p.mean_score)).collect()),
        categories: Some(corpus.categories),
        residuals_vs_sentiment: Some(residuals_vs_sentiment(&panel, &analysis.ols.fit)),
        qq: Some(analysis.garch.qq.clone()),
    };
    let bundle = ReportBundle {
        config: cfg.clone(),
        corpus,
        panel,
        analysis,
        figures,
    };
    let dir = &cfg.out_dir;
    write_analysis(dir, &bundle.panel, &bundle.analysis)?;
    for kind in FigureKind::ALL {
        crate::export::export_figure_data(&bundle.figures, kind, &dir.join("figures"))
            .map_err(|e| PipelineError::new(Stage::Output, Failure::Internal(e.to_string())))?;
    }
    write_file(&dir.join("report.md"), bundle.report_markdown())?;
    write_file(&dir.join("metadata.txt"), bundle.metadata())?;
    Ok(bundle)
}

/// Metadata for runs that start from a saved panel.
pub fn panel_metadata(source: &Path, panel: &AlignedPanel, fit: &GarchFit, seed: u64) -> String {
    let mut s = format!(
        "{} {}\n\n[config]\npanel = {}\nseed = {seed}\n",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        source.display()
    );
    s.push_str(&data_section(panel, None));
    s.push_str(&garch_section(fit));
    s
}
