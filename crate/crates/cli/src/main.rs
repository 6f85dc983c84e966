use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use newsvol_core::garch::simulate;
use newsvol_core::{AlignedPanel, Distribution, EstimationMode, FillMode, GarchParams, ScoreMode};
use newsvol_cli::config::{parse_keywords, parse_market_arg, ConfigError, ConfigLayer, PipelineConfig};
use newsvol_cli::export::{export_figure_data, FigureData, FigureKind};
use newsvol_cli::pipeline::{
    self, analyse, analysis_markdown, csv_string, diagnostics_csv, fill_counts_csv, fit_garch_stage, fit_ols_stage,
    garch_coefficients_csv, load_corpus, ols_coefficients_csv, panel_csv, panel_metadata, residuals_vs_sentiment,
    variance_path_csv, vif_csv, write_analysis, write_file, PipelineError,
};
use newsvol_cli::report::{render_coefficient_table, render_diagnostics_table, render_vif_table, TableStyle};

#[derive(Parser, Debug)]
#[command(name = "newsvol", version, about = "News sentiment and GARCH volatility pipeline")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Flat key = value configuration file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Headline file (.csv or .jsonl).
    #[arg(long, global = true, value_name = "PATH")]
    headlines: Option<PathBuf>,
    /// Market series as NAME=PATH; repeatable.
    #[arg(long, global = true, value_name = "NAME=PATH", value_parser = parse_market_arg)]
    market: Vec<(String, PathBuf)>,
    /// Market series whose log returns are modelled.
    #[arg(long, global = true, value_name = "NAME")]
    returns: Option<String>,
    /// Comma-separated keywords; headlines must match one.
    #[arg(long, global = true, value_name = "LIST")]
    keywords: Option<String>,
    #[arg(long, global = true, value_name = "prob-diff|logit-diff")]
    score_mode: Option<ScoreMode>,
    #[arg(long, global = true, value_name = "spline|drop")]
    fill: Option<FillMode>,
    #[arg(long, global = true, value_name = "normal|t")]
    dist: Option<Distribution>,
    #[arg(long, global = true, value_name = "joint|two-step")]
    mode: Option<EstimationMode>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Multiplier for log returns, e.g. 100 for percent.
    #[arg(long, global = true, value_name = "X")]
    return_scale: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load, filter and score headlines, align with market data; writes panel.csv.
    Ingest,
    /// Score headlines; writes per-headline scores and daily sentiment.
    Score,
    /// OLS of returns on the panel regressors.
    FitOls(PanelArg),
    /// GARCH(1,1) fit on a panel.
    FitGarch(PanelArg),
    /// Breusch-Pagan, Durbin-Watson, VIF and residual Q-Q data.
    Diagnose(PanelArg),
    /// Simulate a GARCH(1,1) path.
    Simulate(SimulateArgs),
    /// All tables and analysis files from a saved panel.
    Report(PanelArg),
    /// Full pipeline from headlines and market files.
    Run,
}

#[derive(Args, Debug)]
struct PanelArg {
    /// Panel CSV written by `ingest` (date,returns,Sentiment,...).
    #[arg(long, value_name = "PATH")]
    panel: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.8)]
    beta1: f64,
    #[arg(long, default_value_t = 8.0)]
    nu: f64,
    #[arg(long, default_value_t = 1000)]
    len: usize,
}

enum Failure {
    Config(ConfigError),
    Pipeline(PipelineError),
    NotConverged,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

impl From<newsvol_cli::export::ExportError> for Failure {
    fn from(e: newsvol_cli::export::ExportError) -> Self {
        match e {
            newsvol_cli::export::ExportError::Write(p) => Failure::Pipeline(p),
            other => Failure::Pipeline(PipelineError::new(
                pipeline::Stage::Output,
                pipeline::Failure::Internal(other.to_string()),
            )),
        }
    }
}

impl Common {
    fn layer(&self) -> Result<ConfigLayer, ConfigError> {
        let file = match &self.config {
            Some(path) => ConfigLayer::from_file(path)?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            headlines: self.headlines.clone(),
            markets: self.market.clone(),
            returns: self.returns.clone(),
            keywords: self.keywords.as_deref().map(parse_keywords),
            score_mode: self.score_mode,
            fill: self.fill,
            distribution: self.dist,
            mode: self.mode,
            out_dir: self.out.clone(),
            seed: self.seed,
            return_scale: self.return_scale,
        };
        Ok(file.merge(flags))
    }

    fn pipeline_config(&self) -> Result<PipelineConfig, ConfigError> {
        self.layer()?.finish()
    }
}

/// Model settings for commands that start from a panel.
struct ModelSettings {
    dist: Distribution,
    mode: EstimationMode,
    seed: u64,
    out: PathBuf,
}

fn model_settings(common: &Common) -> Result<ModelSettings, ConfigError> {
    let layer = common.layer()?;
    Ok(ModelSettings {
        dist: layer.distribution.unwrap_or_default(),
        mode: layer.mode.unwrap_or_default(),
        seed: layer.seed.unwrap_or(0),
        out: layer.out_dir.unwrap_or_else(|| PathBuf::from("out")),
    })
}

fn read_panel(path: &Path) -> Result<AlignedPanel, PipelineError> {
    AlignedPanel::read_csv(path).map_err(|e| PipelineError::new(pipeline::Stage::Ingest, e))
}

fn check_converged(converged: bool) -> Result<(), Failure> {
    if converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let common = &cli.common;
    match cli.command {
        Command::Run => {
            let cfg = common.pipeline_config()?;
            let bundle = pipeline::run_pipeline(&cfg)?;
            print!("{}", render_coefficient_table(&bundle.analysis.garch.table, TableStyle::Plain));
            println!("outputs written to {}", cfg.out_dir.display());
            check_converged(bundle.converged())
        }
        Command::Ingest => {
            let cfg = common.pipeline_config()?;
            let (corpus, panel) = pipeline::build_panel(&cfg)?;
            write_file(&cfg.out_dir.join("panel.csv"), panel_csv(&panel)?)?;
            write_file(&cfg.out_dir.join("fill_counts.csv"), fill_counts_csv(&panel))?;
            let figures = FigureData {
                items_per_day: Some(corpus.daily.points.iter().map(|p| (p.date, p.count)).collect()),
                ..Default::default()
            };
            export_figure_data(&figures, FigureKind::ItemsPerDay, &cfg.out_dir.join("figures"))?;
            println!(
                "{} of {} headlines kept; panel of {} trading days written to {}",
                corpus.kept.len(),
                corpus.loaded,
                panel.len(),
                cfg.out_dir.join("panel.csv").display()
            );
            Ok(())
        }
        Command::Score => {
            let layer = common.layer()?;
            let cfg = layer.finish()?;
            let corpus = load_corpus(&cfg.headlines, &cfg.keywords, cfg.score_mode)?;
            let rows = corpus.kept.iter().zip(&corpus.scored).map(|(h, s)| {
                vec![
                    h.date.to_string(),
                    h.source.clone(),
                    h.title.clone(),
                    s.label.to_string(),
                    s.probs[0].to_string(),
                    s.probs[1].to_string(),
                    s.probs[2].to_string(),
                    s.score.to_string(),
                ]
            });
            let header = ["date", "source", "title", "label", "p_positive", "p_negative", "p_neutral", "score"];
            write_file(&cfg.out_dir.join("scored_headlines.csv"), csv_string(&header, rows))?;
            let figures = FigureData {
                items_per_day: Some(corpus.daily.points.iter().map(|p| (p.date, p.count)).collect()),
                daily_sentiment: Some(corpus.daily.points.iter().map(|p| (p.date, p.mean_score)).collect()),
                categories: Some(corpus.categories),
                ..Default::default()
            };
            for kind in [FigureKind::ItemsPerDay, FigureKind::DailySentiment, FigureKind::CategoryDistribution] {
                export_figure_data(&figures, kind, &cfg.out_dir.join("figures"))?;
            }
            println!(
                "scored {} headlines ({} by the fallback lexicon) over {} days",
                corpus.scored.len(),
                corpus.lexicon_scored,
                corpus.daily.len()
            );
            Ok(())
        }
        Command::FitOls(p) => {
            let settings = model_settings(common)?;
            let panel = read_panel(&p.panel)?;
            let ols = fit_ols_stage(&panel)?;
            write_file(&settings.out.join("ols_coefficients.csv"), ols_coefficients_csv(&ols))?;
            print!("{}", render_coefficient_table(&ols.table, TableStyle::Plain));
            Ok(())
        }
        Command::FitGarch(p) => {
            let s = model_settings(common)?;
            let panel = read_panel(&p.panel)?;
            let garch = fit_garch_stage(&panel, s.dist, s.mode, s.seed)?;
            write_file(&s.out.join("garch_coefficients.csv"), garch_coefficients_csv(&garch))?;
            write_file(&s.out.join("variance_path.csv"), variance_path_csv(&panel, &garch))?;
            print!("{}", render_coefficient_table(&garch.table, TableStyle::Plain));
            check_converged(garch.fit.converged)
        }
        Command::Diagnose(p) => {
            let s = model_settings(common)?;
            let panel = read_panel(&p.panel)?;
            let ols = fit_ols_stage(&panel)?;
            let garch = fit_garch_stage(&panel, s.dist, s.mode, s.seed)?;
            write_file(&s.out.join("diagnostics.csv"), diagnostics_csv(&ols))?;
            write_file(&s.out.join("vif.csv"), vif_csv(&ols))?;
            let figures = FigureData {
                residuals_vs_sentiment: Some(residuals_vs_sentiment(&panel, &ols.fit)),
                qq: Some(garch.qq.clone()),
                ..Default::default()
            };
            for kind in [FigureKind::ResidualsVsSentiment, FigureKind::Qq] {
                export_figure_data(&figures, kind, &s.out.join("figures"))?;
            }
            print!("{}", render_diagnostics_table(&ols.diagnostics, TableStyle::Plain));
            if !ols.vif.is_empty() {
                print!("{}", render_vif_table(&ols.vif, TableStyle::Plain));
            }
            check_converged(garch.fit.converged)
        }
        Command::Simulate(a) => {
            let s = model_settings(common)?;
            let mut params = GarchParams::new(a.mu, a.alpha0, a.alpha1, a.beta1);
            if s.dist == Distribution::StudentT {
                params = params.with_nu(a.nu);
            }
            let (y, sigma2) = simulate(&params, None, a.len, s.seed, s.dist)
                .map_err(|e| PipelineError::new(pipeline::Stage::Garch, e))?;
            let rows = y
                .iter()
                .zip(&sigma2)
                .enumerate()
                .map(|(t, (y, s2))| vec![(t + 1).to_string(), y.to_string(), s2.to_string()]);
            let path = s.out.join("simulated.csv");
            write_file(&path, csv_string(&["t", "y", "sigma2"], rows))?;
            println!("{} observations written to {}", y.len(), path.display());
            Ok(())
        }
        Command::Report(p) => {
            let s = model_settings(common)?;
            let panel = read_panel(&p.panel)?;
            let analysis = analyse(&panel, s.dist, s.mode, s.seed)?;
            write_analysis(&s.out, &panel, &analysis)?;
            let figures = FigureData {
                residuals_vs_sentiment: Some(residuals_vs_sentiment(&panel, &analysis.ols.fit)),
                qq: Some(analysis.garch.qq.clone()),
                ..Default::default()
            };
            for kind in [FigureKind::ResidualsVsSentiment, FigureKind::Qq] {
                export_figure_data(&figures, kind, &s.out.join("figures"))?;
            }
            let report = format!("# Sentiment and Volatility Report\n\n{}", analysis_markdown(&panel, &analysis));
            write_file(&s.out.join("report.md"), report)?;
            write_file(
                &s.out.join("metadata.txt"),
                panel_metadata(&p.panel, &panel, &analysis.garch.fit, s.seed),
            )?;
            print!("{}", render_coefficient_table(&analysis.garch.table, TableStyle::Plain));
            check_converged(analysis.garch.fit.converged)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| execute(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Config(e))) => {
            eprintln!("error: config: {e}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Pipeline(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Ok(Err(Failure::NotConverged)) => {
            eprintln!("error: garch: optimizer did not converge; best point written");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(3),
    }
}
