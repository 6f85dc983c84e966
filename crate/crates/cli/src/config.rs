//! Pipeline configuration: a flat `key = value` file merged with command
//! line overrides.
//!
//! ```text
//! headlines = headlines.csv
//! market.SP500 = sp500.csv
//! market.VIX = vix.csv
//! returns = SP500
//! keywords = ukraine, russia
//! score_mode = prob-diff
//! fill = spline
//! dist = t
//! mode = joint
//! out = out
//! seed = 0
//! return_scale = 100
//! ```
//!
//! Relative paths in a file resolve against the file's directory. Market
//! series keep the order in which they first appear; the series named by
//! `returns` supplies prices, every other one becomes a regressor.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use newsvol_core::{Distribution, EstimationMode, FillMode, ScoreMode};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Syntax {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("invalid value for `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub headlines: PathBuf,
    /// Named market series in declaration order.
    pub markets: Vec<(String, PathBuf)>,
    /// Market series whose log returns are the dependent variable.
    pub returns: String,
    pub keywords: Vec<String>,
    pub score_mode: ScoreMode,
    pub fill: FillMode,
    pub distribution: Distribution,
    pub mode: EstimationMode,
    pub out_dir: PathBuf,
    /// Base seed; multi-start `i` draws from stream `seed + i`.
    pub seed: u64,
    /// Multiplier applied to log returns (100 gives percent).
    pub return_scale: f64,
}

pub const DEFAULT_RETURNS: &str = "SP500";

/// Unvalidated settings; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub headlines: Option<PathBuf>,
    pub markets: Vec<(String, PathBuf)>,
    pub returns: Option<String>,
    pub keywords: Option<Vec<String>>,
    pub score_mode: Option<ScoreMode>,
    pub fill: Option<FillMode>,
    pub distribution: Option<Distribution>,
    pub mode: Option<EstimationMode>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub return_scale: Option<f64>,
}

fn parse<T: FromStr<Err = String>>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|reason| ConfigError::Value {
        key: key.to_string(),
        reason,
    })
}

pub fn parse_keywords(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|k| !k.is_empty()).map(String::from).collect()
}

/// Parses `NAME=PATH`.
pub fn parse_market_arg(arg: &str) -> Result<(String, PathBuf), String> {
    match arg.split_once('=') {
        Some((name, path)) if !name.trim().is_empty() && !path.trim().is_empty() => {
            Ok((name.trim().to_string(), PathBuf::from(path.trim())))
        }
        _ => Err(format!("expected NAME=PATH, got `{arg}`")),
    }
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).map_err(|(line, reason)| ConfigError::Syntax {
            path: path.to_path_buf(),
            line,
            reason,
        })
    }

    /// Parses file contents; paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, (usize, String)> {
        let mut layer = ConfigLayer::default();
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_absolute() { p } else { base.join(p) }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or((i + 1, format!("expected key = value, got `{line}`")))?;
            let err = |e: ConfigError| (i + 1, e.to_string());
            match key {
                "headlines" => layer.headlines = Some(resolve(value)),
                "returns" => layer.returns = Some(value.to_string()),
                "keywords" => layer.keywords = Some(parse_keywords(value)),
                "score_mode" => layer.score_mode = Some(parse(key, value).map_err(err)?),
                "fill" => layer.fill = Some(parse(key, value).map_err(err)?),
                "dist" => layer.distribution = Some(parse(key, value).map_err(err)?),
                "mode" => layer.mode = Some(parse(key, value).map_err(err)?),
                "out" => layer.out_dir = Some(resolve(value)),
                "seed" => {
                    layer.seed = Some(value.parse().map_err(|_| (i + 1, format!("seed must be an integer, got `{value}`")))?)
                }
                "return_scale" => {
                    let v: f64 = value
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite() && *v > 0.0)
                        .ok_or((i + 1, format!("return_scale must be a positive number, got `{value}`")))?;
                    layer.return_scale = Some(v)
                }
                k if k.starts_with("market.") && k.len() > "market.".len() => {
                    layer.set_market(k["market.".len()..].to_string(), resolve(value));
                }
                other => return Err((i + 1, format!("unknown key `{other}`"))),
            }
        }
        Ok(layer)
    }

    fn set_market(&mut self, name: String, path: PathBuf) {
        match self.markets.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = path,
            None => self.markets.push((name, path)),
        }
    }

    /// `other` wins wherever it has a value; markets merge by name.
    pub fn merge(mut self, other: ConfigLayer) -> Self {
        for (name, path) in other.markets {
            self.set_market(name, path);
        }
        Self {
            headlines: other.headlines.or(self.headlines),
            markets: self.markets,
            returns: other.returns.or(self.returns),
            keywords: other.keywords.or(self.keywords),
            score_mode: other.score_mode.or(self.score_mode),
            fill: other.fill.or(self.fill),
            distribution: other.distribution.or(self.distribution),
            mode: other.mode.or(self.mode),
            out_dir: other.out_dir.or(self.out_dir),
            seed: other.seed.or(self.seed),
            return_scale: other.return_scale.or(self.return_scale),
        }
    }

    pub fn finish(self) -> Result<PipelineConfig, ConfigError> {
        let headlines = self.headlines.ok_or(ConfigError::Missing("headlines"))?;
        if headlines.as_os_str().is_empty() {
            return Err(ConfigError::Missing("headlines"));
        }
        Ok(PipelineConfig {
            headlines,
            markets: self.markets,
            returns: self.returns.unwrap_or_else(|| DEFAULT_RETURNS.to_string()),
            keywords: self.keywords.unwrap_or_default(),
            score_mode: self.score_mode.unwrap_or_default(),
            fill: self.fill.unwrap_or_default(),
            distribution: self.distribution.unwrap_or_default(),
            mode: self.mode.unwrap_or_default(),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.unwrap_or(0),
            return_scale: self.return_scale.unwrap_or(1.0),
        })
    }
}

impl PipelineConfig {
    /// The configuration in file syntax, one key per line, absolute paths
    /// as resolved. Reading it back reproduces the same config.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "headlines = {}", self.headlines.display());
        for (name, path) in &self.markets {
            let _ = writeln!(s, "market.{name} = {}", path.display());
        }
        let _ = writeln!(s, "returns = {}", self.returns);
        let _ = writeln!(s, "keywords = {}", self.keywords.join(", "));
        let _ = writeln!(s, "score_mode = {}", self.score_mode);
        let _ = writeln!(s, "fill = {}", self.fill);
        let _ = writeln!(s, "dist = {}", self.distribution);
        let _ = writeln!(s, "mode = {}", self.mode);
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "return_scale = {}", self.return_scale);
        s
    }

    /// Regressor series names in declaration order.
    pub fn exog_names(&self) -> Vec<String> {
        self.markets
            .iter()
            .filter(|(n, _)| *n != self.returns)
            .map(|(n, _)| n.clone())
            .collect()
    }
}
