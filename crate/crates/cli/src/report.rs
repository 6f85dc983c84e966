//! Plain-text and markdown rendering of coefficient, diagnostic, VIF and
//! summary tables. Every number is shown with four decimals; cells that
//! are missing or non-finite render as an em-dash.

use std::fmt::Write as _;

use newsvol_core::garch::wald_p_values;
use newsvol_core::regress::TestName;
use newsvol_core::{Distribution, GarchFit, OlsFit, SummaryStats, TestResult};

pub const ABSENT: &str = "—";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableStyle {
    #[default]
    Plain,
    Markdown,
}

/// Formats `v` with four decimals; negative zero and values that round to
/// zero print as `0.0000`.
pub fn fmt4(v: f64) -> String {
    if !v.is_finite() {
        return ABSENT.to_string();
    }
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| ABSENT.to_string(), fmt4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub variable: String,
    pub coefficient: Option<f64>,
    pub std_error: Option<f64>,
    pub p_value: Option<f64>,
}

impl CoefficientRow {
    pub fn new(variable: impl Into<String>, coefficient: f64, std_error: f64, p_value: f64) -> Self {
        Self {
            variable: variable.into(),
            coefficient: Some(coefficient),
            std_error: Some(std_error),
            p_value: Some(p_value),
        }
    }

    fn cells(&self) -> [String; 4] {
        [
            self.variable.clone(),
            fmt_opt(self.coefficient),
            fmt_opt(self.std_error),
            fmt_opt(self.p_value),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FooterValue {
    Count(usize),
    Number(Option<f64>),
}

impl FooterValue {
    fn render(&self) -> String {
        match self {
            FooterValue::Count(n) => n.to_string(),
            FooterValue::Number(v) => fmt_opt(*v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub title: String,
    /// Mean-equation rows, intercept first.
    pub rows: Vec<CoefficientRow>,
    /// Variance-equation rows; empty for OLS.
    pub variance_rows: Vec<CoefficientRow>,
    pub footer: Vec<(String, FooterValue)>,
}

const COEF_HEADER: [&str; 4] = ["Variable", "Coefficient", "Std Error", "p-value"];

/// Display name for a regressor column.
pub fn display_name(column: &str) -> String {
    if column == newsvol_core::ingest::SENTIMENT_COLUMN {
        "Sentiment Score".to_string()
    } else {
        column.to_string()
    }
}

impl CoefficientTable {
    pub fn from_ols(title: impl Into<String>, fit: &OlsFit, regressors: &[String]) -> Self {
        let names = std::iter::once("Constant".to_string()).chain(regressors.iter().map(|r| display_name(r)));
        let rows = names
            .zip(&fit.coefficients)
            .zip(fit.std_errors.iter().zip(&fit.p_values))
            .map(|((name, &b), (&se, &p))| CoefficientRow::new(name, b, se, p))
            .collect();
        Self {
            title: title.into(),
            rows,
            variance_rows: Vec::new(),
            footer: vec![
                ("Observations".into(), FooterValue::Count(fit.n_obs)),
                ("Adjusted R²".into(), FooterValue::Number(Some(fit.adj_r2))),
                ("F-statistic".into(), FooterValue::Number(fit.f_statistic)),
                ("p-value".into(), FooterValue::Number(fit.f_p_value)),
            ],
        }
    }

    /// Mean-equation rows first, then the variance equation. Fit statistics
    /// of the mean equation appear only for two-step fits, where they are
    /// the OLS values of the first step.
    pub fn from_garch(title: impl Into<String>, fit: &GarchFit, regressors: &[String]) -> Self {
        let values = fit.params.to_vec(fit.distribution);
        let p_values = fit.std_errors.as_ref().map(|se| wald_p_values(&values, se));
        let mut names: Vec<String> = std::iter::once("Constant".to_string())
            .chain(regressors.iter().map(|r| display_name(r)))
            .collect();
        names.extend(["alpha0", "alpha1", "beta1"].map(String::from));
        if fit.distribution == Distribution::StudentT {
            names.push("nu".into());
        }
        let mut all: Vec<CoefficientRow> = names
            .into_iter()
            .enumerate()
            .map(|(i, variable)| CoefficientRow {
                variable,
                coefficient: Some(values[i]),
                std_error: fit.std_errors.as_ref().map(|se| se[i]),
                p_value: p_values.as_ref().map(|p| p[i]),
            })
            .collect();
        let variance_rows = all.split_off(regressors.len() + 1);
        let mut footer = vec![
            ("Observations".to_string(), FooterValue::Count(fit.n_obs)),
            ("Log-likelihood".to_string(), FooterValue::Number(Some(fit.log_likelihood))),
        ];
        if let Some(m) = &fit.mean_equation {
            footer.push(("Adjusted R² (mean equation, OLS step)".into(), FooterValue::Number(Some(m.adj_r2))));
            footer.push(("F-statistic (mean equation, OLS step)".into(), FooterValue::Number(m.f_statistic)));
            footer.push(("p-value (mean equation, OLS step)".into(), FooterValue::Number(m.f_p_value)));
        }
        Self {
            title: title.into(),
            rows: all,
            variance_rows,
            footer,
        }
    }
}

pub fn render_coefficient_table(table: &CoefficientTable, style: TableStyle) -> String {
    let body: Vec<[String; 4]> = table.rows.iter().map(CoefficientRow::cells).collect();
    let variance: Vec<[String; 4]> = table.variance_rows.iter().map(CoefficientRow::cells).collect();
    let footer: Vec<[String; 4]> = table
        .footer
        .iter()
        .map(|(k, v)| [k.clone(), v.render(), String::new(), String::new()])
        .collect();
    let mut sections = vec![body];
    if !variance.is_empty() {
        sections.push(variance);
    }
    sections.push(footer);
    render_grid(&table.title, &COEF_HEADER, &sections, style)
}

/// Breusch-Pagan and Durbin-Watson results as three rows: BP statistic,
/// its degrees of freedom, and the DW statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsTable {
    pub bp_statistic: f64,
    pub bp_p_value: Option<f64>,
    pub bp_df: usize,
    pub dw_statistic: f64,
    pub dw_p_value: Option<f64>,
    pub dw_approximate: bool,
}

impl DiagnosticsTable {
    pub fn from_tests(bp: &TestResult, dw: &TestResult) -> Self {
        debug_assert_eq!(bp.name, TestName::BreuschPagan);
        debug_assert_eq!(dw.name, TestName::DurbinWatson);
        Self {
            bp_statistic: bp.statistic,
            bp_p_value: bp.p_value,
            bp_df: bp.degrees_of_freedom.unwrap_or(0),
            dw_statistic: dw.statistic,
            dw_p_value: dw.p_value,
            dw_approximate: dw.approximate,
        }
    }

    pub fn rows(&self) -> Vec<[String; 3]> {
        vec![
            ["BP Statistic".into(), fmt4(self.bp_statistic), fmt_opt(self.bp_p_value)],
            ["Degrees of Freedom".into(), self.bp_df.to_string(), ABSENT.into()],
            ["DW Statistic".into(), fmt4(self.dw_statistic), fmt_opt(self.dw_p_value)],
        ]
    }
}

pub fn render_diagnostics_table(table: &DiagnosticsTable, style: TableStyle) -> String {
    let rows = table.rows().into_iter().map(|[a, b, c]| [a, b, c, String::new()]).collect();
    let mut out = render_grid(
        "Heteroscedasticity and Autocorrelation Tests",
        &["Statistic", "Value", "p-value", ""],
        &[rows],
        style,
    );
    if table.dw_approximate {
        out.push_str(match style {
            TableStyle::Plain => "DW p-value: normal approximation N(2, 4/n).\n",
            TableStyle::Markdown => "\n_DW p-value: normal approximation N(2, 4/n)._\n",
        });
    }
    out
}

pub fn render_vif_table(rows: &[(String, f64)], style: TableStyle) -> String {
    let rows = rows
        .iter()
        .map(|(name, v)| [display_name(name), fmt4(*v), String::new(), String::new()])
        .collect();
    render_grid("Variance Inflation Factors", &["Variable", "VIF", "", ""], &[rows], style)
}

pub fn render_summary_table(rows: &[(String, SummaryStats)], style: TableStyle) -> String {
    let header = ["Variable", "N", "Mean", "Std Dev", "Min", "Max", "Skewness", "Kurtosis"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, s)| {
            vec![
                display_name(name),
                s.count.to_string(),
                fmt4(s.mean),
                fmt4(s.std_dev),
                fmt4(s.min),
                fmt4(s.max),
                fmt4(s.skewness),
                fmt4(s.excess_kurtosis),
            ]
        })
        .collect();
    render_wide("Summary Statistics", &header, &[cells], style)
}

fn render_grid(title: &str, header: &[&str; 4], sections: &[Vec<[String; 4]>], style: TableStyle) -> String {
    let used = (0..4)
        .filter(|&c| !header[c].is_empty() || sections.iter().flatten().any(|r| !r[c].is_empty()))
        .count();
    let header: Vec<&str> = header[..used].to_vec();
    let sections: Vec<Vec<Vec<String>>> = sections
        .iter()
        .map(|s| s.iter().map(|r| r[..used].to_vec()).collect())
        .collect();
    render_wide(title, &header, &sections, style)
}

fn render_wide(title: &str, header: &[&str], sections: &[Vec<Vec<String>>], style: TableStyle) -> String {
    let cols = header.len();
    let width = |c: usize| {
        sections
            .iter()
            .flatten()
            .map(|r| r[c].chars().count())
            .chain(std::iter::once(header[c].chars().count()))
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..cols).map(width).collect();
    let mut out = String::new();
    match style {
        TableStyle::Plain => {
            let total = widths.iter().sum::<usize>() + 2 * (cols - 1);
            let line = |cells: &[String]| {
                let mut s = String::new();
                for (c, cell) in cells.iter().enumerate() {
                    let pad = widths[c] - cell.chars().count();
                    if c == 0 {
                        s.push_str(cell);
                        s.push_str(&" ".repeat(pad));
                    } else {
                        s.push_str("  ");
                        s.push_str(&" ".repeat(pad));
                        s.push_str(cell);
                    }
                }
                s.trim_end().to_string()
            };
            let rule = "-".repeat(total);
            let _ = writeln!(out, "{title}");
            let _ = writeln!(out, "{rule}");
            let _ = writeln!(out, "{}", line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>()));
            for section in sections {
                let _ = writeln!(out, "{rule}");
                for row in section {
                    let _ = writeln!(out, "{}", line(row));
                }
            }
            let _ = writeln!(out, "{rule}");
        }
        TableStyle::Markdown => {
            let _ = writeln!(out, "**{title}**");
            let _ = writeln!(out);
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let align: Vec<&str> = (0..cols).map(|c| if c == 0 { ":---" } else { "---:" }).collect();
            let _ = writeln!(out, "| {} |", align.join(" | "));
            for (i, section) in sections.iter().enumerate() {
                let footer = i + 1 == sections.len() && sections.len() > 1;
                for row in section {
                    let cells: Vec<String> = row
                        .iter()
                        .enumerate()
                        .map(|(c, v)| if footer && c == 0 { format!("*{v}*") } else { v.clone() })
                        .collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | ").trim_end());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squash(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn four_decimals() {
        assert_eq!(fmt4(-0.22751), "-0.2275");
        assert_eq!(fmt4(-0.00001), "0.0000");
        assert_eq!(fmt4(15.213), "15.2130");
        assert_eq!(fmt4(f64::INFINITY), ABSENT);
    }

    #[test]
    fn absent_std_error_renders_dash() {
        let table = CoefficientTable {
            title: "t".into(),
            rows: vec![CoefficientRow {
                variable: "Sentiment Score".into(),
                coefficient: Some(-0.2275),
                std_error: None,
                p_value: None,
            }],
            variance_rows: vec![],
            footer: vec![],
        };
        let text = render_coefficient_table(&table, TableStyle::Plain);
        assert!(squash(&text).contains("Sentiment Score -0.2275 — —"));
    }

    #[test]
    fn row_layout() {
        let table = CoefficientTable {
            title: "t".into(),
            rows: vec![CoefficientRow::new("Sentiment Score", -0.2275, 0.0703, 0.0016)],
            variance_rows: vec![],
            footer: vec![("Observations".into(), FooterValue::Count(105))],
        };
        for style in [TableStyle::Plain, TableStyle::Markdown] {
            let text = render_coefficient_table(&table, style);
            let row = text.lines().find(|l| l.contains("Sentiment")).unwrap();
            assert_eq!(squash(&row.replace('|', " ")), "Sentiment Score -0.2275 0.0703 0.0016");
        }
    }

    #[test]
    fn diagnostics_has_three_rows() {
        let t = DiagnosticsTable {
            bp_statistic: 15.213,
            bp_p_value: Some(0.0095),
            bp_df: 5,
            dw_statistic: 1.6433,
            dw_p_value: Some(0.0164),
            dw_approximate: false,
        };
        assert_eq!(t.rows().len(), 3);
        assert_eq!(t.rows()[1][2], ABSENT);
    }
}
