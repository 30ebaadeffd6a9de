//! Text, Markdown, CSV and SVG renderings of fits, valuations and premiums.
//!
//! Renderers are pure: they return the document as a `String` and never
//! touch the filesystem, so a failed render leaves no partial output behind.

pub mod number;
pub mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::ClubRecord;
use crate::regression::RegressionFit;
use crate::selection::{SelectionMethod, SelectionReport, SelectionStatus, StepAction};
use crate::valuation::{Aggregates, PremiumSummary, RatioAggregation, ValuationResult};

pub use number::{fixed, scientific, thousands};
pub use svg::{axis_coordinate, emit_scatter, PlotOptions, ScatterPoint, ScatterSeries};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to render")]
    EmptyInput,
    #[error("format `{format}` is not supported for {what}")]
    UnsupportedFormat { format: Format, what: &'static str },
    #[error("log scale needs positive values; series `{series}` point `{label}` has {value}")]
    NonPositiveLogInput { series: String, label: String, value: f64 },
    #[error("non-finite coordinate in series `{series}` point `{label}`")]
    NonFinite { series: String, label: String },
    #[error("{records} records but {results} valuation results")]
    LengthMismatch { records: usize, results: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Md,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Md => "md",
            Format::Svg => "svg",
        })
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Md),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Scale {
    Linear,
    #[default]
    Log10,
}

impl FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Scale::Linear),
            "log10" | "log" => Ok(Scale::Log10),
            other => Err(format!("unknown scale `{other}`")),
        }
    }
}

/// How to render: output format, plot scale and per-column decimal places.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RenderSpec {
    pub format: Format,
    pub scale: Scale,
    pub decimal_places: BTreeMap<String, usize>,
}

impl RenderSpec {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            ..Self::default()
        }
    }

    /// Decimal places for a column key, falling back to the built-in default.
    pub fn dp(&self, key: &str) -> usize {
        self.decimal_places.get(key).copied().unwrap_or(match key {
            "p_value" | "money" | "fv" | "sns_m" => 2,
            "ratio" | "aggregate" | "premium" => 1,
            _ => 4,
        })
    }

    fn table_only(&self, what: &'static str) -> Result<(), ReportError> {
        if self.format == Format::Svg {
            return Err(ReportError::UnsupportedFormat { format: Format::Svg, what });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Align {
    Left,
    Right,
}

/// A rectangular table that knows how to print itself in the tabular formats.
#[derive(Debug, Clone)]
struct Table {
    headers: Vec<String>,
    align: Vec<Align>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[(&str, Align)]) -> Self {
        Self {
            headers: columns.iter().map(|(h, _)| h.to_string()).collect(),
            align: columns.iter().map(|(_, a)| *a).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn text(&self) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([self.headers[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .zip(&self.align)
                .map(|((cell, &w), a)| {
                    let pad = " ".repeat(w - cell.chars().count());
                    match a {
                        Align::Left => format!("{cell}{pad}"),
                        Align::Right => format!("{pad}{cell}"),
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        out.push_str(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  "));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    fn markdown(&self) -> String {
        let esc = |s: &String| s.replace('|', "\\|");
        let mut out = format!("| {} |\n", self.headers.iter().map(esc).collect::<Vec<_>>().join(" | "));
        let rule: Vec<&str> = self
            .align
            .iter()
            .map(|a| match a {
                Align::Left => ":---",
                Align::Right => "---:",
            })
            .collect();
        out.push_str(&format!("| {} |\n", rule.join(" | ")));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.iter().map(esc).collect::<Vec<_>>().join(" | ")));
        }
        out
    }

    fn csv(&self) -> Result<String, ReportError> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| ReportError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn render(&self, format: Format) -> Result<String, ReportError> {
        match format {
            Format::Text => Ok(self.text()),
            Format::Md => Ok(self.markdown()),
            Format::Csv => self.csv(),
            Format::Svg => Err(ReportError::UnsupportedFormat { format, what: "tables" }),
        }
    }
}

fn heading(format: Format, title: &str) -> String {
    match format {
        Format::Md => format!("### {title}\n\n"),
        _ => format!("{title}\n\n"),
    }
}

fn notes(format: Format, lines: &[String]) -> String {
    if lines.is_empty() {
        return String::new();
    }
    let mut out = String::from("\n");
    for l in lines {
        match format {
            Format::Md => out.push_str(&format!("- {l}\n")),
            _ => out.push_str(&format!("{l}\n")),
        }
    }
    out
}

/// Coefficient table plus the fit statistics block.
pub fn render_regression_table(fit: &RegressionFit, spec: &RenderSpec) -> Result<String, ReportError> {
    spec.table_only("regression reports")?;
    let (cdp, sdp, tdp, pdp, stat_dp) = (
        spec.dp("coeff"),
        spec.dp("std_error"),
        spec.dp("t_stat"),
        spec.dp("p_value"),
        spec.dp("stat"),
    );
    let stats: [(&str, String); 6] = [
        ("Multiple R", fixed(fit.multiple_r, stat_dp)),
        ("R Square", fixed(fit.r_squared, stat_dp)),
        ("Adjusted R Square", fixed(fit.adjusted_r_squared, stat_dp)),
        ("Standard Error", fixed(fit.standard_error_of_regression, stat_dp)),
        ("Observations", fit.n.to_string()),
        ("Residual dof", fit.dof.to_string()),
    ];

    if spec.format == Format::Csv {
        let mut t = Table::new(&[
            ("kind", Align::Left),
            ("name", Align::Left),
            ("coeff", Align::Right),
            ("std_error", Align::Right),
            ("t_stat", Align::Right),
            ("p_value", Align::Right),
            ("value", Align::Right),
        ]);
        for c in &fit.coefficients {
            t.push(vec![
                "coefficient".into(),
                c.name.clone(),
                fixed(c.estimate, cdp),
                fixed(c.std_error, sdp),
                fixed(c.t_stat, tdp),
                scientific(c.p_value, pdp),
                String::new(),
            ]);
        }
        for (name, value) in stats {
            let mut row = vec!["statistic".to_string(), name.to_string()];
            row.extend(std::iter::repeat_n(String::new(), 4));
            row.push(value);
            t.push(row);
        }
        return t.csv();
    }

    let mut st = Table::new(&[("Statistics", Align::Left), ("", Align::Right)]);
    for (name, value) in stats {
        st.push(vec![name.to_string(), value]);
    }
    let mut ct = Table::new(&[
        ("Term", Align::Left),
        ("Coeff.", Align::Right),
        ("Standard Error", Align::Right),
        ("t Stat", Align::Right),
        ("P-value", Align::Right),
    ]);
    ct.push(vec!["Intercept".into(), "0".into(), String::new(), String::new(), String::new()]);
    for c in &fit.coefficients {
        ct.push(vec![
            c.name.clone(),
            fixed(c.estimate, cdp),
            fixed(c.std_error, sdp),
            fixed(c.t_stat, tdp),
            scientific(c.p_value, pdp),
        ]);
    }
    let mut out = heading(spec.format, &format!("Through-origin regression of {}", fit.response));
    out.push_str(&st.render(spec.format)?);
    out.push('\n');
    out.push_str(&ct.render(spec.format)?);
    out.push_str(&notes(
        spec.format,
        &[format!(
            "R Square is uncentered (1 - SSR / sum y^2); centered value {}.",
            fixed(fit.centered_r_squared, stat_dp)
        )],
    ));
    Ok(out)
}

/// Per-club valuation rows followed by Average and Median rows.
pub fn render_valuation_table(
    results: &[ValuationResult],
    records: &[ClubRecord],
    aggregates: &Aggregates,
    spec: &RenderSpec,
) -> Result<String, ReportError> {
    spec.table_only("valuation tables")?;
    if results.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    if results.len() != records.len() {
        return Err(ReportError::LengthMismatch {
            records: records.len(),
            results: results.len(),
        });
    }
    let csv = spec.format == Format::Csv;
    let (mdp, fdp, rdp, adp) = (spec.dp("money"), spec.dp("fv"), spec.dp("ratio"), spec.dp("aggregate"));
    let pct = |v: f64, dp: usize| if csv { fixed(v, dp) } else { format!("{}%", fixed(v, dp)) };
    let sns = |v: f64| if csv { fixed(v, 0) } else { thousands(v) };

    let mut t = if csv {
        Table::new(&[
            ("league", Align::Left),
            ("club", Align::Left),
            ("sns_followers", Align::Right),
            ("revenue_meur", Align::Right),
            ("player_market_value_meur", Align::Right),
            ("fv1_meur", Align::Right),
            ("fv2_meur", Align::Right),
            ("fv1_fv2_pct", Align::Right),
        ])
    } else {
        Table::new(&[
            ("League", Align::Left),
            ("Club", Align::Left),
            ("SNS followers", Align::Right),
            ("Revenue (m€)", Align::Right),
            ("Player market value (m€)", Align::Right),
            ("FV1 (m€)", Align::Right),
            ("FV2 (m€)", Align::Right),
            ("FV1/FV2", Align::Right),
        ])
    };
    for (res, rec) in results.iter().zip(records) {
        t.push(vec![
            rec.league.clone(),
            res.club.clone(),
            sns(rec.sns_followers as f64),
            fixed(rec.revenue, mdp),
            fixed(rec.player_market_value, mdp),
            fixed(res.fv1, fdp),
            fixed(res.fv2, fdp),
            pct(res.ratio_pct, rdp),
        ]);
    }
    for (label, row) in [("Average", &aggregates.mean), ("Median", &aggregates.median)] {
        t.push(vec![
            String::new(),
            label.to_string(),
            sns(row.sns_followers),
            fixed(row.revenue, adp),
            fixed(row.player_market_value, adp),
            fixed(row.fv1, adp),
            fixed(row.fv2, adp),
            pct(row.ratio_pct, rdp),
        ]);
    }
    if csv {
        return t.csv();
    }
    let mut out = heading(spec.format, "Firm values (FV1: SNS & revenue, FV2: SNS & player market value)");
    out.push_str(&t.render(spec.format)?);
    out.push_str(&notes(
        spec.format,
        &[
            format!(
                "Average FV1/FV2 is the {}; the median row takes the median of per-club ratios.",
                RatioAggregation::MeanOfRatios
            ),
            format!(
                "{} = {}",
                RatioAggregation::RatioOfMeans,
                pct(aggregates.ratio_of_means_pct, rdp)
            ),
        ],
    ));
    Ok(out)
}

/// Per-case premiums and the per-formula min/max.
pub fn render_premiums(summary: &PremiumSummary, spec: &RenderSpec) -> Result<String, ReportError> {
    spec.table_only("premium summaries")?;
    let (mdp, pdp) = (spec.dp("money"), spec.dp("premium"));
    let pct = |f: f64| fixed(100.0 * f, pdp);
    if spec.format == Format::Csv {
        let mut t = Table::new(&[
            ("kind", Align::Left),
            ("club", Align::Left),
            ("model", Align::Left),
            ("implied_stake_value_myen", Align::Right),
            ("price_myen", Align::Right),
            ("premium_pct", Align::Right),
        ]);
        for (a, b) in &summary.cases {
            for p in [a, b] {
                t.push(vec![
                    "case".into(),
                    p.club.clone(),
                    p.model_name.clone(),
                    fixed(p.implied_stake_value, mdp),
                    fixed(p.price, mdp),
                    pct(p.premium),
                ]);
            }
        }
        for (model, r) in [("Formula 1", summary.fv1_range), ("Formula 2", summary.fv2_range)] {
            for (kind, v) in [("min", r.min), ("max", r.max)] {
                t.push(vec![kind.into(), String::new(), model.into(), String::new(), String::new(), pct(v)]);
            }
        }
        return t.csv();
    }
    let mut t = Table::new(&[
        ("Club", Align::Left),
        ("Price for 51% (m¥)", Align::Right),
        ("Formula 1 stake value (m¥)", Align::Right),
        ("Formula 1 premium", Align::Right),
        ("Formula 2 stake value (m¥)", Align::Right),
        ("Formula 2 premium", Align::Right),
    ]);
    for (a, b) in &summary.cases {
        t.push(vec![
            a.club.clone(),
            fixed(a.price, mdp),
            fixed(a.implied_stake_value, mdp),
            format!("{}%", pct(a.premium)),
            fixed(b.implied_stake_value, mdp),
            format!("{}%", pct(b.premium)),
        ]);
    }
    let mut out = heading(
        spec.format,
        &format!(
            "Model value of a {}% stake vs transaction price (fx {} yen/EUR)",
            fixed(100.0 * summary.stake, 1),
            fixed(summary.fx.yen_per_euro(), 2)
        ),
    );
    out.push_str(&t.render(spec.format)?);
    let mut lines = vec![
        format!(
            "Formula 1 premium range: {}% to {}%",
            pct(summary.fv1_range.min),
            pct(summary.fv1_range.max)
        ),
        format!(
            "Formula 2 premium range: {}% to {}%",
            pct(summary.fv2_range.min),
            pct(summary.fv2_range.max)
        ),
    ];
    lines.extend(summary.skipped.iter().map(|(club, why)| format!("Skipped {club}: {why}")));
    out.push_str(&notes(spec.format, &lines));
    Ok(out)
}

/// Ranked model list; the best model's coefficients follow in text/md.
pub fn render_selection(report: &SelectionReport, spec: &RenderSpec, top: usize) -> Result<String, ReportError> {
    spec.table_only("selection reports")?;
    let sdp = spec.dp("stat");
    let mut t = Table::new(&[
        ("rank", Align::Right),
        ("variables", Align::Left),
        ("k", Align::Right),
        ("r_squared", Align::Right),
        ("adjusted_r_squared", Align::Right),
        ("standard_error", Align::Right),
        ("all_significant", Align::Left),
    ]);
    for (i, m) in report.ranked_models.iter().take(top).enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            m.variables.join(";"),
            m.variables.len().to_string(),
            fixed(m.fit.r_squared, sdp),
            fixed(m.fit.adjusted_r_squared, sdp),
            fixed(m.fit.standard_error_of_regression, sdp),
            m.all_significant.to_string(),
        ]);
    }
    if spec.format == Format::Csv {
        return t.csv();
    }
    let method = match report.method {
        SelectionMethod::Exhaustive => "exhaustive subset search",
        SelectionMethod::Stepwise => "stepwise selection",
    };
    let mut out = heading(spec.format, &format!("Model selection ({method})"));
    out.push_str(&t.render(spec.format)?);
    let mut lines = vec![format!(
        "{} subsets attempted, {} fitted, {} skipped; significance level {}.",
        report.attempted,
        report.ranked_models.len(),
        report.skipped.len(),
        report.alpha
    )];
    lines.extend(report.steps.iter().map(|s| {
        let verb = match s.action {
            StepAction::Added => "added",
            StepAction::Removed => "removed",
        };
        format!("Step: {verb} {} (p = {})", s.variable, scientific(s.p_value, 2))
    }));
    match report.status {
        SelectionStatus::Complete => {}
        SelectionStatus::EmptyModel => lines.push("No candidate entered the model.".into()),
        SelectionStatus::CycleDetected => {
            lines.push("Stepwise search cycled; the state at detection is reported.".into())
        }
    }
    for s in &report.skipped {
        lines.push(format!("Skipped {}: {}", s.variables.join(";"), s.reason));
    }
    out.push_str(&notes(spec.format, &lines));
    if let Some(best) = report.best() {
        out.push('\n');
        out.push_str(&render_regression_table(&best.fit, spec)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::bundled_jleague_dataset;
    use crate::parallel::Execution;
    use crate::regression::{fit_through_origin, DesignMatrix, ResponseVector};
    use crate::valuation::{aggregate, formula_1, formula_2, valuate_all};

    fn small_fit() -> RegressionFit {
        let d = DesignMatrix::new(vec![("x", vec![1.0, 2.0, 3.0, 4.0])]).unwrap();
        let y = ResponseVector::new("y", vec![1.1, 1.9, 3.2, 3.9]).unwrap();
        fit_through_origin(&d, &y).unwrap()
    }

    #[test]
    fn regression_text_has_single_coefficient_row() {
        let doc = render_regression_table(&small_fit(), &RenderSpec::new(Format::Text)).unwrap();
        assert_eq!(doc.lines().filter(|l| l.starts_with("x ")).count(), 1);
        assert!(doc.contains("Intercept"));
        assert!(doc.contains("Adjusted R Square"));
        assert!(doc.contains("E-"));
    }

    #[test]
    fn svg_is_rejected_for_tables() {
        let spec = RenderSpec::new(Format::Svg);
        assert!(matches!(
            render_regression_table(&small_fit(), &spec),
            Err(ReportError::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn valuation_table_shape() {
        let recs = bundled_jleague_dataset();
        let res = valuate_all(&recs, &formula_1(), &formula_2(), Execution::Sequential).unwrap();
        let agg = aggregate(&res, &recs).unwrap();
        let doc = render_valuation_table(&res, &recs, &agg, &RenderSpec::new(Format::Text)).unwrap();
        assert!(doc.contains("161.39"));
        assert!(doc.contains("807,734"));
        assert!(doc.contains("397.2%"));
        let md = render_valuation_table(&res, &recs, &agg, &RenderSpec::new(Format::Md)).unwrap();
        assert_eq!(md.lines().filter(|l| l.starts_with("| J")).count(), 60);
        assert!(matches!(
            render_valuation_table(&[], &[], &agg, &RenderSpec::new(Format::Text)),
            Err(ReportError::EmptyInput)
        ));
    }

    #[test]
    fn decimal_overrides() {
        let mut spec = RenderSpec::new(Format::Csv);
        spec.decimal_places.insert("coeff".into(), 6);
        let doc = render_regression_table(&small_fit(), &spec).unwrap();
        let row = doc.lines().nth(1).unwrap();
        let coeff = row.split(',').nth(2).unwrap();
        assert_eq!(coeff.split('.').nth(1).unwrap().len(), 6);
    }
}
