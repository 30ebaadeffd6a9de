//! `clubval` command-line front end.
//!
//! Exit codes: 0 success, 1 data error (unreadable or invalid input, failed
//! fit), 2 usage error (bad flags, format not valid for the command).
//!
//! `--fx-rate`, `--stake`, `--format` and `--scale` resolve in the order
//! flag > environment (`VALUATE_FX_RATE`) > `--config` file > default.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{
    bundled_european_reference, bundled_jleague_dataset, bundled_transactions, parse_club_csv, ClubRecord, FxRate,
};
use crate::parallel::Execution;
use crate::regression::{fit_through_origin, DesignMatrix, ResponseVector};
use crate::report::{
    emit_scatter, render_premiums, render_regression_table, render_selection, render_valuation_table, Format,
    PlotOptions, RenderSpec, Scale, ScatterPoint, ScatterSeries,
};
use crate::selection::{exhaustive_subsets_with, stepwise_with, CandidateSet, SelectionOptions};
use crate::valuation::{aggregate, formula_1, formula_2, premium_ranges, valuate_all, DEFAULT_STAKE};

pub const FX_ENV_VAR: &str = "VALUATE_FX_RATE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "clubval", version, about = "Football club valuation by through-origin regression formulae")]
pub struct Cli {
    /// key=value file with defaults for fx_rate, stake, format, scale
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Yen per euro (default 150)
    #[arg(long, global = true)]
    fx_rate: Option<f64>,
    /// Share of the club a transaction price buys (default 0.51)
    #[arg(long, global = true)]
    stake: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Decimal places per column key, e.g. `--decimals fv=3`
    #[arg(long, global = true, value_name = "KEY=N", value_parser = parse_decimals)]
    decimals: Vec<(String, usize)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a through-origin regression from a numeric CSV
    Fit(FitArgs),
    /// Rank predictor subsets by adjusted R²
    Select(SelectArgs),
    /// Value clubs with both published formulae
    Apply(ApplyArgs),
    /// Compare model values with historical transaction prices
    Premiums(PremiumArgs),
    /// FV1 vs FV2 scatter plot as SVG
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct TableInput {
    /// CSV with a header row; a `sns_followers` column also yields `sns_followers_m`
    #[arg(long)]
    input: PathBuf,
    /// Response column
    #[arg(long)]
    response: String,
    /// Comma-separated predictor columns (default: every other numeric column)
    #[arg(long, value_delimiter = ',')]
    predictors: Vec<String>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    table: TableInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exhaustive,
    Stepwise,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    table: TableInput,
    #[arg(long, value_enum, default_value = "exhaustive")]
    method: Method,
    /// Largest subset size for the exhaustive search
    #[arg(long, default_value_t = 2)]
    max_size: usize,
    /// Significance level for the all-significant flag
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha_in: f64,
    #[arg(long, default_value_t = 0.10)]
    alpha_out: f64,
    /// Number of ranked models to print
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Fit subsets on one thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bundled {
    Jleague,
}

#[derive(Debug, Args)]
#[group(id = "source", required = false, multiple = false)]
struct ClubSource {
    /// Club CSV file
    #[arg(long, group = "source")]
    input: Option<PathBuf>,
    /// Use a bundled dataset
    #[arg(long, value_enum, group = "source")]
    bundled: Option<Bundled>,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    #[command(flatten)]
    source: ClubSource,
    /// Keep only clubs in this league (e.g. J1)
    #[arg(long)]
    league: Option<String>,
}

#[derive(Debug, Args)]
struct PremiumArgs {
    /// Club CSV to value instead of the bundled J.League table
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotDataset {
    Combined,
    Jleague,
    Europe,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long, value_enum, default_value = "combined")]
    dataset: PlotDataset,
    /// Club CSV replacing the bundled J.League series
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Omit the FV1 = FV2 guide line
    #[arg(long)]
    no_guide: bool,
}

fn parse_decimals(s: &str) -> Result<(String, usize), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=N, got `{s}`"))?;
    let n = v.trim().parse().map_err(|_| format!("`{v}` is not a count"))?;
    Ok((k.trim().to_string(), n))
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: e.to_string(),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

/// Parses a `key=value` config file. Blank lines and `#` comments are ignored.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim().to_ascii_lowercase().replace('-', "_");
        if !matches!(k.as_str(), "fx_rate" | "stake" | "format" | "scale") {
            return Err(format!("config line {}: unknown key `{k}`", i + 1));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Settings {
    fx: FxRate,
    stake: f64,
    format: Option<Format>,
    scale: Option<Scale>,
}

fn resolve_settings(cli: &Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<Settings, Failure> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(data)?
        }
        None => BTreeMap::new(),
    };
    let from_file = |key: &str| file.get(key).cloned();
    let num = |raw: String, what: &str, code: i32| {
        raw.trim().parse::<f64>().map_err(|_| Failure {
            code,
            message: format!("{what}: `{raw}` is not a number"),
        })
    };

    let fx_rate = match (cli.fx_rate, env(FX_ENV_VAR), from_file("fx_rate")) {
        (Some(v), _, _) => v,
        (None, Some(raw), _) => num(raw, FX_ENV_VAR, EXIT_USAGE)?,
        (None, None, Some(raw)) => num(raw, "config fx_rate", EXIT_DATA)?,
        (None, None, None) => FxRate::DEFAULT_YEN_PER_EURO,
    };
    let fx = FxRate::new(fx_rate).map_err(|e| usage(e.to_string()))?;

    let stake = match (cli.stake, from_file("stake")) {
        (Some(v), _) => v,
        (None, Some(raw)) => num(raw, "config stake", EXIT_DATA)?,
        (None, None) => DEFAULT_STAKE,
    };
    if !(stake > 0.0 && stake <= 1.0) {
        return Err(usage(format!("stake {stake} must lie in (0, 1]")));
    }

    let format = match (cli.format, from_file("format")) {
        (Some(f), _) => Some(f),
        (None, Some(raw)) => Some(raw.parse().map_err(data)?),
        (None, None) => None,
    };
    let scale = match from_file("scale") {
        Some(raw) => Some(raw.parse().map_err(data)?),
        None => None,
    };
    Ok(Settings { fx, stake, format, scale })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn load_clubs(path: &Path) -> Result<Vec<ClubRecord>, Failure> {
    parse_club_csv(&read_text(path)?).map_err(|e| data(format!("{}: {e}", path.display())))
}

type NumericColumn = (String, Option<Vec<f64>>);
type Column = (String, Vec<f64>);

/// Numeric columns of a generic CSV, in header order. Columns with any
/// non-numeric cell are recorded as `None`.
fn numeric_columns(text: &str) -> Result<Vec<NumericColumn>, Failure> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers().map_err(data)?.iter().map(|h| h.trim().to_string()).collect();
    let mut cols: Vec<Option<Vec<f64>>> = vec![Some(Vec::new()); headers.len()];
    for row in reader.records() {
        let row = row.map_err(data)?;
        for (i, col) in cols.iter_mut().enumerate() {
            let parsed = row.get(i).and_then(|c| c.trim().parse::<f64>().ok()).filter(|v| v.is_finite());
            match (col.as_mut(), parsed) {
                (Some(v), Some(x)) => v.push(x),
                _ => *col = None,
            }
        }
    }
    let mut out: Vec<NumericColumn> = headers.into_iter().zip(cols).collect();
    let has_millions = out.iter().any(|(n, _)| n == "sns_followers_m");
    if !has_millions {
        if let Some(col) = out.iter().find(|(n, _)| n == "sns_followers").map(|(_, c)| c.clone()) {
            out.push((
                "sns_followers_m".to_string(),
                col.map(|v| v.into_iter().map(|x| x / 1_000_000.0).collect()),
            ));
        }
    }
    Ok(out)
}

fn design_from(table: &TableInput) -> Result<(Vec<Column>, ResponseVector), Failure> {
    let cols = numeric_columns(&read_text(&table.input)?)?;
    let lookup = |name: &str| -> Result<Vec<f64>, Failure> {
        match cols.iter().find(|(n, _)| n == name) {
            Some((_, Some(v))) => Ok(v.clone()),
            Some((_, None)) => Err(data(format!("column `{name}` is not numeric"))),
            None => Err(data(format!("no column named `{name}`"))),
        }
    };
    let response = ResponseVector::new(table.response.clone(), lookup(&table.response)?).map_err(data)?;
    let names: Vec<String> = if table.predictors.is_empty() {
        cols.iter()
            .filter(|(n, c)| c.is_some() && *n != table.response && !(n == "sns_followers" && cols.iter().any(|(m, _)| m == "sns_followers_m")))
            .map(|(n, _)| n.clone())
            .collect()
    } else {
        table.predictors.iter().map(|s| s.trim().to_string()).collect()
    };
    if names.is_empty() {
        return Err(data("no predictor columns"));
    }
    let predictors = names
        .into_iter()
        .map(|n| lookup(&n).map(|c| (n, c)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((predictors, response))
}

fn spec_for(cli: &Cli, settings: &Settings, default: Format) -> RenderSpec {
    RenderSpec {
        format: settings.format.unwrap_or(default),
        scale: settings.scale.unwrap_or_default(),
        decimal_places: cli.decimals.iter().cloned().collect(),
    }
}

fn require_table_format(spec: &RenderSpec) -> Result<(), Failure> {
    if spec.format == Format::Svg {
        return Err(usage("svg output is only available for `plot`"));
    }
    Ok(())
}

fn execute(cli: &Cli, settings: &Settings) -> Result<String, Failure> {
    match &cli.command {
        Command::Fit(args) => {
            let spec = spec_for(cli, settings, Format::Text);
            require_table_format(&spec)?;
            let (predictors, response) = design_from(&args.table)?;
            let design = DesignMatrix::new(predictors).map_err(data)?;
            let fit = fit_through_origin(&design, &response).map_err(data)?;
            render_regression_table(&fit, &spec).map_err(data)
        }
        Command::Select(args) => {
            let spec = spec_for(cli, settings, Format::Text);
            require_table_format(&spec)?;
            let (predictors, response) = design_from(&args.table)?;
            let cands = CandidateSet::new(predictors, response).map_err(data)?;
            let opts = SelectionOptions {
                alpha: args.alpha,
                alpha_in: args.alpha_in,
                alpha_out: args.alpha_out,
                execution: if args.sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
            };
            let report = match args.method {
                Method::Exhaustive => exhaustive_subsets_with(&cands, args.max_size, &opts),
                Method::Stepwise => stepwise_with(&cands, &opts),
            }
            .map_err(data)?;
            render_selection(&report, &spec, args.top).map_err(data)
        }
        Command::Apply(args) => {
            let spec = spec_for(cli, settings, Format::Text);
            require_table_format(&spec)?;
            let mut records = match (&args.source.input, args.source.bundled) {
                (Some(path), _) => load_clubs(path)?,
                (None, Some(Bundled::Jleague)) => bundled_jleague_dataset(),
                (None, None) => return Err(usage("apply needs --input FILE or --bundled jleague")),
            };
            if let Some(league) = &args.league {
                records.retain(|r| r.league.eq_ignore_ascii_case(league));
            }
            if records.is_empty() {
                return Err(data("no clubs to value"));
            }
            let results = valuate_all(&records, &formula_1(), &formula_2(), Execution::default()).map_err(data)?;
            let agg = aggregate(&results, &records).map_err(data)?;
            render_valuation_table(&results, &records, &agg, &spec).map_err(data)
        }
        Command::Premiums(args) => {
            let spec = spec_for(cli, settings, Format::Text);
            require_table_format(&spec)?;
            let records = match &args.input {
                Some(path) => load_clubs(path)?,
                None => bundled_jleague_dataset(),
            };
            let results = valuate_all(&records, &formula_1(), &formula_2(), Execution::default()).map_err(data)?;
            let summary =
                premium_ranges(&bundled_transactions(), &results, settings.fx, settings.stake).map_err(data)?;
            render_premiums(&summary, &spec).map_err(data)
        }
        Command::Plot(args) => {
            let mut spec = spec_for(cli, settings, Format::Svg);
            if spec.format != Format::Svg {
                return Err(usage("plot only writes svg"));
            }
            if let Some(scale) = args.scale {
                spec.scale = scale;
            }
            let mut series = Vec::new();
            if args.dataset != PlotDataset::Europe {
                let records = match &args.input {
                    Some(path) => load_clubs(path)?,
                    None => bundled_jleague_dataset(),
                };
                let results =
                    valuate_all(&records, &formula_1(), &formula_2(), Execution::default()).map_err(data)?;
                series.push(ScatterSeries {
                    label: "J.League".into(),
                    points: results
                        .into_iter()
                        .map(|r| ScatterPoint { x: r.fv2, y: r.fv1, label: r.club })
                        .collect(),
                });
            }
            if args.dataset != PlotDataset::Jleague {
                series.push(ScatterSeries {
                    label: "Europe".into(),
                    points: bundled_european_reference()
                        .into_iter()
                        .map(|e| ScatterPoint { x: e.fv2, y: e.fv1, label: e.club })
                        .collect(),
                });
            }
            let opts = PlotOptions {
                guide_line: !args.no_guide,
                ..PlotOptions::default()
            };
            emit_scatter(&series, &spec, &opts).map_err(data)
        }
    }
}

/// Runs the CLI against the given environment lookup.
pub fn run_with_env<I, T>(
    args: I,
    env: &dyn Fn(&str) -> Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let outcome = resolve_settings(&cli, env).and_then(|settings| execute(&cli, &settings));
    match outcome {
        Ok(doc) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, doc.as_bytes()).map_err(|e| data(format!("{}: {e}", path.display()))),
                None => stdout.write_all(doc.as_bytes()).map_err(data),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(f) => {
                    let _ = writeln!(stderr, "error: {}", f.message);
                    f.code
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Runs the CLI with the process environment.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, &|k| std::env::var(k).ok(), stdout, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with_env(
            std::iter::once("clubval").chain(args.iter().copied()),
            &no_env,
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_parsing() {
        let cfg = parse_config("# defaults\nfx_rate = 160\n\nstake=0.6\n").unwrap();
        assert_eq!(cfg["fx_rate"], "160");
        assert_eq!(cfg["stake"], "0.6");
        assert!(parse_config("colour=blue").is_err());
        assert!(parse_config("fx_rate").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["apply"]).0, EXIT_USAGE);
        assert_eq!(call(&["apply", "--bundled", "jleague", "--format", "svg"]).0, EXIT_USAGE);
        assert_eq!(call(&["plot", "--format", "csv"]).0, EXIT_USAGE);
        assert_eq!(call(&["premiums", "--fx-rate", "-1"]).0, EXIT_USAGE);
        assert_eq!(call(&["premiums", "--stake", "1.5"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("premiums"));
    }

    #[test]
    fn empty_league_filter_is_a_data_error() {
        let (code, out, err) = call(&["apply", "--bundled", "jleague", "--league", "J9"]);
        assert_eq!(code, EXIT_DATA);
        assert!(out.is_empty());
        assert!(err.contains("no clubs"));
    }

    #[test]
    fn env_overrides_file_and_flag_overrides_env() {
        let dir = std::env::temp_dir().join(format!("clubval-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("c.conf");
        fs::write(&cfg, "fx_rate=100\n").unwrap();
        let cfg_s = cfg.to_str().unwrap();
        let run_fx = |args: &[&str], env: &dyn Fn(&str) -> Option<String>| {
            let mut out = Vec::new();
            let mut err = Vec::new();
            let code = run_with_env(
                std::iter::once("clubval").chain(args.iter().copied()),
                env,
                &mut out,
                &mut err,
            );
            assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
            String::from_utf8(out).unwrap()
        };
        let env200 = |k: &str| (k == FX_ENV_VAR).then(|| "200".to_string());
        assert!(run_fx(&["premiums", "--config", cfg_s], &no_env).contains("fx 100.00"));
        assert!(run_fx(&["premiums", "--config", cfg_s], &env200).contains("fx 200.00"));
        assert!(run_fx(&["premiums", "--config", cfg_s, "--fx-rate", "150"], &env200).contains("fx 150.00"));
        assert!(run_fx(&["premiums"], &no_env).contains("fx 150.00"));
        fs::remove_dir_all(&dir).unwrap();
    }
}
