//! The `citerank` command line: batch scoring, unit aggregation, and
//! distribution export over record files.
//!
//! Exit codes: 0 on success, 1 on validation errors in the input data or
//! derived values, 2 on usage errors caught by the argument parser. Output
//! is fully buffered and written once, so a failing run leaves no partial
//! file behind.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::{
    build_reference_sets, parse_records, score_all, PublicationRecord, RecordFormat, ScoreRow,
};
use crate::indicators::{IndicatorKind, RankClassScheme};
use crate::report::{
    aggregate_units, export_distributions, render_fraction, render_value, round_half_up,
    HistogramRow, UnitSummary,
};

#[derive(Debug, Parser)]
#[command(
    name = "citerank",
    version,
    about = "Citation-rank indicators (P100, P100') and percentiles over bibliometric reference sets"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every paper against its reference sets
    Score(ScoreArgs),
    /// Aggregate combined scores per evaluated unit
    Aggregate(AggregateArgs),
    /// Export histogram data comparing all papers against unique citations
    Distributions(DistributionsArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Publication records file
    #[arg(long)]
    input: PathBuf,
    /// Record format, for input and output alike
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Destination file
    #[arg(long)]
    output: PathBuf,
    /// Emit full-precision values instead of rounding for presentation
    #[arg(long)]
    full_precision: bool,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Indicator used for top shares and rank classes
    #[arg(long, value_enum, default_value_t = IndicatorArg::P100Prime)]
    indicator: IndicatorArg,
    /// Rank-class boundaries on the 0..100 scale
    #[arg(long, value_delimiter = ',', default_values_t = vec![50.0, 75.0, 90.0, 99.0])]
    classes: Vec<f64>,
    /// Scale value at or above which a paper counts as top
    #[arg(long, default_value_t = 90.0)]
    top_threshold: f64,
}

#[derive(Debug, Args)]
struct DistributionsArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Base of the log(citations + 1) transform
    #[arg(long, default_value_t = 10.0, value_parser = parse_log_base)]
    log_base: f64,
    /// Histogram bin width in log units
    #[arg(long, default_value_t = 0.25, value_parser = parse_bin_width)]
    bin_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for RecordFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => RecordFormat::Csv,
            FormatArg::Jsonl => RecordFormat::JsonLines,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndicatorArg {
    #[value(name = "p100")]
    P100,
    #[value(name = "p100prime")]
    P100Prime,
    #[value(name = "percentile")]
    Percentile,
}

impl From<IndicatorArg> for IndicatorKind {
    fn from(arg: IndicatorArg) -> Self {
        match arg {
            IndicatorArg::P100 => IndicatorKind::P100,
            IndicatorArg::P100Prime => IndicatorKind::P100Prime,
            IndicatorArg::Percentile => IndicatorKind::Percentile,
        }
    }
}

fn parse_log_base(s: &str) -> Result<f64, String> {
    let base: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if base > 1.0 {
        Ok(base)
    } else {
        Err(format!("log base must exceed 1, got {base}"))
    }
}

fn parse_bin_width(s: &str) -> Result<f64, String> {
    let width: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if width > 0.0 {
        Ok(width)
    } else {
        Err(format!("bin width must be positive, got {width}"))
    }
}

/// Runs the CLI against the given argument vector and returns the process
/// exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Score(args) => {
            let records = load_records(&args.io)?;
            let rows = score_all(&build_reference_sets(&records));
            let bytes = match args.io.format {
                FormatArg::Csv => score_csv(&rows, args.io.full_precision)?,
                FormatArg::Jsonl => score_jsonl(&rows, args.io.full_precision)?,
            };
            write_output(&args.io.output, &bytes)
        }
        Command::Aggregate(args) => {
            let records = load_records(&args.io)?;
            let rows = score_all(&build_reference_sets(&records));
            let scheme = RankClassScheme::new(args.classes.clone())
                .context("invalid --classes boundaries")?;
            let summaries = aggregate_units(
                &rows,
                &records,
                &scheme,
                args.top_threshold,
                args.indicator.into(),
            )?;
            let bytes = match args.io.format {
                FormatArg::Csv => aggregate_csv(&summaries, args.io.full_precision)?,
                FormatArg::Jsonl => aggregate_jsonl(&summaries, args.io.full_precision)?,
            };
            write_output(&args.io.output, &bytes)
        }
        Command::Distributions(args) => {
            let records = load_records(&args.io)?;
            let sets = build_reference_sets(&records);
            let mut keyed_rows = Vec::new();
            for (key, set) in &sets {
                let rows = export_distributions(set, args.log_base, args.bin_width)?;
                keyed_rows.push((key.year, key.category.clone(), rows));
            }
            let bytes = match args.io.format {
                FormatArg::Csv => distributions_csv(&keyed_rows, args.io.full_precision)?,
                FormatArg::Jsonl => distributions_jsonl(&keyed_rows, args.io.full_precision)?,
            };
            write_output(&args.io.output, &bytes)
        }
    }
}

fn load_records(io: &IoArgs) -> Result<Vec<PublicationRecord>> {
    let bytes = fs::read(&io.input)
        .with_context(|| format!("cannot read input file '{}'", io.input.display()))?;
    let records = parse_records(bytes.as_slice(), io.format.into())
        .with_context(|| format!("invalid records in '{}'", io.input.display()))?;
    Ok(records)
}

fn write_output(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes)
        .with_context(|| format!("cannot write output file '{}'", path.display()))
}

fn opt_value(value: Option<f64>, full_precision: bool) -> String {
    value
        .map(|v| render_value(v, full_precision))
        .unwrap_or_default()
}

fn round_opt(value: Option<f64>, full_precision: bool, decimals: u32) -> Option<f64> {
    value.map(|v| {
        if full_precision {
            v
        } else {
            round_half_up(v, decimals)
        }
    })
}

const SCORE_HEADER: [&str; 10] = [
    "paperId",
    "year",
    "category",
    "p100",
    "p100prime",
    "percentile",
    "degenerate",
    "combinedP100",
    "combinedP100Prime",
    "combinedPercentile",
];

fn score_csv(rows: &[ScoreRow], full_precision: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCORE_HEADER)?;
    for row in rows {
        for s in &row.per_set {
            w.write_record(&[
                row.paper_id.clone(),
                s.key.year.to_string(),
                s.key.category.clone(),
                opt_value(s.p100, full_precision),
                opt_value(s.p100_prime, full_precision),
                render_value(s.percentile, full_precision),
                s.degenerate.to_string(),
                opt_value(row.combined.p100, full_precision),
                opt_value(row.combined.p100_prime, full_precision),
                render_value(row.combined.percentile, full_precision),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
struct JsonScoreRow<'a> {
    #[serde(rename = "paperId")]
    paper_id: &'a str,
    #[serde(rename = "perSet")]
    per_set: Vec<JsonSetScore<'a>>,
    combined: JsonCombined,
}

#[derive(Serialize)]
struct JsonSetScore<'a> {
    year: i32,
    category: &'a str,
    p100: Option<f64>,
    #[serde(rename = "p100prime")]
    p100_prime: Option<f64>,
    percentile: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct JsonCombined {
    p100: Option<f64>,
    #[serde(rename = "p100prime")]
    p100_prime: Option<f64>,
    percentile: f64,
}

fn score_jsonl(rows: &[ScoreRow], full_precision: bool) -> Result<Vec<u8>> {
    let round = |v: f64| {
        if full_precision {
            v
        } else {
            round_half_up(v, 2)
        }
    };
    let mut out = Vec::new();
    for row in rows {
        let json_row = JsonScoreRow {
            paper_id: &row.paper_id,
            per_set: row
                .per_set
                .iter()
                .map(|s| JsonSetScore {
                    year: s.key.year,
                    category: &s.key.category,
                    p100: round_opt(s.p100, full_precision, 2),
                    p100_prime: round_opt(s.p100_prime, full_precision, 2),
                    percentile: round(s.percentile),
                    degenerate: s.degenerate,
                })
                .collect(),
            combined: JsonCombined {
                p100: round_opt(row.combined.p100, full_precision, 2),
                p100_prime: round_opt(row.combined.p100_prime, full_precision, 2),
                percentile: round(row.combined.percentile),
            },
        };
        serde_json::to_writer(&mut out, &json_row)?;
        out.push(b'\n');
    }
    Ok(out)
}

const AGGREGATE_HEADER: [&str; 7] = [
    "unit",
    "paperCount",
    "meanP100",
    "meanP100Prime",
    "meanPercentile",
    "topShare",
    "classCounts",
];

fn class_counts_field(counts: &[usize]) -> String {
    counts
        .iter()
        .enumerate()
        .map(|(class, count)| format!("{class}:{count}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn aggregate_csv(summaries: &[UnitSummary], full_precision: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_HEADER)?;
    for s in summaries {
        w.write_record(&[
            s.unit.clone(),
            s.paper_count.to_string(),
            opt_value(s.mean_p100, full_precision),
            opt_value(s.mean_p100_prime, full_precision),
            render_value(s.mean_percentile, full_precision),
            s.top_share
                .map(|v| render_fraction(v, full_precision))
                .unwrap_or_default(),
            class_counts_field(&s.class_counts),
        ])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
struct JsonUnitSummary<'a> {
    unit: &'a str,
    #[serde(rename = "paperCount")]
    paper_count: usize,
    #[serde(rename = "meanP100")]
    mean_p100: Option<f64>,
    #[serde(rename = "meanP100Prime")]
    mean_p100_prime: Option<f64>,
    #[serde(rename = "meanPercentile")]
    mean_percentile: f64,
    #[serde(rename = "topShare")]
    top_share: Option<f64>,
    #[serde(rename = "classCounts")]
    class_counts: Vec<JsonClassCount>,
}

#[derive(Serialize)]
struct JsonClassCount {
    class: usize,
    count: usize,
}

fn aggregate_jsonl(summaries: &[UnitSummary], full_precision: bool) -> Result<Vec<u8>> {
    let round = |v: f64| {
        if full_precision {
            v
        } else {
            round_half_up(v, 2)
        }
    };
    let mut out = Vec::new();
    for s in summaries {
        let json_row = JsonUnitSummary {
            unit: &s.unit,
            paper_count: s.paper_count,
            mean_p100: round_opt(s.mean_p100, full_precision, 2),
            mean_p100_prime: round_opt(s.mean_p100_prime, full_precision, 2),
            mean_percentile: round(s.mean_percentile),
            top_share: round_opt(s.top_share, full_precision, 4),
            class_counts: s
                .class_counts
                .iter()
                .enumerate()
                .map(|(class, count)| JsonClassCount {
                    class,
                    count: *count,
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &json_row)?;
        out.push(b'\n');
    }
    Ok(out)
}

const DISTRIBUTIONS_HEADER: [&str; 6] =
    ["year", "category", "series", "binLow", "binHigh", "count"];

type KeyedHistogram = (i32, String, Vec<HistogramRow>);

fn distributions_csv(keyed_rows: &[KeyedHistogram], full_precision: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DISTRIBUTIONS_HEADER)?;
    for (year, category, rows) in keyed_rows {
        for row in rows {
            w.write_record(&[
                year.to_string(),
                category.clone(),
                row.series.to_string(),
                render_fraction(row.bin_low, full_precision),
                render_fraction(row.bin_high, full_precision),
                row.count.to_string(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

#[derive(Serialize)]
struct JsonHistogramRow<'a> {
    year: i32,
    category: &'a str,
    series: String,
    #[serde(rename = "binLow")]
    bin_low: f64,
    #[serde(rename = "binHigh")]
    bin_high: f64,
    count: usize,
}

fn distributions_jsonl(keyed_rows: &[KeyedHistogram], full_precision: bool) -> Result<Vec<u8>> {
    let round = |v: f64| {
        if full_precision {
            v
        } else {
            round_half_up(v, 4)
        }
    };
    let mut out = Vec::new();
    for (year, category, rows) in keyed_rows {
        for row in rows {
            let json_row = JsonHistogramRow {
                year: *year,
                category,
                series: row.series.to_string(),
                bin_low: round(row.bin_low),
                bin_high: round(row.bin_high),
                count: row.count,
            };
            serde_json::to_writer(&mut out, &json_row)?;
            out.push(b'\n');
        }
    }
    Ok(out)
}
