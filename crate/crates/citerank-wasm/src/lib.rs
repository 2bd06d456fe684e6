//! Browser bindings for exploring citation-rank indicators interactively.
//!
//! Three operations back the demo page: scoring a pasted citation multiset,
//! binning its log-transformed distributions, and sampling a synthetic
//! reference set. All take and return plain strings (JSON out), so the same
//! functions are unit-tested natively and exported to JavaScript unchanged.
//!
//! Build the browser package with
//! `wasm-pack build crates/citerank-wasm --target web`.

use citerank::indicators::{
    p100, p100_prime, percentile_cumfreq, CitationCount, RankTable, SizeFrequency,
};
use citerank::report::{histogram_series, HistogramSeries};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLE_SIZE: u32 = 200_000;
// Keeps pathological location/shape inputs from producing astronomically
// large counts in the demo.
const MAX_SAMPLED_CITATIONS: f64 = 1e9;

#[derive(Serialize)]
struct ScoreTable {
    #[serde(rename = "paperCount")]
    paper_count: usize,
    #[serde(rename = "uniqueCount")]
    unique_count: usize,
    degenerate: bool,
    rows: Vec<ScoreTableRow>,
}

#[derive(Serialize)]
struct ScoreTableRow {
    citations: u64,
    papers: usize,
    #[serde(rename = "uniqueRank")]
    unique_rank: usize,
    #[serde(rename = "tieAwareRank")]
    tie_aware_rank: usize,
    p100: Option<f64>,
    #[serde(rename = "p100prime")]
    p100_prime: Option<f64>,
    percentile: f64,
}

#[derive(Serialize)]
struct HistogramResponse {
    series: Vec<HistogramSeriesOut>,
}

#[derive(Serialize)]
struct HistogramSeriesOut {
    name: String,
    bins: Vec<HistogramBin>,
}

#[derive(Serialize)]
struct HistogramBin {
    low: f64,
    high: f64,
    count: usize,
}

fn parse_counts(input: &str) -> Result<Vec<CitationCount>, String> {
    let mut counts = Vec::new();
    for token in input.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
        if token.is_empty() {
            continue;
        }
        let value: u64 = token
            .parse()
            .map_err(|_| format!("'{token}' is not a non-negative integer citation count"))?;
        counts.push(CitationCount(value));
    }
    if counts.is_empty() {
        return Err("enter at least one citation count".to_string());
    }
    Ok(counts)
}

fn build_size_frequency(input: &str) -> Result<SizeFrequency, String> {
    SizeFrequency::from_citations(parse_counts(input)?).map_err(|e| e.to_string())
}

/// Scores a citation multiset: per distinct count, both ranks and all three
/// indicator values as JSON. Accepts counts separated by whitespace, commas
/// or semicolons.
#[wasm_bindgen]
pub fn score_set(input: &str) -> Result<String, String> {
    let sf = build_size_frequency(input)?;
    let degenerate = sf.unique_count() < 2;
    let ranks = RankTable::new(&sf);
    let percentile = percentile_cumfreq(&sf);
    let (p_map, pp_map) = if degenerate {
        (None, None)
    } else {
        (Some(p100(&sf).unwrap()), Some(p100_prime(&sf).unwrap()))
    };

    let rows = ranks
        .entries()
        .iter()
        .map(|e| ScoreTableRow {
            citations: e.citations.get(),
            papers: e.papers,
            unique_rank: e.unique_rank,
            tie_aware_rank: e.tie_aware_rank,
            p100: p_map.as_ref().map(|m| m.get(e.citations).unwrap()),
            p100_prime: pp_map.as_ref().map(|m| m.get(e.citations).unwrap()),
            percentile: percentile.get(e.citations).unwrap(),
        })
        .collect();

    let table = ScoreTable {
        paper_count: sf.paper_count(),
        unique_count: sf.unique_count(),
        degenerate,
        rows,
    };
    serde_json::to_string(&table).map_err(|e| e.to_string())
}

/// Bins `log_base(citations + 1)` twice, counting every paper and counting
/// each distinct count once, and returns both series as JSON.
#[wasm_bindgen]
pub fn distribution_bins(input: &str, log_base: f64, bin_width: f64) -> Result<String, String> {
    if !(log_base > 1.0) {
        return Err(format!("log base must exceed 1, got {log_base}"));
    }
    let sf = build_size_frequency(input)?;
    let rows = histogram_series(&sf, log_base, bin_width).map_err(|e| e.to_string())?;

    let collect = |wanted: HistogramSeries| -> HistogramSeriesOut {
        HistogramSeriesOut {
            name: wanted.to_string(),
            bins: rows
                .iter()
                .filter(|r| r.series == wanted)
                .map(|r| HistogramBin {
                    low: r.bin_low,
                    high: r.bin_high,
                    count: r.count,
                })
                .collect(),
        }
    };
    let response = HistogramResponse {
        series: vec![
            collect(HistogramSeries::AllPapers),
            collect(HistogramSeries::UniqueCitations),
        ],
    };
    serde_json::to_string(&response).map_err(|e| e.to_string())
}

/// Draws `count` citation counts from a discretized log-normal distribution
/// (floor of exp of a `location`/`shape` normal) and returns them as a JSON
/// array. The seed makes samples reproducible.
#[wasm_bindgen]
pub fn sample_citations(count: u32, location: f64, shape: f64, seed: u32) -> Result<String, String> {
    if count == 0 || count > MAX_SAMPLE_SIZE {
        return Err(format!("sample size must be in 1..={MAX_SAMPLE_SIZE}"));
    }
    if !location.is_finite() {
        return Err("location must be finite".to_string());
    }
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(format!("shape must be a positive number, got {shape}"));
    }
    let normal = Normal::new(location, shape).expect("validated parameters");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed as u64);
    let counts: Vec<u64> = (0..count)
        .map(|_| {
            normal
                .sample(&mut rng)
                .exp()
                .min(MAX_SAMPLED_CITATIONS)
                .floor() as u64
        })
        .collect();
    serde_json::to_string(&counts).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn scores_the_nine_paper_example() {
        let json = score_set("0 1 2 3 4,4,4; 7 10").unwrap();
        let table: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(table["paperCount"], 9);
        assert_eq!(table["uniqueCount"], 7);
        assert_eq!(table["degenerate"], false);

        let rows = table["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 7);
        let four = rows.iter().find(|r| r["citations"] == 4).unwrap();
        assert_eq!(four["papers"], 3);
        assert_eq!(four["uniqueRank"], 4);
        assert_eq!(four["tieAwareRank"], 4);
        assert_eq!(four["p100prime"], 50.0);
        let top = rows.last().unwrap();
        assert_eq!(top["p100"], 100.0);
        assert_eq!(top["percentile"], 100.0);
    }

    #[test]
    fn degenerate_sets_score_percentile_only() {
        let json = score_set("3 3 3").unwrap();
        let table: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(table["degenerate"], true);
        let row = &table["rows"][0];
        assert_eq!(row["p100"], Value::Null);
        assert_eq!(row["p100prime"], Value::Null);
        assert_eq!(row["percentile"], 100.0);
    }

    #[test]
    fn rejects_malformed_and_empty_input() {
        assert!(score_set("1 2 banana").is_err());
        assert!(score_set("1 2 -3").is_err());
        assert!(score_set("  ,; ").is_err());
    }

    #[test]
    fn distribution_bins_conserve_totals() {
        let json = distribution_bins("0 1 2 3 4 4 4 7 10", 10.0, 0.25).unwrap();
        let response: Value = serde_json::from_str(&json).unwrap();
        let series = response["series"].as_array().unwrap();
        assert_eq!(series[0]["name"], "all_papers");
        assert_eq!(series[1]["name"], "unique_citations");
        let total = |s: &Value| -> u64 {
            s["bins"]
                .as_array()
                .unwrap()
                .iter()
                .map(|b| b["count"].as_u64().unwrap())
                .sum()
        };
        assert_eq!(total(&series[0]), 9);
        assert_eq!(total(&series[1]), 7);
    }

    #[test]
    fn distribution_bins_validate_parameters() {
        assert!(distribution_bins("1 2", 1.0, 0.25).is_err());
        assert!(distribution_bins("1 2", 10.0, 0.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_citations(500, 1.8, 0.9, 11).unwrap();
        let b = sample_citations(500, 1.8, 0.9, 11).unwrap();
        let c = sample_citations(500, 1.8, 0.9, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);

        let counts: Vec<u64> = serde_json::from_str(&a).unwrap();
        assert_eq!(counts.len(), 500);
        // Sampled sets feed straight back into the scorer.
        assert!(score_set(&a.replace(['[', ']'], "")).is_ok());
    }

    #[test]
    fn sampling_rejects_bad_parameters() {
        assert!(sample_citations(0, 1.8, 0.9, 1).is_err());
        assert!(sample_citations(MAX_SAMPLE_SIZE + 1, 1.8, 0.9, 1).is_err());
        assert!(sample_citations(10, f64::NAN, 0.9, 1).is_err());
        assert!(sample_citations(10, 1.8, -1.0, 1).is_err());
    }
}
