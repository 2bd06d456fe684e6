//! Per-unit aggregation, distribution export, and value rendering.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::dataset::{PublicationRecord, ReferenceSet, ScoreRow};
use crate::indicators::{
    log_transform, top_share, IndicatorError, IndicatorKind, RankClassScheme, SizeFrequency,
};

/// Reserved unit name for papers that carry no unit of their own; keeping
/// them in a visible bucket beats dropping them silently.
pub const UNITLESS: &str = "(none)";

#[derive(Debug, Error)]
pub enum ReportError {
    /// A score row whose paper id has no matching record.
    #[error("score row references unknown paper id '{0}'")]
    UnknownPaper(String),
    /// Histogram bins must have positive width.
    #[error("bin width must be positive, got {0}")]
    InvalidBinWidth(f64),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
}

/// Aggregated indicator statistics for one evaluated unit.
///
/// Means are taken over the papers' combined values; P100/P100' means are
/// absent when every paper of the unit sat only in degenerate sets. The
/// top share and class counts cover the papers that carry a combined value
/// for the selected indicator, so they always sum over all papers except
/// those degenerate-only cases.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSummary {
    pub unit: String,
    pub paper_count: usize,
    pub mean_p100: Option<f64>,
    pub mean_p100_prime: Option<f64>,
    pub mean_percentile: f64,
    pub top_share: Option<f64>,
    /// Paper count per rank class, indexed by class.
    pub class_counts: Vec<usize>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Groups scored papers by their evaluated unit and aggregates the combined
/// values: means per indicator, the share at or above `threshold`, and rank
/// class counts, the latter two over the `indicator` selected for ranking.
pub fn aggregate_units(
    rows: &[ScoreRow],
    records: &[PublicationRecord],
    scheme: &RankClassScheme,
    threshold: f64,
    indicator: IndicatorKind,
) -> Result<Vec<UnitSummary>, ReportError> {
    if !(0.0 < threshold && threshold < 100.0) {
        return Err(IndicatorError::InvalidThreshold(threshold).into());
    }

    let units_by_paper: BTreeMap<&str, Option<&str>> =
        records.iter().map(|r| (r.id(), r.unit())).collect();

    let mut grouped: BTreeMap<String, Vec<&ScoreRow>> = BTreeMap::new();
    for row in rows {
        let unit = units_by_paper
            .get(row.paper_id.as_str())
            .ok_or_else(|| ReportError::UnknownPaper(row.paper_id.clone()))?
            .unwrap_or(UNITLESS);
        grouped.entry(unit.to_string()).or_default().push(row);
    }

    let mut summaries = Vec::with_capacity(grouped.len());
    for (unit, unit_rows) in grouped {
        let p100: Vec<f64> = unit_rows.iter().filter_map(|r| r.combined.p100).collect();
        let p100_prime: Vec<f64> = unit_rows
            .iter()
            .filter_map(|r| r.combined.p100_prime)
            .collect();
        let percentile: Vec<f64> = unit_rows.iter().map(|r| r.combined.percentile).collect();

        let selected: &[f64] = match indicator {
            IndicatorKind::P100 => &p100,
            IndicatorKind::P100Prime => &p100_prime,
            IndicatorKind::Percentile => &percentile,
        };
        let share = if selected.is_empty() {
            None
        } else {
            Some(top_share(selected, threshold)?)
        };
        let mut class_counts = vec![0usize; scheme.class_count()];
        for value in selected {
            class_counts[scheme.assign(*value)] += 1;
        }

        summaries.push(UnitSummary {
            unit,
            paper_count: unit_rows.len(),
            mean_p100: mean(&p100),
            mean_p100_prime: mean(&p100_prime),
            mean_percentile: mean(&percentile).expect("units are never empty"),
            top_share: share,
            class_counts,
        });
    }
    Ok(summaries)
}

/// Which citation multiset a histogram series was computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramSeries {
    /// Every paper contributes its citation count.
    AllPapers,
    /// Each distinct citation count contributes once.
    UniqueCitations,
}

impl fmt::Display for HistogramSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            HistogramSeries::AllPapers => "all_papers",
            HistogramSeries::UniqueCitations => "unique_citations",
        };
        f.write_str(name)
    }
}

/// One histogram bin over log-transformed citation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub series: HistogramSeries,
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
}

/// Plot-ready comparison of the full citation distribution against the
/// unique-citation distribution of one reference set, binned over
/// `log_base(citations + 1)`.
///
/// Both series share the data's bin range; bins within a series are
/// contiguous, zero-count bins included. The all-papers counts sum to the
/// set size, the unique-citations counts to the number of distinct values.
pub fn export_distributions(
    set: &ReferenceSet,
    base: f64,
    bin_width: f64,
) -> Result<Vec<HistogramRow>, ReportError> {
    let sf = SizeFrequency::from_citations(set.citations())?;
    histogram_series(&sf, base, bin_width)
}

/// [`export_distributions`] for a pre-built size-frequency distribution.
pub fn histogram_series(
    sf: &SizeFrequency,
    base: f64,
    bin_width: f64,
) -> Result<Vec<HistogramRow>, ReportError> {
    if !(bin_width > 0.0) {
        return Err(ReportError::InvalidBinWidth(bin_width));
    }

    let log_values: Vec<(f64, usize)> = sf
        .entries()
        .iter()
        .map(|e| (log_transform(e.citations, base), e.papers))
        .collect();

    let mut rows = bin_counts(
        log_values.iter().map(|(v, papers)| (*v, *papers)),
        bin_width,
        HistogramSeries::AllPapers,
    );
    rows.extend(bin_counts(
        log_values.iter().map(|(v, _)| (*v, 1)),
        bin_width,
        HistogramSeries::UniqueCitations,
    ));
    Ok(rows)
}

fn bin_counts(
    weighted_values: impl Iterator<Item = (f64, usize)> + Clone,
    width: f64,
    series: HistogramSeries,
) -> Vec<HistogramRow> {
    let bin_index = |v: f64| (v / width).floor() as i64;
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for (v, _) in weighted_values.clone() {
        lo = lo.min(bin_index(v));
        hi = hi.max(bin_index(v));
    }
    debug_assert!(lo <= hi, "histogram input is never empty");

    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for (v, weight) in weighted_values {
        counts[(bin_index(v) - lo) as usize] += weight;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(offset, count)| {
            let k = lo + offset as i64;
            HistogramRow {
                series,
                bin_low: k as f64 * width,
                bin_high: (k + 1) as f64 * width,
                count,
            }
        })
        .collect()
}

/// Rounds half-up to `decimals` places; safe for the non-negative scale
/// values used throughout.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let factor = 10f64.powi(decimals as i32);
    (value * factor).round() / factor
}

/// Renders a 0..100 scale value: two decimals by default, shortest
/// round-trip representation under `full_precision`.
pub fn render_value(value: f64, full_precision: bool) -> String {
    if full_precision {
        format!("{value}")
    } else {
        format!("{:.2}", round_half_up(value, 2))
    }
}

/// Renders a 0..1 fraction (top shares) at four decimals by default.
pub fn render_fraction(value: f64, full_precision: bool) -> String {
    if full_precision {
        format!("{value}")
    } else {
        format!("{:.4}", round_half_up(value, 4))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_reference_sets, score_all, ReferenceSetKey};
    use crate::indicators::CitationCount;
    use proptest::prelude::*;

    fn record(
        id: &str,
        citations: u64,
        unit: Option<&str>,
    ) -> crate::dataset::PublicationRecord {
        crate::dataset::PublicationRecord::new(
            id,
            1990,
            vec!["chemistry".to_string()],
            CitationCount(citations),
            unit.map(|u| u.to_string()),
        )
        .unwrap()
    }

    fn summarize(
        citations: &[u64],
        unit: Option<&str>,
        indicator: IndicatorKind,
    ) -> Vec<UnitSummary> {
        let records: Vec<_> = citations
            .iter()
            .enumerate()
            .map(|(i, c)| record(&format!("p{i}"), *c, unit))
            .collect();
        let rows = score_all(&build_reference_sets(&records));
        aggregate_units(
            &rows,
            &records,
            &RankClassScheme::default(),
            90.0,
            indicator,
        )
        .unwrap()
    }

    #[test]
    fn unit_mean_over_nine_paper_set() {
        let summaries = summarize(
            &[0, 1, 2, 3, 4, 4, 4, 7, 10],
            Some("instA"),
            IndicatorKind::P100Prime,
        );
        assert_eq!(summaries.len(), 1);
        let s = &summaries[0];
        assert_eq!(s.unit, "instA");
        assert_eq!(s.paper_count, 9);
        // (0 + 12.5 + 25 + 37.5 + 3*50 + 87.5 + 100) / 9
        assert!((s.mean_p100_prime.unwrap() - 412.5 / 9.0).abs() < 1e-12);
        assert_eq!(round_half_up(s.mean_p100_prime.unwrap(), 2), 45.83);
        // Only the 10-citation paper reaches 90 on P100'.
        assert!((s.top_share.unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(s.class_counts.iter().sum::<usize>(), 9);
        // 0, 12.5, 25, 37.5 below 50; the three 50s join the upper class;
        // 87.5 in [75, 90); 100 at the top.
        assert_eq!(s.class_counts, vec![4, 3, 1, 0, 1]);
    }

    #[test]
    fn single_paper_unit() {
        let summaries = summarize(&[3, 9], Some("solo"), IndicatorKind::P100Prime);
        let s = &summaries[0];
        assert_eq!(s.paper_count, 2);
        assert_eq!(s.mean_p100_prime.unwrap(), 50.0);
    }

    #[test]
    fn distinct_counts_give_mean_50() {
        let summaries = summarize(
            &[1, 2, 3, 4, 5, 6],
            Some("instB"),
            IndicatorKind::P100Prime,
        );
        assert!((summaries[0].mean_p100_prime.unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn unitless_papers_group_under_reserved_name() {
        let records = vec![
            record("p1", 2, Some("instA")),
            record("p2", 5, None),
            record("p3", 9, None),
        ];
        let rows = score_all(&build_reference_sets(&records));
        let summaries = aggregate_units(
            &rows,
            &records,
            &RankClassScheme::default(),
            90.0,
            IndicatorKind::P100Prime,
        )
        .unwrap();
        let names: Vec<&str> = summaries.iter().map(|s| s.unit.as_str()).collect();
        assert_eq!(names, vec![UNITLESS, "instA"]);
        assert_eq!(summaries[0].paper_count, 2);
        let total: usize = summaries.iter().map(|s| s.paper_count).sum();
        assert_eq!(total, records.len());
    }

    #[test]
    fn degenerate_only_unit_has_no_p100_stats() {
        let summaries = summarize(&[3, 3, 3], Some("instA"), IndicatorKind::P100Prime);
        let s = &summaries[0];
        assert_eq!(s.mean_p100, None);
        assert_eq!(s.mean_p100_prime, None);
        assert_eq!(s.mean_percentile, 100.0);
        assert_eq!(s.top_share, None);
        assert_eq!(s.class_counts.iter().sum::<usize>(), 0);
    }

    #[test]
    fn degenerate_only_unit_still_ranks_by_percentile() {
        let summaries = summarize(&[3, 3, 3], Some("instA"), IndicatorKind::Percentile);
        let s = &summaries[0];
        assert_eq!(s.top_share, Some(1.0));
        assert_eq!(s.class_counts.iter().sum::<usize>(), 3);
    }

    #[test]
    fn unknown_paper_id_is_reported() {
        let records = vec![record("p1", 2, None), record("p2", 5, None)];
        let rows = score_all(&build_reference_sets(&records));
        let err = aggregate_units(
            &rows,
            &records[..1],
            &RankClassScheme::default(),
            90.0,
            IndicatorKind::P100Prime,
        )
        .unwrap_err();
        assert!(matches!(err, ReportError::UnknownPaper(id) if id == "p2"));
    }

    fn reference_set(citations: &[u64]) -> ReferenceSet {
        let records: Vec<_> = citations
            .iter()
            .enumerate()
            .map(|(i, c)| record(&format!("p{i}"), *c, None))
            .collect();
        build_reference_sets(&records)
            .remove(&ReferenceSetKey::new(1990, "chemistry"))
            .unwrap()
    }

    #[test]
    fn histogram_totals_match_set_and_unique_counts() {
        let rows = export_distributions(&reference_set(&[0, 1, 2, 3, 4, 4, 4, 7, 10]), 10.0, 0.25)
            .unwrap();
        let total = |series: HistogramSeries| -> usize {
            rows.iter()
                .filter(|r| r.series == series)
                .map(|r| r.count)
                .sum()
        };
        assert_eq!(total(HistogramSeries::AllPapers), 9);
        assert_eq!(total(HistogramSeries::UniqueCitations), 7);
    }

    #[test]
    fn histogram_of_single_paper_has_one_occupied_bin_per_series() {
        let rows = export_distributions(&reference_set(&[5]), 10.0, 0.25).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert_eq!(row.count, 1);
            let v = log_transform(CitationCount(5), 10.0);
            assert!(row.bin_low <= v && v < row.bin_high);
        }
    }

    #[test]
    fn histogram_bins_are_contiguous_within_a_series() {
        let rows =
            export_distributions(&reference_set(&[0, 1, 2, 3, 50, 900]), 10.0, 0.25).unwrap();
        for series in [HistogramSeries::AllPapers, HistogramSeries::UniqueCitations] {
            let bins: Vec<&HistogramRow> =
                rows.iter().filter(|r| r.series == series).collect();
            assert!(!bins.is_empty());
            for pair in bins.windows(2) {
                assert_eq!(pair[0].bin_high, pair[1].bin_low);
            }
            assert!(bins.iter().all(|b| b.bin_low < b.bin_high));
        }
    }

    #[test]
    fn rejects_non_positive_bin_width() {
        let set = reference_set(&[1, 2]);
        assert!(matches!(
            export_distributions(&set, 10.0, 0.0),
            Err(ReportError::InvalidBinWidth(_))
        ));
        assert!(matches!(
            export_distributions(&set, 10.0, -0.5),
            Err(ReportError::InvalidBinWidth(_))
        ));
    }

    #[test]
    fn rounding_is_half_up_at_two_decimals() {
        assert_eq!(round_half_up(16.666_666_7, 2), 16.67);
        assert_eq!(round_half_up(88.888_888_9, 2), 88.89);
        assert_eq!(round_half_up(33.333_333_3, 2), 33.33);
        assert_eq!(round_half_up(0.005, 2), 0.01);
        assert_eq!(round_half_up(45.833_333_3, 2), 45.83);
    }

    #[test]
    fn rendering_follows_precision_flag() {
        assert_eq!(render_value(200.0 / 3.0, false), "66.67");
        assert_eq!(render_value(200.0 / 3.0, true), "66.66666666666667");
        assert_eq!(render_fraction(1.0 / 9.0, false), "0.1111");
    }

    proptest! {
        #[test]
        fn rendered_values_reparse_within_half_a_cent(value in 0.0f64..100.0) {
            let rendered = render_value(value, false);
            let reparsed: f64 = rendered.parse().unwrap();
            prop_assert!((reparsed - value).abs() <= 0.005);
        }

        #[test]
        fn histogram_conserves_counts(citations in proptest::collection::vec(0u64..300, 1..80),
                                      width in 0.05f64..1.0) {
            let sf = SizeFrequency::from_citations(citations.iter().map(|c| CitationCount(*c))).unwrap();
            let rows = histogram_series(&sf, 10.0, width).unwrap();
            let total = |series: HistogramSeries| -> usize {
                rows.iter().filter(|r| r.series == series).map(|r| r.count).sum()
            };
            prop_assert_eq!(total(HistogramSeries::AllPapers), sf.paper_count());
            prop_assert_eq!(total(HistogramSeries::UniqueCitations), sf.unique_count());
        }
    }
}
