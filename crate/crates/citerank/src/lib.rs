//! Citation-rank indicators over bibliometric reference sets.
//!
//! Citation impact can only be compared across fields and publication years
//! after normalization against a reference set: all papers sharing a
//! publication year and subject category. This crate scores papers on a
//! fixed 0..100 scale three ways:
//!
//! * **P100** ranks the *distinct* citation counts of a set and scales the
//!   rank by the highest one, ignoring how many papers share a count.
//! * **P100'** additionally advances ranks by tie-group size (papers with
//!   equal counts share the lowest rank of their group) and scales by
//!   `n - 1`, which removes P100's paradox where citing one paper could
//!   raise another paper's value.
//! * **percentile** is the classical cumulative-frequency measure: the
//!   fraction of papers at or below a count.
//!
//! [`indicators`] holds the pure per-set computations, [`dataset`] the
//! record parsing, reference-set grouping and batch scoring, and [`report`]
//! unit aggregation plus plot-ready distribution export. The `citerank`
//! binary in [`cli`] ties them together.

pub mod cli;
pub mod dataset;
pub mod indicators;
pub mod report;

pub use dataset::{
    build_reference_sets, parse_records, score_all, PublicationRecord, RecordFormat, ReferenceSet,
    ReferenceSetKey, ScoreRow,
};
pub use indicators::{
    log_transform, p100, p100_prime, percentile_cumfreq, top_share, CitationCount, IndicatorError,
    IndicatorKind, IndicatorValue, RankClassScheme, RankTable, ScaleValues, SizeFrequency,
};
pub use report::{
    aggregate_units, export_distributions, histogram_series, HistogramRow, HistogramSeries,
    UnitSummary,
};
