//! Citation-rank indicators computed over a single reference set.
//!
//! A reference set is summarized as a [`SizeFrequency`] distribution: the
//! distinct citation counts in ascending order, each paired with the number
//! of papers holding that count. Two ranks are derived from it:
//!
//! * the *unique rank* `i`, the 0-based position of a citation count among
//!   the distinct counts, and
//! * the *tie-aware rank* `j`, the number of papers with strictly fewer
//!   citations (tied papers share the lowest rank of their group).
//!
//! P100 scales `i` by the highest unique rank, P100' scales `j` by `n - 1`
//! papers, and the classical percentile is the cumulative paper fraction at
//! or below a count. All three produce values on a fixed 0..100 scale, so
//! the least and most cited papers of any non-degenerate set land on 0 and
//! 100 regardless of how the counts are distributed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default rank-class boundaries, splitting the scale at the median,
/// quartile, decile and percentile marks.
pub const DEFAULT_RANK_CLASS_BOUNDARIES: [f64; 4] = [50.0, 75.0, 90.0, 99.0];

/// Default threshold for [`top_share`]: membership in the top 10% of the scale.
pub const DEFAULT_TOP_SHARE_THRESHOLD: f64 = 90.0;

/// Default logarithm base for [`log_transform`].
pub const DEFAULT_LOG_BASE: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndicatorError {
    /// The reference set contains no papers.
    #[error("reference set is empty")]
    EmptyReferenceSet,
    /// Every paper in the set has the same citation count, so the unique
    /// citation distribution has a single value and P100/P100' are undefined.
    #[error("all papers share one citation count; P100 and P100' cannot be calculated")]
    DegenerateReferenceSet,
    /// Rank-class boundaries must be strictly increasing and inside (0, 100).
    #[error("invalid rank-class scheme: {0}")]
    InvalidScheme(String),
    /// Top-share thresholds must lie strictly between 0 and 100.
    #[error("top-share threshold must lie in (0, 100), got {0}")]
    InvalidThreshold(f64),
}

/// Number of citations received by a paper.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct CitationCount(pub u64);

impl CitationCount {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl From<u64> for CitationCount {
    fn from(value: u64) -> Self {
        CitationCount(value)
    }
}

impl fmt::Display for CitationCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One row of a size-frequency distribution: a distinct citation count and
/// the number of papers holding it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeFrequencyEntry {
    pub citations: CitationCount,
    pub papers: usize,
}

/// Size-frequency distribution of a reference set: distinct citation counts
/// in ascending order with their paper frequencies.
///
/// Construction guarantees the invariants downstream code relies on:
/// citation counts strictly increasing, every frequency at least 1, and the
/// frequencies summing to the number of papers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeFrequency {
    entries: Vec<SizeFrequencyEntry>,
    paper_count: usize,
}

impl SizeFrequency {
    /// Builds the distribution from a multiset of citation counts.
    pub fn from_citations<I>(citations: I) -> Result<Self, IndicatorError>
    where
        I: IntoIterator<Item = CitationCount>,
    {
        let mut counts: BTreeMap<CitationCount, usize> = BTreeMap::new();
        for c in citations {
            *counts.entry(c).or_insert(0) += 1;
        }
        if counts.is_empty() {
            return Err(IndicatorError::EmptyReferenceSet);
        }
        let mut paper_count = 0;
        let entries = counts
            .into_iter()
            .map(|(citations, papers)| {
                paper_count += papers;
                SizeFrequencyEntry { citations, papers }
            })
            .collect();
        Ok(SizeFrequency {
            entries,
            paper_count,
        })
    }

    pub fn entries(&self) -> &[SizeFrequencyEntry] {
        &self.entries
    }

    /// Total number of papers (`n`).
    pub fn paper_count(&self) -> usize {
        self.paper_count
    }

    /// Number of distinct citation counts.
    pub fn unique_count(&self) -> usize {
        self.entries.len()
    }

    /// Expands back to one citation count per paper, ascending.
    pub fn citations_per_paper(&self) -> impl Iterator<Item = CitationCount> + '_ {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat(e.citations).take(e.papers))
    }
}

/// A distinct citation count with both of its ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedCitation {
    pub citations: CitationCount,
    pub papers: usize,
    /// 0-based position among the distinct citation counts (`i`).
    pub unique_rank: usize,
    /// Number of papers with strictly fewer citations (`j`). Tied papers
    /// share this lowest rank; the next distinct count resumes at `j`
    /// plus the size of the tie group.
    pub tie_aware_rank: usize,
}

/// Both rank sequences for a size-frequency distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    entries: Vec<RankedCitation>,
    paper_count: usize,
}

impl RankTable {
    pub fn new(sf: &SizeFrequency) -> Self {
        let mut entries = Vec::with_capacity(sf.unique_count());
        let mut papers_below = 0;
        for (i, e) in sf.entries().iter().enumerate() {
            entries.push(RankedCitation {
                citations: e.citations,
                papers: e.papers,
                unique_rank: i,
                tie_aware_rank: papers_below,
            });
            papers_below += e.papers;
        }
        debug_assert_eq!(papers_below, sf.paper_count());
        RankTable {
            entries,
            paper_count: sf.paper_count(),
        }
    }

    pub fn entries(&self) -> &[RankedCitation] {
        &self.entries
    }

    pub fn paper_count(&self) -> usize {
        self.paper_count
    }

    /// Highest unique rank (`i_max`), i.e. distinct count minus one.
    pub fn unique_rank_max(&self) -> usize {
        self.entries.len() - 1
    }

    /// Highest possible tie-aware rank (`j_max = n - 1`). The largest
    /// realized `j` equals this only when exactly one paper holds the top
    /// citation count.
    pub fn tie_aware_rank_max(&self) -> usize {
        self.paper_count - 1
    }
}

/// Which indicator a scale value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndicatorKind {
    P100,
    #[serde(rename = "p100prime")]
    P100Prime,
    Percentile,
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IndicatorKind::P100 => "p100",
            IndicatorKind::P100Prime => "p100prime",
            IndicatorKind::Percentile => "percentile",
        };
        f.write_str(name)
    }
}

/// A scale value on 0..100, tagged with the indicator that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorValue {
    pub kind: IndicatorKind,
    pub value: f64,
}

impl IndicatorValue {
    pub fn new(kind: IndicatorKind, value: f64) -> Self {
        debug_assert!(
            (0.0..=100.0).contains(&value),
            "indicator value out of range: {value}"
        );
        IndicatorValue { kind, value }
    }
}

/// Scale values for one reference set, keyed by distinct citation count.
///
/// Keying by citation count makes the tie property structural: papers with
/// equal counts cannot receive different values because there is only one
/// entry per count. Values for individual papers are broadcast from here.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleValues {
    kind: IndicatorKind,
    entries: Vec<(CitationCount, f64)>,
}

impl ScaleValues {
    fn new(kind: IndicatorKind, entries: Vec<(CitationCount, f64)>) -> Self {
        ScaleValues { kind, entries }
    }

    pub fn kind(&self) -> IndicatorKind {
        self.kind
    }

    /// Value for a citation count present in the set.
    pub fn get(&self, citations: CitationCount) -> Option<f64> {
        self.entries
            .binary_search_by_key(&citations, |(c, _)| *c)
            .ok()
            .map(|idx| self.entries[idx].1)
    }

    pub fn indicator(&self, citations: CitationCount) -> Option<IndicatorValue> {
        self.get(citations).map(|v| IndicatorValue::new(self.kind, v))
    }

    /// Entries in ascending citation order.
    pub fn iter(&self) -> impl Iterator<Item = (CitationCount, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// P100: each unique rank `i` divided by the highest rank `i_max`, times 100.
///
/// The distinct citation counts carry the ranks, so paper frequencies are
/// ignored entirely. Requires at least two distinct counts; otherwise the
/// set is degenerate and the indicator is undefined.
pub fn p100(sf: &SizeFrequency) -> Result<ScaleValues, IndicatorError> {
    if sf.unique_count() < 2 {
        return Err(IndicatorError::DegenerateReferenceSet);
    }
    let ranks = RankTable::new(sf);
    let i_max = ranks.unique_rank_max() as f64;
    let entries = ranks
        .entries()
        .iter()
        .map(|e| (e.citations, (e.unique_rank as f64 * 100.0) / i_max))
        .collect();
    Ok(ScaleValues::new(IndicatorKind::P100, entries))
}

/// P100': each tie-aware rank `j` divided by `j_max = n - 1`, times 100.
///
/// Unlike P100, the rank advances by the size of each tie group, so an
/// extra citation for one paper can never raise another paper's value.
/// The top value is 100 exactly when a single paper holds the highest
/// count; a tied top group sits below 100 by construction of `j`.
pub fn p100_prime(sf: &SizeFrequency) -> Result<ScaleValues, IndicatorError> {
    if sf.unique_count() < 2 {
        return Err(IndicatorError::DegenerateReferenceSet);
    }
    let ranks = RankTable::new(sf);
    let j_max = ranks.tie_aware_rank_max() as f64;
    let entries = ranks
        .entries()
        .iter()
        .map(|e| (e.citations, (e.tie_aware_rank as f64 * 100.0) / j_max))
        .collect();
    Ok(ScaleValues::new(IndicatorKind::P100Prime, entries))
}

/// Classical percentile: 100 times the fraction of papers with citations at
/// or below each count. Defined for every non-empty set, including
/// degenerate ones (a single shared count maps to 100).
pub fn percentile_cumfreq(sf: &SizeFrequency) -> ScaleValues {
    let ranks = RankTable::new(sf);
    let n = ranks.paper_count() as f64;
    let entries = ranks
        .entries()
        .iter()
        .map(|e| {
            let at_or_below = e.tie_aware_rank + e.papers;
            (e.citations, (at_or_below as f64 * 100.0) / n)
        })
        .collect();
    ScaleValues::new(IndicatorKind::Percentile, entries)
}

/// Boundaries partitioning the 0..100 scale into rank classes.
///
/// `k` boundaries define `k + 1` classes indexed from 0 (lowest) upward. A
/// value equal to a boundary joins the upper class, so with the default
/// scheme a value of exactly 90 counts as top-10%.
#[derive(Debug, Clone, PartialEq)]
pub struct RankClassScheme {
    boundaries: Vec<f64>,
}

impl RankClassScheme {
    pub fn new(boundaries: Vec<f64>) -> Result<Self, IndicatorError> {
        for pair in boundaries.windows(2) {
            if pair[0] >= pair[1] {
                return Err(IndicatorError::InvalidScheme(format!(
                    "boundaries must be strictly increasing: {} before {}",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(b) = boundaries.iter().find(|b| !(0.0 < **b && **b < 100.0)) {
            return Err(IndicatorError::InvalidScheme(format!(
                "boundary {b} outside the open interval (0, 100)"
            )));
        }
        Ok(RankClassScheme { boundaries })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn class_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// Assigns a scale value in [0, 100] to its class index.
    pub fn assign(&self, value: f64) -> usize {
        self.boundaries.iter().take_while(|b| value >= **b).count()
    }
}

impl Default for RankClassScheme {
    fn default() -> Self {
        RankClassScheme {
            boundaries: DEFAULT_RANK_CLASS_BOUNDARIES.to_vec(),
        }
    }
}

/// Fraction of values at or above `threshold`, the unweighted analogue of a
/// top-x% share. Each value counts once regardless of how it was produced.
pub fn top_share(values: &[f64], threshold: f64) -> Result<f64, IndicatorError> {
    if !(0.0 < threshold && threshold < 100.0) {
        return Err(IndicatorError::InvalidThreshold(threshold));
    }
    if values.is_empty() {
        return Err(IndicatorError::EmptyReferenceSet);
    }
    let hits = values.iter().filter(|v| **v >= threshold).count();
    Ok(hits as f64 / values.len() as f64)
}

/// `log_base(citations + 1)`, the transform used to present citation
/// distributions; zero citations map to 0.
///
/// The base only affects presentation, never the indicators. Must exceed 1.
pub fn log_transform(citations: CitationCount, base: f64) -> f64 {
    assert!(base > 1.0, "log base must exceed 1, got {base}");
    let x = citations.get() as f64 + 1.0;
    // log10/log2 intrinsics are exactly 1.0 at x = base; the generic
    // ln-ratio form can miss by an ulp.
    if base == 10.0 {
        x.log10()
    } else if base == 2.0 {
        x.log2()
    } else {
        x.log(base)
    }
}
