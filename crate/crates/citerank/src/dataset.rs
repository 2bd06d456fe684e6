//! Publication records, reference-set grouping, and per-paper scoring.
//!
//! Records arrive as CSV (header `id,year,categories,citations,unit`,
//! categories `;`-separated inside the field) or as JSON lines with the same
//! field names. Papers are grouped into reference sets by publication year
//! and subject category; a paper with several categories joins one set per
//! category and its per-set scores are combined by an unweighted mean.

use std::collections::{BTreeMap, BTreeSet};
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{p100, p100_prime, percentile_cumfreq, CitationCount, SizeFrequency};

#[derive(Debug, Error)]
pub enum DatasetError {
    /// A malformed input row; names the 1-based line and the offending column.
    #[error("line {line}, column '{column}': {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },
    /// The same paper id appeared on more than one record.
    #[error("duplicate paper id '{0}'")]
    DuplicateId(String),
    /// A record violating a field invariant, from direct construction.
    #[error("invalid record: field '{field}': {message}")]
    InvalidRecord { field: String, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl DatasetError {
    fn parse(line: u64, column: &str, message: impl Into<String>) -> Self {
        DatasetError::Parse {
            line,
            column: column.to_string(),
            message: message.into(),
        }
    }

    /// Attaches a line number to an [`DatasetError::InvalidRecord`].
    fn at_line(self, line: u64) -> Self {
        match self {
            DatasetError::InvalidRecord { field, message } => DatasetError::Parse {
                line,
                column: field,
                message,
            },
            other => other,
        }
    }
}

/// Input and output serialization format for record and row files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    JsonLines,
}

pub const CSV_HEADER: [&str; 5] = ["id", "year", "categories", "citations", "unit"];

/// One publication: identity, reference-set coordinates, citation count, and
/// the optional evaluated unit (scientist or institution) it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PublicationRecord {
    id: String,
    year: i32,
    categories: Vec<String>,
    citations: CitationCount,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
}

impl PublicationRecord {
    /// Validates and normalizes the fields: strings are trimmed, an empty
    /// unit becomes `None`, and the category list must be non-empty with no
    /// duplicates.
    pub fn new(
        id: impl Into<String>,
        year: i32,
        categories: Vec<String>,
        citations: CitationCount,
        unit: Option<String>,
    ) -> Result<Self, DatasetError> {
        let invalid = |field: &str, message: String| DatasetError::InvalidRecord {
            field: field.to_string(),
            message,
        };

        let id = id.into().trim().to_string();
        if id.is_empty() {
            return Err(invalid("id", "paper id must be non-empty".to_string()));
        }

        let categories: Vec<String> = categories
            .into_iter()
            .map(|c| c.trim().to_string())
            .collect();
        if categories.is_empty() {
            return Err(invalid(
                "categories",
                "at least one subject category is required".to_string(),
            ));
        }
        if let Some(empty_idx) = categories.iter().position(|c| c.is_empty()) {
            return Err(invalid(
                "categories",
                format!("category {} is empty after trimming", empty_idx + 1),
            ));
        }
        let mut seen = BTreeSet::new();
        for c in &categories {
            if !seen.insert(c.as_str()) {
                return Err(invalid(
                    "categories",
                    format!("duplicate category '{c}' within one record"),
                ));
            }
        }

        let unit = unit
            .map(|u| u.trim().to_string())
            .filter(|u| !u.is_empty());

        Ok(PublicationRecord {
            id,
            year,
            categories,
            citations,
            unit,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn citations(&self) -> CitationCount {
        self.citations
    }

    pub fn unit(&self) -> Option<&str> {
        self.unit.as_deref()
    }
}

/// Raw shape of a JSON-lines record. Categories may be a JSON array or a
/// single `;`-joined string, mirroring the CSV field.
#[derive(Deserialize)]
struct RawJsonRecord {
    id: String,
    year: i32,
    categories: RawCategories,
    citations: i64,
    #[serde(default)]
    unit: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCategories {
    List(Vec<String>),
    Joined(String),
}

impl RawCategories {
    fn into_list(self) -> Vec<String> {
        match self {
            RawCategories::List(list) => list,
            RawCategories::Joined(joined) => split_categories(&joined),
        }
    }
}

fn split_categories(field: &str) -> Vec<String> {
    field
        .split(';')
        .map(|c| c.trim().to_string())
        .filter(|c| !c.is_empty())
        .collect()
}

fn citations_from_i64(raw: i64, line: u64) -> Result<CitationCount, DatasetError> {
    if raw < 0 {
        return Err(DatasetError::parse(
            line,
            "citations",
            format!("citation count must be non-negative, got {raw}"),
        ));
    }
    Ok(CitationCount(raw as u64))
}

/// Parses publication records from a character stream.
///
/// Fails fast with the line number and column of the first malformed value,
/// and rejects duplicated paper ids across the whole input.
pub fn parse_records<R: io::Read>(
    input: R,
    format: RecordFormat,
) -> Result<Vec<PublicationRecord>, DatasetError> {
    let records = match format {
        RecordFormat::Csv => parse_csv(input)?,
        RecordFormat::JsonLines => parse_json_lines(input)?,
    };
    let mut seen = BTreeSet::new();
    for record in &records {
        if !seen.insert(record.id.as_str()) {
            return Err(DatasetError::DuplicateId(record.id.clone()));
        }
    }
    Ok(records)
}

fn parse_csv<R: io::Read>(input: R) -> Result<Vec<PublicationRecord>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let headers = reader
        .headers()
        .map_err(|e| csv_error_to_parse(e, "header row is required"))?
        .clone();
    let column = |name: &str| -> Result<usize, DatasetError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::parse(1, name, "missing column"))
    };
    let id_idx = column("id")?;
    let year_idx = column("year")?;
    let categories_idx = column("categories")?;
    let citations_idx = column("citations")?;
    let unit_idx = column("unit")?;

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error_to_parse(e, "malformed CSV record"))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize, name: &str| -> Result<&str, DatasetError> {
            row.get(idx)
                .ok_or_else(|| DatasetError::parse(line, name, "missing field"))
        };

        let id = field(id_idx, "id")?.to_string();
        let year: i32 = field(year_idx, "year")?.parse().map_err(|_| {
            DatasetError::parse(
                line,
                "year",
                format!("expected an integer year, got '{}'", &row[year_idx]),
            )
        })?;
        let categories = split_categories(field(categories_idx, "categories")?);
        let citations_raw: i64 = field(citations_idx, "citations")?.parse().map_err(|_| {
            DatasetError::parse(
                line,
                "citations",
                format!("expected an integer, got '{}'", &row[citations_idx]),
            )
        })?;
        let citations = citations_from_i64(citations_raw, line)?;
        let unit = Some(field(unit_idx, "unit")?.to_string());

        let record = PublicationRecord::new(id, year, categories, citations, unit)
            .map_err(|e| e.at_line(line))?;
        records.push(record);
    }
    Ok(records)
}

fn csv_error_to_parse(error: csv::Error, context: &str) -> DatasetError {
    let line = error.position().map(|p| p.line()).unwrap_or(0);
    DatasetError::parse(line, "record", format!("{context}: {error}"))
}

fn parse_json_lines<R: io::Read>(input: R) -> Result<Vec<PublicationRecord>, DatasetError> {
    use io::BufRead;

    let reader = io::BufReader::new(input);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let raw: RawJsonRecord = serde_json::from_str(&text)
            .map_err(|e| DatasetError::parse(line_no, "record", e.to_string()))?;
        let citations = citations_from_i64(raw.citations, line_no)?;
        let record = PublicationRecord::new(
            raw.id,
            raw.year,
            raw.categories.into_list(),
            citations,
            raw.unit,
        )
        .map_err(|e| e.at_line(line_no))?;
        records.push(record);
    }
    Ok(records)
}

/// Serializes records in the same formats [`parse_records`] accepts, so a
/// write/parse round trip reproduces the records exactly.
pub fn write_records<W: io::Write>(
    records: &[PublicationRecord],
    format: RecordFormat,
    writer: &mut W,
) -> Result<(), DatasetError> {
    match format {
        RecordFormat::Csv => {
            let mut out = csv::Writer::from_writer(writer);
            out.write_record(CSV_HEADER)?;
            for r in records {
                out.write_record([
                    r.id.as_str(),
                    &r.year.to_string(),
                    &r.categories.join(";"),
                    &r.citations.to_string(),
                    r.unit.as_deref().unwrap_or(""),
                ])?;
            }
            out.flush()?;
        }
        RecordFormat::JsonLines => {
            for r in records {
                serde_json::to_writer(&mut *writer, &JsonRecordOut::from(r))
                    .map_err(|e| io::Error::other(e))?;
                writer.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    id: &'a str,
    year: i32,
    categories: &'a [String],
    citations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit: Option<&'a str>,
}

impl<'a> From<&'a PublicationRecord> for JsonRecordOut<'a> {
    fn from(r: &'a PublicationRecord) -> Self {
        JsonRecordOut {
            id: &r.id,
            year: r.year,
            categories: &r.categories,
            citations: r.citations.get(),
            unit: r.unit.as_deref(),
        }
    }
}

/// Reference-set coordinates: publication year and subject category.
///
/// The derived ordering (year first, then category) fixes the iteration
/// order of every keyed map in the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ReferenceSetKey {
    pub year: i32,
    pub category: String,
}

impl ReferenceSetKey {
    pub fn new(year: i32, category: impl Into<String>) -> Self {
        ReferenceSetKey {
            year,
            category: category.into(),
        }
    }
}

/// One member of a reference set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceSetMember {
    pub paper_id: String,
    pub citations: CitationCount,
}

/// All papers sharing a publication year and subject category; the universe
/// within which citation impact is normalized. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceSet {
    key: ReferenceSetKey,
    members: Vec<ReferenceSetMember>,
}

impl ReferenceSet {
    pub fn key(&self) -> &ReferenceSetKey {
        &self.key
    }

    pub fn members(&self) -> &[ReferenceSetMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn citations(&self) -> impl Iterator<Item = CitationCount> + '_ {
        self.members.iter().map(|m| m.citations)
    }
}

/// Groups records into reference sets. A paper carrying `k` categories
/// appears in `k` sets; members keep input order within each set.
pub fn build_reference_sets(
    records: &[PublicationRecord],
) -> BTreeMap<ReferenceSetKey, ReferenceSet> {
    let mut sets: BTreeMap<ReferenceSetKey, ReferenceSet> = BTreeMap::new();
    for record in records {
        for category in record.categories() {
            let key = ReferenceSetKey::new(record.year(), category.clone());
            let set = sets.entry(key.clone()).or_insert_with(|| ReferenceSet {
                key,
                members: Vec::new(),
            });
            set.members.push(ReferenceSetMember {
                paper_id: record.id().to_string(),
                citations: record.citations(),
            });
        }
    }
    sets
}

/// A paper's scores within one of its reference sets. In a degenerate set
/// (all members share one citation count) only the percentile is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct SetScore {
    pub key: ReferenceSetKey,
    pub p100: Option<f64>,
    pub p100_prime: Option<f64>,
    pub percentile: f64,
    pub degenerate: bool,
}

/// Headline values for a paper: the unweighted mean over its per-set scores.
/// P100/P100' means skip degenerate sets and are absent if every set was
/// degenerate; the percentile mean is always available.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedScore {
    pub p100: Option<f64>,
    pub p100_prime: Option<f64>,
    pub percentile: f64,
}

/// All indicator values for one paper, per reference set and combined.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub paper_id: String,
    pub per_set: Vec<SetScore>,
    pub combined: CombinedScore,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Scores every paper in every reference set.
///
/// Degeneracy is encoded in the row rather than raised, so one single-value
/// set cannot abort a batch. Rows come out sorted by paper id; each row's
/// per-set scores follow the key order of `sets`.
pub fn score_all(sets: &BTreeMap<ReferenceSetKey, ReferenceSet>) -> Vec<ScoreRow> {
    let mut per_paper: BTreeMap<String, Vec<SetScore>> = BTreeMap::new();

    for (key, set) in sets {
        let sf = SizeFrequency::from_citations(set.citations())
            .expect("reference sets are never empty");
        let degenerate = sf.unique_count() < 2;
        let percentile = percentile_cumfreq(&sf);
        let (p100_map, p100_prime_map) = if degenerate {
            (None, None)
        } else {
            (Some(p100(&sf).unwrap()), Some(p100_prime(&sf).unwrap()))
        };

        for member in set.members() {
            let lookup = |map: &Option<crate::indicators::ScaleValues>| {
                map.as_ref().map(|m| {
                    m.get(member.citations)
                        .expect("every member citation count is in the set")
                })
            };
            per_paper
                .entry(member.paper_id.clone())
                .or_default()
                .push(SetScore {
                    key: key.clone(),
                    p100: lookup(&p100_map),
                    p100_prime: lookup(&p100_prime_map),
                    percentile: percentile
                        .get(member.citations)
                        .expect("every member citation count is in the set"),
                    degenerate,
                });
        }
    }

    per_paper
        .into_iter()
        .map(|(paper_id, per_set)| {
            let combined = CombinedScore {
                p100: mean(per_set.iter().filter_map(|s| s.p100)),
                p100_prime: mean(per_set.iter().filter_map(|s| s.p100_prime)),
                percentile: mean(per_set.iter().map(|s| s.percentile))
                    .expect("every paper has at least one set"),
            };
            ScoreRow {
                paper_id,
                per_set,
                combined,
            }
        })
        .collect()
}
