use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::reader::{open_range, Partition, RowReader, RowRef};
use super::schema::{AffiliationSchema, PaperSchema};
use super::{AffiliationRow, IngestError, PaperRecord, RowFault, MAX_YEAR, MIN_YEAR};
use crate::ids::InstitutionId;

/// What to do with a row that fails to parse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsePolicy {
    /// Count the row and move on.
    #[default]
    Skip,
    /// Abort on the first malformed row.
    Strict,
}

/// Row counters for one table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub rows: u64,
    pub skipped: u64,
    pub first_fault: Option<String>,
}

impl ParseStats {
    pub fn merge(&mut self, other: ParseStats) {
        self.rows += other.rows;
        self.skipped += other.skipped;
        if self.first_fault.is_none() {
            self.first_fault = other.first_fault;
        }
    }

    /// Folds one parse outcome into the counters according to `policy`.
    /// Returns `Ok(None)` for a skipped row.
    pub fn record<T>(
        &mut self,
        outcome: Result<T, IngestError>,
        policy: ParsePolicy,
    ) -> Result<Option<T>, IngestError> {
        self.rows += 1;
        match outcome {
            Ok(value) => Ok(Some(value)),
            Err(err @ IngestError::MalformedRow { .. }) if policy == ParsePolicy::Skip => {
                self.skipped += 1;
                if self.first_fault.is_none() {
                    self.first_fault = Some(err.to_string());
                }
                Ok(None)
            }
            Err(err) => Err(err),
        }
    }

    /// One-line human summary, e.g. for standard error.
    pub fn summary(&self, table: &str) -> String {
        match &self.first_fault {
            Some(first) if self.skipped > 0 => format!(
                "{table}: {} rows read, {} malformed rows skipped (first: {first})",
                self.rows, self.skipped
            ),
            _ => format!("{table}: {} rows read, 0 malformed rows skipped", self.rows),
        }
    }
}

fn split_fields<'a>(
    row: &RowRef<'a>,
    delimiter: char,
    width: usize,
) -> Result<Vec<&'a str>, IngestError> {
    let fields: Vec<&str> = row.text()?.split(delimiter).take(width).collect();
    if fields.len() < width {
        return Err(IngestError::MalformedRow {
            pos: row.pos,
            fault: RowFault::TooFewColumns {
                needed: width,
                found: fields.len(),
            },
        });
    }
    Ok(fields)
}

fn non_empty<'a>(row: &RowRef<'_>, value: &'a str, field: &'static str) -> Result<&'a str, IngestError> {
    if value.is_empty() {
        Err(IngestError::MalformedRow {
            pos: row.pos,
            fault: RowFault::EmptyField(field),
        })
    } else {
        Ok(value)
    }
}

/// Extracts a [`PaperRecord`] from the configured columns.
pub fn parse_paper_row(row: &RowRef<'_>, schema: &PaperSchema) -> Result<PaperRecord, IngestError> {
    let fields = split_fields(row, schema.delimiter, schema.width())?;
    let c = &schema.columns;
    let paper_id = non_empty(row, fields[c.paper_id], "paper id")?;
    let raw_year = fields[c.year].trim();
    let year: i32 = raw_year.parse().map_err(|_| IngestError::MalformedRow {
        pos: row.pos,
        fault: RowFault::InvalidYear(raw_year.to_owned()),
    })?;
    if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
        return Err(IngestError::MalformedRow {
            pos: row.pos,
            fault: RowFault::YearOutOfRange(year),
        });
    }
    Ok(PaperRecord {
        paper_id: paper_id.to_owned(),
        year,
        venue_id: fields[c.venue_id].to_owned(),
    })
}

/// Borrowed view of an affiliation row; lets a scan reject rows for
/// unselected papers without allocating.
pub(crate) struct AffiliationFields<'a> {
    pub paper_id: &'a str,
    pub author_id: &'a str,
    pub institution_id: &'a str,
}

impl AffiliationFields<'_> {
    pub(crate) fn to_owned_row(&self) -> AffiliationRow {
        AffiliationRow {
            paper_id: self.paper_id.to_owned(),
            author_id: self.author_id.to_owned(),
            institution_id: (!self.institution_id.is_empty())
                .then(|| InstitutionId::from(self.institution_id)),
        }
    }
}

pub(crate) fn parse_affiliation_fields<'a>(
    row: &RowRef<'a>,
    schema: &AffiliationSchema,
) -> Result<AffiliationFields<'a>, IngestError> {
    let fields = split_fields(row, schema.delimiter, schema.width())?;
    let c = &schema.columns;
    Ok(AffiliationFields {
        paper_id: non_empty(row, fields[c.paper_id], "paper id")?,
        author_id: non_empty(row, fields[c.author_id], "author id")?,
        institution_id: fields[c.affiliation_id].trim(),
    })
}

/// Extracts an [`AffiliationRow`]; an empty institution field becomes the
/// UNKNOWN sentinel (`None`).
pub fn parse_affiliation_row(
    row: &RowRef<'_>,
    schema: &AffiliationSchema,
) -> Result<AffiliationRow, IngestError> {
    parse_affiliation_fields(row, schema).map(|f| f.to_owned_row())
}

/// A table schema that knows how to turn a row into a record.
pub trait RecordSchema {
    type Record;
    fn parse(&self, row: &RowRef<'_>) -> Result<Self::Record, IngestError>;
    fn has_header(&self) -> bool;
}

impl RecordSchema for PaperSchema {
    type Record = PaperRecord;

    fn parse(&self, row: &RowRef<'_>) -> Result<PaperRecord, IngestError> {
        parse_paper_row(row, self)
    }

    fn has_header(&self) -> bool {
        self.has_header
    }
}

impl RecordSchema for AffiliationSchema {
    type Record = AffiliationRow;

    fn parse(&self, row: &RowRef<'_>) -> Result<AffiliationRow, IngestError> {
        parse_affiliation_row(row, self)
    }

    fn has_header(&self) -> bool {
        self.has_header
    }
}

/// Streams parsed records, applying a [`ParsePolicy`] to malformed rows.
#[derive(Debug)]
pub struct RecordReader<S> {
    rows: RowReader,
    schema: S,
    policy: ParsePolicy,
    stats: ParseStats,
    failed: bool,
}

impl<S: RecordSchema> RecordReader<S> {
    pub fn open(path: impl AsRef<Path>, schema: S, policy: ParsePolicy) -> Result<Self, IngestError> {
        let rows = open_range(path.as_ref(), schema.has_header(), Partition::WHOLE)?;
        Ok(Self::new(rows, schema, policy))
    }

    pub fn new(rows: RowReader, schema: S, policy: ParsePolicy) -> Self {
        Self {
            rows,
            schema,
            policy,
            stats: ParseStats::default(),
            failed: false,
        }
    }

    pub fn stats(&self) -> &ParseStats {
        &self.stats
    }

    pub fn into_stats(self) -> ParseStats {
        self.stats
    }
}

impl<S: RecordSchema> Iterator for RecordReader<S> {
    type Item = Result<S::Record, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let row = match self.rows.read_row() {
                Ok(Some(row)) => row,
                Ok(None) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            };
            match self.stats.record(self.schema.parse(&row), self.policy) {
                Ok(Some(record)) => return Some(Ok(record)),
                Ok(None) => continue,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Inclusive range of publication years.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    first: i32,
    last: i32,
}

impl YearRange {
    pub fn new(first: i32, last: i32) -> Result<Self, IngestError> {
        if first > last {
            return Err(IngestError::InvalidYearRange { first, last });
        }
        Ok(Self { first, last })
    }

    pub fn first(&self) -> i32 {
        self.first
    }

    pub fn last(&self) -> i32 {
        self.last
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first..=self.last).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }
}

/// Venue and year selection for papers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaperFilter {
    pub venues: BTreeSet<String>,
    pub years: YearRange,
}

impl PaperFilter {
    pub fn new<I, V>(venues: I, years: YearRange) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        Self {
            venues: venues.into_iter().map(Into::into).collect(),
            years,
        }
    }

    pub fn matches(&self, paper: &PaperRecord) -> bool {
        self.years.contains(paper.year) && self.venues.contains(&paper.venue_id)
    }
}

/// Keeps exactly the papers accepted by `filter`, in input order.
pub fn filter_papers<'f, I>(papers: I, filter: &'f PaperFilter) -> impl Iterator<Item = PaperRecord> + 'f
where
    I: IntoIterator<Item = PaperRecord>,
    I::IntoIter: 'f,
{
    papers.into_iter().filter(move |p| filter.matches(p))
}
