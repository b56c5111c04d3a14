//! Streaming readers for MAG-style delimited dumps.
//!
//! Files are read one line at a time; nothing here materializes a whole
//! table. The only structure that grows with input is the [`PaperIndex`] of
//! papers that survived filtering, together with their affiliation rows.

mod join;
mod parse;
mod reader;
mod scan;
mod schema;

use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::ids::InstitutionId;

pub use join::{join_affiliations, AffiliationBuckets, JoinOutput, PaperIndex};
pub use parse::{
    filter_papers, parse_affiliation_row, parse_paper_row, PaperFilter, ParsePolicy, ParseStats,
    RecordReader, RecordSchema, YearRange,
};
pub use reader::{line_aligned_partitions, open_partition, open_table, Partition, RawRow, RowRef, RowReader};
pub use scan::collect_affiliations;
pub use schema::{AffiliationColumns, AffiliationSchema, PaperColumns, PaperSchema, TableSchema};

/// Smallest accepted publication year.
pub const MIN_YEAR: i32 = 1900;
/// Largest accepted publication year.
pub const MAX_YEAR: i32 = 2100;

/// One publication.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PaperRecord {
    pub paper_id: String,
    pub year: i32,
    pub venue_id: String,
}

/// One (paper, author, institution) row. `institution_id == None` is the
/// UNKNOWN sentinel produced by an empty affiliation field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffiliationRow {
    pub paper_id: String,
    pub author_id: String,
    pub institution_id: Option<InstitutionId>,
}

/// A paper joined with all of its affiliation rows.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributedPaper {
    paper: PaperRecord,
    affiliations: Vec<AffiliationRow>,
}

impl AttributedPaper {
    /// Fails if `affiliations` is empty or any row belongs to another paper.
    pub fn new(paper: PaperRecord, affiliations: Vec<AffiliationRow>) -> Result<Self, IngestError> {
        if affiliations.is_empty() {
            return Err(IngestError::InvalidAttribution(format!(
                "paper {} has no affiliation rows",
                paper.paper_id
            )));
        }
        if let Some(row) = affiliations.iter().find(|r| r.paper_id != paper.paper_id) {
            return Err(IngestError::InvalidAttribution(format!(
                "row for paper {} attached to paper {}",
                row.paper_id, paper.paper_id
            )));
        }
        Ok(Self { paper, affiliations })
    }

    pub fn paper(&self) -> &PaperRecord {
        &self.paper
    }

    pub fn affiliations(&self) -> &[AffiliationRow] {
        &self.affiliations
    }
}

/// Where a row sits in its source. `line` is 1-based and counted from the
/// start of the partition being read; `offset` is the absolute byte offset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RowPos {
    pub line: u64,
    pub offset: u64,
}

impl fmt::Display for RowPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {} (byte {})", self.line, self.offset)
    }
}

/// Why a single row could not be parsed.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RowFault {
    #[error("expected at least {needed} columns, found {found}")]
    TooFewColumns { needed: usize, found: usize },
    #[error("year field {0:?} is not an integer")]
    InvalidYear(String),
    #[error("year {0} outside {MIN_YEAR}..={MAX_YEAR}")]
    YearOutOfRange(i32),
    #[error("{0} field is empty")]
    EmptyField(&'static str),
    #[error("row is not valid UTF-8")]
    InvalidUtf8,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {}", path.display())]
    FileNotFound { path: PathBuf },
    #[error("I/O error on {} near {pos}: {source}", path.display())]
    Io {
        path: PathBuf,
        pos: RowPos,
        #[source]
        source: io::Error,
    },
    #[error("malformed {pos}: {fault}")]
    MalformedRow { pos: RowPos, fault: RowFault },
    #[error("duplicate paper id {0:?} in filtered paper set")]
    DuplicatePaperId(String),
    #[error("invalid table schema: {0}")]
    InvalidSchema(String),
    #[error("invalid year range {first}..={last}")]
    InvalidYearRange { first: i32, last: i32 },
    #[error("invalid attributed paper: {0}")]
    InvalidAttribution(String),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, pos: RowPos, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            IngestError::FileNotFound { path }
        } else {
            IngestError::Io { path, pos, source }
        }
    }
}
