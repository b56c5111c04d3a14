use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// Column ordinals of the papers table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperColumns {
    pub paper_id: usize,
    pub year: usize,
    pub venue_id: usize,
}

impl Default for PaperColumns {
    /// Layout of the 2016 MAG `Papers.txt` dump (venue = conference series id).
    fn default() -> Self {
        Self {
            paper_id: 0,
            year: 3,
            venue_id: 8,
        }
    }
}

/// Column ordinals of the paper/author/affiliation table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffiliationColumns {
    pub paper_id: usize,
    pub author_id: usize,
    pub affiliation_id: usize,
}

impl Default for AffiliationColumns {
    /// Layout of the 2016 MAG `PaperAuthorAffiliations.txt` dump.
    fn default() -> Self {
        Self {
            paper_id: 0,
            author_id: 1,
            affiliation_id: 2,
        }
    }
}

/// How to split one table into fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSchema<C> {
    #[serde(flatten)]
    pub columns: C,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub has_header: bool,
}

fn default_delimiter() -> char {
    '\t'
}

impl<C: Default> Default for TableSchema<C> {
    fn default() -> Self {
        Self {
            columns: C::default(),
            delimiter: default_delimiter(),
            has_header: false,
        }
    }
}

pub type PaperSchema = TableSchema<PaperColumns>;
pub type AffiliationSchema = TableSchema<AffiliationColumns>;

impl<C> TableSchema<C> {
    pub fn new(columns: C) -> Self {
        Self {
            columns,
            delimiter: default_delimiter(),
            has_header: false,
        }
    }

    fn check(&self, ordinals: &[usize]) -> Result<(), IngestError> {
        if matches!(self.delimiter, '\n' | '\r') {
            return Err(IngestError::InvalidSchema(
                "delimiter cannot be a line terminator".into(),
            ));
        }
        let distinct: BTreeSet<_> = ordinals.iter().collect();
        if distinct.len() != ordinals.len() {
            return Err(IngestError::InvalidSchema(format!(
                "column ordinals must be distinct, got {ordinals:?}"
            )));
        }
        Ok(())
    }
}

impl PaperSchema {
    pub fn validate(&self) -> Result<(), IngestError> {
        let c = &self.columns;
        self.check(&[c.paper_id, c.year, c.venue_id])
    }

    pub(crate) fn width(&self) -> usize {
        let c = &self.columns;
        c.paper_id.max(c.year).max(c.venue_id) + 1
    }
}

impl AffiliationSchema {
    pub fn validate(&self) -> Result<(), IngestError> {
        let c = &self.columns;
        self.check(&[c.paper_id, c.author_id, c.affiliation_id])
    }

    pub(crate) fn width(&self) -> usize {
        let c = &self.columns;
        c.paper_id.max(c.author_id).max(c.affiliation_id) + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_mag_layout() {
        let papers = PaperSchema::default();
        assert_eq!(papers.columns, PaperColumns { paper_id: 0, year: 3, venue_id: 8 });
        assert_eq!(papers.delimiter, '\t');
        assert!(papers.validate().is_ok());
        assert!(AffiliationSchema::default().validate().is_ok());
    }

    #[test]
    fn repeated_ordinal_is_rejected() {
        let schema = PaperSchema::new(PaperColumns { paper_id: 0, year: 0, venue_id: 2 });
        assert!(matches!(schema.validate(), Err(IngestError::InvalidSchema(_))));
    }

    #[test]
    fn newline_delimiter_is_rejected() {
        let mut schema = AffiliationSchema::default();
        schema.delimiter = '\n';
        assert!(schema.validate().is_err());
    }
}
