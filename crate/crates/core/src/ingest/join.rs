use std::collections::HashMap;

use super::{AffiliationRow, AttributedPaper, IngestError, PaperRecord};

/// In-memory index of the filtered paper set, keyed by paper id.
#[derive(Clone, Debug, Default)]
pub struct PaperIndex {
    papers: Vec<PaperRecord>,
    by_id: HashMap<String, usize>,
}

impl PaperIndex {
    /// Fails with [`IngestError::DuplicatePaperId`] if an id repeats.
    pub fn build<I>(papers: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = PaperRecord>,
    {
        let mut index = PaperIndex::default();
        for paper in papers {
            if index.by_id.contains_key(&paper.paper_id) {
                return Err(IngestError::DuplicatePaperId(paper.paper_id));
            }
            index.by_id.insert(paper.paper_id.clone(), index.papers.len());
            index.papers.push(paper);
        }
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn position(&self, paper_id: &str) -> Option<usize> {
        self.by_id.get(paper_id).copied()
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    /// Pairs every indexed paper with its collected rows. Papers without any
    /// row go to [`JoinOutput::unmatched`].
    pub fn finish(self, buckets: AffiliationBuckets) -> JoinOutput {
        debug_assert_eq!(buckets.rows.len(), self.papers.len());
        let mut output = JoinOutput::default();
        for (paper, rows) in self.papers.into_iter().zip(buckets.rows) {
            if rows.is_empty() {
                output.unmatched.push(paper);
            } else {
                let attributed = AttributedPaper::new(paper, rows)
                    .expect("buckets only hold rows keyed by their own paper");
                output.attributed.push(attributed);
            }
        }
        output
    }
}

/// Affiliation rows collected per indexed paper. Buckets from different
/// partitions of one file combine with [`AffiliationBuckets::absorb`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffiliationBuckets {
    rows: Vec<Vec<AffiliationRow>>,
}

impl AffiliationBuckets {
    pub fn for_index(index: &PaperIndex) -> Self {
        Self {
            rows: vec![Vec::new(); index.len()],
        }
    }

    pub fn push(&mut self, position: usize, row: AffiliationRow) {
        self.rows[position].push(row);
    }

    /// Appends `later`'s rows after this bucket's rows, paper by paper.
    pub fn absorb(&mut self, later: AffiliationBuckets) {
        for (mine, theirs) in self.rows.iter_mut().zip(later.rows) {
            mine.extend(theirs);
        }
    }

    pub fn matched_rows(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Result of joining papers with affiliation rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JoinOutput {
    /// Papers with at least one affiliation row, in paper input order.
    pub attributed: Vec<AttributedPaper>,
    /// Diagnostics: filtered papers that had no affiliation row at all.
    pub unmatched: Vec<PaperRecord>,
}

/// Hash join of an already-filtered paper set against a stream of
/// affiliation rows. Only rows for indexed papers are retained.
pub fn join_affiliations<P, A>(papers: P, affiliations: A) -> Result<JoinOutput, IngestError>
where
    P: IntoIterator<Item = PaperRecord>,
    A: IntoIterator<Item = Result<AffiliationRow, IngestError>>,
{
    let index = PaperIndex::build(papers)?;
    let mut buckets = AffiliationBuckets::for_index(&index);
    for row in affiliations {
        let row = row?;
        if let Some(position) = index.position(&row.paper_id) {
            buckets.push(position, row);
        }
    }
    Ok(index.finish(buckets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::InstitutionId;

    fn paper(id: &str) -> PaperRecord {
        PaperRecord { paper_id: id.into(), year: 2014, venue_id: "C".into() }
    }

    fn affil(p: &str, a: &str, i: &str) -> Result<AffiliationRow, IngestError> {
        Ok(AffiliationRow {
            paper_id: p.into(),
            author_id: a.into(),
            institution_id: Some(InstitutionId::from(i)),
        })
    }

    #[test]
    fn rows_attach_to_their_paper() {
        let rows = vec![affil("P1", "A1", "I1"), affil("P1", "A2", "I2"), affil("P2", "A1", "I1")];
        let out = join_affiliations(vec![paper("P1")], rows).unwrap();
        assert_eq!(out.attributed.len(), 1);
        assert_eq!(out.attributed[0].affiliations().len(), 2);
        assert!(out.unmatched.is_empty());
    }

    #[test]
    fn paper_without_rows_goes_to_diagnostics() {
        let out = join_affiliations(vec![paper("P9")], vec![affil("P1", "A1", "I1")]).unwrap();
        assert!(out.attributed.is_empty());
        assert_eq!(out.unmatched, vec![paper("P9")]);
    }

    #[test]
    fn duplicate_filtered_paper_is_an_error() {
        let err = join_affiliations(vec![paper("P1"), paper("P1")], Vec::new()).unwrap_err();
        assert!(matches!(err, IngestError::DuplicatePaperId(id) if id == "P1"));
    }

    #[test]
    fn row_errors_propagate() {
        let rows = vec![Err(IngestError::InvalidSchema("boom".into()))];
        assert!(join_affiliations(vec![paper("P1")], rows).is_err());
    }
}
