//! Per-year institution scores from attributed papers.
//!
//! Each paper carries weight 1, split equally among its distinct authors;
//! each author's part is split equally among that author's distinct
//! institutions on the paper. Every contribution is therefore a unit
//! fraction `1 / (authors * institutions_of_author)`, and a running total is
//! kept as a multiset of such fractions ([`FractionSum`]). Adding multisets
//! is exact, associative and commutative, which makes partial tallies from
//! any partition of the papers merge to the identical result.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;
use std::thread;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ids::InstitutionId;
use crate::ingest::{
    collect_affiliations, AffiliationSchema, AttributedPaper, IngestError, PaperFilter, PaperIndex, PaperRecord,
    PaperSchema, ParsePolicy, ParseStats, RecordReader,
};
use crate::numeric::{exact_to_f64, f64_to_exact, ratio, Exact};

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("cannot merge tables for year {found} into year {expected}")]
    YearMismatch { expected: i32, found: i32 },
    #[error("no partial tables to merge")]
    NoPartials,
    #[error("score for {institution} must be finite and non-negative, got {value}")]
    InvalidScore { institution: String, value: String },
    #[error("scale factor must be positive")]
    InvalidScale,
    #[error("institution {0} appears twice in a score table")]
    DuplicateInstitution(String),
    #[error("score table CSV: {0}")]
    Csv(String),
}

/// Exact sum of unit fractions, stored as `denominator -> multiplicity`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FractionSum {
    units: BTreeMap<u64, u64>,
}

impl FractionSum {
    pub fn unit(denominator: u64) -> Self {
        let mut sum = Self::default();
        sum.add_unit(denominator);
        sum
    }

    /// Adds `1 / denominator`.
    pub fn add_unit(&mut self, denominator: u64) {
        assert!(denominator > 0, "unit fraction with zero denominator");
        *self.units.entry(denominator).or_insert(0) += 1;
    }

    pub fn add(&mut self, other: &FractionSum) {
        for (&d, &n) in &other.units {
            *self.units.entry(d).or_insert(0) += n;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.units.is_empty()
    }

    pub fn to_exact(&self) -> Exact {
        self.units
            .iter()
            .fold(Exact::zero(), |acc, (&d, &n)| acc + ratio(n, d))
    }

    /// Correctly rounded value.
    pub fn value(&self) -> f64 {
        exact_to_f64(&self.to_exact())
    }
}

/// One institution's part of a paper. `institution == None` is UNKNOWN.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    pub institution: Option<InstitutionId>,
    pub weight: FractionSum,
}

/// A paper's unit weight distributed over institutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareList {
    pub paper_id: String,
    /// Sorted by institution, UNKNOWN first.
    pub shares: Vec<Share>,
}

impl ShareList {
    /// Exact sum of all shares; 1 for every well-formed paper.
    pub fn total(&self) -> Exact {
        let mut sum = FractionSum::default();
        for share in &self.shares {
            sum.add(&share.weight);
        }
        sum.to_exact()
    }

    pub fn get(&self, institution: Option<&str>) -> Option<f64> {
        self.shares
            .iter()
            .find(|s| s.institution.as_ref().map(InstitutionId::as_str) == institution)
            .map(|s| s.weight.value())
    }
}

/// Applies the attribution rule to one paper.
///
/// Duplicate (author, institution) rows are ignored. An author whose only
/// rows carry an empty institution credits UNKNOWN; empty rows of an author
/// who also has a known institution are dropped.
pub fn paper_shares(paper: &AttributedPaper) -> ShareList {
    let mut by_author: BTreeMap<&str, BTreeSet<Option<&InstitutionId>>> = BTreeMap::new();
    for row in paper.affiliations() {
        by_author
            .entry(row.author_id.as_str())
            .or_default()
            .insert(row.institution_id.as_ref());
    }

    let authors = by_author.len() as u64;
    let mut shares: BTreeMap<Option<&InstitutionId>, FractionSum> = BTreeMap::new();
    for institutions in by_author.values_mut() {
        if institutions.len() > 1 {
            institutions.remove(&None);
        }
        let per_institution = authors * institutions.len() as u64;
        for institution in institutions.iter() {
            shares.entry(*institution).or_default().add_unit(per_institution);
        }
    }

    ShareList {
        paper_id: paper.paper().paper_id.clone(),
        shares: shares
            .into_iter()
            .map(|(institution, weight)| Share {
                institution: institution.cloned(),
                weight,
            })
            .collect(),
    }
}

/// Mergeable, exact running totals for one year.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreTally {
    year: i32,
    known: BTreeMap<InstitutionId, FractionSum>,
    unknown: FractionSum,
}

impl ScoreTally {
    pub fn new(year: i32) -> Self {
        Self {
            year,
            known: BTreeMap::new(),
            unknown: FractionSum::default(),
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn add(&mut self, shares: &ShareList) {
        for share in &shares.shares {
            match &share.institution {
                Some(id) => self.known.entry(id.clone()).or_default().add(&share.weight),
                None => self.unknown.add(&share.weight),
            }
        }
    }

    /// Weight credited to UNKNOWN. Never exported.
    pub fn unknown(&self) -> Exact {
        self.unknown.to_exact()
    }

    /// Exact scores of known institutions.
    pub fn to_table(&self) -> ScoreTable {
        ScoreTable {
            year: self.year,
            entries: self
                .known
                .iter()
                .map(|(id, sum)| (id.clone(), sum.to_exact()))
                .collect(),
        }
    }
}

/// Sums the share lists of papers from `year`.
pub fn accumulate_scores<I>(shares: I, year: i32) -> ScoreTally
where
    I: IntoIterator<Item = ShareList>,
{
    let mut tally = ScoreTally::new(year);
    for list in shares {
        tally.add(&list);
    }
    tally
}

/// Pointwise sum of partial tallies for one year. Exact, hence associative
/// and commutative.
pub fn merge_partials<I>(tallies: I) -> Result<ScoreTally, ScoringError>
where
    I: IntoIterator<Item = ScoreTally>,
{
    let mut tallies = tallies.into_iter();
    let mut merged = tallies.next().ok_or(ScoringError::NoPartials)?;
    for tally in tallies {
        if tally.year != merged.year {
            return Err(ScoringError::YearMismatch {
                expected: merged.year,
                found: tally.year,
            });
        }
        for (id, sum) in tally.known {
            merged.known.entry(id).or_default().add(&sum);
        }
        merged.unknown.add(&tally.unknown);
    }
    Ok(merged)
}

/// Venue and year of a tally.
pub type VenueYear = (String, i32);

/// Scores attributed papers grouped by (venue, year). With `shards > 1` the
/// papers are split into contiguous shards scored on separate threads and
/// merged with [`merge_partials`]; the result is identical for any shard
/// count.
pub fn score_attributed(papers: &[AttributedPaper], shards: usize) -> BTreeMap<VenueYear, ScoreTally> {
    fn score_shard(papers: &[AttributedPaper]) -> BTreeMap<VenueYear, ScoreTally> {
        let mut tallies: BTreeMap<VenueYear, ScoreTally> = BTreeMap::new();
        for paper in papers {
            let record = paper.paper();
            tallies
                .entry((record.venue_id.clone(), record.year))
                .or_insert_with(|| ScoreTally::new(record.year))
                .add(&paper_shares(paper));
        }
        tallies
    }

    let shards = shards.clamp(1, papers.len().max(1));
    if shards == 1 {
        return score_shard(papers);
    }
    let chunk = papers.len().div_ceil(shards);
    let partials: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = papers
            .chunks(chunk)
            .map(|part| scope.spawn(move || score_shard(part)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scoring shard panicked"))
            .collect()
    });

    let mut grouped: BTreeMap<VenueYear, Vec<ScoreTally>> = BTreeMap::new();
    for partial in partials {
        for (key, tally) in partial {
            grouped.entry(key).or_default().push(tally);
        }
    }
    grouped
        .into_iter()
        .map(|(key, parts)| {
            let merged = merge_partials(parts).expect("shards of one key share its year");
            (key, merged)
        })
        .collect()
}

/// Raw scores of one year, held exactly. This is `f_l` before
/// normalization; UNKNOWN never appears here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreTable {
    year: i32,
    entries: BTreeMap<InstitutionId, Exact>,
}

impl ScoreTable {
    pub fn new<I>(year: i32, entries: I) -> Result<Self, ScoringError>
    where
        I: IntoIterator<Item = (InstitutionId, Exact)>,
    {
        let mut table = Self::empty(year);
        for (id, score) in entries {
            if score.is_negative() {
                return Err(ScoringError::InvalidScore {
                    institution: id.to_string(),
                    value: score.to_string(),
                });
            }
            if table.entries.insert(id.clone(), score).is_some() {
                return Err(ScoringError::DuplicateInstitution(id.to_string()));
            }
        }
        Ok(table)
    }

    /// Builds a table from float scores, taken at their exact value.
    pub fn from_f64<I, K>(year: i32, entries: I) -> Result<Self, ScoringError>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<InstitutionId>,
    {
        let exact: Result<Vec<_>, _> = entries
            .into_iter()
            .map(|(id, score)| {
                let id = id.into();
                match f64_to_exact(score) {
                    Some(value) if score >= 0.0 => Ok((id, value)),
                    _ => Err(ScoringError::InvalidScore {
                        institution: id.to_string(),
                        value: score.to_string(),
                    }),
                }
            })
            .collect();
        Self::new(year, exact?)
    }

    pub fn empty(year: i32) -> Self {
        Self {
            year,
            entries: BTreeMap::new(),
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, institution: &str) -> Option<&Exact> {
        self.entries.get(institution)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InstitutionId, &Exact)> {
        self.entries.iter()
    }

    /// Rounded scores, in institution id order.
    pub fn iter_f64(&self) -> impl Iterator<Item = (&InstitutionId, f64)> + '_ {
        self.entries.iter().map(|(id, v)| (id, exact_to_f64(v)))
    }

    pub fn max(&self) -> Option<&Exact> {
        self.entries.values().max()
    }

    /// Every score multiplied by `factor`, exactly.
    pub fn scaled(&self, factor: &Exact) -> Result<Self, ScoringError> {
        if !factor.is_positive() {
            return Err(ScoringError::InvalidScale);
        }
        Ok(Self {
            year: self.year,
            entries: self
                .entries
                .iter()
                .map(|(id, v)| (id.clone(), v * factor))
                .collect(),
        })
    }

    /// `(institution, rounded score)` sorted by score descending, then id.
    pub fn ranked(&self) -> Vec<(InstitutionId, f64)> {
        sort_by_score(self.iter_f64().map(|(id, v)| (id.clone(), v)).collect())
    }

    /// Writes `institution_id,score`, best first, LF line endings.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), ScoringError> {
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let err = |e: csv::Error| ScoringError::Csv(e.to_string());
        csv.write_record(["institution_id", "score"]).map_err(err)?;
        for (id, score) in self.ranked() {
            csv.write_record([id.as_str(), &score.to_string()]).map_err(err)?;
        }
        csv.flush().map_err(|e| ScoringError::Csv(e.to_string()))
    }

    /// Reads a file written by [`ScoreTable::write_csv`].
    pub fn read_csv<R: Read>(reader: R, year: i32) -> Result<Self, ScoringError> {
        let mut csv = csv::Reader::from_reader(reader);
        let headers = csv.headers().map_err(|e| ScoringError::Csv(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["institution_id", "score"] {
            return Err(ScoringError::Csv(format!("unexpected header {headers:?}")));
        }
        let mut entries = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| ScoringError::Csv(e.to_string()))?;
            let score: f64 = record[1]
                .parse()
                .map_err(|_| ScoringError::Csv(format!("bad score {:?}", &record[1])))?;
            entries.push((InstitutionId::from(&record[0]), score));
        }
        Self::from_f64(year, entries)
    }
}

pub(crate) fn sort_by_score(mut entries: Vec<(InstitutionId, f64)>) -> Vec<(InstitutionId, f64)> {
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries
}

/// Scores of one year divided by that year's maximum; the best institution
/// has score 1.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedTable {
    year: i32,
    entries: BTreeMap<InstitutionId, f64>,
}

impl NormalizedTable {
    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, institution: &str) -> Option<f64> {
        self.entries.get(institution).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InstitutionId, f64)> {
        self.entries.iter().map(|(id, &v)| (id, v))
    }

    /// Adds `institution` with score 0 if absent.
    pub fn pad(&mut self, institution: &InstitutionId) {
        self.entries.entry(institution.clone()).or_insert(0.0);
    }

    /// Reinterprets the normalized scores as raw scores.
    pub fn to_raw(&self) -> ScoreTable {
        ScoreTable::from_f64(self.year, self.entries.iter().map(|(id, &v)| (id.clone(), v)))
            .expect("normalized scores are finite and non-negative")
    }

    pub fn ranked(&self) -> Vec<(InstitutionId, f64)> {
        sort_by_score(self.entries.iter().map(|(id, &v)| (id.clone(), v)).collect())
    }
}

/// Divides every score by the table maximum (correctly rounded). An empty
/// table stays empty; an all-zero table stays all-zero and logs a warning.
pub fn normalize(table: &ScoreTable) -> NormalizedTable {
    let entries = match table.max() {
        None => BTreeMap::new(),
        Some(max) if max.is_zero() => {
            log::warn!(
                "score table for {} is all zero; leaving it unnormalized",
                table.year
            );
            table.entries.keys().map(|id| (id.clone(), 0.0)).collect()
        }
        Some(max) => table
            .entries
            .iter()
            .map(|(id, v)| (id.clone(), exact_to_f64(&(v / max))))
            .collect(),
    };
    NormalizedTable {
        year: table.year,
        entries,
    }
}

/// Inputs of [`score_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusInput<'a> {
    pub papers: &'a Path,
    pub paper_schema: &'a PaperSchema,
    pub affiliations: &'a Path,
    pub affiliation_schema: &'a AffiliationSchema,
    pub filter: &'a PaperFilter,
    pub policy: ParsePolicy,
    /// Threads for the affiliation scan and for scoring.
    pub jobs: usize,
}

/// Output of [`score_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusScores {
    /// One table per selected venue and year, empty where no paper matched.
    pub tables: BTreeMap<VenueYear, ScoreTable>,
    /// Weight credited to UNKNOWN per venue-year.
    pub unknown: BTreeMap<VenueYear, Exact>,
    pub paper_stats: ParseStats,
    pub affiliation_stats: ParseStats,
    /// Selected papers that had no affiliation row.
    pub unmatched: Vec<PaperRecord>,
}

/// Streams both tables and scores the selected papers.
///
/// The papers file is read once, keeping only papers that pass the filter;
/// the affiliation file is then scanned once (in `jobs` line-aligned
/// partitions) keeping only rows of those papers. Memory is proportional to
/// the selected papers and their rows. The result does not depend on `jobs`.
pub fn score_corpus(input: &CorpusInput<'_>) -> Result<CorpusScores, IngestError> {
    input.paper_schema.validate()?;
    input.affiliation_schema.validate()?;
    let mut reader = RecordReader::open(input.papers, input.paper_schema.clone(), input.policy)?;
    let mut selected = Vec::new();
    for paper in reader.by_ref() {
        let paper = paper?;
        if input.filter.matches(&paper) {
            selected.push(paper);
        }
    }
    let paper_stats = reader.into_stats();

    let index = PaperIndex::build(selected)?;
    let (buckets, affiliation_stats) = collect_affiliations(
        input.affiliations,
        input.affiliation_schema,
        &index,
        input.policy,
        input.jobs,
    )?;
    let joined = index.finish(buckets);
    let tallies = score_attributed(&joined.attributed, input.jobs);

    let mut tables = BTreeMap::new();
    let mut unknown = BTreeMap::new();
    for venue in &input.filter.venues {
        for year in input.filter.years.years() {
            let key = (venue.clone(), year);
            let (table, lost) = match tallies.get(&key) {
                Some(tally) => (tally.to_table(), tally.unknown()),
                None => (ScoreTable::empty(year), Exact::zero()),
            };
            tables.insert(key.clone(), table);
            unknown.insert(key, lost);
        }
    }
    Ok(CorpusScores {
        tables,
        unknown,
        paper_stats,
        affiliation_stats,
        unmatched: joined.unmatched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{AffiliationRow, PaperRecord};
    use proptest::prelude::*;

    fn attributed(rows: &[(&str, &str)]) -> AttributedPaper {
        let paper = PaperRecord { paper_id: "P".into(), year: 2014, venue_id: "V".into() };
        let rows = rows
            .iter()
            .map(|(a, i)| AffiliationRow {
                paper_id: "P".into(),
                author_id: (*a).into(),
                institution_id: (!i.is_empty()).then(|| InstitutionId::from(*i)),
            })
            .collect();
        AttributedPaper::new(paper, rows).unwrap()
    }

    fn table(year: i32, entries: &[(&str, f64)]) -> ScoreTable {
        ScoreTable::from_f64(year, entries.iter().map(|&(id, v)| (id, v))).unwrap()
    }

    #[test]
    fn single_author_single_institution_gets_everything() {
        let shares = paper_shares(&attributed(&[("a1", "I1")]));
        assert_eq!(shares.get(Some("I1")), Some(1.0));
        assert_eq!(shares.shares.len(), 1);
    }

    #[test]
    fn split_over_authors_then_institutions() {
        // 0.5 / 2 + 0.5 for A, 0.5 / 2 for B.
        let shares = paper_shares(&attributed(&[("a1", "A"), ("a1", "B"), ("a2", "A")]));
        assert_eq!(shares.get(Some("A")), Some(0.75));
        assert_eq!(shares.get(Some("B")), Some(0.25));
    }

    #[test]
    fn empty_affiliation_credits_unknown() {
        let shares = paper_shares(&attributed(&[("a1", "I1"), ("a2", "")]));
        assert_eq!(shares.get(Some("I1")), Some(0.5));
        assert_eq!(shares.get(None), Some(0.5));
    }

    #[test]
    fn duplicates_and_redundant_empty_rows_are_ignored() {
        let shares = paper_shares(&attributed(&[("a1", "I1"), ("a1", "I1"), ("a1", ""), ("a2", "I2")]));
        assert_eq!(shares.get(Some("I1")), Some(0.5));
        assert_eq!(shares.get(Some("I2")), Some(0.5));
        assert_eq!(shares.get(None), None);
    }

    #[test]
    fn accumulation_is_additive() {
        assert!(accumulate_scores(Vec::new(), 2014).to_table().is_empty());
        let one = paper_shares(&attributed(&[("a1", "I1")]));
        let tally = accumulate_scores(vec![one.clone(), one], 2014);
        assert_eq!(tally.to_table().get("I1"), Some(&ratio(2, 1)));
    }

    #[test]
    fn unknown_is_tracked_but_not_exported() {
        let tally = accumulate_scores(vec![paper_shares(&attributed(&[("a1", "")]))], 2014);
        assert_eq!(tally.unknown(), ratio(1, 1));
        assert!(tally.to_table().is_empty());
    }

    #[test]
    fn merge_identity_and_year_check() {
        let t = accumulate_scores(vec![paper_shares(&attributed(&[("a1", "I1"), ("a2", "I2")]))], 2014);
        assert_eq!(merge_partials(vec![t.clone(), ScoreTally::new(2014)]).unwrap(), t);
        assert!(matches!(
            merge_partials(vec![t.clone(), ScoreTally::new(2015)]),
            Err(ScoringError::YearMismatch { expected: 2014, found: 2015 })
        ));
        assert!(matches!(merge_partials(Vec::new()), Err(ScoringError::NoPartials)));
    }

    #[test]
    fn normalize_divides_by_max() {
        let n = normalize(&table(2014, &[("A", 2.0), ("B", 1.0)]));
        assert_eq!((n.get("A"), n.get("B")), (Some(1.0), Some(0.5)));
        assert_eq!(normalize(&table(2014, &[("A", 5.0)])).get("A"), Some(1.0));
        assert!(normalize(&ScoreTable::empty(2014)).is_empty());
        let zero = normalize(&table(2014, &[("A", 0.0), ("B", 0.0)]));
        assert_eq!((zero.get("A"), zero.get("B")), (Some(0.0), Some(0.0)));
    }

    #[test]
    fn negative_or_nan_scores_are_rejected() {
        assert!(ScoreTable::from_f64(2014, [("A", -1.0)]).is_err());
        assert!(ScoreTable::from_f64(2014, [("A", f64::NAN)]).is_err());
        assert!(ScoreTable::from_f64(2014, [("A", 1.0), ("A", 2.0)]).is_err());
    }

    #[test]
    fn csv_is_sorted_by_score_then_id() {
        let t = table(2014, &[("b", 1.0), ("a", 1.0), ("c", 2.5)]);
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "institution_id,score\nc,2.5\na,1\nb,1\n");
        assert_eq!(ScoreTable::read_csv(out.as_slice(), 2014).unwrap(), t);
    }

    fn arb_rows() -> impl Strategy<Value = Vec<(String, String)>> {
        prop::collection::vec(("a[0-5]", prop_oneof![Just(String::new()), "I[0-6]"]), 1..12)
    }

    fn arb_table() -> impl Strategy<Value = ScoreTable> {
        prop::collection::btree_map("[a-h]", 0u32..1000, 0..8).prop_map(|m| {
            ScoreTable::from_f64(2014, m.into_iter().map(|(k, v)| (k, v as f64 / 7.0))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn shares_sum_to_one(rows in arb_rows()) {
            let rows: Vec<(&str, &str)> = rows.iter().map(|(a, i)| (a.as_str(), i.as_str())).collect();
            let shares = paper_shares(&attributed(&rows));
            prop_assert_eq!(shares.total(), ratio(1, 1));
            let float_total: f64 = shares.shares.iter().map(|s| s.weight.value()).sum();
            prop_assert!((float_total - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn normalization_is_idempotent(t in arb_table()) {
            let once = normalize(&t);
            prop_assert_eq!(normalize(&once.to_raw()), once);
        }

        #[test]
        fn normalization_ignores_scale(t in arb_table(), num in 1u64..1_000_000, den in 1u64..1_000_000) {
            let scaled = t.scaled(&ratio(num, den)).unwrap();
            prop_assert_eq!(normalize(&scaled), normalize(&t));
        }

        #[test]
        fn merge_is_commutative(a in arb_rows(), b in arb_rows()) {
            let score = |rows: &Vec<(String, String)>| {
                let rows: Vec<(&str, &str)> = rows.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
                accumulate_scores(vec![paper_shares(&attributed(&rows))], 2014)
            };
            let (ta, tb) = (score(&a), score(&b));
            prop_assert_eq!(
                merge_partials(vec![ta.clone(), tb.clone()]).unwrap(),
                merge_partials(vec![tb, ta]).unwrap()
            );
        }
    }
}
