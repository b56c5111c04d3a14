//! Synthetic MAG-style corpora with planted institution strengths, and
//! brute-force reference implementations for testing.
//!
//! Files use the default ingest layout: papers carry the year at column 3
//! and the venue id at column 8; affiliation rows are
//! `paper, author, institution, name, normalized name, sequence`.
//!
//! Institution `i` (0-based) has base weight `1 / (i + 1)`. In year index `t`
//! its weight is `base * max(0, 1 + drift * t * d_i)`, where `d_i` runs
//! linearly from -1 for the strongest institution to +1 for the weakest.
//! Every author draws `affils_per_author` institutions independently from
//! these weights; repeated draws produce duplicate rows.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::RankList;
use crate::ids::InstitutionId;
use crate::ingest::{AffiliationRow, PaperRecord, YearRange, MAX_YEAR, MIN_YEAR};
use crate::numeric::{exact_to_f64, f64_to_exact};
use crate::scoring::{NormalizedTable, ScoreTable, VenueYear};

/// Largest supported `authors_per_paper.max`.
pub const MAX_AUTHORS_PER_PAPER: u32 = 12;
/// Largest supported `affils_per_author.max`.
pub const MAX_AFFILS_PER_AUTHOR: u32 = 4;

pub const PAPERS_FILE: &str = "papers.tsv";
pub const AFFILIATIONS_FILE: &str = "affiliations.tsv";

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid corpus parameters: {0}")]
    InvalidParams(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

impl CountRange {
    pub fn new(min: u32, max: u32) -> Self {
        Self { min, max }
    }
}

/// Generator settings. Missing keys in a config take [`Default`] values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusParams {
    pub num_institutions: u32,
    pub num_authors: u32,
    pub num_venues: u32,
    pub years: YearRange,
    pub papers_per_venue_year: u32,
    pub authors_per_paper: CountRange,
    pub affils_per_author: CountRange,
    /// Per-year change of relative institution weights.
    pub strength_drift: f64,
    pub rng_seed: u64,
    /// Probability that an author's only row has an empty institution.
    pub missing_affiliation_rate: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            num_institutions: 60,
            num_authors: 2000,
            num_venues: 3,
            years: YearRange::new(2011, 2015).expect("ordered"),
            papers_per_venue_year: 200,
            authors_per_paper: CountRange::new(1, 5),
            affils_per_author: CountRange::new(1, 2),
            strength_drift: 0.05,
            rng_seed: 2016,
            missing_affiliation_rate: 0.02,
        }
    }
}

impl CorpusParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |msg: String| Err(SynthError::InvalidParams(msg));
        for (name, value) in [
            ("num_institutions", self.num_institutions),
            ("num_authors", self.num_authors),
            ("num_venues", self.num_venues),
            ("papers_per_venue_year", self.papers_per_venue_year),
        ] {
            if value == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        for (name, range, cap) in [
            ("authors_per_paper", self.authors_per_paper, MAX_AUTHORS_PER_PAPER),
            ("affils_per_author", self.affils_per_author, MAX_AFFILS_PER_AUTHOR),
        ] {
            if range.min == 0 || range.min > range.max {
                return fail(format!("{name} must be a non-empty range of positive counts"));
            }
            if range.max > cap {
                return fail(format!("{name}.max must not exceed {cap}"));
            }
        }
        if self.authors_per_paper.max > self.num_authors {
            return fail("authors_per_paper.max exceeds num_authors".into());
        }
        if self.years.first() > self.years.last() || self.years.first() < MIN_YEAR || self.years.last() > MAX_YEAR {
            return fail(format!("years must lie within {MIN_YEAR}..={MAX_YEAR}"));
        }
        if !self.strength_drift.is_finite() {
            return fail("strength_drift must be finite".into());
        }
        if !(0.0..1.0).contains(&self.missing_affiliation_rate) {
            return fail("missing_affiliation_rate must lie in [0, 1)".into());
        }
        Ok(())
    }

    /// Sampling weights of every institution in `year`, unnormalized.
    pub fn weights(&self, year: i32) -> Vec<f64> {
        let n = self.num_institutions as usize;
        let t = f64::from(year - self.years.first());
        (0..n)
            .map(|i| {
                let direction = if n == 1 { 0.0 } else { 2.0 * i as f64 / (n - 1) as f64 - 1.0 };
                let base = 1.0 / (i + 1) as f64;
                base * (1.0 + self.strength_drift * t * direction).max(0.0)
            })
            .collect()
    }

    pub fn institution_id(&self, i: usize) -> InstitutionId {
        InstitutionId::new(format!("I{i:0w$}", w = digits(self.num_institutions)))
    }

    pub fn venue_id(&self, v: usize) -> String {
        format!("V{v:0w$}", w = digits(self.num_venues))
    }

    /// Expected raw score of every institution in one venue-year.
    ///
    /// Exact when each author has a single affiliation; with several,
    /// duplicate draws are merged and this is an approximation.
    pub fn expected_scores(&self, year: i32) -> BTreeMap<InstitutionId, f64> {
        let weights = self.weights(year);
        let total: f64 = weights.iter().sum();
        let papers = f64::from(self.papers_per_venue_year) * (1.0 - self.missing_affiliation_rate);
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| (self.institution_id(i), papers * w / total))
            .collect()
    }
}

fn digits(count: u32) -> usize {
    count.saturating_sub(1).max(1).to_string().len()
}

/// Paths of a generated corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusFiles {
    pub papers: PathBuf,
    pub affiliations: PathBuf,
}

impl CorpusFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            papers: dir.join(PAPERS_FILE),
            affiliations: dir.join(AFFILIATIONS_FILE),
        }
    }
}

/// Planted and realized institution scores of a generated corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedTruth {
    /// Expected score per venue-year, by year (identical across venues).
    pub expected: BTreeMap<i32, BTreeMap<InstitutionId, f64>>,
    /// Exact score per venue-year, recomputed from the generated rows.
    pub realized: BTreeMap<VenueYear, ScoreTable>,
}

impl PlantedTruth {
    /// Realized scores of one year summed over all venues.
    pub fn realized_year(&self, year: i32) -> ScoreTable {
        let mut sums: BTreeMap<InstitutionId, BigRational> = BTreeMap::new();
        for ((_, y), table) in &self.realized {
            if *y == year {
                for (id, v) in table.iter() {
                    *sums.entry(id.clone()).or_insert_with(BigRational::zero) += v;
                }
            }
        }
        ScoreTable::new(year, sums).expect("sums of shares are non-negative")
    }
}

type Tally = BTreeMap<InstitutionId, Ratio<i128>>;

/// Reference attribution of one paper's rows by nested loops: every
/// distinct author gets `1 / authors`, divided equally among the author's
/// distinct non-empty institutions, or credited to `None` if there are none.
pub fn naive_paper_shares(rows: &[AffiliationRow]) -> Vec<(Option<InstitutionId>, Ratio<i128>)> {
    let mut authors: Vec<&str> = Vec::new();
    for row in rows {
        if !authors.contains(&row.author_id.as_str()) {
            authors.push(&row.author_id);
        }
    }
    let mut out: Vec<(Option<InstitutionId>, Ratio<i128>)> = Vec::new();
    for author in &authors {
        let mut institutions: Vec<&InstitutionId> = Vec::new();
        for row in rows {
            if row.author_id == *author {
                if let Some(inst) = &row.institution_id {
                    if !institutions.contains(&inst) {
                        institutions.push(inst);
                    }
                }
            }
        }
        let targets: Vec<Option<InstitutionId>> = if institutions.is_empty() {
            vec![None]
        } else {
            institutions.into_iter().map(|i| Some(i.clone())).collect()
        };
        let share = Ratio::new(1, (authors.len() * targets.len()) as i128);
        for target in targets {
            match out.iter_mut().find(|(t, _)| *t == target) {
                Some((_, sum)) => *sum += share,
                None => out.push((target, share)),
            }
        }
    }
    out
}

fn add_paper(tally: &mut Tally, rows: &[AffiliationRow]) {
    for (target, share) in naive_paper_shares(rows) {
        if let Some(id) = target {
            *tally.entry(id).or_insert_with(Ratio::zero) += share;
        }
    }
}

fn tally_to_table(year: i32, tally: &Tally) -> ScoreTable {
    ScoreTable::new(
        year,
        tally.iter().map(|(id, r)| {
            (id.clone(), BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
        }),
    )
    .expect("shares are positive")
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> SynthError + '_ {
    move |source| SynthError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Streams a corpus into `dir`, calling `sink` with every paper and its rows.
fn generate_with<F>(params: &CorpusParams, dir: &Path, mut sink: F) -> Result<CorpusFiles, SynthError>
where
    F: FnMut(&PaperRecord, &[AffiliationRow]),
{
    params.validate()?;
    let files = CorpusFiles::in_dir(dir);
    let open = |path: &Path| File::create(path).map(|f| BufWriter::with_capacity(1 << 16, f)).map_err(io_err(path));
    let mut papers_out = open(&files.papers)?;
    let mut affils_out = open(&files.affiliations)?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let institutions: Vec<InstitutionId> =
        (0..params.num_institutions as usize).map(|i| params.institution_id(i)).collect();
    let author_width = digits(params.num_authors);
    let total_papers =
        u64::from(params.num_venues) * u64::from(params.papers_per_venue_year) * params.years.years().count() as u64;
    let paper_width = digits(u32::try_from(total_papers).unwrap_or(u32::MAX)).max(6);
    let mut serial: u64 = 0;
    let mut rows: Vec<AffiliationRow> = Vec::new();

    for year in params.years.years() {
        let picker = WeightedIndex::new(params.weights(year)).expect("some institution has positive weight");
        for v in 0..params.num_venues as usize {
            let venue = params.venue_id(v);
            for _ in 0..params.papers_per_venue_year {
                serial += 1;
                let paper = PaperRecord {
                    paper_id: format!("P{serial:0paper_width$}"),
                    year,
                    venue_id: venue.clone(),
                };
                writeln!(
                    papers_out,
                    "{id}\tSynthetic study {serial}\tsynthetic study {serial}\t{year}\t{year}/06/01\t\t{venue}\t{lower}\t{venue}\t{rank}",
                    id = paper.paper_id,
                    lower = venue.to_lowercase(),
                    rank = 10000 + serial % 9000,
                )
                .map_err(io_err(&files.papers))?;

                rows.clear();
                let team = rng.gen_range(params.authors_per_paper.min..=params.authors_per_paper.max) as usize;
                for (seq, author) in rand::seq::index::sample(&mut rng, params.num_authors as usize, team)
                    .into_iter()
                    .enumerate()
                {
                    let author_id = format!("A{author:0author_width$}");
                    if params.missing_affiliation_rate > 0.0 && rng.gen_bool(params.missing_affiliation_rate) {
                        writeln!(affils_out, "{}\t{author_id}\t\t\t\t{}", paper.paper_id, seq + 1)
                            .map_err(io_err(&files.affiliations))?;
                        rows.push(AffiliationRow {
                            paper_id: paper.paper_id.clone(),
                            author_id,
                            institution_id: None,
                        });
                        continue;
                    }
                    let draws = rng.gen_range(params.affils_per_author.min..=params.affils_per_author.max);
                    for _ in 0..draws {
                        let inst = &institutions[picker.sample(&mut rng)];
                        writeln!(
                            affils_out,
                            "{}\t{author_id}\t{inst}\tInstitute {inst} of Synthetic Research\tinstitute {lower} of synthetic research\t{}",
                            paper.paper_id,
                            seq + 1,
                            lower = inst.as_str().to_lowercase(),
                        )
                        .map_err(io_err(&files.affiliations))?;
                        rows.push(AffiliationRow {
                            paper_id: paper.paper_id.clone(),
                            author_id: author_id.clone(),
                            institution_id: Some(inst.clone()),
                        });
                    }
                }
                sink(&paper, &rows);
            }
        }
    }
    papers_out.flush().map_err(io_err(&files.papers))?;
    affils_out.flush().map_err(io_err(&files.affiliations))?;
    Ok(files)
}

/// Writes the papers and affiliations files into `dir` without keeping any
/// of the corpus in memory.
pub fn generate_files(params: &CorpusParams, dir: &Path) -> Result<CorpusFiles, SynthError> {
    generate_with(params, dir, |_, _| {})
}

/// Writes the corpus files and returns its planted and realized scores.
/// Deterministic in `params.rng_seed`.
pub fn generate_corpus(params: &CorpusParams, dir: &Path) -> Result<(CorpusFiles, PlantedTruth), SynthError> {
    let mut tallies: BTreeMap<VenueYear, Tally> = BTreeMap::new();
    let files = generate_with(params, dir, |paper, rows| {
        let tally = tallies.entry((paper.venue_id.clone(), paper.year)).or_default();
        add_paper(tally, rows);
    })?;
    let realized = tallies
        .iter()
        .map(|(key, tally)| (key.clone(), tally_to_table(key.1, tally)))
        .collect();
    let expected = params.years.years().map(|y| (y, params.expected_scores(y))).collect();
    Ok((files, PlantedTruth { expected, realized }))
}

/// A corpus held entirely in memory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub papers: Vec<PaperRecord>,
    pub affiliations: Vec<AffiliationRow>,
}

impl Corpus {
    /// Loads generated files with a plain tab split (no schema, no
    /// validation beyond the generator's own layout).
    pub fn read(files: &CorpusFiles) -> Result<Self, SynthError> {
        let lines = |path: &Path| -> Result<Vec<String>, SynthError> {
            let file = File::open(path).map_err(io_err(path))?;
            BufReader::new(file).lines().collect::<Result<_, _>>().map_err(io_err(path))
        };
        let papers = lines(&files.papers)?
            .iter()
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                PaperRecord {
                    paper_id: f[0].to_owned(),
                    year: f[3].parse().expect("generated year"),
                    venue_id: f[8].to_owned(),
                }
            })
            .collect();
        let affiliations = lines(&files.affiliations)?
            .iter()
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                AffiliationRow {
                    paper_id: f[0].to_owned(),
                    author_id: f[1].to_owned(),
                    institution_id: (!f[2].is_empty()).then(|| InstitutionId::from(f[2])),
                }
            })
            .collect();
        Ok(Self { papers, affiliations })
    }
}

/// Reference scoring: groups rows by paper, attributes each paper with
/// [`naive_paper_shares`] in `i128` rationals, and sums per venue-year.
/// Papers with no rows are ignored.
pub fn naive_score(corpus: &Corpus) -> BTreeMap<VenueYear, ScoreTable> {
    let mut rows_of: HashMap<&str, Vec<AffiliationRow>> = HashMap::new();
    for row in &corpus.affiliations {
        rows_of.entry(row.paper_id.as_str()).or_default().push(row.clone());
    }
    let mut tallies: BTreeMap<VenueYear, Tally> = BTreeMap::new();
    for paper in &corpus.papers {
        if let Some(rows) = rows_of.get(paper.paper_id.as_str()) {
            add_paper(tallies.entry((paper.venue_id.clone(), paper.year)).or_default(), rows);
        }
    }
    tallies
        .iter()
        .map(|(key, tally)| (key.clone(), tally_to_table(key.1, tally)))
        .collect()
}

/// Reference top-`k`: exact mean of every institution's normalized scores
/// (absent means 0), rounded once, fully sorted with ids breaking ties.
pub fn naive_topk(tables: &[NormalizedTable], k: usize) -> RankList {
    let mut sums: BTreeMap<&InstitutionId, BigRational> = BTreeMap::new();
    for table in tables {
        for (id, v) in table.iter() {
            *sums.entry(id).or_insert_with(BigRational::zero) += f64_to_exact(v).expect("finite score");
        }
    }
    let lists = BigInt::from(tables.len().max(1));
    let mut means: Vec<(InstitutionId, f64)> = sums
        .into_iter()
        .map(|(id, sum)| (id.clone(), exact_to_f64(&(sum / lists.clone()))))
        .collect();
    means.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    means.truncate(k);
    RankList::from_ordered("naive_topk", means)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::normalize;

    fn small(seed: u64) -> CorpusParams {
        CorpusParams {
            num_institutions: 8,
            num_authors: 40,
            num_venues: 2,
            years: YearRange::new(2011, 2012).unwrap(),
            papers_per_venue_year: 15,
            rng_seed: seed,
            missing_affiliation_rate: 0.1,
            ..CorpusParams::default()
        }
    }

    fn row(author: &str, inst: Option<&str>) -> AffiliationRow {
        AffiliationRow {
            paper_id: "P1".into(),
            author_id: author.into(),
            institution_id: inst.map(InstitutionId::from),
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let fa = generate_files(&small(3), a.path()).unwrap();
        let fb = generate_files(&small(3), b.path()).unwrap();
        assert_eq!(std::fs::read(&fa.papers).unwrap(), std::fs::read(&fb.papers).unwrap());
        assert_eq!(std::fs::read(&fa.affiliations).unwrap(), std::fs::read(&fb.affiliations).unwrap());
        let c = tempfile::tempdir().unwrap();
        let fc = generate_files(&small(4), c.path()).unwrap();
        assert_ne!(std::fs::read(&fa.affiliations).unwrap(), std::fs::read(&fc.affiliations).unwrap());
    }

    #[test]
    fn single_institution_gets_every_paper() {
        let params = CorpusParams {
            num_institutions: 1,
            missing_affiliation_rate: 0.0,
            ..small(1)
        };
        let dir = tempfile::tempdir().unwrap();
        let (_, truth) = generate_corpus(&params, dir.path()).unwrap();
        for year in [2011, 2012] {
            let table = truth.realized_year(year);
            assert_eq!(table.len(), 1);
            assert_eq!(table.iter_f64().next().unwrap().1, 30.0);
        }
    }

    #[test]
    fn realized_truth_matches_in_memory_oracle() {
        let dir = tempfile::tempdir().unwrap();
        let (files, truth) = generate_corpus(&small(9), dir.path()).unwrap();
        let corpus = Corpus::read(&files).unwrap();
        assert_eq!(corpus.papers.len(), 60);
        assert_eq!(naive_score(&corpus), truth.realized);
    }

    #[test]
    fn naive_shares_examples() {
        let two = naive_paper_shares(&[row("a1", Some("A")), row("a1", Some("B")), row("a2", Some("A"))]);
        assert!(two.contains(&(Some("A".into()), Ratio::new(3, 4))));
        assert!(two.contains(&(Some("B".into()), Ratio::new(1, 4))));
        let unknown = naive_paper_shares(&[row("a1", Some("I1")), row("a2", None)]);
        assert!(unknown.contains(&(None, Ratio::new(1, 2))));
        let dup = naive_paper_shares(&[row("a1", Some("I1")), row("a1", Some("I1"))]);
        assert_eq!(dup, vec![(Some("I1".into()), Ratio::new(1, 1))]);
    }

    #[test]
    fn invalid_params() {
        let mut p = small(1);
        p.num_venues = 0;
        assert!(matches!(p.validate(), Err(SynthError::InvalidParams(_))));
        let mut p = small(1);
        p.authors_per_paper = CountRange::new(3, 2);
        assert!(p.validate().is_err());
        let mut p = small(1);
        p.authors_per_paper = CountRange::new(1, 41);
        assert!(p.validate().is_err());
        let mut p = small(1);
        p.missing_affiliation_rate = 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn drift_moves_weight_towards_weaker_institutions() {
        let p = CorpusParams { strength_drift: 0.1, ..small(1) };
        let (w0, w1) = (p.weights(2011), p.weights(2012));
        assert!(w1[0] < w0[0]);
        assert!(w1[7] > w0[7]);
        let expected = p.expected_scores(2011);
        let total: f64 = expected.values().sum();
        assert!((total - 15.0 * 0.9).abs() < 1e-9);
    }

    #[test]
    fn naive_topk_examples() {
        let t = ScoreTable::from_f64(2011, [("A", 1.0), ("B", 3.0), ("C", 2.0)]).unwrap();
        let n = normalize(&t);
        let full = naive_topk(std::slice::from_ref(&n), 3);
        assert_eq!(full.ids().map(|i| i.as_str()).collect::<Vec<_>>(), ["B", "C", "A"]);
        assert_eq!(naive_topk(&[n], 1).len(), 1);
    }
}
