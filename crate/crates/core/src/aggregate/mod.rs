//! Combining per-year scores into one final ranking.
//!
//! Three families are provided: the sum of per-year max-normalized scores
//! ([`normalized_sum`]), positional Borda count with several combining
//! functions ([`borda_aggregate`]), and Fagin's top-k algorithm over the
//! mean normalized score ([`fagin_topk`]). [`run_aggregation`] dispatches on
//! an [`AggregationSpec`].

mod borda;
mod fagin;
mod normalized_sum;
mod spec;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::ids::InstitutionId;
use crate::scoring::{normalize, sort_by_score, NormalizedTable, ScoreTable};

pub use borda::{borda_aggregate, borda_scores};
pub use fagin::{fagin_topk, fagin_topk_traced, FaginTrace};
pub use normalized_sum::normalized_sum;
pub use spec::{AggregationSpec, BordaVariant, DEFAULT_CUTOFF};

#[derive(Debug, Error)]
pub enum AggregateError {
    #[error("nothing to aggregate")]
    NoInput,
    #[error("year {0} appears more than once")]
    DuplicateYear(i32),
    #[error("p-norm exponent must be finite and > 0, got {0}")]
    InvalidP(f64),
    #[error("cutoff k must be at least 1")]
    InvalidK,
    #[error("k = {k} exceeds the {universe} ranked institutions")]
    KTooLarge { k: usize, universe: usize },
    #[error("rank list {list} is not full: {detail}")]
    NotFullLists { list: usize, detail: String },
    #[error("invalid rank list: {0}")]
    InvalidRankList(String),
    #[error("unknown aggregation method {0:?}")]
    UnknownMethod(String),
    #[error("rank list CSV: {0}")]
    Csv(String),
}

/// Whether larger aggregate values rank higher.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

/// One ranked institution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedItem {
    pub rank: usize,
    pub institution: InstitutionId,
    pub score: f64,
}

/// An ordered list of institutions with strict ordinal ranks `1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankList {
    label: String,
    items: Vec<RankedItem>,
}

impl RankList {
    /// Assigns ranks `1..=n` to already-ordered entries.
    pub fn from_ordered<I>(label: impl Into<String>, ordered: I) -> Self
    where
        I: IntoIterator<Item = (InstitutionId, f64)>,
    {
        let items = ordered
            .into_iter()
            .enumerate()
            .map(|(i, (institution, score))| RankedItem {
                rank: i + 1,
                institution,
                score,
            })
            .collect();
        Self {
            label: label.into(),
            items,
        }
    }

    /// Validates ranks `1..=n`, unique ids and non-increasing scores.
    pub fn new(label: impl Into<String>, items: Vec<RankedItem>) -> Result<Self, AggregateError> {
        let mut ids = BTreeSet::new();
        for (i, item) in items.iter().enumerate() {
            if item.rank != i + 1 {
                return Err(AggregateError::InvalidRankList(format!(
                    "rank {} at position {}",
                    item.rank,
                    i + 1
                )));
            }
            if !ids.insert(&item.institution) {
                return Err(AggregateError::InvalidRankList(format!(
                    "{} listed twice",
                    item.institution
                )));
            }
            if !item.score.is_finite() {
                return Err(AggregateError::InvalidRankList(format!(
                    "non-finite score for {}",
                    item.institution
                )));
            }
            if i > 0 && item.score > items[i - 1].score {
                return Err(AggregateError::InvalidRankList(format!(
                    "score increases at rank {}",
                    item.rank
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            items,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn items(&self) -> &[RankedItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &InstitutionId> {
        self.items.iter().map(|i| &i.institution)
    }

    /// Rank of `institution`, if listed.
    pub fn rank_of(&self, institution: &str) -> Option<usize> {
        self.items
            .iter()
            .find(|i| i.institution.as_str() == institution)
            .map(|i| i.rank)
    }

    /// First `k` items.
    pub fn truncated(&self, k: usize) -> RankList {
        RankList {
            label: self.label.clone(),
            items: self.items.iter().take(k).cloned().collect(),
        }
    }

    /// Writes `rank,institution_id,score` with LF line endings.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), AggregateError> {
        let err = |e: csv::Error| AggregateError::Csv(e.to_string());
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        csv.write_record(["rank", "institution_id", "score"]).map_err(err)?;
        for item in &self.items {
            csv.write_record([
                item.rank.to_string().as_str(),
                item.institution.as_str(),
                item.score.to_string().as_str(),
            ])
            .map_err(err)?;
        }
        csv.flush().map_err(|e| AggregateError::Csv(e.to_string()))
    }

    /// Reads a file written by [`RankList::write_csv`].
    pub fn read_csv<R: Read>(reader: R, label: impl Into<String>) -> Result<Self, AggregateError> {
        let mut csv = csv::Reader::from_reader(reader);
        let headers = csv.headers().map_err(|e| AggregateError::Csv(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["rank", "institution_id", "score"] {
            return Err(AggregateError::Csv(format!("unexpected header {headers:?}")));
        }
        let mut items = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| AggregateError::Csv(e.to_string()))?;
            let bad = |field: &str| AggregateError::Csv(format!("bad {field} in {record:?}"));
            items.push(RankedItem {
                rank: record[0].parse().map_err(|_| bad("rank"))?,
                institution: InstitutionId::from(&record[1]),
                score: record[2].parse().map_err(|_| bad("score"))?,
            });
        }
        Self::new(label, items)
    }
}

/// Aggregate values `f(u)` produced by one method.
#[derive(Clone, Debug, PartialEq)]
pub struct FinalScoreTable {
    entries: BTreeMap<InstitutionId, f64>,
    direction: Direction,
}

impl FinalScoreTable {
    pub fn new(entries: BTreeMap<InstitutionId, f64>, direction: Direction) -> Self {
        Self { entries, direction }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn get(&self, institution: &str) -> Option<f64> {
        self.entries.get(institution).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InstitutionId, f64)> {
        self.entries.iter().map(|(id, &v)| (id, v))
    }
}

/// Anything that can be sorted into a [`RankList`].
pub trait Rankable {
    /// Entries in rank order.
    fn ordered(&self) -> Vec<(InstitutionId, f64)>;
}

impl Rankable for ScoreTable {
    fn ordered(&self) -> Vec<(InstitutionId, f64)> {
        self.ranked()
    }
}

impl Rankable for NormalizedTable {
    fn ordered(&self) -> Vec<(InstitutionId, f64)> {
        self.ranked()
    }
}

impl Rankable for FinalScoreTable {
    fn ordered(&self) -> Vec<(InstitutionId, f64)> {
        let entries = self.entries.iter().map(|(id, &v)| (id.clone(), v)).collect();
        match self.direction {
            Direction::HigherIsBetter => sort_by_score(entries),
            Direction::LowerIsBetter => {
                let mut entries: Vec<(InstitutionId, f64)> = entries;
                entries.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
                entries
            }
        }
    }
}

/// Sorts by value in the table's direction, ties by institution id
/// ascending, and assigns ranks `1..=n`.
pub fn to_ranking<T: Rankable + ?Sized>(table: &T, label: impl Into<String>) -> RankList {
    RankList::from_ordered(label, table.ordered())
}

/// Per-year normalized tables, padded so that every table covers the union
/// of institutions (absent ones score 0).
pub(crate) fn padded_normalized(tables: &[ScoreTable]) -> Vec<NormalizedTable> {
    let mut normalized: Vec<NormalizedTable> = tables.iter().map(normalize).collect();
    let universe: BTreeSet<InstitutionId> = normalized
        .iter()
        .flat_map(|t| t.iter().map(|(id, _)| id.clone()))
        .collect();
    for table in &mut normalized {
        for id in &universe {
            table.pad(id);
        }
    }
    normalized
}

fn check_distinct_years(tables: &[ScoreTable]) -> Result<(), AggregateError> {
    let mut years = BTreeSet::new();
    for table in tables {
        if !years.insert(table.year()) {
            return Err(AggregateError::DuplicateYear(table.year()));
        }
    }
    Ok(())
}

/// Runs one aggregation method over per-year raw score tables.
///
/// Borda and Fagin first rank each normalized year. Fagin works on lists
/// completed with zero scores for institutions missing from a year, and its
/// `k` is capped at the number of institutions seen.
pub fn run_aggregation(spec: &AggregationSpec, per_year: &[ScoreTable]) -> Result<RankList, AggregateError> {
    spec.validate()?;
    if per_year.is_empty() {
        return Err(AggregateError::NoInput);
    }
    check_distinct_years(per_year)?;
    let label = spec.to_string();
    match spec {
        AggregationSpec::NormalizedSum => Ok(to_ranking(&normalized_sum(per_year)?, label)),
        AggregationSpec::Borda(variant) => {
            let lists: Vec<RankList> = per_year
                .iter()
                .map(|t| to_ranking(&normalize(t), t.year().to_string()))
                .collect();
            Ok(to_ranking(&borda_aggregate(&lists, *variant)?, label))
        }
        AggregationSpec::Fagin { k } => {
            let lists: Vec<RankList> = padded_normalized(per_year)
                .iter()
                .map(|t| to_ranking(t, t.year().to_string()))
                .collect();
            let universe = lists[0].len();
            if universe == 0 {
                return Ok(RankList::from_ordered(label, Vec::new()));
            }
            if *k > universe {
                log::warn!("fagin k = {k} capped at {universe} institutions");
            }
            let ranking = fagin_topk(&lists, (*k).min(universe))?;
            Ok(RankList {
                label,
                items: ranking.items,
            })
        }
    }
}
