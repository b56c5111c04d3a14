//! NDCG@k scoring of predicted rankings and method-comparison reports.
//!
//! Gains are linear: item `i` (1-based) contributes `rel / log2(i + 1)`.
//! Relevance is the institution's raw score in the held-out year; NDCG is
//! invariant to rescaling it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::aggregate::{run_aggregation, AggregateError, AggregationSpec, RankList};
use crate::ids::InstitutionId;
use crate::scoring::ScoreTable;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cutoff k must be at least 1")]
    InvalidK,
    #[error("relevance for {institution} must be finite and non-negative, got {value}")]
    InvalidRelevance { institution: String, value: f64 },
    #[error("ideal DCG is zero: every relevance in the truth year is zero, NDCG is undefined")]
    ZeroIdeal,
    #[error("no ground truth for venue {0}")]
    MissingTruth(String),
    #[error("venue {venue}: {source}")]
    Venue {
        venue: String,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
}

/// Rank cutoff `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cutoff(usize);

impl Cutoff {
    pub fn new(k: usize) -> Result<Self, EvalError> {
        if k == 0 {
            Err(EvalError::InvalidK)
        } else {
            Ok(Self(k))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// True relevance of institutions in the held-out year.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    year: i32,
    relevance: BTreeMap<InstitutionId, f64>,
}

impl GroundTruth {
    pub fn new<I, K>(year: i32, relevance: I) -> Result<Self, EvalError>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<InstitutionId>,
    {
        let mut map = BTreeMap::new();
        for (id, value) in relevance {
            let id = id.into();
            if !(value.is_finite() && value >= 0.0) {
                return Err(EvalError::InvalidRelevance {
                    institution: id.to_string(),
                    value,
                });
            }
            map.insert(id, value);
        }
        Ok(Self { year, relevance: map })
    }

    /// Relevance = rounded raw score.
    pub fn from_scores(table: &ScoreTable) -> Self {
        Self {
            year: table.year(),
            relevance: table.iter_f64().map(|(id, v)| (id.clone(), v)).collect(),
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn relevance(&self, institution: &str) -> f64 {
        self.relevance.get(institution).copied().unwrap_or(0.0)
    }

    pub fn has_positive(&self) -> bool {
        self.relevance.values().any(|&v| v > 0.0)
    }

    /// Institutions by relevance descending, ties by id.
    pub fn ideal_order(&self) -> Vec<(&InstitutionId, f64)> {
        let mut order: Vec<(&InstitutionId, f64)> = self.relevance.iter().map(|(id, &v)| (id, v)).collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        order
    }
}

fn discounted<I: IntoIterator<Item = f64>>(gains: I, k: Cutoff) -> f64 {
    gains
        .into_iter()
        .take(k.get())
        .enumerate()
        .map(|(i, gain)| gain / ((i + 2) as f64).log2())
        .sum()
}

/// DCG of the first `k` predicted items; unknown institutions gain 0.
pub fn dcg_at_k(predicted: &RankList, truth: &GroundTruth, k: Cutoff) -> f64 {
    discounted(predicted.ids().map(|id| truth.relevance(id.as_str())), k)
}

/// DCG of the best possible ordering.
pub fn ideal_dcg_at_k(truth: &GroundTruth, k: Cutoff) -> f64 {
    discounted(truth.ideal_order().into_iter().map(|(_, v)| v), k)
}

/// `DCG / ideal DCG`, in `[0, 1]`. Undefined ([`EvalError::ZeroIdeal`]) when
/// every relevance is zero.
pub fn ndcg_at_k(predicted: &RankList, truth: &GroundTruth, k: Cutoff) -> Result<f64, EvalError> {
    let ideal = ideal_dcg_at_k(truth, k);
    if ideal <= 0.0 {
        return Err(EvalError::ZeroIdeal);
    }
    Ok((dcg_at_k(predicted, truth, k) / ideal).min(1.0))
}

/// One venue's NDCG per method, in method order.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow {
    pub venue: String,
    pub values: Vec<f64>,
}

impl EvalRow {
    /// Index of the best method; the earliest one wins a tie.
    pub fn winner(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
            .map(|(i, _)| i)
    }
}

/// NDCG@k of several methods over several venues.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub k: Cutoff,
    /// Column headings.
    pub methods: Vec<String>,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn new(k: Cutoff, methods: Vec<String>) -> Self {
        Self {
            k,
            methods,
            rows: Vec::new(),
        }
    }

    /// Appends a venue row. Panics if the value count differs from the
    /// method count.
    pub fn push(&mut self, venue: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.methods.len(), "one value per method");
        self.rows.push(EvalRow {
            venue: venue.into(),
            values,
        });
    }

    /// Aligned plain-text table. Values use three decimals and the best
    /// method of each venue is marked with `*`.
    pub fn render_text(&self) -> String {
        const VENUE: &str = "Venue";
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                let winner = row.winner();
                row.values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| format!("{v:.3}{}", if Some(i) == winner { "*" } else { " " }))
                    .collect()
            })
            .collect();

        let venue_width = self.rows.iter().map(|r| r.venue.len()).chain([VENUE.len()]).max().unwrap_or(0);
        let widths: Vec<usize> = self
            .methods
            .iter()
            .enumerate()
            .map(|(i, m)| cells.iter().map(|r| r[i].len()).chain([m.len()]).max().unwrap_or(0))
            .collect();

        let mut out = String::new();
        let _ = writeln!(out, "NDCG@{}", self.k.get());
        let _ = write!(out, "{VENUE:<venue_width$}");
        for (m, w) in self.methods.iter().zip(&widths) {
            let _ = write!(out, " | {m:>w$}");
        }
        out.push('\n');
        out.push_str(&"-".repeat(venue_width));
        for w in &widths {
            out.push_str("-+-");
            out.push_str(&"-".repeat(*w));
        }
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&cells) {
            let _ = write!(out, "{:<venue_width$}", row.venue);
            for (cell, w) in cells.iter().zip(&widths) {
                let _ = write!(out, " | {cell:>w$}");
            }
            out.push('\n');
        }
        out.push_str("* best method for the venue\n");
        out.lines().map(|line| format!("{}\n", line.trim_end())).collect()
    }

    /// `venue,method,ndcg@k` rows, LF line endings.
    pub fn render_csv(&self) -> String {
        let mut out = format!("venue,method,ndcg@{}\n", self.k.get());
        for row in &self.rows {
            for (method, value) in self.methods.iter().zip(&row.values) {
                let _ = writeln!(out, "{},{},{}", csv_field(&row.venue), csv_field(method), value);
            }
        }
        out
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_owned()
    }
}

/// Training and held-out score tables of one venue.
#[derive(Clone, Debug)]
pub struct VenueScores {
    pub venue: String,
    pub training: Vec<ScoreTable>,
    pub truth: Option<ScoreTable>,
}

/// NDCG@k of already-computed rankings against a venue's truth table.
pub fn evaluate_rankings(rankings: &[RankList], truth: &ScoreTable, k: Cutoff) -> Result<Vec<f64>, EvalError> {
    let truth = GroundTruth::from_scores(truth);
    rankings.iter().map(|r| ndcg_at_k(r, &truth, k)).collect()
}

/// Aggregates each venue's training years with every spec and scores the
/// result against the venue's held-out year.
pub fn evaluate_protocol(
    venues: &[VenueScores],
    specs: &[AggregationSpec],
    k: Cutoff,
) -> Result<EvalReport, EvalError> {
    let mut report = EvalReport::new(k, specs.iter().map(AggregationSpec::display_name).collect());
    for venue in venues {
        let wrap = |source: EvalError| EvalError::Venue {
            venue: venue.venue.clone(),
            source: Box::new(source),
        };
        let truth = venue
            .truth
            .as_ref()
            .ok_or_else(|| EvalError::MissingTruth(venue.venue.clone()))?;
        let rankings = specs
            .iter()
            .map(|spec| run_aggregation(spec, &venue.training))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| wrap(e.into()))?;
        let values = evaluate_rankings(&rankings, truth, k).map_err(wrap)?;
        report.push(venue.venue.clone(), values);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ranking(ids: &[&str]) -> RankList {
        let n = ids.len();
        RankList::from_ordered("p", ids.iter().enumerate().map(|(i, id)| ((*id).into(), (n - i) as f64)))
    }

    fn truth(rel: &[(&str, f64)]) -> GroundTruth {
        GroundTruth::new(2015, rel.iter().map(|&(id, v)| (id, v))).unwrap()
    }

    fn k(n: usize) -> Cutoff {
        Cutoff::new(n).unwrap()
    }

    #[test]
    fn dcg_examples() {
        assert_eq!(dcg_at_k(&ranking(&["A"]), &truth(&[("A", 1.0)]), k(1)), 1.0);
        let t = truth(&[("A", 1.0), ("B", 0.0)]);
        let d = dcg_at_k(&ranking(&["B", "A"]), &t, k(2));
        assert!((d - 1.0 / 3f64.log2()).abs() < 1e-12);
        assert!((d - 0.6309).abs() < 1e-4);
        assert_eq!(dcg_at_k(&ranking(&["B", "A"]), &t, k(50)), d);
    }

    #[test]
    fn ndcg_of_ideal_is_exactly_one() {
        let t = truth(&[("A", 3.0), ("B", 2.0), ("C", 1.0)]);
        assert_eq!(ndcg_at_k(&ranking(&["A", "B", "C"]), &t, k(3)).unwrap(), 1.0);
    }

    #[test]
    fn reversed_three_items() {
        let t = truth(&[("A", 3.0), ("B", 2.0), ("C", 1.0)]);
        let l3 = 3f64.log2();
        let expected = (1.0 + 2.0 / l3 + 3.0 / 2.0) / (3.0 + 2.0 / l3 + 1.0 / 2.0);
        let got = ndcg_at_k(&ranking(&["C", "B", "A"]), &t, k(3)).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.790).abs() < 1e-3);
    }

    #[test]
    fn zero_relevance_is_undefined() {
        let t = truth(&[("A", 0.0)]);
        assert!(matches!(ndcg_at_k(&ranking(&["A"]), &t, k(5)), Err(EvalError::ZeroIdeal)));
        assert!(Cutoff::new(0).is_err());
        assert!(GroundTruth::new(2015, [("A", -1.0)]).is_err());
    }

    #[test]
    fn unknown_predictions_gain_nothing() {
        let t = truth(&[("A", 1.0)]);
        let v = ndcg_at_k(&ranking(&["X", "A"]), &t, k(2)).unwrap();
        assert!((v - 1.0 / 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn winner_prefers_earliest_on_tie() {
        let row = EvalRow { venue: "v".into(), values: vec![0.5, 0.7, 0.7] };
        assert_eq!(row.winner(), Some(1));
    }

    #[test]
    fn csv_report() {
        let mut report = EvalReport::new(k(20), vec!["Normalized Sum".into(), "Fagin".into()]);
        report.push("KDD", vec![0.799, 0.766]);
        assert_eq!(report.render_csv(), "venue,method,ndcg@20\nKDD,Normalized Sum,0.799\nKDD,Fagin,0.766\n");
    }

    #[test]
    fn protocol_reports_one_for_perfect_prediction() {
        let train = ScoreTable::from_f64(2014, [("A", 3.0), ("B", 2.0), ("C", 1.0)]).unwrap();
        let held_out = ScoreTable::from_f64(2015, [("A", 30.0), ("B", 20.0), ("C", 10.0)]).unwrap();
        let venues = [VenueScores { venue: "V".into(), training: vec![train], truth: Some(held_out) }];
        let report = evaluate_protocol(&venues, &[AggregationSpec::NormalizedSum], k(20)).unwrap();
        assert_eq!(report.rows[0].values, vec![1.0]);

        let missing = [VenueScores { venue: "W".into(), training: vec![], truth: None }];
        assert!(matches!(
            evaluate_protocol(&missing, &[AggregationSpec::NormalizedSum], k(20)),
            Err(EvalError::MissingTruth(_))
        ));
    }

    proptest! {
        #[test]
        fn ndcg_ignores_relevance_scale(rel in prop::collection::vec(0.01f64..10.0, 2..30), c in 0.001f64..1000.0) {
            let names: Vec<String> = (0..rel.len()).map(|i| format!("i{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let pred = ranking(&refs);
            let base = GroundTruth::new(2015, names.iter().cloned().zip(rel.iter().copied())).unwrap();
            let scaled = GroundTruth::new(2015, names.iter().cloned().zip(rel.iter().map(|r| r * c))).unwrap();
            let a = ndcg_at_k(&pred, &base, k(20)).unwrap();
            let b = ndcg_at_k(&pred, &scaled, k(20)).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
