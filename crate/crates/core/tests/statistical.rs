//! Seeded statistical checks on synthetic corpora.

use std::collections::BTreeSet;

use instrank::aggregate::{run_aggregation, AggregationSpec};
use instrank::evaluate::{ndcg_at_k, Cutoff, GroundTruth};
use instrank::ids::InstitutionId;
use instrank::ingest::YearRange;
use instrank::scoring::ScoreTable;
use instrank::synth::{generate_corpus, CorpusParams, PlantedTruth};

fn corpus(seed: u64, drift: f64) -> (CorpusParams, PlantedTruth) {
    let params = CorpusParams {
        num_institutions: 40,
        num_authors: 800,
        num_venues: 1,
        years: YearRange::new(2011, 2015).unwrap(),
        papers_per_venue_year: 200,
        strength_drift: drift,
        rng_seed: seed,
        ..CorpusParams::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let (_, truth) = generate_corpus(&params, dir.path()).unwrap();
    (params, truth)
}

fn venue_tables(truth: &PlantedTruth, years: std::ops::RangeInclusive<i32>) -> Vec<ScoreTable> {
    years.map(|y| truth.realized[&("V0".to_string(), y)].clone()).collect()
}

#[test]
fn strongest_institutions_are_recovered_without_drift() {
    let spec: AggregationSpec = "normalized_sum".parse().unwrap();
    let seeds = 100;
    let mut recovered = 0;
    for seed in 0..seeds {
        let (params, truth) = corpus(seed, 0.0);
        let ranking = run_aggregation(&spec, &venue_tables(&truth, 2011..=2015)).unwrap();
        let top10: BTreeSet<&InstitutionId> = ranking.ids().take(10).collect();
        let planted: Vec<InstitutionId> = (0..5).map(|i| params.institution_id(i)).collect();
        if planted.iter().all(|id| top10.contains(id)) {
            recovered += 1;
        }
    }
    assert!(recovered * 100 >= 95 * seeds, "recovered in {recovered} of {seeds} seeds");
}

#[test]
fn normalized_sum_against_borda_rate() {
    let k = Cutoff::new(20).unwrap();
    let methods: [AggregationSpec; 2] = ["normalized_sum".parse().unwrap(), "borda:sum".parse().unwrap()];
    let seeds = 40;
    let mut wins = 0;
    for seed in 0..seeds {
        let (_, truth) = corpus(1000 + seed, 0.05);
        let training = venue_tables(&truth, 2011..=2014);
        let held_out = GroundTruth::from_scores(&truth.realized[&("V0".to_string(), 2015)]);
        let scores: Vec<f64> = methods
            .iter()
            .map(|m| ndcg_at_k(&run_aggregation(m, &training).unwrap(), &held_out, k).unwrap())
            .collect();
        if scores[0] >= scores[1] {
            wins += 1;
        }
    }
    println!("normalized_sum at least as good as borda:sum on {wins} of {seeds} seeded corpora");
}
