use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use instrank::aggregate::{run_aggregation, AggregationSpec, RankList};
use instrank::ingest::YearRange;
use instrank::scoring::ScoreTable;
use instrank::synth::{generate_corpus, CorpusParams, CountRange, PlantedTruth};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_instrank"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn params(seed: u64) -> CorpusParams {
    CorpusParams {
        num_institutions: 30,
        num_authors: 400,
        num_venues: 2,
        years: YearRange::new(2011, 2015).unwrap(),
        papers_per_venue_year: 60,
        authors_per_paper: CountRange::new(1, 4),
        affils_per_author: CountRange::new(1, 2),
        strength_drift: 0.05,
        rng_seed: seed,
        missing_affiliation_rate: 0.05,
    }
}

struct Fixture {
    dir: tempfile::TempDir,
    truth: PlantedTruth,
}

impl Fixture {
    fn new(seed: u64) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data");
        fs::create_dir(&data).unwrap();
        let (_, truth) = generate_corpus(&params(seed), &data).unwrap();
        fs::write(
            dir.path().join("cfg.toml"),
            "papers = \"data/papers.tsv\"\naffiliations = \"data/affiliations.tsv\"\noutput_dir = \"out\"\n\
             venues = [\"V0\", \"V1\"]\ntraining_years = { first = 2011, last = 2014 }\ntruth_year = 2015\n",
        )
        .unwrap();
        Fixture { dir, truth }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn out(&self, name: &str) -> PathBuf {
        self.path().join("out").join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        let mut all = vec!["--config", "cfg.toml"];
        all.extend_from_slice(args);
        run(self.path(), &all)
    }
}

fn csv_of(table: &ScoreTable) -> String {
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn read_table(path: &Path, year: i32) -> ScoreTable {
    ScoreTable::read_csv(fs::File::open(path).unwrap(), year).unwrap()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn score_files_match_the_naive_oracle() {
    let fx = Fixture::new(1);
    let out = fx.run(&["score", "--jobs", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("malformed rows skipped"));
    for venue in ["V0", "V1"] {
        for year in 2011..=2015 {
            let expected = &fx.truth.realized[&(venue.to_string(), year)];
            let got = fs::read_to_string(fx.out(&format!("scores_{venue}_{year}.csv"))).unwrap();
            assert_eq!(got, csv_of(expected), "{venue} {year}");
        }
    }
}

#[test]
fn job_count_does_not_change_outputs() {
    let fx = Fixture::new(2);
    assert!(fx.run(&["pipeline", "--jobs", "1", "-o", "one"]).status.success());
    assert!(fx.run(&["pipeline", "--jobs", "3", "-o", "three"]).status.success());
    assert_eq!(snapshot(&fx.path().join("one")), snapshot(&fx.path().join("three")));
}

#[test]
fn empty_venue_set_writes_nothing() {
    let fx = Fixture::new(3);
    fs::write(fx.path().join("empty.toml"), "papers = \"data/papers.tsv\"\naffiliations = \"data/affiliations.tsv\"\noutput_dir = \"out\"\n").unwrap();
    let out = run(fx.path(), &["score", "--config", "empty.toml"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("no venues"));
    assert!(!fx.path().join("out").exists());
}

#[test]
fn missing_input_is_an_io_error() {
    let fx = Fixture::new(4);
    let out = fx.run(&["score", "--papers", "nowhere/papers.tsv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nowhere/papers.tsv"));
}

#[test]
fn malformed_rows_are_skipped_or_fatal_under_strict() {
    let fx = Fixture::new(5);
    let papers = fx.path().join("data/papers.tsv");
    let mut text = fs::read_to_string(&papers).unwrap();
    text.push_str("PX\tbad\tbad\t20l4\t\t\tV0\tv0\tV0\t1\n");
    fs::write(&papers, text).unwrap();

    let lenient = fx.run(&["score"]);
    assert!(lenient.status.success());
    assert!(stderr(&lenient).contains("1 malformed rows skipped"), "{}", stderr(&lenient));

    let strict = fx.run(&["score", "--strict"]);
    assert_eq!(strict.status.code(), Some(4));
    assert!(stderr(&strict).contains("row 601"), "{}", stderr(&strict));
}

#[test]
fn single_year_normalized_sum_keeps_the_score_order() {
    let fx = Fixture::new(6);
    assert!(fx.run(&["score"]).status.success());
    let out = fx.run(&["aggregate", "--first-year", "2014", "--method", "normalized_sum"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let scores = read_table(&fx.out("scores_V0_2014.csv"), 2014);
    let ranking = RankList::read_csv(fs::File::open(fx.out("ranking_V0_normalized_sum.csv")).unwrap(), "r").unwrap();
    let expected: Vec<_> = scores.ranked().into_iter().map(|(id, _)| id).collect();
    assert_eq!(ranking.ids().cloned().collect::<Vec<_>>(), expected);
}

#[test]
fn bare_fagin_uses_twenty() {
    let fx = Fixture::new(7);
    assert!(fx.run(&["score"]).status.success());
    assert!(fx.run(&["aggregate", "--method", "fagin"]).status.success());
    let ranking = RankList::read_csv(fs::File::open(fx.out("ranking_V1_fagin_k_20.csv")).unwrap(), "r").unwrap();
    assert_eq!(ranking.len(), 20);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fx.out("ranking_V1_fagin_k_20.json")).unwrap()).unwrap();
    assert_eq!(json["method"], "fagin:k=20");
    assert_eq!(json["items"][0]["rank"], 1);
}

#[test]
fn unknown_method_is_a_usage_error() {
    let fx = Fixture::new(8);
    let out = fx.run(&["aggregate", "--method", "kemeny"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("kemeny"));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn config_errors_exit_two() {
    let fx = Fixture::new(9);
    let inside = fx.run(&["pipeline", "--truth-year", "2013"]);
    assert_eq!(inside.status.code(), Some(2));
    fs::write(fx.path().join("broken.toml"), "venues = [").unwrap();
    assert_eq!(run(fx.path(), &["score", "--config", "broken.toml"]).status.code(), Some(2));
    assert_eq!(fx.run(&["score", "--k", "0"]).status.code(), Some(2));
    assert_eq!(run(fx.path(), &["frobnicate"]).status.code(), Some(2));
}

fn write_scores(dir: &Path, venue: &str, year: i32, rows: &[(&str, f64)]) {
    let table = ScoreTable::from_f64(year, rows.iter().map(|&(id, v)| (id, v))).unwrap();
    fs::write(dir.join(format!("scores_{venue}_{year}.csv")), csv_of(&table)).unwrap();
}

#[test]
fn perfect_predictions_score_one() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [("A", 4.0), ("B", 3.0), ("C", 2.0), ("D", 1.0)];
    for year in 2013..=2015 {
        write_scores(dir.path(), "V", year, &rows);
    }
    let common = ["--venues", "V", "--first-year", "2013", "--last-year", "2014", "-o", "."];
    let mut args = vec!["aggregate"];
    args.extend(common);
    assert!(run(dir.path(), &args).status.success());
    let mut args = vec!["evaluate"];
    args.extend(common);
    let out = run(dir.path(), &args);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",1")), "{csv}");
}

#[test]
fn all_zero_truth_exits_five() {
    let dir = tempfile::tempdir().unwrap();
    write_scores(dir.path(), "V", 2014, &[("A", 2.0), ("B", 1.0)]);
    write_scores(dir.path(), "V", 2015, &[("A", 0.0), ("B", 0.0)]);
    let common = ["--venues", "V", "--first-year", "2014", "--last-year", "2014", "-o", "."];
    assert!(run(dir.path(), &[&["aggregate"][..], &common].concat()).status.success());
    let out = run(dir.path(), &[&["evaluate"][..], &common].concat());
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).contains("venue V"));
}

#[test]
fn pipeline_predicts_with_the_winner_and_is_idempotent() {
    let fx = Fixture::new(10);
    let first = fx.run(&["pipeline"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let before = snapshot(&fx.path().join("out"));
    assert!(fx.run(&["pipeline"]).status.success());
    assert_eq!(before, snapshot(&fx.path().join("out")));

    let winners = fs::read_to_string(fx.out("winners.csv")).unwrap();
    for line in winners.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let spec: AggregationSpec = fields[1].parse().unwrap();
        let tables: Vec<ScoreTable> = (2011..=2015)
            .map(|y| read_table(&fx.out(&format!("scores_{}_{y}.csv", fields[0])), y))
            .collect();
        let expected = run_aggregation(&spec, &tables).unwrap();
        let mut buf = Vec::new();
        expected.write_csv(&mut buf).unwrap();
        let got = fs::read(fx.out(&format!("prediction_{}.csv", fields[0]))).unwrap();
        assert_eq!(got, buf);
    }
    assert!(String::from_utf8_lossy(&first.stdout).contains("NDCG@20"));
}

#[test]
fn synth_subcommand_writes_corpus_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.toml"), "[synth]\nnum_venues = 1\npapers_per_venue_year = 10\nyears = { first = 2014, last = 2015 }\n").unwrap();
    let out = run(dir.path(), &["synth", "--config", "cfg.toml", "--seed", "3", "-o", "gen"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["papers.tsv", "affiliations.tsv", "truth_2014.csv", "truth_2015.csv"] {
        assert!(dir.path().join("gen").join(name).exists(), "{name}");
    }
    let truth = fs::read_to_string(dir.path().join("gen/truth_2015.csv")).unwrap();
    assert!(truth.starts_with("venue_id,institution_id,score,expected\n"));

    fs::write(dir.path().join("bad.toml"), "[synth]\nnum_venues = 0\n").unwrap();
    assert_eq!(run(dir.path(), &["synth", "--config", "bad.toml"]).status.code(), Some(2));
}
