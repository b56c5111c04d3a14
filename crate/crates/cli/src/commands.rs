//! The pipeline stages. Each stage reads only the previous stage's files
//! from the output directory (scoring reads the raw dumps).

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use instrank::aggregate::{run_aggregation, AggregationSpec, RankList, RankedItem};
use instrank::evaluate::{ndcg_at_k, EvalError, EvalReport, GroundTruth};
use instrank::scoring::{score_corpus, CorpusInput, ScoreTable};
use instrank::synth::generate_corpus;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::CliError;

pub const REPORT_TEXT: &str = "report.txt";
pub const REPORT_CSV: &str = "report.csv";
pub const WINNERS_CSV: &str = "winners.csv";

/// Venue id made safe for a file name.
pub fn file_token(venue: &str) -> String {
    venue
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '.') { c } else { '_' })
        .collect()
}

pub fn scores_path(dir: &Path, venue: &str, year: i32) -> PathBuf {
    dir.join(format!("scores_{}_{year}.csv", file_token(venue)))
}

pub fn ranking_path(dir: &Path, venue: &str, spec: &AggregationSpec, ext: &str) -> PathBuf {
    dir.join(format!("ranking_{}_{}.{ext}", file_token(venue), spec.slug()))
}

pub fn prediction_path(dir: &Path, venue: &str) -> PathBuf {
    dir.join(format!("prediction_{}.csv", file_token(venue)))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(CliError::io(path))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// Runs `work` for every configured venue, up to `jobs` at a time, keeping
/// venue order in the result.
fn per_venue<T, F>(config: &PipelineConfig, work: F) -> Result<Vec<(String, T)>, CliError>
where
    T: Send,
    F: Fn(&str) -> Result<T, CliError> + Sync,
{
    let venues: Vec<&String> = config.venues.iter().collect();
    pool(config.jobs).install(|| {
        venues
            .par_iter()
            .map(|venue| work(venue).map(|value| ((*venue).clone(), value)))
            .collect()
    })
}

pub fn read_scores(config: &PipelineConfig, venue: &str, year: i32) -> Result<ScoreTable, CliError> {
    let path = scores_path(&config.output_dir, venue, year);
    let file = File::open(&path).map_err(CliError::io(&path))?;
    ScoreTable::read_csv(file, year).map_err(CliError::scores_file(&path))
}

fn read_ranking(path: &Path, label: String) -> Result<RankList, CliError> {
    let file = File::open(path).map_err(CliError::io(path))?;
    RankList::read_csv(file, label).map_err(|e| CliError::BadFile {
        path: path.to_owned(),
        detail: e.to_string(),
    })
}

fn write_ranking_csv(path: &Path, ranking: &RankList) -> Result<(), CliError> {
    let mut out = create(path)?;
    ranking.write_csv(&mut out).map_err(|e| CliError::BadFile {
        path: path.to_owned(),
        detail: e.to_string(),
    })?;
    out.flush().map_err(CliError::io(path))
}

/// `synth`: writes the corpus files and one `truth_<year>.csv` per year.
pub fn cmd_synth(config: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let (files, truth) = generate_corpus(&config.synth, dir)?;
    let mut written = vec![files.papers.clone(), files.affiliations.clone()];
    for year in config.synth.years.years() {
        let path = dir.join(format!("truth_{year}.csv"));
        let mut text = String::from("venue_id,institution_id,score,expected\n");
        let expected = &truth.expected[&year];
        for ((venue, _), table) in truth.realized.iter().filter(|((_, y), _)| *y == year) {
            for (id, score) in table.ranked() {
                let planted = expected.get(id.as_str()).copied().unwrap_or(0.0);
                text.push_str(&format!("{venue},{id},{score},{planted}\n"));
            }
        }
        write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

/// Skipped-row counts and unmatched papers of a scoring run.
#[derive(Clone, Debug, Default)]
pub struct ScoreSummary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

/// `score`: one `scores_<venue>_<year>.csv` for every venue and every year
/// from the first training year through the truth year.
pub fn cmd_score(config: &PipelineConfig) -> Result<ScoreSummary, CliError> {
    if config.venues.is_empty() {
        log::warn!("no venues configured; nothing to score");
        return Ok(ScoreSummary::default());
    }
    let (papers, affiliations) = config.require_inputs()?;
    let filter = instrank::ingest::PaperFilter::new(config.venues.iter().cloned(), config.scored_years());
    let scored = score_corpus(&CorpusInput {
        papers,
        paper_schema: &config.paper_schema,
        affiliations,
        affiliation_schema: &config.affiliation_schema,
        filter: &filter,
        policy: config.policy(),
        jobs: config.jobs,
    })?;

    let mut summary = ScoreSummary {
        files: Vec::new(),
        lines: vec![
            scored.paper_stats.summary("papers"),
            scored.affiliation_stats.summary("affiliations"),
        ],
    };
    if !scored.unmatched.is_empty() {
        summary.lines.push(format!(
            "{} selected papers had no affiliation rows and were not scored",
            scored.unmatched.len()
        ));
    }

    ensure_dir(&config.output_dir)?;
    for ((venue, year), table) in &scored.tables {
        if table.is_empty() {
            log::warn!("venue {venue} has no scored institutions in {year}");
        }
        let path = scores_path(&config.output_dir, venue, *year);
        let mut out = create(&path)?;
        table.write_csv(&mut out).map_err(CliError::scores_file(&path))?;
        out.flush().map_err(CliError::io(&path))?;
        summary.files.push(path);
    }
    Ok(summary)
}

#[derive(Serialize)]
struct RankingJson<'a> {
    venue: &'a str,
    method: String,
    method_name: String,
    years: Vec<i32>,
    items: &'a [RankedItem],
}

fn training_tables(config: &PipelineConfig, venue: &str, last: i32) -> Result<Vec<ScoreTable>, CliError> {
    (config.training.first()..=last)
        .map(|year| read_scores(config, venue, year))
        .collect()
}

fn aggregate(venue: &str, spec: &AggregationSpec, tables: &[ScoreTable]) -> Result<RankList, CliError> {
    run_aggregation(spec, tables).map_err(|source| CliError::Aggregate {
        venue: venue.to_owned(),
        source,
    })
}

/// `aggregate`: `ranking_<venue>_<method>.csv` and `.json` for every venue
/// and method, from the training-year score files.
pub fn cmd_aggregate(config: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    if config.venues.is_empty() {
        log::warn!("no venues configured; nothing to aggregate");
    }
    ensure_dir(&config.output_dir)?;
    let written = per_venue(config, |venue| {
        let tables = training_tables(config, venue, config.training.last())?;
        let mut written = Vec::new();
        for spec in &config.methods {
            let ranking = aggregate(venue, spec, &tables)?;
            let csv = ranking_path(&config.output_dir, venue, spec, "csv");
            write_ranking_csv(&csv, &ranking)?;
            let json = ranking_path(&config.output_dir, venue, spec, "json");
            let body = RankingJson {
                venue,
                method: spec.to_string(),
                method_name: spec.display_name(),
                years: tables.iter().map(ScoreTable::year).collect(),
                items: ranking.items(),
            };
            let text = serde_json::to_string_pretty(&body).expect("ranking serializes") + "\n";
            write_text(&json, &text)?;
            written.extend([csv, json]);
        }
        Ok(written)
    })?;
    Ok(written.into_iter().flat_map(|(_, files)| files).collect())
}

fn method_names(specs: &[AggregationSpec]) -> Vec<String> {
    let names: Vec<String> = specs.iter().map(AggregationSpec::display_name).collect();
    let distinct: std::collections::BTreeSet<&String> = names.iter().collect();
    if distinct.len() == names.len() {
        names
    } else {
        specs.iter().map(ToString::to_string).collect()
    }
}

/// Evaluation of every venue plus the chosen method per venue.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub report: EvalReport,
    /// Winning method per venue, by index into the configured methods.
    pub winners: BTreeMap<String, usize>,
}

/// `evaluate`: NDCG@k of every stored ranking against the truth-year
/// scores. Writes `report.txt`, `report.csv` and `winners.csv`.
pub fn cmd_evaluate(config: &PipelineConfig) -> Result<Evaluation, CliError> {
    let rows = per_venue(config, |venue| {
        let truth = GroundTruth::from_scores(&read_scores(config, venue, config.truth_year)?);
        config
            .methods
            .iter()
            .map(|spec| {
                let path = ranking_path(&config.output_dir, venue, spec, "csv");
                let ranking = read_ranking(&path, spec.to_string())?;
                ndcg_at_k(&ranking, &truth, config.k).map_err(|e| match e {
                    EvalError::ZeroIdeal => CliError::ZeroTruth {
                        venue: venue.to_owned(),
                        year: config.truth_year,
                    },
                    other => CliError::BadFile {
                        path,
                        detail: other.to_string(),
                    },
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()
    })?;

    let mut report = EvalReport::new(config.k, method_names(&config.methods));
    for (venue, values) in rows {
        report.push(venue, values);
    }
    let mut winners = BTreeMap::new();
    let mut winners_csv = format!("venue,method,ndcg@{}\n", config.k.get());
    for row in &report.rows {
        if let Some(best) = row.winner() {
            winners.insert(row.venue.clone(), best);
            winners_csv.push_str(&format!("{},{},{}\n", row.venue, config.methods[best], row.values[best]));
        }
    }

    ensure_dir(&config.output_dir)?;
    write_text(&config.output_dir.join(REPORT_TEXT), &report.render_text())?;
    write_text(&config.output_dir.join(REPORT_CSV), &report.render_csv())?;
    write_text(&config.output_dir.join(WINNERS_CSV), &winners_csv)?;
    Ok(Evaluation { report, winners })
}

/// `pipeline`: score, aggregate and evaluate, then rank every venue for the
/// year after the truth year with its winning method applied to all years
/// through the truth year. Writes `prediction_<venue>.csv`.
pub fn cmd_pipeline(config: &PipelineConfig) -> Result<Evaluation, CliError> {
    let summary = cmd_score(config)?;
    for line in &summary.lines {
        eprintln!("{line}");
    }
    cmd_aggregate(config)?;
    let evaluation = cmd_evaluate(config)?;
    per_venue(config, |venue| {
        let spec = &config.methods[evaluation.winners[venue]];
        let tables = training_tables(config, venue, config.truth_year)?;
        let prediction = aggregate(venue, spec, &tables)?;
        write_ranking_csv(&prediction_path(&config.output_dir, venue), &prediction)
    })?;
    Ok(evaluation)
}
