//! Pipeline configuration: a TOML file with flag overrides.
//!
//! ```toml
//! papers = "data/papers.tsv"
//! affiliations = "data/affiliations.tsv"
//! output_dir = "out"
//! venues = ["V0", "V1"]
//! training_years = { first = 2011, last = 2014 }
//! truth_year = 2015
//! methods = ["normalized_sum", "borda:sum", "fagin"]
//! k = 20
//! strict = false
//! jobs = 4
//!
//! [paper_schema]
//! paper_id = 0
//! year = 3
//! venue_id = 8
//!
//! [affiliation_schema]
//! paper_id = 0
//! author_id = 1
//! affiliation_id = 2
//! delimiter = "\t"
//! has_header = false
//!
//! [synth]
//! rng_seed = 7
//! ```
//!
//! Relative paths in the file are resolved against the file's directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use instrank::aggregate::{AggregationSpec, DEFAULT_CUTOFF};
use instrank::evaluate::Cutoff;
use instrank::ingest::{
    AffiliationColumns, AffiliationSchema, PaperColumns, PaperSchema, ParsePolicy, YearRange,
};
use instrank::synth::CorpusParams;
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_METHODS: [&str; 3] = ["normalized_sum", "borda:sum", "fagin"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Years {
    pub first: i32,
    pub last: i32,
}

/// Contents of a config file; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub papers: Option<PathBuf>,
    pub affiliations: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub venues: Option<Vec<String>>,
    pub training_years: Option<Years>,
    pub truth_year: Option<i32>,
    pub methods: Option<Vec<String>>,
    pub k: Option<usize>,
    pub strict: Option<bool>,
    pub jobs: Option<usize>,
    pub paper_schema: Option<PaperSchema>,
    pub affiliation_schema: Option<AffiliationSchema>,
    pub synth: Option<CorpusParams>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut config: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for slot in [&mut config.papers, &mut config.affiliations, &mut config.output_dir] {
            if let Some(p) = slot.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }
}

/// Flags shared by every subcommand; each overrides the matching config key.
#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads (affiliation scan partitions, venues in parallel).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Abort on the first malformed input row instead of skipping it.
    #[arg(long, global = true)]
    pub strict: bool,
    /// NDCG cutoff, also the default `k` of a bare `fagin` method.
    #[arg(long, global = true, value_name = "N")]
    pub k: Option<usize>,
    #[arg(long, global = true, value_name = "PATH")]
    pub papers: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    pub affiliations: Option<PathBuf>,
    #[arg(long, short = 'o', global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Comma-separated venue ids.
    #[arg(long, global = true, value_delimiter = ',', value_name = "IDS")]
    pub venues: Option<Vec<String>>,
    #[arg(long, global = true, value_name = "YEAR")]
    pub first_year: Option<i32>,
    #[arg(long, global = true, value_name = "YEAR")]
    pub last_year: Option<i32>,
    #[arg(long, global = true, value_name = "YEAR")]
    pub truth_year: Option<i32>,
    /// Comma-separated methods: normalized_sum, borda[:sum|median|geometric_mean|p_norm=<p>], fagin[:k=<n>].
    #[arg(long = "method", global = true, value_delimiter = ',', value_name = "METHODS")]
    pub methods: Option<Vec<String>>,
    /// Papers table ordinals: paper_id,year,venue_id.
    #[arg(long, global = true, value_delimiter = ',', num_args = 3, value_name = "ORDINALS")]
    pub paper_columns: Option<Vec<usize>>,
    /// Affiliations table ordinals: paper_id,author_id,affiliation_id.
    #[arg(long, global = true, value_delimiter = ',', num_args = 3, value_name = "ORDINALS")]
    pub affiliation_columns: Option<Vec<usize>>,
    /// Field delimiter of both tables.
    #[arg(long, global = true, value_name = "CHAR")]
    pub delimiter: Option<char>,
    /// Both tables start with a header line.
    #[arg(long, global = true)]
    pub has_header: bool,
}

/// Fully resolved settings.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub papers: Option<PathBuf>,
    pub affiliations: Option<PathBuf>,
    pub paper_schema: PaperSchema,
    pub affiliation_schema: AffiliationSchema,
    pub venues: BTreeSet<String>,
    pub training: YearRange,
    pub truth_year: i32,
    pub methods: Vec<AggregationSpec>,
    pub k: Cutoff,
    pub output_dir: PathBuf,
    pub strict: bool,
    pub jobs: usize,
    pub synth: CorpusParams,
}

impl PipelineConfig {
    /// Reads `--config` if given and applies the flag overrides.
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::resolve(file, args)
    }

    pub fn resolve(file: FileConfig, args: &CommonArgs) -> Result<Self, CliError> {
        let config_err = |msg: String| CliError::Config(msg);

        let k = args.k.or(file.k).unwrap_or(DEFAULT_CUTOFF);
        let k = Cutoff::new(k).map_err(|e| config_err(e.to_string()))?;

        let file_years = file.training_years.unwrap_or(Years { first: 2011, last: 2014 });
        let first = args.first_year.unwrap_or(file_years.first);
        let last = args.last_year.unwrap_or(file_years.last);
        let training = YearRange::new(first, last)
            .map_err(|_| config_err(format!("training years {first}..{last} are not in order")))?;
        let truth_year = args.truth_year.or(file.truth_year).unwrap_or(last + 1);
        if truth_year <= last {
            return Err(config_err(format!(
                "truth year {truth_year} must come after the training years {first}..{last}"
            )));
        }

        let names = args
            .methods
            .clone()
            .or(file.methods)
            .unwrap_or_else(|| DEFAULT_METHODS.iter().map(|s| s.to_string()).collect());
        if names.is_empty() {
            return Err(config_err("at least one aggregation method is required".into()));
        }
        let methods = names
            .iter()
            .map(|name| AggregationSpec::parse_with_k(name, k.get()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| {
                config_err(format!(
                    "{e}; expected normalized_sum, borda[:sum|median|geometric_mean|p_norm=<p>] or fagin[:k=<n>]"
                ))
            })?;

        let mut paper_schema = file.paper_schema.unwrap_or_default();
        let mut affiliation_schema = file.affiliation_schema.unwrap_or_default();
        if let Some(c) = &args.paper_columns {
            paper_schema.columns = PaperColumns {
                paper_id: c[0],
                year: c[1],
                venue_id: c[2],
            };
        }
        if let Some(c) = &args.affiliation_columns {
            affiliation_schema.columns = AffiliationColumns {
                paper_id: c[0],
                author_id: c[1],
                affiliation_id: c[2],
            };
        }
        if let Some(d) = args.delimiter {
            paper_schema.delimiter = d;
            affiliation_schema.delimiter = d;
        }
        if args.has_header {
            paper_schema.has_header = true;
            affiliation_schema.has_header = true;
        }
        paper_schema.validate().map_err(|e| config_err(format!("paper_schema: {e}")))?;
        affiliation_schema
            .validate()
            .map_err(|e| config_err(format!("affiliation_schema: {e}")))?;

        let jobs = args
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
        if jobs == 0 {
            return Err(config_err("jobs must be at least 1".into()));
        }

        Ok(Self {
            papers: args.papers.clone().or(file.papers),
            affiliations: args.affiliations.clone().or(file.affiliations),
            paper_schema,
            affiliation_schema,
            venues: args.venues.clone().or(file.venues).unwrap_or_default().into_iter().collect(),
            training,
            truth_year,
            methods,
            k,
            output_dir: args.output_dir.clone().or(file.output_dir).unwrap_or_else(|| PathBuf::from(".")),
            strict: args.strict || file.strict.unwrap_or(false),
            jobs,
            synth: file.synth.unwrap_or_default(),
        })
    }

    pub fn policy(&self) -> ParsePolicy {
        if self.strict {
            ParsePolicy::Strict
        } else {
            ParsePolicy::Skip
        }
    }

    /// Every scored year: the training years through the truth year.
    pub fn scored_years(&self) -> YearRange {
        YearRange::new(self.training.first(), self.truth_year).expect("truth year follows training")
    }

    pub fn require_inputs(&self) -> Result<(&Path, &Path), CliError> {
        match (&self.papers, &self.affiliations) {
            (Some(p), Some(a)) => Ok((p, a)),
            _ => Err(CliError::Config(
                "both `papers` and `affiliations` paths are required".into(),
            )),
        }
    }
}
