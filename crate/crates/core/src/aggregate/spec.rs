use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AggregateError;

/// Default ranking cutoff: the contest metric is NDCG@20, and Fagin's `k`
/// defaults to the same value.
pub const DEFAULT_CUTOFF: usize = 20;

/// How per-list Borda points are combined across lists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BordaVariant {
    /// Sum of points.
    Sum,
    /// Median of points (mean of the two middle values for an even count).
    Median,
    /// Geometric mean of points; zero if any point value is zero.
    GeometricMean,
    /// `sum(points^p) / lists`.
    PNorm(f64),
}

/// Which aggregation method to run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AggregationSpec {
    /// Sum over years of each institution's score divided by the year's best.
    NormalizedSum,
    Borda(BordaVariant),
    /// Top-`k` by mean normalized score, via Fagin's algorithm.
    Fagin { k: usize },
}

impl AggregationSpec {
    pub fn validate(&self) -> Result<(), AggregateError> {
        match *self {
            AggregationSpec::Borda(BordaVariant::PNorm(p)) if !(p.is_finite() && p > 0.0) => {
                Err(AggregateError::InvalidP(p))
            }
            AggregationSpec::Fagin { k: 0 } => Err(AggregateError::InvalidK),
            _ => Ok(()),
        }
    }

    /// Parses a method name; a bare `fagin` takes `default_k`.
    pub fn parse_with_k(text: &str, default_k: usize) -> Result<Self, AggregateError> {
        let text = text.trim();
        let (method, option) = match text.split_once(':') {
            Some((m, o)) => (m, Some(o)),
            None => (text, None),
        };
        let unknown = || AggregateError::UnknownMethod(text.to_owned());
        let spec = match (method, option) {
            ("normalized_sum", None) => AggregationSpec::NormalizedSum,
            ("borda", None | Some("sum")) => AggregationSpec::Borda(BordaVariant::Sum),
            ("borda", Some("median")) => AggregationSpec::Borda(BordaVariant::Median),
            ("borda", Some("geometric_mean")) => AggregationSpec::Borda(BordaVariant::GeometricMean),
            ("borda", Some(o)) => {
                let p = o.strip_prefix("p_norm=").ok_or_else(unknown)?;
                AggregationSpec::Borda(BordaVariant::PNorm(p.parse().map_err(|_| unknown())?))
            }
            ("fagin", None) => AggregationSpec::Fagin { k: default_k },
            ("fagin", Some(o)) => {
                let k = o.strip_prefix("k=").ok_or_else(unknown)?;
                AggregationSpec::Fagin {
                    k: k.parse().map_err(|_| unknown())?,
                }
            }
            _ => return Err(unknown()),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Name used in output file names: the canonical form with `:` and `=`
    /// replaced by `_`.
    pub fn slug(&self) -> String {
        self.to_string().replace([':', '='], "_")
    }

    /// Column heading for reports.
    pub fn display_name(&self) -> String {
        match self {
            AggregationSpec::NormalizedSum => "Normalized Sum".into(),
            AggregationSpec::Borda(BordaVariant::Sum) => "Borda Count".into(),
            AggregationSpec::Borda(BordaVariant::Median) => "Borda Median".into(),
            AggregationSpec::Borda(BordaVariant::GeometricMean) => "Borda Geo. Mean".into(),
            AggregationSpec::Borda(BordaVariant::PNorm(p)) => format!("Borda p={p}"),
            AggregationSpec::Fagin { .. } => "Fagin".into(),
        }
    }
}

impl fmt::Display for AggregationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggregationSpec::NormalizedSum => f.write_str("normalized_sum"),
            AggregationSpec::Borda(BordaVariant::Sum) => f.write_str("borda:sum"),
            AggregationSpec::Borda(BordaVariant::Median) => f.write_str("borda:median"),
            AggregationSpec::Borda(BordaVariant::GeometricMean) => f.write_str("borda:geometric_mean"),
            AggregationSpec::Borda(BordaVariant::PNorm(p)) => write!(f, "borda:p_norm={p}"),
            AggregationSpec::Fagin { k } => write!(f, "fagin:k={k}"),
        }
    }
}

impl FromStr for AggregationSpec {
    type Err = AggregateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_with_k(s, DEFAULT_CUTOFF)
    }
}

impl TryFrom<String> for AggregationSpec {
    type Error = AggregateError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<AggregationSpec> for String {
    fn from(spec: AggregationSpec) -> String {
        spec.to_string()
    }
}
