use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque institution key as it appears in the affiliation dump.
///
/// The "unknown institution" sentinel is not an id; it is modelled as
/// `Option<InstitutionId>::None` wherever it can occur.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstitutionId(String);

impl InstitutionId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InstitutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for InstitutionId {
    fn from(id: &str) -> Self {
        Self(id.to_owned())
    }
}

impl From<String> for InstitutionId {
    fn from(id: String) -> Self {
        Self(id)
    }
}

impl Borrow<str> for InstitutionId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Display form of the unknown-institution sentinel.
pub const UNKNOWN_LABEL: &str = "UNKNOWN";

/// Formats an optional institution, rendering `None` as [`UNKNOWN_LABEL`].
pub fn display_institution(id: Option<&InstitutionId>) -> &str {
    id.map_or(UNKNOWN_LABEL, InstitutionId::as_str)
}
