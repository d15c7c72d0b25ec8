//! Version tags carried by every file the tool writes.
//!
//! CSV files start with a comment line `# po-schema: <kind>/v<N>`; JSON
//! documents carry a top-level `"schema"` string of the same form.

use std::path::Path;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Population,
    Sample,
    Truth,
    Draws,
    Fit,
    Manifest,
    Replicates,
    Summary,
    Plot,
}

impl FileKind {
    pub fn name(self) -> &'static str {
        match self {
            FileKind::Population => "population",
            FileKind::Sample => "sample",
            FileKind::Truth => "truth",
            FileKind::Draws => "draws",
            FileKind::Fit => "fit",
            FileKind::Manifest => "manifest",
            FileKind::Replicates => "replicates",
            FileKind::Summary => "summary",
            FileKind::Plot => "plot",
        }
    }

    /// `<kind>/v<N>` for the current version.
    pub fn tag(self) -> String {
        format!("{}/v{SCHEMA_VERSION}", self.name())
    }
}

const CSV_PREFIX: &str = "# po-schema: ";

pub fn csv_header_line(kind: FileKind) -> String {
    format!("{CSV_PREFIX}{}\n", kind.tag())
}

/// Splits the schema line off a CSV document and checks it.
pub fn strip_csv_header<'a>(text: &'a str, kind: FileKind, path: &Path) -> Result<&'a str> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let found = first
        .strip_prefix(CSV_PREFIX)
        .map(|t| t.trim_end_matches('\r').trim().to_string())
        .unwrap_or_default();
    check_tag(&found, kind, path)?;
    Ok(rest)
}

pub fn check_tag(found: &str, kind: FileKind, path: &Path) -> Result<()> {
    if found == kind.tag() {
        Ok(())
    } else {
        Err(CliError::Schema {
            path: path.to_path_buf(),
            found: if found.is_empty() { "<missing>".into() } else { found.into() },
            expected: kind.tag(),
        })
    }
}
