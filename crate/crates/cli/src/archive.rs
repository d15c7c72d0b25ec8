//! The on-disk result of a simulation run.
//!
//! ```text
//! <dir>/manifest.json        config echo, seeds, populations, failures
//! <dir>/replicates.{csv,json}
//! <dir>/summary.json
//! <dir>/tables.txt
//! <dir>/plots/*.csv
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use po_core::datagen::Scenario;
use po_core::experiments::{CellFailure, ExperimentGrid, GridSummary, PopulationInfo, ReplicateResult};
use po_core::sampler::{ModelVariant, SamplerConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::csv_io::{read_csv, write_csv};
use crate::error::{CliError, Result};
use crate::report;
use crate::schema::{check_tag, FileKind};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TABLES_FILE: &str = "tables.txt";

/// How per-replicate seeds follow from the master seed.
pub const SEED_DERIVATION: &str = "splitmix64 fold of (master_seed, stream tag, scenario, n, replicate[, model])";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn replicates_file(self) -> &'static str {
        match self {
            OutputFormat::Csv => "replicates.csv",
            OutputFormat::Json => "replicates.json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool_version: String,
    /// RFC 3339 creation time.
    pub created: String,
    pub format: OutputFormat,
    pub grid: ExperimentGrid,
    /// The per-fit seed and estimator fields are overridden by the grid.
    pub sampler: SamplerConfig,
    pub seed_derivation: String,
    pub populations: Vec<PopulationInfo>,
    pub fits: usize,
    pub failures: Vec<CellFailure>,
    /// Paths relative to the archive directory.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub manifest: Manifest,
    pub results: Vec<ReplicateResult>,
    pub summary: GridSummary,
}

impl Archive {
    pub fn pi_true(&self, scenario: Scenario) -> Option<f64> {
        self.manifest.populations.iter().find(|p| p.scenario == scenario).map(|p| p.pi_true)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReplicateRecord {
    scenario: Scenario,
    n: usize,
    model: ModelVariant,
    replicate: usize,
    beta0: f64,
    beta1: f64,
    pi_hat: f64,
    accept_rate: f64,
    sens: Option<f64>,
    spec: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct Tagged<T> {
    schema: String,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize, Deserialize)]
struct ResultsBody {
    results: Vec<ReplicateResult>,
}

#[derive(Serialize, Deserialize)]
struct SummaryBody {
    summary: GridSummary,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::data(path, None, e.to_string()))?;
    text.push('\n');
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses a JSON document after checking its `"schema"` field.
pub fn read_json<T: DeserializeOwned>(path: &Path, kind: FileKind) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::data(path, Some(e.line() as u64), e.to_string()))?;
    let found = value.get("schema").and_then(|s| s.as_str()).unwrap_or("");
    check_tag(found, kind, path)?;
    serde_json::from_value(value).map_err(|e| CliError::data(path, None, e.to_string()))
}

fn replicate_records(results: &[ReplicateResult], path: &Path) -> Result<Vec<ReplicateRecord>> {
    results
        .iter()
        .map(|r| match r.beta_hat[..] {
            [beta0, beta1] => Ok(ReplicateRecord {
                scenario: r.scenario,
                n: r.n,
                model: r.model,
                replicate: r.replicate,
                beta0,
                beta1,
                pi_hat: r.pi_hat,
                accept_rate: r.accept_rate,
                sens: r.sens,
                spec: r.spec,
            }),
            _ => Err(CliError::data(path, None, "replicate table holds two coefficients per fit")),
        })
        .collect()
}

pub fn write_replicates(path: &Path, format: OutputFormat, results: &[ReplicateResult]) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(path, FileKind::Replicates, replicate_records(results, path)?),
        OutputFormat::Json => write_json(
            path,
            &Tagged { schema: FileKind::Replicates.tag(), body: ResultsBody { results: results.to_vec() } },
        ),
    }
}

pub fn read_replicates(path: &Path, format: OutputFormat) -> Result<Vec<ReplicateResult>> {
    match format {
        OutputFormat::Csv => {
            let records: Vec<(u64, ReplicateRecord)> = read_csv(path, FileKind::Replicates)?;
            Ok(records
                .into_iter()
                .map(|(_, r)| ReplicateResult {
                    scenario: r.scenario,
                    n: r.n,
                    model: r.model,
                    replicate: r.replicate,
                    beta_hat: vec![r.beta0, r.beta1],
                    pi_hat: r.pi_hat,
                    accept_rate: r.accept_rate,
                    sens: r.sens,
                    spec: r.spec,
                })
                .collect())
        }
        OutputFormat::Json => Ok(read_json::<Tagged<ResultsBody>>(path, FileKind::Replicates)?.body.results),
    }
}

/// Files written by [`write_archive`], relative to the archive directory.
pub fn archive_files(format: OutputFormat) -> Vec<String> {
    let mut files = vec![
        MANIFEST_FILE.to_string(),
        format.replicates_file().to_string(),
        SUMMARY_FILE.to_string(),
        TABLES_FILE.to_string(),
    ];
    files.extend(report::PLOT_FILES.iter().map(|f| format!("plots/{f}")));
    files
}

pub fn write_archive(dir: &Path, archive: &Archive) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let format = archive.manifest.format;
    write_json(&dir.join(MANIFEST_FILE), &archive.manifest)?;
    write_replicates(&dir.join(format.replicates_file()), format, &archive.results)?;
    write_json(
        &dir.join(SUMMARY_FILE),
        &Tagged { schema: FileKind::Summary.tag(), body: SummaryBody { summary: archive.summary.clone() } },
    )?;
    let tables = report::render(archive);
    let tables_path = dir.join(TABLES_FILE);
    fs::write(&tables_path, tables).map_err(|e| CliError::io(tables_path, e))?;
    report::write_plot_series(&dir.join("plots"), &report::plot_series(archive))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    read_json(path, FileKind::Manifest)
}

pub fn read_archive(dir: &Path) -> Result<Archive> {
    let manifest = read_manifest(&dir.join(MANIFEST_FILE))?;
    let results = read_replicates(&dir.join(manifest.format.replicates_file()), manifest.format)?;
    let summary = read_json::<Tagged<SummaryBody>>(&dir.join(SUMMARY_FILE), FileKind::Summary)?.body.summary;
    Ok(Archive { manifest, results, summary })
}

pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join(MANIFEST_FILE)
}
