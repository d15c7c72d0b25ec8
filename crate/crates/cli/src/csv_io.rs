//! CSV datasets: populations, samples and the truth file that holds the
//! sample labels.
//!
//! Files are UTF-8 with LF line endings and a header row, preceded by the
//! schema line. Floats are written in shortest round-trip form, so reading
//! a file back reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use po_core::datagen::{CaseControlSample, Population, SampleRow};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::schema::{csv_header_line, strip_csv_header, FileKind};

#[derive(Debug, Serialize, Deserialize)]
struct PopulationRecord {
    unit_id: usize,
    x1: f64,
    x2: f64,
    y: u8,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRecord {
    unit_id: usize,
    x1: f64,
    z: u8,
}

#[derive(Debug, Serialize, Deserialize)]
struct TruthRecord {
    unit_id: usize,
    y: u8,
}

/// Serializes `records` under the schema line of `kind`.
pub fn write_csv<T, I>(path: &Path, kind: FileKind, records: I) -> Result<()>
where
    T: Serialize,
    I: IntoIterator<Item = T>,
{
    let mut buf = csv_header_line(kind).into_bytes();
    {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        for record in records {
            writer
                .serialize(record)
                .map_err(|e| CliError::data(path, None, e.to_string()))?;
        }
        writer.flush().map_err(|e| CliError::io(path, e))?;
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// Reads every record with its 1-based line number in the file.
pub fn read_csv<T: DeserializeOwned>(path: &Path, kind: FileKind) -> Result<Vec<(u64, T)>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let body = strip_csv_header(&text, kind, path)?;
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(path, Some(2), e.to_string()))?
        .clone();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() + 1);
            CliError::data(path, line, e.to_string())
        })?;
        // One extra line for the schema header.
        let line = record.position().map_or(0, |p| p.line() + 1);
        let value = record
            .deserialize(Some(&headers))
            .map_err(|e| CliError::data(path, Some(line), e.to_string()))?;
        out.push((line, value));
    }
    Ok(out)
}

fn flag(path: &Path, line: u64, name: &str, value: u8) -> Result<bool> {
    match value {
        0 => Ok(false),
        1 => Ok(true),
        v => Err(CliError::data(path, Some(line), format!("{name} must be 0 or 1, got {v}"))),
    }
}

pub fn write_population(path: &Path, pop: &Population) -> Result<()> {
    let records = (0..pop.len()).map(|i| PopulationRecord {
        unit_id: i,
        x1: pop.x1[i],
        x2: pop.x2[i],
        y: u8::from(pop.y[i]),
    });
    write_csv(path, FileKind::Population, records)
}

pub fn read_population(path: &Path) -> Result<Population> {
    let records: Vec<(u64, PopulationRecord)> = read_csv(path, FileKind::Population)?;
    let mut pop = Population { x1: Vec::new(), x2: Vec::new(), y: Vec::new(), pi_true: 0.0 };
    for (expected, (line, r)) in records.into_iter().enumerate() {
        if r.unit_id != expected {
            return Err(CliError::data(
                path,
                Some(line),
                format!("unit_id {} out of order (expected {expected})", r.unit_id),
            ));
        }
        pop.x1.push(r.x1);
        pop.x2.push(r.x2);
        pop.y.push(flag(path, line, "y", r.y)?);
    }
    if pop.is_empty() {
        return Err(CliError::data(path, None, "population is empty"));
    }
    pop.pi_true = pop.n_presences() as f64 / pop.len() as f64;
    Ok(pop)
}

/// Writes the estimator-facing rows only; labels go to [`write_truth`].
pub fn write_sample(path: &Path, sample: &CaseControlSample) -> Result<()> {
    let records = sample.rows().iter().map(|r| SampleRecord {
        unit_id: r.unit_id,
        x1: r.x1,
        z: u8::from(r.z),
    });
    write_csv(path, FileKind::Sample, records)
}

pub fn read_sample(path: &Path) -> Result<Vec<SampleRow>> {
    let records: Vec<(u64, SampleRecord)> = read_csv(path, FileKind::Sample)?;
    let rows = records
        .into_iter()
        .map(|(line, r)| {
            if !r.x1.is_finite() {
                return Err(CliError::data(path, Some(line), "x1 must be finite"));
            }
            Ok(SampleRow { unit_id: r.unit_id, x1: r.x1, z: flag(path, line, "z", r.z)? })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(CliError::data(path, None, "sample is empty"));
    }
    Ok(rows)
}

/// One line per distinct unit of the sample, by increasing `unit_id`.
pub fn write_truth(path: &Path, sample: &CaseControlSample) -> Result<()> {
    let labels: BTreeMap<usize, bool> = sample
        .rows()
        .iter()
        .zip(sample.truth().labels())
        .map(|(r, &y)| (r.unit_id, y))
        .collect();
    let records = labels.into_iter().map(|(unit_id, y)| TruthRecord { unit_id, y: u8::from(y) });
    write_csv(path, FileKind::Truth, records)
}

pub fn read_truth(path: &Path) -> Result<BTreeMap<usize, bool>> {
    let records: Vec<(u64, TruthRecord)> = read_csv(path, FileKind::Truth)?;
    let mut labels = BTreeMap::new();
    for (line, r) in records {
        let y = flag(path, line, "y", r.y)?;
        if labels.insert(r.unit_id, y).is_some_and(|old| old != y) {
            return Err(CliError::data(path, Some(line), format!("conflicting labels for unit {}", r.unit_id)));
        }
    }
    Ok(labels)
}

/// Rejoins sample rows with their labels.
pub fn assemble_sample(
    rows: Vec<SampleRow>,
    truth: &BTreeMap<usize, bool>,
    truth_path: &Path,
) -> Result<CaseControlSample> {
    let labels = rows
        .iter()
        .map(|r| {
            truth.get(&r.unit_id).copied().ok_or_else(|| {
                CliError::data(truth_path, None, format!("no label for sample unit {}", r.unit_id))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CaseControlSample::from_parts(rows, labels).map_err(|e| CliError::data(truth_path, None, e.to_string()))
}
