//! Text tables and plot-ready series built from an archive.

use std::fmt::Write as _;
use std::path::Path;

use po_core::datagen::Scenario;
use po_core::experiments::{CellSummary, GridSummary};
use po_core::sampler::ModelVariant;
use po_core::stats::Quartiles;
use serde::{Deserialize, Serialize};

use crate::archive::Archive;
use crate::csv_io::write_csv;
use crate::error::Result;
use crate::schema::FileKind;

pub const PLOT_FILES: [&str; 3] = ["rmse_vs_n.csv", "relative_vs_n.csv", "pi_vs_beta0.csv"];

const PARAMETERS: [&str; 3] = ["beta0", "beta1", "pi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsePoint {
    pub scenario: Scenario,
    pub parameter: String,
    pub model: ModelVariant,
    pub n: usize,
    pub rmse: f64,
}

/// M2 over M1 ratio of mean sensitivity or specificity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativePoint {
    pub scenario: Scenario,
    pub measure: String,
    pub n: usize,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub scenario: Scenario,
    pub n: usize,
    pub model: ModelVariant,
    pub replicate: usize,
    pub beta0: f64,
    pub pi_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotSeries {
    pub rmse: Vec<RmsePoint>,
    pub relative: Vec<RelativePoint>,
    pub scatter: Vec<ScatterPoint>,
}

pub fn plot_series(archive: &Archive) -> PlotSeries {
    let summary = &archive.summary;
    let mut cells: Vec<&CellSummary> = summary.cells.iter().collect();
    cells.sort_by_key(|c| (c.scenario, c.model, c.n));
    let mut rmse = Vec::new();
    for (j, parameter) in PARAMETERS.iter().enumerate() {
        for c in &cells {
            if let Some(&value) = c.rmse.get(j) {
                rmse.push(RmsePoint {
                    scenario: c.scenario,
                    parameter: parameter.to_string(),
                    model: c.model,
                    n: c.n,
                    rmse: value,
                });
            }
        }
    }
    let mut relative = Vec::new();
    for measure in ["sensitivity", "specificity"] {
        for r in &summary.relative {
            relative.push(RelativePoint {
                scenario: r.scenario,
                measure: measure.to_string(),
                n: r.n,
                ratio: if measure == "sensitivity" { r.rel_sens } else { r.rel_spec },
            });
        }
    }
    let scatter = archive
        .results
        .iter()
        .map(|r| ScatterPoint {
            scenario: r.scenario,
            n: r.n,
            model: r.model,
            replicate: r.replicate,
            beta0: r.beta_hat[0],
            pi_hat: r.pi_hat,
        })
        .collect();
    PlotSeries { rmse, relative, scatter }
}

pub fn write_plot_series(dir: &Path, series: &PlotSeries) -> Result<()> {
    write_csv(&dir.join(PLOT_FILES[0]), FileKind::Plot, &series.rmse)?;
    write_csv(&dir.join(PLOT_FILES[1]), FileKind::Plot, &series.relative)?;
    write_csv(&dir.join(PLOT_FILES[2]), FileKind::Plot, &series.scatter)
}

/// Cases where an RMSE grows with the sample size.
pub fn rmse_flags(summary: &GridSummary) -> Vec<String> {
    let mut cells: Vec<&CellSummary> = summary.cells.iter().collect();
    cells.sort_by_key(|c| (c.scenario, c.model, c.n));
    let mut flags = Vec::new();
    for pair in cells.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if (a.scenario, a.model) != (b.scenario, b.model) {
            continue;
        }
        for (j, parameter) in PARAMETERS.iter().enumerate() {
            if let (Some(x), Some(y)) = (a.rmse.get(j), b.rmse.get(j)) {
                if y > x {
                    flags.push(format!(
                        "rmse of {parameter} for {} in scenario ({}) rises from {x:.4} at n={} to {y:.4} at n={}",
                        a.model, a.scenario, a.n, b.n
                    ));
                }
            }
        }
    }
    flags
}

fn fmt_q(q: &Quartiles) -> String {
    format!("{:.3} ({:.3};{:.3})", q.median, q.q1, q.q3)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.3}"))
}

/// Left-aligned first column, right-aligned others.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string()
    };
    let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let mut out = line(&head);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn render(archive: &Archive) -> String {
    let summary = &archive.summary;
    let mut out = String::new();
    let mut cells: Vec<&CellSummary> = summary.cells.iter().collect();
    cells.sort_by_key(|c| (c.scenario, c.n, c.model));

    let pops: Vec<Vec<String>> = archive
        .manifest
        .populations
        .iter()
        .map(|p| {
            vec![
                format!("({})", p.scenario),
                format!("{:?}", p.scenario.beta_true()),
                format!("{:.4}", p.pi_true),
                p.seed.to_string(),
            ]
        })
        .collect();
    out.push_str("Populations\n");
    out.push_str(&table(&["scenario", "beta", "pi", "seed"], &pops));

    let estimates: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                format!("({})", c.scenario),
                c.n.to_string(),
                c.model.to_string(),
                c.beta.first().map_or("NA".into(), fmt_q),
                c.beta.get(1).map_or("NA".into(), fmt_q),
                fmt_q(&c.pi),
                c.replicates.to_string(),
            ]
        })
        .collect();
    out.push_str("\nEstimates: median (Q1;Q3) over replicates\n");
    out.push_str(&table(&["scenario", "n", "model", "beta0", "beta1", "pi", "reps"], &estimates));

    let correlations: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            vec![
                format!("({})", c.scenario),
                c.n.to_string(),
                c.model.to_string(),
                fmt_opt(c.correlations.beta0_beta1),
                fmt_opt(c.correlations.beta0_pi),
                fmt_opt(c.correlations.beta1_pi),
            ]
        })
        .collect();
    out.push_str("\nCorrelations of estimates across replicates\n");
    out.push_str(&table(&["scenario", "n", "model", "b0,b1", "b0,pi", "b1,pi"], &correlations));

    let rmse: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let mut row = vec![format!("({})", c.scenario), c.n.to_string(), c.model.to_string()];
            row.extend((0..3).map(|j| fmt_opt(c.rmse.get(j).copied())));
            row.push(format!("{:.3}", c.mean_accept));
            row
        })
        .collect();
    out.push_str("\nRoot mean squared error\n");
    out.push_str(&table(&["scenario", "n", "model", "beta0", "beta1", "pi", "accept"], &rmse));

    if !summary.relative.is_empty() {
        let rel: Vec<Vec<String>> = summary
            .relative
            .iter()
            .map(|r| vec![format!("({})", r.scenario), r.n.to_string(), fmt_opt(r.rel_sens), fmt_opt(r.rel_spec)])
            .collect();
        out.push_str("\nRelative sensitivity and specificity (M2 / M1)\n");
        out.push_str(&table(&["scenario", "n", "sens", "spec"], &rel));
    }

    let flags = rmse_flags(summary);
    let excluded_scores: usize = summary.cells.iter().map(|c| c.sens_excluded + c.spec_excluded).sum();
    let failures = &archive.manifest.failures;
    if !flags.is_empty() || summary.correlations_excluded > 0 || excluded_scores > 0 || !failures.is_empty() {
        out.push_str("\nDiagnostics\n");
        for f in &flags {
            let _ = writeln!(out, "  {f}");
        }
        if summary.correlations_excluded > 0 {
            let _ = writeln!(out, "  {} correlations undefined and left out", summary.correlations_excluded);
        }
        if excluded_scores > 0 {
            let _ = writeln!(out, "  {excluded_scores} undefined sensitivity/specificity values left out of means");
        }
        for f in failures {
            let _ = writeln!(out, "  fit failed: ({}) n={} {} replicate {}: {}", f.scenario, f.n, f.model, f.replicate, f.message);
        }
    }
    out
}
