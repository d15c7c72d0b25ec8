//! The four subcommands as library calls. The binary only parses flags and
//! maps errors to exit codes.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use po_core::datagen::{generate_population, sample_design, CaseControlSample, Scenario, ScenarioSpec};
use po_core::experiments::{run_grid_with_progress, summarize_run, ExperimentGrid};
use po_core::model::ObservedSample;
use po_core::sampler::{run_chain, summarize, EstimatorSpec, ModelVariant, PosteriorSummary, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::archive::{self, archive_files, Archive, Manifest, OutputFormat};
use crate::csv_io::{self, assemble_sample, read_sample, read_truth};
use crate::error::{CliError, Result};
use crate::report;
use crate::schema::FileKind;

pub const POPULATION_FILE: &str = "population.csv";
pub const SAMPLE_FILE: &str = "sample.csv";
pub const TRUTH_FILE: &str = "truth.csv";
pub const FIT_FILE: &str = "fit.json";
pub const DRAWS_FILE: &str = "draws.csv";

#[derive(Debug, Clone)]
pub struct GenerateArgs {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    pub population_size: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub population: PathBuf,
    pub sample: PathBuf,
    pub truth: PathBuf,
    pub pi_true: f64,
    pub n_p: usize,
    pub n_u: usize,
}

/// Writes the population, the designed sample and its labels. The seeds
/// match replicate 0 of a simulation run with the same master seed.
pub fn generate(args: &GenerateArgs) -> Result<Generated> {
    let grid = ExperimentGrid::full(args.seed);
    let spec = ScenarioSpec {
        population_size: args.population_size,
        ..ScenarioSpec::new(args.scenario, grid.population_seed(args.scenario))
    };
    let pop = generate_population(&spec)?;
    let sample = sample_design(&pop, args.n, grid.sample_seed(args.scenario, args.n, 0))?;
    let out = Generated {
        population: args.out.join(POPULATION_FILE),
        sample: args.out.join(SAMPLE_FILE),
        truth: args.out.join(TRUTH_FILE),
        pi_true: pop.pi_true,
        n_p: sample.n_p(),
        n_u: sample.n_u(),
    };
    csv_io::write_population(&out.population, &pop)?;
    csv_io::write_sample(&out.sample, &sample)?;
    csv_io::write_truth(&out.truth, &sample)?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FitArgs {
    pub sample: PathBuf,
    /// Labels file; only the complete-data model may read it.
    pub truth: Option<PathBuf>,
    pub model: ModelVariant,
    pub pi: Option<f64>,
    pub burn_in: usize,
    pub keep: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub draws: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub tool_version: String,
    pub config: SamplerConfig,
    pub n_p: usize,
    pub n_u: usize,
    pub summary: PosteriorSummary,
    pub proposal_scale: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct DrawRecord {
    iteration: usize,
    beta0: f64,
    beta1: f64,
    n_1u: usize,
}

fn estimator(model: ModelVariant, pi: Option<f64>) -> Result<EstimatorSpec> {
    match (model, pi) {
        (ModelVariant::M1, None) => Err(CliError::Usage("model m1 needs --pi <prevalence>".into())),
        (ModelVariant::M1, Some(p)) => EstimatorSpec::m1(p)
            .map_err(|_| CliError::Usage(format!("--pi must lie in (0, 1), got {p}"))),
        (_, Some(_)) => Err(CliError::Usage(format!("--pi only applies to m1, not {model}"))),
        (ModelVariant::M0, None) => Ok(EstimatorSpec::m0()),
        (ModelVariant::M2, None) => Ok(EstimatorSpec::m2()),
    }
}

fn observed_view(sample: &CaseControlSample, model: ModelVariant) -> Result<ObservedSample> {
    Ok(match model {
        ModelVariant::M0 => sample.observed_complete()?,
        _ => sample.observed()?,
    })
}

/// Fits one model to a sample file and writes `fit.json` (plus the draws
/// when requested).
pub fn fit(args: &FitArgs) -> Result<FitReport> {
    let spec = estimator(args.model, args.pi)?;
    let rows = read_sample(&args.sample)?;
    let sample = match (args.model, &args.truth) {
        (ModelVariant::M0, Some(truth)) => assemble_sample(rows, &read_truth(truth)?, truth)?,
        (ModelVariant::M0, None) => {
            return Err(CliError::Usage("model m0 needs --truth <file> with the sample labels".into()))
        }
        (_, Some(_)) => {
            return Err(CliError::Usage(format!(
                "--truth is only read by m0; {} must not see the sample labels",
                args.model
            )))
        }
        (_, None) => {
            // Presence rows are labelled 1 by design; background labels stay unknown.
            let labels = rows.iter().map(|r| r.z).collect();
            CaseControlSample::from_parts(rows, labels)?
        }
    };
    let observed = observed_view(&sample, args.model)?;
    let config = SamplerConfig {
        burn_in: args.burn_in,
        keep: args.keep,
        seed: args.seed,
        model: spec,
        ..SamplerConfig::default()
    };
    let output = run_chain(&observed, &config)?;
    let report = FitReport {
        schema: FileKind::Fit.tag(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        n_p: observed.n_p(),
        n_u: observed.n_u(),
        summary: summarize(&output),
        proposal_scale: output.proposal_scale.clone(),
    };
    archive::write_json(&args.out.join(FIT_FILE), &report)?;
    if args.draws {
        let records = output
            .beta_draws
            .iter()
            .zip(&output.n_1u_trace)
            .enumerate()
            .map(|(i, (b, &n_1u))| DrawRecord { iteration: i, beta0: b[0], beta1: b[1], n_1u });
        csv_io::write_csv(&args.out.join(DRAWS_FILE), FileKind::Draws, records)?;
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub grid: ExperimentGrid,
    pub sampler: SamplerConfig,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub format: OutputFormat,
    /// RFC 3339 creation time recorded in the manifest.
    pub created: String,
    /// Print a progress line to stderr every this many fits (0 = quiet).
    pub progress_every: usize,
}

/// Simulation settings recorded in a manifest.
pub fn args_from_manifest(manifest: &Manifest) -> (ExperimentGrid, SamplerConfig, OutputFormat) {
    (manifest.grid.clone(), manifest.sampler.clone(), manifest.format)
}

/// Runs the grid and writes the archive. Failed fits are recorded in the
/// manifest and reported as [`CliError::PartialFailure`] after the archive
/// is complete.
pub fn simulate(args: &SimulateArgs) -> Result<Archive> {
    let fits = args.grid.fits();
    let done = AtomicUsize::new(0);
    let every = args.progress_every;
    let run = run_grid_with_progress(&args.grid, &args.sampler, args.jobs, |_| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if every > 0 && (k.is_multiple_of(every) || k == fits) {
            eprintln!("  {k}/{fits} fits");
        }
    })?;
    let summary = summarize_run(&run)?;
    let manifest = Manifest {
        schema: FileKind::Manifest.tag(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        created: args.created.clone(),
        format: args.format,
        grid: args.grid.clone(),
        sampler: args.sampler.clone(),
        seed_derivation: archive::SEED_DERIVATION.to_string(),
        populations: run.populations,
        fits,
        failures: run.failures,
        files: archive_files(args.format),
    };
    let archive = Archive { manifest, results: run.results, summary };
    archive::write_archive(&args.out, &archive)?;
    if !archive.manifest.failures.is_empty() {
        return Err(CliError::PartialFailure {
            failures: archive.manifest.failures.len(),
            fits,
            archive: args.out.clone(),
        });
    }
    Ok(archive)
}

/// Renders the tables of an archive and rewrites its plot series into
/// `plots_dir` (the archive's own `plots/` when `None`).
pub fn report(archive_dir: &Path, plots_dir: Option<&Path>) -> Result<String> {
    let archive = archive::read_archive(archive_dir)?;
    let plots = plots_dir.map_or_else(|| archive_dir.join("plots"), Path::to_path_buf);
    report::write_plot_series(&plots, &report::plot_series(&archive))?;
    Ok(report::render(&archive))
}
