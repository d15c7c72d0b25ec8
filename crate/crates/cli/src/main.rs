use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use po_cli::archive::{read_manifest, OutputFormat};
use po_cli::commands::{self, FitArgs, GenerateArgs, SimulateArgs};
use po_cli::{CliError, Result};
use po_core::datagen::{Scenario, POPULATION_SIZE};
use po_core::experiments::{ExperimentGrid, EVAL_SET_SIZE, STUDY_REPLICATES, STUDY_SIZES};
use po_core::sampler::{ModelVariant, SamplerConfig};

#[derive(Parser)]
#[command(name = "po", version, about = "Bayesian logistic regression for presence-only data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic population, a 1:4 presence/background sample and its labels.
    Generate(GenerateCmd),
    /// Fit one model to a sample file.
    Fit(FitCmd),
    /// Run a replication grid and write a result archive.
    Simulate(SimulateCmd),
    /// Print the tables of an archive and rewrite its plot series.
    Report(ReportCmd),
}

#[derive(Args)]
struct OutDir {
    /// Output directory.
    #[arg(long, env = "PO_OUT_DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 10_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 5_000)]
    keep: usize,
}

#[derive(Args)]
struct GenerateCmd {
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    /// Total sample size (a multiple of 5).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = POPULATION_SIZE)]
    population_size: usize,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct FitCmd {
    /// Sample CSV (`unit_id,x1,z`).
    #[arg(long)]
    sample: PathBuf,
    /// Labels CSV (`unit_id,y`); read only by m0.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: ModelVariant,
    /// Known population prevalence (m1 only).
    #[arg(long)]
    pi: Option<f64>,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write every retained draw.
    #[arg(long)]
    draws: bool,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct SimulateCmd {
    /// Scenarios to run, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_scenario)]
    scenario: Vec<Scenario>,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = STUDY_REPLICATES)]
    replicates: usize,
    /// Models to fit, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    model: Vec<ModelVariant>,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Rerun the configuration recorded in an archive manifest; grid and
    /// chain flags are ignored.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
    #[arg(long, default_value_t = POPULATION_SIZE)]
    population_size: usize,
    #[arg(long, default_value_t = EVAL_SET_SIZE)]
    eval_size: usize,
    #[arg(long)]
    quiet: bool,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct ReportCmd {
    /// Archive directory written by `simulate`.
    archive: PathBuf,
    /// Where to write plot series (default: `<archive>/plots`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: po_core::Error| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<ModelVariant, String> {
    s.parse().map_err(|e: po_core::Error| e.to_string())
}

/// Creation time for the manifest; `SOURCE_DATE_EPOCH` pins it for
/// reproducible archives.
fn creation_time() -> Result<String> {
    use time::format_description::well_known::Rfc3339;
    let now = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => {
            let secs: i64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("SOURCE_DATE_EPOCH is not an integer: {v}")))?;
            time::OffsetDateTime::from_unix_timestamp(secs)
                .map_err(|e| CliError::Usage(format!("SOURCE_DATE_EPOCH out of range: {e}")))?
        }
        Err(_) => time::OffsetDateTime::now_utc(),
    };
    now.format(&Rfc3339).map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(cmd) => {
            let out = commands::generate(&GenerateArgs {
                scenario: cmd.scenario,
                n: cmd.n,
                seed: cmd.seed,
                population_size: cmd.population_size,
                out: cmd.out.out,
            })?;
            println!(
                "population prevalence {:.4}; sample n_p={} n_u={}\nwrote {}, {}, {}",
                out.pi_true,
                out.n_p,
                out.n_u,
                out.population.display(),
                out.sample.display(),
                out.truth.display()
            );
        }
        Command::Fit(cmd) => {
            let out = cmd.out.out;
            let report = commands::fit(&FitArgs {
                sample: cmd.sample,
                truth: cmd.truth,
                model: cmd.model,
                pi: cmd.pi,
                burn_in: cmd.chain.burn_in,
                keep: cmd.chain.keep,
                seed: cmd.seed,
                out: out.clone(),
                draws: cmd.draws,
            })?;
            let s = &report.summary;
            println!("{} on n_p={} n_u={}, {} draws", s.variant, report.n_p, report.n_u, s.draws);
            for (j, (m, sd)) in s.beta_mean.iter().zip(&s.beta_sd).enumerate() {
                println!("  beta{j}  {m:.4}  (sd {sd:.4})");
            }
            println!("  pi_hat {:.4}\n  acceptance {:.3}", s.pi_hat, s.acceptance_rate);
            println!("wrote {}", out.join(commands::FIT_FILE).display());
        }
        Command::Simulate(cmd) => {
            let (grid, sampler, format) = match &cmd.from_manifest {
                Some(path) => commands::args_from_manifest(&read_manifest(path)?),
                None => {
                    let grid = ExperimentGrid {
                        scenarios: if cmd.scenario.is_empty() { Scenario::ALL.to_vec() } else { cmd.scenario },
                        sizes: if cmd.n.is_empty() { STUDY_SIZES.to_vec() } else { cmd.n },
                        replicates: cmd.replicates,
                        models: if cmd.model.is_empty() { ModelVariant::ALL.to_vec() } else { cmd.model },
                        master_seed: cmd.seed,
                        population_size: cmd.population_size,
                        eval_size: cmd.eval_size,
                    };
                    let sampler = SamplerConfig {
                        burn_in: cmd.chain.burn_in,
                        keep: cmd.chain.keep,
                        ..SamplerConfig::default()
                    };
                    (grid, sampler, cmd.format)
                }
            };
            let fits = grid.fits();
            eprintln!("running {fits} fits");
            let archive = commands::simulate(&SimulateArgs {
                grid,
                sampler,
                jobs: cmd.jobs,
                out: cmd.out.out.clone(),
                format,
                created: creation_time()?,
                progress_every: if cmd.quiet { 0 } else { (fits / 20).max(1) },
            })?;
            print!("{}", po_cli::report::render(&archive));
            println!("\narchive written to {}", cmd.out.out.display());
        }
        Command::Report(cmd) => {
            print!("{}", commands::report(&cmd.archive, cmd.out.as_deref())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
