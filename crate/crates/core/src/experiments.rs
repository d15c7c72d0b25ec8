//! Replication harness: fits every requested estimator on many designed
//! samples and reduces the point estimates to per-cell summaries.
//!
//! A cell is one `(scenario, sample size, model)` combination. One
//! population is generated per scenario and shared by all replicates; each
//! replicate draws its own sample, held-out evaluation set and chain seeds
//! from the master seed, so results do not depend on execution order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{
    draw_eval_set, generate_population, sample_design, EvalSet, Population, Scenario,
    ScenarioSpec, POPULATION_SIZE,
};
use crate::error::{Error, Result};
use crate::model::inverse_logit;
use crate::sampler::{run_chain, summarize, EstimatorSpec, ModelVariant, SamplerConfig};
use crate::seed::derive_seed;
use crate::stats::{mean, pearson, Quartiles};

/// Sample sizes of the full study.
pub const STUDY_SIZES: [usize; 8] = [50, 100, 200, 500, 1000, 1500, 2000, 3000];

/// Replicates per cell in the full study.
pub const STUDY_REPLICATES: usize = 1000;

/// Held-out units scored for sensitivity and specificity.
pub const EVAL_SET_SIZE: usize = 2000;

/// Classification threshold on `σ(β0 + β1 x1)`.
pub const CLASSIFICATION_THRESHOLD: f64 = 0.5;

const TAG_POPULATION: u64 = 0x0070_6f70;
const TAG_SAMPLE: u64 = 0x73_616d;
const TAG_EVAL: u64 = 0x65_7661;
const TAG_CHAIN: u64 = 0x63_6861;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub scenarios: Vec<Scenario>,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub models: Vec<ModelVariant>,
    pub master_seed: u64,
    pub population_size: usize,
    pub eval_size: usize,
}

impl ExperimentGrid {
    /// All scenarios, sizes and models with 1000 replicates (24,000 datasets).
    pub fn full(master_seed: u64) -> Self {
        Self {
            scenarios: Scenario::ALL.to_vec(),
            sizes: STUDY_SIZES.to_vec(),
            replicates: STUDY_REPLICATES,
            models: ModelVariant::ALL.to_vec(),
            master_seed,
            population_size: POPULATION_SIZE,
            eval_size: EVAL_SET_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() || self.sizes.is_empty() || self.models.is_empty() {
            return Err(Error::InvalidConfig(
                "grid needs at least one scenario, size and model".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n == 0 || n % 5 != 0) {
            return Err(Error::InvalidConfig(format!(
                "sample size {n} is not a positive multiple of 5"
            )));
        }
        Ok(())
    }

    pub fn population_seed(&self, scenario: Scenario) -> u64 {
        derive_seed(&[self.master_seed, TAG_POPULATION, scenario.index()])
    }

    fn replicate_seed(&self, tag: u64, scenario: Scenario, n: usize, replicate: usize) -> u64 {
        derive_seed(&[self.master_seed, tag, scenario.index(), n as u64, replicate as u64])
    }

    pub fn sample_seed(&self, scenario: Scenario, n: usize, replicate: usize) -> u64 {
        self.replicate_seed(TAG_SAMPLE, scenario, n, replicate)
    }

    pub fn eval_seed(&self, scenario: Scenario, n: usize, replicate: usize) -> u64 {
        self.replicate_seed(TAG_EVAL, scenario, n, replicate)
    }

    pub fn chain_seed(&self, scenario: Scenario, n: usize, replicate: usize, model: ModelVariant) -> u64 {
        derive_seed(&[
            self.replicate_seed(TAG_CHAIN, scenario, n, replicate),
            model.index(),
        ])
    }

    /// Number of individual fits the grid requests.
    pub fn fits(&self) -> usize {
        self.scenarios.len() * self.sizes.len() * self.replicates * self.models.len()
    }
}

/// Point estimates and scores of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub scenario: Scenario,
    pub n: usize,
    pub model: ModelVariant,
    pub replicate: usize,
    /// Posterior means, intercept first.
    pub beta_hat: Vec<f64>,
    pub pi_hat: f64,
    pub accept_rate: f64,
    /// `None` when the evaluation set has no positives.
    pub sens: Option<f64>,
    /// `None` when the evaluation set has no negatives.
    pub spec: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub scenario: Scenario,
    pub n: usize,
    pub model: ModelVariant,
    pub replicate: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationInfo {
    pub scenario: Scenario,
    pub seed: u64,
    pub pi_true: f64,
    pub presences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRun {
    pub populations: Vec<PopulationInfo>,
    pub results: Vec<ReplicateResult>,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensSpec {
    pub sens: Option<f64>,
    pub spec: Option<f64>,
}

/// Classifies each evaluation unit by `σ(β0 + β1 x1) >= 0.5` and scores the
/// result against the true labels.
pub fn compute_sens_spec(beta: &[f64], eval: &EvalSet) -> SensSpec {
    let (mut tp, mut fn_, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for (&x, &y) in eval.x1.iter().zip(&eval.y) {
        let predicted = inverse_logit(beta[0] + beta[1] * x) >= CLASSIFICATION_THRESHOLD;
        match (y, predicted) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
        }
    }
    let ratio = |a: usize, b: usize| (a + b > 0).then(|| a as f64 / (a + b) as f64);
    SensSpec { sens: ratio(tp, fn_), spec: ratio(tn, fp) }
}

/// Fits one model on one replicate of one cell.
pub fn run_replicate(
    grid: &ExperimentGrid,
    population: &Population,
    scenario: Scenario,
    n: usize,
    replicate: usize,
    model: ModelVariant,
    config: &SamplerConfig,
) -> Result<ReplicateResult> {
    let sample = sample_design(population, n, grid.sample_seed(scenario, n, replicate))?;
    let (observed, spec) = match model {
        ModelVariant::M0 => (sample.observed_complete()?, EstimatorSpec::m0()),
        ModelVariant::M1 => (sample.observed()?, EstimatorSpec::m1(population.pi_true)?),
        ModelVariant::M2 => (sample.observed()?, EstimatorSpec::m2()),
    };
    let chain_config = SamplerConfig {
        seed: grid.chain_seed(scenario, n, replicate, model),
        model: spec,
        ..config.clone()
    };
    let output = run_chain(&observed, &chain_config)?;
    let summary = summarize(&output);
    let eval = draw_eval_set(population, &sample, grid.eval_size, grid.eval_seed(scenario, n, replicate));
    let scores = compute_sens_spec(&summary.beta_mean, &eval);
    Ok(ReplicateResult {
        scenario,
        n,
        model,
        replicate,
        beta_hat: summary.beta_mean,
        pi_hat: summary.pi_hat,
        accept_rate: summary.acceptance_rate,
        sens: scores.sens,
        spec: scores.spec,
    })
}

/// Generates the per-scenario populations of a grid.
pub fn grid_populations(grid: &ExperimentGrid) -> Result<Vec<(Scenario, Population, u64)>> {
    grid.scenarios
        .iter()
        .map(|&s| {
            let seed = grid.population_seed(s);
            let spec = ScenarioSpec {
                population_size: grid.population_size,
                ..ScenarioSpec::new(s, seed)
            };
            Ok((s, generate_population(&spec)?, seed))
        })
        .collect()
}

/// Runs every `(scenario, n, replicate, model)` fit of the grid on `jobs`
/// worker threads (all available cores when `None`). Failed fits are
/// recorded, not propagated; results come back in grid order.
pub fn run_grid(grid: &ExperimentGrid, config: &SamplerConfig, jobs: Option<usize>) -> Result<GridRun> {
    run_grid_with_progress(grid, config, jobs, |_| {})
}

/// [`run_grid`] with a callback invoked (from worker threads) after each fit.
pub fn run_grid_with_progress<F>(
    grid: &ExperimentGrid,
    config: &SamplerConfig,
    jobs: Option<usize>,
    on_fit: F,
) -> Result<GridRun>
where
    F: Fn(&std::result::Result<ReplicateResult, CellFailure>) + Sync,
{
    grid.validate()?;
    // The estimator of each fit is chosen by the grid, not the config.
    SamplerConfig { model: EstimatorSpec::m2(), ..config.clone() }.validate()?;
    let populations = grid_populations(grid)?;

    let mut tasks = Vec::with_capacity(grid.fits());
    for (pi, (scenario, _, _)) in populations.iter().enumerate() {
        for &n in &grid.sizes {
            for replicate in 0..grid.replicates {
                for &model in &grid.models {
                    tasks.push((pi, *scenario, n, replicate, model));
                }
            }
        }
    }

    let run = |&(pi, scenario, n, replicate, model): &(usize, Scenario, usize, usize, ModelVariant)| {
        let population = &populations[pi].1;
        let outcome = run_replicate(grid, population, scenario, n, replicate, model, config)
            .map_err(|e| CellFailure {
                scenario,
                n,
                model,
                replicate,
                message: e.to_string(),
            });
        on_fit(&outcome);
        outcome
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| tasks.par_iter().map(run).collect());

    let mut results = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(GridRun {
        populations: populations
            .iter()
            .map(|(s, p, seed)| PopulationInfo {
                scenario: *s,
                seed: *seed,
                pi_true: p.pi_true,
                presences: p.n_presences(),
            })
            .collect(),
        results,
        failures,
    })
}

/// Root mean squared error of `β̂_0, β̂_1, …` and then `π̂` against the truth.
pub fn compute_rmse(results: &[ReplicateResult], beta_true: &[f64], pi_true: f64) -> Result<Vec<f64>> {
    if results.is_empty() {
        return Err(Error::NotEnoughResults { needed: 1, found: 0 });
    }
    let k = results[0].beta_hat.len();
    if beta_true.len() < k {
        return Err(Error::DimensionMismatch { expected: k, found: beta_true.len() });
    }
    let m = results.len() as f64;
    let mut out: Vec<f64> = (0..k)
        .map(|j| {
            let sse: f64 = results.iter().map(|r| (r.beta_hat[j] - beta_true[j]).powi(2)).sum();
            (sse / m).sqrt()
        })
        .collect();
    let sse: f64 = results.iter().map(|r| (r.pi_hat - pi_true).powi(2)).sum();
    out.push((sse / m).sqrt());
    Ok(out)
}

/// Pairwise Pearson correlations of the point estimates across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub beta0_beta1: Option<f64>,
    pub beta0_pi: Option<f64>,
    pub beta1_pi: Option<f64>,
}

impl Correlations {
    pub fn undefined_count(&self) -> usize {
        [self.beta0_beta1, self.beta0_pi, self.beta1_pi]
            .iter()
            .filter(|c| c.is_none())
            .count()
    }
}

pub fn compute_correlations(results: &[ReplicateResult]) -> Result<Correlations> {
    if results.len() < 3 {
        return Err(Error::NotEnoughResults { needed: 3, found: results.len() });
    }
    let b0: Vec<f64> = results.iter().map(|r| r.beta_hat[0]).collect();
    let b1: Vec<f64> = results.iter().map(|r| r.beta_hat.get(1).copied().unwrap_or(f64::NAN)).collect();
    let pi: Vec<f64> = results.iter().map(|r| r.pi_hat).collect();
    Ok(Correlations {
        beta0_beta1: pearson(&b0, &b1).filter(|c| c.is_finite()),
        beta0_pi: pearson(&b0, &pi).filter(|c| c.is_finite()),
        beta1_pi: pearson(&b1, &pi).filter(|c| c.is_finite()),
    })
}

/// Summary of one `(scenario, n, model)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub scenario: Scenario,
    pub n: usize,
    pub model: ModelVariant,
    pub replicates: usize,
    /// Median and quartiles of each coefficient estimate.
    pub beta: Vec<Quartiles>,
    pub pi: Quartiles,
    /// RMSE of each coefficient, then of `π̂`.
    pub rmse: Vec<f64>,
    pub correlations: Correlations,
    pub mean_sens: Option<f64>,
    pub mean_spec: Option<f64>,
    pub sens_excluded: usize,
    pub spec_excluded: usize,
    pub mean_accept: f64,
}

/// Ratios of M2 to M1 mean sensitivity and specificity in one
/// `(scenario, n)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeMeasures {
    pub scenario: Scenario,
    pub n: usize,
    pub rel_sens: Option<f64>,
    pub rel_spec: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub cells: Vec<CellSummary>,
    pub relative: Vec<RelativeMeasures>,
    /// Correlations left undefined (zero variance or too few replicates).
    pub correlations_excluded: usize,
}

impl GridSummary {
    pub fn cell(&self, scenario: Scenario, n: usize, model: ModelVariant) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.n == n && c.model == model)
    }

    pub fn relative(&self, scenario: Scenario, n: usize) -> Option<&RelativeMeasures> {
        self.relative.iter().find(|r| r.scenario == scenario && r.n == n)
    }
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, usize) {
    let mut defined = Vec::new();
    let mut excluded = 0;
    for v in values {
        match v {
            Some(x) if x.is_finite() => defined.push(x),
            _ => excluded += 1,
        }
    }
    ((!defined.is_empty()).then(|| mean(&defined)), excluded)
}

/// Reduces replicate results to per-cell summaries. `pi_true` gives the
/// population prevalence of each scenario. Independent of result order.
pub fn summarize_grid(results: &[ReplicateResult], pi_true: &[(Scenario, f64)]) -> Result<GridSummary> {
    let mut keys: Vec<(Scenario, usize, ModelVariant)> =
        results.iter().map(|r| (r.scenario, r.n, r.model)).collect();
    keys.sort();
    keys.dedup();

    let mut cells = Vec::with_capacity(keys.len());
    let mut correlations_excluded = 0;
    for (scenario, n, model) in keys {
        let mut cell: Vec<ReplicateResult> = results
            .iter()
            .filter(|r| r.scenario == scenario && r.n == n && r.model == model)
            .cloned()
            .collect();
        cell.sort_by_key(|r| r.replicate);

        let truth_pi = pi_true
            .iter()
            .find(|(s, _)| *s == scenario)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::InvalidConfig(format!("no prevalence for scenario {scenario}")))?;
        let k = cell[0].beta_hat.len();
        let beta: Vec<Quartiles> = (0..k)
            .map(|j| Quartiles::of(&cell.iter().map(|r| r.beta_hat[j]).collect::<Vec<_>>()))
            .collect();
        let pi = Quartiles::of(&cell.iter().map(|r| r.pi_hat).collect::<Vec<_>>());
        let rmse = compute_rmse(&cell, &scenario.beta_true(), truth_pi)
            .map_err(|e| Error::Cell { cell: format!("{scenario}/{n}/{model}"), source: Box::new(e) })?;
        let correlations = compute_correlations(&cell).unwrap_or(Correlations {
            beta0_beta1: None,
            beta0_pi: None,
            beta1_pi: None,
        });
        correlations_excluded += correlations.undefined_count();
        let (mean_sens, sens_excluded) = mean_defined(cell.iter().map(|r| r.sens));
        let (mean_spec, spec_excluded) = mean_defined(cell.iter().map(|r| r.spec));
        let mean_accept = mean(&cell.iter().map(|r| r.accept_rate).collect::<Vec<_>>());
        cells.push(CellSummary {
            scenario,
            n,
            model,
            replicates: cell.len(),
            beta,
            pi,
            rmse,
            correlations,
            mean_sens,
            mean_spec,
            sens_excluded,
            spec_excluded,
            mean_accept,
        });
    }

    let mut relative = Vec::new();
    let mut pairs: Vec<(Scenario, usize)> = cells.iter().map(|c| (c.scenario, c.n)).collect();
    pairs.dedup();
    for (scenario, n) in pairs {
        let find = |m| cells.iter().find(|c| c.scenario == scenario && c.n == n && c.model == m);
        if let (Some(m1), Some(m2)) = (find(ModelVariant::M1), find(ModelVariant::M2)) {
            let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (Some(a), Some(b)) if b > 0.0 => Some(a / b),
                _ => None,
            };
            relative.push(RelativeMeasures {
                scenario,
                n,
                rel_sens: ratio(m2.mean_sens, m1.mean_sens),
                rel_spec: ratio(m2.mean_spec, m1.mean_spec),
            });
        }
    }

    Ok(GridSummary { cells, relative, correlations_excluded })
}

/// Convenience: summary of a finished grid run.
pub fn summarize_run(run: &GridRun) -> Result<GridSummary> {
    let pis: Vec<(Scenario, f64)> = run.populations.iter().map(|p| (p.scenario, p.pi_true)).collect();
    summarize_grid(&run.results, &pis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(rep: usize, b0: f64, b1: f64, pi: f64) -> ReplicateResult {
        ReplicateResult {
            scenario: Scenario::I,
            n: 50,
            model: ModelVariant::M2,
            replicate: rep,
            beta_hat: vec![b0, b1],
            pi_hat: pi,
            accept_rate: 0.3,
            sens: Some(0.8),
            spec: Some(0.9),
        }
    }

    #[test]
    fn rmse_examples() {
        let exact = vec![result(0, 0.0, 1.0, 0.2), result(1, 0.0, 1.0, 0.2)];
        assert_eq!(compute_rmse(&exact, &[0.0, 1.0], 0.2).unwrap(), vec![0.0, 0.0, 0.0]);
        let d = 0.3;
        let sym = vec![result(0, d, 1.0 - d, 0.2 + d), result(1, -d, 1.0 + d, 0.2 - d)];
        let rmse = compute_rmse(&sym, &[0.0, 1.0], 0.2).unwrap();
        for v in rmse {
            assert!((v - d).abs() < 1e-15);
        }
        assert!(matches!(compute_rmse(&[], &[0.0], 0.2), Err(Error::NotEnoughResults { .. })));
    }

    #[test]
    fn rmse_matches_recomputation() {
        let rs: Vec<_> = (0..7)
            .map(|i| result(i, 0.1 * i as f64, 1.0 - 0.05 * i as f64, 0.2 + 0.01 * i as f64))
            .collect();
        let rmse = compute_rmse(&rs, &[0.0, 1.0, 0.0], 0.21).unwrap();
        let mut acc = [0.0; 3];
        for r in &rs {
            acc[0] += r.beta_hat[0] * r.beta_hat[0];
            acc[1] += (r.beta_hat[1] - 1.0) * (r.beta_hat[1] - 1.0);
            acc[2] += (r.pi_hat - 0.21) * (r.pi_hat - 0.21);
        }
        for j in 0..3 {
            assert!((rmse[j] - (acc[j] / 7.0).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn correlation_examples() {
        let rs: Vec<_> = (0..5).map(|i| result(i, i as f64, 2.0 * i as f64, 0.1 * i as f64)).collect();
        let c = compute_correlations(&rs).unwrap();
        for v in [c.beta0_beta1, c.beta0_pi, c.beta1_pi] {
            assert!((v.unwrap() - 1.0).abs() < 1e-12);
        }
        let flat: Vec<_> = (0..5).map(|i| result(i, i as f64, 1.0, 0.2)).collect();
        let c = compute_correlations(&flat).unwrap();
        assert_eq!(c.beta0_beta1, None);
        assert_eq!(c.undefined_count(), 3);
        assert!(compute_correlations(&rs[..2]).is_err());
    }

    #[test]
    fn correlation_matches_two_pass_covariance() {
        let rs: Vec<_> = [(0.3, 0.9, 0.21), (1.2, 1.1, 0.25), (-0.4, 0.7, 0.18), (0.8, 1.3, 0.2), (0.1, 0.95, 0.24)]
            .iter()
            .enumerate()
            .map(|(i, &(a, b, p))| result(i, a, b, p))
            .collect();
        let xs: Vec<f64> = rs.iter().map(|r| r.beta_hat[0]).collect();
        let ys: Vec<f64> = rs.iter().map(|r| r.pi_hat).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0);
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / (n - 1.0);
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / (n - 1.0);
        let expected = cov / (vx * vy).sqrt();
        let c = compute_correlations(&rs).unwrap();
        assert!((c.beta0_pi.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn sens_spec_examples() {
        let eval = EvalSet { x1: vec![-3.0, -2.0, 2.0, 3.0], y: vec![false, false, true, true] };
        let s = compute_sens_spec(&[0.0, 5.0], &eval);
        assert_eq!((s.sens, s.spec), (Some(1.0), Some(1.0)));
        let s = compute_sens_spec(&[50.0, 0.0], &eval);
        assert_eq!((s.sens, s.spec), (Some(1.0), Some(0.0)));
        let positives = EvalSet { x1: vec![1.0, 2.0], y: vec![true, true] };
        assert_eq!(compute_sens_spec(&[0.0, 1.0], &positives).spec, None);
    }

    #[test]
    fn grid_validation() {
        let mut g = ExperimentGrid::full(1);
        assert!(g.validate().is_ok());
        assert_eq!(g.fits(), 3 * 8 * 1000 * 3);
        g.sizes = vec![52];
        assert!(g.validate().is_err());
        let g = ExperimentGrid { replicates: 0, ..ExperimentGrid::full(1) };
        assert!(g.validate().is_err());
        let g = ExperimentGrid { models: vec![], ..ExperimentGrid::full(1) };
        assert!(g.validate().is_err());
    }

    #[test]
    fn summary_is_order_insensitive_and_quartiles_ordered() {
        let mut rs: Vec<_> = (0..9)
            .map(|i| result(i, (i as f64 * 0.37).sin(), 1.0 + (i as f64).cos() * 0.1, 0.2 + 0.003 * i as f64))
            .collect();
        let pis = [(Scenario::I, 0.215)];
        let a = summarize_grid(&rs, &pis).unwrap();
        rs.reverse();
        rs.swap(2, 5);
        let b = summarize_grid(&rs, &pis).unwrap();
        assert_eq!(a, b);
        for c in &a.cells {
            for q in c.beta.iter().chain(std::iter::once(&c.pi)) {
                assert!(q.q1 <= q.median && q.median <= q.q3);
            }
        }
    }

    #[test]
    fn relative_measures_need_both_models() {
        let mut m1 = result(0, 0.0, 1.0, 0.2);
        m1.model = ModelVariant::M1;
        m1.sens = Some(0.8);
        let mut m2 = result(0, 0.0, 1.0, 0.2);
        m2.sens = Some(0.72);
        let s = summarize_grid(&[m1.clone(), m2], &[(Scenario::I, 0.2)]).unwrap();
        let rel = s.relative(Scenario::I, 50).unwrap();
        assert!((rel.rel_sens.unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(rel.rel_spec, Some(1.0));
        let s = summarize_grid(&[m1], &[(Scenario::I, 0.2)]).unwrap();
        assert!(s.relative.is_empty());
    }
}
