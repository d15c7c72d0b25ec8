//! Metropolis-within-Gibbs sampler with data augmentation of the
//! background labels.
//!
//! Each iteration runs three steps in a fixed order:
//!
//! 1. `n_1u` is set to the number of background rows currently labelled as
//!    presences (clamped to at least one when it feeds the offset);
//! 2. `β` is updated by a Gaussian random-walk Metropolis move on the
//!    log-posterior with the offset implied by `n_1u`;
//! 3. every background label is redrawn from `Bernoulli(σ(x_i β))`, the
//!    posterior predictive for an unobserved unit.
//!
//! The ergodic mean of `n_1u` over the retained iterations, divided by the
//! background size, estimates the population prevalence.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{
    complete_log_likelihood, log_likelihood_with_offset, Beta, ObservedSample,
    PriorSpec, SampleCounts, StratumOffset,
};
use crate::seed;
#[cfg(test)]
use crate::seed::StreamRng;

/// Prior variance used for every coefficient unless overridden.
pub const DEFAULT_PRIOR_VARIANCE: f64 = 25.0;

/// Acceptance rate targeted by burn-in adaptation.
pub const TARGET_ACCEPTANCE: f64 = 0.3;

/// Which estimator to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelVariant {
    /// Complete data: background labels observed, plain logistic likelihood.
    M0,
    /// Presence-only with a known prevalence fixing the offset.
    M1,
    /// Presence-only with the offset driven by the augmented labels.
    M2,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 3] = [ModelVariant::M0, ModelVariant::M1, ModelVariant::M2];

    pub fn index(self) -> u64 {
        match self {
            ModelVariant::M0 => 0,
            ModelVariant::M1 => 1,
            ModelVariant::M2 => 2,
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelVariant::M0 => "M0",
            ModelVariant::M1 => "M1",
            ModelVariant::M2 => "M2",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m0" => Ok(ModelVariant::M0),
            "m1" => Ok(ModelVariant::M1),
            "m2" => Ok(ModelVariant::M2),
            other => Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }
}

/// Estimator choice plus the prevalence that M1 needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub variant: ModelVariant,
    pub known_pi: Option<f64>,
}

impl EstimatorSpec {
    pub fn m0() -> Self {
        Self { variant: ModelVariant::M0, known_pi: None }
    }

    pub fn m1(pi: f64) -> Result<Self> {
        let spec = Self { variant: ModelVariant::M1, known_pi: Some(pi) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn m2() -> Self {
        Self { variant: ModelVariant::M2, known_pi: None }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.variant, self.known_pi) {
            (ModelVariant::M1, Some(pi)) if pi > 0.0 && pi < 1.0 => Ok(()),
            (ModelVariant::M1, Some(pi)) => Err(domain("known prevalence", "(0, 1)", pi)),
            (ModelVariant::M1, None) => {
                Err(Error::InvalidConfig("M1 requires a known prevalence".into()))
            }
            (_, None) => Ok(()),
            (v, Some(_)) => Err(Error::InvalidConfig(format!(
                "a known prevalence is only meaningful for M1, not {v}"
            ))),
        }
    }
}

/// Sampler settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub keep: usize,
    /// Retain every `thin`-th post-burn-in iteration.
    pub thin: usize,
    /// Random-walk standard deviation per coefficient; a single entry is
    /// broadcast to all coefficients.
    pub proposal_scale: Vec<f64>,
    pub adapt: bool,
    pub seed: u64,
    pub model: EstimatorSpec,
    /// Defaults to independent `N(0, 25)` on every coefficient.
    pub prior: Option<PriorSpecConfig>,
}

/// Serializable mirror of [`PriorSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpecConfig {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            keep: 5_000,
            thin: 1,
            proposal_scale: vec![0.1],
            adapt: true,
            seed: 0,
            model: EstimatorSpec::m2(),
            prior: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.keep == 0 {
            return Err(Error::InvalidConfig("keep must be at least 1".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if self.proposal_scale.is_empty()
            || self.proposal_scale.iter().any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(Error::InvalidConfig(
                "proposal scales must be finite and positive".into(),
            ));
        }
        self.model.validate()
    }

    pub fn prior_for(&self, n_coefficients: usize) -> Result<PriorSpec> {
        let prior = match &self.prior {
            Some(p) => PriorSpec::new(p.mean.clone(), p.variance.clone())?,
            None => PriorSpec::isotropic(n_coefficients, 0.0, DEFAULT_PRIOR_VARIANCE)?,
        };
        if prior.len() != n_coefficients {
            return Err(Error::DimensionMismatch {
                expected: n_coefficients,
                found: prior.len(),
            });
        }
        Ok(prior)
    }

    pub fn scales_for(&self, n_coefficients: usize) -> Result<Vec<f64>> {
        match self.proposal_scale.len() {
            1 => Ok(vec![self.proposal_scale[0]; n_coefficients]),
            n if n == n_coefficients => Ok(self.proposal_scale.clone()),
            n => Err(Error::DimensionMismatch { expected: n_coefficients, found: n }),
        }
    }
}

/// How the log-posterior of a state is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Offset recomputed from the augmented `n_1u` (M2).
    Augmented,
    /// Offset fixed by a known prevalence (M1).
    KnownPrevalence(StratumOffset),
    /// Logistic likelihood of the revealed background labels (M0).
    Complete,
}

impl Objective {
    pub fn for_spec(spec: &EstimatorSpec, sample: &ObservedSample) -> Result<Self> {
        spec.validate()?;
        match spec.variant {
            ModelVariant::M0 => {
                if sample.background_labels().is_none() {
                    return Err(Error::InvalidSample(
                        "M0 needs the background labels of the sample".into(),
                    ));
                }
                Ok(Objective::Complete)
            }
            ModelVariant::M1 => {
                let pi = spec.known_pi.expect("validated");
                Ok(Objective::KnownPrevalence(StratumOffset::known_prevalence(
                    pi,
                    sample.n_u(),
                    sample.n_p(),
                )?))
            }
            ModelVariant::M2 => Ok(Objective::Augmented),
        }
    }

    /// Log-posterior of `beta` when the background holds `n_1u` presences.
    pub fn log_posterior(
        &self,
        beta: &Beta,
        n_1u: usize,
        sample: &ObservedSample,
        prior: &PriorSpec,
    ) -> Result<f64> {
        let log_lik = match self {
            Objective::Augmented => {
                log_likelihood_with_offset(beta, sample, &augmented_offset(n_1u, sample)?)?
            }
            Objective::KnownPrevalence(offset) => log_likelihood_with_offset(beta, sample, offset)?,
            Objective::Complete => complete_log_likelihood(beta, sample)?,
        };
        Ok(log_lik + prior.log_density(beta)?)
    }

    fn offset_tracks_labels(&self) -> bool {
        matches!(self, Objective::Augmented)
    }
}

/// Per-row quantities at the current `β`, shared by the likelihood and the
/// augmentation step so `σ(x_i β)` is evaluated once per row and iteration.
#[derive(Debug, Clone, PartialEq)]
struct RowCache {
    /// `σ(x_i β)` for the presence rows (offset objectives only).
    sig_p: Vec<f64>,
    /// `σ(x_i β)` for the background rows, in order.
    sig_u: Vec<f64>,
    /// Label-independent part of the log-likelihood: `Σ_{z=1} log σ(x_i β)`
    /// for the offset objectives, the whole log-likelihood for M0.
    fixed: f64,
}

impl RowCache {
    fn evaluate(beta: &[f64], sample: &ObservedSample, objective: &Objective) -> Result<Self> {
        // log σ(±η) = min(±η, 0) - ln(1 + e^{-|η|})
        let eta_terms = |row: &[f64]| {
            let eta: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
            (eta, (-eta.abs()).exp())
        };
        if matches!(objective, Objective::Complete) {
            let labels = sample.background_labels().ok_or_else(|| {
                Error::InvalidSample("M0 needs the background labels of the sample".into())
            })?;
            let fixed = sample
                .background_rows()
                .zip(labels)
                .map(|(row, &y)| {
                    let (eta, e) = eta_terms(row);
                    let signed = if y { eta } else { -eta };
                    signed.min(0.0) - e.ln_1p()
                })
                .sum();
            return Ok(Self { sig_p: Vec::new(), sig_u: Vec::new(), fixed });
        }
        let mut sig_p = Vec::with_capacity(sample.n_p());
        let mut sig_u = Vec::with_capacity(sample.n_u());
        let mut fixed = 0.0;
        for (row, z) in sample.rows() {
            let (eta, e) = eta_terms(row);
            let sig = if eta >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
            if z {
                fixed += eta.min(0.0) - e.ln_1p();
                sig_p.push(sig);
            } else {
                sig_u.push(sig);
            }
        }
        Ok(Self { sig_p, sig_u, fixed })
    }

    fn log_likelihood(&self, objective: &Objective, n_1u: usize, sample: &ObservedSample) -> Result<f64> {
        let offset = match objective {
            Objective::Complete => return Ok(self.fixed),
            Objective::KnownPrevalence(offset) => *offset,
            Objective::Augmented => augmented_offset(n_1u, sample)?,
        };
        let r = offset.ratio();
        let tail: f64 = self.sig_p.iter().chain(&self.sig_u).map(|s| (r * s).ln_1p()).sum();
        let presence_term = if self.sig_p.is_empty() { 0.0 } else { self.sig_p.len() as f64 * r.ln() };
        Ok(presence_term + self.fixed - tail)
    }
}

fn augmented_offset(n_1u: usize, sample: &ObservedSample) -> Result<StratumOffset> {
    let counts = SampleCounts::new(sample.n_p(), sample.n_u(), n_1u)?.clamped();
    if counts.n_u == 0 {
        // No background rows: the offset never enters the likelihood.
        StratumOffset::known_prevalence(0.5, 1, counts.n_p)
    } else {
        StratumOffset::augmented(&counts)
    }
}

/// Current position of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    beta: Beta,
    y_u: Vec<bool>,
    n_1u: usize,
    log_post: f64,
    rows: RowCache,
}

impl ChainState {
    /// State at `beta` with background labels `y_u`; the log-posterior is
    /// evaluated here.
    pub fn new(
        beta: Beta,
        y_u: Vec<bool>,
        sample: &ObservedSample,
        prior: &PriorSpec,
        objective: &Objective,
    ) -> Result<Self> {
        if y_u.len() != sample.n_u() {
            return Err(Error::DimensionMismatch { expected: sample.n_u(), found: y_u.len() });
        }
        sample.check_beta(&beta)?;
        let n_1u = y_u.iter().filter(|&&y| y).count();
        let rows = RowCache::evaluate(beta.coefficients(), sample, objective)?;
        let log_post = rows.log_likelihood(objective, n_1u, sample)? + prior.log_density(&beta)?;
        Ok(Self { beta, y_u, n_1u, log_post, rows })
    }

    pub fn beta(&self) -> &Beta {
        &self.beta
    }

    /// Augmented (or, for M0, observed) labels of the background rows.
    pub fn y_u(&self) -> &[bool] {
        &self.y_u
    }

    /// `Σ y_u`, before any clamping.
    pub fn n_1u(&self) -> usize {
        self.n_1u
    }

    /// Cached log-posterior at `beta` given `n_1u`.
    pub fn log_post(&self) -> f64 {
        self.log_post
    }

    /// `n_1u` raised to at least one, as used by the offset and the trace.
    pub fn clamped_n_1u(&self) -> usize {
        self.n_1u.max(1)
    }
}

/// Starting state: `β` at the prior mean, background labels from fair coin flips
/// (or the revealed labels for the complete-data model).
pub fn init_chain(
    sample: &ObservedSample,
    prior: &PriorSpec,
    objective: &Objective,
    rng: &mut impl Rng,
) -> Result<ChainState> {
    if sample.n_u() == 0 {
        return Err(Error::InvalidSample("background sample is empty".into()));
    }
    let beta = Beta::new(prior.mean().to_vec())?;
    let y_u: Vec<bool> = match objective {
        Objective::Complete => sample
            .background_labels()
            .ok_or_else(|| Error::InvalidSample("M0 needs background labels".into()))?
            .to_vec(),
        _ => (0..sample.n_u()).map(|_| rng.random_bool(0.5)).collect(),
    };
    ChainState::new(beta, y_u, sample, prior, objective)
}

/// One Gaussian random-walk Metropolis move on an arbitrary log-density.
///
/// Non-finite proposal densities are rejected. Returns whether the move was
/// accepted; on acceptance `current` and `current_log_density` are updated.
pub fn metropolis_step<R, F>(
    current: &mut Vec<f64>,
    current_log_density: &mut f64,
    scales: &[f64],
    rng: &mut R,
    mut log_density: F,
) -> bool
where
    R: Rng + ?Sized,
    F: FnMut(&[f64]) -> f64,
{
    let proposal: Vec<f64> = current
        .iter()
        .zip(scales)
        .map(|(x, s)| x + s * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let log_u: f64 = rng.random::<f64>().ln();
    if proposal.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let proposed = log_density(&proposal);
    if proposed.is_finite() && log_u < proposed - *current_log_density {
        *current = proposal;
        *current_log_density = proposed;
        true
    } else {
        false
    }
}

/// Joint random-walk update of `β` with the offset held at the
/// state's current `n_1u`.
pub fn mh_update_beta(
    state: &mut ChainState,
    sample: &ObservedSample,
    prior: &PriorSpec,
    objective: &Objective,
    scales: &[f64],
    rng: &mut impl Rng,
) -> bool {
    let n_1u = state.n_1u;
    let mut coefficients = state.beta.coefficients().to_vec();
    let mut proposed_rows = None;
    let accepted = metropolis_step(&mut coefficients, &mut state.log_post, scales, rng, |b| {
        let Ok(rows) = RowCache::evaluate(b, sample, objective) else {
            return f64::NEG_INFINITY;
        };
        let beta = Beta::from_finite(b.to_vec());
        let value = match (rows.log_likelihood(objective, n_1u, sample), prior.log_density(&beta)) {
            (Ok(ll), Ok(lp)) => ll + lp,
            _ => f64::NEG_INFINITY,
        };
        proposed_rows = Some(rows);
        value
    });
    if accepted {
        state.beta = Beta::from_finite(coefficients);
        state.rows = proposed_rows.expect("evaluated on acceptance");
    }
    accepted
}

/// Redraws each background label from `Bernoulli(σ(x_i β))`, recounts
/// `n_1u` and refreshes the cached log-posterior when the offset depends on
/// it. No-op for the complete-data model, whose labels are observed.
pub fn gibbs_augment(
    state: &mut ChainState,
    sample: &ObservedSample,
    prior: &PriorSpec,
    objective: &Objective,
    rng: &mut impl Rng,
) -> Result<()> {
    if matches!(objective, Objective::Complete) {
        return Ok(());
    }
    let mut n_1u = 0;
    for (y, &p) in state.y_u.iter_mut().zip(&state.rows.sig_u) {
        *y = rng.random::<f64>() < p;
        n_1u += usize::from(*y);
    }
    let changed = n_1u != state.n_1u;
    state.n_1u = n_1u;
    if changed && objective.offset_tracks_labels() {
        state.log_post =
            state.rows.log_likelihood(objective, n_1u, sample)? + prior.log_density(&state.beta)?;
    }
    Ok(())
}

/// Robbins-Monro tuning of the random-walk scales during burn-in.
///
/// A global log-multiplier is driven towards [`TARGET_ACCEPTANCE`]. Halfway
/// through burn-in the per-coefficient base scales are replaced by the
/// posterior standard deviations seen in the second quarter, and the
/// multiplier restarts from `2.38 / sqrt(d)`.
#[derive(Debug, Clone)]
struct ScaleAdapter {
    base: Vec<f64>,
    log_lambda: f64,
    steps: usize,
    burn_in: usize,
    iteration: usize,
    window_mean: Vec<f64>,
    window_m2: Vec<f64>,
    window_count: usize,
}

impl ScaleAdapter {
    fn new(base: Vec<f64>, burn_in: usize) -> Self {
        let d = base.len();
        Self {
            base,
            log_lambda: 0.0,
            steps: 0,
            burn_in,
            iteration: 0,
            window_mean: vec![0.0; d],
            window_m2: vec![0.0; d],
            window_count: 0,
        }
    }

    fn scales(&self) -> Vec<f64> {
        let lambda = self.log_lambda.exp();
        self.base.iter().map(|b| b * lambda).collect()
    }

    fn observe(&mut self, accepted: bool, beta: &Beta) {
        self.iteration += 1;
        self.steps += 1;
        let gain = (self.steps as f64).powf(-0.6);
        self.log_lambda += gain * (f64::from(u8::from(accepted)) - TARGET_ACCEPTANCE);
        self.log_lambda = self.log_lambda.clamp(-12.0, 6.0);

        let quarter = self.burn_in / 4;
        if quarter < 50 {
            return;
        }
        if self.iteration > quarter && self.iteration <= 2 * quarter {
            self.window_count += 1;
            let n = self.window_count as f64;
            for (j, &b) in beta.coefficients().iter().enumerate() {
                let delta = b - self.window_mean[j];
                self.window_mean[j] += delta / n;
                self.window_m2[j] += delta * (b - self.window_mean[j]);
            }
        }
        if self.iteration == 2 * quarter && self.window_count > 1 {
            let d = self.base.len() as f64;
            let n = self.window_count as f64;
            for (b, m2) in self.base.iter_mut().zip(&self.window_m2) {
                let sd = (m2 / (n - 1.0)).sqrt();
                if sd.is_finite() && sd > 1e-8 {
                    *b = sd;
                }
            }
            self.log_lambda = (2.38 / d.sqrt()).ln();
            self.steps = 0;
        }
    }
}

/// Retained draws of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOutput {
    pub variant: ModelVariant,
    /// `keep` rows of `k + 1` coefficients.
    pub beta_draws: Vec<Vec<f64>>,
    /// `n_1u` per retained iteration (clamped for the augmented models).
    pub n_1u_trace: Vec<usize>,
    pub n_u: usize,
    /// Over post-burn-in proposals.
    pub acceptance_rate: f64,
    pub pi_hat: f64,
    /// Proposal scales in force after burn-in.
    pub proposal_scale: Vec<f64>,
}

/// Ergodic mean of the background presence count over the background size.
pub fn prevalence_estimate(n_1u_trace: &[usize], n_u: usize) -> f64 {
    if n_1u_trace.is_empty() || n_u == 0 {
        return f64::NAN;
    }
    let total: f64 = n_1u_trace.iter().map(|&c| c as f64).sum();
    total / n_1u_trace.len() as f64 / n_u as f64
}

/// Runs a full chain: burn-in, then `keep` retained iterations.
pub fn run_chain(sample: &ObservedSample, config: &SamplerConfig) -> Result<ChainOutput> {
    config.validate()?;
    let k = sample.n_cols();
    let prior = config.prior_for(k)?;
    let objective = Objective::for_spec(&config.model, sample)?;
    let mut rng = seed::stream(config.seed);
    let mut state = init_chain(sample, &prior, &objective, &mut rng)?;
    let mut adapter = ScaleAdapter::new(config.scales_for(k)?, config.burn_in);
    let mut scales = adapter.scales();

    let mut beta_draws = Vec::with_capacity(config.keep);
    let mut n_1u_trace = Vec::with_capacity(config.keep);
    let mut proposals = 0usize;
    let mut accepted = 0usize;
    let total = config.burn_in + config.keep * config.thin;

    for t in 0..total {
        let moved = mh_update_beta(&mut state, sample, &prior, &objective, &scales, &mut rng);
        if t < config.burn_in {
            if config.adapt {
                adapter.observe(moved, &state.beta);
                scales = adapter.scales();
            }
        } else {
            proposals += 1;
            accepted += usize::from(moved);
        }
        gibbs_augment(&mut state, sample, &prior, &objective, &mut rng)?;

        if t >= config.burn_in && (t - config.burn_in).is_multiple_of(config.thin) {
            beta_draws.push(state.beta.coefficients().to_vec());
            n_1u_trace.push(match objective {
                Objective::Complete => state.n_1u,
                _ => state.clamped_n_1u(),
            });
        }
    }

    let pi_hat = prevalence_estimate(&n_1u_trace, sample.n_u());
    Ok(ChainOutput {
        variant: config.model.variant,
        beta_draws,
        n_1u_trace,
        n_u: sample.n_u(),
        acceptance_rate: accepted as f64 / proposals.max(1) as f64,
        pi_hat,
        proposal_scale: scales,
    })
}

/// Posterior point summaries of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub variant: ModelVariant,
    pub draws: usize,
    pub beta_mean: Vec<f64>,
    pub beta_sd: Vec<f64>,
    /// 2.5%, 50% and 97.5% posterior quantiles per coefficient.
    pub beta_quantiles: Vec<[f64; 3]>,
    pub pi_hat: f64,
    pub acceptance_rate: f64,
}

pub fn summarize(output: &ChainOutput) -> PosteriorSummary {
    let draws = output.beta_draws.len();
    let k = output.beta_draws.first().map_or(0, Vec::len);
    let mut beta_mean = Vec::with_capacity(k);
    let mut beta_sd = Vec::with_capacity(k);
    let mut beta_quantiles = Vec::with_capacity(k);
    for j in 0..k {
        let mut column: Vec<f64> = output.beta_draws.iter().map(|d| d[j]).collect();
        let mean = column.iter().sum::<f64>() / draws as f64;
        let var = if draws > 1 {
            column.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (draws - 1) as f64
        } else {
            0.0
        };
        column.sort_by(f64::total_cmp);
        beta_mean.push(mean);
        beta_sd.push(var.sqrt());
        beta_quantiles.push([
            crate::stats::quantile_sorted(&column, 0.025),
            crate::stats::quantile_sorted(&column, 0.5),
            crate::stats::quantile_sorted(&column, 0.975),
        ]);
    }
    PosteriorSummary {
        variant: output.variant,
        draws,
        beta_mean,
        beta_sd,
        beta_quantiles,
        pi_hat: output.pi_hat,
        acceptance_rate: output.acceptance_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn toy_sample() -> ObservedSample {
        let x1 = [-3.0, -1.5, -0.2, 0.4, 1.1, 2.5, 3.3, -2.2, 0.9, 1.7];
        let z = [false, false, false, false, false, false, false, true, true, true];
        ObservedSample::from_x1(&x1, &z).unwrap()
    }

    fn short_config(model: EstimatorSpec) -> SamplerConfig {
        SamplerConfig {
            burn_in: 200,
            keep: 300,
            seed: 11,
            model,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn model_variant_parsing() {
        assert_eq!("m1".parse::<ModelVariant>().unwrap(), ModelVariant::M1);
        assert_eq!("M2".parse::<ModelVariant>().unwrap(), ModelVariant::M2);
        assert!("m3".parse::<ModelVariant>().is_err());
        assert_eq!(ModelVariant::M0.to_string(), "M0");
    }

    #[test]
    fn estimator_spec_rules() {
        assert!(EstimatorSpec::m1(0.2).is_ok());
        assert!(EstimatorSpec::m1(1.0).is_err());
        let missing = EstimatorSpec { variant: ModelVariant::M1, known_pi: None };
        assert!(missing.validate().is_err());
        let stray = EstimatorSpec { variant: ModelVariant::M2, known_pi: Some(0.2) };
        assert!(stray.validate().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = SamplerConfig::default();
        assert!(c.validate().is_ok());
        c.keep = 0;
        assert!(c.validate().is_err());
        let c = SamplerConfig { proposal_scale: vec![0.0], ..SamplerConfig::default() };
        assert!(c.validate().is_err());
        let c = SamplerConfig { proposal_scale: vec![0.1, 0.2, 0.3], ..SamplerConfig::default() };
        assert!(c.scales_for(2).is_err());
        assert_eq!(SamplerConfig::default().scales_for(2).unwrap(), vec![0.1, 0.1]);
    }

    #[test]
    fn init_chain_is_deterministic_and_clamps() {
        let sample = toy_sample();
        let prior = PriorSpec::isotropic(2, 0.0, 25.0).unwrap();
        let objective = Objective::Augmented;
        let a = init_chain(&sample, &prior, &objective, &mut seed::stream(3)).unwrap();
        let b = init_chain(&sample, &prior, &objective, &mut seed::stream(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.beta.coefficients(), &[0.0, 0.0]);
        assert_eq!(a.n_1u, a.y_u.iter().filter(|&&y| y).count());

        let single = ObservedSample::from_x1(&[0.3, 1.0], &[false, true]).unwrap();
        for s in 0..20 {
            let st = init_chain(&single, &prior, &objective, &mut seed::stream(s)).unwrap();
            assert!(st.n_1u <= 1);
            assert_eq!(st.clamped_n_1u(), 1);
            assert!(st.log_post.is_finite());
        }
    }

    #[test]
    fn init_chain_binomial_spread() {
        let x1: Vec<f64> = (0..400).map(|i| i as f64 / 100.0 - 2.0).collect();
        let sample = ObservedSample::from_x1(&x1, &vec![false; 400]).unwrap();
        let prior = PriorSpec::isotropic(2, 0.0, 25.0).unwrap();
        for s in 0..50 {
            let st = init_chain(&sample, &prior, &Objective::Augmented, &mut seed::stream(s)).unwrap();
            // Binomial(400, 1/2) lies in [150, 250] except with probability ~1e-6.
            assert!((150..=250).contains(&st.n_1u), "seed {s}: {}", st.n_1u);
        }
    }

    #[test]
    fn empty_background_is_rejected() {
        let sample = ObservedSample::from_x1(&[1.0], &[true]).unwrap();
        let config = short_config(EstimatorSpec::m2());
        assert!(matches!(run_chain(&sample, &config), Err(Error::InvalidSample(_))));
    }

    #[test]
    fn m0_requires_labels_and_m1_requires_pi() {
        let sample = toy_sample();
        assert!(run_chain(&sample, &short_config(EstimatorSpec::m0())).is_err());
        let bad = EstimatorSpec { variant: ModelVariant::M1, known_pi: None };
        assert!(run_chain(&sample, &short_config(bad)).is_err());
    }

    #[test]
    fn tiny_scale_accepts_almost_everything() {
        let sample = toy_sample();
        let config = SamplerConfig {
            burn_in: 0,
            keep: 500,
            proposal_scale: vec![1e-9],
            adapt: false,
            ..short_config(EstimatorSpec::m2())
        };
        let out = run_chain(&sample, &config).unwrap();
        assert!(out.acceptance_rate > 0.95, "{}", out.acceptance_rate);
    }

    #[test]
    fn augmentation_saturates_and_clamps() {
        let sample = toy_sample();
        let prior = PriorSpec::isotropic(2, 0.0, 25.0).unwrap();
        let mut rng = StreamRng::seed_from_u64(5);
        let mut state = init_chain(&sample, &prior, &Objective::Augmented, &mut rng).unwrap();
        let y_u = state.y_u().to_vec();
        state = ChainState::new(Beta::new(vec![-60.0, 0.0]).unwrap(), y_u, &sample, &prior, &Objective::Augmented).unwrap();
        gibbs_augment(&mut state, &sample, &prior, &Objective::Augmented, &mut rng).unwrap();
        assert_eq!(state.n_1u, 0);
        assert_eq!(state.clamped_n_1u(), 1);
        let fresh = Objective::Augmented.log_posterior(&state.beta, 0, &sample, &prior).unwrap();
        assert_eq!(state.log_post, fresh);
    }

    #[test]
    fn state_stays_consistent_across_updates() {
        let sample = toy_sample();
        let prior = PriorSpec::isotropic(2, 0.0, 25.0).unwrap();
        let objective = Objective::Augmented;
        let mut rng = StreamRng::seed_from_u64(17);
        let mut state = init_chain(&sample, &prior, &objective, &mut rng).unwrap();
        for _ in 0..500 {
            mh_update_beta(&mut state, &sample, &prior, &objective, &[0.5, 0.5], &mut rng);
            let fresh = objective.log_posterior(&state.beta, state.n_1u, &sample, &prior).unwrap();
            assert!((fresh - state.log_post).abs() < 1e-10);
            gibbs_augment(&mut state, &sample, &prior, &objective, &mut rng).unwrap();
            assert_eq!(state.n_1u, state.y_u.iter().filter(|&&y| y).count());
            let fresh = objective.log_posterior(&state.beta, state.n_1u, &sample, &prior).unwrap();
            assert!((fresh - state.log_post).abs() < 1e-10);
        }
    }

    #[test]
    fn complete_model_observes_labels() {
        let sample = toy_sample()
            .with_background_labels(vec![false, false, true, false, true, true, true])
            .unwrap();
        let out = run_chain(&sample, &short_config(EstimatorSpec::m0())).unwrap();
        assert!(out.n_1u_trace.iter().all(|&c| c == 4));
        assert_eq!(out.pi_hat, 4.0 / 7.0);
    }

    #[test]
    fn prevalence_estimate_of_constant_trace() {
        assert_eq!(prevalence_estimate(&[7; 25], 40), 7.0 / 40.0);
        assert!(prevalence_estimate(&[], 40).is_nan());
    }

    #[test]
    fn single_draw_summary_equals_draw() {
        let sample = toy_sample();
        let config = SamplerConfig { burn_in: 0, keep: 1, ..short_config(EstimatorSpec::m2()) };
        let out = run_chain(&sample, &config).unwrap();
        let summary = summarize(&out);
        assert_eq!(summary.draws, 1);
        assert_eq!(summary.beta_mean, out.beta_draws[0]);
        assert_eq!(summary.beta_sd, vec![0.0, 0.0]);
        assert_eq!(summary.beta_quantiles[1], [out.beta_draws[0][1]; 3]);
        assert_eq!(summary.pi_hat, out.n_1u_trace[0] as f64 / 7.0);
    }

    #[test]
    fn constant_chain_has_zero_spread() {
        let out = ChainOutput {
            variant: ModelVariant::M2,
            beta_draws: vec![vec![0.5, -1.0]; 40],
            n_1u_trace: vec![3; 40],
            n_u: 10,
            acceptance_rate: 0.0,
            pi_hat: 0.3,
            proposal_scale: vec![0.1, 0.1],
        };
        let s = summarize(&out);
        assert_eq!(s.beta_mean, vec![0.5, -1.0]);
        assert_eq!(s.beta_sd, vec![0.0, 0.0]);
        assert_eq!(s.beta_quantiles[0], [0.5; 3]);
    }

    #[test]
    fn summary_mean_matches_recomputation() {
        let sample = toy_sample();
        let out = run_chain(&sample, &short_config(EstimatorSpec::m1(0.3).unwrap())).unwrap();
        let s = summarize(&out);
        for j in 0..2 {
            let mut acc = 0.0;
            for d in &out.beta_draws {
                acc += d[j];
            }
            assert!((s.beta_mean[j] - acc / out.beta_draws.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn run_chain_is_deterministic() {
        let sample = toy_sample();
        let config = short_config(EstimatorSpec::m2());
        assert_eq!(run_chain(&sample, &config).unwrap(), run_chain(&sample, &config).unwrap());
        let other = SamplerConfig { seed: 12, ..config.clone() };
        assert_ne!(run_chain(&sample, &config).unwrap(), run_chain(&sample, &other).unwrap());
    }

    #[test]
    fn prevalence_estimate_never_below_floor() {
        let sample = toy_sample();
        let out = run_chain(&sample, &short_config(EstimatorSpec::m2())).unwrap();
        assert!(out.n_1u_trace.iter().all(|&c| c >= 1));
        assert!(out.pi_hat >= 1.0 / 7.0 && out.pi_hat <= 1.0);
    }
}
