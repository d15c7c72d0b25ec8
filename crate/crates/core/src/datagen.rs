//! Synthetic populations and presence-only case-control samples.
//!
//! A population of `N` units carries a bimodal informative covariate `x1`
//! (a two-component Gaussian mixture), a standard-normal nuisance covariate
//! `x2` that estimators never see, and a label drawn from the logistic
//! model in `(1, x1, x2)`. A sample of size `n` then takes `n/5` presences
//! uniformly from the labelled presences and `4n/5` background units
//! uniformly from the whole population.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{inverse_logit, ObservedSample};
use crate::seed;

/// Default population size.
pub const POPULATION_SIZE: usize = 10_000;

/// Presences per background unit in a designed sample (1:4).
pub const BACKGROUND_PER_PRESENCE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// `β = (0, 1, 0)`: only `x1` drives the response.
    I,
    /// `β = (0, 1, 1)`: `x2` adds noise.
    II,
    /// `β = (1, 1, 1)`: intercept, `x1` and `x2`.
    III,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::I, Scenario::II, Scenario::III];

    pub fn beta_true(self) -> [f64; 3] {
        match self {
            Scenario::I => [0.0, 1.0, 0.0],
            Scenario::II => [0.0, 1.0, 1.0],
            Scenario::III => [1.0, 1.0, 1.0],
        }
    }

    pub fn index(self) -> u64 {
        match self {
            Scenario::I => 1,
            Scenario::II => 2,
            Scenario::III => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::I => "i",
            Scenario::II => "ii",
            Scenario::III => "iii",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Scenario::I),
            "ii" | "2" => Ok(Scenario::II),
            "iii" | "3" => Ok(Scenario::III),
            other => Err(Error::InvalidConfig(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Two-component Gaussian mixture for `x1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub mu_a: f64,
    pub mu_b: f64,
    pub sigma2: f64,
    /// Probability of drawing from component `a`.
    pub p_weight: f64,
}

impl Default for MixtureSpec {
    fn default() -> Self {
        Self { mu_a: 4.0, mu_b: -4.0, sigma2: 4.0, p_weight: 0.165 }
    }
}

impl MixtureSpec {
    pub fn mean(&self) -> f64 {
        self.p_weight * self.mu_a + (1.0 - self.p_weight) * self.mu_b
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.sigma2
            + self.p_weight * (self.mu_a - m).powi(2)
            + (1.0 - self.p_weight) * (self.mu_b - m).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// `(β0, β1, β2)` of the generating model.
    pub beta_true: [f64; 3],
    pub population_size: usize,
    pub mixture: MixtureSpec,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            beta_true: scenario.beta_true(),
            population_size: POPULATION_SIZE,
            mixture: MixtureSpec::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.mixture;
        if !(m.sigma2.is_finite() && m.sigma2 > 0.0) {
            return Err(domain("mixture variance", "(0, inf)", m.sigma2));
        }
        if !(m.p_weight > 0.0 && m.p_weight < 1.0) {
            return Err(domain("mixture weight", "(0, 1)", m.p_weight));
        }
        if self.population_size == 0 {
            return Err(Error::InvalidConfig("population size must be positive".into()));
        }
        if self.beta_true.iter().any(|b| !b.is_finite()) || !m.mu_a.is_finite() || !m.mu_b.is_finite() {
            return Err(Error::InvalidConfig("scenario parameters must be finite".into()));
        }
        Ok(())
    }
}

/// A fully labelled synthetic population.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub y: Vec<bool>,
    pub pi_true: f64,
}

impl Population {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_presences(&self) -> usize {
        self.y.iter().filter(|&&y| y).count()
    }
}

/// Draws a population: per unit `w ~ Bernoulli(p)`, `x1 ~ N(μ_a or μ_b, σ²)`,
/// `x2 ~ N(0, 1)`, `y ~ Bernoulli(σ(β0 + β1 x1 + β2 x2))`.
pub fn generate_population(spec: &ScenarioSpec) -> Result<Population> {
    spec.validate()?;
    let mut rng = seed::stream(spec.seed);
    let m = spec.mixture;
    let sd = m.sigma2.sqrt();
    let comp_a = Normal::new(m.mu_a, sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let comp_b = Normal::new(m.mu_b, sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let [b0, b1, b2] = spec.beta_true;

    let n = spec.population_size;
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let w = rng.random_bool(m.p_weight);
        let a = if w { comp_a.sample(&mut rng) } else { comp_b.sample(&mut rng) };
        let b: f64 = rng.sample(StandardNormal);
        let p = inverse_logit(b0 + b1 * a + b2 * b);
        x1.push(a);
        x2.push(b);
        y.push(rng.random::<f64>() < p);
    }
    let pi_true = y.iter().filter(|&&v| v).count() as f64 / n as f64;
    Ok(Population { x1, x2, y, pi_true })
}

/// One row of a designed sample as an estimator may see it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    /// Index of the unit in the population.
    pub unit_id: usize,
    pub x1: f64,
    /// `true` for the presence stratum.
    pub z: bool,
}

/// True labels of the sample rows, kept apart from the rows themselves.
/// Evaluation and the complete-data benchmark read them; presence-only
/// estimators are never handed this type.
#[derive(Debug, Clone, PartialEq)]
pub struct SealedTruth {
    labels: Vec<bool>,
}

impl SealedTruth {
    /// Label of every sample row, in row order.
    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

/// A presence-only sample: presence rows first, then background rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseControlSample {
    rows: Vec<SampleRow>,
    truth: SealedTruth,
}

impl CaseControlSample {
    /// Reassemble a sample from rows and their true labels.
    pub fn from_parts(rows: Vec<SampleRow>, labels: Vec<bool>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidSample(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.iter().zip(&labels).any(|(r, &y)| r.z && !y) {
            return Err(Error::InvalidSample("presence-stratum rows must be labelled 1".into()));
        }
        Ok(Self { rows, truth: SealedTruth { labels } })
    }

    pub fn rows(&self) -> &[SampleRow] {
        &self.rows
    }

    pub fn n_p(&self) -> usize {
        self.rows.iter().filter(|r| r.z).count()
    }

    pub fn n_u(&self) -> usize {
        self.rows.len() - self.n_p()
    }

    pub fn truth(&self) -> &SealedTruth {
        &self.truth
    }

    /// Labels of the background rows, in row order.
    pub fn background_truth(&self) -> Vec<bool> {
        self.rows
            .iter()
            .zip(&self.truth.labels)
            .filter(|(r, _)| !r.z)
            .map(|(_, &y)| y)
            .collect()
    }

    /// Estimator-facing view: `(1, x1)` design and strata only.
    pub fn observed(&self) -> Result<ObservedSample> {
        let x1: Vec<f64> = self.rows.iter().map(|r| r.x1).collect();
        let z: Vec<bool> = self.rows.iter().map(|r| r.z).collect();
        ObservedSample::from_x1(&x1, &z)
    }

    /// Estimator-facing view with the background labels revealed, for the
    /// complete-data benchmark.
    pub fn observed_complete(&self) -> Result<ObservedSample> {
        self.observed()?.with_background_labels(self.background_truth())
    }
}

/// Draws a 1:4 presence/background sample of total size `n`.
pub fn sample_design(pop: &Population, n: usize, seed: u64) -> Result<CaseControlSample> {
    let parts = BACKGROUND_PER_PRESENCE + 1;
    if n == 0 || !n.is_multiple_of(parts) {
        return Err(Error::InvalidConfig(format!(
            "sample size must be a positive multiple of {parts}, got {n}"
        )));
    }
    let n_p = n / parts;
    let n_u = n - n_p;
    if n_u > pop.len() {
        return Err(Error::InvalidConfig(format!(
            "background size {n_u} exceeds population size {}",
            pop.len()
        )));
    }
    let mut presences: Vec<usize> = (0..pop.len()).filter(|&i| pop.y[i]).collect();
    if presences.len() < n_p {
        return Err(Error::InsufficientPresences { needed: n_p, available: presences.len() });
    }

    let mut rng = seed::stream(seed);
    let (chosen_p, _) = presences.partial_shuffle(&mut rng, n_p);
    let chosen_p = chosen_p.to_vec();
    let mut everyone: Vec<usize> = (0..pop.len()).collect();
    let (chosen_u, _) = everyone.partial_shuffle(&mut rng, n_u);

    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (&i, z) in chosen_p.iter().map(|i| (i, true)).chain(chosen_u.iter().map(|i| (i, false))) {
        rows.push(SampleRow { unit_id: i, x1: pop.x1[i], z });
        labels.push(pop.y[i]);
    }
    CaseControlSample::from_parts(rows, labels)
}

/// Held-out labelled units used to score classifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSet {
    pub x1: Vec<f64>,
    pub y: Vec<bool>,
}

/// Draws up to `size` units uniformly from the population, excluding every
/// unit that appears in `sample`.
pub fn draw_eval_set(pop: &Population, sample: &CaseControlSample, size: usize, seed: u64) -> EvalSet {
    let mut used = vec![false; pop.len()];
    for r in sample.rows() {
        used[r.unit_id] = true;
    }
    let mut pool: Vec<usize> = (0..pop.len()).filter(|&i| !used[i]).collect();
    let take = size.min(pool.len());
    let mut rng = seed::stream(seed);
    let (chosen, _) = pool.partial_shuffle(&mut rng, take);
    EvalSet {
        x1: chosen.iter().map(|&i| pop.x1[i]).collect(),
        y: chosen.iter().map(|&i| pop.y[i]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(seed: u64) -> ScenarioSpec {
        ScenarioSpec { population_size: 3000, ..ScenarioSpec::new(Scenario::I, seed) }
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!("iii".parse::<Scenario>().unwrap(), Scenario::III);
        assert_eq!("II".parse::<Scenario>().unwrap(), Scenario::II);
        assert!("iv".parse::<Scenario>().is_err());
        assert_eq!(Scenario::III.beta_true(), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn spec_validation() {
        let mut s = small_spec(1);
        s.mixture.sigma2 = 0.0;
        assert!(generate_population(&s).is_err());
        let mut s = small_spec(1);
        s.mixture.p_weight = 1.0;
        assert!(generate_population(&s).is_err());
    }

    #[test]
    fn saturated_intercept_gives_no_presences() {
        let spec = ScenarioSpec { beta_true: [-40.0, 0.0, 0.0], ..small_spec(2) };
        let pop = generate_population(&spec).unwrap();
        assert_eq!(pop.pi_true, 0.0);
        assert!(matches!(
            sample_design(&pop, 50, 1),
            Err(Error::InsufficientPresences { needed: 10, available: 0 })
        ));
    }

    #[test]
    fn population_is_deterministic_per_seed() {
        let a = generate_population(&small_spec(9)).unwrap();
        let b = generate_population(&small_spec(9)).unwrap();
        let c = generate_population(&small_spec(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.x1, c.x1);
        assert_eq!(a.len(), 3000);
    }

    #[test]
    fn mixture_mean_matches_design() {
        let spec = ScenarioSpec::new(Scenario::I, 4);
        let pop = generate_population(&spec).unwrap();
        let expected = spec.mixture.mean();
        assert!((expected + 2.68).abs() < 1e-12);
        let se = (spec.mixture.variance() / pop.len() as f64).sqrt();
        let mean = pop.x1.iter().sum::<f64>() / pop.len() as f64;
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn design_sizes_and_strata() {
        let pop = generate_population(&ScenarioSpec::new(Scenario::I, 5)).unwrap();
        for (n, n_p, n_u) in [(500, 100, 400), (50, 10, 40)] {
            let s = sample_design(&pop, n, 3).unwrap();
            assert_eq!((s.n_p(), s.n_u()), (n_p, n_u));
            for (row, &y) in s.rows().iter().zip(s.truth().labels()) {
                assert_eq!(pop.y[row.unit_id], y);
                assert_eq!(pop.x1[row.unit_id], row.x1);
                if row.z {
                    assert!(y);
                }
            }
            let mut ids: Vec<usize> =
                s.rows().iter().filter(|r| r.z).map(|r| r.unit_id).collect();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), n_p, "presences drawn without replacement");
        }
        assert!(sample_design(&pop, 52, 3).is_err());
        assert!(sample_design(&pop, 0, 3).is_err());
    }

    #[test]
    fn design_is_deterministic_per_seed() {
        let pop = generate_population(&small_spec(6)).unwrap();
        assert_eq!(sample_design(&pop, 100, 1).unwrap(), sample_design(&pop, 100, 1).unwrap());
        assert_ne!(sample_design(&pop, 100, 1).unwrap(), sample_design(&pop, 100, 2).unwrap());
    }

    #[test]
    fn background_presence_fraction_tracks_prevalence() {
        let pop = generate_population(&ScenarioSpec::new(Scenario::III, 8)).unwrap();
        let draws = 200;
        let n_u = 400;
        let mut total = 0usize;
        for s in 0..draws {
            let sample = sample_design(&pop, 500, s).unwrap();
            total += sample.background_truth().iter().filter(|&&y| y).count();
        }
        let frac = total as f64 / (draws * n_u) as f64;
        let p = pop.pi_true;
        // Sampling without replacement from a finite population: SE is at
        // most that of the binomial.
        let se = (p * (1.0 - p) / (draws * n_u) as f64).sqrt();
        assert!((frac - p).abs() < 3.0 * se, "frac {frac}, pi {p}, se {se}");
    }

    #[test]
    fn observed_view_hides_labels() {
        let pop = generate_population(&small_spec(7)).unwrap();
        let s = sample_design(&pop, 100, 4).unwrap();
        let observed = s.observed().unwrap();
        assert!(observed.background_labels().is_none());
        assert_eq!(observed.n_p(), 20);
        assert_eq!(observed.n_cols(), 2);
        let complete = s.observed_complete().unwrap();
        assert_eq!(complete.background_labels().unwrap(), s.background_truth().as_slice());
    }

    #[test]
    fn eval_set_excludes_sample_units() {
        let pop = generate_population(&small_spec(8)).unwrap();
        let s = sample_design(&pop, 500, 4).unwrap();
        let eval = draw_eval_set(&pop, &s, 2000, 5);
        assert_eq!(eval.x1.len(), 2000);
        let sampled: std::collections::HashSet<u64> =
            s.rows().iter().map(|r| r.x1.to_bits()).collect();
        assert!(eval.x1.iter().all(|x| !sampled.contains(&x.to_bits())));
        let all = draw_eval_set(&pop, &s, 1_000_000, 5);
        assert!(all.x1.len() <= 3000 - 100);
    }

    #[test]
    fn from_parts_rejects_unlabelled_presence() {
        let rows = vec![SampleRow { unit_id: 0, x1: 0.0, z: true }];
        assert!(CaseControlSample::from_parts(rows.clone(), vec![false]).is_err());
        assert!(CaseControlSample::from_parts(rows, vec![]).is_err());
    }
}
