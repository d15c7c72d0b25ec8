//! Probability core for logistic regression on presence-only data.
//!
//! A presence-only sample mixes two strata: `n_p` rows drawn from the
//! sub-population of presences (`Z = 1`, so `Y = 1`) and `n_u` background
//! rows drawn from the whole population (`Z = 0`, `Y` unobserved). Writing
//! `n_1u` for the (latent) number of presences in the background, the
//! regression function on the sample is corrected by the offset
//! `log((n_1u + n_p) / n_1u)` and the observable stratum follows
//!
//! ```text
//! Pr(Z = 1 | x) = (n_p / n_1u) e^{xβ} / (1 + (1 + n_p / n_1u) e^{xβ})
//! Pr(Z = 0 | x) = (1 + e^{xβ})       / (1 + (1 + n_p / n_1u) e^{xβ})
//! ```
//!
//! Dividing through by `1 + e^{xβ}` gives the form used for evaluation here,
//! `Pr(Z = 0 | x) = 1 / (1 + r σ(xβ))` with `r = n_p / n_1u`, which needs a
//! single exponential per row and never overflows.
//!
//! Everything in this module is a pure function of its arguments.

use crate::error::{domain, Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Log-odds of a probability.
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("probability", "(0, 1)", p));
    }
    Ok((p / (1.0 - p)).ln())
}

/// Logistic function, evaluated on the branch that cannot overflow.
#[inline]
pub fn inverse_logit(phi: f64) -> f64 {
    if phi >= 0.0 {
        1.0 / (1.0 + (-phi).exp())
    } else {
        let e = phi.exp();
        e / (1.0 + e)
    }
}

/// `log σ(phi)` without forming `σ(phi)` first.
#[inline]
pub fn log_inverse_logit(phi: f64) -> f64 {
    if phi >= 0.0 {
        -(-phi).exp().ln_1p()
    } else {
        phi - phi.exp().ln_1p()
    }
}

/// Offset turning a population logit into the logit under a standard
/// case-control design with `n1` cases, `n0` controls and prevalence `pi`.
pub fn case_control_offset(n1: usize, n0: usize, pi: f64) -> Result<f64> {
    if n1 == 0 || n0 == 0 {
        return Err(Error::DegenerateCounts(format!(
            "case-control offset needs n1 > 0 and n0 > 0 (n1 = {n1}, n0 = {n0})"
        )));
    }
    if !(pi > 0.0 && pi < 1.0) {
        return Err(domain("prevalence", "(0, 1)", pi));
    }
    Ok((n1 as f64 / n0 as f64).ln() - (pi / (1.0 - pi)).ln())
}

/// Marginal occurrence probability `Pr(Y = 1 | x)` over the population
/// augmented with its presences, given `π*(x)`: `2π* / (1 + π*)`.
pub fn marginal_presence_prob(pi_star: f64) -> f64 {
    2.0 * pi_star / (1.0 + pi_star)
}

/// Regression coefficients, intercept first.
#[derive(Debug, Clone, PartialEq)]
pub struct Beta(Vec<f64>);

impl Beta {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidConfig("beta needs at least one coefficient".into()));
        }
        if let Some(bad) = coefficients.iter().find(|b| !b.is_finite()) {
            return Err(domain("coefficient", "finite reals", *bad));
        }
        Ok(Self(coefficients))
    }

    pub(crate) fn from_finite(coefficients: Vec<f64>) -> Self {
        debug_assert!(coefficients.iter().all(|b| b.is_finite()));
        Self(coefficients)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len.max(1)])
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x · β` for one design row (intercept column included in `row`).
    #[inline]
    pub fn linear_predictor(&self, row: &[f64]) -> f64 {
        row.iter().zip(&self.0).map(|(x, b)| x * b).sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Sample-level counts: presences, background size and presences inside
/// the background.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleCounts {
    pub n_p: usize,
    pub n_u: usize,
    pub n_1u: usize,
}

impl SampleCounts {
    pub fn new(n_p: usize, n_u: usize, n_1u: usize) -> Result<Self> {
        if n_1u > n_u {
            return Err(Error::DegenerateCounts(format!(
                "n_1u = {n_1u} exceeds background size n_u = {n_u}"
            )));
        }
        Ok(Self { n_p, n_u, n_1u })
    }

    pub fn n_0u(&self) -> usize {
        self.n_u - self.n_1u
    }

    /// Same counts with `n_1u` raised to at least one.
    pub fn clamped(self) -> Self {
        Self {
            n_1u: self.n_1u.max(1).min(self.n_u.max(1)),
            ..self
        }
    }
}

/// Population-level counts: size and number of presences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationCounts {
    pub n: usize,
    pub n_1: usize,
}

impl PopulationCounts {
    pub fn new(n: usize, n_1: usize) -> Result<Self> {
        if n == 0 || n_1 > n {
            return Err(Error::DegenerateCounts(format!(
                "population needs 0 <= N_1 <= N and N > 0 (N = {n}, N_1 = {n_1})"
            )));
        }
        Ok(Self { n, n_1 })
    }

    /// Empirical prevalence `N_1 / N`.
    pub fn pi(&self) -> f64 {
        self.n_1 as f64 / self.n as f64
    }
}

/// Inclusion probabilities of absences (`rho0`) and presences (`rho1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclusionRates {
    pub rho0: f64,
    pub rho1: f64,
}

impl InclusionRates {
    pub fn ratio(&self) -> f64 {
        self.rho1 / self.rho0
    }
}

/// Inclusion probabilities implied by the population and sample tables.
///
/// Absences can only enter through the background, presences through
/// either stratum, so `ρ0 = n_0u / ((1-π) N)` and `ρ1 = (n_1u + n_p) / (2πN)`.
pub fn inclusion_identities(pop: &PopulationCounts, counts: &SampleCounts) -> Result<InclusionRates> {
    let pi = pop.pi();
    if !(pi > 0.0 && pi < 1.0) {
        return Err(domain("population prevalence", "(0, 1)", pi));
    }
    let n = pop.n as f64;
    let rho0 = counts.n_0u() as f64 / ((1.0 - pi) * n);
    let rho1 = (counts.n_1u + counts.n_p) as f64 / (2.0 * pi * n);
    if rho0 <= 0.0 || rho1 <= 0.0 {
        return Err(Error::DegenerateCounts(format!(
            "inclusion rates must be positive (rho0 = {rho0}, rho1 = {rho1})"
        )));
    }
    Ok(InclusionRates { rho0, rho1 })
}

/// The two products `Pr(Y=0|C=1,x)·Pr(C=1|x)` and `Pr(Y=1|C=1,x)·Pr(C=1|x)`
/// in closed form, for a unit with population occurrence probability `pi_star`.
pub fn inclusion_weighted_occurrence(pi_star: f64, rates: &InclusionRates) -> (f64, f64) {
    let absent = (1.0 - pi_star) / (1.0 + pi_star) * rates.rho0;
    let present = 2.0 * pi_star / (1.0 + pi_star) * rates.rho1;
    (absent, present)
}

/// Logit-scale correction for the presence-only design, stored as the pair
/// `(n_p, n_1u)` it is built from. `n_1u` is real-valued so the known-prevalence
/// variant (`n_1u ≈ π n_u`) shares the same code path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratumOffset {
    n_p: f64,
    n_1u: f64,
}

impl StratumOffset {
    /// Offset from the current (augmented) background count. Requires `n_1u >= 1`.
    pub fn augmented(counts: &SampleCounts) -> Result<Self> {
        if counts.n_1u == 0 {
            return Err(Error::DegenerateCounts(
                "n_1u = 0 leaves the presence-only offset undefined; clamp to 1 first".into(),
            ));
        }
        Ok(Self {
            n_p: counts.n_p as f64,
            n_1u: counts.n_1u as f64,
        })
    }

    /// Offset from a known prevalence, replacing `n_1u` by its expectation `π n_u`.
    pub fn known_prevalence(pi: f64, n_u: usize, n_p: usize) -> Result<Self> {
        if !(pi > 0.0 && pi < 1.0) {
            return Err(domain("prevalence", "(0, 1)", pi));
        }
        if n_u == 0 {
            return Err(Error::DegenerateCounts("background sample is empty".into()));
        }
        Ok(Self {
            n_p: n_p as f64,
            n_1u: pi * n_u as f64,
        })
    }

    /// `log((n_1u + n_p) / n_1u)`.
    pub fn log_offset(&self) -> f64 {
        ((self.n_1u + self.n_p) / self.n_1u).ln()
    }

    /// `n_p / n_1u`.
    pub fn ratio(&self) -> f64 {
        self.n_p / self.n_1u
    }

    pub fn prob_z1(&self, x_beta: f64) -> f64 {
        let rs = self.ratio() * inverse_logit(x_beta);
        rs / (1.0 + rs)
    }

    pub fn prob_z0(&self, x_beta: f64) -> f64 {
        1.0 / (1.0 + self.ratio() * inverse_logit(x_beta))
    }

    /// Occurrence probability on the sample scale, `Pr(Y = 1 | C = 1, x)`.
    pub fn sample_presence_prob(&self, x_beta: f64) -> f64 {
        inverse_logit(x_beta + self.log_offset())
    }
}

/// `log((n_1u + n_p) / n_1u)` for the augmented background count.
pub fn pod_offset_m2(counts: &SampleCounts) -> Result<f64> {
    Ok(StratumOffset::augmented(counts)?.log_offset())
}

/// `log((π n_u + n_p) / (π n_u))` for a known prevalence `π`.
pub fn pod_offset_m1(pi: f64, n_u: usize, n_p: usize) -> Result<f64> {
    Ok(StratumOffset::known_prevalence(pi, n_u, n_p)?.log_offset())
}

/// `Pr(Z = 1 | C = 1, x, β)` given the linear predictor `xβ`.
pub fn stratum_prob_z1(x_beta: f64, counts: &SampleCounts) -> Result<f64> {
    Ok(StratumOffset::augmented(counts)?.prob_z1(x_beta))
}

/// `Pr(Z = 0 | C = 1, x, β)` given the linear predictor `xβ`.
pub fn stratum_prob_z0(x_beta: f64, counts: &SampleCounts) -> Result<f64> {
    Ok(StratumOffset::augmented(counts)?.prob_z0(x_beta))
}

/// Posterior predictive probability that a background unit is a presence.
/// The offset cancels, leaving the population model `σ(xβ)`.
pub fn predictive_presence_prob(x_beta: f64) -> f64 {
    inverse_logit(x_beta)
}

/// Independent Gaussian priors on each coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    mean: Vec<f64>,
    variance: Vec<f64>,
}

impl PriorSpec {
    pub fn new(mean: Vec<f64>, variance: Vec<f64>) -> Result<Self> {
        if mean.len() != variance.len() || mean.is_empty() {
            return Err(Error::InvalidPrior(format!(
                "mean has {} entries, variance has {}",
                mean.len(),
                variance.len()
            )));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidPrior("prior means must be finite".into()));
        }
        if variance.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidPrior("prior variances must be finite and positive".into()));
        }
        Ok(Self { mean, variance })
    }

    /// The same `N(mean, variance)` prior on each of `len` coefficients.
    pub fn isotropic(len: usize, mean: f64, variance: f64) -> Result<Self> {
        Self::new(vec![mean; len], vec![variance; len])
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Log density including the Gaussian normalising constants.
    pub fn log_density(&self, beta: &Beta) -> Result<f64> {
        if beta.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: beta.len(),
            });
        }
        Ok(beta
            .coefficients()
            .iter()
            .zip(self.mean.iter().zip(&self.variance))
            .map(|(b, (m, v))| -0.5 * (LN_2PI + v.ln()) - (b - m).powi(2) / (2.0 * v))
            .sum())
    }
}

/// The estimator-facing view of a presence-only sample: design rows (with a
/// leading intercept column) and stratum indicators. Background labels are
/// absent unless explicitly revealed for the complete-data benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedSample {
    n_cols: usize,
    design: Vec<f64>,
    z: Vec<bool>,
    n_p: usize,
    background_labels: Option<Vec<bool>>,
}

impl ObservedSample {
    /// Build from covariate rows (without intercept) and stratum flags.
    pub fn new(covariates: &[Vec<f64>], z: &[bool]) -> Result<Self> {
        if covariates.len() != z.len() {
            return Err(Error::InvalidSample(format!(
                "{} covariate rows but {} stratum flags",
                covariates.len(),
                z.len()
            )));
        }
        let k = covariates.first().map_or(0, Vec::len);
        let n_cols = k + 1;
        let mut design = Vec::with_capacity(covariates.len() * n_cols);
        for row in covariates {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len() + 1,
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSample("covariates must be finite".into()));
            }
            design.push(1.0);
            design.extend_from_slice(row);
        }
        Ok(Self {
            n_cols,
            design,
            n_p: z.iter().filter(|&&s| s).count(),
            z: z.to_vec(),
            background_labels: None,
        })
    }

    /// Single-covariate sample with design `[1, x1]`.
    pub fn from_x1(x1: &[f64], z: &[bool]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = x1.iter().map(|&x| vec![x]).collect();
        Self::new(&rows, z)
    }

    /// Attach the true labels of the background rows, in row order. Only the
    /// complete-data estimator may consume them.
    pub fn with_background_labels(mut self, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != self.n_u() {
            return Err(Error::InvalidSample(format!(
                "{} background labels for {} background rows",
                labels.len(),
                self.n_u()
            )));
        }
        self.background_labels = Some(labels);
        Ok(self)
    }

    pub fn background_labels(&self) -> Option<&[bool]> {
        self.background_labels.as_deref()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_u(&self) -> usize {
        self.z.len() - self.n_p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.design[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn z(&self) -> &[bool] {
        &self.z
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], bool)> {
        self.design
            .chunks_exact(self.n_cols.max(1))
            .zip(self.z.iter().copied())
    }

    /// Design rows of the background stratum, in order.
    pub fn background_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows().filter(|(_, z)| !z).map(|(row, _)| row)
    }

    pub(crate) fn check_beta(&self, beta: &Beta) -> Result<()> {
        if beta.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: beta.len(),
            });
        }
        Ok(())
    }

    fn check_counts(&self, counts: &SampleCounts) -> Result<()> {
        if counts.n_p != self.n_p || counts.n_u != self.n_u() {
            return Err(Error::DegenerateCounts(format!(
                "counts (n_p = {}, n_u = {}) do not match the sample (n_p = {}, n_u = {})",
                counts.n_p,
                counts.n_u,
                self.n_p,
                self.n_u()
            )));
        }
        Ok(())
    }
}

/// Observed-stratum log-likelihood `Σ_{S_u} log Pr(Z=0) + Σ_{S_p} log Pr(Z=1)`
/// with the offset built from `counts`.
pub fn log_likelihood(beta: &Beta, sample: &ObservedSample, counts: &SampleCounts) -> Result<f64> {
    sample.check_counts(counts)?;
    let offset = StratumOffset::augmented(counts)?;
    log_likelihood_with_offset(beta, sample, &offset)
}

/// Observed-stratum log-likelihood for an explicit offset.
pub fn log_likelihood_with_offset(
    beta: &Beta,
    sample: &ObservedSample,
    offset: &StratumOffset,
) -> Result<f64> {
    sample.check_beta(beta)?;
    let r = offset.ratio();
    let ln_r = r.ln();
    let mut total = 0.0;
    for (row, z) in sample.rows() {
        let eta = beta.linear_predictor(row);
        let rs = r * inverse_logit(eta);
        total += if z {
            ln_r + log_inverse_logit(eta) - rs.ln_1p()
        } else {
            -rs.ln_1p()
        };
    }
    Ok(total)
}

/// Bernoulli log-likelihood of the background rows against their revealed
/// labels, with no design correction.
pub fn complete_log_likelihood(beta: &Beta, sample: &ObservedSample) -> Result<f64> {
    sample.check_beta(beta)?;
    let labels = sample.background_labels().ok_or_else(|| {
        Error::InvalidSample("complete-data likelihood needs revealed background labels".into())
    })?;
    Ok(sample
        .background_rows()
        .zip(labels)
        .map(|(row, &y)| {
            let eta = beta.linear_predictor(row);
            if y {
                log_inverse_logit(eta)
            } else {
                log_inverse_logit(-eta)
            }
        })
        .sum())
}

/// Log-likelihood plus log-prior (normalising constants included).
pub fn log_posterior(
    beta: &Beta,
    prior: &PriorSpec,
    sample: &ObservedSample,
    counts: &SampleCounts,
) -> Result<f64> {
    Ok(log_likelihood(beta, sample, counts)? + prior.log_density(beta)?)
}

pub fn log_posterior_with_offset(
    beta: &Beta,
    prior: &PriorSpec,
    sample: &ObservedSample,
    offset: &StratumOffset,
) -> Result<f64> {
    Ok(log_likelihood_with_offset(beta, sample, offset)? + prior.log_density(beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn logit_examples() {
        assert_eq!(logit(0.5).unwrap(), 0.0);
        assert!(close(logit(0.75).unwrap(), 3f64.ln(), 1e-15));
        for p in [1e-6, 0.3, 1.0 - 1e-6] {
            assert!(close(inverse_logit(logit(p).unwrap()), p, 1e-12));
        }
        assert!(logit(0.0).is_err());
        assert!(logit(1.0).is_err());
        assert!(logit(f64::NAN).is_err());
    }

    #[test]
    fn inverse_logit_saturates() {
        assert_eq!(inverse_logit(0.0), 0.5);
        let hi = inverse_logit(40.0);
        assert!(hi > 1.0 - 1e-15 && hi <= 1.0);
        assert!(close(inverse_logit(3f64.ln()), 0.75, 1e-15));
        assert!(inverse_logit(-800.0) >= 0.0);
        assert!(log_inverse_logit(-800.0).is_finite());
        assert!(log_inverse_logit(800.0) <= 0.0);
    }

    #[test]
    fn case_control_offset_examples() {
        assert!(close(case_control_offset(100, 400, 0.2).unwrap(), 0.0, 1e-15));
        assert!(close(case_control_offset(7, 7, 0.5).unwrap(), 0.0, 1e-15));
        let expected = 0.25f64.ln() - (1.0f64 / 9.0).ln();
        assert!(close(case_control_offset(50, 200, 0.1).unwrap(), expected, 1e-14));
        assert!(case_control_offset(0, 10, 0.2).is_err());
        assert!(case_control_offset(10, 10, 1.0).is_err());
    }

    #[test]
    fn marginal_presence_examples() {
        assert_eq!(marginal_presence_prob(0.0), 0.0);
        assert_eq!(marginal_presence_prob(1.0), 1.0);
        assert!(close(marginal_presence_prob(1.0 / 3.0), 0.5, 1e-15));
    }

    #[test]
    fn pod_offset_examples() {
        let c = |n_p, n_1u| SampleCounts::new(n_p, 400, n_1u).unwrap();
        assert_eq!(pod_offset_m2(&c(0, 50)).unwrap(), 0.0);
        assert!(close(pod_offset_m2(&c(100, 100)).unwrap(), 2f64.ln(), 1e-15));
        assert!(close(pod_offset_m2(&c(100, 80)).unwrap(), 2.25f64.ln(), 1e-15));
        assert!(matches!(pod_offset_m2(&c(100, 0)), Err(Error::DegenerateCounts(_))));

        assert_eq!(pod_offset_m1(0.5, 400, 0).unwrap(), 0.0);
        assert!(close(pod_offset_m1(0.25, 400, 100).unwrap(), 2f64.ln(), 1e-15));
        assert_eq!(
            pod_offset_m1(0.25, 400, 100).unwrap(),
            pod_offset_m2(&c(100, 100)).unwrap()
        );
        assert!(pod_offset_m1(0.0, 400, 100).is_err());
    }

    #[test]
    fn stratum_probability_examples() {
        let counts = SampleCounts::new(5, 20, 5).unwrap();
        assert!(close(stratum_prob_z1(0.0, &counts).unwrap(), 1.0 / 3.0, 1e-15));
        let none = SampleCounts::new(0, 20, 5).unwrap();
        for eta in [-30.0, -1.0, 0.0, 2.0, 30.0] {
            assert_eq!(stratum_prob_z1(eta, &none).unwrap(), 0.0);
        }
    }

    #[test]
    fn stratum_probabilities_match_unsimplified_form() {
        // Pr(Z=1) = (n_p/n_1u) e^η / (1 + (1 + n_p/n_1u) e^η)
        let counts = SampleCounts::new(37, 200, 13).unwrap();
        let r = 37.0 / 13.0;
        for eta in [-6.0, -0.7, 0.0, 0.4, 3.0] {
            let e: f64 = f64::exp(eta);
            let z1 = r * e / (1.0 + (1.0 + r) * e);
            let z0 = (1.0 + e) / (1.0 + (1.0 + r) * e);
            assert!(close(stratum_prob_z1(eta, &counts).unwrap(), z1, 1e-14));
            assert!(close(stratum_prob_z0(eta, &counts).unwrap(), z0, 1e-14));
        }
    }

    #[test]
    fn single_background_point_likelihood() {
        let sample = ObservedSample::from_x1(&[0.0], &[false]).unwrap();
        let counts = SampleCounts { n_p: 0, n_u: 1, n_1u: 1 };
        let ll = log_likelihood(&Beta::zeros(2), &sample, &counts).unwrap();
        assert_eq!(ll, 0.0);

        // n_p = n_1u = 1 with a single background row at xβ = 0.
        let offset = StratumOffset::augmented(&SampleCounts { n_p: 1, n_u: 1, n_1u: 1 }).unwrap();
        let ll = log_likelihood_with_offset(&Beta::zeros(2), &sample, &offset).unwrap();
        assert!(close(ll, (2.0f64 / 3.0).ln(), 1e-15));
    }

    #[test]
    fn likelihood_errors() {
        let sample = ObservedSample::from_x1(&[0.1, 0.2], &[true, false]).unwrap();
        let counts = SampleCounts::new(1, 1, 1).unwrap();
        assert!(matches!(
            log_likelihood(&Beta::zeros(3), &sample, &counts),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        let wrong = SampleCounts::new(2, 1, 1).unwrap();
        assert!(log_likelihood(&Beta::zeros(2), &sample, &wrong).is_err());
        let degenerate = SampleCounts::new(1, 1, 0).unwrap();
        assert!(log_likelihood(&Beta::zeros(2), &sample, &degenerate).is_err());
        assert!(complete_log_likelihood(&Beta::zeros(2), &sample).is_err());
    }

    #[test]
    fn prior_at_mean_with_empty_sample_is_normalising_constant() {
        let prior = PriorSpec::isotropic(2, 0.0, 25.0).unwrap();
        let sample = ObservedSample::new(&[], &[]).unwrap();
        let offset = StratumOffset::known_prevalence(0.5, 1, 0).unwrap();
        let beta = Beta::zeros(1);
        let prior1 = PriorSpec::isotropic(1, 0.0, 25.0).unwrap();
        let lp = log_posterior_with_offset(&beta, &prior1, &sample, &offset).unwrap();
        assert!(close(lp, -0.5 * (2.0 * std::f64::consts::PI * 25.0).ln(), 1e-14));
        assert!(prior.log_density(&Beta::zeros(3)).is_err());
    }

    #[test]
    fn flat_prior_limit() {
        let sample =
            ObservedSample::from_x1(&[-1.0, 0.5, 2.0, 0.3], &[true, true, false, false]).unwrap();
        let counts = SampleCounts::new(2, 2, 1).unwrap();
        let prior = PriorSpec::isotropic(2, 0.0, 1e12).unwrap();
        let a = Beta::new(vec![0.3, -0.2]).unwrap();
        let b = Beta::new(vec![-1.1, 0.9]).unwrap();
        let dpost = log_posterior(&a, &prior, &sample, &counts).unwrap()
            - log_posterior(&b, &prior, &sample, &counts).unwrap();
        let dlik = log_likelihood(&a, &sample, &counts).unwrap()
            - log_likelihood(&b, &sample, &counts).unwrap();
        assert!(close(dpost, dlik, 1e-9));
    }

    #[test]
    fn inclusion_identity_example() {
        let pop = PopulationCounts::new(10_000, 2_000).unwrap();
        let counts = SampleCounts::new(100, 400, 80).unwrap();
        let rates = inclusion_identities(&pop, &counts).unwrap();
        assert!(close(rates.rho0, 0.04, 1e-15));
        assert!(close(rates.rho1, 0.045, 1e-15));
        let eq12 = (180.0 / 320.0) * (0.8 / 0.4);
        assert!(close(rates.ratio(), eq12, 1e-14));

        let all_absent = PopulationCounts::new(100, 0).unwrap();
        assert!(inclusion_identities(&all_absent, &counts).is_err());
    }

    #[test]
    fn invalid_constructors() {
        assert!(Beta::new(vec![]).is_err());
        assert!(Beta::new(vec![f64::NAN]).is_err());
        assert!(PriorSpec::new(vec![0.0], vec![0.0]).is_err());
        assert!(PriorSpec::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SampleCounts::new(1, 3, 4).is_err());
        assert!(ObservedSample::from_x1(&[1.0], &[true, false]).is_err());
        assert!(ObservedSample::new(&[vec![1.0], vec![1.0, 2.0]], &[true, false]).is_err());
        assert!(ObservedSample::from_x1(&[0.0], &[false])
            .unwrap()
            .with_background_labels(vec![true, false])
            .is_err());
    }

    #[test]
    fn clamp_raises_zero_background_count() {
        let c = SampleCounts::new(10, 40, 0).unwrap().clamped();
        assert_eq!(c.n_1u, 1);
        let c = SampleCounts::new(10, 40, 7).unwrap().clamped();
        assert_eq!(c.n_1u, 7);
    }
}
