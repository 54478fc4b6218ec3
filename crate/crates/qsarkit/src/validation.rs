//! Model validation battery: r², leave-one-out q², external pred_r²,
//! F-test, degrees of freedom, Y-randomization, and the predictivity gate
//! (r² > 0.6, q² > 0.6, pred_r² > 0.5).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dataset;
use crate::regression::{self, FitError, FittedModel, Method, ModelSpec};
use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("observed values are constant")]
    ConstantObservations,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("r2 {0} is out of range [0, 1)")]
    R2OutOfRange(f64),
    #[error("degrees of freedom n={n}, components={c} are non-positive")]
    NonPositiveDf { n: usize, c: usize },
    #[error("prediction failed: {0}")]
    Predict(String),
}

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("unknown descriptor: {0}")]
    UnknownDescriptor(String),
    #[error("leave-one-out needs at least 3 training rows, got {0}")]
    TooFewRows(usize),
    #[error("leave-one-out fold {index} failed: {source}")]
    Fold { index: usize, source: FitError },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("fit failed: {0}")]
    Fit(#[from] FitError),
}

#[derive(Debug, Error)]
pub enum RandomizationError {
    #[error("randomization needs at least 10 iterations, got {0}")]
    TooFewIterations(usize),
    #[error("unscrambled model failed to validate: {0}")]
    Baseline(String),
    #[error("{failed} of {total} scrambled fits failed (more than half)")]
    TooManyFailures { failed: usize, total: usize },
}

/// The full per-model statistics set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_train: usize,
    pub n_test: usize,
    /// Descriptor count.
    pub k: usize,
    /// Latent-component count (equals k for MLR).
    pub n_components: usize,
    /// n_train − n_components − 1.
    pub df: usize,
    pub r2: f64,
    pub q2: f64,
    pub f_test: f64,
    pub r2_se: f64,
    pub q2_se: f64,
    /// Absent when there is no test set.
    pub pred_r2: Option<f64>,
    pub pred_r2_se: Option<f64>,
}

/// Outcome of the Y-scrambling test for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizationResult {
    pub n_iterations: usize,
    pub n_failed: usize,
    pub r2_samples: Vec<f64>,
    pub q2_samples: Vec<f64>,
    pub best_ran_r2: f64,
    pub best_ran_q2: f64,
    pub mu_r2: f64,
    pub sigma_r2: f64,
    pub mu_q2: f64,
    pub sigma_q2: f64,
    pub z_score_r2: f64,
    pub z_score_q2: f64,
    /// Smallest significance level from {0.001, 0.01, 0.05, 0.1} exceeding
    /// the one-tailed p-value, `None` when not significant at 0.1.
    pub alpha_r2: Option<f64>,
    pub alpha_q2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateCriterion {
    R2,
    Q2,
    PredR2,
}

/// Verdict of the predictivity gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateVerdict {
    pub passes: bool,
    pub failed_criteria: Vec<GateCriterion>,
}

/// 1 − SSE/SST with SST about the mean of the observations.
pub fn r_squared(y_obs: &[f64], y_pred: &[f64]) -> Result<f64, MetricError> {
    if y_obs.len() < 2 {
        return Err(MetricError::TooFewPoints {
            needed: 2,
            got: y_obs.len(),
        });
    }
    assert_eq!(y_obs.len(), y_pred.len(), "length mismatch");
    let mean = crate::preprocess::mean(y_obs);
    let sst: f64 = y_obs.iter().map(|o| (o - mean) * (o - mean)).sum();
    if sst == 0.0 {
        return Err(MetricError::ConstantObservations);
    }
    let sse: f64 = y_obs
        .iter()
        .zip(y_pred)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    Ok(1.0 - sse / sst)
}

/// Leave-one-out cross-validation output.
#[derive(Debug, Clone, PartialEq)]
pub struct LooResult {
    pub q2: f64,
    pub q2_se: f64,
    /// Per-row out-of-fold predictions, aligned to the dataset rows.
    pub predictions: Vec<f64>,
}

fn effective_components(spec: &ModelSpec) -> usize {
    match spec.method {
        Method::Mlr => spec.descriptors.len(),
        _ => spec.n_components,
    }
}

/// Leave-one-out q²: refit on n−1 rows (re-standardizing per fold), predict
/// the held-out row, and score 1 − PRESS/SST with the mean taken over the
/// full training set.
pub fn loo_q2(ds: &Dataset, spec: &ModelSpec) -> Result<LooResult, ValidationError> {
    let n = ds.n_compounds();
    if n < 3 {
        return Err(ValidationError::TooFewRows(n));
    }
    let view = ds
        .select_descriptors(&spec.descriptors)
        .map_err(ValidationError::UnknownDescriptor)?;

    let mut predictions = Vec::with_capacity(n);
    for held_out in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&r| r != held_out).collect();
        let fold = view.subset_rows(&keep);
        let model =
            regression::fit_dataset(&fold, spec.method, spec.n_components).map_err(|source| {
                ValidationError::Fold {
                    index: held_out,
                    source,
                }
            })?;
        let pred = model
            .predict_slice(view.matrix.values.row(held_out))
            .map_err(|e| ValidationError::Metric(MetricError::Predict(e.to_string())))?;
        predictions.push(pred);
    }

    let mean = crate::preprocess::mean(&view.activity);
    let sst: f64 = view.activity.iter().map(|o| (o - mean) * (o - mean)).sum();
    if sst == 0.0 {
        return Err(ValidationError::Metric(MetricError::ConstantObservations));
    }
    let press: f64 = view
        .activity
        .iter()
        .zip(&predictions)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    let c = effective_components(spec);
    let df = degrees_of_freedom(n, c)?;
    Ok(LooResult {
        q2: 1.0 - press / sst,
        q2_se: (press / df as f64).sqrt(),
        predictions,
    })
}

/// External predictivity: 1 − Σ(ŷ_test − y_test)² / Σ(y_test − ȳ_train)²,
/// plus its standard error √(Σ(ŷ_test − y_test)²/n_test).
pub fn pred_r2(
    model: &FittedModel,
    test: &Dataset,
    y_train_mean: f64,
) -> Result<(f64, f64), MetricError> {
    let n = test.n_compounds();
    if n == 0 {
        return Err(MetricError::TooFewPoints { needed: 1, got: 0 });
    }
    let preds = model
        .predict_matrix(&test.matrix)
        .map_err(|e| MetricError::Predict(e.to_string()))?;
    let sse: f64 = test
        .activity
        .iter()
        .zip(&preds)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    let denom: f64 = test
        .activity
        .iter()
        .map(|o| (o - y_train_mean) * (o - y_train_mean))
        .sum();
    if denom == 0.0 {
        return Err(MetricError::ZeroDenominator);
    }
    Ok((1.0 - sse / denom, (sse / n as f64).sqrt()))
}

/// Fisher statistic F = (r²/c) / ((1 − r²)/df).
pub fn f_test(r2: f64, n_components: usize, df: usize) -> Result<f64, MetricError> {
    if !(0.0..1.0).contains(&r2) {
        return Err(MetricError::R2OutOfRange(r2));
    }
    if n_components == 0 || df == 0 {
        return Err(MetricError::NonPositiveDf {
            n: df,
            c: n_components,
        });
    }
    Ok((r2 / n_components as f64) / ((1.0 - r2) / df as f64))
}

/// n_train − n_components − 1; for MLR the component count is the
/// descriptor count.
pub fn degrees_of_freedom(n_train: usize, n_components: usize) -> Result<usize, MetricError> {
    if n_train <= n_components + 1 {
        return Err(MetricError::NonPositiveDf {
            n: n_train,
            c: n_components,
        });
    }
    Ok(n_train - n_components - 1)
}

/// Abramowitz–Stegun rational approximation of erf, |error| < 1.5e−7.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

const ALPHA_LEVELS: [f64; 4] = [0.001, 0.01, 0.05, 0.1];

/// Smallest conventional significance level exceeding the one-tailed
/// p-value of `z`, or `None` when p ≥ 0.1.
pub fn alpha_level(z: f64) -> Option<f64> {
    let p = 1.0 - normal_cdf(z);
    ALPHA_LEVELS.iter().copied().find(|&level| p < level)
}

fn mean_sd(samples: &[f64]) -> (f64, f64) {
    let mu = crate::preprocess::mean(samples);
    let sd = crate::preprocess::sample_sd(samples);
    (mu, sd)
}

/// Aggregates scrambled samples against the unscrambled statistic `h`.
/// Errors when more than half the iterations failed.
fn summarize_randomization(
    h_r2: f64,
    h_q2: f64,
    r2_samples: Vec<f64>,
    q2_samples: Vec<f64>,
    n_iterations: usize,
) -> Result<RandomizationResult, RandomizationError> {
    let n_failed = n_iterations - r2_samples.len();
    if n_failed * 2 > n_iterations {
        return Err(RandomizationError::TooManyFailures {
            failed: n_failed,
            total: n_iterations,
        });
    }
    let (mu_r2, sigma_r2) = mean_sd(&r2_samples);
    let (mu_q2, sigma_q2) = mean_sd(&q2_samples);
    let z_score_r2 = (h_r2 - mu_r2) / sigma_r2;
    let z_score_q2 = (h_q2 - mu_q2) / sigma_q2;
    let best = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RandomizationResult {
        n_iterations,
        n_failed,
        best_ran_r2: best(&r2_samples),
        best_ran_q2: best(&q2_samples),
        r2_samples,
        q2_samples,
        mu_r2,
        sigma_r2,
        mu_q2,
        sigma_q2,
        z_score_r2,
        z_score_q2,
        alpha_r2: alpha_level(z_score_r2),
        alpha_q2: alpha_level(z_score_q2),
    })
}

fn scrambled_scores(ds: &Dataset, spec: &ModelSpec) -> Result<(f64, f64), ValidationError> {
    let view = ds
        .select_descriptors(&spec.descriptors)
        .map_err(ValidationError::UnknownDescriptor)?;
    let model = regression::fit_dataset(&view, spec.method, spec.n_components)?;
    let preds = model
        .predict_matrix(&view.matrix)
        .map_err(|e| ValidationError::Metric(MetricError::Predict(e.to_string())))?;
    let r2 = r_squared(&view.activity, &preds)?;
    let loo = loo_q2(ds, spec)?;
    Ok((r2, loo.q2))
}

/// Y-scrambling with an injectable permutation source; the public entry
/// point seeds it per iteration, tests can force the identity.
pub(crate) fn y_randomization_with<F>(
    ds: &Dataset,
    spec: &ModelSpec,
    n_iterations: usize,
    mut permute: F,
) -> Result<RandomizationResult, RandomizationError>
where
    F: FnMut(u64, usize) -> Vec<usize>,
{
    if n_iterations < 10 {
        return Err(RandomizationError::TooFewIterations(n_iterations));
    }
    let (h_r2, h_q2) =
        scrambled_scores(ds, spec).map_err(|e| RandomizationError::Baseline(e.to_string()))?;

    let n = ds.n_compounds();
    let mut r2_samples = Vec::with_capacity(n_iterations);
    let mut q2_samples = Vec::with_capacity(n_iterations);
    for iteration in 0..n_iterations {
        let perm = permute(iteration as u64, n);
        debug_assert_eq!(perm.len(), n);
        let scrambled = Dataset::new(
            ds.matrix.clone(),
            perm.iter().map(|&i| ds.activity[i]).collect(),
        );
        match scrambled_scores(&scrambled, spec) {
            Ok((r2, q2)) => {
                r2_samples.push(r2);
                q2_samples.push(q2);
            }
            Err(_) => {} // failed iteration, excluded and counted
        }
    }
    summarize_randomization(h_r2, h_q2, r2_samples, q2_samples, n_iterations)
}

/// Y-randomization: refit the same spec on permuted activities and compare
/// the real r²/q² against the scrambled distribution via Z = (h − µ)/σ.
pub fn y_randomization(
    ds: &Dataset,
    spec: &ModelSpec,
    n_iterations: usize,
    rng_seed: u64,
) -> Result<RandomizationResult, RandomizationError> {
    y_randomization_with(ds, spec, n_iterations, |iteration, n| {
        let mut rng = rng::seeded(rng::iteration_seed(rng_seed, iteration));
        rng::permutation(n, &mut rng)
    })
}

/// Predictivity gate: passes iff r² > 0.6, q² > 0.6 and pred_r² > 0.5,
/// all strict.
pub fn evaluate_gate(report: &ValidationReport) -> GateVerdict {
    let mut failed = Vec::new();
    if !(report.r2 > 0.6) {
        failed.push(GateCriterion::R2);
    }
    if !(report.q2 > 0.6) {
        failed.push(GateCriterion::Q2);
    }
    match report.pred_r2 {
        Some(p) if p > 0.5 => {}
        _ => failed.push(GateCriterion::PredR2),
    }
    GateVerdict {
        passes: failed.is_empty(),
        failed_criteria: failed,
    }
}

/// Runs the internal/external battery for a fitted model: train r², LOO q²,
/// pred_r² against the test set (when present), F-test and the se's.
pub fn validate_model(
    train: &Dataset,
    test: Option<&Dataset>,
    model: &FittedModel,
) -> Result<ValidationReport, ValidationError> {
    let spec = &model.spec;
    let view = train
        .select_descriptors(&spec.descriptors)
        .map_err(ValidationError::UnknownDescriptor)?;
    let preds = model
        .predict_matrix(&view.matrix)
        .map_err(|e| ValidationError::Metric(MetricError::Predict(e.to_string())))?;
    let r2 = r_squared(&view.activity, &preds)?;
    let n_train = view.n_compounds();
    let c = effective_components(spec);
    let df = degrees_of_freedom(n_train, c)?;

    let sse: f64 = view
        .activity
        .iter()
        .zip(&preds)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    let r2_se = (sse / df as f64).sqrt();

    let loo = loo_q2(train, spec)?;
    let f = f_test(r2, c, df)?;

    let y_train_mean = crate::preprocess::mean(&view.activity);
    let (pred, pred_se) = match test {
        Some(t) if t.n_compounds() > 0 => {
            let (p, se) = pred_r2(model, t, y_train_mean)?;
            (Some(p), Some(se))
        }
        _ => (None, None),
    };

    Ok(ValidationReport {
        n_train,
        n_test: test.map_or(0, Dataset::n_compounds),
        k: spec.descriptors.len(),
        n_components: c,
        df,
        r2,
        q2: loo.q2,
        f_test: f,
        r2_se,
        q2_se: loo.q2_se,
        pred_r2: pred,
        pred_r2_se: pred_se,
    })
}
