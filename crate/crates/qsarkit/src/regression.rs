//! Regression backends: multiple linear regression, principal component
//! regression, and partial least squares.
//!
//! All three fit on internally standardized descriptors and report
//! coefficients back in original descriptor units, so a fitted model is a
//! plain `intercept + Σ bᵢ·xᵢ` expression regardless of method. PCR projects
//! onto leading principal components of the descriptor correlation matrix;
//! PLS extracts latent components from the descriptor/activity covariance
//! (NIPALS with X-side deflation, closed form for a single response).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dataset, DescriptorMatrix};
use crate::linalg::{self, Matrix};
use crate::preprocess::{apply_standardization, fit_standardization, Standardization};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("no descriptors to fit")]
    EmptyDescriptors,
    #[error("{n} samples cannot support {p} descriptors (need n > p + 1)")]
    TooFewSamples { n: usize, p: usize },
    #[error("descriptor `{0}` is constant on the training rows")]
    ConstantDescriptor(String),
    #[error("design is rank deficient at `{0}`")]
    RankDeficient(String),
    #[error("{requested} components exceed the design rank {rank}")]
    TooManyComponents { requested: usize, rank: usize },
    #[error("latent extraction collapsed: requested {requested} components, only {achievable} achievable")]
    Collapsed { requested: usize, achievable: usize },
    #[error("component count must be at least 1")]
    ZeroComponents,
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("input is missing descriptor `{0}`")]
    MissingDescriptor(String),
    #[error("input row has {got} values, model expects {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum ContributionError {
    #[error("model carries no training standardization")]
    NoStandardization,
    #[error("all standardized coefficients are zero")]
    AllZero,
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("model json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model has {coefficients} coefficients for {descriptors} descriptors")]
    CoefficientMismatch {
        coefficients: usize,
        descriptors: usize,
    },
    #[error("model field {field} is not finite")]
    NonFinite { field: String },
    #[error("model has no descriptors")]
    Empty,
    #[error("n_components {n_components} out of range 1..={max}")]
    BadComponents { n_components: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Mlr,
    Pcr,
    Pls,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Mlr => write!(f, "MLR"),
            Method::Pcr => write!(f, "PCR"),
            Method::Pls => write!(f, "PLS"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "MLR" => Ok(Method::Mlr),
            "PCR" => Ok(Method::Pcr),
            "PLS" => Ok(Method::Pls),
            other => Err(format!(
                "unknown method `{other}` (expected MLR, PCR or PLS)"
            )),
        }
    }
}

/// What to fit: method, descriptor subset, and latent-component count
/// (for MLR the component count always equals the descriptor count).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub method: Method,
    pub descriptors: Vec<String>,
    pub n_components: usize,
}

/// A fitted linear expression in original descriptor units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    #[serde(flatten)]
    pub spec: ModelSpec,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Training-set moments; absent on externally loaded models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardization: Option<Standardization>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub train_ids: Vec<String>,
}

/// Signed per-descriptor percentages whose absolute values sum to 100.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionBreakdown {
    pub entries: Vec<ContributionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionEntry {
    pub descriptor: String,
    pub percentage: f64,
}

struct StandardizedFit {
    std: Standardization,
    xs: Matrix,
    y_mean: f64,
}

fn standardize_for_fit(
    x: &Matrix,
    y: &[f64],
    names: &[String],
) -> Result<StandardizedFit, FitError> {
    let std = fit_standardization(x, names).map_err(|e| match e {
        crate::preprocess::PreprocessError::ConstantColumn(name) => {
            FitError::ConstantDescriptor(name)
        }
        other => FitError::RankDeficient(other.to_string()),
    })?;
    Ok(StandardizedFit {
        xs: apply_standardization(x, &std),
        std,
        y_mean: crate::preprocess::mean(y),
    })
}

/// Maps slopes on standardized columns back to original units and the
/// matching intercept.
fn back_map(slopes_std: &[f64], intercept_std: f64, std: &Standardization) -> (Vec<f64>, f64) {
    let coefficients: Vec<f64> = slopes_std
        .iter()
        .zip(&std.sds)
        .map(|(b, sd)| b / sd)
        .collect();
    let intercept = intercept_std
        - coefficients
            .iter()
            .zip(&std.means)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    (coefficients, intercept)
}

fn design_with_intercept(xs: &Matrix) -> Matrix {
    let n = xs.rows();
    let p = xs.cols();
    let mut d = Matrix::zeros(n, p + 1);
    for r in 0..n {
        for c in 0..p {
            d.set(r, c, xs.get(r, c));
        }
        d.set(r, p, 1.0);
    }
    d
}

fn name_for_column(names: &[String], col: usize) -> String {
    names
        .get(col)
        .cloned()
        .unwrap_or_else(|| "intercept".to_string())
}

/// Ordinary least squares of pIC50 on the descriptor columns.
pub fn fit_mlr(
    x: &Matrix,
    y: &[f64],
    names: &[String],
    train_ids: &[String],
) -> Result<FittedModel, FitError> {
    let n = x.rows();
    let p = x.cols();
    if p == 0 {
        return Err(FitError::EmptyDescriptors);
    }
    if n <= p + 1 {
        return Err(FitError::TooFewSamples { n, p });
    }
    let sf = standardize_for_fit(x, y, names)?;
    let design = design_with_intercept(&sf.xs);
    let sol = linalg::lstsq(&design, y).map_err(|e| match e {
        linalg::LinalgError::RankDeficient { column } => {
            FitError::RankDeficient(name_for_column(names, column))
        }
        other => FitError::RankDeficient(other.to_string()),
    })?;
    let (coefficients, intercept) = back_map(&sol[..p], sol[p], &sf.std);
    Ok(FittedModel {
        spec: ModelSpec {
            method: Method::Mlr,
            descriptors: names.to_vec(),
            n_components: p,
        },
        coefficients,
        intercept,
        standardization: Some(sf.std),
        train_ids: train_ids.to_vec(),
    })
}

/// Rank of a correlation matrix, counting eigenvalues above a relative floor.
fn effective_rank(eigenvalues: &[f64]) -> usize {
    let max = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    if max <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&l| l > max * 1e-10).count()
}

/// Numerical rank of the column-centered design, an upper bound on how many
/// latent components PCR or PLS can extract.
pub fn design_rank(x: &Matrix) -> Result<usize, FitError> {
    let n = x.rows();
    let p = x.cols();
    if n == 0 || p == 0 {
        return Ok(0);
    }
    let mut centered = x.clone();
    for c in 0..p {
        let m = crate::preprocess::mean(&x.column(c));
        for r in 0..n {
            centered.set(r, c, x.get(r, c) - m);
        }
    }
    let gram = centered.gram();
    let (eigenvalues, _) =
        linalg::sym_eigen(&gram).map_err(|e| FitError::RankDeficient(e.to_string()))?;
    Ok(effective_rank(&eigenvalues))
}

/// Principal component regression: project standardized descriptors onto the
/// leading `n_components` principal axes (by explained variance), regress the
/// activity on the scores, and fold the loadings back into per-descriptor
/// coefficients.
pub fn fit_pcr(
    x: &Matrix,
    y: &[f64],
    names: &[String],
    train_ids: &[String],
    n_components: usize,
) -> Result<FittedModel, FitError> {
    let n = x.rows();
    let p = x.cols();
    if p == 0 {
        return Err(FitError::EmptyDescriptors);
    }
    if n <= p + 1 {
        return Err(FitError::TooFewSamples { n, p });
    }
    if n_components == 0 {
        return Err(FitError::ZeroComponents);
    }
    let sf = standardize_for_fit(x, y, names)?;

    let mut corr = sf.xs.gram();
    let scale = 1.0 / (n as f64 - 1.0);
    for i in 0..p {
        for j in 0..p {
            corr.set(i, j, corr.get(i, j) * scale);
        }
    }
    let (eigenvalues, vectors) =
        linalg::sym_eigen(&corr).map_err(|e| FitError::RankDeficient(e.to_string()))?;
    let rank = effective_rank(&eigenvalues);
    if n_components > rank {
        return Err(FitError::TooManyComponents {
            requested: n_components,
            rank,
        });
    }

    let axes = vectors.select_columns(&(0..n_components).collect::<Vec<_>>());
    let scores = sf.xs.matmul(&axes);
    let design = design_with_intercept(&scores);
    let sol = linalg::lstsq(&design, y).map_err(|e| FitError::RankDeficient(e.to_string()))?;

    // Fold score-space slopes through the loadings: b_std = V_c γ.
    let gamma = &sol[..n_components];
    let mut slopes_std = vec![0.0; p];
    for (i, slope) in slopes_std.iter_mut().enumerate() {
        for (a, g) in gamma.iter().enumerate() {
            *slope += axes.get(i, a) * g;
        }
    }
    let (coefficients, intercept) = back_map(&slopes_std, sol[n_components], &sf.std);
    Ok(FittedModel {
        spec: ModelSpec {
            method: Method::Pcr,
            descriptors: names.to_vec(),
            n_components,
        },
        coefficients,
        intercept,
        standardization: Some(sf.std),
        train_ids: train_ids.to_vec(),
    })
}

/// Partial least squares with a single response.
///
/// Components are extracted NIPALS-style: the weight vector comes from the
/// descriptor/activity covariance, scores and loadings follow, and the
/// descriptor block is deflated. For one response the weight vector is closed
/// form, so no inner iteration is needed.
pub fn fit_pls(
    x: &Matrix,
    y: &[f64],
    names: &[String],
    train_ids: &[String],
    n_components: usize,
) -> Result<FittedModel, FitError> {
    let n = x.rows();
    let p = x.cols();
    if p == 0 {
        return Err(FitError::EmptyDescriptors);
    }
    if n < 3 {
        return Err(FitError::TooFewSamples { n, p });
    }
    if n_components == 0 {
        return Err(FitError::ZeroComponents);
    }
    if n_components > p {
        return Err(FitError::TooManyComponents {
            requested: n_components,
            rank: p,
        });
    }
    let sf = standardize_for_fit(x, y, names)?;
    let f: Vec<f64> = y.iter().map(|v| v - sf.y_mean).collect();

    let mut residual = sf.xs.clone();
    // Collapse threshold, relative to the initial block scale.
    let x_scale: f64 = (0..n)
        .map(|r| linalg::dot(residual.row(r), residual.row(r)))
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let collapse_tol = 1e-12 * x_scale;

    let mut weights: Vec<Vec<f64>> = Vec::with_capacity(n_components);
    let mut loadings: Vec<Vec<f64>> = Vec::with_capacity(n_components);
    let mut q_coeffs: Vec<f64> = Vec::with_capacity(n_components);

    for a in 0..n_components {
        let mut w = residual.tr_mat_vec(&f);
        let wnorm = linalg::norm2(&w);
        if wnorm <= collapse_tol {
            return Err(FitError::Collapsed {
                requested: n_components,
                achievable: a,
            });
        }
        for v in w.iter_mut() {
            *v /= wnorm;
        }
        let t = residual.mat_vec(&w);
        let tt = linalg::dot(&t, &t);
        if tt <= collapse_tol * collapse_tol {
            return Err(FitError::Collapsed {
                requested: n_components,
                achievable: a,
            });
        }
        let mut p_load = residual.tr_mat_vec(&t);
        for v in p_load.iter_mut() {
            *v /= tt;
        }
        let q = linalg::dot(&f, &t) / tt;

        for r in 0..n {
            for c in 0..p {
                let val = residual.get(r, c) - t[r] * p_load[c];
                residual.set(r, c, val);
            }
        }
        weights.push(w);
        loadings.push(p_load);
        q_coeffs.push(q);
    }

    // b_std = W (PᵀW)⁻¹ q
    let c = n_components;
    let mut ptw = Matrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            ptw.set(i, j, linalg::dot(&loadings[i], &weights[j]));
        }
    }
    let alpha = linalg::solve_square(&ptw, &q_coeffs)
        .map_err(|e| FitError::RankDeficient(e.to_string()))?;
    let mut slopes_std = vec![0.0; p];
    for (w, a) in weights.iter().zip(&alpha) {
        for (s, wi) in slopes_std.iter_mut().zip(w) {
            *s += a * wi;
        }
    }

    let intercept_std = sf.y_mean;
    let (coefficients, intercept) = back_map(&slopes_std, intercept_std, &sf.std);
    Ok(FittedModel {
        spec: ModelSpec {
            method: Method::Pls,
            descriptors: names.to_vec(),
            n_components,
        },
        coefficients,
        intercept,
        standardization: Some(sf.std),
        train_ids: train_ids.to_vec(),
    })
}

/// Fits `method` on the given columns; `n_components` is ignored for MLR.
pub fn fit(
    method: Method,
    x: &Matrix,
    y: &[f64],
    names: &[String],
    train_ids: &[String],
    n_components: usize,
) -> Result<FittedModel, FitError> {
    match method {
        Method::Mlr => fit_mlr(x, y, names, train_ids),
        Method::Pcr => fit_pcr(x, y, names, train_ids, n_components),
        Method::Pls => fit_pls(x, y, names, train_ids, n_components),
    }
}

/// Fits on a dataset already restricted to the wanted descriptors.
pub fn fit_dataset(
    ds: &Dataset,
    method: Method,
    n_components: usize,
) -> Result<FittedModel, FitError> {
    fit(
        method,
        &ds.matrix.values,
        &ds.activity,
        &ds.matrix.descriptor_names,
        &ds.matrix.compound_ids,
        n_components,
    )
}

/// Picks the component count in `1..=max_c` that maximizes LOO q²,
/// breaking ties toward the smaller count.
pub fn choose_components(
    ds: &Dataset,
    method: Method,
    max_c: usize,
) -> Result<usize, crate::validation::ValidationError> {
    assert!(max_c >= 1, "max_c must be at least 1");
    let mut best_c = 1;
    let mut best_q2 = f64::NEG_INFINITY;
    for c in 1..=max_c {
        let spec = ModelSpec {
            method,
            descriptors: ds.matrix.descriptor_names.clone(),
            n_components: c,
        };
        let loo = crate::validation::loo_q2(ds, &spec)?;
        if loo.q2 > best_q2 {
            best_q2 = loo.q2;
            best_c = c;
        }
    }
    Ok(best_c)
}

impl FittedModel {
    /// Checks the structural invariants after deserialization.
    pub fn validate(&self) -> Result<(), ModelIoError> {
        if self.spec.descriptors.is_empty() {
            return Err(ModelIoError::Empty);
        }
        if self.coefficients.len() != self.spec.descriptors.len() {
            return Err(ModelIoError::CoefficientMismatch {
                coefficients: self.coefficients.len(),
                descriptors: self.spec.descriptors.len(),
            });
        }
        if self.spec.n_components == 0 || self.spec.n_components > self.spec.descriptors.len() {
            return Err(ModelIoError::BadComponents {
                n_components: self.spec.n_components,
                max: self.spec.descriptors.len(),
            });
        }
        if !self.intercept.is_finite() {
            return Err(ModelIoError::NonFinite {
                field: "intercept".into(),
            });
        }
        for (i, c) in self.coefficients.iter().enumerate() {
            if !c.is_finite() {
                return Err(ModelIoError::NonFinite {
                    field: format!("coefficients[{i}]"),
                });
            }
        }
        if let Some(std) = &self.standardization {
            if std.means.len() != self.spec.descriptors.len()
                || std.sds.len() != self.spec.descriptors.len()
            {
                return Err(ModelIoError::CoefficientMismatch {
                    coefficients: std.means.len(),
                    descriptors: self.spec.descriptors.len(),
                });
            }
            for (i, (m, s)) in std.means.iter().zip(&std.sds).enumerate() {
                if !m.is_finite() || !s.is_finite() || *s <= 0.0 {
                    return Err(ModelIoError::NonFinite {
                        field: format!("standardization[{i}]"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Loads a model from its JSON form; external models need only
    /// `method`, `descriptors`, `coefficients`, `intercept`, `n_components`.
    pub fn from_json(bytes: &[u8]) -> Result<FittedModel, ModelIoError> {
        let model: FittedModel = serde_json::from_slice(bytes)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    /// intercept + Σ bᵢ·xᵢ over a row aligned to the model's descriptors.
    pub fn predict_slice(&self, x: &[f64]) -> Result<f64, PredictError> {
        if x.len() != self.coefficients.len() {
            return Err(PredictError::LengthMismatch {
                got: x.len(),
                expected: self.coefficients.len(),
            });
        }
        Ok(self.intercept + linalg::dot(&self.coefficients, x))
    }

    /// Predicts from a named descriptor map.
    pub fn predict_map(&self, x: &BTreeMap<String, f64>) -> Result<f64, PredictError> {
        let mut row = Vec::with_capacity(self.spec.descriptors.len());
        for name in &self.spec.descriptors {
            match x.get(name) {
                Some(v) => row.push(*v),
                None => return Err(PredictError::MissingDescriptor(name.clone())),
            }
        }
        self.predict_slice(&row)
    }

    /// Predicts every row of a descriptor matrix, resolving columns by name.
    pub fn predict_matrix(&self, m: &DescriptorMatrix) -> Result<Vec<f64>, PredictError> {
        let mut cols = Vec::with_capacity(self.spec.descriptors.len());
        for name in &self.spec.descriptors {
            match m.column_index(name) {
                Some(c) => cols.push(c),
                None => return Err(PredictError::MissingDescriptor(name.clone())),
            }
        }
        let mut out = Vec::with_capacity(m.n_compounds());
        for r in 0..m.n_compounds() {
            let row = m.values.row(r);
            let mut v = self.intercept;
            for (b, &c) in self.coefficients.iter().zip(&cols) {
                v += b * row[c];
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Signed percentage contribution of each descriptor:
    /// 100·(bᵢ·sᵢ)/Σ|bⱼ·sⱼ| with sᵢ the training-set sample sd.
    pub fn contributions(&self) -> Result<ContributionBreakdown, ContributionError> {
        let std = self
            .standardization
            .as_ref()
            .ok_or(ContributionError::NoStandardization)?;
        let weighted: Vec<f64> = self
            .coefficients
            .iter()
            .zip(&std.sds)
            .map(|(b, s)| b * s)
            .collect();
        let total: f64 = weighted.iter().map(|v| v.abs()).sum();
        if total == 0.0 {
            return Err(ContributionError::AllZero);
        }
        let entries = self
            .spec
            .descriptors
            .iter()
            .zip(&weighted)
            .map(|(name, w)| ContributionEntry {
                descriptor: name.clone(),
                percentage: 100.0 * w / total,
            })
            .collect();
        Ok(ContributionBreakdown { entries })
    }
}

impl ContributionBreakdown {
    /// Σ|percentageᵢ|, which is 100 up to rounding.
    pub fn absolute_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.percentage.abs()).sum()
    }
}
