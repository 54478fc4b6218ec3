//! Descriptor-matrix reduction and standardization.
//!
//! Two filters mirror the usual chemometrics pass: drop invariable (constant)
//! columns, then drop cross-correlated columns at a |r| cutoff. Both are
//! deterministic: columns are scanned left to right and a column is dropped
//! as soon as it correlates at or above the threshold with a column already
//! kept.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DescriptorMatrix, PreprocessStep};
use crate::linalg::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("all {0} descriptor columns were removed as constant")]
    AllColumnsRemoved(usize),
    #[error("descriptor `{0}` is constant; remove constant columns first")]
    ConstantColumn(String),
    #[error("matrix has no rows")]
    Empty,
}

/// Default sample-standard-deviation tolerance for the constant filter.
pub const DEFAULT_CONSTANT_TOL: f64 = 1e-8;
/// Default |r| cutoff for the cross-correlation filter.
pub const DEFAULT_CORRELATION_THRESHOLD: f64 = 0.99;

/// What a preprocessing pass removed and kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub removed_constant: Vec<String>,
    /// (dropped, kept partner, r) for each correlation casualty.
    pub removed_correlated: Vec<(String, String, f64)>,
    pub kept: Vec<String>,
}

impl PreprocessReport {
    fn empty() -> Self {
        PreprocessReport {
            removed_constant: Vec::new(),
            removed_correlated: Vec::new(),
            kept: Vec::new(),
        }
    }

    /// Folds two sequential reports (constant filter then correlation filter)
    /// into one document.
    pub fn merge(constant: &PreprocessReport, correlated: &PreprocessReport) -> Self {
        PreprocessReport {
            removed_constant: constant.removed_constant.clone(),
            removed_correlated: correlated.removed_correlated.clone(),
            kept: correlated.kept.clone(),
        }
    }
}

/// Per-descriptor training moments captured for later reuse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    /// Sample standard deviations (n−1 denominator), all strictly positive.
    pub sds: Vec<f64>,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n−1 denominator.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n as f64 - 1.0)).sqrt()
}

/// Pearson correlation with the sample (n−1) convention.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (n - 1.0) / ((va / (n - 1.0)).sqrt() * (vb / (n - 1.0)).sqrt())
}

/// Removes every column whose sample standard deviation is ≤ `tol`.
pub fn remove_constant_columns(
    m: &DescriptorMatrix,
    tol: f64,
) -> Result<(DescriptorMatrix, PreprocessReport), PreprocessError> {
    assert!(tol >= 0.0, "tolerance must be non-negative");
    if m.n_compounds() == 0 {
        return Err(PreprocessError::Empty);
    }
    let mut report = PreprocessReport::empty();
    let mut keep_idx = Vec::new();
    for c in 0..m.n_descriptors() {
        let col = m.values.column(c);
        if sample_sd(&col) > tol {
            keep_idx.push(c);
            report.kept.push(m.descriptor_names[c].clone());
        } else {
            report.removed_constant.push(m.descriptor_names[c].clone());
        }
    }
    if keep_idx.is_empty() {
        return Err(PreprocessError::AllColumnsRemoved(m.n_descriptors()));
    }
    let mut out = DescriptorMatrix {
        compound_ids: m.compound_ids.clone(),
        descriptor_names: report.kept.clone(),
        values: m.values.select_columns(&keep_idx),
        history: m.history.clone(),
    };
    out.history.push(PreprocessStep::ConstantFilter {
        tol,
        removed: report.removed_constant.len(),
    });
    Ok((out, report))
}

/// Drops columns that correlate at |r| ≥ `threshold` with any column already
/// kept, scanning left to right. The report names the kept partner and the
/// offending r for every dropped column.
pub fn correlation_filter(
    m: &DescriptorMatrix,
    threshold: f64,
) -> Result<(DescriptorMatrix, PreprocessReport), PreprocessError> {
    assert!(
        threshold > 0.0 && threshold <= 1.0,
        "threshold must be in (0, 1]"
    );
    let mut report = PreprocessReport::empty();
    let mut keep_idx: Vec<usize> = Vec::new();
    let columns: Vec<Vec<f64>> = (0..m.n_descriptors()).map(|c| m.values.column(c)).collect();
    for (c, col) in columns.iter().enumerate() {
        if sample_sd(col) == 0.0 {
            return Err(PreprocessError::ConstantColumn(
                m.descriptor_names[c].clone(),
            ));
        }
        let mut dropped = false;
        for &k in &keep_idx {
            let r = pearson(&columns[k], col);
            if r.abs() >= threshold {
                report.removed_correlated.push((
                    m.descriptor_names[c].clone(),
                    m.descriptor_names[k].clone(),
                    r,
                ));
                dropped = true;
                break;
            }
        }
        if !dropped {
            keep_idx.push(c);
            report.kept.push(m.descriptor_names[c].clone());
        }
    }
    let mut out = DescriptorMatrix {
        compound_ids: m.compound_ids.clone(),
        descriptor_names: report.kept.clone(),
        values: m.values.select_columns(&keep_idx),
        history: m.history.clone(),
    };
    out.history.push(PreprocessStep::CorrelationFilter {
        threshold,
        removed: report.removed_correlated.len(),
    });
    Ok((out, report))
}

/// Fits per-column moments. Errors if any column is effectively constant.
pub fn fit_standardization(
    values: &Matrix,
    names: &[String],
) -> Result<Standardization, PreprocessError> {
    let mut means = Vec::with_capacity(values.cols());
    let mut sds = Vec::with_capacity(values.cols());
    for c in 0..values.cols() {
        let col = values.column(c);
        let sd = sample_sd(&col);
        if sd <= 0.0 {
            let name = names
                .get(c)
                .cloned()
                .unwrap_or_else(|| format!("column {c}"));
            return Err(PreprocessError::ConstantColumn(name));
        }
        means.push(mean(&col));
        sds.push(sd);
    }
    Ok(Standardization { means, sds })
}

/// Applies previously fitted moments: (x − mean) / sd per column.
pub fn apply_standardization(values: &Matrix, std: &Standardization) -> Matrix {
    let mut out = Matrix::zeros(values.rows(), values.cols());
    for r in 0..values.rows() {
        for c in 0..values.cols() {
            out.set(r, c, (values.get(r, c) - std.means[c]) / std.sds[c]);
        }
    }
    out
}

/// Centers and scales each column to mean 0 and sample sd 1.
pub fn standardize(
    m: &DescriptorMatrix,
) -> Result<(DescriptorMatrix, Standardization), PreprocessError> {
    let std = fit_standardization(&m.values, &m.descriptor_names)?;
    let mut out = DescriptorMatrix {
        compound_ids: m.compound_ids.clone(),
        descriptor_names: m.descriptor_names.clone(),
        values: apply_standardization(&m.values, &std),
        history: m.history.clone(),
    };
    out.history.push(PreprocessStep::Standardize);
    Ok((out, std))
}
