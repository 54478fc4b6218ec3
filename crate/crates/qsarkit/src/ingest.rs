//! Activity and descriptor table loading.
//!
//! The toolkit consumes two CSV tables: an activity table (`id,ic50` and/or
//! `id,pic50`, IC50 in µM) and a descriptor table (`id,<name1>,...,<nameK>`).
//! Loading joins them by compound id, transforms IC50 into pIC50 where
//! needed, and yields a [`Dataset`] whose rows follow the activity-file
//! order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("ic50 must be positive, got {0}")]
    NonPositiveIc50(f64),
    #[error("ic50 must be finite, got {0}")]
    NonFiniteIc50(f64),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv syntax error: {0}")]
    Csv(String),
    #[error("{table} table is empty")]
    EmptyTable { table: &'static str },
    #[error("{table} table is missing required column `{column}`")]
    MissingColumn { table: &'static str, column: String },
    #[error("activity table has unsupported column `{column}` (expected id, ic50, pic50)")]
    UnknownColumn { column: String },
    #[error("duplicate {table} column name `{name}`")]
    DuplicateColumn { table: &'static str, name: String },
    #[error("duplicate compound id `{id}` in {table} table")]
    DuplicateId { table: &'static str, id: String },
    #[error("empty compound id at {table} row {row}")]
    EmptyId { table: &'static str, row: usize },
    #[error("non-numeric value `{value}` at row {row}, column `{column}`")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("non-finite value at row {row}, column `{column}`")]
    NonFinite { row: usize, column: String },
    #[error("row {row} has {got} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("activity row {row} (id `{id}`): {source}")]
    Domain {
        row: usize,
        id: String,
        source: DomainError,
    },
    #[error("activity row {row} (id `{id}`) needs an ic50 or pic50 value")]
    MissingActivity { row: usize, id: String },
    #[error(
        "id `{id}`: pic50 {pic50} disagrees with ic50-derived value {computed} by more than 0.005"
    )]
    InconsistentActivity {
        id: String,
        pic50: f64,
        computed: f64,
    },
    #[error("compound id `{id}` appears in the activity table but not in the descriptor table")]
    MissingInDescriptors { id: String },
    #[error("compound id `{id}` appears in the descriptor table but not in the activity table")]
    MissingInActivity { id: String },
}

/// One compound's identity and response value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundRecord {
    pub id: String,
    /// IC50 in µM, if the activity table supplied one.
    pub ic50: Option<f64>,
    /// −log10(molar) response, either supplied or derived from IC50.
    pub pic50: f64,
}

/// Provenance of the preprocessing steps already applied to a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PreprocessStep {
    ConstantFilter { tol: f64, removed: usize },
    CorrelationFilter { threshold: f64, removed: usize },
    Standardize,
}

/// Named descriptor columns over an ordered set of compounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorMatrix {
    pub compound_ids: Vec<String>,
    pub descriptor_names: Vec<String>,
    pub values: Matrix,
    pub history: Vec<PreprocessStep>,
}

impl DescriptorMatrix {
    /// Validates the shape and content invariants: aligned dimensions,
    /// unique ids and names, finite values.
    pub fn new(
        compound_ids: Vec<String>,
        descriptor_names: Vec<String>,
        values: Matrix,
    ) -> Result<Self, IngestError> {
        assert_eq!(values.rows(), compound_ids.len(), "row count mismatch");
        assert_eq!(values.cols(), descriptor_names.len(), "col count mismatch");
        let mut seen = BTreeSet::new();
        for (row, id) in compound_ids.iter().enumerate() {
            if id.is_empty() {
                return Err(IngestError::EmptyId {
                    table: "descriptor",
                    row: row + 1,
                });
            }
            if !seen.insert(id.clone()) {
                return Err(IngestError::DuplicateId {
                    table: "descriptor",
                    id: id.clone(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for name in &descriptor_names {
            if !seen.insert(name.clone()) {
                return Err(IngestError::DuplicateColumn {
                    table: "descriptor",
                    name: name.clone(),
                });
            }
        }
        for r in 0..values.rows() {
            for c in 0..values.cols() {
                if !values.get(r, c).is_finite() {
                    return Err(IngestError::NonFinite {
                        row: r + 1,
                        column: descriptor_names[c].clone(),
                    });
                }
            }
        }
        Ok(DescriptorMatrix {
            compound_ids,
            descriptor_names,
            values,
            history: Vec::new(),
        })
    }

    pub fn n_compounds(&self) -> usize {
        self.compound_ids.len()
    }

    pub fn n_descriptors(&self) -> usize {
        self.descriptor_names.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.descriptor_names.iter().position(|n| n == name)
    }

    /// A copy restricted to the named descriptors, preserving history.
    pub fn select_descriptors(&self, names: &[String]) -> Result<DescriptorMatrix, String> {
        let mut idx = Vec::with_capacity(names.len());
        for name in names {
            match self.column_index(name) {
                Some(i) => idx.push(i),
                None => return Err(format!("unknown descriptor `{name}`")),
            }
        }
        Ok(DescriptorMatrix {
            compound_ids: self.compound_ids.clone(),
            descriptor_names: names.to_vec(),
            values: self.values.select_columns(&idx),
            history: self.history.clone(),
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> DescriptorMatrix {
        DescriptorMatrix {
            compound_ids: idx.iter().map(|&i| self.compound_ids[i].clone()).collect(),
            descriptor_names: self.descriptor_names.clone(),
            values: self.values.select_rows(idx),
            history: self.history.clone(),
        }
    }
}

/// The joined (X, y) pair the rest of the pipeline operates on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub matrix: DescriptorMatrix,
    /// pIC50 values aligned to the matrix rows.
    pub activity: Vec<f64>,
}

impl Dataset {
    pub fn new(matrix: DescriptorMatrix, activity: Vec<f64>) -> Self {
        assert_eq!(
            matrix.n_compounds(),
            activity.len(),
            "activity length must match matrix rows"
        );
        Dataset { matrix, activity }
    }

    pub fn n_compounds(&self) -> usize {
        self.activity.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.matrix.compound_ids
    }

    pub fn subset_rows(&self, idx: &[usize]) -> Dataset {
        Dataset {
            matrix: self.matrix.select_rows(idx),
            activity: idx.iter().map(|&i| self.activity[i]).collect(),
        }
    }

    pub fn select_descriptors(&self, names: &[String]) -> Result<Dataset, String> {
        Ok(Dataset {
            matrix: self.matrix.select_descriptors(names)?,
            activity: self.activity.clone(),
        })
    }
}

/// pIC50 from an IC50 concentration in µM: −log10(ic50 × 10⁻⁶).
pub fn compute_pic50(ic50_um: f64) -> Result<f64, DomainError> {
    if !ic50_um.is_finite() {
        return Err(DomainError::NonFiniteIc50(ic50_um));
    }
    if ic50_um <= 0.0 {
        return Err(DomainError::NonPositiveIc50(ic50_um));
    }
    Ok(6.0 - ic50_um.log10())
}

/// Signed residual, observed − predicted. Reports print the absolute value.
pub fn residual(observed: f64, predicted: f64) -> f64 {
    observed - predicted
}

/// Ingestion knobs. `abs_ic50` opts in to taking |IC50| for negative table
/// entries instead of rejecting them.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub abs_ic50: bool,
}

/// Tolerance for the supplied-pIC50 vs IC50-derived consistency check.
pub const PIC50_CONSISTENCY_TOL: f64 = 0.005;

struct ActivityLayout {
    id: usize,
    ic50: Option<usize>,
    pic50: Option<usize>,
    width: usize,
}

fn activity_layout(headers: &csv::StringRecord) -> Result<ActivityLayout, IngestError> {
    let mut id = None;
    let mut ic50 = None;
    let mut pic50 = None;
    for (i, h) in headers.iter().enumerate() {
        let h = h.trim();
        match h {
            "id" => {
                if id.replace(i).is_some() {
                    return Err(IngestError::DuplicateColumn {
                        table: "activity",
                        name: "id".into(),
                    });
                }
            }
            "ic50" => {
                if ic50.replace(i).is_some() {
                    return Err(IngestError::DuplicateColumn {
                        table: "activity",
                        name: "ic50".into(),
                    });
                }
            }
            "pic50" => {
                if pic50.replace(i).is_some() {
                    return Err(IngestError::DuplicateColumn {
                        table: "activity",
                        name: "pic50".into(),
                    });
                }
            }
            other => {
                return Err(IngestError::UnknownColumn {
                    column: other.to_string(),
                })
            }
        }
    }
    let id = id.ok_or(IngestError::MissingColumn {
        table: "activity",
        column: "id".into(),
    })?;
    if ic50.is_none() && pic50.is_none() {
        return Err(IngestError::MissingColumn {
            table: "activity",
            column: "ic50 or pic50".into(),
        });
    }
    Ok(ActivityLayout {
        id,
        ic50,
        pic50,
        width: headers.len(),
    })
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64, IngestError> {
    let value: f64 = raw.trim().parse().map_err(|_| IngestError::NonNumeric {
        row,
        column: column.to_string(),
        value: raw.to_string(),
    })?;
    if !value.is_finite() {
        return Err(IngestError::NonFinite {
            row,
            column: column.to_string(),
        });
    }
    Ok(value)
}

/// Parses the activity table from raw CSV bytes.
pub fn parse_activity_csv(
    bytes: &[u8],
    opts: &IngestOptions,
) -> Result<Vec<CompoundRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv(e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(IngestError::EmptyTable { table: "activity" });
    }
    let layout = activity_layout(&headers)?;

    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| IngestError::Csv(e.to_string()))?;
        if row.len() != layout.width {
            return Err(IngestError::RaggedRow {
                row: row_no,
                got: row.len(),
                expected: layout.width,
            });
        }
        let id = row[layout.id].trim().to_string();
        if id.is_empty() {
            return Err(IngestError::EmptyId {
                table: "activity",
                row: row_no,
            });
        }
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId {
                table: "activity",
                id,
            });
        }

        let ic50_raw = match layout.ic50 {
            Some(c) if !row[c].trim().is_empty() => Some(parse_cell(&row[c], row_no, "ic50")?),
            _ => None,
        };
        let pic50_given = match layout.pic50 {
            Some(c) if !row[c].trim().is_empty() => Some(parse_cell(&row[c], row_no, "pic50")?),
            _ => None,
        };

        let ic50 = match ic50_raw {
            Some(v) if v < 0.0 && opts.abs_ic50 => Some(v.abs()),
            other => other,
        };
        let derived = match ic50 {
            Some(v) => Some(compute_pic50(v).map_err(|source| IngestError::Domain {
                row: row_no,
                id: id.clone(),
                source,
            })?),
            None => None,
        };
        let pic50 = match (pic50_given, derived) {
            (Some(p), Some(d)) => {
                if (p - d).abs() > PIC50_CONSISTENCY_TOL {
                    return Err(IngestError::InconsistentActivity {
                        id,
                        pic50: p,
                        computed: d,
                    });
                }
                p
            }
            (Some(p), None) => p,
            (None, Some(d)) => d,
            (None, None) => return Err(IngestError::MissingActivity { row: row_no, id }),
        };

        records.push(CompoundRecord { id, ic50, pic50 });
    }
    if records.is_empty() {
        return Err(IngestError::EmptyTable { table: "activity" });
    }
    Ok(records)
}

/// Parses the descriptor table from raw CSV bytes.
pub fn parse_descriptor_csv(bytes: &[u8]) -> Result<DescriptorMatrix, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv(e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(IngestError::EmptyTable {
            table: "descriptor",
        });
    }
    if headers[0].trim() != "id" {
        return Err(IngestError::MissingColumn {
            table: "descriptor",
            column: "id".into(),
        });
    }
    let names: Vec<String> = headers
        .iter()
        .skip(1)
        .map(|h| h.trim().to_string())
        .collect();
    if names.is_empty() {
        return Err(IngestError::EmptyTable {
            table: "descriptor",
        });
    }
    for name in &names {
        if name.is_empty() {
            return Err(IngestError::MissingColumn {
                table: "descriptor",
                column: "(empty descriptor name)".into(),
            });
        }
    }

    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| IngestError::Csv(e.to_string()))?;
        if row.len() != names.len() + 1 {
            return Err(IngestError::RaggedRow {
                row: row_no,
                got: row.len(),
                expected: names.len() + 1,
            });
        }
        let id = row[0].trim().to_string();
        if id.is_empty() {
            return Err(IngestError::EmptyId {
                table: "descriptor",
                row: row_no,
            });
        }
        ids.push(id);
        for (c, name) in names.iter().enumerate() {
            data.push(parse_cell(&row[c + 1], row_no, name)?);
        }
    }
    if ids.is_empty() {
        return Err(IngestError::EmptyTable {
            table: "descriptor",
        });
    }
    let matrix = Matrix::from_vec(ids.len(), names.len(), data);
    DescriptorMatrix::new(ids, names, matrix)
}

/// Joins activity records with descriptor rows by id. Rows follow the
/// activity order, so permuting descriptor-file rows changes nothing.
pub fn join(
    records: &[CompoundRecord],
    descriptors: &DescriptorMatrix,
) -> Result<Dataset, IngestError> {
    let mut by_id: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in descriptors.compound_ids.iter().enumerate() {
        by_id.insert(id.as_str(), i);
    }
    let activity_ids: BTreeSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
    for id in descriptors.compound_ids.iter() {
        if !activity_ids.contains(id.as_str()) {
            return Err(IngestError::MissingInActivity { id: id.clone() });
        }
    }

    let mut row_idx = Vec::with_capacity(records.len());
    for rec in records {
        match by_id.get(rec.id.as_str()) {
            Some(&i) => row_idx.push(i),
            None => return Err(IngestError::MissingInDescriptors { id: rec.id.clone() }),
        }
    }
    let matrix = descriptors.select_rows(&row_idx);
    let activity = records.iter().map(|r| r.pic50).collect();
    Ok(Dataset::new(matrix, activity))
}

fn read_file(path: &Path) -> Result<Vec<u8>, IngestError> {
    std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads and joins the two tables with default options.
pub fn load_dataset(activity_path: &Path, descriptor_path: &Path) -> Result<Dataset, IngestError> {
    load_dataset_with(activity_path, descriptor_path, &IngestOptions::default())
}

pub fn load_dataset_with(
    activity_path: &Path,
    descriptor_path: &Path,
    opts: &IngestOptions,
) -> Result<Dataset, IngestError> {
    let records = parse_activity_csv(&read_file(activity_path)?, opts)?;
    let descriptors = parse_descriptor_csv(&read_file(descriptor_path)?)?;
    join(&records, &descriptors)
}

impl fmt::Display for CompoundRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ic50 {
            Some(ic50) => write!(f, "{} (ic50 {} µM, pic50 {:.4})", self.id, ic50, self.pic50),
            None => write!(f, "{} (pic50 {:.4})", self.id, self.pic50),
        }
    }
}
