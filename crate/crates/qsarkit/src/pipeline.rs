//! End-to-end orchestration: ingest → preprocess → split → select → fit →
//! validate → randomize → gate → report, driven by one [`RunConfig`] and one
//! master seed. Stage seeds are derived from (master seed, stage label), so
//! changing, say, the randomization iteration count never perturbs the
//! annealing chain. Every stage writes its artifacts as soon as it finishes;
//! a failure leaves the earlier artifacts in place.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{self, Dataset, IngestOptions};
use crate::preprocess::{self, PreprocessReport};
use crate::regression::{self, FittedModel, Method};
use crate::report::{self, StatsColumn};
use crate::rng;
use crate::select::{self, SAConfig, SATrace};
use crate::split::{self, SplitAssignment};
use crate::validation::{self, GateVerdict, RandomizationResult, ValidationReport};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("missing required setting: {0}")]
    Missing(String),
    #[error("settings `{a}` and `{b}` are mutually exclusive")]
    Conflicting { a: String, b: String },
}

#[derive(Debug, Error)]
#[error("stage {stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn stage_err(stage: &'static str, err: impl fmt::Display) -> PipelineError {
    PipelineError {
        stage,
        message: err.to_string(),
    }
}

/// How to split: a fixed dissimilarity level or a target test-set size.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitSpec {
    Dissimilarity(f64),
    TargetTest(usize),
}

/// Which descriptors to model: anneal a fixed-size subset or take a list.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpec {
    SubsetSize(usize),
    Explicit(Vec<String>),
}

/// Latent-component count: LOO-optimal sweep or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentSpec {
    LooOptimal,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub activity_path: PathBuf,
    pub descriptor_path: PathBuf,
    pub abs_ic50: bool,
    pub constant_tol: f64,
    pub correlation_threshold: f64,
    pub split: SplitSpec,
    pub method: Method,
    pub features: FeatureSpec,
    pub components: ComponentSpec,
    /// Annealing schedule; subset size and seed are filled in per run.
    pub sa: SAConfig,
    /// Explicit SA seed overriding the derived stage seed.
    pub sa_seed_override: Option<u64>,
    pub chains: usize,
    pub select_on_all: bool,
    pub randomization_iterations: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Accumulates settings from defaults, a config file, and CLI overrides;
/// later sources win field by field.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    pub activity_path: Option<PathBuf>,
    pub descriptor_path: Option<PathBuf>,
    pub abs_ic50: Option<bool>,
    pub constant_tol: Option<f64>,
    pub correlation_threshold: Option<f64>,
    pub dissimilarity: Option<f64>,
    pub target_test: Option<usize>,
    pub method: Option<Method>,
    pub subset_size: Option<usize>,
    pub descriptors: Option<Vec<String>>,
    pub components: Option<ComponentSpec>,
    pub t_initial: Option<f64>,
    pub cooling: Option<f64>,
    pub steps_per_temp: Option<usize>,
    pub t_min: Option<f64>,
    pub rng_seed: Option<u64>,
    pub chains: Option<usize>,
    pub select_on_all: Option<bool>,
    pub randomization_iterations: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(ConfigError::BadValue {
            key: key.to_string(),
            reason: format!("expected true or false, got `{other}`"),
        }),
    }
}

impl ConfigBuilder {
    /// Parses the flat `key = value` config format. Lines starting with `#`
    /// and blank lines are skipped; unknown keys are rejected.
    pub fn from_config_text(text: &str) -> Result<ConfigBuilder, ConfigError> {
        let mut b = ConfigBuilder::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "activity_path" => b.activity_path = Some(PathBuf::from(value)),
                "descriptor_path" => b.descriptor_path = Some(PathBuf::from(value)),
                "abs_ic50" => b.abs_ic50 = Some(parse_bool(key, value)?),
                "constant_tol" => b.constant_tol = Some(parse_value(key, value)?),
                "correlation_threshold" => b.correlation_threshold = Some(parse_value(key, value)?),
                "dissimilarity" => b.dissimilarity = Some(parse_value(key, value)?),
                "target_test" => b.target_test = Some(parse_value(key, value)?),
                "method" => b.method = Some(parse_value(key, value)?),
                "subset_size" => b.subset_size = Some(parse_value(key, value)?),
                "descriptors" => {
                    b.descriptors = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().to_string())
                            .filter(|s| !s.is_empty())
                            .collect(),
                    )
                }
                "components" => {
                    b.components = Some(if value == "loo" {
                        ComponentSpec::LooOptimal
                    } else {
                        ComponentSpec::Fixed(parse_value(key, value)?)
                    })
                }
                "t_initial" => b.t_initial = Some(parse_value(key, value)?),
                "cooling" => b.cooling = Some(parse_value(key, value)?),
                "steps_per_temp" => b.steps_per_temp = Some(parse_value(key, value)?),
                "t_min" => b.t_min = Some(parse_value(key, value)?),
                "rng_seed" => b.rng_seed = Some(parse_value(key, value)?),
                "chains" => b.chains = Some(parse_value(key, value)?),
                "select_on_all" => b.select_on_all = Some(parse_bool(key, value)?),
                "randomization_iterations" => {
                    b.randomization_iterations = Some(parse_value(key, value)?)
                }
                "seed" => b.seed = Some(parse_value(key, value)?),
                "out_dir" => b.out_dir = Some(PathBuf::from(value)),
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        Ok(b)
    }

    pub fn from_config_file(path: &Path) -> Result<ConfigBuilder, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_config_text(&text)
    }

    /// Field-wise merge where `overrides` wins.
    pub fn merge(mut self, overrides: ConfigBuilder) -> ConfigBuilder {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if overrides.$field.is_some() { self.$field = overrides.$field; })*
            };
        }
        take!(
            activity_path,
            descriptor_path,
            abs_ic50,
            constant_tol,
            correlation_threshold,
            dissimilarity,
            target_test,
            method,
            subset_size,
            descriptors,
            components,
            t_initial,
            cooling,
            steps_per_temp,
            t_min,
            rng_seed,
            chains,
            select_on_all,
            randomization_iterations,
            seed,
            out_dir
        );
        self
    }

    pub fn build(self) -> Result<RunConfig, ConfigError> {
        let activity_path = self
            .activity_path
            .ok_or_else(|| ConfigError::Missing("activity_path".into()))?;
        let descriptor_path = self
            .descriptor_path
            .ok_or_else(|| ConfigError::Missing("descriptor_path".into()))?;

        let split = match (self.dissimilarity, self.target_test) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Conflicting {
                    a: "dissimilarity".into(),
                    b: "target_test".into(),
                })
            }
            (Some(d), None) => SplitSpec::Dissimilarity(d),
            (None, Some(t)) => SplitSpec::TargetTest(t),
            (None, None) => {
                return Err(ConfigError::Missing("dissimilarity or target_test".into()))
            }
        };
        let features = match (self.subset_size, self.descriptors) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Conflicting {
                    a: "subset_size".into(),
                    b: "descriptors".into(),
                })
            }
            (Some(k), None) => FeatureSpec::SubsetSize(k),
            (None, Some(list)) => {
                if list.is_empty() {
                    return Err(ConfigError::BadValue {
                        key: "descriptors".into(),
                        reason: "empty descriptor list".into(),
                    });
                }
                FeatureSpec::Explicit(list)
            }
            (None, None) => return Err(ConfigError::Missing("subset_size or descriptors".into())),
        };

        let defaults = SAConfig::default();
        Ok(RunConfig {
            activity_path,
            descriptor_path,
            abs_ic50: self.abs_ic50.unwrap_or(false),
            constant_tol: self
                .constant_tol
                .unwrap_or(preprocess::DEFAULT_CONSTANT_TOL),
            correlation_threshold: self
                .correlation_threshold
                .unwrap_or(preprocess::DEFAULT_CORRELATION_THRESHOLD),
            split,
            method: self.method.unwrap_or(Method::Pls),
            features,
            components: self.components.unwrap_or(ComponentSpec::LooOptimal),
            sa: SAConfig {
                subset_size: defaults.subset_size,
                t_initial: self.t_initial.unwrap_or(defaults.t_initial),
                cooling: self.cooling.unwrap_or(defaults.cooling),
                steps_per_temp: self.steps_per_temp.unwrap_or(defaults.steps_per_temp),
                t_min: self.t_min.unwrap_or(defaults.t_min),
                rng_seed: 0,
            },
            sa_seed_override: self.rng_seed,
            chains: self.chains.unwrap_or(1),
            select_on_all: self.select_on_all.unwrap_or(false),
            randomization_iterations: self.randomization_iterations.unwrap_or(100),
            seed: self.seed.unwrap_or(42),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("qsar_run")),
        })
    }
}

/// Train/test flag in the prediction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetLabel {
    Train,
    Test,
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetLabel::Train => write!(f, "train"),
            SetLabel::Test => write!(f, "test"),
        }
    }
}

/// One compound's line in the prediction table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub id: String,
    pub set: SetLabel,
    pub observed: f64,
    pub predicted: f64,
    /// Signed, observed − predicted.
    pub residual: f64,
}

/// Winning subset summary written as `selection.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub descriptors: Vec<String>,
    /// LOO q² of the winning subset; `None` when descriptors were explicit.
    pub objective: Option<f64>,
    pub chains: usize,
}

/// Everything a full run produces.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub preprocess_report: PreprocessReport,
    pub split: SplitAssignment,
    pub selection: SelectionSummary,
    pub sa_trace: Option<SATrace>,
    pub model: FittedModel,
    pub validation: ValidationReport,
    pub gate: GateVerdict,
    pub randomization: RandomizationResult,
    pub predictions: Vec<PredictionRow>,
}

/// How far to execute the stage chain; every stage implies the earlier ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Preprocess,
    Split,
    Select,
    Fit,
    Validate,
    Randomize,
    Full,
}

/// Partial artifacts produced by [`run_to`].
#[derive(Debug, Clone, Default)]
pub struct StageOutput {
    pub dataset: Option<Dataset>,
    pub reduced: Option<Dataset>,
    pub preprocess_report: Option<PreprocessReport>,
    pub split: Option<SplitAssignment>,
    pub selection: Option<SelectionSummary>,
    pub sa_trace: Option<SATrace>,
    pub model: Option<FittedModel>,
    pub validation: Option<ValidationReport>,
    pub gate: Option<GateVerdict>,
    pub randomization: Option<RandomizationResult>,
    pub predictions: Option<Vec<PredictionRow>>,
}

fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    stage: &'static str,
) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| stage_err(stage, e))?;
    text.push('\n');
    fs::write(dir.join(name), text).map_err(|e| stage_err(stage, e))
}

fn predictions_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("id,set,observed,predicted,residual,abs_residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.id,
            r.set,
            r.observed,
            r.predicted,
            r.residual,
            r.residual.abs()
        ));
    }
    out
}

/// Dataset summary written as `dataset.json` by the ingest stage.
#[derive(Debug, Serialize)]
struct DatasetSummary<'a> {
    n_compounds: usize,
    n_descriptors: usize,
    compound_ids: &'a [String],
    descriptor_names: &'a [String],
    activity: &'a [f64],
}

fn derive_sa_seeds(config: &RunConfig) -> Vec<u64> {
    let base = config
        .sa_seed_override
        .unwrap_or_else(|| rng::stage_seed(config.seed, "select"));
    (0..config.chains.max(1))
        .map(|chain| {
            if chain == 0 {
                base
            } else {
                rng::iteration_seed(base, chain as u64)
            }
        })
        .collect()
}

fn split_dataset(
    ds: &Dataset,
    assignment: &SplitAssignment,
) -> (Dataset, Option<Dataset>, Vec<usize>, Vec<usize>) {
    let (train_idx, test_idx) = assignment.row_indices(ds);
    let train = ds.subset_rows(&train_idx);
    let test = if test_idx.is_empty() {
        None
    } else {
        Some(ds.subset_rows(&test_idx))
    };
    (train, test, train_idx, test_idx)
}

fn max_components(k: usize, n_train: usize, rank: usize) -> usize {
    // LOO folds drop one row, so the fold df bound is n_train − 3.
    k.min(rank).min(n_train.saturating_sub(3)).max(1)
}

/// Runs the pipeline through `stage`, writing each artifact into
/// `config.out_dir` as soon as its stage completes.
pub fn run_to(config: &RunConfig, stage: Stage) -> Result<StageOutput, PipelineError> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| stage_err("setup", e))?;
    let mut out = StageOutput::default();

    // ingest
    let dataset = ingest::load_dataset_with(
        &config.activity_path,
        &config.descriptor_path,
        &IngestOptions {
            abs_ic50: config.abs_ic50,
        },
    )
    .map_err(|e| stage_err("ingest", e))?;
    write_json(
        dir,
        "dataset.json",
        &DatasetSummary {
            n_compounds: dataset.n_compounds(),
            n_descriptors: dataset.matrix.n_descriptors(),
            compound_ids: &dataset.matrix.compound_ids,
            descriptor_names: &dataset.matrix.descriptor_names,
            activity: &dataset.activity,
        },
        "ingest",
    )?;
    out.dataset = Some(dataset.clone());
    if stage == Stage::Ingest {
        return Ok(out);
    }

    // preprocess
    let (after_constant, constant_report) =
        preprocess::remove_constant_columns(&dataset.matrix, config.constant_tol)
            .map_err(|e| stage_err("preprocess", e))?;
    let (after_corr, corr_report) =
        preprocess::correlation_filter(&after_constant, config.correlation_threshold)
            .map_err(|e| stage_err("preprocess", e))?;
    let preprocess_report = PreprocessReport::merge(&constant_report, &corr_report);
    write_json(
        dir,
        "preprocess_report.json",
        &preprocess_report,
        "preprocess",
    )?;
    let reduced = Dataset::new(after_corr, dataset.activity.clone());
    out.preprocess_report = Some(preprocess_report);
    out.reduced = Some(reduced.clone());
    if stage == Stage::Preprocess {
        return Ok(out);
    }

    // split
    let assignment = match config.split {
        SplitSpec::Dissimilarity(d) => {
            split::sphere_exclusion_split(&reduced, d).map_err(|e| stage_err("split", e))?
        }
        SplitSpec::TargetTest(target) => {
            split::tune_dissimilarity(&reduced, target)
                .map_err(|e| stage_err("split", e))?
                .assignment
        }
    };
    write_json(dir, "split.json", &assignment, "split")?;
    let (train, test, _, _) = split_dataset(&reduced, &assignment);
    out.split = Some(assignment.clone());
    if stage == Stage::Split {
        return Ok(out);
    }

    // select
    let select_ds = if config.select_on_all {
        &reduced
    } else {
        &train
    };
    let (selected, selection, sa_trace) = match &config.features {
        FeatureSpec::Explicit(names) => {
            for name in names {
                if reduced.matrix.column_index(name).is_none() {
                    return Err(stage_err(
                        "select",
                        format!("descriptor `{name}` not present after preprocessing"),
                    ));
                }
            }
            (
                names.clone(),
                SelectionSummary {
                    descriptors: names.clone(),
                    objective: None,
                    chains: 0,
                },
                None,
            )
        }
        FeatureSpec::SubsetSize(k) => {
            let seeds = derive_sa_seeds(config);
            let cfg = SAConfig {
                subset_size: *k,
                ..config.sa.clone()
            };
            let (outcome, _chain) =
                select::sa_select_chains(select_ds, config.method, &cfg, &seeds)
                    .map_err(|e| stage_err("select", e))?;
            (
                outcome.descriptors.clone(),
                SelectionSummary {
                    descriptors: outcome.descriptors,
                    objective: Some(outcome.objective),
                    chains: seeds.len(),
                },
                Some(outcome.trace),
            )
        }
    };
    write_json(dir, "selection.json", &selection, "select")?;
    if let Some(trace) = &sa_trace {
        let mut buf = Vec::new();
        trace
            .write_csv(&mut buf)
            .map_err(|e| stage_err("select", e))?;
        fs::write(dir.join("sa_trace.csv"), buf).map_err(|e| stage_err("select", e))?;
    }
    out.selection = Some(selection);
    out.sa_trace = sa_trace;
    if stage == Stage::Select {
        return Ok(out);
    }

    // fit (component choice included)
    let train_view = train
        .select_descriptors(&selected)
        .map_err(|e| stage_err("fit", e))?;
    let n_components = match (config.method, config.components) {
        (Method::Mlr, _) => selected.len(),
        (_, ComponentSpec::Fixed(c)) => c,
        (_, ComponentSpec::LooOptimal) => {
            let rank = regression::design_rank(&train_view.matrix.values)
                .map_err(|e| stage_err("fit", e))?;
            let cap = max_components(selected.len(), train_view.n_compounds(), rank);
            regression::choose_components(&train_view, config.method, cap)
                .map_err(|e| stage_err("fit", e))?
        }
    };
    let model = regression::fit_dataset(&train_view, config.method, n_components)
        .map_err(|e| stage_err("fit", e))?;
    write_json(dir, "model.json", &model, "fit")?;

    // prediction table over every compound, train rows flagged
    let predictions = {
        let preds = model
            .predict_matrix(&reduced.matrix)
            .map_err(|e| stage_err("fit", e))?;
        let train_ids = &assignment.train_ids;
        reduced
            .ids()
            .iter()
            .zip(reduced.activity.iter().zip(&preds))
            .map(|(id, (obs, pred))| PredictionRow {
                id: id.clone(),
                set: if train_ids.contains(id) {
                    SetLabel::Train
                } else {
                    SetLabel::Test
                },
                observed: *obs,
                predicted: *pred,
                residual: ingest::residual(*obs, *pred),
            })
            .collect::<Vec<_>>()
    };
    fs::write(dir.join("predictions.csv"), predictions_csv(&predictions))
        .map_err(|e| stage_err("fit", e))?;
    out.model = Some(model.clone());
    out.predictions = Some(predictions.clone());
    if stage == Stage::Fit {
        return Ok(out);
    }

    // validate + gate
    let validation = validation::validate_model(&train, test.as_ref(), &model)
        .map_err(|e| stage_err("validate", e))?;
    write_json(dir, "validation.json", &validation, "validate")?;
    let gate = validation::evaluate_gate(&validation);
    write_json(dir, "gate.json", &gate, "validate")?;
    out.validation = Some(validation.clone());
    out.gate = Some(gate);
    if stage == Stage::Validate {
        return Ok(out);
    }

    // randomize
    let randomization = validation::y_randomization(
        &train,
        &model.spec,
        config.randomization_iterations,
        rng::stage_seed(config.seed, "randomize"),
    )
    .map_err(|e| stage_err("randomize", e))?;
    write_json(dir, "randomization.json", &randomization, "randomize")?;
    out.randomization = Some(randomization.clone());
    if stage == Stage::Randomize {
        return Ok(out);
    }

    // report emission
    report::emit_scatter(&predictions, dir).map_err(|e| stage_err("report", e))?;
    report::emit_contribution_chart(&model, dir).map_err(|e| stage_err("report", e))?;
    let column = StatsColumn {
        label: config.method.to_string(),
        report: validation,
        randomization: Some(randomization),
    };
    report::emit_table(std::slice::from_ref(&column), dir).map_err(|e| stage_err("report", e))?;

    Ok(out)
}

/// Full pipeline run; all artifacts are written under `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<RunArtifacts, PipelineError> {
    let out = run_to(config, Stage::Full)?;
    Ok(RunArtifacts {
        preprocess_report: out.preprocess_report.expect("preprocess ran"),
        split: out.split.expect("split ran"),
        selection: out.selection.expect("select ran"),
        sa_trace: out.sa_trace,
        model: out.model.expect("fit ran"),
        validation: out.validation.expect("validate ran"),
        gate: out.gate.expect("gate ran"),
        randomization: out.randomization.expect("randomize ran"),
        predictions: out.predictions.expect("predictions built"),
    })
}

/// One method's outcome inside a comparison run.
#[derive(Debug, Clone, Serialize)]
pub struct CompareColumn {
    pub method: Method,
    pub error: Option<String>,
    pub validation: Option<ValidationReport>,
    pub gate: Option<GateVerdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareArtifacts {
    pub columns: Vec<CompareColumn>,
}

/// Runs MLR, PCR and PLS on the same preprocessed data and split, then
/// renders the side-by-side statistics table. A method failure fills its
/// column with the error instead of aborting the others.
pub fn compare_methods(config: &RunConfig) -> Result<CompareArtifacts, PipelineError> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| stage_err("setup", e))?;

    let mut columns = Vec::new();
    let mut table = Vec::new();
    for method in [Method::Pls, Method::Mlr, Method::Pcr] {
        let sub = RunConfig {
            method,
            out_dir: dir.join(format!("method_{}", method.to_string().to_lowercase())),
            ..config.clone()
        };
        match run(&sub) {
            Ok(artifacts) => {
                table.push(StatsColumn {
                    label: method.to_string(),
                    report: artifacts.validation.clone(),
                    randomization: Some(artifacts.randomization.clone()),
                });
                columns.push(CompareColumn {
                    method,
                    error: None,
                    validation: Some(artifacts.validation),
                    gate: Some(artifacts.gate),
                });
            }
            Err(err) => columns.push(CompareColumn {
                method,
                error: Some(err.to_string()),
                validation: None,
                gate: None,
            }),
        }
    }

    if !table.is_empty() {
        report::emit_table(&table, dir).map_err(|e| stage_err("report", e))?;
    }
    let artifacts = CompareArtifacts { columns };
    write_json(dir, "compare.json", &artifacts, "report")?;
    Ok(artifacts)
}
