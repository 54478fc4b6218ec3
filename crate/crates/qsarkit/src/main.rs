//! Command-line front end for the QSAR toolkit.
//!
//! Exit codes: 0 success, 2 configuration errors, 1 pipeline errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsarkit::pipeline::{
    compare_methods, run_to, ComponentSpec, ConfigBuilder, ConfigError, PipelineError, RunConfig,
    Stage,
};
use qsarkit::regression::Method;
use qsarkit::report::{self, StatsColumn};

#[derive(Parser)]
#[command(
    name = "qsarkit",
    version,
    about = "QSAR model building: preprocessing, sphere-exclusion splitting, \
             simulated-annealing descriptor selection, MLR/PCR/PLS fitting and validation"
)]
struct Cli {
    /// Master seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory artifacts are written to.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Flat key = value config file; CLI flags override its settings.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct InputArgs {
    /// Activity CSV (`id,ic50` and/or `id,pic50`, IC50 in µM).
    #[arg(long, value_name = "FILE")]
    activity: Option<PathBuf>,
    /// Descriptor CSV (`id,<name1>,...,<nameK>`).
    #[arg(long, value_name = "FILE")]
    descriptors: Option<PathBuf>,
    /// Take |IC50| for negative activity entries instead of rejecting them.
    #[arg(long)]
    abs_ic50: bool,
}

#[derive(Args, Default)]
struct PrepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Sample-sd tolerance of the constant-column filter (default 1e-8).
    #[arg(long)]
    constant_tol: Option<f64>,
    /// |r| cutoff of the cross-correlation filter (default 0.99).
    #[arg(long)]
    correlation_threshold: Option<f64>,
}

#[derive(Args, Default)]
struct SplitArgs {
    #[command(flatten)]
    prep: PrepArgs,
    /// Sphere-exclusion dissimilarity level d (radius is d·√K).
    #[arg(long, conflicts_with = "test_size")]
    dissimilarity: Option<f64>,
    /// Tune d until the test set reaches this size.
    #[arg(long)]
    test_size: Option<usize>,
}

#[derive(Args, Default)]
struct ModelArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Regression method: MLR, PCR or PLS (default PLS).
    #[arg(long)]
    method: Option<Method>,
    /// Annealed subset size k.
    #[arg(long, conflicts_with = "descriptor_list")]
    subset_size: Option<usize>,
    /// Explicit comma-separated descriptor list (skips annealing).
    #[arg(long, value_name = "NAMES")]
    descriptor_list: Option<String>,
    /// Latent components: an integer or `loo` for the LOO-optimal sweep.
    #[arg(long)]
    components: Option<String>,
    /// Independent annealing chains; the best result wins.
    #[arg(long)]
    chains: Option<usize>,
    /// Anneal on all compounds instead of the training rows only.
    #[arg(long)]
    select_on_all: bool,
}

#[derive(Args, Default)]
struct ValidateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Print the 16-row statistics table after validating.
    #[arg(long)]
    table2: bool,
}

#[derive(Args, Default)]
struct RandomizeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Y-scrambling iterations (default 100).
    #[arg(long)]
    iterations: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Load and join the activity and descriptor tables.
    Ingest(InputArgs),
    /// Ingest, then drop constant and cross-correlated descriptors.
    Preprocess(PrepArgs),
    /// Preprocess, then split train/test by sphere exclusion.
    Split(SplitArgs),
    /// Split, then anneal a descriptor subset.
    Select(ModelArgs),
    /// Select, then fit the model and write the prediction table.
    Fit(ModelArgs),
    /// Fit, then compute the validation battery and gate verdict.
    Validate(ValidateArgs),
    /// Validate, then run the Y-randomization test.
    Randomize(RandomizeArgs),
    /// The whole pipeline including report emission.
    Run(RandomizeArgs),
    /// Full runs of MLR, PCR and PLS side by side.
    Compare(RandomizeArgs),
}

fn input_overrides(args: &InputArgs) -> ConfigBuilder {
    ConfigBuilder {
        activity_path: args.activity.clone(),
        descriptor_path: args.descriptors.clone(),
        abs_ic50: if args.abs_ic50 { Some(true) } else { None },
        ..Default::default()
    }
}

fn prep_overrides(args: &PrepArgs) -> ConfigBuilder {
    ConfigBuilder {
        constant_tol: args.constant_tol,
        correlation_threshold: args.correlation_threshold,
        ..input_overrides(&args.input)
    }
}

fn split_overrides(args: &SplitArgs) -> ConfigBuilder {
    ConfigBuilder {
        dissimilarity: args.dissimilarity,
        target_test: args.test_size,
        ..prep_overrides(&args.prep)
    }
}

fn model_overrides(args: &ModelArgs) -> Result<ConfigBuilder, ConfigError> {
    let components = match args.components.as_deref() {
        None => None,
        Some("loo") => Some(ComponentSpec::LooOptimal),
        Some(text) => Some(ComponentSpec::Fixed(text.parse().map_err(|_| {
            ConfigError::BadValue {
                key: "components".into(),
                reason: format!("expected an integer or `loo`, got `{text}`"),
            }
        })?)),
    };
    Ok(ConfigBuilder {
        method: args.method,
        subset_size: args.subset_size,
        descriptors: args
            .descriptor_list
            .as_ref()
            .map(|list| list.split(',').map(|s| s.trim().to_string()).collect()),
        components,
        chains: args.chains,
        select_on_all: if args.select_on_all { Some(true) } else { None },
        ..split_overrides(&args.split)
    })
}

/// A split/feature placeholder so stage-limited subcommands do not demand
/// settings their stages never read.
fn stage_defaults(stage: Stage) -> ConfigBuilder {
    let mut b = ConfigBuilder::default();
    if stage <= Stage::Preprocess {
        b.dissimilarity = Some(0.0);
    }
    if stage <= Stage::Split {
        b.subset_size = Some(1);
    }
    b
}

fn build_config(
    cli: &Cli,
    stage_fallback: ConfigBuilder,
    overrides: ConfigBuilder,
) -> Result<RunConfig, ConfigError> {
    let mut builder = stage_fallback;
    if let Some(path) = &cli.config {
        builder = builder.merge(ConfigBuilder::from_config_file(path)?);
    }
    builder = builder.merge(overrides);
    builder = builder.merge(ConfigBuilder {
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
        ..Default::default()
    });
    builder.build()
}

enum CliError {
    Config(ConfigError),
    Pipeline(PipelineError),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Pipeline(e)
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Ingest(args) => {
            let config = build_config(cli, stage_defaults(Stage::Ingest), input_overrides(args))?;
            let out = run_to(&config, Stage::Ingest)?;
            let ds = out.dataset.expect("ingest ran");
            println!(
                "loaded {} compounds x {} descriptors -> {}",
                ds.n_compounds(),
                ds.matrix.n_descriptors(),
                config.out_dir.join("dataset.json").display()
            );
        }
        Command::Preprocess(args) => {
            let config =
                build_config(cli, stage_defaults(Stage::Preprocess), prep_overrides(args))?;
            let out = run_to(&config, Stage::Preprocess)?;
            let report = out.preprocess_report.expect("preprocess ran");
            println!(
                "kept {} descriptors ({} constant, {} correlated removed) -> {}",
                report.kept.len(),
                report.removed_constant.len(),
                report.removed_correlated.len(),
                config.out_dir.join("preprocess_report.json").display()
            );
        }
        Command::Split(args) => {
            let config = build_config(cli, stage_defaults(Stage::Split), split_overrides(args))?;
            let out = run_to(&config, Stage::Split)?;
            let split = out.split.expect("split ran");
            let reduced = out.reduced.expect("preprocess ran");
            let (train_idx, test_idx) = split.row_indices(&reduced);
            let range = |idx: &[usize]| {
                let values: Vec<f64> = idx.iter().map(|&i| reduced.activity[i]).collect();
                match (
                    values.iter().cloned().reduce(f64::min),
                    values.iter().cloned().reduce(f64::max),
                ) {
                    (Some(lo), Some(hi)) => format!("[{lo:.3}, {hi:.3}]"),
                    _ => "[]".to_string(),
                }
            };
            println!(
                "train {} (activity {}) / test {} (activity {}) at d = {}, radius = {:.4} -> {}",
                split.n_train(),
                range(&train_idx),
                split.n_test(),
                range(&test_idx),
                split.dissimilarity,
                split.radius,
                config.out_dir.join("split.json").display()
            );
        }
        Command::Select(args) => {
            let config = build_config(cli, ConfigBuilder::default(), model_overrides(args)?)?;
            let out = run_to(&config, Stage::Select)?;
            let selection = out.selection.expect("select ran");
            println!(
                "selected {} (q2 {}) -> {}",
                selection.descriptors.join(", "),
                selection
                    .objective
                    .map_or("n/a".to_string(), |v| format!("{v:.4}")),
                config.out_dir.join("selection.json").display()
            );
        }
        Command::Fit(args) => {
            let config = build_config(cli, ConfigBuilder::default(), model_overrides(args)?)?;
            let out = run_to(&config, Stage::Fit)?;
            let model = out.model.expect("fit ran");
            println!(
                "{} model with {} descriptors, {} component(s) -> {}",
                model.spec.method,
                model.spec.descriptors.len(),
                model.spec.n_components,
                config.out_dir.join("model.json").display()
            );
        }
        Command::Validate(args) => {
            let config =
                build_config(cli, ConfigBuilder::default(), model_overrides(&args.model)?)?;
            let out = run_to(&config, Stage::Validate)?;
            let validation = out.validation.expect("validate ran");
            let gate = out.gate.expect("gate ran");
            println!(
                "r2 {:.4}  q2 {:.4}  pred_r2 {}  F {:.4}  df {}",
                validation.r2,
                validation.q2,
                validation
                    .pred_r2
                    .map_or("n/a".to_string(), |v| format!("{v:.4}")),
                validation.f_test,
                validation.df
            );
            println!(
                "gate: {}",
                if gate.passes {
                    "passes".to_string()
                } else {
                    format!("fails {:?}", gate.failed_criteria)
                }
            );
            if args.table2 {
                let column = StatsColumn {
                    label: config.method.to_string(),
                    report: validation,
                    randomization: None,
                };
                print!("{}", report::render_stats_text(&[column]));
            }
        }
        Command::Randomize(args) => {
            let config = build_config(
                cli,
                ConfigBuilder {
                    randomization_iterations: args.iterations,
                    ..ConfigBuilder::default()
                },
                model_overrides(&args.model)?,
            )?;
            let out = run_to(&config, Stage::Randomize)?;
            let ran = out.randomization.expect("randomize ran");
            println!(
                "z_score_r2 {:.4}  z_score_q2 {:.4}  best_ran_r2 {:.4}  best_ran_q2 {:.4} ({} iterations, {} failed)",
                ran.z_score_r2,
                ran.z_score_q2,
                ran.best_ran_r2,
                ran.best_ran_q2,
                ran.n_iterations,
                ran.n_failed
            );
        }
        Command::Run(args) => {
            let config = build_config(
                cli,
                ConfigBuilder {
                    randomization_iterations: args.iterations,
                    ..ConfigBuilder::default()
                },
                model_overrides(&args.model)?,
            )?;
            let artifacts = qsarkit::pipeline::run(&config)?;
            println!(
                "{} on {} train / {} test: r2 {:.4}, q2 {:.4}, pred_r2 {}",
                artifacts.model.spec.method,
                artifacts.validation.n_train,
                artifacts.validation.n_test,
                artifacts.validation.r2,
                artifacts.validation.q2,
                artifacts
                    .validation
                    .pred_r2
                    .map_or("n/a".to_string(), |v| format!("{v:.4}")),
            );
            println!(
                "gate: {}",
                if artifacts.gate.passes {
                    "passes".to_string()
                } else {
                    format!("fails {:?}", artifacts.gate.failed_criteria)
                }
            );
            println!("artifacts in {}", config.out_dir.display());
        }
        Command::Compare(args) => {
            let config = build_config(
                cli,
                ConfigBuilder {
                    randomization_iterations: args.iterations,
                    ..ConfigBuilder::default()
                },
                model_overrides(&args.model)?,
            )?;
            let artifacts = compare_methods(&config)?;
            for column in &artifacts.columns {
                match (&column.error, &column.validation) {
                    (Some(err), _) => println!("{}: failed ({err})", column.method),
                    (None, Some(v)) => println!(
                        "{}: r2 {:.4}, q2 {:.4}, pred_r2 {}",
                        column.method,
                        v.r2,
                        v.q2,
                        v.pred_r2.map_or("n/a".to_string(), |x| format!("{x:.4}")),
                    ),
                    _ => {}
                }
            }
            let table = config.out_dir.join("stats_table.txt");
            if table.exists() {
                println!("\n{}", std::fs::read_to_string(table).unwrap_or_default());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Pipeline(e)) => {
            eprintln!("pipeline error: {e}");
            ExitCode::from(1)
        }
    }
}
