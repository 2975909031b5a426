//! `eigenperturb` command-line pipeline.
//!
//! Stages hand off through files in the output directory:
//! `gradients → features → targets → train → predict → perturb → evaluate → export-plot`.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigenperturb::nn::Activation;
use eigenperturb::Error;

use config::PipelineConfig;

#[derive(Parser, Debug)]
#[command(
    name = "eigenperturb",
    version,
    about = "Learned eigenvalue perturbation of RANS Reynolds stresses"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Write the RANS snapshot with its mean-flow gradients.
    Gradients,
    /// Compute the nine flow features per point.
    Features,
    /// Compute Δ_B targets from co-located RANS and high-fidelity files.
    Targets,
    /// Train the network on features and targets.
    Train,
    /// Predict the Δ_B field with a trained model.
    Predict,
    /// Perturb RANS stresses toward the three limiting states.
    Perturb,
    /// Compare predicted and true Δ_B.
    Evaluate,
    /// Collect barycentric coordinates and Δ_B fields into one plot file.
    ExportPlot,
}

/// Every flag overrides the config key of the same name.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Pipeline configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rans_file: Option<PathBuf>,
    #[arg(long, global = true)]
    hifi_file: Option<PathBuf>,
    #[arg(long, global = true)]
    schema_file: Option<PathBuf>,
    #[arg(long, global = true)]
    hifi_schema_file: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    c0: Option<f64>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    max_epochs: Option<usize>,
    #[arg(long, global = true)]
    patience: Option<usize>,
    #[arg(long, global = true)]
    dropout: Option<f64>,
    #[arg(long, global = true)]
    validation_fraction: Option<f64>,
    #[arg(long, global = true)]
    activation: Option<Activation>,
    #[arg(long, global = true)]
    hidden_layers: Option<usize>,
    #[arg(long, global = true)]
    hidden_width: Option<usize>,
    /// Feature file (default: <output-dir>/features.csv).
    #[arg(long, global = true)]
    features: Option<PathBuf>,
    /// Targets file (default: <output-dir>/targets.csv).
    #[arg(long, global = true)]
    targets: Option<PathBuf>,
    /// Model file (default: <output-dir>/model.json).
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Predicted Δ_B file (default: <output-dir>/delta_b.csv).
    #[arg(long, global = true)]
    predictions: Option<PathBuf>,
    /// Map high-fidelity data onto RANS points by nearest neighbour when
    /// the files are not co-located (approximate).
    #[arg(long, global = true)]
    resample: bool,
}

/// Input and output files that are not part of the pipeline config.
#[derive(Debug, Default)]
pub struct Paths {
    pub features: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub resample: bool,
}

impl Overrides {
    fn resolve(self) -> eigenperturb::Result<(PipelineConfig, Paths)> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($flag:expr => $target:expr) => {
                if let Some(v) = $flag {
                    $target = v;
                }
            };
        }
        set!(self.rans_file.map(Some) => cfg.rans_file);
        set!(self.hifi_file.map(Some) => cfg.hifi_file);
        set!(self.schema_file.map(Some) => cfg.schema_file);
        set!(self.hifi_schema_file.map(Some) => cfg.hifi_schema_file);
        set!(self.output_dir.map(Some) => cfg.output_dir);
        set!(self.seed.map(Some) => cfg.seed);
        set!(self.rho.map(Some) => cfg.constants.rho);
        set!(self.nu.map(Some) => cfg.constants.nu);
        set!(self.c0.map(Some) => cfg.constants.c0);
        set!(self.learning_rate => cfg.train.learning_rate);
        set!(self.batch_size => cfg.train.batch_size);
        set!(self.max_epochs => cfg.train.max_epochs);
        set!(self.patience => cfg.train.patience);
        set!(self.dropout => cfg.train.dropout);
        set!(self.validation_fraction => cfg.train.validation_fraction);
        set!(self.activation => cfg.train.activation);
        set!(self.hidden_layers => cfg.train.hidden_layers);
        set!(self.hidden_width => cfg.train.hidden_width);
        let paths = Paths {
            features: self.features,
            targets: self.targets,
            model: self.model,
            predictions: self.predictions,
            resample: self.resample,
        };
        Ok((cfg, paths))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Schema(_) | Error::Config(_) | Error::ModelLoad { .. } | Error::Io { .. } => 2,
        Error::Parse { .. }
        | Error::Csv { .. }
        | Error::Data(_)
        | Error::Domain(_)
        | Error::Pairing(_)
        | Error::Size(_) => 3,
        Error::Divergence { .. } => 4,
        Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.overrides.resolve().and_then(|(cfg, paths)| {
        std::fs::create_dir_all(cfg.output_dir()).map_err(|e| Error::Io {
            path: cfg.output_dir(),
            source: e,
        })?;
        commands::run(cli.command, &cfg, &paths)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
