//! `casimir`: sphere-plate Casimir force with roughness and conductivity
//! corrections, plus the measurement data-reduction pipeline.
//!
//! Exit codes: 0 success, 2 configuration error, 3 input-data error,
//! 4 numerical failure.

mod commands;
mod config;
mod io;

use casimir_core::CasimirError;
use clap::Parser;

pub mod cli {
    use crate::config::{ConventionKey, TheoryKey};
    use clap::{Args, Parser, Subcommand};
    use std::path::PathBuf;

    #[derive(Parser)]
    #[command(
        name = "casimir",
        about = "Casimir force between a rough metal-coated sphere and plate",
        version
    )]
    pub struct Cli {
        /// JSON run configuration; flags override config values.
        #[arg(long, global = true)]
        pub config: Option<PathBuf>,
        #[command(subcommand)]
        pub command: Command,
    }

    #[derive(Subcommand)]
    pub enum Command {
        /// Force breakdown (base, roughness, conductivity, combined) over a grid.
        Force(ForceArgs),
        /// Segment a height map into the three-level roughness model.
        AnalyzeMap(MapArgs),
        /// Fit systematics to a measured curve, reduce it and report RMS.
        Fit(FitArgs),
        /// Generate a synthetic force curve (seeded).
        Synth(SynthArgs),
        /// Cantilever force constant and residual potential from electrostatics.
        Calibrate(CalibrateArgs),
        /// Evaluate the reduction factor psi(eps1, eps2).
        Psi(PsiArgs),
    }

    #[derive(Args)]
    pub struct ForceArgs {
        #[arg(long)]
        pub min_nm: Option<f64>,
        #[arg(long)]
        pub max_nm: Option<f64>,
        #[arg(long)]
        pub points: Option<usize>,
        /// Separation convention of the grid: au_pd or al.
        #[arg(long)]
        pub convention: Option<ConventionKey>,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        pub out: Option<String>,
    }

    #[derive(Args)]
    pub struct MapArgs {
        /// Height-map CSV.
        #[arg(long)]
        pub map: Option<String>,
        #[arg(long)]
        pub t_low_nm: Option<f64>,
        #[arg(long)]
        pub t_high_nm: Option<f64>,
        #[arg(long)]
        pub out: Option<String>,
    }

    #[derive(Args)]
    pub struct FitArgs {
        /// Measured force-curve CSV (relative separations).
        #[arg(long)]
        pub curve: Option<String>,
        #[arg(long)]
        pub theory: Option<TheoryKey>,
        #[arg(long)]
        pub convention: Option<ConventionKey>,
        #[arg(long, allow_hyphen_values = true)]
        pub b_nn_nm: Option<f64>,
        #[arg(long)]
        pub region_min_nm: Option<f64>,
        /// Fit report JSON path (stdout when omitted).
        #[arg(long)]
        pub out_fit: Option<String>,
        /// Reduced-curve CSV path.
        #[arg(long)]
        pub out_reduced: Option<String>,
    }

    #[derive(Args)]
    pub struct SynthArgs {
        #[arg(long)]
        pub seed: Option<u64>,
        #[arg(long)]
        pub theory: Option<TheoryKey>,
        #[arg(long)]
        pub convention: Option<ConventionKey>,
        #[arg(long)]
        pub grid_min_nm: Option<f64>,
        #[arg(long)]
        pub grid_max_nm: Option<f64>,
        #[arg(long)]
        pub points: Option<usize>,
        #[arg(long)]
        pub a0_nm: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        pub b_nn_nm: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        pub c_pn_per_nm: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        pub e_pn: Option<f64>,
        #[arg(long)]
        pub noise_sigma_pn: Option<f64>,
        #[arg(long)]
        pub out: Option<String>,
    }

    #[derive(Args)]
    pub struct CalibrateArgs {
        /// Calibration records CSV: v1_mV,separation_nm,deflection_nm.
        #[arg(long)]
        pub records: Option<String>,
        /// Voltage-pair CSV: v1_mV,f_plus_pN,f_minus_pN.
        #[arg(long)]
        pub pairs: Option<String>,
        #[arg(long)]
        pub v2_mv: Option<f64>,
        /// Separation the voltage pairs were measured at.
        #[arg(long)]
        pub separation_nm: Option<f64>,
    }

    #[derive(Args)]
    pub struct PsiArgs {
        #[arg(long)]
        pub eps1: Option<f64>,
        #[arg(long)]
        pub eps2: Option<f64>,
        #[arg(long)]
        pub rel_tolerance: Option<f64>,
    }
}

/// Error carrying its process exit code class.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: String) -> Self {
        Self { exit_code: 2, message }
    }
    pub fn input(message: String) -> Self {
        Self { exit_code: 3, message }
    }
    pub fn numerical(message: String) -> Self {
        Self { exit_code: 4, message }
    }

    /// Core error surfacing in a configuration context.
    pub fn from_config(e: CasimirError) -> Self {
        Self::classify(e, 2)
    }
    /// Core error surfacing in an input-data context.
    pub fn from_input(e: CasimirError) -> Self {
        Self::classify(e, 3)
    }
    /// Core error surfacing in a computation context.
    pub fn from_numerical(e: CasimirError) -> Self {
        Self::classify(e, 4)
    }

    fn classify(e: CasimirError, invalid_input_code: i32) -> Self {
        let exit_code = match &e {
            CasimirError::Parse { .. } | CasimirError::Io(_) => 3,
            CasimirError::InvalidInput(_) | CasimirError::UnsupportedUnitPair { .. } => {
                invalid_input_code
            }
            _ => 4,
        };
        Self {
            exit_code,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn run() -> Result<(), CliError> {
    let cli = cli::Cli::parse();
    let cfg = config::RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        cli::Command::Force(args) => commands::cmd_force(&cfg, args),
        cli::Command::AnalyzeMap(args) => commands::cmd_analyze_map(&cfg, args),
        cli::Command::Fit(args) => commands::cmd_fit(&cfg, args),
        cli::Command::Synth(args) => commands::cmd_synth(&cfg, args),
        cli::Command::Calibrate(args) => commands::cmd_calibrate(&cfg, args),
        cli::Command::Psi(args) => commands::cmd_psi(&cfg, args),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code);
    }
}
