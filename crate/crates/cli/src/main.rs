//! `apfourier` command-line front end.
//!
//! Exit status: 0 on success, 1 on precondition or parameter errors, 2 on I/O
//! errors.

mod commands;
mod config;

use std::process::ExitCode;

use apfourier_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "apfourier", version, about = "Fractional-density sets, spectra and 3-term progressions")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat key=value file mirroring the subcommand's flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Cantor or randomized Salem-type set.
    Construct(ConstructArgs),
    /// Indicator spectrum of a set.
    Spectrum(SpectrumArgs),
    /// Fit the decay envelope C (k N)^{-β/2}.
    Decay(DecayArgs),
    /// Count congruence, genuine and trivial 3-term progressions.
    CountAps(CountArgs),
    /// Linear-uniformity progression guarantee.
    Guarantee(GuaranteeArgs),
    /// Full decay / decomposition / counting pipeline.
    Verify(VerifyArgs),
    /// Smearing diagnostic of the [0, 3N) embedding.
    Smear(SmearArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Cantor,
    Salem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Spectral,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Scaled,
    Plain,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Report destination; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Cantor depth, or the number of stages j of a Salem build.
    #[arg(long)]
    pub depth: u32,
    /// Salem: blocks per interval (N).
    #[arg(long)]
    pub branching: Option<usize>,
    /// Salem: blocks kept per interval (t).
    #[arg(long)]
    pub keep: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reject block choices whose exponential sums deviate by more than η.
    #[arg(long)]
    pub verify_blocks: bool,
    /// Replace the default η threshold.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub max_retries: u32,
    /// Check block sums over every frequency instead of one period.
    #[arg(long)]
    pub full_range: bool,
    /// Write the construction trace as JSON.
    #[arg(long, value_name = "FILE")]
    pub trace_out: Option<std::path::PathBuf>,
    /// Add the ψ-difference check to the summary.
    #[arg(long)]
    pub psi_check: bool,
    /// Use raw k instead of min(k, N^j - k) in the ψ-difference bound.
    #[arg(long)]
    pub raw_k: bool,
    /// Add the final decay report at this β to the summary.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Set file destination (text unless --format json).
    #[arg(long, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Set file (text or JSON).
    #[arg(long = "in", value_name = "FILE")]
    pub input: std::path::PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Extend the ambient to the next odd integer first.
    #[arg(long)]
    pub oddify: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Fixed exponent; fitted when absent.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Read |k| as min(k, N - k).
    #[arg(long)]
    pub symmetric_k: bool,
    #[arg(long, value_enum, default_value_t = FormArg::Scaled)]
    pub form: FormArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    #[arg(long)]
    pub oddify: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GuaranteeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = apfourier_core::apcount::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Fix α (δ = |A| / N^α); the density fit is used when absent.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Fejér cutoff K, or `auto` for floor(N^{1/3}).
    #[arg(long, default_value = "auto")]
    pub fejer_k: String,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = apfourier_core::apcount::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Weight frequencies n and N - n alike in the Fejér split.
    #[arg(long)]
    pub symmetric_fejer: bool,
    /// Refuse even ambients instead of extending them to the next odd integer.
    #[arg(long)]
    pub no_oddify: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SmearArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: Output,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
