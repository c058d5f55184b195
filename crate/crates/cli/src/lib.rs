//! The `cran` command line: instance ingestion, region tables, quantizer
//! optimization, verification campaigns and gap checks.
//!
//! Exit codes: 0 success, 1 violations found, 2 input error, 3 enumeration cap
//! exceeded, 4 iteration budget exhausted (best iterate still written).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cran_core::equivalence::CertificateError;
use cran_core::optimize::OptimizeError;
use cran_core::regions::{Caps, RegionError};
use cran_core::{ModelError, NetworkInstance, QuantizerB};

pub mod commands;
pub mod instance_file;
pub mod output;

use instance_file::{FileError, InstanceFile, QuantizerFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "cran", version, about = "Rate-fronthaul regions and decoding-equivalence checks for uplink C-RAN")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Constraint tables, sum rates and two-user boundaries at a fixed quantizer.
    EvalRegion(EvalArgs),
    /// Optimize quantization noise for one of the convex programs.
    Optimize(OptimizeArgs),
    /// Randomized verification campaign for the equivalence theorems and set-function lemmas.
    Verify(VerifyArgs),
    /// Constant-gap certificates against the cut-set bound at B = ½Σ⁻¹.
    GapCheck(GapArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with = "random")]
    pub instance: Option<PathBuf>,
    /// Random instance `K,L,M,N,snr_db,seed`.
    #[arg(long, value_name = "K,L,M,N,SNR_DB,SEED")]
    pub random: Option<String>,
    /// `appendixD` (B = ½Σ⁻¹) or `file:<path>` holding `B` or `Q`.
    #[arg(long, default_value = "appendixD")]
    pub quantizer: String,
    #[arg(long, default_value_t = 6)]
    pub max_users: usize,
    #[arg(long, default_value_t = 6)]
    pub max_bss: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Also tabulate the sum-fronthaul JD extreme points for this budget (bits).
    #[arg(long)]
    pub sum_fronthaul: Option<f64>,
    /// Weight directions sampled for the two-user boundary.
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    #[arg(long, default_value = "cran-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    JdWeighted,
    SdSum,
    SdSumSumfronthaul,
    RateFronthaulTradeoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Barrier,
    Supergradient,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "jd-weighted")]
    pub objective: ObjectiveArg,
    /// Per-user weights, comma separated (default all ones).
    #[arg(long)]
    pub weights: Option<String>,
    /// Per-BS fronthaul prices for the tradeoff (default all ones).
    #[arg(long)]
    pub prices: Option<String>,
    /// Price of fronthaul in the tradeoff objective.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Sum fronthaul budget in bits.
    #[arg(long)]
    pub sum_fronthaul: Option<f64>,
    #[arg(long, value_enum, default_value = "barrier")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 20_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Write the per-iteration trace as CSV.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value = "cran-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Adds `|T|²` to the rate set function.
    Submodular,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Any of thm1, thm2, lemmas, greedy.
    #[arg(long, default_value = "thm1,thm2,lemmas,greedy")]
    pub theorems: String,
    #[arg(long, default_value = "1,2,3")]
    pub users: String,
    #[arg(long, default_value = "1,2,3")]
    pub bss: String,
    #[arg(long, default_value = "1,2")]
    pub tx: String,
    #[arg(long, default_value = "1,2")]
    pub rx: String,
    #[arg(long, default_value = "0,10,20")]
    pub snr: String,
    /// Certificate slack below `-tol` counts as a violation.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 6)]
    pub max_users: usize,
    #[arg(long, default_value_t = 6)]
    pub max_bss: usize,
    #[arg(long, default_value = "cran-out")]
    pub out: PathBuf,
    #[arg(long, hide = true, value_enum)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    /// Single instance; without `--instance`/`--random` a campaign runs instead.
    #[arg(long, conflicts_with = "random")]
    pub instance: Option<PathBuf>,
    #[arg(long, value_name = "K,L,M,N,SNR_DB,SEED")]
    pub random: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "0,20,40")]
    pub snr: String,
    /// Budget for the sum-fronthaul certificate (default `Σ C_ℓ`).
    #[arg(long)]
    pub sum_fronthaul: Option<f64>,
    #[arg(long, default_value_t = 6)]
    pub max_users: usize,
    #[arg(long, default_value_t = 6)]
    pub max_bss: usize,
    #[arg(long, default_value = "cran-out")]
    pub out: PathBuf,
}

/// A failure that ends the run with a fixed exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    pub fn cap(message: impl Into<String>) -> Self {
        Self { code: EXIT_CAP, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { code: EXIT_VIOLATIONS, message: message.into() }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::CapExceeded { .. } => Failure::cap(e.to_string()),
            RegionError::Info(cran_core::InfoError::QuantizerMismatch { .. }) => Failure::input(e.to_string()),
            _ => Failure::internal(e.to_string()),
        }
    }
}

impl From<CertificateError> for Failure {
    fn from(e: CertificateError) -> Self {
        match e {
            CertificateError::Region(r) => r.into(),
            other => Failure::internal(other.to_string()),
        }
    }
}

impl From<OptimizeError> for Failure {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Region(r) => r.into(),
            OptimizeError::TooManyDegreesOfFreedom { .. } => Failure::cap(e.to_string()),
            OptimizeError::Model(_) | OptimizeError::InvalidParameter(_) | OptimizeError::Resolution { .. } | OptimizeError::NoInteriorPoint => {
                Failure::input(e.to_string())
            }
            OptimizeError::Unsupported => Failure::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(format!("output: {e}"))
    }
}

pub fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Failure::input(format!("--{flag}: cannot parse {s:?}"))))
        .collect()
}

pub fn random_spec(text: &str) -> Result<NetworkInstance, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(Failure::input(format!("--random expects K,L,M,N,snr_db,seed, got {text:?}")));
    }
    let dim = |i: usize, name: &str| -> Result<usize, Failure> {
        match parts[i].parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(Failure::input(format!("--random: {name} must be a positive integer, got {:?}", parts[i]))),
        }
    };
    let (k, l, m, n) = (dim(0, "K")?, dim(1, "L")?, dim(2, "M")?, dim(3, "N")?);
    let snr: f64 = parts[4].parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(|| Failure::input("--random: snr_db must be finite"))?;
    let seed: u64 = parts[5].parse().map_err(|_| Failure::input("--random: seed must be an unsigned integer"))?;
    Ok(cran_core::random_instance(seed, k, l, m, n, snr))
}

pub fn check_caps(inst: &NetworkInstance, max_users: usize, max_bss: usize) -> Result<(), Failure> {
    let caps = Caps { max_users: max_users.min(Caps::default().max_users), max_bss: max_bss.min(Caps::default().max_bss) };
    caps.check(inst).map_err(Failure::from)
}

pub fn load_instance(instance: Option<&Path>, random: Option<&str>) -> Result<Option<NetworkInstance>, Failure> {
    match (instance, random) {
        (Some(p), None) => Ok(Some(InstanceFile::load(p)?)),
        (None, Some(r)) => random_spec(r).map(Some),
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(Failure::input("give exactly one of --instance and --random")),
    }
}

impl SourceArgs {
    pub fn instance(&self) -> Result<NetworkInstance, Failure> {
        let inst = load_instance(self.instance.as_deref(), self.random.as_deref())?.ok_or_else(|| Failure::input("an instance is required: --instance <path> or --random K,L,M,N,snr_db,seed"))?;
        check_caps(&inst, self.max_users, self.max_bss)?;
        Ok(inst)
    }

    pub fn quantizer(&self, inst: &NetworkInstance) -> Result<QuantizerB, Failure> {
        match self.quantizer.as_str() {
            "appendixD" => Ok(QuantizerB::half_inverse_noise(inst)?),
            q => match q.strip_prefix("file:") {
                Some(path) => Ok(QuantizerFile::load(Path::new(path), inst)?),
                None => Err(Failure::input(format!("--quantizer must be appendixD or file:<path>, got {q:?}"))),
            },
        }
    }
}

/// Runs one parsed command and returns the process exit code. Errors are
/// reported on stderr.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::EvalRegion(a) => commands::eval_region(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Verify(a) => commands::verify(a),
        Command::GapCheck(a) => commands::gap_check(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("cran: {}", f.message);
            f.code
        }
    }
}
