//! Command-line front end.
//!
//! Every subcommand produces one or more named artifacts (CSV, JSON or text).
//! Without `--out` the first artifact goes to stdout; with `--out DIR` all
//! artifacts are written there next to a `manifest.json` that records the
//! subcommand, its full parameter set, the seed and the tool version.
//!
//! Exit codes: 0 success, 1 a `--paper-check` comparison failed, 2 usage or
//! parameter error.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qencost", version, about = "Encoding, readout and synthesis cost studies for quantum PDE solvers")]
pub struct Cli {
    /// Write all outputs and manifest.json into this directory instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Amplitude-encoding circuit for a target state, with gate counts and fidelity.
    SynthInit(SynthInitArgs),
    /// Circuit runtime of an n-qubit preparation from native gate times (CSV).
    RuntimeEstimate(RuntimeArgs),
    /// Hoeffding shot budget N.
    RunsBound(RunsBoundArgs),
    /// Outlier counts of repeated readout experiments (CSV).
    ReadoutStudy(ReadoutStudyArgs),
    /// Smallest shot count meeting the outlier tolerance (CSV).
    MinShots(MinShotsArgs),
    /// Least-squares scaling fits of (n_tilde, N) data (JSON).
    FitScaling(FitScalingArgs),
    /// Exact success probability 1 - delta by configuration enumeration (JSON).
    DeltaExact(DeltaExactArgs),
    /// Success probability by enumerating every outcome sequence (JSON).
    DeltaBrute(DeltaBruteArgs),
    /// Truth table and reversible circuit of a discretized function (JSON or text).
    FuncSynth(FuncSynthArgs),
    /// Branch-encoded lattice Boltzmann run and classical comparison (CSV and JSON).
    LbmRun(LbmRunArgs),
    /// Linear advection through the Bernstein-Vazirani circuit (CSV).
    BvAdvect(BvAdvectArgs),
    /// Exact proof that branch-exchanging streaming is not linear.
    NonlinWitness(WitnessArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SynthInit(_) => "synth-init",
            Command::RuntimeEstimate(_) => "runtime-estimate",
            Command::RunsBound(_) => "runs-bound",
            Command::ReadoutStudy(_) => "readout-study",
            Command::MinShots(_) => "min-shots",
            Command::FitScaling(_) => "fit-scaling",
            Command::DeltaExact(_) => "delta-exact",
            Command::DeltaBrute(_) => "delta-brute",
            Command::FuncSynth(_) => "func-synth",
            Command::LbmRun(_) => "lbm-run",
            Command::BvAdvect(_) => "bv-advect",
            Command::NonlinWitness(_) => "nonlin-witness",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthInitArgs {
    /// Qubits of a random target (ignored with --amplitudes or --uniform).
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Comma-separated amplitudes, each `re` or `re:im`; normalized before use.
    #[arg(long, conflicts_with = "uniform")]
    pub amplitudes: Option<String>,
    /// Uniform superposition on n qubits.
    #[arg(long)]
    pub uniform: bool,
    /// Seed of the random target.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check gate counts and depths against the published closed forms.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// 50 ns single-qubit, 200 ns CX.
    Typical,
    /// 56.889 ns single-qubit, 533.333 ns CX.
    Sherbrooke,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RuntimeArgs {
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Profile::Typical)]
    pub profile: Profile,
    /// Single-qubit gate time in ns (overrides the profile).
    #[arg(long)]
    pub t1q_ns: Option<f64>,
    /// CX gate time in ns (overrides the profile).
    #[arg(long)]
    pub tcx_ns: Option<f64>,
    /// Coherence budget in microseconds; adds a budget_ratio column.
    #[arg(long)]
    pub budget_us: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    /// Relative error on all 2^n outcomes.
    Relative,
    /// Absolute error on all 2^n outcomes.
    Absolute,
    /// Absolute error on a single qubit.
    OneQubit,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunsBoundArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta: f64,
    /// Qubit counts, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    #[arg(long, value_enum, default_value_t = BoundMode::Relative)]
    pub mode: BoundMode,
    /// CSV with columns n,n_tilde,N,raw,epsilon,delta,mode instead of bare N values.
    #[arg(long)]
    pub csv: bool,
    /// Compare against the published budget tables (relative mode).
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    /// Deviation equal to eps/2^n is inside the band.
    Closed,
    /// Deviation equal to eps/2^n is an outlier.
    Open,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReadoutStudyArgs {
    /// Qubit counts, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Tolerated outliers F; experiments = ceil(F / delta).
    #[arg(long, default_value_t = 100)]
    pub factor: u64,
    /// Shots per experiment; defaults to the relative-error budget.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value_t = Band::Closed)]
    pub band: Band,
    /// Require at most F outliers at the published setting.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MinShotsArgs {
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub factor: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest shot count probed.
    #[arg(long, default_value_t = 1 << 32)]
    pub cap: u64,
    #[arg(long, value_enum, default_value_t = Band::Closed)]
    pub band: Band,
    /// Also emit every probe (n,shots,outliers,pass) as probes.csv.
    #[arg(long)]
    pub probes: bool,
    /// Compare against the published minimum shot counts (+-25%).
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Linear,
    Nlogn,
    Power,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitScalingArgs {
    /// CSV with header n_tilde,N; the published data set when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModelChoice::All)]
    pub model: ModelChoice,
    /// Compare fitted constants against the published ones.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeltaExactArgs {
    #[arg(long)]
    pub n_tilde: u64,
    /// Shots per outcome; N = z * n_tilde.
    #[arg(long, required_unless_present = "shots", conflicts_with = "shots")]
    pub z: Option<u64>,
    /// Total shots N (multiple of n_tilde).
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub eps: f64,
    /// Omit the configuration list from the JSON.
    #[arg(long)]
    pub no_configs: bool,
    /// Compare against the published anchor value.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeltaBruteArgs {
    #[arg(long)]
    pub n_tilde: u64,
    #[arg(long)]
    pub shots: u64,
    #[arg(long)]
    pub eps: f64,
    /// Maximum number of outcome sequences enumerated.
    #[arg(long, default_value_t = crate::exact_delta::DEFAULT_BRUTE_CAP)]
    pub cap: u64,
    /// Compare against the published anchor value.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionChoice {
    /// x^2
    X2,
    /// x^3
    X3,
    /// sqrt(x)
    Sqrt,
    /// sin(x)
    Sin,
    /// x
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthChoice {
    Naive,
    Opt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FuncSynthArgs {
    #[arg(long = "fn", value_enum, default_value_t = FunctionChoice::X2)]
    pub function: FunctionChoice,
    /// Upper end of the interval [0, phi].
    #[arg(long, default_value_t = 2.0)]
    pub phi: f64,
    /// Bits per value.
    #[arg(long, default_value_t = 3)]
    pub bits: usize,
    #[arg(long, value_enum, default_value_t = SynthChoice::Naive)]
    pub mode: SynthChoice,
    /// Leave garbage in the ancillas instead of resetting them.
    #[arg(long)]
    pub no_reset: bool,
    /// Which artifact goes to stdout.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Compare the x^2 table (phi 2, 3 bits) and the optimized ancilla count with the published ones.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AncillaChoice {
    Full,
    Opt,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LbmRunArgs {
    #[arg(long, value_enum, default_value_t = StencilChoice::D1q2)]
    pub stencil: StencilChoice,
    #[arg(long, default_value_t = 4)]
    pub nx: usize,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    /// Bits per population.
    #[arg(long, default_value_t = 1)]
    pub bits: usize,
    /// BGK relaxation rate in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = AncillaChoice::Full)]
    pub ancillas: AncillaChoice,
    /// Initial populations: points separated by ';', populations by ','. Random when absent.
    #[arg(long)]
    pub field: Option<String>,
    /// Seed of the random field and of the branch sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample this many shots of the grid-point register; adds counts.csv.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Put the JSON comparison report on stdout instead of the trajectories.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StencilChoice {
    D1q2,
    D1q3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum DirChoice {
    #[value(name = "+", alias = "positive")]
    #[serde(rename = "+")]
    Plus,
    #[value(name = "-", alias = "negative")]
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcChoice {
    Periodic,
    Outlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkChoice {
    Full,
    Fixed,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BvAdvectArgs {
    /// Initial field as a bitstring.
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value_t = 1)]
    pub bits_per_value: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = BcChoice::Periodic)]
    pub bc: BcChoice,
    #[arg(long, value_enum, default_value_t = DirChoice::Plus, allow_hyphen_values = true)]
    pub dir: DirChoice,
    /// SWAP network: full per-step chains or only the field-specific swaps.
    #[arg(long, value_enum, default_value_t = NetworkChoice::Full)]
    pub network: NetworkChoice,
    #[arg(long, default_value_t = 1.0)]
    pub cfl: f64,
    /// Compare against the published advected fields.
    #[arg(long)]
    pub paper_check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArgs {
    /// Print the report as JSON instead of the derivation chain.
    #[arg(long)]
    pub json: bool,
    /// Compare rank, representation and image against the published ones.
    #[arg(long)]
    pub paper_check: bool,
}

/// Everything needed to rerun a subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
}

/// One named output of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

impl Artifact {
    fn new(name: &str, content: String) -> Self {
        Self { name: name.to_string(), content }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Lines for stderr.
    pub notes: Vec<String>,
    /// `Some(passed)` when a `--paper-check` ran.
    pub check: Option<bool>,
    pub seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let (outcome, resolved) = commands::dispatch(&cli.command, err)?;
    for note in &outcome.notes {
        writeln!(err, "{note}").map_err(|e| e.to_string())?;
    }
    match &cli.out {
        Some(dir) => {
            let manifest = manifest(&resolved, &outcome)?;
            write_outputs(dir, &outcome.artifacts, &manifest)?;
            for a in &outcome.artifacts {
                writeln!(out, "{}", dir.join(&a.name).display()).map_err(|e| e.to_string())?;
            }
        }
        None => {
            if let Some(first) = outcome.artifacts.first() {
                write!(out, "{}", first.content).map_err(|e| e.to_string())?;
            }
            for a in outcome.artifacts.iter().skip(1) {
                writeln!(err, "also produced {} (use --out DIR to write it)", a.name).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(match outcome.check {
        Some(false) => EXIT_CHECK_FAILED,
        _ => EXIT_OK,
    })
}

fn manifest(command: &Command, outcome: &Outcome) -> Result<RunManifest, String> {
    let value = serde_json::to_value(command).map_err(|e| e.to_string())?;
    // externally tagged enum: {"sub-command": {params}}
    let parameters = value.as_object().and_then(|m| m.values().next().cloned()).unwrap_or_default();
    Ok(RunManifest {
        subcommand: command.name().to_string(),
        parameters,
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: outcome.artifacts.iter().map(|a| a.name.clone()).collect(),
    })
}

fn write_outputs(dir: &Path, artifacts: &[Artifact], manifest: &RunManifest) -> Result<(), String> {
    let io = |e: std::io::Error| format!("{}: {e}", dir.display());
    std::fs::create_dir_all(dir).map_err(io)?;
    for a in artifacts {
        std::fs::write(dir.join(&a.name), &a.content).map_err(io)?;
    }
    let json = serde_json::to_string_pretty(manifest).map_err(|e| e.to_string())?;
    std::fs::write(dir.join("manifest.json"), json + "\n").map_err(io)?;
    Ok(())
}
