//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "whirl",
    about = "Decompose multi-section rotor orbits into forward/backward whirl modes and derive instantaneous orbit features",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic multi-section record as CSV
    Simulate(SimulateArgs),
    /// Run the joint decomposition and write a result bundle
    Decompose(DecomposeArgs),
    /// Export per-(mode, section) instantaneous orbit features from a bundle
    Features(FeaturesArgs),
    /// Export the signed-frequency time-energy grid from a bundle
    Timefs(TimefsArgs),
    /// Export 3D orbit-map frames from a bundle
    Iom(IomArgs),
    /// Render waveform and orbit plots of a record
    Plot(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Two sections with AM 16 Hz + 32 Hz components and opposing whirl
    TwoSection,
    /// Two sections with a single tone whose precession flips mid-record
    Bistable,
}

#[derive(Args)]
pub struct GeneratorArgs {
    /// Record duration in seconds
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Signal-to-noise ratio of added Gaussian noise (dB); omit for clean output
    #[arg(long, conflicts_with = "no_noise")]
    pub snr_db: Option<f64>,
    /// Explicitly disable noise
    #[arg(long)]
    pub no_noise: bool,
    /// Seed of the noise generator
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Precession reversal instant for the bistable scenario (s)
    #[arg(long, default_value_t = 0.2)]
    pub jump_time: f64,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: Scenario,
    /// Sample rate in Hz (default: 1024 for two-section, 2000 for bistable)
    #[arg(long)]
    pub sample_rate: Option<f64>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Output CSV path
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct InputSource {
    /// Input CSV (header row; optional `t` column; probe columns x1,y1,x2,y2,...)
    #[arg(long, group = "source")]
    pub input: Option<PathBuf>,
    /// Generate the record instead of reading a file
    #[arg(long, value_enum, group = "source")]
    pub scenario: Option<Scenario>,
}

#[derive(Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: InputSource,
    /// Sample rate override in Hz (otherwise inferred from the `t` column)
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Comma-separated probe column names, x/y interleaved per section
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Number of modes to extract
    #[arg(long)]
    pub modes: usize,
    /// Bandwidth penalty
    #[arg(long, default_value_t = 8000.0)]
    pub alpha: f64,
    /// Dual ascent step
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    /// Relative convergence threshold
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Center-frequency init scheme: uniform-spread, zero, or octave
    #[arg(long, default_value = "zero")]
    pub init: String,
    /// Directory receiving the result bundle
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct FeaturesArgs {
    /// Directory holding a decomposition bundle
    #[arg(long)]
    pub bundle: PathBuf,
    /// Output directory (defaults to the bundle directory)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct TimefsArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    /// Frequency bin width in Hz (defaults to sample_rate / samples)
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Emit an SVG heat plot alongside the CSV
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct IomArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    /// Mode index (0-based)
    #[arg(long)]
    pub mode: usize,
    /// Frame instants in seconds, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    /// Number of posture-line anchors per section
    #[arg(long, default_value_t = 8)]
    pub anchors: usize,
    /// Axial positions of the sections, comma separated
    #[arg(long, value_delimiter = ',')]
    pub axial: Vec<f64>,
    /// Emit an SVG axonometric projection alongside the JSON
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: InputSource,
    #[arg(long)]
    pub sample_rate: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Render per-probe waveforms (default: both plot kinds)
    #[arg(long)]
    pub waveforms: bool,
    /// Render per-section orbits (default: both plot kinds)
    #[arg(long)]
    pub orbits: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}
