//! `spdc`: command-line front end for the biphoton model.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spdc_core::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(
    name = "spdc",
    version,
    about = "Biphoton mode structure and fiber-coupling model"
)]
struct Cli {
    /// JSON configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "SPDC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pair-collection efficiency over a ξ × w0 grid.
    SweepEfficiency(SweepArgs),
    /// Heralded signal mode at one focusing parameter.
    ConditionalMode(XiArg),
    /// Synthesize far-field rings and tabulate their asymmetry.
    Ring(RingArgs),
    /// Measure ring asymmetry on an image file.
    AnalyzeImage(AnalyzeArgs),
    /// Mode-matching report at one focusing parameter.
    MatchMetrics(XiArg),
    /// Write the built-in configuration as JSON.
    DefaultConfig,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated ξ values; the config's sweep when omitted.
    #[arg(long)]
    xi: Option<String>,
    /// Comma-separated collection waists in µm; the config's sweep when omitted.
    #[arg(long)]
    w0_um: Option<String>,
}

#[derive(Args, Debug)]
struct XiArg {
    /// Focusing parameter; the config's own pump when omitted.
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(Args, Debug)]
struct RingArgs {
    /// Comma-separated ξ values; the config's sweep when omitted.
    #[arg(long)]
    xi: Option<String>,
    /// Image side in pixels; the config's camera when omitted.
    #[arg(long)]
    size_px: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Pgm,
    Csv,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    path: PathBuf,
    /// Pixel pitch in µm; taken from the file, else 16 µm.
    #[arg(long)]
    pitch_um: Option<f64>,
    /// Diameter to measure, degrees; scans all diameters when omitted.
    #[arg(long)]
    azimuth_deg: Option<f64>,
    /// File format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// Computed output violates a guaranteed property.
    Data(String),
    Core(spdc_core::Error),
    /// Failure while processing one entry of a ξ list.
    Row {
        index: usize,
        xi_p: f64,
        source: spdc_core::Error,
    },
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Core(e) | Failure::Row { source: e, .. } if e.is_data_error() => 3,
            Failure::Core(_) | Failure::Row { .. } => 2,
        }
    }
}

impl From<spdc_core::Error> for Failure {
    fn from(e: spdc_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Data(m) => write!(f, "{m}"),
            Failure::Core(e) | Failure::Row { source: e, .. } => {
                if let Failure::Row { index, xi_p, .. } = self {
                    write!(f, "row {index} (xi_p = {xi_p}): ")?;
                }
                write!(f, "{e}")?;
                let mut source = std::error::Error::source(e);
                while let Some(s) = source {
                    write!(f, ": {s}")?;
                    source = s.source();
                }
                Ok(())
            }
        }
    }
}

fn parse_list(text: &str, what: &str, scale: f64) -> Result<Vec<f64>, Failure> {
    let values: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map(|v| v * scale)
                .map_err(|_| Failure::Usage(format!("bad {what} value `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(Failure::Usage(format!("empty {what} list")));
    }
    Ok(values)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let start = Instant::now();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size thread pool: {e}")))?;
    }
    let config = match &cli.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    let mut out = output::Outputs::new(&cli.out).map_err(spdc_core::Error::from)?;

    let name = match &cli.command {
        Command::SweepEfficiency(a) => {
            let xi = match &a.xi {
                Some(s) => parse_list(s, "xi", 1.0)?,
                None => config.sweep.xi.clone(),
            };
            let w0 = match &a.w0_um {
                Some(s) => parse_list(s, "w0", 1e-6)?,
                None => config.sweep.w0.clone(),
            };
            if xi.is_empty() || w0.is_empty() {
                return Err(Failure::Usage("empty sweep list".into()));
            }
            commands::sweep_efficiency(&config, &xi, &w0, &mut out)?;
            "sweep-efficiency"
        }
        Command::ConditionalMode(a) => {
            commands::conditional_mode(&config, a.xi, &mut out)?;
            "conditional-mode"
        }
        Command::Ring(a) => {
            let xi = match &a.xi {
                Some(s) => parse_list(s, "xi", 1.0)?,
                None => config.sweep.xi.clone(),
            };
            if xi.is_empty() {
                return Err(Failure::Usage("empty xi list".into()));
            }
            let size = a.size_px.unwrap_or(config.camera.size_px);
            commands::ring(&config, &xi, size, &mut out)?;
            "ring"
        }
        Command::AnalyzeImage(a) => {
            let format = match a.format {
                Some(Format::Pgm) => spdc_core::image_io::ImageFormat::Pgm16,
                Some(Format::Csv) => spdc_core::image_io::ImageFormat::Csv,
                None => spdc_core::image_io::ImageFormat::from_path(&a.path).ok_or_else(|| {
                    Failure::Usage("cannot tell the image format; pass --format".into())
                })?,
            };
            if let Some(p) = a.pitch_um {
                if !(p.is_finite() && p > 0.0) {
                    return Err(Failure::Usage("--pitch-um must be positive".into()));
                }
            }
            let azimuth = a.azimuth_deg.map(f64::to_radians);
            commands::analyze_image(
                &a.path,
                a.pitch_um.map(|p| p * 1e-6),
                azimuth,
                format,
                &mut out,
            )?;
            "analyze-image"
        }
        Command::MatchMetrics(a) => {
            commands::match_metrics(&config, a.xi, &mut out)?;
            "match-metrics"
        }
        Command::DefaultConfig => {
            let mut text = ExperimentConfig::default().to_json_string();
            text.push('\n');
            out.text("config.json", &text)?;
            "default-config"
        }
    };

    let manifest = output::RunManifest {
        config_hash: config.hash(),
        tool_version: env!("CARGO_PKG_VERSION"),
        subcommand: name.to_string(),
        outputs: out
            .written()
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    out.json("run_manifest.json", &manifest)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("spdc: {f}");
            ExitCode::from(f.code())
        }
    }
}
