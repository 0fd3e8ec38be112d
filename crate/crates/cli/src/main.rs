//! `hhebin`: batch binarization driver.

mod run;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use hhebin::LevelRange;

#[derive(Debug, Parser)]
#[command(
    name = "hhebin",
    version,
    about = "Hierarchical histogram-equalization binarization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Binarize images and optionally score them against ground truth.
    Run(RunArgs),
    /// Generate a synthetic degraded plate corpus with ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hhe,
    Otsu,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hhe => "hhe",
            Method::Otsu => "otsu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Whole frame, levels 2..8.
    Frame,
    /// Cropped plate, levels 0..3.
    Plate,
    /// Levels given by --levels.
    Custom,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "hhe")]
    pub method: Method,
    /// Level preset. Defaults to custom when --levels is given, frame otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Level range MIN..MAX (or a single level N).
    #[arg(long, value_parser = parse_levels)]
    pub levels: Option<LevelRange>,
    /// Net-membership threshold in [0, 1]; pixels strictly above become white.
    #[arg(long, default_value_t = 0.5, value_parser = parse_threshold)]
    pub threshold: f64,
    /// Skip the 3x3 median filter.
    #[arg(long)]
    pub no_median: bool,
    /// Also write the Otsu result and a gray | HHE | Otsu panel.
    #[arg(long)]
    pub compare: bool,
    /// Write each level's membership map as <stem>.L<level>.pgm.
    #[arg(long)]
    pub dump_levels: bool,
    /// Directory of ground-truth masks; enables metrics.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Metrics CSV to create or append to (default <out>/metrics.csv).
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Image files or directories (png, pgm, ppm).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

impl RunArgs {
    /// Resolves the preset against --levels.
    pub fn level_range(&self) -> Result<LevelRange, String> {
        match (self.mode, self.levels) {
            (None, None) | (Some(Mode::Frame), None) => Ok(LevelRange::FRAME),
            (Some(Mode::Plate), None) => Ok(LevelRange::PLATE),
            (None | Some(Mode::Custom), Some(r)) => Ok(r),
            (Some(Mode::Custom), None) => Err("--mode custom requires --levels".into()),
            (Some(m), Some(_)) => Err(format!(
                "--levels conflicts with --mode {}",
                m.to_possible_value().unwrap().get_name()
            )),
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// Number of plates.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "corpus")]
    pub out: PathBuf,
    #[arg(long, default_value_t = hhebin::evalmetrics::DEFAULT_PLATE_SIZE.0)]
    pub width: usize,
    #[arg(long, default_value_t = hhebin::evalmetrics::DEFAULT_PLATE_SIZE.1)]
    pub height: usize,
    /// Illumination ramp amplitude range, MIN..MAX gray levels.
    #[arg(long, default_value = "120..200", value_parser = parse_span::<u8>)]
    pub amplitude: (u8, u8),
    /// Salt-and-pepper rate range, MIN..MAX.
    #[arg(long, default_value = "0..0.02", value_parser = parse_span::<f64>)]
    pub noise: (f64, f64),
    /// Box blur radius range, MIN..MAX pixels.
    #[arg(long, default_value = "0..1", value_parser = parse_span::<u32>)]
    pub blur: (u32, u32),
}

fn parse_levels(s: &str) -> Result<LevelRange, String> {
    s.parse().map_err(|e: hhebin::Error| e.to_string())
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(format!("threshold {t} is outside [0, 1]"))
    }
}

/// `MIN..MAX`, or a single value for a degenerate span.
fn parse_span<T: FromStr + PartialOrd + Copy>(s: &str) -> Result<(T, T), String> {
    let one = |t: &str| {
        t.trim()
            .parse::<T>()
            .map_err(|_| format!("bad value {t:?} in {s:?}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (one(a)?, one(b)?),
        None => {
            let v = one(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

/// Sizes the global pool from HHEBIN_THREADS; 0 or unset means automatic.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("HHEBIN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        anyhow::anyhow!("HHEBIN_THREADS must be a non-negative integer, got {raw:?}")
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        log::error!("{e:#}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Run(args) => run::run(&args),
        Command::Synth(args) => synth::synth(&args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(extra: &[&str]) -> Result<RunArgs, clap::Error> {
        let argv = ["hhebin", "run"].iter().chain(extra).chain(&["x.pgm"]);
        Cli::try_parse_from(argv).map(|c| match c.command {
            Command::Run(a) => a,
            Command::Synth(_) => unreachable!(),
        })
    }

    #[test]
    fn presets_resolve_to_level_ranges() {
        assert_eq!(run_args(&[]).unwrap().level_range(), Ok(LevelRange::FRAME));
        assert_eq!(
            run_args(&["--mode", "frame"]).unwrap().level_range(),
            Ok(LevelRange::FRAME)
        );
        assert_eq!(
            run_args(&["--mode", "plate"]).unwrap().level_range(),
            Ok(LevelRange::PLATE)
        );
        let custom = LevelRange::new(1, 4).unwrap();
        assert_eq!(
            run_args(&["--levels", "1..4"]).unwrap().level_range(),
            Ok(custom)
        );
        assert_eq!(
            run_args(&["--mode", "custom", "--levels", "1..4"])
                .unwrap()
                .level_range(),
            Ok(custom)
        );
    }

    #[test]
    fn custom_without_levels_and_conflicting_presets_are_rejected() {
        assert!(run_args(&["--mode", "custom"])
            .unwrap()
            .level_range()
            .is_err());
        assert!(run_args(&["--mode", "plate", "--levels", "0..2"])
            .unwrap()
            .level_range()
            .is_err());
    }

    #[test]
    fn threshold_must_be_a_fraction() {
        assert_eq!(run_args(&["--threshold", "0"]).unwrap().threshold, 0.0);
        assert_eq!(run_args(&["--threshold", "1"]).unwrap().threshold, 1.0);
        assert!(run_args(&["--threshold", "1.5"]).is_err());
        assert!(run_args(&["--threshold", "-0.1"]).is_err());
        assert!(run_args(&["--threshold", "NaN"]).is_err());
    }

    #[test]
    fn bad_levels_are_rejected() {
        assert!(run_args(&["--levels", "4..2"]).is_err());
        assert!(run_args(&["--levels", "a..b"]).is_err());
    }

    #[test]
    fn spans() {
        assert_eq!(parse_span::<u8>("120..200"), Ok((120, 200)));
        assert_eq!(parse_span::<u32>("3"), Ok((3, 3)));
        assert_eq!(parse_span::<f64>("0..0.02"), Ok((0.0, 0.02)));
        assert!(parse_span::<u8>("5..1").is_err());
        assert!(parse_span::<u8>("0..300").is_err());
    }
}
