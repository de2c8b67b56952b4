//! Experiment configuration from flags and an optional TOML file.
//!
//! Flags override file values; anything left unset falls back to the preset
//! defaults. All numeric constraints are enforced here so that a resolved
//! [`ExperimentConfig`] is always runnable.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::UsageError;

/// Weak coupling used when no `g` is given, in units of the pointer width.
pub const DEFAULT_WEAK_RATIO: f64 = 1e-2;
/// Coupling of the `joint-strong` preset, in units of the pointer width.
pub const STRONG_RATIO: f64 = 10.0;
/// Coupling ratios visited by the `sweep` preset.
pub const SWEEP_RATIOS: [f64; 3] = [1e-1, 1e-2, 1e-3];

pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_WIDTH: f64 = 1.0;
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Weak path pointer (vertical) and weak arm-2 polarisation pointer (horizontal).
    WeakCheshire,
    /// Path pointer only.
    WhichPath,
    /// Arm-2 polarisation pointer only.
    SmileOnly,
    /// Both pointers with strong coupling.
    JointStrong,
    /// `weak-cheshire` repeated over several coupling strengths.
    Sweep,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::WeakCheshire => "weak-cheshire",
            Preset::WhichPath => "which-path",
            Preset::SmileOnly => "smile-only",
            Preset::JointStrong => "joint-strong",
            Preset::Sweep => "sweep",
        }
    }

    /// Default `g/s` for both axes.
    pub fn default_ratio(self) -> f64 {
        match self {
            Preset::JointStrong => STRONG_RATIO,
            _ => DEFAULT_WEAK_RATIO,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    #[value(name = "csv+json")]
    #[serde(rename = "csv+json")]
    CsvJson,
}

/// Fully resolved, validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub g_vertical: f64,
    pub g_horizontal: f64,
    pub s: f64,
    pub shots: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

/// Command-line flags. Every value is optional so that file values and
/// preset defaults can fill the gaps.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "cheshire", version, about = "Quantum Cheshire cat simulator")]
pub struct CliArgs {
    /// Experiment preset
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Vertical (path) pointer displacement per unit eigenvalue
    #[arg(long, allow_negative_numbers = true)]
    pub g_vertical: Option<f64>,
    /// Horizontal (polarisation) pointer displacement per unit eigenvalue
    #[arg(long, allow_negative_numbers = true)]
    pub g_horizontal: Option<f64>,
    /// Pointer width (standard deviation of the beam profile)
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Number of photons
    #[arg(long, allow_negative_numbers = true)]
    pub shots: Option<i64>,
    /// RNG seed
    #[arg(long, allow_negative_numbers = true)]
    pub seed: Option<i64>,
    /// Output directory for shots.csv and summary.json
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// TOML file with any of the keys above (snake_case)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub g_vertical: Option<f64>,
    pub g_horizontal: Option<f64>,
    pub s: Option<f64>,
    pub shots: Option<i64>,
    pub seed: Option<i64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self, UsageError> {
        toml::from_str(text).map_err(|e| UsageError::File {
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError::File {
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_toml(&text)
    }
}

fn invalid(key: &'static str, message: impl Into<String>) -> UsageError {
    UsageError::Invalid {
        key,
        message: message.into(),
    }
}

fn parse_preset(name: &str) -> Result<Preset, UsageError> {
    Preset::from_str(name, false).map_err(|_| invalid("preset", format!("unknown preset '{name}'")))
}

fn parse_format(name: &str) -> Result<OutputFormat, UsageError> {
    OutputFormat::from_str(name, false)
        .map_err(|_| invalid("format", format!("unknown format '{name}'")))
}

/// Merges flags over file values over defaults, then validates.
pub fn resolve(args: &CliArgs, file: &FileConfig) -> Result<ExperimentConfig, UsageError> {
    let preset = match (&args.preset, &file.preset) {
        (Some(p), _) => *p,
        (None, Some(name)) => parse_preset(name)?,
        (None, None) => Preset::WeakCheshire,
    };
    let format = match (&args.format, &file.format) {
        (Some(f), _) => *f,
        (None, Some(name)) => parse_format(name)?,
        (None, None) => OutputFormat::CsvJson,
    };

    let s = args.s.or(file.s).unwrap_or(DEFAULT_WIDTH);
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("s", format!("must be a positive number, got {s}")));
    }
    let default_g = preset.default_ratio() * s;
    let g_vertical = args.g_vertical.or(file.g_vertical).unwrap_or(default_g);
    if !(g_vertical.is_finite() && g_vertical >= 0.0) {
        return Err(invalid(
            "g_vertical",
            format!("must be a non-negative number, got {g_vertical}"),
        ));
    }
    let g_horizontal = args.g_horizontal.or(file.g_horizontal).unwrap_or(default_g);
    if !(g_horizontal.is_finite() && g_horizontal >= 0.0) {
        return Err(invalid(
            "g_horizontal",
            format!("must be a non-negative number, got {g_horizontal}"),
        ));
    }
    let shots = args.shots.or(file.shots).unwrap_or(DEFAULT_SHOTS as i64);
    if shots < 1 {
        return Err(invalid("shots", format!("must be at least 1, got {shots}")));
    }
    let seed = args.seed.or(file.seed).unwrap_or(0);
    if seed < 0 {
        return Err(invalid("seed", format!("must be non-negative, got {seed}")));
    }
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    Ok(ExperimentConfig {
        preset,
        g_vertical,
        g_horizontal,
        s,
        shots: shots as u64,
        seed: seed as u64,
        out_dir,
        format,
    })
}

/// Parses a full argument list (program name first), reading `--config` if given.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = CliArgs::try_parse_from(args)?;
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    resolve(&args, &file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig, UsageError> {
        parse_config(std::iter::once("cheshire").chain(args.iter().copied()))
    }

    #[test]
    fn defaults() {
        let c = parse(&[]).unwrap();
        assert_eq!(c.preset, Preset::WeakCheshire);
        assert_eq!(c.s, 1.0);
        assert_eq!(c.g_vertical, 1e-2);
        assert_eq!(c.g_horizontal, 1e-2);
        assert_eq!(c.shots, 100_000);
        assert_eq!(c.seed, 0);
        assert_eq!(c.out_dir, PathBuf::from("out"));
        assert_eq!(c.format, OutputFormat::CsvJson);
    }

    #[test]
    fn flags_are_echoed() {
        let c = parse(&[
            "--preset",
            "weak-cheshire",
            "--shots",
            "1000",
            "--seed",
            "7",
        ])
        .unwrap();
        assert_eq!(c.preset, Preset::WeakCheshire);
        assert_eq!(c.shots, 1000);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn preset_sets_default_coupling() {
        let c = parse(&["--preset", "joint-strong", "--s", "2"]).unwrap();
        assert_eq!(c.g_vertical, 20.0);
        assert_eq!(c.g_horizontal, 20.0);
        let c = parse(&["--preset", "joint-strong", "--g-vertical", "3"]).unwrap();
        assert_eq!(c.g_vertical, 3.0);
        assert_eq!(c.g_horizontal, 10.0);
    }

    #[test]
    fn negative_width_names_the_key() {
        let e = parse(&["--s", "-1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let line = e.to_string();
        assert!(line.contains("`s`"), "{line}");
        assert!(!line.contains('\n'));
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        for (args, key) in [
            (vec!["--shots", "0"], "shots"),
            (vec!["--s", "0"], "s"),
            (vec!["--g-vertical", "-0.5"], "g_vertical"),
            (vec!["--g-horizontal", "nan"], "g_horizontal"),
            (vec!["--seed", "-3"], "seed"),
        ] {
            let e = parse(&args).unwrap_err();
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains(&format!("`{key}`")), "{e}");
        }
        let e = parse(&["--preset", "grinning"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("--preset"), "{e}");
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig::from_toml("shots = 500\nseed = 3\npreset = \"which-path\"").unwrap();
        let args = CliArgs::try_parse_from(["cheshire", "--shots", "900"]).unwrap();
        let c = resolve(&args, &file).unwrap();
        assert_eq!(c.shots, 900);
        assert_eq!(c.seed, 3);
        assert_eq!(c.preset, Preset::WhichPath);
    }

    #[test]
    fn file_errors() {
        let e = FileConfig::from_toml("shots = 5\ncolour = \"grin\"").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("colour"), "{e}");
        let file = FileConfig::from_toml("preset = \"tea-party\"").unwrap();
        let e = resolve(&CliArgs::default(), &file).unwrap_err();
        assert!(e.to_string().contains("`preset`"));
        let file = FileConfig::from_toml("format = \"xml\"").unwrap();
        assert!(resolve(&CliArgs::default(), &file).is_err());
    }
}
