//! `key=value` config files and detector parameter resolution.
//!
//! Precedence, lowest to highest: built-in defaults, config file, `--preset`,
//! explicit flags.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use poev2::growing::{DetectionParams, Mode};

use crate::CliError;

const DETECT_KEYS: &[&str] = &[
    "mode", "lambda", "search", "lw", "tau-div", "angles", "window", "epsilon",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let data = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in data.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key=value, got {raw:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !DETECT_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key {key:?}",
                    path.display(),
                    lineno + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }
}

/// Unresolved detector flags shared by `detect` and `sweep`.
#[derive(Debug, Clone, clap::Args)]
pub struct ParamFlags {
    /// Detector mode: poe or poev2.
    #[arg(long)]
    pub mode: Option<String>,
    /// Parameter profile: generic (lambda 0.1, 5x5 search) or wireframe
    /// (lambda 0.8, 3x3 search).
    #[arg(long)]
    pub preset: Option<String>,
    /// Seed threshold in [0, 1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Search neighborhood side s (odd, >= 3).
    #[arg(long)]
    pub search: Option<u32>,
    /// Maximum point-to-line distance l_w in pixels.
    #[arg(long)]
    pub lw: Option<f64>,
    /// Angle tolerance divisor: tau = pi / TAU_DIV.
    #[arg(long)]
    pub tau_div: Option<f64>,
    /// Number of quantized directions P.
    #[arg(long)]
    pub angles: Option<u32>,
    /// Orientation window half-width W.
    #[arg(long)]
    pub window: Option<u32>,
    /// Allowed false detections for the size threshold.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// key=value file applied below preset and flags.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

impl ParamFlags {
    /// Resolves the full parameter set, validating the result.
    pub fn resolve(&self) -> Result<DetectionParams, CliError> {
        let mut params = DetectionParams::default();

        if let Some(path) = &self.config {
            let file = ConfigFile::load(path)?;
            if let Some(mode) = file.get::<String>("mode")? {
                params.mode = Mode::from_str(&mode)?;
            }
            if let Some(v) = file.get("lambda")? {
                params.lambda = v;
            }
            if let Some(v) = file.get("search")? {
                params.search = v;
            }
            if let Some(v) = file.get("lw")? {
                params.line_width = v;
            }
            if let Some(v) = file.get::<f64>("tau-div")? {
                params.tau = tau_from_div(v)?;
            }
            if let Some(v) = file.get("angles")? {
                params.directions = v;
            }
            if let Some(v) = file.get("window")? {
                params.half_width = v;
            }
            if let Some(v) = file.get("epsilon")? {
                params.epsilon = v;
            }
        }

        if let Some(preset) = &self.preset {
            let base = match preset.as_str() {
                "generic" => DetectionParams::generic(),
                "wireframe" => DetectionParams::wireframe(),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown preset {other:?} (expected generic or wireframe)"
                    )))
                }
            };
            params.lambda = base.lambda;
            params.search = base.search;
        }

        if let Some(mode) = &self.mode {
            params.mode = Mode::from_str(mode)?;
        }
        if let Some(v) = self.lambda {
            params.lambda = v;
        }
        if let Some(v) = self.search {
            params.search = v;
        }
        if let Some(v) = self.lw {
            params.line_width = v;
        }
        if let Some(v) = self.tau_div {
            params.tau = tau_from_div(v)?;
        }
        if let Some(v) = self.angles {
            params.directions = v;
        }
        if let Some(v) = self.window {
            params.half_width = v;
        }
        if let Some(v) = self.epsilon {
            params.epsilon = v;
        }

        params.validate()?;
        Ok(params)
    }
}

fn tau_from_div(div: f64) -> Result<f64, CliError> {
    if div <= 2.0 {
        return Err(CliError::Usage(format!(
            "tau divisor must exceed 2 (tau = pi/DIV < pi/2), got {div}"
        )));
    }
    Ok(PI / div)
}
