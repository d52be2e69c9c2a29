//! Option resolution: command-line flags win over the GVCKIT_TOL
//! environment variable, which wins over the --config file, which wins
//! over built-in defaults.

use std::path::PathBuf;

use gvckit_core::io::bundle::{LoadOptions, NegativePolicy};
use gvckit_core::io::report::Format;

use crate::Cli;

pub struct Settings {
    pub tol: f64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub allow_imbalance: bool,
    pub clamp_negatives: bool,
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Settings, String> {
        let file = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                serde_json::from_str::<serde_json::Value>(&text)
                    .map_err(|e| format!("bad config {}: {e}", path.display()))?
            }
            None => serde_json::Value::Null,
        };

        let config_tol = match file.get("tol") {
            Some(v) => Some(
                v.as_f64()
                    .ok_or_else(|| "config key \"tol\" must be a number".to_string())?,
            ),
            None => None,
        };
        let env_tol = match std::env::var("GVCKIT_TOL") {
            Ok(raw) => Some(
                raw.parse::<f64>()
                    .map_err(|_| format!("GVCKIT_TOL is not a number: {raw:?}"))?,
            ),
            Err(_) => None,
        };
        let tol = cli.tol.or(env_tol).or(config_tol).unwrap_or(1e-9);
        if !(tol > 0.0) {
            return Err(format!("tolerance must be positive, got {tol}"));
        }

        let out = cli
            .out
            .clone()
            .or_else(|| file.get("out").and_then(|v| v.as_str()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("reports"));

        let mut format_names: Vec<String> = cli.format.clone();
        if format_names.is_empty() {
            if let Some(v) = file.get("format").and_then(|v| v.as_str()) {
                format_names.push(v.to_string());
            }
        }
        if format_names.is_empty() {
            format_names.push("csv".into());
        }
        let formats = format_names
            .iter()
            .map(|name| name.parse::<Format>())
            .collect::<Result<Vec<_>, _>>()?;

        let allow_imbalance = cli.allow_imbalance
            || file
                .get("allow_imbalance")
                .and_then(|v| v.as_bool())
                .unwrap_or(false);

        Ok(Settings {
            tol,
            out,
            formats,
            allow_imbalance,
            clamp_negatives: cli.clamp_negatives,
        })
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            tolerance: self.tol,
            allow_imbalance: self.allow_imbalance,
            negatives: if self.clamp_negatives {
                NegativePolicy::ClampToZero
            } else {
                NegativePolicy::Reject
            },
        }
    }
}
