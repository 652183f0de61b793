//! Run configuration: a flat JSON file, overridden key by key by flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Every key accepted in the config file. Flags carry the same names in
/// kebab case.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand name; must match the one on the command line if set
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Figure id for reproduce-figure
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,

    /// Named base parameter set
    #[arg(long)]
    pub preset: Option<String>,
    /// CSV destination; stdout when absent
    #[arg(long, short)]
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,

    /// Seed amplitude α
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Squeezing parameter r
    #[arg(long)]
    pub r: Option<f64>,
    /// Detector efficiency η
    #[arg(long)]
    pub eta: Option<f64>,
    /// Largest herald photon number in the click sum
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Truncation leakage tolerance
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Emitted photon number for click probabilities
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long)]
    pub r_start: Option<f64>,
    #[arg(long)]
    pub r_stop: Option<f64>,
    #[arg(long)]
    pub r_steps: Option<usize>,
    #[arg(long)]
    pub alpha_start: Option<f64>,
    #[arg(long)]
    pub alpha_stop: Option<f64>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long)]
    pub eta_start: Option<f64>,
    #[arg(long)]
    pub eta_stop: Option<f64>,
    #[arg(long)]
    pub eta_steps: Option<usize>,

    /// Layer A width, m
    #[arg(long)]
    pub l_a: Option<f64>,
    /// Layer B width, m
    #[arg(long)]
    pub l_b: Option<f64>,
    #[arg(long)]
    pub eps_rel_a: Option<f64>,
    #[arg(long)]
    pub eps_rel_b: Option<f64>,
    /// Crystal length, m
    #[arg(long)]
    pub total_length: Option<f64>,

    /// Pump power, W
    #[arg(long)]
    pub power: Option<f64>,
    /// Pump beam radius, m
    #[arg(long)]
    pub beam_radius: Option<f64>,
    /// χ̃⁽²⁾, m/V
    #[arg(long)]
    pub chi2: Option<f64>,
    #[arg(long)]
    pub refr_index: Option<f64>,
    /// Signal angular frequency, 1/s
    #[arg(long)]
    pub omega_s: Option<f64>,
    /// Pump phase, rad
    #[arg(long)]
    pub theta: Option<f64>,
    /// Target squeezing parameter
    #[arg(long)]
    pub zeta: Option<f64>,

    /// Band index, 1 = lowest
    #[arg(long)]
    pub band: Option<usize>,
    /// Bloch wavenumber as Λk
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub k_samples: Option<usize>,
    #[arg(long)]
    pub n_bands: Option<usize>,
    /// Group-velocity ceiling as a fraction of c
    #[arg(long)]
    pub vg_ceiling: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every key set in `top` replaced.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        overlay!(self, top;
            command, figure, preset, output, alpha, r, eta, k_max, tail_tol, n,
            r_start, r_stop, r_steps, alpha_start, alpha_stop, alpha_steps, eta_start, eta_stop, eta_steps,
            l_a, l_b, eps_rel_a, eps_rel_b, total_length,
            power, beam_radius, chi2, refr_index, omega_s, theta, zeta,
            band, k, k_samples, n_bands, vg_ceiling,
        );
        self
    }

    /// `key=value` pairs of every set key, sorted by key, for the CSV header.
    pub fn metadata(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let map = value.as_object().expect("config is an object");
        let mut parts: Vec<String> = map
            .iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect();
        parts.sort();
        parts.join(" ")
    }
}

/// What an axis falls back to when neither a value nor a grid is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fallback {
    Grid(f64, f64, usize),
    Value(f64),
    Required,
}

/// One sweep axis: `steps` points from `start` to `stop`, else the single
/// `scalar`, else the fallback.
pub fn axis(
    name: &str,
    scalar: Option<f64>,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
    fallback: Fallback,
) -> Result<Vec<f64>, CliError> {
    let grid = |a: f64, b: f64, n: usize| {
        if n == 0 {
            return Err(CliError::Config(format!("{name} grid is empty ({name}_steps = 0)")));
        }
        if n > 1 && (a.is_nan() || b.is_nan() || b <= a) {
            return Err(CliError::Config(format!("{name}_stop must exceed {name}_start, got {a} and {b}")));
        }
        Ok(herald_core::linspace(a, b, n))
    };
    let (default_start, default_stop) = match fallback {
        Fallback::Grid(a, b, _) => (Some(a), Some(b)),
        _ => (None, None),
    };
    match steps {
        Some(n) => match (start.or(default_start), stop.or(default_stop)) {
            (Some(a), Some(b)) => grid(a, b, n),
            _ => Err(CliError::Config(format!("{name}_steps needs {name}_start and {name}_stop"))),
        },
        None if start.is_some() || stop.is_some() => {
            Err(CliError::Config(format!("{name}_start/{name}_stop given without {name}_steps")))
        }
        None => match (scalar, fallback) {
            (Some(v), _) | (None, Fallback::Value(v)) => Ok(vec![v]),
            (None, Fallback::Grid(a, b, n)) => grid(a, b, n),
            (None, Fallback::Required) => Err(CliError::Config(format!("missing `{name}`"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"alpha": 0.1, "gamma": 2}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"alpha": 0.1, "r": 0.5}"#).unwrap();
        let flags = RunConfig { r: Some(1.5), ..Default::default() };
        let merged = file.overlay(&flags);
        assert_eq!(merged.alpha, Some(0.1));
        assert_eq!(merged.r, Some(1.5));
    }

    #[test]
    fn metadata_is_sorted() {
        let c = RunConfig { r: Some(1.5), alpha: Some(0.06), preset: Some("paper".into()), ..Default::default() };
        assert_eq!(c.metadata(), "alpha=0.06 preset=paper r=1.5");
    }

    #[test]
    fn axis_rules() {
        let d = Fallback::Grid(0.0, 1.0, 3);
        assert_eq!(axis("r", Some(0.4), None, None, None, d).unwrap(), vec![0.4]);
        assert_eq!(axis("r", None, None, None, None, d).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(axis("r", None, None, None, Some(2), d).unwrap(), vec![0.0, 1.0]);
        assert_eq!(axis("r", None, Some(1.0), Some(2.0), Some(2), Fallback::Required).unwrap(), vec![1.0, 2.0]);
        assert_eq!(axis("r", None, None, None, None, Fallback::Value(0.06)).unwrap(), vec![0.06]);
        assert!(axis("r", None, None, None, Some(0), d).is_err());
        assert!(axis("r", None, Some(1.0), None, None, d).is_err());
        assert!(axis("r", None, None, None, None, Fallback::Required).is_err());
        assert!(axis("r", None, None, None, Some(3), Fallback::Required).is_err());
    }
}
