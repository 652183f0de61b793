//! Named parameter sets.

use std::f64::consts::PI;

use serde::Serialize;

use crate::calibration::PumpSpec;
use crate::constants::SPEED_OF_LIGHT;
use crate::crystal::CrystalSpec;
use crate::error::{Error, Result};

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &["paper"];

/// Crystal, pump and source settings that belong together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub crystal: CrystalSpec,
    pub pump: PumpSpec,
    pub alpha: f64,
    /// Band holding the signal at its k = 0 edge
    pub band_index: usize,
    /// Band holding the pump
    pub pump_band_index: usize,
    pub zeta_target: f64,
}

/// Signal frequency of the reference design, ωΛ/(2πc).
pub const REFERENCE_SIGNAL_FREQUENCY: f64 = 1.18;

/// Pump frequency of the reference design, ωΛ/(2πc).
pub const REFERENCE_PUMP_FREQUENCY: f64 = 2.37;

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "paper" => {
            let (l_a, l_b) = (5.0e-7, 5.0e-7);
            let n_b: f64 = 2.2;
            let crystal = CrystalSpec::new(l_a, l_b, 1.0, n_b * n_b, 5.0e-5)?;
            let omega_s = 2.0 * PI * SPEED_OF_LIGHT * REFERENCE_SIGNAL_FREQUENCY / (l_a + l_b);
            let pump = PumpSpec::new(0.03, 5.0e-6, 25.2e-12, 1.0, omega_s, 0.0)?;
            Ok(Preset { crystal, pump, alpha: 0.06, band_index: 4, pump_band_index: 8, zeta_target: 1.0 })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_values() {
        let p = preset("paper").unwrap();
        assert_eq!(p.crystal.total_length(), 5.0e-5);
        assert!((p.crystal.eps_rel_b() - 4.84).abs() < 1e-12);
        assert_eq!(p.crystal.eps_rel_a(), 1.0);
        assert_eq!(p.alpha, 0.06);
        assert!((p.crystal.normalized_frequency(p.pump.omega_s) - 1.18).abs() < 1e-12);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(preset("lab").unwrap_err(), Error::UnknownPreset("lab".into()));
    }
}
