//! Pump power to squeezing parameter.

use std::f64::consts::{LOG10_E, PI};

use serde::Serialize;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::crystal::{band_point, bloch_coefficients, energy_ratio, group_velocity, BandSolverOptions, CrystalSpec, EnergyRatio};
use crate::error::{Error, Result};

/// Default lower bound on v_g, as a fraction of c, below which the gain is
/// refused.
pub const VG_FLOOR_FRACTION: f64 = 1e-5;

/// Pump beam and nonlinear medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpSpec {
    /// Radiant flux W, watts
    pub power: f64,
    /// Beam radius d, m
    pub beam_radius: f64,
    /// χ̃⁽²⁾ = χ⁽²⁾/ε₀, m/V
    pub chi2: f64,
    pub refr_index: f64,
    /// Signal angular frequency, 1/s
    pub omega_s: f64,
    /// Pump phase θ, rad
    pub theta: f64,
}

impl PumpSpec {
    pub fn new(power: f64, beam_radius: f64, chi2: f64, refr_index: f64, omega_s: f64, theta: f64) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::invalid("power", format!("must be nonnegative, got {power}")));
        }
        if !(beam_radius > 0.0 && beam_radius.is_finite()) {
            return Err(Error::invalid("beam_radius", format!("must be positive, got {beam_radius}")));
        }
        if !(chi2 > 0.0 && chi2.is_finite()) {
            return Err(Error::invalid("chi2", format!("must be positive, got {chi2}")));
        }
        if !(refr_index >= 1.0 && refr_index.is_finite()) {
            return Err(Error::invalid("refr_index", format!("must be at least 1, got {refr_index}")));
        }
        if !(omega_s > 0.0 && omega_s.is_finite()) {
            return Err(Error::invalid("omega_s", format!("must be positive, got {omega_s}")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        Ok(Self { power, beam_radius, chi2, refr_index, omega_s, theta })
    }
}

/// Gain, squeezing parameter and the crystal quantities behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeBudget {
    /// β, 1/m
    pub gain_beta: f64,
    pub zeta: f64,
    /// m/s
    pub v_g: f64,
    /// m
    pub effective_length: f64,
}

impl SqueezeBudget {
    pub fn new(pump: &PumpSpec, v_g: f64, effective_length: f64) -> Result<Self> {
        if !(effective_length >= 0.0 && effective_length.is_finite()) {
            return Err(Error::invalid("effective_length", format!("must be nonnegative, got {effective_length}")));
        }
        let gain_beta = gain_coefficient(pump, v_g)?;
        Ok(Self { gain_beta, zeta: gain_beta * effective_length, v_g, effective_length })
    }
}

/// Peak field amplitude A from I = W/(πd²) = ½ε₀cnA².
pub fn pump_amplitude(pump: &PumpSpec) -> f64 {
    let intensity = pump.power / (PI * pump.beam_radius * pump.beam_radius);
    (2.0 * intensity / (VACUUM_PERMITTIVITY * SPEED_OF_LIGHT * pump.refr_index)).sqrt()
}

/// β = ω_s·A·χ̃⁽²⁾/v_g, refusing v_g below [`VG_FLOOR_FRACTION`]·c.
pub fn gain_coefficient(pump: &PumpSpec, v_g: f64) -> Result<f64> {
    gain_coefficient_with_floor(pump, v_g, VG_FLOOR_FRACTION * SPEED_OF_LIGHT)
}

pub fn gain_coefficient_with_floor(pump: &PumpSpec, v_g: f64, vg_floor: f64) -> Result<f64> {
    if v_g.is_nan() || vg_floor.is_nan() || vg_floor < 0.0 {
        return Err(Error::invalid("v_g", format!("got v_g = {v_g}, floor = {vg_floor}")));
    }
    if v_g <= 0.0 || v_g < vg_floor {
        return Err(Error::BandEdge(format!(
            "group velocity {v_g:.6e} m/s is below the floor {vg_floor:.6e} m/s"
        )));
    }
    Ok(pump.omega_s * pump_amplitude(pump) * pump.chi2 / v_g)
}

/// v_g that gives ζ = `zeta_target` over `length`.
pub fn required_group_velocity(pump: &PumpSpec, zeta_target: f64, length: f64) -> Result<f64> {
    if !(zeta_target > 0.0 && zeta_target.is_finite()) {
        return Err(Error::invalid("zeta_target", format!("must be positive, got {zeta_target}")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::invalid("length", format!("must be positive, got {length}")));
    }
    Ok(pump.omega_s * pump_amplitude(pump) * pump.chi2 * length / zeta_target)
}

/// Length rescaled by the share of field energy in layer B,
/// l·(p_A + p_B)/p_B.
pub fn effective_length(length: f64, ratio: &EnergyRatio) -> Result<f64> {
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::invalid("length", format!("must be nonnegative, got {length}")));
    }
    if ratio.p_b <= 0.0 {
        return Err(Error::Degenerate("no field energy in layer B".into()));
    }
    Ok(length * (ratio.p_a + ratio.p_b) / ratio.p_b)
}

/// Squeezing in decibels, 20·r·log₁₀(e).
pub fn squeeze_db(r: f64) -> f64 {
    20.0 * r * LOG10_E
}

/// Everything `calibrate` reports for one crystal and pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationReport {
    /// V/m
    pub pump_amplitude: f64,
    pub zeta_target: f64,
    /// m/s
    pub required_v_g: f64,
    pub required_v_g_over_c: f64,
    pub band_index: usize,
    /// ωΛ/(2πc) at the k = 0 edge of the band
    pub edge_frequency: f64,
    /// v_g/c at the edge, 0 up to rounding
    pub edge_v_g_over_c: f64,
    pub energy_ratio: EnergyRatio,
    /// m
    pub length: f64,
    /// m
    pub effective_length: f64,
    pub squeeze_db: f64,
}

/// Runs the chain from pump to effective length on band `band_index` at k = 0.
pub fn calibrate(crystal: &CrystalSpec, pump: &PumpSpec, band_index: usize, zeta_target: f64) -> Result<CalibrationReport> {
    let length = crystal.total_length();
    let required_v_g = required_group_velocity(pump, zeta_target, length)?;
    let edge = band_point(crystal, 0.0, band_index, &BandSolverOptions::default())?;
    let edge_v_g = group_velocity(crystal, &edge)?;
    let mode = bloch_coefficients(crystal, &edge)?;
    let ratio = energy_ratio(crystal, &mode, edge.omega)?;
    Ok(CalibrationReport {
        pump_amplitude: pump_amplitude(pump),
        zeta_target,
        required_v_g,
        required_v_g_over_c: required_v_g / SPEED_OF_LIGHT,
        band_index,
        edge_frequency: crystal.normalized_frequency(edge.omega),
        edge_v_g_over_c: edge_v_g / SPEED_OF_LIGHT,
        energy_ratio: ratio,
        length,
        effective_length: effective_length(length, &ratio)?,
        squeeze_db: squeeze_db(zeta_target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump(power: f64) -> PumpSpec {
        PumpSpec::new(power, 5e-6, 25.2e-12, 1.0, 2.2e15, 0.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(PumpSpec::new(-1.0, 5e-6, 1e-12, 1.0, 1e15, 0.0).is_err());
        assert!(PumpSpec::new(1.0, 0.0, 1e-12, 1.0, 1e15, 0.0).is_err());
        assert!(PumpSpec::new(1.0, 5e-6, 1e-12, 0.9, 1e15, 0.0).is_err());
        assert!(PumpSpec::new(1.0, 5e-6, 1e-12, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn amplitude_scaling() {
        assert_eq!(pump_amplitude(&pump(0.0)), 0.0);
        let a = pump_amplitude(&pump(0.03));
        assert!((pump_amplitude(&pump(0.12)) / a - 2.0).abs() < 1e-12);
        let mut wide = pump(0.03);
        wide.beam_radius *= 2.0;
        assert!((a / pump_amplitude(&wide) - 2.0).abs() < 1e-12);
        let mut dense = pump(0.03);
        dense.refr_index = 4.0;
        assert!((a / pump_amplitude(&dense) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gain_is_inverse_in_vg() {
        let p = pump(0.03);
        let v = 1e6;
        let b1 = gain_coefficient(&p, v).unwrap();
        let b2 = gain_coefficient(&p, v / 2.0).unwrap();
        assert!((b2 / b1 - 2.0).abs() < 1e-12);
        assert_eq!(gain_coefficient(&pump(0.0), v).unwrap(), 0.0);
    }

    #[test]
    fn slow_light_floor() {
        let p = pump(0.03);
        assert!(matches!(gain_coefficient(&p, 0.0), Err(Error::BandEdge(_))));
        assert!(matches!(gain_coefficient(&p, 1e-6 * SPEED_OF_LIGHT), Err(Error::BandEdge(_))));
        assert!(gain_coefficient_with_floor(&p, 1e-6 * SPEED_OF_LIGHT, 0.0).is_ok());
    }

    #[test]
    fn round_trip() {
        let p = pump(0.03);
        for &(zeta, len) in &[(1.0, 5e-5), (0.3, 1e-4), (2.5, 2e-5)] {
            let v = required_group_velocity(&p, zeta, len).unwrap();
            let back = gain_coefficient(&p, v).unwrap() * len;
            assert!((back - zeta).abs() <= 1e-12 * zeta);
            let budget = SqueezeBudget::new(&p, v, len).unwrap();
            assert!((budget.zeta - zeta).abs() <= 1e-12 * zeta);
        }
        let v = required_group_velocity(&p, 1.0, 5e-5).unwrap();
        assert!((required_group_velocity(&p, 2.0, 5e-5).unwrap() - v / 2.0).abs() < 1e-9 * v);
        assert!((required_group_velocity(&p, 1.0, 1e-4).unwrap() - 2.0 * v).abs() < 1e-9 * v);
    }

    #[test]
    fn effective_length_limits() {
        let l = 5e-5;
        let all_b = EnergyRatio::from_weights(0.0, 1.0).unwrap();
        assert_eq!(effective_length(l, &all_b).unwrap(), l);
        let even = EnergyRatio::from_weights(1.0, 1.0).unwrap();
        assert!((effective_length(l, &even).unwrap() - 2.0 * l).abs() < 1e-20);
        let all_a = EnergyRatio::from_weights(1.0, 0.0).unwrap();
        assert!(matches!(effective_length(l, &all_a), Err(Error::Degenerate(_))));
    }

    #[test]
    fn decibels() {
        assert_eq!(squeeze_db(0.0), 0.0);
        assert!((squeeze_db(0.5) - 4.342_944_819).abs() < 1e-9);
    }
}
