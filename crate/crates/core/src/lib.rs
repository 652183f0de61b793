//! Heralded single-photon source statistics in a truncated Fock space, and
//! the band structure of the layered crystal that hosts the squeezing.

pub mod calibration;
pub mod constants;
pub mod crystal;
pub mod error;
pub mod fock;
pub mod mathutil;
pub mod oracle;
pub mod preset;
pub mod quadrature;
pub mod source;
pub mod sweep;

pub use calibration::{
    calibrate, effective_length, gain_coefficient, gain_coefficient_with_floor, pump_amplitude, required_group_velocity,
    squeeze_db, CalibrationReport, PumpSpec, SqueezeBudget,
};
pub use constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
pub use crystal::{
    band_point, bloch_coefficients, dispersion_matrix, dispersion_residual, energy_ratio, frequencies_at,
    frequency_window, frequency_window_with, group_velocity, residual_partials, solve_bands, solve_bands_with,
    BandPoint, BandSolverOptions, BandStructure, BlochMode, CrystalSpec, EnergyRatio, FrequencyWindow,
};
pub use error::{Error, Result};
pub use fock::{
    displacement_column, prepare_final_state, prepare_final_state_adaptive, two_mode_squeeze_element,
    BeamSplitterSpec, DisplaceSpec, FockCutoff, SingleModeAmplitudes, SqueezeSpec, TwoModeAmplitudes,
};
pub use oracle::{expm, two_mode_oracle, Generator, OracleOperator};
pub use preset::{preset, Preset};
pub use source::{
    click_distribution, g2_click, g2_perfect, herald_distribution, joint_probability, povm_click_weight,
    povm_weight_deficit, CountDistribution, JointTable, Moments, SourceParams,
};
pub use sweep::{linspace, sweep_grid, Quantity, SweepRow};
