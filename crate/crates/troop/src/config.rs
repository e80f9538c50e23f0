//! Run configuration: a flat-sectioned TOML document with every field
//! optional and defaulting to the reference cesium operating point.
//!
//! Storage is SI throughout; the config surface additionally accepts the
//! detuning and Rabi frequency in linewidth units (`detuning_over_gamma`,
//! `rabi_over_gamma`). Unknown keys are rejected. The full grammar is
//! documented in the book's configuration chapter.

use serde::{Deserialize, Serialize};

use crate::angular::{HalfInt, TransitionSpec};
use crate::constants;
use crate::dynamics::SimParams;
use crate::error::{Result, TroopError};
use crate::force::Trap;
use crate::optics::{BeamSet, HelicityPattern};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub transition: TransitionConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub operating_point: OperatingPointConfig,
    #[serde(default)]
    pub sim: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionConfig {
    /// Ground angular momentum; integer, `"9/2"` string, or x.5 float.
    pub jg: HalfInt,
    /// Natural linewidth, rad/s.
    pub gamma: f64,
    /// Transition wavelength, m.
    pub wavelength: f64,
    /// Atomic mass, kg.
    pub mass: f64,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        TransitionConfig {
            jg: HalfInt::from_integer(4),
            gamma: constants::CESIUM_D2_GAMMA,
            wavelength: constants::CESIUM_D2_WAVELENGTH,
            mass: constants::CESIUM_MASS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    /// Distance a from the center to each beam focus, m.
    pub focus_distance: f64,
    /// Beam divergence half-angle, degrees.
    pub half_angle_deg: f64,
    /// Helicity pattern (h_x, h_y, h_z), each ±1.
    pub helicity: [i8; 3],
    /// Per-beam Rabi multipliers in order X+, X−, Y+, Y−, Z+, Z−.
    pub rabi_multipliers: [f64; 6],
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            focus_distance: 0.035,
            half_angle_deg: 22.0,
            helicity: [-1, -1, 1],
            rabi_multipliers: [1.0; 6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OperatingPointConfig {
    /// Detuning in linewidth units δ/Γ (default −2).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_over_gamma: Option<f64>,
    /// Detuning in rad/s; exclusive with `detuning_over_gamma`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    /// Per-beam Rabi frequency in linewidth units Ω/Γ (default 0.8).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_over_gamma: Option<f64>,
    /// Per-beam Rabi frequency in rad/s; exclusive with `rabi_over_gamma`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n_atoms: usize,
    /// Integrator step, s.
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
    /// Diffusion budget factor η.
    pub diffusion_factor: f64,
    pub gravity: bool,
    pub burn_in_fraction: f64,
    /// Initial position spread σ, m.
    pub init_position_sigma: f64,
    /// Initial velocity spread σ, m/s.
    pub init_velocity_sigma: f64,
    /// Keep every n-th trajectory step (0 disables the dump).
    pub trajectory_stride: usize,
    /// Number of leading atoms whose trajectory is kept.
    pub trajectory_atoms: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_atoms: 500,
            dt: 2.5e-8,
            n_steps: 400_000,
            seed: 1,
            diffusion_factor: 2.0,
            gravity: false,
            burn_in_fraction: 0.5,
            init_position_sigma: 2e-4,
            init_velocity_sigma: 0.12,
            trajectory_stride: 0,
            trajectory_atoms: 0,
        }
    }
}

/// Parses and validates a TOML config; an empty document yields the full
/// default configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| TroopError::Config(format!("{e}")))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Checks every module precondition reachable from the configuration.
    pub fn validate(&self) -> Result<()> {
        if !self.transition.jg.is_valid_ground() {
            return Err(TroopError::Config(format!(
                "transition.jg: trap requires J_g ≥ 1/2, got {}",
                self.transition.jg
            )));
        }
        if !(self.transition.gamma > 0.0 && self.transition.gamma.is_finite()) {
            return Err(TroopError::Config(format!(
                "transition.gamma: must be positive, got {}",
                self.transition.gamma
            )));
        }
        if !(self.transition.wavelength > 0.0 && self.transition.wavelength.is_finite()) {
            return Err(TroopError::Config(format!(
                "transition.wavelength: must be positive, got {}",
                self.transition.wavelength
            )));
        }
        if !(self.transition.mass > 0.0 && self.transition.mass.is_finite()) {
            return Err(TroopError::Config(format!(
                "transition.mass: must be positive, got {}",
                self.transition.mass
            )));
        }
        if !(self.geometry.focus_distance > 0.0 && self.geometry.focus_distance.is_finite()) {
            return Err(TroopError::Config(format!(
                "geometry.focus_distance: must be positive, got {}",
                self.geometry.focus_distance
            )));
        }
        if !(self.geometry.half_angle_deg > 0.0 && self.geometry.half_angle_deg < 90.0) {
            return Err(TroopError::Config(format!(
                "geometry.half_angle_deg: must be in (0, 90), got {}",
                self.geometry.half_angle_deg
            )));
        }
        for h in self.geometry.helicity {
            if h != 1 && h != -1 {
                return Err(TroopError::Config(format!(
                    "geometry.helicity: entries must be ±1, got {h}"
                )));
            }
        }
        for m in self.geometry.rabi_multipliers {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(TroopError::Config(format!(
                    "geometry.rabi_multipliers: entries must be ≥ 0, got {m}"
                )));
            }
        }
        if self.operating_point.detuning.is_some() && self.operating_point.detuning_over_gamma.is_some() {
            return Err(TroopError::Config(
                "operating_point: set either detuning or detuning_over_gamma, not both".into(),
            ));
        }
        if self.operating_point.rabi.is_some() && self.operating_point.rabi_over_gamma.is_some() {
            return Err(TroopError::Config(
                "operating_point: set either rabi or rabi_over_gamma, not both".into(),
            ));
        }
        let rabi = self.rabi();
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(TroopError::Config(format!(
                "operating_point.rabi: must be ≥ 0, got {rabi}"
            )));
        }
        if !self.detuning().is_finite() {
            return Err(TroopError::Config("operating_point.detuning: must be finite".into()));
        }
        if self.sim.n_atoms == 0 {
            return Err(TroopError::Config("sim.n_atoms: must be ≥ 1".into()));
        }
        if self.sim.seed > i64::MAX as u64 {
            return Err(TroopError::Config(format!(
                "sim.seed: must fit a TOML integer (≤ {}), got {}",
                i64::MAX,
                self.sim.seed
            )));
        }
        if !(self.sim.dt > 0.0 && self.sim.dt.is_finite()) {
            return Err(TroopError::Config(format!("sim.dt: must be positive, got {}", self.sim.dt)));
        }
        if self.sim.n_steps == 0 {
            return Err(TroopError::Config("sim.n_steps: must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&self.sim.burn_in_fraction) {
            return Err(TroopError::Config(format!(
                "sim.burn_in_fraction: must be in [0, 1), got {}",
                self.sim.burn_in_fraction
            )));
        }
        if !(self.sim.diffusion_factor >= 0.0 && self.sim.diffusion_factor.is_finite()) {
            return Err(TroopError::Config(format!(
                "sim.diffusion_factor: must be ≥ 0, got {}",
                self.sim.diffusion_factor
            )));
        }
        if self.sim.init_position_sigma < 0.0 || self.sim.init_velocity_sigma < 0.0 {
            return Err(TroopError::Config("sim: initial spreads must be ≥ 0".into()));
        }
        Ok(())
    }

    /// Resolved detuning, rad/s.
    pub fn detuning(&self) -> f64 {
        match (self.operating_point.detuning, self.operating_point.detuning_over_gamma) {
            (Some(d), _) => d,
            (None, Some(dg)) => dg * self.transition.gamma,
            (None, None) => -2.0 * self.transition.gamma,
        }
    }

    /// Resolved per-beam Rabi frequency, rad/s.
    pub fn rabi(&self) -> f64 {
        match (self.operating_point.rabi, self.operating_point.rabi_over_gamma) {
            (Some(r), _) => r,
            (None, Some(rg)) => rg * self.transition.gamma,
            (None, None) => 0.8 * self.transition.gamma,
        }
    }

    pub fn transition_spec(&self) -> Result<TransitionSpec> {
        TransitionSpec::new(
            self.transition.jg,
            self.transition.gamma,
            2.0 * std::f64::consts::PI / self.transition.wavelength,
        )
    }

    pub fn beam_set(&self) -> Result<BeamSet> {
        let pattern = HelicityPattern::new(
            self.geometry.helicity[0],
            self.geometry.helicity[1],
            self.geometry.helicity[2],
        )?;
        BeamSet::new(
            self.geometry.focus_distance,
            self.geometry.half_angle_deg.to_radians(),
            pattern,
            self.rabi(),
        )?
        .with_rabi_multipliers(self.geometry.rabi_multipliers)
    }

    /// Builds the full force pipeline this configuration describes.
    pub fn build_trap(&self) -> Result<Trap> {
        Trap::new(self.beam_set()?, self.transition_spec()?, self.detuning())
    }

    pub fn sim_params(&self) -> SimParams {
        SimParams {
            n_atoms: self.sim.n_atoms,
            dt: self.sim.dt,
            n_steps: self.sim.n_steps,
            seed: self.sim.seed,
            mass: self.transition.mass,
            diffusion_factor: self.sim.diffusion_factor,
            gravity: self.sim.gravity,
            burn_in_fraction: self.sim.burn_in_fraction,
            init_position_sigma: self.sim.init_position_sigma,
            init_velocity_sigma: self.sim.init_velocity_sigma,
            trajectory_stride: self.sim.trajectory_stride,
            trajectory_atoms: self.sim.trajectory_atoms,
        }
    }

    /// Serializes the effective configuration; parsing the output yields an
    /// identical `RunConfig`.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| TroopError::Config(format!("{e}")))
    }
}
