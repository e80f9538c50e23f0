//! Semiclassical simulator of a magnetic-field-free radiation-pressure trap.
//!
//! Six circularly polarized beams diverge from foci placed at ±a on the
//! coordinate axes and cross at the origin. On a `J → J+1` transition with
//! `J ≥ 1/2`, position-dependent optical pumping redistributes the ground
//! Zeeman populations so that the six radiation-pressure forces no longer
//! cancel: displacement along any axis raises the intensity of the
//! polarization whose transitions are stronger for the restoring beam, and a
//! 3D restoring force results. No magnetic field is involved. With equal
//! helicities on all six beams the light stays effectively unpolarized to
//! first order and the trap disappears, as the optical Earnshaw theorem
//! demands for a scalar atom.
//!
//! The crate computes, in order of assembly:
//!
//! - exact rational line strengths of the transition ([`angular`]),
//! - the local intensity and polarization of the six-beam field ([`optics`]),
//! - steady-state ground populations under pumping rate equations ([`pumping`]),
//! - the resulting radiation-pressure force ([`force`]),
//! - linearized trap characteristics and parameter scans ([`trapchar`]),
//! - stochastic atom trajectories and cloud statistics ([`dynamics`]).
//!
//! A narrative walkthrough with runnable examples lives in the `book/`
//! directory; its code blocks double as doc-tests of this crate.

pub mod angular;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod force;
pub mod optics;
pub mod pumping;
pub mod trapchar;

pub use angular::{line_strengths, HalfInt, LineStrengthTable, Polarization, TransitionSpec};
pub use config::{parse_config, RunConfig};
pub use dynamics::{
    escape_fraction, run_ensemble, step, AtomSample, CloudStats, EnsembleOutcome, ForceModel,
    LinearForceModel, SimParams,
};
pub use error::{Result, TroopError};
pub use force::{radiation_force, single_wave_force, ForceSample, PumpingMode, Trap, TrapScratch};
pub use optics::{
    aggregate_field, anisotropy_axis, polarization_fractions, Beam, BeamSet, HelicityPattern,
    LocalField,
};
pub use pumping::{steady_state, transfer_matrix, GroundPopulations, PumpContext};
pub use trapchar::{
    characterize, earnshaw_flux, friction, mu_extract, scan, stiffness, ScanRow,
    TemperatureModel, TrapCharacterization,
};

// Book chapters run as doc-tests so the narrative and the library cannot
// drift apart. `cfg(doctest)` keeps them out of the compiled crate and the
// rendered API docs.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/line-strengths.md")]
    mod line_strengths {}
    #[doc = include_str!("../../../book/src/beam-geometry.md")]
    mod beam_geometry {}
    #[doc = include_str!("../../../book/src/optical-pumping.md")]
    mod optical_pumping {}
    #[doc = include_str!("../../../book/src/forces-and-stiffness.md")]
    mod forces_and_stiffness {}
    #[doc = include_str!("../../../book/src/cloud-dynamics.md")]
    mod cloud_dynamics {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
}
