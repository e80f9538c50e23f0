//! Radiation-pressure force on an atom with a given internal state.
//!
//! Each beam contributes ħk per scattering event along its local ray; the
//! per-beam scattering rate is the unit-line rate times the population
//! overlap Σ_q p_{b,q} Σ_m π_m s(m, q). Spontaneous emission is isotropic on
//! average and contributes no mean force. Beams act independently
//! (no cross-saturation), matching the incoherent field model.

use nalgebra::Vector3;

use crate::angular::{line_strengths, LineStrengthTable, TransitionSpec};
use crate::constants::HBAR;
use crate::error::{Result, TroopError};
use crate::optics::{aggregate_field, anisotropy_axis, BeamSet, LocalField};
use crate::pumping::{
    fill_transfer_matrix, solve_steady_state, steady_state, transfer_matrix, GroundPopulations,
    PumpContext,
};

/// Force and scattering diagnostics at one phase-space point.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceSample {
    /// Total force, N.
    pub total: Vector3<f64>,
    /// Per-beam contributions in beam order, N.
    pub per_beam: [Vector3<f64>; 6],
    /// Total photon scattering rate, 1/s.
    pub scatter_rate_total: f64,
}

/// Internal-state treatment used by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PumpingMode {
    /// Populations follow the local steady state of the rate equations.
    #[default]
    SteadyState,
    /// Populations frozen uniform: a scalar-polarizability reference atom.
    /// The six-beam force field is then divergence-free and cannot trap.
    FrozenUniform,
}

/// Force of a single wave of Rabi frequency `omega` and detuning `delta` on
/// a resonant unit-strength line: F₀ = ħkΓ·Ω²/(Γ² + 4δ²).
pub fn single_wave_force(spec: &TransitionSpec, omega: f64, delta: f64) -> f64 {
    HBAR * spec.k * spec.gamma * omega * omega / (spec.gamma * spec.gamma + 4.0 * delta * delta)
}

/// Force from explicit populations and an already-decomposed field.
///
/// `ctx` must have been built for the same point and `pops` for the same
/// quantization axis as `field`.
pub fn radiation_force(
    spec: &TransitionSpec,
    lines: &LineStrengthTable,
    field: &LocalField,
    ctx: &PumpContext,
    pops: &GroundPopulations,
) -> Result<ForceSample> {
    let sum: f64 = pops.values().iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(TroopError::UnnormalizedPopulations { sum });
    }
    if pops.len() != lines.n_ground() {
        return Err(TroopError::InvalidField(format!(
            "population vector has {} entries for {} sublevels",
            pops.len(),
            lines.n_ground()
        )));
    }
    let overlap = pops.strength_overlap(lines);
    let hbar_k = HBAR * spec.k;
    let mut per_beam = [Vector3::zeros(); 6];
    let mut total = Vector3::zeros();
    let mut scatter = 0.0;
    for ((out, contrib), &rate) in per_beam.iter_mut().zip(field.per_beam.iter()).zip(&ctx.rates) {
        let beam_scatter = rate
            * (contrib.fractions[0] * overlap[0]
                + contrib.fractions[1] * overlap[1]
                + contrib.fractions[2] * overlap[2]);
        *out = hbar_k * beam_scatter * contrib.direction;
        total += *out;
        scatter += beam_scatter;
    }
    Ok(ForceSample { total, per_beam, scatter_rate_total: scatter })
}

/// The assembled force pipeline: geometry, transition, line strengths,
/// operating detuning, and the internal-state mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Trap {
    pub beams: BeamSet,
    pub transition: TransitionSpec,
    pub lines: LineStrengthTable,
    /// Laser detuning δ = ω_L − ω_A, rad/s (red = negative).
    pub detuning: f64,
    pub mode: PumpingMode,
}

/// Reusable buffers for the force pipeline; one per worker thread.
#[derive(Debug, Clone, Default)]
pub struct TrapScratch {
    matrix: Vec<f64>,
    pops: Vec<f64>,
}

impl Trap {
    pub fn new(beams: BeamSet, transition: TransitionSpec, detuning: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(TroopError::InvalidParameter("detuning must be finite".into()));
        }
        let lines = line_strengths(&transition)?;
        Ok(Trap { beams, transition, lines, detuning, mode: PumpingMode::SteadyState })
    }

    /// The same trap with populations frozen uniform.
    pub fn frozen(&self) -> Trap {
        Trap { mode: PumpingMode::FrozenUniform, ..self.clone() }
    }

    /// The same trap at a different operating point.
    pub fn with_operating_point(&self, detuning: f64, rabi: f64) -> Result<Trap> {
        let beams = self.beams.with_reference_rabi(rabi)?;
        Ok(Trap { beams, detuning, ..self.clone() })
    }

    /// F₀ at this trap's operating point (nominal Ω, its own δ).
    pub fn single_wave_force(&self) -> f64 {
        single_wave_force(&self.transition, self.beams.reference_rabi(), self.detuning)
    }

    /// Quantization axis used at `r` (light-spin anisotropy, lab-Z fallback).
    pub fn quantization_axis(&self, r: &Vector3<f64>) -> Vector3<f64> {
        anisotropy_axis(&self.beams, r)
    }

    /// Decomposed field at `r` on an explicit axis.
    pub fn local_field(&self, r: &Vector3<f64>, quant_axis: &Vector3<f64>) -> Result<LocalField> {
        aggregate_field(&self.beams, r, quant_axis)
    }

    /// Internal state at (r, v) along with the axis it refers to.
    pub fn populations_at(
        &self,
        r: &Vector3<f64>,
        v: &Vector3<f64>,
    ) -> Result<(GroundPopulations, Vector3<f64>)> {
        let field = crate::optics::decompose_auto_axis(&self.beams, r)?;
        let axis = field.quant_axis;
        match self.mode {
            PumpingMode::FrozenUniform => Ok((GroundPopulations::uniform(self.lines.n_ground()), axis)),
            PumpingMode::SteadyState => {
                let ctx = PumpContext::new(
                    &self.transition,
                    &field,
                    self.beams.reference_rabi(),
                    self.detuning,
                    *v,
                );
                let m = transfer_matrix(&field, &ctx, &self.lines)?;
                Ok((steady_state(&m)?, axis))
            }
        }
    }

    /// One-call pipeline: axis → field → steady state → force.
    pub fn force_at(&self, r: &Vector3<f64>, v: &Vector3<f64>) -> Result<ForceSample> {
        let mut scratch = TrapScratch::default();
        self.force_at_with(r, v, &mut scratch)
    }

    /// As [`Trap::force_at`] with caller-provided buffers; the hot path for
    /// trajectory integration.
    pub fn force_at_with(
        &self,
        r: &Vector3<f64>,
        v: &Vector3<f64>,
        scratch: &mut TrapScratch,
    ) -> Result<ForceSample> {
        let field = crate::optics::decompose_auto_axis(&self.beams, r)?;
        let ctx = PumpContext::new(
            &self.transition,
            &field,
            self.beams.reference_rabi(),
            self.detuning,
            *v,
        );
        let n = self.lines.n_ground();
        scratch.pops.resize(n, 0.0);
        match self.mode {
            PumpingMode::FrozenUniform => scratch.pops.fill(1.0 / n as f64),
            PumpingMode::SteadyState => {
                scratch.matrix.resize(n * n, 0.0);
                fill_transfer_matrix(&field, &ctx, &self.lines, &mut scratch.matrix)?;
                if let Err(err) = solve_steady_state(&mut scratch.matrix, &mut scratch.pops) {
                    // Cold path: rebuild for an honest degeneracy diagnostic.
                    if matches!(err, TroopError::DegenerateSteadyState { .. }) {
                        let m = transfer_matrix(&field, &ctx, &self.lines)?;
                        steady_state(&m)?;
                    }
                    return Err(err);
                }
            }
        }

        // Inline force accumulation from the scratch populations.
        let mut overlap = [0.0f64; 3];
        for (i, &p) in scratch.pops.iter().enumerate() {
            let row = self.lines.s_abs_row_f64(i);
            overlap[0] += p * row[0];
            overlap[1] += p * row[1];
            overlap[2] += p * row[2];
        }
        let hbar_k = HBAR * self.transition.k;
        let mut per_beam = [Vector3::zeros(); 6];
        let mut total = Vector3::zeros();
        let mut scatter = 0.0;
        for ((out, contrib), &rate) in
            per_beam.iter_mut().zip(field.per_beam.iter()).zip(&ctx.rates)
        {
            let beam_scatter = rate
                * (contrib.fractions[0] * overlap[0]
                    + contrib.fractions[1] * overlap[1]
                    + contrib.fractions[2] * overlap[2]);
            *out = hbar_k * beam_scatter * contrib.direction;
            total += *out;
            scatter += beam_scatter;
        }
        Ok(ForceSample { total, per_beam, scatter_rate_total: scatter })
    }

    /// Scattering rate for an atom at rest at the center; sets the
    /// integrator step bound.
    pub fn scatter_rate_at_center(&self) -> Result<f64> {
        Ok(self.force_at(&Vector3::zeros(), &Vector3::zeros())?.scatter_rate_total)
    }
}
