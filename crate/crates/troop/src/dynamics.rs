//! Stochastic trajectory simulation and cloud statistics.
//!
//! Atoms follow coarse-grained Langevin dynamics: the mean radiation force
//! plus Gaussian momentum diffusion representing photon shot noise and
//! recoil. Scattering (≳10⁶/s) is far faster than the motional dynamics
//! (~ms), so per-photon kinetics is replaced by a continuous diffusion with
//! per-axis coefficient D(r) = η·(ħk)²·R_scatter(r)/3. The update is
//! Euler–Maruyama with the velocity advanced before the position.
//!
//! Atoms are independent. Every atom draws from its own counter-based RNG
//! stream derived from (seed, atom index), so results are bit-identical for
//! any worker partitioning.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{K_BOLTZMANN, STANDARD_GRAVITY};
use crate::error::{Result, TroopError};
use crate::force::{Trap, TrapScratch};

/// One atom's phase-space state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSample {
    /// Position, m.
    pub r: Vector3<f64>,
    /// Velocity, m/s.
    pub v: Vector3<f64>,
}

/// Force provider for the integrator. The production implementation is the
/// full optical-pumping pipeline; tests substitute analytic models.
pub trait ForceModel: Sync {
    /// Mean force (N) and total scattering rate (1/s) at (r, v).
    fn eval(&self, r: &Vector3<f64>, v: &Vector3<f64>, scratch: &mut TrapScratch)
        -> Result<(Vector3<f64>, f64)>;

    /// Photon recoil momentum ħk, kg·m/s; sets the diffusion scale.
    fn recoil_momentum(&self) -> f64;
}

impl ForceModel for Trap {
    fn eval(
        &self,
        r: &Vector3<f64>,
        v: &Vector3<f64>,
        scratch: &mut TrapScratch,
    ) -> Result<(Vector3<f64>, f64)> {
        let sample = self.force_at_with(r, v, scratch)?;
        Ok((sample.total, sample.scatter_rate_total))
    }

    fn recoil_momentum(&self) -> f64 {
        self.transition.recoil_momentum()
    }
}

/// Analytic damped-spring model with constant scattering: F = −κr − αv.
/// Used as the integrator oracle (Ornstein–Uhlenbeck reduction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearForceModel {
    /// Per-axis spring constant, N/m.
    pub stiffness: [f64; 3],
    /// Per-axis friction coefficient, N·s/m.
    pub friction: [f64; 3],
    /// Constant scattering rate, 1/s.
    pub scatter_rate: f64,
    /// Recoil momentum, kg·m/s.
    pub recoil: f64,
}

impl ForceModel for LinearForceModel {
    fn eval(
        &self,
        r: &Vector3<f64>,
        v: &Vector3<f64>,
        _scratch: &mut TrapScratch,
    ) -> Result<(Vector3<f64>, f64)> {
        let f = Vector3::new(
            -self.stiffness[0] * r.x - self.friction[0] * v.x,
            -self.stiffness[1] * r.y - self.friction[1] * v.y,
            -self.stiffness[2] * r.z - self.friction[2] * v.z,
        );
        Ok((f, self.scatter_rate))
    }

    fn recoil_momentum(&self) -> f64 {
        self.recoil
    }
}

/// Ensemble simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimParams {
    pub n_atoms: usize,
    /// Integrator step, s; must satisfy dt ≤ 0.1 / max scattering rate.
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Diffusion budget factor η; 2 = absorption shot noise plus isotropic
    /// emission recoil.
    pub diffusion_factor: f64,
    pub gravity: bool,
    /// Fraction of steps discarded before accumulating moments.
    pub burn_in_fraction: f64,
    /// Initial position spread (Gaussian σ per axis), m.
    pub init_position_sigma: f64,
    /// Initial velocity spread (Gaussian σ per axis), m/s; 0 starts at rest.
    pub init_velocity_sigma: f64,
    /// Keep every n-th step of the first `trajectory_atoms` atoms; 0 disables.
    pub trajectory_stride: usize,
    pub trajectory_atoms: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_atoms: 500,
            dt: 2.5e-8,
            n_steps: 400_000,
            seed: 1,
            mass: crate::constants::CESIUM_MASS,
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

impl SimParams {
    /// Validates against a force model; the step bound uses the scattering
    /// rate of an atom at rest at the center.
    pub fn validate<M: ForceModel>(&self, model: &M) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(TroopError::InvalidParameter("n_atoms must be ≥ 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(TroopError::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n_steps == 0 {
            return Err(TroopError::InvalidParameter("n_steps must be ≥ 1".into()));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(TroopError::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        if !(self.diffusion_factor >= 0.0 && self.diffusion_factor.is_finite()) {
            return Err(TroopError::InvalidParameter(format!(
                "diffusion_factor must be ≥ 0, got {}",
                self.diffusion_factor
            )));
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(TroopError::InvalidParameter(format!(
                "burn_in_fraction must be in [0, 1), got {}",
                self.burn_in_fraction
            )));
        }
        if self.init_position_sigma < 0.0 || self.init_velocity_sigma < 0.0 {
            return Err(TroopError::InvalidParameter("initial spreads must be ≥ 0".into()));
        }
        let mut scratch = TrapScratch::default();
        let (_, rate) = model.eval(&Vector3::zeros(), &Vector3::zeros(), &mut scratch)?;
        if rate > 0.0 && self.dt > 0.1 / rate {
            return Err(TroopError::InvalidParameter(format!(
                "dt = {:e} exceeds 0.1 / scattering rate = {:e}",
                self.dt,
                0.1 / rate
            )));
        }
        Ok(())
    }
}

/// One Euler–Maruyama step: v += (F/m)·dt + √(2D·dt)/m·ξ per axis, then
/// r += v·dt, with D = η·(ħk)²·R_scatter/3.
pub fn step<M: ForceModel>(
    state: &AtomSample,
    params: &SimParams,
    model: &M,
    scratch: &mut TrapScratch,
    rng: &mut impl Rng,
) -> Result<AtomSample> {
    let (mut force, scatter) = model.eval(&state.r, &state.v, scratch)?;
    if params.gravity {
        force.z -= params.mass * STANDARD_GRAVITY;
    }
    let recoil = model.recoil_momentum();
    let diffusion = params.diffusion_factor * recoil * recoil * scatter / 3.0;
    let kick = (2.0 * diffusion * params.dt).sqrt() / params.mass;
    let mut v = state.v + force * (params.dt / params.mass);
    if kick > 0.0 {
        let xi = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        v += kick * xi;
    }
    let r = state.r + v * params.dt;
    if !(r.iter().all(|x| x.is_finite()) && v.iter().all(|x| x.is_finite())) {
        return Err(TroopError::Numerical(format!(
            "non-finite state after step: r = {:?}, v = {:?}",
            r.as_slice(),
            v.as_slice()
        )));
    }
    Ok(AtomSample { r, v })
}

/// Second-moment statistics of the stationary cloud.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudStats {
    /// 1/√e density radius per axis: √⟨r_i²⟩, m.
    pub radius: [f64; 3],
    /// Kinetic temperature per axis: m⟨v_i²⟩/k_B, K.
    pub temperature: [f64; 3],
    /// √((⟨x²⟩+⟨y²⟩)/2) / √⟨z²⟩.
    pub aspect_ratio_xy_to_z: f64,
    /// k_B·T_i / ⟨r_i²⟩ per axis, J/m²; equals the stiffness for a harmonic
    /// stationary cloud.
    pub kappa_consistency: [f64; 3],
    /// Relative drift of ⟨r_i²⟩ between the two halves of the sampling
    /// window, per axis.
    pub moment_drift: [f64; 3],
    /// True when any axis drifted by more than 10% (non-stationarity).
    pub drift_warning: bool,
    /// Number of (atom, step) samples accumulated per axis.
    pub n_samples: u64,
}

/// One retained trajectory point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub atom: usize,
    pub r: [f64; 3],
    pub v: [f64; 3],
}

/// Ensemble result: stationary statistics, optional trajectory dump, and
/// the final phase-space states.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutcome {
    pub stats: CloudStats,
    pub trajectory: Vec<TrajectoryPoint>,
    pub final_states: Vec<AtomSample>,
}

#[derive(Default, Clone)]
struct AtomAccumulator {
    sum_r2_first: [f64; 3],
    sum_r2_second: [f64; 3],
    sum_v2: [f64; 3],
    n_first: u64,
    n_second: u64,
    trajectory: Vec<TrajectoryPoint>,
    last: Option<AtomSample>,
}

fn atom_rng(seed: u64, index: usize) -> ChaCha8Rng {
    // splitmix64 of (seed, index) decorrelates neighboring streams.
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

fn simulate_atom<M: ForceModel>(
    index: usize,
    params: &SimParams,
    model: &M,
) -> Result<AtomAccumulator> {
    let mut rng = atom_rng(params.seed, index);
    let mut scratch = TrapScratch::default();
    let gauss = |rng: &mut ChaCha8Rng, sigma: f64| -> Vector3<f64> {
        if sigma > 0.0 {
            sigma
                * Vector3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
        } else {
            Vector3::zeros()
        }
    };
    let mut state = AtomSample {
        r: gauss(&mut rng, params.init_position_sigma),
        v: gauss(&mut rng, params.init_velocity_sigma),
    };
    let burn_in = (params.n_steps as f64 * params.burn_in_fraction) as usize;
    let sample_steps = params.n_steps - burn_in;
    let keep_trajectory = params.trajectory_stride > 0 && index < params.trajectory_atoms;
    let mut acc = AtomAccumulator::default();
    for step_index in 0..params.n_steps {
        state = step(&state, params, model, &mut scratch, &mut rng)?;
        if keep_trajectory && step_index % params.trajectory_stride == 0 {
            acc.trajectory.push(TrajectoryPoint {
                t: (step_index + 1) as f64 * params.dt,
                atom: index,
                r: [state.r.x, state.r.y, state.r.z],
                v: [state.v.x, state.v.y, state.v.z],
            });
        }
        if step_index >= burn_in {
            let in_first_half = step_index - burn_in < sample_steps / 2;
            let bucket = if in_first_half { &mut acc.sum_r2_first } else { &mut acc.sum_r2_second };
            for i in 0..3 {
                bucket[i] += state.r[i] * state.r[i];
                acc.sum_v2[i] += state.v[i] * state.v[i];
            }
            if in_first_half {
                acc.n_first += 1;
            } else {
                acc.n_second += 1;
            }
        }
    }
    acc.last = Some(state);
    Ok(acc)
}

/// Evolves `n_atoms` independent atoms and accumulates stationary moments
/// over the post-burn-in window. Atoms run in parallel; the reduction order
/// is fixed by atom index, so the result is independent of the worker
/// partitioning.
pub fn run_ensemble<M: ForceModel>(params: &SimParams, model: &M) -> Result<EnsembleOutcome> {
    params.validate(model)?;
    let accumulators: Vec<AtomAccumulator> = (0..params.n_atoms)
        .into_par_iter()
        .map(|i| simulate_atom(i, params, model))
        .collect::<Result<Vec<_>>>()?;

    let mut sum_first = [0.0f64; 3];
    let mut sum_second = [0.0f64; 3];
    let mut sum_v2 = [0.0f64; 3];
    let mut n_first = 0u64;
    let mut n_second = 0u64;
    let mut trajectory = Vec::new();
    let mut final_states = Vec::with_capacity(params.n_atoms);
    for acc in &accumulators {
        for i in 0..3 {
            sum_first[i] += acc.sum_r2_first[i];
            sum_second[i] += acc.sum_r2_second[i];
            sum_v2[i] += acc.sum_v2[i];
        }
        n_first += acc.n_first;
        n_second += acc.n_second;
        trajectory.extend_from_slice(&acc.trajectory);
        final_states.push(acc.last.expect("atom simulated"));
    }
    let n_total = n_first + n_second;
    if n_total == 0 {
        return Err(TroopError::InvalidParameter(
            "no samples accumulated; increase n_steps or lower burn_in_fraction".into(),
        ));
    }

    let mut radius = [0.0f64; 3];
    let mut temperature = [0.0f64; 3];
    let mut kappa = [0.0f64; 3];
    let mut drift = [0.0f64; 3];
    for i in 0..3 {
        let mean_r2 = (sum_first[i] + sum_second[i]) / n_total as f64;
        let mean_v2 = sum_v2[i] / n_total as f64;
        radius[i] = mean_r2.sqrt();
        temperature[i] = params.mass * mean_v2 / K_BOLTZMANN;
        kappa[i] = if mean_r2 > 0.0 { K_BOLTZMANN * temperature[i] / mean_r2 } else { f64::NAN };
        if n_first > 0 && n_second > 0 {
            let h1 = sum_first[i] / n_first as f64;
            let h2 = sum_second[i] / n_second as f64;
            let mean = 0.5 * (h1 + h2);
            drift[i] = if mean > 0.0 { (h2 - h1).abs() / mean } else { 0.0 };
        }
    }
    let aspect = ((radius[0] * radius[0] + radius[1] * radius[1]) / 2.0).sqrt() / radius[2];
    let stats = CloudStats {
        radius,
        temperature,
        aspect_ratio_xy_to_z: aspect,
        kappa_consistency: kappa,
        moment_drift: drift,
        drift_warning: drift.iter().any(|&d| d > 0.10),
        n_samples: n_total,
    };
    Ok(EnsembleOutcome { stats, trajectory, final_states })
}

/// Fraction of atoms beyond `boundary` (m) at the end of the run.
/// Seed-deterministic: identical parameters give the identical fraction.
pub fn escape_fraction<M: ForceModel>(params: &SimParams, model: &M, boundary: f64) -> Result<f64> {
    if !(boundary > 0.0 && boundary.is_finite()) {
        return Err(TroopError::InvalidParameter(format!(
            "boundary must be positive, got {boundary}"
        )));
    }
    let outcome = run_ensemble(params, model)?;
    let escaped = outcome.final_states.iter().filter(|s| s.r.norm() > boundary).count();
    Ok(escaped as f64 / params.n_atoms as f64)
}
