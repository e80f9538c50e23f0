//! Linearized trap characterization: stiffness and friction tensors, the
//! dimensionless trapping coefficient μ, Earnshaw diagnostics, and parameter
//! scans.
//!
//! All derivatives are central finite differences of the force pipeline
//! around the trap center, optionally Richardson-extrapolated. Stiffness is
//! `K = −∂F/∂r` at v = 0 and friction `A = −∂F/∂v` at r = 0, both in SI.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::constants::K_BOLTZMANN;
use crate::error::{Result, TroopError};
use crate::force::{Trap, TrapScratch};

/// Characterization summary at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapCharacterization {
    /// Stiffness K = −∂F/∂r at the center, N/m.
    pub stiffness: Matrix3<f64>,
    /// Friction A = −∂F/∂v at the center, N·s/m.
    pub friction: Matrix3<f64>,
    /// μ extracted from the transverse axis, a·K_xx/F₀.
    pub mu_xi: f64,
    /// μ extracted from the strong axis, a·K_zz/(2F₀).
    pub mu_z: f64,
    /// Relative spread |μ_z − μ_ξ| / mean — a model-consistency diagnostic.
    pub mu_spread: f64,
    /// Single-wave reference force at the operating point, N.
    pub f0: f64,
    /// trace(K) with populations frozen uniform: the Earnshaw null, N/m.
    pub earnshaw_trace: f64,
}

/// μ values extracted from a stiffness tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuExtraction {
    pub mu_xi: f64,
    pub mu_z: f64,
    /// |μ_z − μ_ξ| relative to their mean.
    pub relative_spread: f64,
}

/// Stiffness tensor by Richardson-extrapolated central differences with base
/// step `h` (meters). `h` must lie in [10⁻⁶·a, 10⁻²·a].
pub fn stiffness(trap: &Trap, h: f64) -> Result<Matrix3<f64>> {
    stiffness_with_options(trap, h, true)
}

/// As [`stiffness`], optionally without Richardson extrapolation.
pub fn stiffness_with_options(trap: &Trap, h: f64, richardson: bool) -> Result<Matrix3<f64>> {
    let a = trap.beams.focus_distance();
    if !(h >= 1e-6 * a && h <= 1e-2 * a) {
        return Err(TroopError::InvalidParameter(format!(
            "finite-difference step {h} outside [1e-6·a, 1e-2·a] for a = {a}"
        )));
    }
    let mut scratch = TrapScratch::default();
    let v = Vector3::zeros();
    let mut column = |step: f64, axis: usize| -> Result<Vector3<f64>> {
        let mut r = Vector3::zeros();
        r[axis] = step;
        let fp = trap.force_at_with(&r, &v, &mut scratch)?.total;
        r[axis] = -step;
        let fm = trap.force_at_with(&r, &v, &mut scratch)?.total;
        Ok(-(fp - fm) / (2.0 * step))
    };
    let mut k = Matrix3::zeros();
    for axis in 0..3 {
        let d = if richardson {
            // D(h/2)·4/3 − D(h)/3 cancels the O(h²) error of the central stencil.
            let fine = column(h / 2.0, axis)?;
            let coarse = column(h, axis)?;
            (4.0 * fine - coarse) / 3.0
        } else {
            column(h, axis)?
        };
        k.set_column(axis, &d);
    }
    Ok(k)
}

/// Friction tensor by central differences in velocity with step `dv` (m/s).
/// `dv` must be far below the Doppler velocity scale Γ/k.
pub fn friction(trap: &Trap, dv: f64) -> Result<Matrix3<f64>> {
    let doppler_scale = trap.transition.gamma / trap.transition.k;
    if !(dv > 0.0 && dv <= 0.05 * doppler_scale) {
        return Err(TroopError::InvalidParameter(format!(
            "velocity step {dv} m/s must be positive and ≤ 0.05·Γ/k = {:.3e} m/s",
            0.05 * doppler_scale
        )));
    }
    if trap.beams.reference_rabi() == 0.0 {
        return Ok(Matrix3::zeros());
    }
    let mut scratch = TrapScratch::default();
    let r = Vector3::zeros();
    let mut a = Matrix3::zeros();
    for axis in 0..3 {
        let mut v = Vector3::zeros();
        v[axis] = dv;
        let fp = trap.force_at_with(&r, &v, &mut scratch)?.total;
        v[axis] = -dv;
        let fm = trap.force_at_with(&r, &v, &mut scratch)?.total;
        a.set_column(axis, &(-(fp - fm) / (2.0 * dv)));
    }
    Ok(a)
}

/// Extracts μ from a stiffness tensor via K_xx = μF₀/a and K_zz = 2μF₀/a.
pub fn mu_extract(k: &Matrix3<f64>, f0: f64, a: f64) -> Result<MuExtraction> {
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(TroopError::InvalidParameter(format!("F₀ must be positive, got {f0}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(TroopError::InvalidParameter(format!("focus distance must be positive, got {a}")));
    }
    for i in 0..3 {
        let off: f64 = (0..3).filter(|&j| j != i).map(|j| k[(i, j)].abs()).sum();
        if k[(i, i)].abs() < off {
            return Err(TroopError::InvalidParameter(format!(
                "stiffness tensor not diagonal-dominant in row {i}; μ extraction undefined"
            )));
        }
    }
    let mu_xi = a * k[(0, 0)] / f0;
    let mu_z = a * k[(2, 2)] / (2.0 * f0);
    let mean = 0.5 * (mu_xi + mu_z);
    let relative_spread = if mean.abs() > 0.0 { (mu_z - mu_xi).abs() / mean.abs() } else { 0.0 };
    Ok(MuExtraction { mu_xi, mu_z, relative_spread })
}

/// Surface integral ∮ F·n̂ dA over a sphere of the given radius centered on
/// the trap, by Gauss–Legendre quadrature in cos θ and the trapezoid rule in
/// azimuth. Negative flux means a net inward force.
pub fn earnshaw_flux(trap: &Trap, radius: f64, n_polar: usize) -> Result<f64> {
    let a = trap.beams.focus_distance();
    if !(radius > 0.0 && radius < 0.5 * a) {
        return Err(TroopError::InvalidParameter(format!(
            "flux radius {radius} must lie in (0, a/2) for a = {a}"
        )));
    }
    if n_polar < 2 {
        return Err(TroopError::InvalidParameter("need at least 2 polar nodes".into()));
    }
    let (nodes, weights) = gauss_legendre(n_polar);
    let n_azimuth = 2 * n_polar;
    let dphi = 2.0 * std::f64::consts::PI / n_azimuth as f64;
    let v = Vector3::zeros();
    let mut scratch = TrapScratch::default();
    let mut flux = 0.0;
    for (&u, &w) in nodes.iter().zip(weights.iter()) {
        let sin_theta = (1.0 - u * u).sqrt();
        for j in 0..n_azimuth {
            let phi = dphi * j as f64;
            let normal = Vector3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), u);
            let f = trap.force_at_with(&(radius * normal), &v, &mut scratch)?.total;
            flux += w * dphi * f.dot(&normal);
        }
    }
    Ok(flux * radius * radius)
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' at x via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Default characterization: FD step 10⁻⁴·a, velocity step 10⁻³·Γ/k.
pub fn characterize(trap: &Trap) -> Result<TrapCharacterization> {
    let a = trap.beams.focus_distance();
    let k = stiffness(trap, 1e-4 * a)?;
    let fric = friction(trap, 1e-3 * trap.transition.gamma / trap.transition.k)?;
    let f0 = trap.single_wave_force();
    // μ is undefined for non-trapping configurations; report NaN there
    // instead of failing the rest of the characterization.
    let mu = mu_extract(&k, f0, a).unwrap_or(MuExtraction {
        mu_xi: f64::NAN,
        mu_z: f64::NAN,
        relative_spread: f64::NAN,
    });
    let frozen_k = stiffness(&trap.frozen(), 1e-4 * a)?;
    Ok(TrapCharacterization {
        stiffness: k,
        friction: fric,
        mu_xi: mu.mu_xi,
        mu_z: mu.mu_z,
        mu_spread: mu.relative_spread,
        f0,
        earnshaw_trace: frozen_k.trace(),
    })
}

/// Temperature model used for the radius prediction k_B·T/K_ii in scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureModel {
    /// Externally supplied temperature, K.
    Fixed(f64),
    /// T = D/(k_B·Ā) from the computed friction and the recoil diffusion
    /// D = η(ħk)²·R_scatter/3, with Ā the mean friction diagonal.
    DopplerTheory {
        /// Diffusion budget factor η (2 = absorption + isotropic emission).
        diffusion_factor: f64,
    },
}

/// One row of a parameter scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    /// Detuning in linewidth units δ/Γ.
    pub delta_over_gamma: f64,
    /// Rabi frequency in linewidth units Ω/Γ.
    pub omega_over_gamma: f64,
    pub k_xx: f64,
    pub k_yy: f64,
    pub k_zz: f64,
    pub mu_xi: f64,
    pub mu_z: f64,
    /// Temperature used for the radius prediction, K.
    pub temperature: f64,
    /// Predicted 1/√e radii via r_i = √(k_B T / K_ii), m.
    pub radius_xy: f64,
    pub radius_z: f64,
    /// Present when this point failed; numeric fields are NaN then.
    pub error: Option<String>,
}

/// Characterizes the trap across a detuning × Rabi grid. Points run
/// independently (and in parallel); output order is deterministic by
/// (δ, Ω). Failed points yield NaN rows carrying the failure reason.
pub fn scan(
    template: &Trap,
    deltas_over_gamma: &[f64],
    omegas_over_gamma: &[f64],
    temperature: TemperatureModel,
) -> Result<Vec<ScanRow>> {
    if deltas_over_gamma.is_empty() || omegas_over_gamma.is_empty() {
        return Err(TroopError::InvalidParameter("scan ranges must be non-empty".into()));
    }
    let gamma = template.transition.gamma;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &d in deltas_over_gamma {
        for &o in omegas_over_gamma {
            points.push((d, o));
        }
    }
    use rayon::prelude::*;
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|&(dg, og)| scan_point(template, dg * gamma, og * gamma, temperature).unwrap_or_else(|e| ScanRow {
            delta_over_gamma: dg,
            omega_over_gamma: og,
            k_xx: f64::NAN,
            k_yy: f64::NAN,
            k_zz: f64::NAN,
            mu_xi: f64::NAN,
            mu_z: f64::NAN,
            temperature: f64::NAN,
            radius_xy: f64::NAN,
            radius_z: f64::NAN,
            error: Some(e.to_string()),
        }))
        .collect();
    Ok(rows)
}

fn scan_point(
    template: &Trap,
    delta: f64,
    omega: f64,
    temperature: TemperatureModel,
) -> Result<ScanRow> {
    let trap = template.with_operating_point(delta, omega)?;
    let a = trap.beams.focus_distance();
    let gamma = trap.transition.gamma;
    let k = stiffness(&trap, 1e-4 * a)?;
    let f0 = trap.single_wave_force();
    let mu = mu_extract(&k, f0, a)?;
    let t = match temperature {
        TemperatureModel::Fixed(t) => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(TroopError::InvalidParameter(format!("temperature must be positive, got {t}")));
            }
            t
        }
        TemperatureModel::DopplerTheory { diffusion_factor } => {
            let fric = friction(&trap, 1e-3 * gamma / trap.transition.k)?;
            let scatter = trap.scatter_rate_at_center()?;
            let recoil = trap.transition.recoil_momentum();
            let diffusion = diffusion_factor * recoil * recoil * scatter / 3.0;
            let mean_friction = fric.trace() / 3.0;
            if mean_friction <= 0.0 {
                return Err(TroopError::Numerical(
                    "non-damping friction; Doppler-theory temperature undefined".into(),
                ));
            }
            diffusion / (mean_friction * K_BOLTZMANN)
        }
    };
    let radius = |kii: f64| -> f64 {
        if kii > 0.0 {
            (K_BOLTZMANN * t / kii).sqrt()
        } else {
            f64::NAN
        }
    };
    Ok(ScanRow {
        delta_over_gamma: delta / gamma,
        omega_over_gamma: omega / gamma,
        k_xx: k[(0, 0)],
        k_yy: k[(1, 1)],
        k_zz: k[(2, 2)],
        mu_xi: mu.mu_xi,
        mu_z: mu.mu_z,
        temperature: t,
        radius_xy: radius(0.5 * (k[(0, 0)] + k[(1, 1)])),
        radius_z: radius(k[(2, 2)]),
        error: None,
    })
}
