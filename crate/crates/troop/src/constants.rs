//! Physical constants and cesium D2 reference data.
//!
//! SI units throughout. The exact values (`HBAR`, `K_BOLTZMANN`) follow the
//! 2019 SI redefinition; the cesium numbers are the usual D2-line reference
//! data, rounded as quoted below. Everything here can be overridden through
//! the run configuration; these are only defaults.

/// Reduced Planck constant, J·s (exact, 2019 SI).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact, 2019 SI).
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Standard gravitational acceleration, m/s².
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// Mass of a cesium-133 atom, kg (132.905 u, CODATA).
pub const CESIUM_MASS: f64 = 2.206_946_5e-25;

/// Natural linewidth of the cesium D2 line, rad/s (2π · 5.2 MHz).
pub const CESIUM_D2_GAMMA: f64 = 2.0 * std::f64::consts::PI * 5.2e6;

/// Cesium D2 wavelength, m (852 nm).
pub const CESIUM_D2_WAVELENGTH: f64 = 852e-9;

/// Cesium D2 vacuum wavevector magnitude, 1/m.
pub const CESIUM_D2_WAVEVECTOR: f64 = 2.0 * std::f64::consts::PI / CESIUM_D2_WAVELENGTH;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavevector_matches_wavelength() {
        assert!((CESIUM_D2_WAVEVECTOR * CESIUM_D2_WAVELENGTH - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
