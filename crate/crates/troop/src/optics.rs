//! Six-beam divergent geometry and local polarization decomposition.
//!
//! Each trap beam is modeled as a point-source spherical wave clipped to a
//! cone: uniform over the cone, intensity falling as 1/d² from the focus,
//! normalized to the configured Rabi frequency at the trap center. Beams add
//! incoherently; interference between beams is outside the model. The local
//! field is summarized per beam by a propagation direction, an intensity
//! weight, and the (σ−, π, σ+) fractions relative to a quantization axis.

use nalgebra::Vector3;

use crate::error::{Result, TroopError};

/// Relative norm below which the light-spin anisotropy is treated as zero
/// and the quantization axis falls back to lab Z.
pub const ANISOTROPY_EPSILON: f64 = 1e-12;

/// One divergent circularly polarized beam.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    /// Focus position, m.
    pub focus: Vector3<f64>,
    /// Unit vector from the focus through the trap center.
    pub propagation: Vector3<f64>,
    /// Photon spin projection on the propagation direction, ±1.
    pub helicity: i8,
    /// Rabi frequency this beam produces at the trap center, rad/s.
    pub rabi_center: f64,
    /// Divergence cone half-angle, rad.
    pub half_angle: f64,
}

impl Beam {
    pub fn new(
        focus: Vector3<f64>,
        propagation: Vector3<f64>,
        helicity: i8,
        rabi_center: f64,
        half_angle: f64,
    ) -> Result<Self> {
        let norm = propagation.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(TroopError::InvalidBeam("propagation direction must be nonzero".into()));
        }
        if helicity != 1 && helicity != -1 {
            return Err(TroopError::InvalidBeam(format!("helicity must be ±1, got {helicity}")));
        }
        if !(rabi_center >= 0.0 && rabi_center.is_finite()) {
            return Err(TroopError::InvalidBeam(format!("rabi_center must be ≥ 0, got {rabi_center}")));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(TroopError::InvalidBeam(format!(
                "half_angle must be in (0, π/2), got {half_angle}"
            )));
        }
        Ok(Beam { focus, propagation: propagation / norm, helicity, rabi_center, half_angle })
    }

    /// Local ray direction and geometric intensity weight at `r`.
    ///
    /// The weight is (a/d)² inside the divergence cone and 0 outside, with
    /// `a` the focus distance from the trap center and `d = |r − focus|`.
    pub fn local(&self, r: &Vector3<f64>) -> Result<(Vector3<f64>, f64)> {
        let d = r - self.focus;
        let dist = d.norm();
        if dist == 0.0 {
            return Err(TroopError::AtBeamFocus);
        }
        let direction = d / dist;
        let a = self.focus.norm();
        let weight = if direction.dot(&self.propagation) >= self.half_angle.cos() {
            (a / dist).powi(2)
        } else {
            0.0
        };
        Ok((direction, weight))
    }
}

/// Helicity assignment (h_x, h_y, h_z), one value per counterpropagating pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HelicityPattern {
    pub hx: i8,
    pub hy: i8,
    pub hz: i8,
}

impl HelicityPattern {
    /// The trapping pattern h_z = −h_x = −h_y = 1.
    pub const TRAPPING: HelicityPattern = HelicityPattern { hx: -1, hy: -1, hz: 1 };

    /// All six waves share one helicity; no trapping force arises.
    pub const UNIFORM: HelicityPattern = HelicityPattern { hx: 1, hy: 1, hz: 1 };

    pub fn new(hx: i8, hy: i8, hz: i8) -> Result<Self> {
        for h in [hx, hy, hz] {
            if h != 1 && h != -1 {
                return Err(TroopError::InvalidBeam(format!("helicity must be ±1, got {h}")));
            }
        }
        Ok(HelicityPattern { hx, hy, hz })
    }

    /// True when the pattern can trap: exactly one pair differs from the other two.
    pub fn is_trapping(&self) -> bool {
        (self.hx + self.hy + self.hz).abs() == 1
    }
}

/// The six trap beams: counterpropagating pairs along X, Y, Z with foci at
/// ±a on each axis, each pair sharing one helicity (σ+–σ− configuration).
///
/// Beam order is X+, X−, Y+, Y−, Z+, Z−, where the `+` member has its focus
/// on the positive half-axis and propagates toward negative coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSet {
    beams: [Beam; 6],
    /// Nominal per-beam Rabi frequency at the center, rad/s; weights are
    /// quoted relative to the intensity this value implies.
    reference_rabi: f64,
    focus_distance: f64,
    half_angle: f64,
    pattern: HelicityPattern,
    /// Cached cos(half_angle) per beam for the cone test.
    cos_half: [f64; 6],
    /// Cached power ratios (Ω_b/Ω_ref)² per beam.
    power: [f64; 6],
}

impl BeamSet {
    /// Builds six equal beams with foci at ±a on the coordinate axes.
    pub fn new(
        focus_distance: f64,
        half_angle: f64,
        pattern: HelicityPattern,
        rabi_center: f64,
    ) -> Result<Self> {
        if !(focus_distance > 0.0 && focus_distance.is_finite()) {
            return Err(TroopError::InvalidBeam(format!(
                "focus_distance must be positive, got {focus_distance}"
            )));
        }
        let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
        let hs = [pattern.hx, pattern.hy, pattern.hz];
        let mut beams = Vec::with_capacity(6);
        for (axis, h) in axes.iter().zip(hs) {
            for sign in [1.0, -1.0] {
                beams.push(Beam::new(
                    sign * focus_distance * axis,
                    -sign * axis,
                    h,
                    rabi_center,
                    half_angle,
                )?);
            }
        }
        let mut set = BeamSet {
            beams: beams.try_into().expect("six beams"),
            reference_rabi: rabi_center,
            focus_distance,
            half_angle,
            pattern,
            cos_half: [0.0; 6],
            power: [0.0; 6],
        };
        set.refresh_caches();
        Ok(set)
    }

    fn refresh_caches(&mut self) {
        for (i, beam) in self.beams.iter().enumerate() {
            self.cos_half[i] = beam.half_angle.cos();
            self.power[i] = if self.reference_rabi > 0.0 {
                (beam.rabi_center / self.reference_rabi).powi(2)
            } else {
                0.0
            };
        }
    }

    /// Scales each beam's Rabi frequency by the given factors (intensity
    /// imbalance studies). The reference stays at the nominal value.
    pub fn with_rabi_multipliers(mut self, multipliers: [f64; 6]) -> Result<Self> {
        for (beam, m) in self.beams.iter_mut().zip(multipliers) {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(TroopError::InvalidBeam(format!("rabi multiplier must be ≥ 0, got {m}")));
            }
            beam.rabi_center = self.reference_rabi * m;
        }
        self.refresh_caches();
        Ok(self)
    }

    /// Same geometry with a different nominal Rabi frequency; per-beam
    /// multipliers are preserved.
    pub fn with_reference_rabi(&self, rabi: f64) -> Result<Self> {
        let mut mults = [0.0; 6];
        for (m, b) in mults.iter_mut().zip(&self.beams) {
            *m = if self.reference_rabi > 0.0 { b.rabi_center / self.reference_rabi } else { 0.0 };
        }
        BeamSet::new(self.focus_distance, self.half_angle, self.pattern, rabi)?.with_rabi_multipliers(mults)
    }

    pub fn beams(&self) -> &[Beam; 6] {
        &self.beams
    }

    pub fn reference_rabi(&self) -> f64 {
        self.reference_rabi
    }

    pub fn focus_distance(&self) -> f64 {
        self.focus_distance
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn pattern(&self) -> HelicityPattern {
        self.pattern
    }
}

/// Intensity fractions (σ−, π, σ+) of one circularly polarized ray relative
/// to a quantization axis.
///
/// With `c = direction·axis` and helicity `h`: p± = (1 ± h·c)²/4 and
/// pπ = (1 − c²)/2, which always sum to 1. The sign convention is fixed by
/// requiring that the six-beam aggregate reproduces the on-axis intensity
/// relations of the trapping pattern.
pub fn polarization_fractions(
    helicity: i8,
    direction: &Vector3<f64>,
    quant_axis: &Vector3<f64>,
) -> [f64; 3] {
    let c = direction.dot(quant_axis) / (direction.norm() * quant_axis.norm());
    let hc = helicity as f64 * c;
    let p_plus = (1.0 + hc) * (1.0 + hc) / 4.0;
    let p_minus = (1.0 - hc) * (1.0 - hc) / 4.0;
    let p_pi = (1.0 - c * c) / 2.0;
    [p_minus, p_pi, p_plus]
}

/// Per-beam contribution to the local field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamContribution {
    /// Local ray direction, unit vector.
    pub direction: Vector3<f64>,
    /// Intensity weight relative to one nominal beam at the center,
    /// including the beam's own power multiplier.
    pub weight: f64,
    /// (σ−, π, σ+) fractions relative to the chosen quantization axis.
    pub fractions: [f64; 3],
}

/// The decomposed light field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalField {
    pub per_beam: [BeamContribution; 6],
    /// Aggregate σ− intensity in units of one nominal center beam.
    pub i_sigma_minus: f64,
    pub i_pi: f64,
    pub i_sigma_plus: f64,
    /// Quantization axis the fractions refer to.
    pub quant_axis: Vector3<f64>,
}

impl LocalField {
    /// Aggregate intensity for polarization index q (0 = σ−, 1 = π, 2 = σ+).
    pub fn intensity(&self, q: usize) -> f64 {
        [self.i_sigma_minus, self.i_pi, self.i_sigma_plus][q]
    }

    /// Total intensity in nominal center-beam units.
    pub fn total_intensity(&self) -> f64 {
        self.i_sigma_minus + self.i_pi + self.i_sigma_plus
    }
}

/// Decomposes the light of all six beams at `r` onto `quant_axis`.
///
/// Fails with [`TroopError::OutsideIlluminatedRegion`] if every beam weight
/// vanishes and with [`TroopError::AtBeamFocus`] exactly at a focus.
pub fn aggregate_field(set: &BeamSet, r: &Vector3<f64>, quant_axis: &Vector3<f64>) -> Result<LocalField> {
    let axis = normalize_axis(quant_axis)?;
    let reference = set.reference_rabi;
    let mut per_beam = [BeamContribution {
        direction: Vector3::zeros(),
        weight: 0.0,
        fractions: [0.0; 3],
    }; 6];
    let mut agg = [0.0; 3];
    let mut total = 0.0;
    for (out, beam) in per_beam.iter_mut().zip(set.beams.iter()) {
        let (direction, geometric) = beam.local(r)?;
        let power = if reference > 0.0 { (beam.rabi_center / reference).powi(2) } else { 0.0 };
        let weight = geometric * power;
        let fractions = polarization_fractions(beam.helicity, &direction, &axis);
        *out = BeamContribution { direction, weight, fractions };
        for q in 0..3 {
            agg[q] += weight * fractions[q];
        }
        total += weight;
    }
    if total == 0.0 {
        return Err(TroopError::OutsideIlluminatedRegion);
    }
    Ok(LocalField {
        per_beam,
        i_sigma_minus: agg[0],
        i_pi: agg[1],
        i_sigma_plus: agg[2],
        quant_axis: axis,
    })
}

/// Single-pass field decomposition on the anisotropy axis: computes beam
/// geometry once, derives the axis from the spin sum, then the fractions.
/// This is the pipeline hot path.
pub(crate) fn decompose_auto_axis(set: &BeamSet, r: &Vector3<f64>) -> Result<LocalField> {
    let a2 = set.focus_distance * set.focus_distance;
    let mut dirs = [Vector3::zeros(); 6];
    let mut weights = [0.0f64; 6];
    let mut spin = Vector3::zeros();
    let mut total = 0.0;
    for (i, beam) in set.beams.iter().enumerate() {
        let d = r - beam.focus;
        let dist2 = d.norm_squared();
        if dist2 == 0.0 {
            return Err(TroopError::AtBeamFocus);
        }
        let inv_dist = dist2.sqrt().recip();
        let direction = d * inv_dist;
        let w = if direction.dot(&beam.propagation) >= set.cos_half[i] {
            a2 * inv_dist * inv_dist * set.power[i]
        } else {
            0.0
        };
        dirs[i] = direction;
        weights[i] = w;
        spin += (beam.helicity as f64 * w) * direction;
        total += w;
    }
    if total == 0.0 {
        return Err(TroopError::OutsideIlluminatedRegion);
    }
    let norm = spin.norm();
    let axis = if norm < ANISOTROPY_EPSILON * total { Vector3::z() } else { spin / norm };

    let mut per_beam = [BeamContribution {
        direction: Vector3::zeros(),
        weight: 0.0,
        fractions: [0.0; 3],
    }; 6];
    let mut agg = [0.0f64; 3];
    for i in 0..6 {
        let c = dirs[i].dot(&axis);
        let hc = set.beams[i].helicity as f64 * c;
        let fractions = [
            (1.0 - hc) * (1.0 - hc) * 0.25,
            (1.0 - c * c) * 0.5,
            (1.0 + hc) * (1.0 + hc) * 0.25,
        ];
        per_beam[i] = BeamContribution { direction: dirs[i], weight: weights[i], fractions };
        agg[0] += weights[i] * fractions[0];
        agg[1] += weights[i] * fractions[1];
        agg[2] += weights[i] * fractions[2];
    }
    Ok(LocalField {
        per_beam,
        i_sigma_minus: agg[0],
        i_pi: agg[1],
        i_sigma_plus: agg[2],
        quant_axis: axis,
    })
}

/// Quantization axis from the light-spin anisotropy Σ_b h_b·w_b·n̂_b,
/// normalized; falls back to lab Z when the anisotropy is negligible
/// (relative to the total weight) or the point is unlit.
pub fn anisotropy_axis(set: &BeamSet, r: &Vector3<f64>) -> Vector3<f64> {
    let reference = set.reference_rabi;
    let mut spin = Vector3::zeros();
    let mut total = 0.0;
    for beam in &set.beams {
        let Ok((direction, geometric)) = beam.local(r) else {
            return Vector3::z();
        };
        let power = if reference > 0.0 { (beam.rabi_center / reference).powi(2) } else { 0.0 };
        let w = geometric * power;
        spin += beam.helicity as f64 * w * direction;
        total += w;
    }
    let norm = spin.norm();
    if norm < ANISOTROPY_EPSILON * total.max(f64::MIN_POSITIVE) {
        Vector3::z()
    } else {
        spin / norm
    }
}

fn normalize_axis(axis: &Vector3<f64>) -> Result<Vector3<f64>> {
    let n = axis.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(TroopError::InvalidField("quantization axis must be a nonzero vector".into()));
    }
    Ok(axis / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn paper_set(a: f64) -> BeamSet {
        BeamSet::new(a, 22f64.to_radians(), HelicityPattern::TRAPPING, 1.0).unwrap()
    }

    #[test]
    fn beam_local_center_normalization() {
        let set = paper_set(0.035);
        for beam in set.beams() {
            let (dir, w) = beam.local(&Vector3::zeros()).unwrap();
            assert_relative_eq!(dir, beam.propagation, epsilon = 1e-15);
            assert_relative_eq!(w, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn beam_local_inverse_square() {
        let a = 0.035;
        let set = paper_set(a);
        // 2a beyond the center on the beam axis: distance 3a from the focus.
        let beam = &set.beams()[0]; // X+, focus +a x̂, propagates −x̂
        let (_, w) = beam.local(&Vector3::new(-2.0 * a, 0.0, 0.0)).unwrap();
        assert_relative_eq!(w, 1.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn beam_local_cone_clipping() {
        let a = 0.035;
        let set = paper_set(a);
        let beam = &set.beams()[0];
        // 30° off-axis as seen from the focus, outside the 22° cone.
        let d = 0.5 * a;
        let r = beam.focus
            + d * (30f64.to_radians().cos() * beam.propagation
                + 30f64.to_radians().sin() * Vector3::z());
        let (_, w) = beam.local(&r).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn beam_local_focus_is_singular() {
        let set = paper_set(0.035);
        let focus = set.beams()[0].focus;
        assert!(matches!(set.beams()[0].local(&focus), Err(TroopError::AtBeamFocus)));
    }

    #[test]
    fn fractions_pure_and_perpendicular() {
        let z = Vector3::z();
        assert_abs_diff_eq!(
            polarization_fractions(1, &z, &z)[2],
            1.0,
            epsilon = 1e-15
        );
        let f = polarization_fractions(1, &Vector3::x(), &z);
        assert_abs_diff_eq!(f[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn fractions_at_sixty_degrees() {
        // h = +1, c = cos 60°: (σ−, π, σ+) = (1/16, 3/8, 9/16).
        let c = 0.5f64;
        let dir = Vector3::new((1.0 - c * c).sqrt(), 0.0, c);
        let f = polarization_fractions(1, &dir, &Vector3::z());
        assert_abs_diff_eq!(f[0], 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], 3.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], 9.0 / 16.0, epsilon = 1e-15);
    }

    /// Independent oracle: rotate an explicit circular Jones vector and
    /// project it onto the spherical basis relative to lab Z.
    #[test]
    fn fractions_match_jones_vector_oracle() {
        fn oracle(h: i8, theta: f64) -> [f64; 3] {
            // Propagation n̂ = (sinθ, 0, cosθ); transverse frame:
            // ê1 = (cosθ, 0, −sinθ), ê2 = ŷ. Circular unit amplitude
            // ε = (ê1 + i·h·ê2)/√2, components (re, im) per lab axis.
            let (st, ct) = theta.sin_cos();
            let e1 = [ct, 0.0, -st];
            let e2 = [0.0, 1.0, 0.0];
            let re = e1.map(|x| x / 2f64.sqrt());
            let im = e2.map(|x| h as f64 * x / 2f64.sqrt());
            // Spherical basis: e± = ∓(x̂ ± i ŷ)/√2, e0 = ẑ. Intensity in q
            // is |ε·ē_q|²; the conjugate basis vector (vr + i·vi) is passed
            // in and contracted bilinearly with ε = re + i·im.
            let amp2 = |vr: [f64; 3], vi: [f64; 3]| -> f64 {
                let dr = re[0] * vr[0] + re[1] * vr[1] + re[2] * vr[2]
                    - (im[0] * vi[0] + im[1] * vi[1] + im[2] * vi[2]);
                let di = im[0] * vr[0] + im[1] * vr[1] + im[2] * vr[2]
                    + re[0] * vi[0] + re[1] * vi[1] + re[2] * vi[2];
                dr * dr + di * di
            };
            let s = 1.0 / 2f64.sqrt();
            // conjugates of e+ = −(x̂ + iŷ)/√2 and e− = (x̂ − iŷ)/√2
            let p_plus = amp2([-s, 0.0, 0.0], [0.0, s, 0.0]);
            let p_minus = amp2([s, 0.0, 0.0], [0.0, s, 0.0]);
            let p_pi = amp2([0.0, 0.0, 1.0], [0.0, 0.0, 0.0]);
            [p_minus, p_pi, p_plus]
        }
        for h in [1i8, -1] {
            for theta in [0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_3, 2.2, std::f64::consts::PI] {
                let dir = Vector3::new(theta.sin(), 0.0, theta.cos());
                let got = polarization_fractions(h, &dir, &Vector3::z());
                let want = oracle(h, theta);
                for q in 0..3 {
                    assert_abs_diff_eq!(got[q], want[q], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn aggregate_center_is_natural_light() {
        let set = paper_set(0.035);
        let f = aggregate_field(&set, &Vector3::zeros(), &Vector3::z()).unwrap();
        assert_relative_eq!(f.i_sigma_plus, 2.0, epsilon = 1e-14);
        assert_relative_eq!(f.i_sigma_minus, 2.0, epsilon = 1e-14);
        assert_relative_eq!(f.i_pi, 2.0, epsilon = 1e-14);
    }

    fn ratio_slope(set: &BeamSet, axis_i: usize, quant: Vector3<f64>, h: f64) -> (f64, f64) {
        let mut e = Vector3::zeros();
        e[axis_i] = h;
        let fp = aggregate_field(set, &e, &quant).unwrap();
        let fm = aggregate_field(set, &(-e), &quant).unwrap();
        (
            (fp.i_sigma_plus / fp.i_pi - fm.i_sigma_plus / fm.i_pi) / (2.0 * h),
            (fp.i_sigma_minus / fp.i_pi - fm.i_sigma_minus / fm.i_pi) / (2.0 * h),
        )
    }

    #[test]
    fn on_axis_intensity_slopes() {
        let a = 0.035;
        let set = paper_set(a);
        let h = 1e-4 * a;
        // Z axis: I(σ∓) = (1 ± 2z/a)I(π)
        let (sp, sm) = ratio_slope(&set, 2, Vector3::z(), h);
        assert_relative_eq!(sp * a, -2.0, max_relative = 1e-6);
        assert_relative_eq!(sm * a, 2.0, max_relative = 1e-6);
        // X axis: I(σ±) = (1 ± ξ/a)I(π)
        let (sp, sm) = ratio_slope(&set, 0, Vector3::x(), h);
        assert_relative_eq!(sp * a, 1.0, max_relative = 1e-6);
        assert_relative_eq!(sm * a, -1.0, max_relative = 1e-6);
        // Y axis behaves like X
        let (sp, sm) = ratio_slope(&set, 1, Vector3::y(), h);
        assert_relative_eq!(sp * a, 1.0, max_relative = 1e-6);
        assert_relative_eq!(sm * a, -1.0, max_relative = 1e-6);
    }

    #[test]
    fn uniform_helicity_keeps_light_natural() {
        let a = 0.035;
        let set = BeamSet::new(a, 22f64.to_radians(), HelicityPattern::UNIFORM, 1.0).unwrap();
        let h = 1e-4 * a;
        for axis_i in 0..3 {
            let mut quant = Vector3::zeros();
            quant[axis_i] = 1.0;
            let (sp, sm) = ratio_slope(&set, axis_i, quant, h);
            assert_abs_diff_eq!((sp - sm) * a, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn anisotropy_axis_directions() {
        let a = 0.035;
        let set = paper_set(a);
        // +Z displacement: net σ− anisotropy, axis −ẑ.
        let axis = anisotropy_axis(&set, &Vector3::new(0.0, 0.0, 0.01 * a));
        assert_relative_eq!(axis, -Vector3::z(), epsilon = 1e-9);
        // Center: degenerate, lab-Z fallback.
        let axis = anisotropy_axis(&set, &Vector3::zeros());
        assert_relative_eq!(axis, Vector3::z(), epsilon = 1e-15);
        // +X displacement: axis along the displacement.
        let axis = anisotropy_axis(&set, &Vector3::new(0.01 * a, 0.0, 0.0));
        assert_relative_eq!(axis, Vector3::x(), epsilon = 1e-9);
    }

    #[test]
    fn outside_every_cone_is_an_error() {
        let a = 0.035;
        let set = BeamSet::new(a, 5f64.to_radians(), HelicityPattern::TRAPPING, 1.0).unwrap();
        // Far corner point missed by every 5° cone.
        let r = Vector3::new(0.4 * a, 0.4 * a, 0.4 * a);
        assert!(matches!(
            aggregate_field(&set, &r, &Vector3::z()),
            Err(TroopError::OutsideIlluminatedRegion)
        ));
    }
}
