//! Optical-pumping rate equations on the ground Zeeman manifold.
//!
//! The excited state is adiabatically eliminated (low saturation): population
//! lives entirely in the 2J+1 ground sublevels, and each scattering cycle is
//! an absorption `m → m_e = m + q` at a rate set by the local polarization
//! intensities, followed by instantaneous spontaneous branching
//! `m_e → m_e − q'`. Zeeman coherences are neglected, so the dynamics is a
//! classical rate matrix `dπ/dt = Mπ` whose columns sum to zero.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::angular::{LineStrengthTable, TransitionSpec};
use crate::error::{Result, TroopError};
use crate::optics::LocalField;

/// Population that may be clamped to zero; anything more negative is treated
/// as a numerical failure of the steady-state solve.
const NEGATIVE_POPULATION_TOLERANCE: f64 = 1e-10;

/// Occupation of the ground sublevels m = −J … +J.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundPopulations {
    values: Vec<f64>,
}

impl GroundPopulations {
    /// Uniform occupation 1/(2J+1) over `n` sublevels.
    pub fn uniform(n: usize) -> Self {
        GroundPopulations { values: vec![1.0 / n as f64; n] }
    }

    /// Wraps an explicit occupation vector; must be normalized and nonnegative.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(TroopError::UnnormalizedPopulations { sum });
        }
        if values.iter().any(|&p| p < -1e-12) {
            return Err(TroopError::InvalidField("negative population".into()));
        }
        Ok(GroundPopulations { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Occupation of sublevel index `i` (i = 0 is m = −J).
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Population-weighted line strength Σ_m π_m s(m, q) for each q.
    pub fn strength_overlap(&self, lines: &LineStrengthTable) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for (i, &p) in self.values.iter().enumerate() {
            let row = lines.s_abs_row_f64(i);
            acc[0] += p * row[0];
            acc[1] += p * row[1];
            acc[2] += p * row[2];
        }
        acc
    }
}

/// Per-beam excitation rates at one phase-space point.
///
/// `rates[b] = Γ·Ω_b²(r) / (Γ² + 4δ_b²)` with `δ_b = δ − k·(n̂_b·v)` and
/// `Ω_b²(r)` the local squared Rabi frequency (center value times the
/// intensity weight), quoted for a unit-strength line.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpContext {
    /// Laser detuning δ = ω_L − ω_A, rad/s.
    pub detuning: f64,
    /// Atom velocity, m/s.
    pub velocity: Vector3<f64>,
    /// Per-beam scattering-rate prefactors, 1/s.
    pub rates: [f64; 6],
}

impl PumpContext {
    /// Rates for an atom at rest or moving, from the already-decomposed field.
    pub fn new(
        spec: &TransitionSpec,
        field: &LocalField,
        reference_rabi: f64,
        detuning: f64,
        velocity: Vector3<f64>,
    ) -> Self {
        let gamma2 = spec.gamma * spec.gamma;
        let omega2 = reference_rabi * reference_rabi;
        let mut rates = [0.0; 6];
        for (rate, contrib) in rates.iter_mut().zip(field.per_beam.iter()) {
            if contrib.weight == 0.0 {
                continue;
            }
            let doppler = spec.k * contrib.direction.dot(&velocity);
            let delta_b = detuning - doppler;
            *rate = spec.gamma * omega2 * contrib.weight / (gamma2 + 4.0 * delta_b * delta_b);
        }
        PumpContext { detuning, velocity, rates }
    }
}

/// Builds the rate generator `M` with `dπ/dt = Mπ` (column-stochastic flow:
/// every column sums to zero).
pub fn transfer_matrix(
    field: &LocalField,
    ctx: &PumpContext,
    lines: &LineStrengthTable,
) -> Result<DMatrix<f64>> {
    let n = lines.n_ground();
    let mut m = DMatrix::zeros(n, n);
    fill_transfer_matrix(field, ctx, lines, m.as_mut_slice())?;
    Ok(m)
}

/// Row-major fill of the generator into a preallocated n×n buffer
/// (`out[row·n + col]` with `dπ_row/dt = Σ_col M[row, col]·π_col`).
pub(crate) fn fill_transfer_matrix(
    field: &LocalField,
    ctx: &PumpContext,
    lines: &LineStrengthTable,
    out: &mut [f64],
) -> Result<()> {
    let n = lines.n_ground();
    debug_assert_eq!(out.len(), n * n);
    out.fill(0.0);

    // Aggregate polarization rates R(q) = Σ_b R_b p_{b,q}.
    let mut rq = [0.0f64; 3];
    for (rate, contrib) in ctx.rates.iter().zip(field.per_beam.iter()) {
        if *rate < 0.0 || contrib.weight < 0.0 {
            return Err(TroopError::InvalidField(format!(
                "negative intensity (rate {rate}, weight {})",
                contrib.weight
            )));
        }
        rq[0] += rate * contrib.fractions[0];
        rq[1] += rate * contrib.fractions[1];
        rq[2] += rate * contrib.fractions[2];
    }

    // Column i: departures out of m via q, arrivals through m_e = m + q.
    for i in 0..n {
        let s_row = lines.s_abs_row_f64(i);
        for (qi, dm) in [(0usize, -1i64), (1, 0), (2, 1)] {
            let rate = rq[qi] * s_row[qi];
            if rate == 0.0 {
                continue;
            }
            out[i * n + i] -= rate;
            // excited index: m_e = m + dm → e = i + dm + 1 in the 2J+3 ladder
            let e = (i as i64 + dm + 1) as usize;
            let b_row = lines.branching_row_f64(e);
            for (qpi, dmp) in [(0usize, -1i64), (1, 0), (2, 1)] {
                let j = i as i64 + dm - dmp;
                if j >= 0 && (j as usize) < n {
                    out[(j as usize) * n + i] += rate * b_row[qpi];
                }
            }
        }
    }
    Ok(())
}

/// Normalized steady state of a rate generator: the null-space vector of `M`
/// with unit sum, unique when the pumping chain has a single recurrent class.
pub fn steady_state(m: &DMatrix<f64>) -> Result<GroundPopulations> {
    let n = m.nrows();
    if m.ncols() != n || n == 0 {
        return Err(TroopError::InvalidGenerator("matrix must be square and nonempty".into()));
    }
    // Validate the generator: columns sum to ~0, off-diagonals nonnegative.
    let scale = m.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    for j in 0..n {
        let col_sum: f64 = (0..n).map(|i| m[(i, j)]).sum();
        if col_sum.abs() > 1e-9 * scale {
            return Err(TroopError::InvalidGenerator(format!(
                "column {j} sums to {col_sum:e}, not zero"
            )));
        }
        for i in 0..n {
            if i != j && m[(i, j)] < -1e-12 * scale {
                return Err(TroopError::InvalidGenerator(format!(
                    "negative off-diagonal rate at ({i}, {j})"
                )));
            }
        }
    }

    let mut work = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            work[i * n + j] = m[(i, j)];
        }
    }
    let mut pops = vec![0.0f64; n];
    match solve_steady_state(&mut work, &mut pops) {
        Err(TroopError::DegenerateSteadyState { .. }) => {
            // Recompute the honest null-space dimension from the pristine matrix.
            Err(TroopError::DegenerateSteadyState { null_dim: generator_null_dim(m) })
        }
        Err(e) => Err(e),
        Ok(()) => GroundPopulations::from_values(pops),
    }
}

/// Null-space dimension of a generator by full-pivot Gaussian elimination.
pub fn generator_null_dim(m: &DMatrix<f64>) -> usize {
    let n = m.nrows();
    let mut a = m.clone_owned();
    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut rank = 0;
    for _ in 0..n {
        // locate the largest remaining pivot
        let mut best = (0usize, 0usize, 0.0f64);
        for j in 0..n {
            for i in 0..n {
                if a[(i, j)].abs() > best.2 {
                    best = (i, j, a[(i, j)].abs());
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        rank += 1;
        let (pi, pj, _) = best;
        let pivot = a[(pi, pj)];
        for i in 0..n {
            if i == pi {
                continue;
            }
            let f = a[(i, pj)] / pivot;
            if f != 0.0 {
                for j in 0..n {
                    let upd = a[(pi, j)];
                    a[(i, j)] -= f * upd;
                }
            }
        }
        for j in 0..n {
            a[(pi, j)] = 0.0;
        }
    }
    n - rank
}

/// In-place bordered solve on a row-major generator copy.
///
/// Because the rows of a generator sum to zero through its columns (1ᵀM = 0),
/// replacing the last row with the normalization Σπ = 1 loses no rank; the
/// resulting system is nonsingular exactly when the steady state is unique.
/// A degenerate chain surfaces as [`TroopError::DegenerateSteadyState`] with
/// a placeholder dimension; callers wanting the true dimension recompute it
/// from the pristine generator.
pub(crate) fn solve_steady_state(matrix: &mut [f64], out: &mut [f64]) -> Result<()> {
    let n = out.len();
    debug_assert_eq!(matrix.len(), n * n);
    let scale = matrix.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(f64::MIN_POSITIVE);

    // Bordered system: last row ← 1ᵀ, rhs = e_n.
    matrix[(n - 1) * n..].fill(1.0);
    let mut rhs_buf = [0.0f64; 64];
    let mut rhs_vec;
    let rhs: &mut [f64] = if n <= 64 {
        &mut rhs_buf[..n]
    } else {
        rhs_vec = vec![0.0f64; n];
        &mut rhs_vec
    };
    rhs[n - 1] = 1.0;

    // LU with partial pivoting; row operations run on contiguous slices.
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = matrix[col * n + col].abs();
        for row in (col + 1)..n {
            let v = matrix[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val <= 1e-12 * scale.max(1.0) {
            return Err(TroopError::DegenerateSteadyState { null_dim: 2 });
        }
        if pivot_row != col {
            let (upper, lower) = matrix.split_at_mut(pivot_row * n);
            upper[col * n..col * n + n].swap_with_slice(&mut lower[..n]);
            rhs.swap(col, pivot_row);
        }
        let inv = 1.0 / matrix[col * n + col];
        let (pivot_rows, rest) = matrix.split_at_mut((col + 1) * n);
        let pivot_slice = &pivot_rows[col * n + col + 1..col * n + n];
        for (offset, row_chunk) in rest.chunks_exact_mut(n).enumerate() {
            let f = row_chunk[col] * inv;
            if f == 0.0 {
                continue;
            }
            row_chunk[col] = 0.0;
            for (dst, &src) in row_chunk[col + 1..].iter_mut().zip(pivot_slice) {
                *dst -= f * src;
            }
            rhs[col + 1 + offset] -= f * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let row = &matrix[col * n..col * n + n];
        let mut v = rhs[col];
        for (j, &coef) in row.iter().enumerate().skip(col + 1) {
            v -= coef * out[j];
        }
        out[col] = v / row[col];
    }

    // Positivity: clamp tolerable negatives, reject anything worse.
    let mut min = f64::INFINITY;
    for &p in out.iter() {
        min = min.min(p);
    }
    if min < -NEGATIVE_POPULATION_TOLERANCE {
        return Err(TroopError::Numerical(format!(
            "steady-state population {min:e} below tolerance"
        )));
    }
    let mut sum = 0.0;
    for p in out.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
        sum += *p;
    }
    if !(sum.is_finite() && sum > 0.0) {
        return Err(TroopError::Numerical("steady-state normalization failed".into()));
    }
    for p in out.iter_mut() {
        *p /= sum;
    }
    Ok(())
}

/// Time integration oracle: evolves `dπ/dt = Mπ` with RK4 until the residual
/// `‖Mπ‖ ≤ tol·‖M‖` or the step budget is exhausted. Exposed for tests and
/// cross-checks; the production path is the direct solve.
pub fn relax_to_steady_state(
    m: &DMatrix<f64>,
    start: &GroundPopulations,
    tol: f64,
    max_steps: usize,
) -> Result<GroundPopulations> {
    let n = m.nrows();
    let scale = m.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if scale == 0.0 {
        return Err(TroopError::DegenerateSteadyState { null_dim: n });
    }
    let dt = 0.2 / scale;
    let mut pi = DVector::from_column_slice(start.values());
    for _ in 0..max_steps {
        let k1 = m * &pi;
        if k1.amax() <= tol * scale {
            let values: Vec<f64> = pi.iter().map(|&p| p.max(0.0)).collect();
            let sum: f64 = values.iter().sum();
            return GroundPopulations::from_values(values.iter().map(|p| p / sum).collect());
        }
        let k2 = m * (&pi + 0.5 * dt * &k1);
        let k3 = m * (&pi + 0.5 * dt * &k2);
        let k4 = m * (&pi + dt * &k3);
        pi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Err(TroopError::Numerical("steady-state relaxation did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{line_strengths, HalfInt};
    use crate::optics::{aggregate_field, anisotropy_axis, BeamContribution, BeamSet, HelicityPattern};
    use approx::assert_abs_diff_eq;

    fn cs_lines() -> LineStrengthTable {
        line_strengths(&TransitionSpec::cesium_d2()).unwrap()
    }

    /// Synthetic single-"beam" field with prescribed polarization rates.
    fn synthetic_field(fractions: [f64; 3]) -> LocalField {
        let mut per_beam = [BeamContribution {
            direction: Vector3::z(),
            weight: 0.0,
            fractions: [0.0; 3],
        }; 6];
        per_beam[0] = BeamContribution { direction: Vector3::z(), weight: 1.0, fractions };
        LocalField {
            per_beam,
            i_sigma_minus: fractions[0],
            i_pi: fractions[1],
            i_sigma_plus: fractions[2],
            quant_axis: Vector3::z(),
        }
    }

    fn synthetic_ctx(rate: f64) -> PumpContext {
        let mut rates = [0.0; 6];
        rates[0] = rate;
        PumpContext { detuning: 0.0, velocity: Vector3::zeros(), rates }
    }

    #[test]
    fn isotropic_field_fixes_uniform_populations() {
        let lines = cs_lines();
        let spec = TransitionSpec::cesium_d2();
        let set = BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 0.8 * spec.gamma).unwrap();
        let field = aggregate_field(&set, &Vector3::zeros(), &Vector3::z()).unwrap();
        let ctx = PumpContext::new(&spec, &field, set.reference_rabi(), -2.0 * spec.gamma, Vector3::zeros());
        let m = transfer_matrix(&field, &ctx, &lines).unwrap();

        // Uniform vector is in the null space.
        let uniform = DVector::from_element(lines.n_ground(), 1.0 / lines.n_ground() as f64);
        let residual = (&m * &uniform).amax();
        let scale = m.amax();
        assert!(residual <= 1e-14 * scale, "residual {residual:e} vs scale {scale:e}");

        let pi = steady_state(&m).unwrap();
        for &p in pi.values() {
            assert_abs_diff_eq!(p, 1.0 / 9.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_sigma_minus_pumps_to_edge() {
        let lines = cs_lines();
        let field = synthetic_field([1.0, 0.0, 0.0]);
        let m = transfer_matrix(&field, &synthetic_ctx(1.0e6), &lines).unwrap();
        // m = −J is absorbing: its column is entirely zero (the cycling
        // excitation returns all population).
        for i in 0..lines.n_ground() {
            assert_abs_diff_eq!(m[(i, 0)], 0.0, epsilon = 1e-25);
        }
        let pi = steady_state(&m).unwrap();
        assert_abs_diff_eq!(pi.get(0), 1.0, epsilon = 1e-12);
        for i in 1..lines.n_ground() {
            assert_abs_diff_eq!(pi.get(i), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_level_pumping_balance() {
        // J = 1/2 with I(σ+):I(σ−) = 2:1 and no π: hand-solved 2×2 balance
        // gives rate(−→+) = (2/9)(R+ + Rπ), rate(+→−) = (2/9)(R− + Rπ),
        // so π = (1/3, 2/3).
        let spec = TransitionSpec::new(HalfInt::from_twice(1), 1.0, 1.0).unwrap();
        let lines = line_strengths(&spec).unwrap();
        let field = synthetic_field([1.0 / 3.0, 0.0, 2.0 / 3.0]);
        let m = transfer_matrix(&field, &synthetic_ctx(3.0e6), &lines).unwrap();
        let pi = steady_state(&m).unwrap();
        assert_abs_diff_eq!(pi.get(0), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.get(1), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_intensity_is_degenerate() {
        let lines = cs_lines();
        let field = synthetic_field([0.0, 0.0, 0.0]);
        let m = transfer_matrix(&field, &synthetic_ctx(0.0), &lines).unwrap();
        match steady_state(&m) {
            Err(TroopError::DegenerateSteadyState { null_dim }) => assert!(null_dim >= 2),
            other => panic!("expected degenerate steady state, got {other:?}"),
        }
    }

    #[test]
    fn columns_sum_to_zero_and_steady_sums_to_one() {
        let lines = cs_lines();
        let spec = TransitionSpec::cesium_d2();
        let set = BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 0.8 * spec.gamma).unwrap();
        let r = Vector3::new(0.0021, -0.0013, 0.0017);
        let axis = anisotropy_axis(&set, &r);
        let field = aggregate_field(&set, &r, &axis).unwrap();
        let ctx = PumpContext::new(&spec, &field, set.reference_rabi(), -2.0 * spec.gamma, Vector3::new(0.1, -0.05, 0.2));
        let m = transfer_matrix(&field, &ctx, &lines).unwrap();
        let scale = m.amax();
        for j in 0..m.ncols() {
            let s: f64 = (0..m.nrows()).map(|i| m[(i, j)]).sum();
            assert!(s.abs() <= 1e-13 * scale);
        }
        let pi = steady_state(&m).unwrap();
        let total: f64 = pi.values().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_symmetric_field_gives_mirror_populations() {
        let lines = cs_lines();
        let field = synthetic_field([0.4, 0.2, 0.4]);
        let m = transfer_matrix(&field, &synthetic_ctx(1.0e6), &lines).unwrap();
        let pi = steady_state(&m).unwrap();
        let n = lines.n_ground();
        for i in 0..n {
            assert_abs_diff_eq!(pi.get(i), pi.get(n - 1 - i), epsilon = 1e-12);
        }
    }

    #[test]
    fn trapping_pattern_shifts_population_against_displacement() {
        // z > 0 with quantization along +Z: σ− dominates, so Σ_{m<0} π > Σ_{m>0} π.
        let lines = cs_lines();
        let spec = TransitionSpec::cesium_d2();
        let set = BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 0.8 * spec.gamma).unwrap();
        let r = Vector3::new(0.0, 0.0, 0.01 * 0.035);
        let field = aggregate_field(&set, &r, &Vector3::z()).unwrap();
        let ctx = PumpContext::new(&spec, &field, set.reference_rabi(), -2.0 * spec.gamma, Vector3::zeros());
        let pi = steady_state(&transfer_matrix(&field, &ctx, &lines).unwrap()).unwrap();
        let lower: f64 = (0..4).map(|i| pi.get(i)).sum();
        let upper: f64 = (5..9).map(|i| pi.get(i)).sum();
        assert!(lower > upper, "lower {lower} upper {upper}");
    }

    #[test]
    fn steady_state_matches_time_integration_on_axis() {
        let lines = cs_lines();
        let spec = TransitionSpec::cesium_d2();
        let set = BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 0.8 * spec.gamma).unwrap();
        let r = Vector3::new(0.0, 0.0, 0.01 * 0.035);
        let axis = anisotropy_axis(&set, &r);
        let field = aggregate_field(&set, &r, &axis).unwrap();
        let ctx = PumpContext::new(&spec, &field, set.reference_rabi(), -2.0 * spec.gamma, Vector3::zeros());
        let m = transfer_matrix(&field, &ctx, &lines).unwrap();
        let direct = steady_state(&m).unwrap();
        let relaxed = relax_to_steady_state(
            &m,
            &GroundPopulations::uniform(lines.n_ground()),
            1e-12,
            2_000_000,
        )
        .unwrap();
        for i in 0..lines.n_ground() {
            assert_abs_diff_eq!(direct.get(i), relaxed.get(i), epsilon = 1e-8);
        }
    }

    #[test]
    fn rejects_negative_intensity() {
        let lines = cs_lines();
        let mut field = synthetic_field([0.5, 0.25, 0.25]);
        field.per_beam[0].weight = -1.0;
        assert!(transfer_matrix(&field, &synthetic_ctx(1.0), &lines).is_err());
    }
}
