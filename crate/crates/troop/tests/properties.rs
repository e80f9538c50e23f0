//! Property tests for the field decomposition, steady states, and config.

use nalgebra::Vector3;
use proptest::prelude::*;
use troop::optics::BeamContribution;
use troop::{
    aggregate_field, anisotropy_axis, parse_config, polarization_fractions, steady_state,
    transfer_matrix, BeamSet, HelicityPattern, LocalField, PumpContext, TransitionSpec,
};

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("degenerate direction", |(x, y, z)| {
            let v = Vector3::new(x, y, z);
            let n = v.norm();
            (n > 1e-2).then(|| v / n)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// p+ + p− + pπ = 1 and every fraction is nonnegative, for any geometry.
    #[test]
    fn fraction_closure(dir in unit_vector(), axis in unit_vector(), flip in any::<bool>()) {
        let h = if flip { 1 } else { -1 };
        let f = polarization_fractions(h, &dir, &axis);
        prop_assert!(f.iter().all(|&p| p >= 0.0));
        prop_assert!((f[0] + f[1] + f[2] - 1.0).abs() <= 1e-14);
    }

    /// The trapping pattern shares one helicity between the X and Y pairs, so
    /// aggregate intensities are invariant under the 90° rotation exchanging
    /// the X and Y beams: (x, y, z) → (−y, x, z) with the axis rotated too.
    #[test]
    fn quarter_turn_symmetry(
        x in -3e-3f64..3e-3, y in -3e-3f64..3e-3, z in -3e-3f64..3e-3,
        axis in unit_vector(),
    ) {
        let set = BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 1.0).unwrap();
        let r = Vector3::new(x, y, z);
        let r_rot = Vector3::new(-y, x, z);
        let axis_rot = Vector3::new(-axis.y, axis.x, axis.z);
        let f = aggregate_field(&set, &r, &axis).unwrap();
        let g = aggregate_field(&set, &r_rot, &axis_rot).unwrap();
        prop_assert!((f.i_sigma_plus - g.i_sigma_plus).abs() <= 1e-12 * f.total_intensity());
        prop_assert!((f.i_sigma_minus - g.i_sigma_minus).abs() <= 1e-12 * f.total_intensity());
        prop_assert!((f.i_pi - g.i_pi).abs() <= 1e-12 * f.total_intensity());
    }

    /// Steady states of random single-beam environments are normalized,
    /// nonnegative, and lie in the generator's null space.
    #[test]
    fn steady_state_is_valid_distribution(
        w_minus in 0.05f64..1.0, w_pi in 0.05f64..1.0, w_plus in 0.05f64..1.0,
        rate in 1e4f64..1e7,
    ) {
        let spec = TransitionSpec::cesium_d2();
        let lines = troop::line_strengths(&spec).unwrap();
        let total = w_minus + w_pi + w_plus;
        let fractions = [w_minus / total, w_pi / total, w_plus / total];
        let mut per_beam = [BeamContribution {
            direction: Vector3::z(),
            weight: 0.0,
            fractions: [0.0; 3],
        }; 6];
        per_beam[0] = BeamContribution { direction: Vector3::z(), weight: 1.0, fractions };
        let field = LocalField {
            per_beam,
            i_sigma_minus: fractions[0],
            i_pi: fractions[1],
            i_sigma_plus: fractions[2],
            quant_axis: Vector3::z(),
        };
        let mut rates = [0.0; 6];
        rates[0] = rate;
        let ctx = PumpContext { detuning: 0.0, velocity: Vector3::zeros(), rates };
        let m = transfer_matrix(&field, &ctx, &lines).unwrap();
        let pi = steady_state(&m).unwrap();
        let sum: f64 = pi.values().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(pi.values().iter().all(|&p| p >= 0.0));
        let residual: f64 = (0..lines.n_ground())
            .map(|i| {
                (0..lines.n_ground()).map(|j| m[(i, j)] * pi.get(j)).sum::<f64>().abs()
            })
            .fold(0.0, f64::max);
        prop_assert!(residual <= 1e-9 * rate, "residual {residual:e}");
    }

    /// The anisotropy axis is always a unit vector inside the lit region.
    #[test]
    fn anisotropy_axis_is_unit(
        x in -3e-3f64..3e-3, y in -3e-3f64..3e-3, z in -3e-3f64..3e-3,
    ) {
        let set = BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 1.0).unwrap();
        let axis = anisotropy_axis(&set, &Vector3::new(x, y, z));
        prop_assert!((axis.norm() - 1.0).abs() <= 1e-12);
    }

    /// Emitted configs parse back to the identical value.
    #[test]
    fn config_round_trip(
        seed in 0u64..=i64::MAX as u64,
        n_atoms in 1usize..2000,
        focus_mm in 5.0f64..100.0,
        rabi_over_gamma in 0.05f64..3.0,
        detuning_over_gamma in -4.0f64..-0.2,
        tj in 1i32..12,
    ) {
        let text = format!(
            "[transition]\njg = \"{}/2\"\n[geometry]\nfocus_distance = {}\n[operating_point]\nrabi_over_gamma = {rabi_over_gamma}\ndetuning_over_gamma = {detuning_over_gamma}\n[sim]\nseed = {seed}\nn_atoms = {n_atoms}\n",
            tj,
            focus_mm * 1e-3,
        );
        let cfg = parse_config(&text).unwrap();
        let echoed = cfg.to_toml().unwrap();
        let reparsed = parse_config(&echoed).unwrap();
        prop_assert_eq!(cfg, reparsed);
    }
}
