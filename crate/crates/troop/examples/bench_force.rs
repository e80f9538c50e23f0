//! Scratch benchmark / calibration driver (not part of the test suite).
use nalgebra::Vector3;
use std::time::Instant;
use troop::*;

fn main() {
    let spec = TransitionSpec::cesium_d2();
    let beams =
        BeamSet::new(0.035, 22f64.to_radians(), HelicityPattern::TRAPPING, 0.8 * spec.gamma)
            .unwrap();
    let trap = Trap::new(beams, spec, -2.0 * spec.gamma).unwrap();

    let mut scratch = TrapScratch::default();
    let n = 500_000usize;
    let mut acc = 0.0f64;
    let t0 = Instant::now();
    for i in 0..n {
        let x = 1e-4 * ((i % 17) as f64 - 8.0) / 8.0;
        let r = Vector3::new(x, -0.7e-4 + x, 0.5e-4);
        let f = trap.force_at_with(&r, &Vector3::new(0.01, -0.02, 0.03), &mut scratch).unwrap();
        acc += f.total.z;
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("{} evals in {:.3}s -> {:.0} ns/eval (acc {:.3e})", n, dt, dt / n as f64 * 1e9, acc);

    // calibration ensemble at the paper geometry
    let params = SimParams {
        n_atoms: 500,
        dt: 3.0e-8,
        n_steps: 1_333_334,
        seed: 1,
        mass: constants::CESIUM_MASS,
        diffusion_factor: 2.0,
        gravity: false,
        burn_in_fraction: 0.25,
        init_position_sigma: 3.0e-4,
        init_velocity_sigma: 0.166,
        trajectory_stride: 0,
        trajectory_atoms: 0,
    };
    let t0 = Instant::now();
    let out = run_ensemble(&params, &trap).unwrap();
    println!("ensemble in {:.1}s", t0.elapsed().as_secs_f64());
    let s = &out.stats;
    println!("radius mm: {:?}", s.radius.map(|r| r * 1e3));
    println!("T uK: {:?}", s.temperature.map(|t| t * 1e6));
    println!("aspect: {:.4}", s.aspect_ratio_xy_to_z);
    println!("kappa: {:?}", s.kappa_consistency);
    println!("drift: {:?} warning {}", s.moment_drift, s.drift_warning);
    let k = stiffness(&trap, 1e-4 * 0.035).unwrap();
    println!("K diag: {:?}", [k[(0, 0)], k[(1, 1)], k[(2, 2)]]);
    println!(
        "kappa/K: {:?}",
        [
            s.kappa_consistency[0] / k[(0, 0)],
            s.kappa_consistency[1] / k[(1, 1)],
            s.kappa_consistency[2] / k[(2, 2)]
        ]
    );
}
