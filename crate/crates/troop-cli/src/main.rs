//! `troop` — command-line driver for the six-beam optical-pumping trap
//! simulator.
//!
//! Subcommands: `field`, `pump`, `characterize`, `scan`, `simulate`.
//! Exit codes: 0 success, 1 validation error, 2 numerical failure.
//! `TROOP_THREADS` caps the worker count; outputs are written atomically.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use troop::{
    characterize, escape_fraction, friction, parse_config, run_ensemble, scan, stiffness,
    RunConfig, TemperatureModel, TroopError,
};

use output::{fmt_float, write_atomic, OutputTarget};

#[derive(Parser)]
#[command(name = "troop", version, about = "Six-beam optical-pumping radiation-pressure trap simulator")]
struct Cli {
    /// TOML run configuration; omitted fields take the reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the effective configuration (after defaulting) to this path.
    #[arg(long, global = true)]
    echo_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the local field decomposition (or force field) along a line as CSV.
    Field(FieldArgs),
    /// Print steady-state ground populations at a point, or dump the
    /// line-strength table.
    Pump(PumpArgs),
    /// Print the stiffness/friction characterization as JSON.
    Characterize(CharacterizeArgs),
    /// Characterize across a detuning × Rabi grid; write CSV.
    Scan(ScanArgs),
    /// Run the stochastic ensemble; write statistics JSON and optionally a
    /// trajectory CSV.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Line direction: x, y, or z.
    #[arg(long, default_value = "z")]
    axis: String,
    /// Line start, m.
    #[arg(long, default_value_t = -3.5e-3)]
    min: f64,
    /// Line end, m.
    #[arg(long, default_value_t = 3.5e-3)]
    max: f64,
    /// Number of samples.
    #[arg(long, default_value_t = 101)]
    count: usize,
    /// Quantization axis: auto (light-spin anisotropy), x, y, or z.
    #[arg(long, default_value = "auto")]
    quant_axis: String,
    /// Emit the force field (x,y,z,Fx,Fy,Fz,scatter_rate) instead of
    /// intensities.
    #[arg(long)]
    force: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PumpArgs {
    /// Evaluation point "x,y,z" in meters.
    #[arg(long, default_value = "0,0,0")]
    at: String,
    /// Atom velocity "vx,vy,vz" in m/s.
    #[arg(long, default_value = "0,0,0")]
    v: String,
    /// Dump the exact line-strength table (m, q, numerator, denominator)
    /// instead of populations.
    #[arg(long)]
    dump_lines: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CharacterizeArgs {
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Start of the detuning range, in units of Γ.
    #[arg(long, allow_hyphen_values = true)]
    delta_from: f64,
    /// End of the detuning range, in units of Γ.
    #[arg(long, allow_hyphen_values = true)]
    delta_to: f64,
    /// Number of detuning samples.
    #[arg(long, default_value_t = 10)]
    delta_steps: usize,
    /// Comma-separated Rabi frequencies, in units of Γ.
    #[arg(long, default_value = "0.8")]
    omega: String,
    /// Fixed temperature (K) for the radius prediction; the Doppler-theory
    /// temperature from friction and diffusion is used when omitted.
    #[arg(long)]
    temperature: Option<f64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Statistics JSON path; stdout when omitted.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Trajectory CSV path (requires sim.trajectory_stride > 0).
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
    /// Report the fraction of atoms beyond this radius (m) at the end.
    #[arg(long)]
    escape_boundary: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), TroopError> {
    init_threads()?;
    let config = load_config(cli.config.as_deref())?;
    if let Some(path) = &cli.echo_config {
        write_atomic(path, config.to_toml()?.as_bytes())
            .map_err(|e| TroopError::Config(format!("writing {}: {e}", path.display())))?;
    }
    match cli.command {
        Command::Field(args) => cmd_field(&config, args),
        Command::Pump(args) => cmd_pump(&config, args),
        Command::Characterize(args) => cmd_characterize(&config, args),
        Command::Scan(args) => cmd_scan(&config, args),
        Command::Simulate(args) => cmd_simulate(&config, args),
    }
}

fn init_threads() -> Result<(), TroopError> {
    if let Ok(value) = std::env::var("TROOP_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| TroopError::Config(format!("TROOP_THREADS must be a count, got '{value}'")))?;
        if n == 0 {
            return Err(TroopError::Config("TROOP_THREADS must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| TroopError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn load_config(path: Option<&std::path::Path>) -> Result<RunConfig, TroopError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| TroopError::Config(format!("reading {}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

fn parse_vector(text: &str, what: &str) -> Result<Vector3<f64>, TroopError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(TroopError::Config(format!("{what}: expected \"x,y,z\", got '{text}'")));
    }
    let mut v = Vector3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse()
            .map_err(|_| TroopError::Config(format!("{what}: bad component '{p}'")))?;
    }
    Ok(v)
}

fn unit_axis(name: &str) -> Result<Vector3<f64>, TroopError> {
    match name {
        "x" => Ok(Vector3::x()),
        "y" => Ok(Vector3::y()),
        "z" => Ok(Vector3::z()),
        other => Err(TroopError::Config(format!("axis must be x, y, or z, got '{other}'"))),
    }
}

fn cmd_field(config: &RunConfig, args: FieldArgs) -> Result<(), TroopError> {
    if args.count < 2 {
        return Err(TroopError::Config("field: count must be ≥ 2".into()));
    }
    if !(args.max > args.min) {
        return Err(TroopError::Config("field: max must exceed min".into()));
    }
    let trap = config.build_trap()?;
    let direction = unit_axis(&args.axis)?;
    let mut target = OutputTarget::new(args.output.as_deref())?;
    if args.force {
        target.line("x,y,z,Fx,Fy,Fz,scatter_rate")?;
    } else {
        target.line("x,y,z,I_sigma_plus,I_sigma_minus,I_pi,axis_x,axis_y,axis_z")?;
    }
    for i in 0..args.count {
        let s = args.min + (args.max - args.min) * i as f64 / (args.count - 1) as f64;
        let r = s * direction;
        if args.force {
            let f = trap.force_at(&r, &Vector3::zeros())?;
            target.line(&format!(
                "{},{},{},{},{},{},{}",
                fmt_float(r.x),
                fmt_float(r.y),
                fmt_float(r.z),
                fmt_float(f.total.x),
                fmt_float(f.total.y),
                fmt_float(f.total.z),
                fmt_float(f.scatter_rate_total),
            ))?;
        } else {
            let axis = match args.quant_axis.as_str() {
                "auto" => trap.quantization_axis(&r),
                name => unit_axis(name)?,
            };
            let field = trap.local_field(&r, &axis)?;
            target.line(&format!(
                "{},{},{},{},{},{},{},{},{}",
                fmt_float(r.x),
                fmt_float(r.y),
                fmt_float(r.z),
                fmt_float(field.i_sigma_plus),
                fmt_float(field.i_sigma_minus),
                fmt_float(field.i_pi),
                fmt_float(axis.x),
                fmt_float(axis.y),
                fmt_float(axis.z),
            ))?;
        }
    }
    target.finish()
}

fn cmd_pump(config: &RunConfig, args: PumpArgs) -> Result<(), TroopError> {
    let trap = config.build_trap()?;
    let mut target = OutputTarget::new(args.output.as_deref())?;
    if args.dump_lines {
        target.line("m,q,numerator,denominator")?;
        for (m, row) in trap.lines.rows() {
            for (qi, q) in [-1i32, 0, 1].iter().enumerate() {
                target.line(&format!("{m},{q},{},{}", row[qi].numer(), row[qi].denom()))?;
            }
        }
        return target.finish();
    }
    let r = parse_vector(&args.at, "pump --at")?;
    let v = parse_vector(&args.v, "pump --v")?;
    let (pops, axis) = trap.populations_at(&r, &v)?;
    target.line(&format!(
        "# quantization axis: {},{},{}",
        fmt_float(axis.x),
        fmt_float(axis.y),
        fmt_float(axis.z)
    ))?;
    target.line("m,pi_m")?;
    for i in 0..pops.len() {
        let m = trap.lines.ground_m(i);
        target.line(&format!("{m},{}", fmt_float(pops.get(i))))?;
    }
    target.finish()
}

#[derive(serde::Serialize)]
struct CharacterizationReport {
    stiffness: [[f64; 3]; 3],
    friction: [[f64; 3]; 3],
    mu_xi: f64,
    mu_z: f64,
    mu_spread: f64,
    f0: f64,
    earnshaw_trace: f64,
    k_zz_over_k_xx: f64,
}

fn cmd_characterize(config: &RunConfig, args: CharacterizeArgs) -> Result<(), TroopError> {
    let trap = config.build_trap()?;
    let c = characterize(&trap)?;
    let as_rows = |m: &nalgebra::Matrix3<f64>| {
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    };
    let report = CharacterizationReport {
        stiffness: as_rows(&c.stiffness),
        friction: as_rows(&c.friction),
        mu_xi: c.mu_xi,
        mu_z: c.mu_z,
        mu_spread: c.mu_spread,
        f0: c.f0,
        earnshaw_trace: c.earnshaw_trace,
        k_zz_over_k_xx: c.stiffness[(2, 2)] / c.stiffness[(0, 0)],
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| TroopError::Numerical(format!("serializing report: {e}")))?;
    let mut target = OutputTarget::new(args.output.as_deref())?;
    target.line(&json)?;
    target.finish()
}

fn cmd_scan(config: &RunConfig, args: ScanArgs) -> Result<(), TroopError> {
    if args.delta_steps == 0 {
        return Err(TroopError::Config("scan: delta_steps must be ≥ 1".into()));
    }
    let omegas: Vec<f64> = args
        .omega
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| TroopError::Config(format!("scan: bad omega '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    if omegas.is_empty() {
        return Err(TroopError::Config("scan: omega list must be non-empty".into()));
    }
    let mut deltas = Vec::with_capacity(args.delta_steps);
    for i in 0..args.delta_steps {
        let t = if args.delta_steps == 1 { 0.0 } else { i as f64 / (args.delta_steps - 1) as f64 };
        deltas.push(args.delta_from + (args.delta_to - args.delta_from) * t);
    }
    let temperature = match args.temperature {
        Some(t) => TemperatureModel::Fixed(t),
        None => TemperatureModel::DopplerTheory { diffusion_factor: config.sim.diffusion_factor },
    };
    let trap = config.build_trap()?;
    let rows = scan(&trap, &deltas, &omegas, temperature)?;
    let mut target = OutputTarget::new(args.output.as_deref())?;
    target.line(
        "delta_over_gamma,omega_over_gamma,k_xx,k_yy,k_zz,mu_xi,mu_z,temperature,radius_xy,radius_z,error",
    )?;
    for row in rows {
        target.line(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_float(row.delta_over_gamma),
            fmt_float(row.omega_over_gamma),
            fmt_float(row.k_xx),
            fmt_float(row.k_yy),
            fmt_float(row.k_zz),
            fmt_float(row.mu_xi),
            fmt_float(row.mu_z),
            fmt_float(row.temperature),
            fmt_float(row.radius_xy),
            fmt_float(row.radius_z),
            row.error.as_deref().unwrap_or(""),
        ))?;
    }
    target.finish()
}

#[derive(serde::Serialize)]
struct SimulationReport {
    stats: troop::CloudStats,
    escape_fraction: Option<f64>,
    stiffness_diag: [f64; 3],
    kappa_over_stiffness: [f64; 3],
    seed: u64,
}

fn cmd_simulate(config: &RunConfig, args: SimulateArgs) -> Result<(), TroopError> {
    let trap = config.build_trap()?;
    let mut params = config.sim_params();
    if let Some(seed) = args.seed {
        params.seed = seed;
    }
    if args.trajectory_out.is_some() && params.trajectory_stride == 0 {
        return Err(TroopError::Config(
            "simulate: --trajectory-out requires sim.trajectory_stride > 0".into(),
        ));
    }
    let outcome = run_ensemble(&params, &trap)?;
    let escape = match args.escape_boundary {
        Some(b) => {
            if !(b > 0.0) {
                return Err(TroopError::Config("simulate: escape boundary must be positive".into()));
            }
            let escaped =
                outcome.final_states.iter().filter(|s| s.r.norm() > b).count();
            Some(escaped as f64 / params.n_atoms as f64)
        }
        None => None,
    };
    let a = trap.beams.focus_distance();
    let k = stiffness(&trap, 1e-4 * a)?;
    let _ = friction(&trap, 1e-3 * trap.transition.gamma / trap.transition.k)?;
    let diag = [k[(0, 0)], k[(1, 1)], k[(2, 2)]];
    let report = SimulationReport {
        escape_fraction: escape,
        stiffness_diag: diag,
        kappa_over_stiffness: [
            outcome.stats.kappa_consistency[0] / diag[0],
            outcome.stats.kappa_consistency[1] / diag[1],
            outcome.stats.kappa_consistency[2] / diag[2],
        ],
        seed: params.seed,
        stats: outcome.stats,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| TroopError::Numerical(format!("serializing report: {e}")))?;
    let mut target = OutputTarget::new(args.stats_out.as_deref())?;
    target.line(&json)?;
    target.finish()?;
    if let Some(path) = &args.trajectory_out {
        let mut csv = String::from("t,atom_id,x,y,z,vx,vy,vz\n");
        for p in &outcome.trajectory {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_float(p.t),
                p.atom,
                fmt_float(p.r[0]),
                fmt_float(p.r[1]),
                fmt_float(p.r[2]),
                fmt_float(p.v[0]),
                fmt_float(p.v[1]),
                fmt_float(p.v[2]),
            ));
        }
        write_atomic(path, csv.as_bytes())
            .map_err(|e| TroopError::Config(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}
