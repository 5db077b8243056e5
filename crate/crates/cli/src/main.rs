use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use herglotz_core::dynamics::{
    integrate, integrate_with_reconstruction, BodyVelocity, EphExtField, EphField, LinearState, LpjExtField,
    LpjField, Reconstruction, UnreducedHerglotzField, VectorField,
};
use herglotz_core::scenarios::{self, InitialMotion, Scenario};
use herglotz_core::verify::{run_suite, Suite};
use herglotz_core::{Error as CoreError, FullState, LieMethod, Method};
use serde_json::json;

mod config;
mod table;

use config::{ConfigError, Format, Formulation, RunConfig, Settings};
use table::{Row, Table};

#[derive(Parser)]
#[command(name = "herglotz", version, about = "Dissipative rigid-body and heavy-top dynamics on SO(3)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory.
    Simulate(Box<SimulateArgs>),
    /// Run numerical self-checks.
    Verify(VerifyArgs),
    /// List the registered scenarios with their defaults.
    Scenarios,
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file (`key = value` lines, `[run]` and `[params]` sections).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// eph, lpj, eph-ext, lpj-ext or unreduced.
    #[arg(long)]
    formulation: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<String>,
    /// euler or rk4.
    #[arg(long)]
    integrator: Option<String>,
    /// lie-euler or rkmk4.
    #[arg(long)]
    lie_integrator: Option<String>,
    /// Also integrate the attitude and emit r11..r33.
    #[arg(long)]
    reconstruct: bool,
    /// Output path; stdout when absent or `-`.
    #[arg(short, long)]
    output: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Inertia: 3 numbers (diagonal) or 9 (row-major).
    #[arg(long, allow_hyphen_values = true)]
    inertia: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mgl: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha0: Option<String>,
}

impl SimulateArgs {
    fn settings(&self) -> Settings {
        let mut s = Settings::default();
        let pairs = [
            ("scenario", &self.scenario),
            ("formulation", &self.formulation),
            ("dt", &self.dt),
            ("t_final", &self.t_final),
            ("integrator", &self.integrator),
            ("lie_integrator", &self.lie_integrator),
            ("output", &self.output),
            ("format", &self.format),
            ("seed", &self.seed),
            ("inertia", &self.inertia),
            ("gamma", &self.gamma),
            ("mgl", &self.mgl),
            ("chi", &self.chi),
            ("xi0", &self.xi0),
            ("mu0", &self.mu0),
            ("z0", &self.z0),
            ("alpha0", &self.alpha0),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                s.set(k, v.clone());
            }
        }
        if self.reconstruct {
            s.set("reconstruct", "true");
        }
        s
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// algebra, brackets, dynamics, reduction or all.
    suite: Suite,
    #[arg(long)]
    seed: Option<String>,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

enum Failure {
    Verification(usize),
    Config(ConfigError),
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Diverged { step, time } => {
                Failure::Numerical(format!("numerical blow-up at step {step} (t = {time})"))
            }
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn output_error(path: Option<&Path>, e: io::Error) -> Failure {
    let target = path.map_or_else(|| "stdout".to_owned(), |p| p.display().to_string());
    Failure::Config(ConfigError::new("output", format!("cannot write {target}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(&args),
        Command::Verify(args) => verify(&args),
        Command::Scenarios => list_scenarios().map_err(|e| output_error(None, e)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(n)) => {
            eprintln!("herglotz: {n} check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("herglotz: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("herglotz: {msg}");
            ExitCode::from(3)
        }
    }
}

fn env_seed() -> Option<String> {
    std::env::var(config::SEED_ENV).ok()
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let settings = file.overlay(args.settings())?;
    let cfg = RunConfig::resolve(&settings, env_seed().as_deref())?;
    let scenario = scenarios::build(&cfg.params).map_err(|e| ConfigError::new("scenario", e.to_string()))?;
    let table = run(&cfg, &scenario)?;

    let path = cfg.output.as_deref();
    let write = |w: &mut dyn Write| -> io::Result<()> {
        match cfg.format {
            Format::Csv => table.write_csv(&mut *w)?,
            Format::Json => table.write_json(meta(&cfg, &scenario), &mut *w)?,
        }
        w.flush()
    };
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| output_error(path, e))?;
            write(&mut BufWriter::new(f)).map_err(|e| output_error(path, e))
        }
        None => write(&mut BufWriter::new(io::stdout().lock())).map_err(|e| output_error(None, e)),
    }
}

fn reduced<S, F>(cfg: &RunConfig, field: &F, s0: S, g0: herglotz_core::GroupElement) -> Result<Table, CoreError>
where
    S: LinearState + Row,
    F: VectorField<S> + BodyVelocity<S>,
{
    if cfg.reconstruct {
        let recon = Reconstruction(field);
        let traj = integrate_with_reconstruction(&recon, FullState::new(g0, s0), cfg.dt, cfg.n_steps, cfg.lie_integrator)?;
        Ok(Table::from_trajectory(&traj))
    } else {
        Ok(Table::from_trajectory(&integrate(field, s0, cfg.dt, cfg.n_steps, cfg.integrator)?))
    }
}

fn run(cfg: &RunConfig, sc: &Scenario) -> Result<Table, Failure> {
    let spec = &sc.spec;
    let table = match cfg.formulation {
        Formulation::Eph => reduced(cfg, &EphField::new(spec)?, sc.velocity, sc.g0)?,
        Formulation::Lpj => reduced(cfg, &LpjField::new(spec)?, sc.momentum(), sc.g0)?,
        Formulation::EphExt => reduced(cfg, &EphExtField(spec), sc.extended_velocity(), sc.g0)?,
        Formulation::LpjExt => reduced(cfg, &LpjExtField(spec), sc.extended_momentum(), sc.g0)?,
        Formulation::Unreduced => Table::from_trajectory(&integrate_with_reconstruction(
            &UnreducedHerglotzField(spec),
            sc.full_velocity(),
            cfg.dt,
            cfg.n_steps,
            cfg.lie_integrator,
        )?),
    };
    Ok(table)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Euler => "euler",
        Method::Rk4 => "rk4",
    }
}

fn lie_method_name(m: LieMethod) -> &'static str {
    match m {
        LieMethod::LieEuler => "lie-euler",
        LieMethod::Rkmk4 => "rkmk4",
    }
}

fn meta(cfg: &RunConfig, sc: &Scenario) -> serde_json::Value {
    let p = &cfg.params;
    let inertia: Vec<f64> = (0..3).flat_map(|i| (0..3).map(move |j| p.inertia[(i, j)])).collect();
    let (xi0, mu0) = match p.initial {
        InitialMotion::Velocity(v) => (Some(v.to_array()), None),
        InitialMotion::Momentum(m) => (None, Some(m.to_array())),
    };
    json!({
        "scenario": p.name,
        "formulation": cfg.formulation.name(),
        "dt": cfg.dt,
        "t_final": cfg.t_final,
        "steps": cfg.n_steps,
        "integrator": method_name(cfg.integrator),
        "lie_integrator": lie_method_name(cfg.lie_integrator),
        "reconstruct": cfg.reconstruct,
        "seed": cfg.seed,
        "params": {
            "inertia": inertia,
            "gamma": p.gamma,
            "mgl": p.mgl,
            "chi": p.chi.to_array(),
            "alpha0": p.alpha0.to_array(),
            "xi0": xi0,
            "mu0": mu0,
            "z0": p.z0,
            "g0": sc.g0.to_row_major(),
        },
    })
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let seed = config::resolve_seed(args.seed.as_deref(), env_seed().as_deref())?;
    let checks = run_suite(args.suite, seed)?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    for c in &checks {
        println!(
            "{} {:<40} residual {:.3e}  tolerance {:.1e}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        );
    }
    println!("{} of {} checks passed (seed {seed})", checks.len() - failed, checks.len());
    if let Some(path) = &args.report {
        let report = json!({
            "seed": seed,
            "passed": failed == 0,
            "checks": checks.iter().map(|c| json!({
                "name": c.name,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "passed": c.passed(),
            })).collect::<Vec<_>>(),
        });
        let write = || -> io::Result<()> {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()
        };
        write().map_err(|e| output_error(Some(path), e))?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

fn fmt_vec(v: [f64; 3]) -> String {
    format!("({},{},{})", v[0], v[1], v[2])
}

fn list_scenarios() -> io::Result<()> {
    let mut out = io::stdout().lock();
    for info in scenarios::SCENARIOS {
        let p = scenarios::defaults(info.name).expect("registered scenario");
        let inertia = p.inertia;
        let diagonal = (0..3).all(|i| (0..3).all(|j| i == j || inertia[(i, j)] == 0.0));
        let inertia = if diagonal {
            format!("diag{}", fmt_vec([inertia[(0, 0)], inertia[(1, 1)], inertia[(2, 2)]]))
        } else {
            format!("{:?}", inertia.as_slice())
        };
        let initial = match p.initial {
            InitialMotion::Velocity(v) => format!("xi0={}", fmt_vec(v.to_array())),
            InitialMotion::Momentum(m) => format!("mu0={}", fmt_vec(m.to_array())),
        };
        let g0 = p.g0.to_row_major().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        writeln!(
            out,
            "{} inertia={inertia} gamma={} mgl={} chi={} alpha0={} {initial} z0={} g0=[{g0}] # {}",
            info.name,
            p.gamma,
            p.mgl,
            fmt_vec(p.chi.to_array()),
            fmt_vec(p.alpha0.to_array()),
            p.z0,
            info.description
        )?;
    }
    out.flush()
}
