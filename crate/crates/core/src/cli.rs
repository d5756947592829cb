//! Command-line front end: `engine simulate | invert | check | aircraft`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::checks::{self, CheckRow, ConvergenceRow};
use crate::corpus::Aircraft;
use crate::error::Error;
use crate::integrator::{
    boundary_momenta, inverse_dynamics_path, simulate_hamiltonian, simulate_lagrangian, ForceSamples, Trajectory,
};
use crate::scenario::{ConfigError, InitialState, Picture, Scenario, SimulationPlan, AIRCRAFT_FREE, AIRCRAFT_STEADY};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Environment variable that redirects every output file into one directory.
pub const OUT_DIR_ENV: &str = "ENGINE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "engine", version, about = "Forced mechanics in Lagrangian, Hamiltonian and Poisson form")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory as CSV.
    Simulate { file: PathBuf },
    /// Recover the force schedule realising the scenario's desired path.
    Invert { file: PathBuf },
    /// Run the built-in identity catalogue.
    Check { suite: Suite },
    /// Run the bundled aircraft example.
    Aircraft {
        /// Level flight under thrust instead of free flight.
        #[arg(long)]
        steady: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Variational,
    All,
}

enum Failure {
    Config(ConfigError),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Simulate { file } => cmd_simulate(&file, &mut out),
        Command::Invert { file } => cmd_invert(&file, &mut out),
        Command::Check { suite } => cmd_check(suite, &mut out),
        Command::Aircraft { steady } => cmd_aircraft(steady, &mut out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

/// Where a result file goes: the scenario's `output.path` (or `default`),
/// moved into `ENGINE_OUT_DIR` when that is set.
pub fn output_path(configured: Option<&Path>, default: &str) -> PathBuf {
    let path = configured.map_or_else(|| PathBuf::from(default), Path::to_path_buf);
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            PathBuf::from(dir).join(path.file_name().map_or_else(|| OsString::from(default), OsString::from))
        }
        _ => path,
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(", ")
}

/// Writes `t,x1..,v1..,p1..,f1..,H` with 17 significant digits; `energy`
/// holds `H` per sample.
pub fn write_trajectory_csv<W: Write>(w: &mut W, traj: &Trajectory, energy: &[f64]) -> io::Result<()> {
    let m = traj.dim();
    let mut header = vec!["t".to_string()];
    for prefix in ["x", "v", "p", "f"] {
        header.extend((1..=m).map(|k| format!("{prefix}{k}")));
    }
    header.push("H".into());
    writeln!(w, "{}", header.join(","))?;
    for (i, h) in energy.iter().enumerate() {
        let mut row = vec![num(traj.t[i])];
        for col in [&traj.x[i], &traj.v[i], &traj.p[i], &traj.f[i]] {
            row.extend(col.iter().map(|v| num(*v)));
        }
        row.push(num(*h));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes `t,f1..fm` with 17 significant digits.
pub fn write_forces_csv<W: Write>(w: &mut W, forces: &ForceSamples) -> io::Result<()> {
    let m = forces.f.first().map_or(0, Vec::len);
    let header: Vec<String> = std::iter::once("t".to_string()).chain((1..=m).map(|k| format!("f{k}"))).collect();
    writeln!(w, "{}", header.join(","))?;
    for (t, f) in forces.t.iter().zip(&forces.f) {
        let row: Vec<String> = std::iter::once(num(*t)).chain(f.iter().map(|v| num(*v))).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn stem(file: &Path) -> String {
    file.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned())
}

/// Runs a validated simulation plan.
pub fn simulate(plan: &SimulationPlan) -> crate::Result<Trajectory> {
    let sys = &plan.system;
    match (&plan.initial, plan.picture) {
        (InitialState::Velocity(v), Picture::Lagrangian) => {
            simulate_lagrangian(sys, &plan.schedule, v, plan.t0, plan.t1, plan.dt)
        }
        (InitialState::Momentum(p), Picture::Hamiltonian) => {
            simulate_hamiltonian(sys, &plan.schedule, p, plan.t0, plan.t1, plan.dt)
        }
        (InitialState::Velocity(v), Picture::Hamiltonian) => {
            let p = crate::lagrangian::legendre(sys, v)?;
            simulate_hamiltonian(sys, &plan.schedule, &p, plan.t0, plan.t1, plan.dt)
        }
        (InitialState::Momentum(p), Picture::Lagrangian) => {
            let v = crate::hamiltonian::legendre_invert(sys, p, &Default::default())?;
            simulate_lagrangian(sys, &plan.schedule, &v, plan.t0, plan.t1, plan.dt)
        }
    }
}

fn run_plan<W: Write>(plan: &SimulationPlan, path: &Path, out: &mut W) -> Result<Trajectory, Failure> {
    let traj = simulate(plan)?;
    let h = traj.energy(&plan.system)?;
    let mut file = create(path)?;
    write_trajectory_csv(&mut file, &traj, &h)?;
    file.flush()?;
    let (a, b) = boundary_momenta(&plan.system, &traj)?;
    writeln!(out, "boundary momenta")?;
    writeln!(out, "  eta(t0 = {}) = [{}]", traj.t[0], join(&a.p))?;
    writeln!(out, "  eta(t1 = {}) = [{}]", traj.t[traj.len() - 1], join(&b.p))?;
    writeln!(out, "final H = {}", num(h[h.len() - 1]))?;
    writeln!(out, "wrote {} samples to {}", traj.len(), path.display())?;
    Ok(traj)
}

fn cmd_simulate<W: Write>(file: &Path, out: &mut W) -> Result<i32, Failure> {
    let scenario = Scenario::load(file)?;
    let plan = scenario.simulation_plan()?;
    let path = output_path(plan.output.as_deref(), &format!("{}.csv", stem(file)));
    run_plan(&plan, &path, out)?;
    Ok(EXIT_OK)
}

fn cmd_invert<W: Write>(file: &Path, out: &mut W) -> Result<i32, Failure> {
    let scenario = Scenario::load(file)?;
    let plan = scenario.inversion_plan()?;
    let forces = inverse_dynamics_path(&plan.system, &plan.path, &plan.params, &plan.times)?;
    let configured = plan.output.as_deref().map(|p| p.with_file_name(format!("{}_forces.csv", stem(p))));
    let path = output_path(configured.as_deref(), &format!("{}_forces.csv", stem(file)));
    let mut f = create(&path)?;
    write_forces_csv(&mut f, &forces)?;
    f.flush()?;
    if let (Some(first), Some(last)) = (forces.f.first(), forces.f.last()) {
        writeln!(out, "zeta(t0) = [{}]", join(first))?;
        writeln!(out, "zeta(t1) = [{}]", join(last))?;
    }
    writeln!(out, "wrote {} samples to {}", forces.t.len(), path.display())?;
    Ok(EXIT_OK)
}

fn print_rows<W: Write>(out: &mut W, rows: &[CheckRow]) -> io::Result<bool> {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut all = true;
    for r in rows {
        let ok = r.passed();
        all &= ok;
        let bound = match r.lower {
            Some(lo) => format!("in [{lo}, {}]", r.tolerance),
            None => format!("<= {:.1e}", r.tolerance),
        };
        writeln!(out, "{}  {:width$}  {:>12.4e}  {bound}", if ok { "PASS" } else { "FAIL" }, r.name, r.value)?;
    }
    Ok(all)
}

fn print_table<W: Write>(out: &mut W, table: &[ConvergenceRow]) -> io::Result<()> {
    writeln!(out, "{:>8}  {:>12}  {:>8}", "dt", "max |res|", "ratio")?;
    let mut prev: Option<(f64, f64)> = None;
    for row in table {
        let max = row.max_abs();
        let ratio = match prev {
            Some((dt, res)) if (dt / row.dt - 2.0).abs() < 1e-12 => format!("{:.2}", res / max),
            _ => "-".to_string(),
        };
        writeln!(out, "{:>8}  {:>12.4e}  {:>8}", row.dt, max, ratio)?;
        prev = Some((row.dt, max));
    }
    Ok(())
}

fn cmd_check<W: Write>(suite: Suite, out: &mut W) -> Result<i32, Failure> {
    let mut ok = true;
    if matches!(suite, Suite::Identities | Suite::All) {
        writeln!(out, "identities")?;
        ok &= print_rows(out, &checks::identities(checks::DEFAULT_SEED)?)?;
    }
    if matches!(suite, Suite::Variational | Suite::All) {
        writeln!(out, "variational principle, aircraft free flight, 10 random variations")?;
        let (rows, table) = checks::variational(checks::DEFAULT_SEED)?;
        print_table(out, &table)?;
        ok &= print_rows(out, &rows)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED_CHECK })
}

fn cmd_aircraft<W: Write>(steady: bool, out: &mut W) -> Result<i32, Failure> {
    let (text, name) = if steady { (AIRCRAFT_STEADY, "aircraft_steady") } else { (AIRCRAFT_FREE, "aircraft_free") };
    let plan = Scenario::from_toml(text)?.simulation_plan()?;
    let path = output_path(plan.output.as_deref(), &format!("{name}.csv"));
    let traj = run_plan(&plan, &path, out)?;
    let plane = Aircraft::default();
    let last = traj.len() - 1;
    if steady {
        let drift = traj.x.iter().fold(0.0f64, |m, x| m.max(x[1].abs()));
        writeln!(out, "max |x2| over the flight = {drift:.3e}")?;
        writeln!(out, "x(T) = [{}]", join(&traj.x[last]))?;
    } else {
        let err = traj.t.iter().zip(&traj.x).fold(0.0f64, |m, (&t, x)| {
            let exact = plane.free_position(t);
            m.max((x[0] - exact[0]).abs()).max((x[1] - exact[1]).abs())
        });
        writeln!(out, "x(T) = [{}]", join(&traj.x[last]))?;
        writeln!(out, "max |x - closed form| = {err:.3e}")?;
    }
    Ok(EXIT_OK)
}
