//! `lv3`: command-line reports on the symmetric 3D Lotka-Volterra flow.
//!
//! Every subcommand is deterministic: identical flags (and seed, where one
//! applies) produce byte-identical output. Exit code 0 means the run
//! succeeded, 1 means a verification contract failed, 2 means the input
//! was rejected.

mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lv3_core::compactification::{
    closed_form_flow, compactified_field_at, fit_constants, infinity_field, Chart, ChartState,
};
use lv3_core::ec::{classify, ECValue};
use lv3_core::equilibria::{stability_report, Family};
use lv3_core::fibers::{fiber_report, GridSettings};
use lv3_core::integrator::{
    integrate, IntegratorSettings, DEFAULT_BLOW_UP_NORM, DEFAULT_MAX_STEPS,
};
use lv3_core::model;
use lv3_core::State;

type CliError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "lv3", version, about = "Reports on the symmetric 3D Lotka-Volterra flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow and emit a trajectory CSV
    Simulate(SimulateArgs),
    /// Run the identity battery and emit a JSON summary
    Verify(verify::VerifyArgs),
    /// Emit the stability report of one equilibrium as JSON
    Equilibria(EquilibriaArgs),
    /// Compare the chart flow against its closed form, or map infinity
    Compactify(CompactifyArgs),
    /// Energy-Casimir value tools
    Ec(EcArgs),
    /// Count fiber components and emit the census row as JSON
    Fiber(FiberArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Initial condition "x,y,z"
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    ic: [f64; 3],
    /// Integration horizon
    #[arg(long, allow_negative_numbers = true)]
    t_end: f64,
    /// Fixed step size; selects the classical fourth-order stepper
    #[arg(long, conflicts_with = "adaptive")]
    dt: Option<f64>,
    /// Embedded adaptive stepper (the default when --dt is absent)
    #[arg(long)]
    adaptive: bool,
    /// Relative and absolute tolerance for the adaptive stepper
    #[arg(long, default_value_t = 1e-10, conflicts_with = "dt")]
    tol: f64,
    /// Norm beyond which the run is declared blown up
    #[arg(long, default_value_t = DEFAULT_BLOW_UP_NORM)]
    blow_up_norm: f64,
    /// Step budget
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquilibriaArgs {
    /// Family name: e1, e2, or e3
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Shared coordinate value of the equilibrium
    #[arg(long, allow_negative_numbers = true)]
    m: f64,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompactifyArgs {
    /// Chart initial condition "z1,z2,z3"
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true,
          required_unless_present = "infinity")]
    ic: Option<[f64; 3]>,
    /// Horizon in the chart's own time
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    t_end: f64,
    /// Chart name: u1, u2, u3, v1, v2, or v3
    #[arg(long, default_value = "u1", value_parser = parse_chart)]
    chart: Chart,
    /// Adaptive tolerance for the numeric reference run
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Emit the vector-field grid on the plane at infinity instead
    #[arg(long)]
    infinity: bool,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EcArgs {
    #[command(subcommand)]
    action: EcAction,
}

#[derive(Subcommand)]
enum EcAction {
    /// Classify an (h, c) value onto its stratum
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Energy value
    #[arg(long, allow_negative_numbers = true)]
    h: f64,
    /// Casimir value
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Half-width pulling near-boundary values onto the axes and the
    /// diagonal c = -h before classifying
    #[arg(long, default_value_t = 0.0)]
    snap: f64,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiberArgs {
    /// Energy value
    #[arg(long, allow_negative_numbers = true)]
    h: f64,
    /// Casimir value
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Raster half-width
    #[arg(long = "box", default_value_t = 6.0)]
    box_half_width: f64,
    /// Cells per axis
    #[arg(long, default_value_t = 161)]
    grid: usize,
    /// Slab thickness override
    #[arg(long)]
    thickness: Option<f64>,
    /// Worker threads for cell marking; all cores when omitted
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("{part:?}: {e}"))?;
    }
    Ok(out)
}

fn parse_family(s: &str) -> Result<Family, String> {
    match s.to_ascii_uppercase().as_str() {
        "E1" => Ok(Family::E1),
        "E2" => Ok(Family::E2),
        "E3" => Ok(Family::E3),
        other => Err(format!("unknown family {other:?}; expected e1, e2, or e3")),
    }
}

fn parse_chart(s: &str) -> Result<Chart, String> {
    match s.to_ascii_uppercase().as_str() {
        "U1" => Ok(Chart::U1),
        "U2" => Ok(Chart::U2),
        "U3" => Ok(Chart::U3),
        "V1" => Ok(Chart::V1),
        "V2" => Ok(Chart::V2),
        "V3" => Ok(Chart::V3),
        other => Err(format!(
            "unknown chart {other:?}; expected u1, u2, u3, v1, v2, or v3"
        )),
    }
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub(crate) fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        // A consumer that stops reading mid-stream is not our failure.
        Err(e) if is_broken_pipe(e.as_ref()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(e: &(dyn std::error::Error + 'static)) -> bool {
    if let Some(io_err) = e.downcast_ref::<io::Error>() {
        return io_err.kind() == io::ErrorKind::BrokenPipe;
    }
    false
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Equilibria(args) => equilibria(&args),
        Command::Compactify(args) => compactify(&args),
        Command::Ec(args) => match args.action {
            EcAction::Classify(c) => ec_classify(&c),
        },
        Command::Fiber(args) => fiber(&args),
    }
}

fn require_horizon(t_end: f64) -> Result<(), CliError> {
    if t_end.is_finite() && t_end >= 0.0 {
        Ok(())
    } else {
        Err(format!("--t-end must be finite and nonnegative, got {t_end}").into())
    }
}

fn simulate(args: &SimulateArgs) -> Result<u8, CliError> {
    require_horizon(args.t_end)?;
    let settings = match args.dt {
        Some(dt) => IntegratorSettings::fixed(dt)?,
        None => IntegratorSettings::adaptive(args.tol, args.tol)?,
    }
    .with_blow_up_norm(args.blow_up_norm)?
    .with_max_steps(args.max_steps)?;
    let p0 = State::new(args.ic[0], args.ic[1], args.ic[2])?;

    let traj = integrate(model::field_at, p0, args.t_end, &settings);
    let mut w = open_out(args.out.as_deref())?;
    writeln!(w, "t,x,y,z,H,C,f,g")?;
    for s in &traj.samples {
        let p = s.state;
        let i = s.invariants;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t,
            p.x(),
            p.y(),
            p.z(),
            i.h,
            i.c,
            i.f,
            i.g
        )?;
    }
    w.flush()?;
    eprintln!("termination: {}", traj.termination);
    Ok(0)
}

fn equilibria(args: &EquilibriaArgs) -> Result<u8, CliError> {
    let report = stability_report(args.family, args.m)?;
    emit_json(&report, args.out.as_deref())?;
    Ok(0)
}

fn compactify(args: &CompactifyArgs) -> Result<u8, CliError> {
    if args.infinity {
        return infinity_grid(args.out.as_deref());
    }
    require_horizon(args.t_end)?;
    let ic = args.ic.expect("required unless --infinity");
    let cs0 = ChartState::new(ic[0], ic[1], ic[2])?;
    let constants = fit_constants(&cs0)?;
    let direction = args.chart.time_direction();

    let settings = IntegratorSettings::adaptive(args.tol, args.tol)?;
    let p0 = State::new(ic[0], ic[1], ic[2])?;
    let traj = integrate(
        |v| compactified_field_at(v) * direction,
        p0,
        args.t_end,
        &settings,
    );

    let mut w = open_out(args.out.as_deref())?;
    writeln!(w, "t,z1,z2,z3,z1_closed,z2_closed,z3_closed")?;
    for s in &traj.samples {
        // V charts run the shared system backwards, so their closed form
        // is the forward solution read at reversed time.
        let exact = closed_form_flow(&constants, direction * s.t)?;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.t,
            s.state.x(),
            s.state.y(),
            s.state.z(),
            exact.z1(),
            exact.z2(),
            exact.z3()
        )?;
    }
    w.flush()?;
    eprintln!("termination: {}", traj.termination);
    Ok(0)
}

fn infinity_grid(out: Option<&Path>) -> Result<u8, CliError> {
    let mut w = open_out(out)?;
    writeln!(w, "z1,z2,dz1,dz2")?;
    for i in 0..21 {
        for j in 0..21 {
            let z1 = -0.5 + 0.1 * i as f64;
            let z2 = -0.5 + 0.1 * j as f64;
            let (d1, d2) = infinity_field(z1, z2);
            writeln!(w, "{z1:.16e},{z2:.16e},{d1:.16e},{d2:.16e}")?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn ec_classify(args: &ClassifyArgs) -> Result<u8, CliError> {
    if !(args.snap.is_finite() && args.snap >= 0.0) {
        return Err(format!("--snap must be finite and nonnegative, got {}", args.snap).into());
    }
    let mut h = args.h;
    let mut c = args.c;
    if h.abs() <= args.snap {
        h = 0.0;
    }
    if c.abs() <= args.snap {
        c = 0.0;
    }
    if c != 0.0 && (c + h).abs() <= args.snap {
        h = -c;
    }
    let stratum = classify(ECValue::new(h, c)?);
    emit_json(&serde_json::json!({ "stratum": stratum }), args.out.as_deref())?;
    Ok(0)
}

fn fiber(args: &FiberArgs) -> Result<u8, CliError> {
    // The probe squares the level values; cap them so that never overflows.
    for (flag, v) in [("--h", args.h), ("--c", args.c)] {
        if !v.is_finite() || v.abs() > 1e150 {
            return Err(
                format!("{flag} must be finite with magnitude at most 1e150, got {v:e}").into(),
            );
        }
    }
    let v = ECValue::new(args.h, args.c)?;
    let grid = GridSettings {
        half_width: args.box_half_width,
        cells_per_axis: args.grid,
        thickness: args.thickness,
    };
    let report = match args.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()?
            .install(|| fiber_report(v, &grid))?,
        None => fiber_report(v, &grid)?,
    };
    emit_json(&report, args.out.as_deref())?;
    Ok(0)
}
