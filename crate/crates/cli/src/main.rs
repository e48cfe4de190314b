//! `spinsq`: squeezing parameter, sweeps, closed-form checks and evolution
//! searches for coupled spin-1 pairs.
//!
//! Exit codes: 0 success, 1 invalid flags, 2 invalid input, 3 undefined ξ.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinsq::check::{render_report, run_check};
use spinsq::spin::{Direction, Frame};
use spinsq::squeezing::{squeezing_report, FrameGauge, FramePolicy};
use spinsq::states::{read_state_file, CoupledState};
use spinsq::sweep::{fmt_real, run_sweep, Axis, SweepKind, SweepSpec, SweepTable};

#[derive(Parser, Debug)]
#[command(name = "spinsq", version, about = "Spin squeezing of coupled spin-1 pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squeezing report for a state file.
    Xi {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Grid sweep written as CSV.
    Sweep {
        /// product, mixed, config1, config2, config3, evolve or evolve2.
        kind: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Initial state for evolve and evolve2 (builtin name or state file).
        #[arg(long, default_value = "coherent-11")]
        initial: String,
        /// Fixed stage-1 time for evolve2 instead of a τ₁ grid.
        #[arg(long)]
        tau1: Option<f64>,
    },
    /// Compares the printed closed forms against the engine.
    Check {
        /// Report destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trajectory or two-stage search from an initial state.
    Evolve {
        /// `coherent-11`, `mixed-10`, or a state file.
        #[arg(long, default_value = "coherent-11")]
        initial: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        stages: u8,
        /// Fixed stage-1 time for two stages instead of a τ₁ grid.
        #[arg(long)]
        tau1: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        policy: PolicyArgs,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    /// `start:stop:count` per axis in order; `pi` multiples are accepted.
    #[arg(long = "grid")]
    grids: Vec<String>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyName {
    Fixed,
    Aligned,
    Optimized,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GaugeName {
    Lab,
    Xz,
}

#[derive(Args, Debug)]
struct PolicyArgs {
    #[arg(long, value_enum)]
    policy: Option<PolicyName>,
    /// Perpendicular-direction gauge for the aligned policy.
    #[arg(long, value_enum)]
    gauge: Option<GaugeName>,
    /// Perpendicular direction of subsystem 1 for the fixed policy (`x`, `y`, `z` or `a,b,c`).
    #[arg(long)]
    axis1: Option<String>,
    /// Perpendicular direction of subsystem 2 for the fixed policy.
    #[arg(long)]
    axis2: Option<String>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn flags(msg: impl Display) -> Failure {
    Failure { code: 1, message: msg.to_string() }
}

fn input(msg: impl Display) -> Failure {
    Failure { code: 2, message: msg.to_string() }
}

fn parse_axis(s: &str) -> Result<Direction<f64>, Failure> {
    match s.trim() {
        "x" => return Ok(Direction::unit_x()),
        "y" => return Ok(Direction::unit_y()),
        "z" => return Ok(Direction::unit_z()),
        _ => {}
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| flags(format!("cannot parse axis '{s}'")))?;
    let v: [f64; 3] = parts
        .try_into()
        .map_err(|_| flags(format!("axis '{s}' needs three components")))?;
    Direction::from_vector(v).map_err(|_| flags(format!("axis '{s}' is the zero vector")))
}

impl PolicyArgs {
    fn resolve(&self, default: FramePolicy<f64>) -> Result<FramePolicy<f64>, Failure> {
        let name = match self.policy {
            Some(n) => n,
            None if self.axis1.is_some() || self.axis2.is_some() => PolicyName::Fixed,
            None if self.gauge.is_some() => PolicyName::Aligned,
            None => return Ok(default),
        };
        if name != PolicyName::Fixed && (self.axis1.is_some() || self.axis2.is_some()) {
            return Err(flags("--axis1/--axis2 only apply to --policy fixed"));
        }
        if name != PolicyName::Aligned && self.gauge.is_some() {
            return Err(flags("--gauge only applies to --policy aligned"));
        }
        Ok(match name {
            PolicyName::Fixed => {
                let a1 = parse_axis(self.axis1.as_deref().unwrap_or("x"))?;
                let a2 = parse_axis(self.axis2.as_deref().unwrap_or("x"))?;
                FramePolicy::Fixed(Frame::with_perp(a1), Frame::with_perp(a2))
            }
            PolicyName::Aligned => FramePolicy::MeanSpinAligned(match self.gauge.unwrap_or(GaugeName::Lab) {
                GaugeName::Lab => FrameGauge::Lab,
                GaugeName::Xz => FrameGauge::Xz,
            }),
            PolicyName::Optimized => FramePolicy::optimized(),
        })
    }
}

fn load_state(path: &Path) -> Result<CoupledState<f64>, Failure> {
    read_state_file(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn initial_state(name: &str) -> Result<CoupledState<f64>, Failure> {
    match name {
        "coherent-11" => Ok(CoupledState::basis(0, 0)),
        "mixed-10" => Ok(CoupledState::basis(0, 1)),
        path => load_state(Path::new(path)),
    }
}

fn parse_grids(grids: &[String]) -> Result<Vec<Axis>, Failure> {
    grids.iter().map(|g| g.parse::<Axis>().map_err(flags)).collect()
}

fn vec3(v: [f64; 3]) -> String {
    v.map(fmt_real).join(",")
}

fn cmd_xi(state: &Path, policy: &PolicyArgs) -> Result<u8, Failure> {
    let policy = policy.resolve(FramePolicy::optimized())?;
    let st = load_state(state)?;
    let r = squeezing_report(&st, &policy);
    let degenerate: Vec<String> = r.degenerate_subsystems.iter().map(|s| s.index().to_string()).collect();
    println!("policy={}", policy.name());
    println!("xi={}", fmt_real(r.xi));
    println!("valid={}", r.valid);
    println!("var1={}", fmt_real(r.var1));
    println!("var2={}", fmt_real(r.var2));
    println!("cross={}", fmt_real(r.cross));
    println!("ms1={}", vec3(r.ms1.vector));
    println!("ms1_magnitude={}", fmt_real(r.ms1.magnitude));
    println!("ms2={}", vec3(r.ms2.vector));
    println!("ms2_magnitude={}", fmt_real(r.ms2.magnitude));
    for (k, f) in [(1, &r.frame1), (2, &r.frame2)] {
        println!("frame{k}_n={}", vec3(f.n.to_array()));
        println!("frame{k}_perp={}", vec3(f.n_perp.to_array()));
        println!("frame{k}_perp2={}", vec3(f.n_perp2.to_array()));
    }
    println!("degenerate={}", degenerate.join(","));
    println!("SQUEEZED={}", r.is_squeezed());
    if r.valid {
        Ok(0)
    } else {
        eprintln!("spinsq: xi is undefined: both mean spins vanish");
        Ok(3)
    }
}

fn emit(table: &SweepTable, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => table.write_csv(p).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{}", table.to_csv());
            Ok(())
        }
    }
}

fn summarize(table: &SweepTable, kind: SweepKind) {
    let xi_col = if table.columns.contains(&"xi_engine") { "xi_engine" } else { "xi" };
    let Some(k) = table.columns.iter().position(|c| *c == xi_col) else { return };
    let best = table
        .rows
        .iter()
        .filter(|r| !r[k].is_nan())
        .fold(None::<&Vec<f64>>, |b, r| match b {
            Some(b) if b[k] <= r[k] => Some(b),
            _ => Some(r),
        });
    if let Some(row) = best {
        let at: Vec<String> = table.columns[..k]
            .iter()
            .zip(row)
            .map(|(c, v)| format!("{c}={v:.6}"))
            .collect();
        eprintln!("{}: rows={} min {}={:.6} at {}", kind.name(), table.rows.len(), xi_col, row[k], at.join(" "));
    }
}

fn run_spec(spec: SweepSpec, out: Option<&Path>) -> Result<u8, Failure> {
    let table = run_sweep(&spec).map_err(flags)?;
    emit(&table, out)?;
    if out.is_some() {
        summarize(&table, spec.kind());
    }
    Ok(0)
}

fn cmd_sweep(kind: &str, grid: &GridArgs, policy: &PolicyArgs, initial: &str, tau1: Option<f64>) -> Result<u8, Failure> {
    let kind: SweepKind = kind.parse().map_err(flags)?;
    let mut spec = SweepSpec::new(kind);
    spec = spec.with_axes(&parse_grids(&grid.grids)?).map_err(flags)?;
    let policy = policy.resolve(kind.default_policy())?;
    spec = spec.with_policy(policy);
    if let Some(t) = tau1 {
        spec = spec.with_launch(t).map_err(flags)?;
    }
    if matches!(kind, SweepKind::Evolve | SweepKind::Evolve2) {
        spec = spec.with_initial(initial_state(initial)?);
    } else if initial != "coherent-11" {
        return Err(flags("--initial only applies to the evolve kinds"));
    }
    run_spec(spec, grid.out.as_deref())
}

fn cmd_evolve(initial: &str, stages: u8, tau1: Option<f64>, grid: &GridArgs, policy: &PolicyArgs) -> Result<u8, Failure> {
    let kind = if stages == 2 { SweepKind::Evolve2 } else { SweepKind::Evolve };
    if stages == 1 && tau1.is_some() {
        return Err(flags("--tau1 needs --stages 2"));
    }
    let mut axes = parse_grids(&grid.grids)?;
    // with a fixed stage-1 time the only grid given is the stage-2 grid
    if tau1.is_some() && axes.len() == 1 {
        axes.insert(0, kind.default_axes()[0]);
    }
    let mut spec = SweepSpec::new(kind).with_axes(&axes).map_err(flags)?;
    spec = spec.with_policy(policy.resolve(kind.default_policy())?);
    if let Some(t) = tau1 {
        spec = spec.with_launch(t).map_err(flags)?;
    }
    spec = spec.with_initial(initial_state(initial)?);
    run_spec(spec, grid.out.as_deref())
}

fn cmd_check(out: Option<&Path>) -> Result<u8, Failure> {
    let report = run_check();
    let text = render_report(&report);
    match out {
        Some(p) => {
            fs::write(p, &text).map_err(|e| input(format!("{}: {e}", p.display())))?;
            for f in &report.families {
                eprintln!("{}: {}", f.label, f.flag());
            }
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Xi { state, policy } => cmd_xi(state, policy),
        Command::Sweep { kind, grid, policy, initial, tau1 } => cmd_sweep(kind, grid, policy, initial, *tau1),
        Command::Check { out } => cmd_check(out.as_deref()),
        Command::Evolve { initial, stages, tau1, grid, policy } => cmd_evolve(initial, *stages, *tau1, grid, policy),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("spinsq: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
