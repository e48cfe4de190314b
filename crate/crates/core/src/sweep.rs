//! Grid sweeps written as CSV.
//!
//! Rows are evaluated in parallel but collected in grid order, and every
//! evaluation is deterministic, so repeated runs give byte-identical files.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{cross_quadratic_generator, evolve, linspace, pair_exchange_generator, two_stage_search};
use crate::error::{Error, Result};
use crate::squeezing::{closed_form_xi, squeezing_report, ClosedFormFamily, FrameGauge, FramePolicy};
use crate::states::{canonical_squeezed, config, product, ConfigKind, CoupledState, Spin1State};

/// Uniform grid of `count ≥ 2` points over `[start, stop]`, `start < stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    start: f64,
    stop: f64,
    count: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Error::InvalidSweep("grid bounds must be finite".into()));
        }
        if !(start < stop) {
            return Err(Error::InvalidSweep(format!("grid start {start} must be below stop {stop}")));
        }
        if count < 2 {
            return Err(Error::InvalidSweep(format!("grid count {count} must be at least 2")));
        }
        Ok(Self { start, stop, count })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

/// Accepts plain numbers and multiples of π written as `pi`, `2pi`, `0.5pi`.
fn parse_bound(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidSweep(format!("cannot parse grid bound '{s}'"));
    if let Some(prefix) = s.strip_suffix("pi") {
        let factor = match prefix.trim() {
            "" => 1.0,
            "-" => -1.0,
            p => p.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        return Ok(factor * PI);
    }
    s.parse::<f64>().map_err(|_| bad())
}

impl FromStr for Axis {
    type Err = Error;

    /// `start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidSweep(format!("grid '{s}' is not of the form start:stop:count")));
        }
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidSweep(format!("cannot parse grid count '{}'", parts[2])))?;
        Axis::new(parse_bound(parts[0])?, parse_bound(parts[1])?, count)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// Product of two canonical squeezed states over `(θ₁, θ₂)`.
    Product,
    /// Coherent `|+1⟩` times a canonical squeezed state over `θ`.
    Mixed,
    /// A configuration family over `(α, β)`, plus `(φ₁, φ₂)` for kind 3.
    Config(ConfigKind),
    /// Pair-exchange trajectory over `τ`.
    Evolve,
    /// Pair exchange for `τ₁`, then the cross-quadratic generator for `τ₂`.
    Evolve2,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Product => "product",
            SweepKind::Mixed => "mixed",
            SweepKind::Config(ConfigKind::One) => "config1",
            SweepKind::Config(ConfigKind::Two) => "config2",
            SweepKind::Config(ConfigKind::Three) => "config3",
            SweepKind::Evolve => "evolve",
            SweepKind::Evolve2 => "evolve2",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SweepKind::Product => &["theta1", "theta2", "xi_engine", "xi_closed"],
            SweepKind::Mixed => &["theta", "xi_engine", "xi_closed"],
            SweepKind::Config(ConfigKind::Three) => &["alpha", "beta", "phi1", "phi2", "xi_engine", "xi_closed"],
            SweepKind::Config(_) => &["alpha", "beta", "xi_engine", "xi_closed"],
            SweepKind::Evolve => &["tau", "xi"],
            SweepKind::Evolve2 => &["tau1", "tau2", "xi"],
        }
    }

    /// Number of grid axes.
    pub fn dims(self) -> usize {
        match self {
            SweepKind::Mixed | SweepKind::Evolve => 1,
            SweepKind::Config(ConfigKind::Three) => 4,
            _ => 2,
        }
    }

    pub fn default_axes(self) -> Vec<Axis> {
        let a = |s, e, n| Axis::new(s, e, n).expect("valid default grid");
        match self {
            // the Eq.-21 family has zero mean spin at θ = π; the default range stays clear of it
            SweepKind::Product => vec![a(0.05, 3.10, 50); 2],
            SweepKind::Mixed => vec![a(0.0, PI, 201)],
            SweepKind::Config(ConfigKind::Three) => {
                vec![a(0.0, PI, 60), a(0.0, PI, 60), a(0.0, 1.5 * PI, 4), a(0.0, 1.5 * PI, 4)]
            }
            SweepKind::Config(_) => vec![a(0.0, PI, 60); 2],
            SweepKind::Evolve => vec![a(0.0, 3.0, 300)],
            SweepKind::Evolve2 => vec![a(0.0, 3.0, 60); 2],
        }
    }

    pub fn default_policy(self) -> FramePolicy<f64> {
        match self {
            SweepKind::Product | SweepKind::Mixed => FramePolicy::MeanSpinAligned(FrameGauge::Xz),
            _ => FramePolicy::optimized(),
        }
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "product" => SweepKind::Product,
            "mixed" => SweepKind::Mixed,
            "config1" => SweepKind::Config(ConfigKind::One),
            "config2" => SweepKind::Config(ConfigKind::Two),
            "config3" => SweepKind::Config(ConfigKind::Three),
            "evolve" => SweepKind::Evolve,
            "evolve2" => SweepKind::Evolve2,
            other => return Err(Error::InvalidSweep(format!("unknown sweep kind '{other}'"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    kind: SweepKind,
    axes: Vec<Axis>,
    policy: FramePolicy<f64>,
    initial: CoupledState<f64>,
    launch: Option<f64>,
}

impl SweepSpec {
    /// Spec with the kind's default grids, policy and `|1,1⟩` initial state.
    pub fn new(kind: SweepKind) -> Self {
        Self {
            kind,
            axes: kind.default_axes(),
            policy: kind.default_policy(),
            initial: CoupledState::basis(0, 0),
            launch: None,
        }
    }

    /// Replaces the leading axes with `axes`; the rest keep their defaults.
    pub fn with_axes(mut self, axes: &[Axis]) -> Result<Self> {
        if axes.len() > self.kind.dims() {
            return Err(Error::InvalidSweep(format!(
                "{} takes at most {} grid(s), got {}",
                self.kind.name(),
                self.kind.dims(),
                axes.len()
            )));
        }
        self.axes[..axes.len()].copy_from_slice(axes);
        if matches!(self.kind, SweepKind::Product | SweepKind::Mixed) {
            for ax in &self.axes {
                if ax.start < 0.0 || ax.stop > PI {
                    return Err(Error::InvalidSweep(format!("theta grid {ax} leaves [0, pi]")));
                }
            }
        }
        if matches!(self.kind, SweepKind::Evolve | SweepKind::Evolve2) && self.axes.iter().any(|a| a.start < 0.0) {
            return Err(Error::InvalidSweep("tau grids start at 0 or later".into()));
        }
        Ok(self)
    }

    pub fn with_policy(mut self, policy: FramePolicy<f64>) -> Self {
        self.policy = policy;
        self
    }

    /// Initial state for the evolution kinds.
    pub fn with_initial(mut self, state: CoupledState<f64>) -> Self {
        self.initial = state;
        self
    }

    /// Fixes the stage-1 time of `evolve2` instead of sweeping it.
    pub fn with_launch(mut self, tau1: f64) -> Result<Self> {
        if self.kind != SweepKind::Evolve2 {
            return Err(Error::InvalidSweep("a stage-1 time only applies to two-stage evolution".into()));
        }
        if !(tau1.is_finite() && tau1 >= 0.0) {
            return Err(Error::InvalidSweep(format!("stage-1 time {tau1} must be finite and non-negative")));
        }
        self.launch = Some(tau1);
        Ok(self)
    }

    pub fn kind(&self) -> SweepKind {
        self.kind
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn policy(&self) -> &FramePolicy<f64> {
        &self.policy
    }
}

/// Sweep output: a header and rows of numbers (NaN where undefined).
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Smallest non-NaN entry of a column.
    pub fn column_min(&self, name: &str) -> Option<f64> {
        self.column(name)?.into_iter().filter(|v| !v.is_nan()).reduce(f64::min)
    }

    /// Header plus one line per row; reals carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_real(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn engine_xi(state: &CoupledState<f64>, policy: &FramePolicy<f64>) -> f64 {
    let r = squeezing_report(state, policy);
    if r.valid {
        r.xi
    } else {
        f64::NAN
    }
}

fn closed_or_nan(fam: ClosedFormFamily<f64>) -> f64 {
    closed_form_xi(&fam).unwrap_or(f64::NAN)
}

/// Cartesian product of the axes, last axis fastest.
fn grid_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, ax| {
        let pts = ax.points();
        acc.into_iter()
            .flat_map(|prefix| {
                pts.iter().map(move |&p| {
                    let mut v = prefix.clone();
                    v.push(p);
                    v
                })
            })
            .collect()
    })
}

/// The state at one grid point of the product, mixed and config kinds.
pub fn grid_state(kind: SweepKind, point: &[f64]) -> Result<CoupledState<f64>> {
    match kind {
        SweepKind::Product => Ok(product(&canonical_squeezed(point[0])?, &canonical_squeezed(point[1])?)),
        SweepKind::Mixed => Ok(product(&Spin1State::basis(0), &canonical_squeezed(point[0])?)),
        SweepKind::Config(k @ ConfigKind::Three) => config(k, point[0], point[1], point[2], point[3]),
        SweepKind::Config(k) => config(k, point[0], point[1], 0.0, 0.0),
        SweepKind::Evolve | SweepKind::Evolve2 => {
            Err(Error::InvalidSweep("evolution sweeps have no closed-form grid state".into()))
        }
    }
}

fn closed_form_at(kind: SweepKind, point: &[f64], state: &CoupledState<f64>) -> f64 {
    let amps = |k: ConfigKind| {
        let flat = state.flat();
        k.support().map(|i| flat[i])
    };
    match kind {
        SweepKind::Product => closed_or_nan(ClosedFormFamily::ProductPair { theta1: point[0], theta2: point[1] }),
        SweepKind::Mixed => closed_or_nan(ClosedFormFamily::CoherentTimesSqueezed { theta: point[0] }),
        SweepKind::Config(k) => {
            let v = amps(k);
            // the printed configuration formulas take real amplitudes
            if v.iter().any(|a| a.im.abs() > 1e-15) {
                return f64::NAN;
            }
            let r = v.map(|a| a.re);
            closed_or_nan(match k {
                ConfigKind::One => ClosedFormFamily::Config1 { c11: r[0], c22: r[1], c33: r[2] },
                ConfigKind::Two => ClosedFormFamily::Config2 { c11: r[0], c13: r[1], c22: r[2] },
                ConfigKind::Three => ClosedFormFamily::Config3 { c12: r[0], c21: r[1], c23: r[2] },
            })
        }
        SweepKind::Evolve | SweepKind::Evolve2 => f64::NAN,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let kind = spec.kind;
    let columns = kind.columns().to_vec();
    let policy = &spec.policy;
    let rows: Vec<Vec<f64>> = match kind {
        SweepKind::Evolve => {
            let g = pair_exchange_generator::<f64>();
            spec.axes[0]
                .points()
                .par_iter()
                .map(|&tau| vec![tau, engine_xi(&evolve(&spec.initial, &g, tau), policy)])
                .collect()
        }
        SweepKind::Evolve2 => {
            let tau1 = match spec.launch {
                Some(t) => vec![t],
                None => spec.axes[0].points(),
            };
            let search = two_stage_search(
                &spec.initial,
                &pair_exchange_generator(),
                &cross_quadratic_generator(),
                &tau1,
                &spec.axes[1].points(),
                policy,
            )?;
            search.grid.into_iter().map(|(a, b, xi)| vec![a, b, xi]).collect()
        }
        _ => grid_points(&spec.axes)
            .par_iter()
            .map(|p| {
                let (xi, closed) = match grid_state(kind, p) {
                    Ok(st) => (engine_xi(&st, policy), closed_form_at(kind, p, &st)),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                let mut row = p.clone();
                row.push(xi);
                row.push(closed);
                row
            })
            .collect(),
    };
    Ok(SweepTable { columns, rows })
}
