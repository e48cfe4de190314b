//! Squeezing generated by unitary evolution.
//!
//! Times are the dimensionless product `τ = ηt`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SpectralPropagator, Symmetry};
use crate::scalar::{Real, C};
use crate::spin::{embed, spin1_matrices, Subsystem};
use crate::squeezing::{squeezing_report, FramePolicy, SqueezingReport};
use crate::states::CoupledState;

/// Evolution generator. Hermitian `H` evolves as `exp(-iτH)`,
/// anti-Hermitian `A` as `exp(τA)`.
#[derive(Clone, Debug)]
pub struct Generator<T: Real> {
    matrix: ComplexMatrix<T>,
    kind: Symmetry,
    label: String,
    propagator: SpectralPropagator<T>,
}

impl<T: Real> Generator<T> {
    /// Verifies the symmetry tag and diagonalizes once.
    pub fn new(matrix: ComplexMatrix<T>, kind: Symmetry, label: impl Into<String>) -> Result<Self> {
        if matrix.rows() != 9 || matrix.cols() != 9 {
            return Err(Error::DimensionMismatch {
                expected: "9x9 generator".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        matrix.check_symmetry(kind)?;
        // both cases reduce to exp(-iτK) with K Hermitian: K = H, or K = iA
        let k = match kind {
            Symmetry::Hermitian => matrix.clone(),
            Symmetry::AntiHermitian => matrix.scale(C::i()),
        };
        let propagator = SpectralPropagator::new(&k)?;
        Ok(Self {
            matrix,
            kind,
            label: label.into(),
            propagator,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> Symmetry {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The evolution operator at time `tau`.
    pub fn unitary(&self, tau: T) -> ComplexMatrix<T> {
        self.propagator.matrix(tau)
    }
}

/// `A = S₁₊S₂₊ − S₁₋S₂₋`, anti-Hermitian; `exp(τA)` is the pair
/// raising/lowering evolution.
pub fn pair_exchange_generator<T: Real>() -> Generator<T> {
    let s = spin1_matrices::<T>();
    let (sp, sm) = (s.raising(), s.lowering());
    let e = |m: &ComplexMatrix<T>, k| embed(m, k).expect("3x3");
    let up = &e(&sp, Subsystem::First) * &e(&sp, Subsystem::Second);
    let down = &e(&sm, Subsystem::First) * &e(&sm, Subsystem::Second);
    Generator::new(&up - &down, Symmetry::AntiHermitian, "pair-exchange")
        .expect("pair exchange generator is anti-hermitian")
}

/// `H' = S₁ₓ² S₂ᵧ²`, Hermitian.
pub fn cross_quadratic_generator<T: Real>() -> Generator<T> {
    let s = spin1_matrices::<T>();
    let x2 = &s.x * &s.x;
    let y2 = &s.y * &s.y;
    let h = &embed(&x2, Subsystem::First).expect("3x3") * &embed(&y2, Subsystem::Second).expect("3x3");
    Generator::new(h, Symmetry::Hermitian, "cross-quadratic")
        .expect("cross quadratic generator is hermitian")
}

/// `exp(τA)ψ` or `exp(-iτH)ψ`, renormalized.
pub fn evolve<T: Real>(state: &CoupledState<T>, g: &Generator<T>, tau: T) -> CoupledState<T> {
    let out = g.propagator.apply(tau, &state.flat());
    CoupledState::from_vector(&out).expect("unitary evolution preserves the norm")
}

/// One evolution stage: a generator swept over an ascending τ grid.
/// `launch` is the time at which the next stage takes over (ignored on the
/// last stage).
#[derive(Clone, Debug)]
pub struct Stage<T: Real> {
    pub generator: Generator<T>,
    pub tau_grid: Vec<T>,
    pub launch: Option<T>,
}

#[derive(Clone, Debug)]
pub struct TrajectoryPoint<T> {
    pub stage: usize,
    pub tau: T,
    pub state: CoupledState<T>,
    pub report: SqueezingReport<T>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub points: Vec<TrajectoryPoint<T>>,
    pub policy: FramePolicy<T>,
}

impl<T: Real> Trajectory<T> {
    /// Smallest valid ξ and the point attaining it (first on ties).
    pub fn min_xi(&self) -> Option<&TrajectoryPoint<T>> {
        self.points
            .iter()
            .filter(|p| p.report.valid)
            .fold(None, |best: Option<&TrajectoryPoint<T>>, p| match best {
                Some(b) if b.report.xi <= p.report.xi => Some(b),
                _ => Some(p),
            })
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidSweep("empty tau grid".into()));
    }
    if grid[0] < T::zero() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidSweep("tau grid must be ascending from 0".into()));
    }
    Ok(())
}

/// States and reports along each stage's grid. Stage `k + 1` starts from
/// `ψ_k(launch_k)`.
pub fn trajectory<T: Real>(
    state0: &CoupledState<T>,
    stages: &[Stage<T>],
    policy: &FramePolicy<T>,
) -> Result<Trajectory<T>> {
    let mut start = *state0;
    let mut points = Vec::new();
    for (k, stage) in stages.iter().enumerate() {
        check_grid(&stage.tau_grid)?;
        let seg: Vec<TrajectoryPoint<T>> = stage
            .tau_grid
            .par_iter()
            .map(|&tau| {
                let state = evolve(&start, &stage.generator, tau);
                let report = squeezing_report(&state, policy);
                TrajectoryPoint { stage: k, tau, state, report }
            })
            .collect();
        points.extend(seg);
        if k + 1 < stages.len() {
            let launch = stage.launch.ok_or_else(|| {
                Error::InvalidSweep(format!("stage {k} needs a launch time for the next stage"))
            })?;
            start = evolve(&start, &stage.generator, launch);
        }
    }
    Ok(Trajectory {
        points,
        policy: *policy,
    })
}

/// Result of scanning the stage-1 launch time against the stage-2 time.
#[derive(Clone, Debug, Serialize)]
pub struct TwoStageSearch<T> {
    /// `(τ₁, τ₂, ξ)` row-major over `(τ₁, τ₂)`; ξ is NaN where undefined.
    pub grid: Vec<(T, T, T)>,
    /// Global minimum `(τ₁, τ₂, ξ)`, first in grid order on ties.
    pub best: Option<(T, T, T)>,
}

/// Evolves under `first` for every `τ₁`, then under `second` for every `τ₂`.
pub fn two_stage_search<T: Real>(
    state0: &CoupledState<T>,
    first: &Generator<T>,
    second: &Generator<T>,
    tau1_grid: &[T],
    tau2_grid: &[T],
    policy: &FramePolicy<T>,
) -> Result<TwoStageSearch<T>> {
    check_grid(tau1_grid)?;
    check_grid(tau2_grid)?;
    let grid: Vec<(T, T, T)> = tau1_grid
        .par_iter()
        .flat_map_iter(|&t1| {
            let mid = evolve(state0, first, t1);
            tau2_grid.iter().map(move |&t2| {
                let r = squeezing_report(&evolve(&mid, second, t2), policy);
                (t1, t2, if r.valid { r.xi } else { T::nan() })
            })
        })
        .collect();
    let best = grid
        .iter()
        .filter(|p| !p.2.is_nan())
        .fold(None, |best: Option<(T, T, T)>, &p| match best {
            Some(b) if b.2 <= p.2 => Some(b),
            _ => Some(p),
        });
    Ok(TwoStageSearch { grid, best })
}

/// Uniform grid of `count` points from `start` to `stop` inclusive.
pub fn linspace<T: Real>(start: T, stop: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / T::lit((count - 1) as f64);
    (0..count)
        .map(|k| if k + 1 == count { stop } else { start + step * T::lit(k as f64) })
        .collect()
}
