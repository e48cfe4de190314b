//! The coupled squeezing parameter
//!
//! ```text
//! ξ = (2 Δ(S₁·n₁⊥)² + 2 Δ(S₂·n₂⊥)² + 4 ⟨S₁·n₁⊥ ⊗ S₂·n₂⊥⟩) / (|⟨S₁⟩| + |⟨S₂⟩|)
//! ```
//!
//! evaluated under an explicit [`FramePolicy`], together with the
//! single-system Kitagawa–Ueda and Puri parameters. A state is squeezed
//! when `ξ < 1`.
//!
//! All second moments of a state are gathered once into [`Moments`]; every
//! choice of perpendicular directions is then a pair of small quadratic
//! forms, which is what makes the optimized policy cheap.

mod closed_form;
mod optimize;
pub mod oracle;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix};
use crate::scalar::{re, Real, C};
use crate::spin::{
    build_frame_unchecked, build_frame_xz, embed, spin1_matrices, Frame, MeanSpin,
    Subsystem,
};
use crate::states::{CoupledState, Spin1State};

pub use closed_form::{
    closed_form_xi, compare_closed_forms, ClosedFormFamily, DiscrepancyFlag, DiscrepancyRecord,
    MATCH_TOL,
};
pub use oracle::xi_oracle;

/// How the in-plane directions of each subsystem are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FrameGauge {
    /// `n_perp = normalize(ẑ × n)`, x̂-based at the poles.
    Lab,
    /// `n_perp` kept in the x-z plane.
    Xz,
}

/// Grid-plus-refinement settings for the optimized policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerSettings {
    grid_points: usize,
    refine_iters: usize,
}

impl OptimizerSettings {
    pub fn new(grid_points: usize, refine_iters: usize) -> Result<Self> {
        if grid_points < 8 {
            return Err(Error::InvalidPolicy(format!(
                "grid_points must be >= 8, got {grid_points}"
            )));
        }
        if refine_iters < 1 {
            return Err(Error::InvalidPolicy("refine_iters must be >= 1".into()));
        }
        Ok(Self {
            grid_points,
            refine_iters,
        })
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    pub fn refine_iters(&self) -> usize {
        self.refine_iters
    }
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_points: 64,
            refine_iters: 40,
        }
    }
}

/// Rule selecting the perpendicular directions entering ξ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FramePolicy<T> {
    Fixed(Frame<T>, Frame<T>),
    MeanSpinAligned(FrameGauge),
    Optimized(OptimizerSettings),
}

impl<T: Real> FramePolicy<T> {
    pub fn optimized() -> Self {
        FramePolicy::Optimized(OptimizerSettings::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            FramePolicy::Fixed(..) => "fixed",
            FramePolicy::MeanSpinAligned(FrameGauge::Lab) => "aligned",
            FramePolicy::MeanSpinAligned(FrameGauge::Xz) => "aligned-xz",
            FramePolicy::Optimized(_) => "optimized",
        }
    }
}

/// ξ together with every quantity it is built from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqueezingReport<T> {
    /// NaN when `valid` is false.
    pub xi: T,
    pub frame1: Frame<T>,
    pub frame2: Frame<T>,
    pub var1: T,
    pub var2: T,
    pub cross: T,
    pub ms1: MeanSpin<T>,
    pub ms2: MeanSpin<T>,
    pub valid: bool,
    pub degenerate_subsystems: BTreeSet<Subsystem>,
}

impl<T: Real> SqueezingReport<T> {
    pub fn is_squeezed(&self) -> bool {
        self.valid && self.xi < T::one()
    }

    /// `(|⟨S₁⟩| + |⟨S₂⟩|)`.
    pub fn denominator(&self) -> T {
        self.ms1.magnitude + self.ms2.magnitude
    }
}

/// First and second moments of the spin components of a coupled state.
#[derive(Clone, Debug)]
pub struct Moments<T> {
    pub mean: [MeanSpin<T>; 2],
    /// `Re⟨S_a S_b⟩` per subsystem.
    pub second: [[[T; 3]; 3]; 2],
    /// `⟨S₁_a ⊗ S₂_b⟩`.
    pub cross: [[T; 3]; 3],
}

impl<T: Real> Moments<T> {
    pub fn of(state: &CoupledState<T>) -> Self {
        let s = spin1_matrices::<T>();
        let psi = state.to_vector();
        let mut applied: [Vec<Vec<C<T>>>; 2] = [Vec::new(), Vec::new()];
        for (k, sub) in Subsystem::BOTH.into_iter().enumerate() {
            for op in s.components() {
                let big = embed(op, sub).expect("3x3");
                applied[k].push(big.apply(psi.amps()).expect("9-dim"));
            }
        }
        let inner = |a: &[C<T>], b: &[C<T>]| -> C<T> {
            a.iter().zip(b).map(|(x, y)| x.conj() * *y).sum()
        };
        let mut mean = [[T::zero(); 3]; 2];
        let mut second = [[[T::zero(); 3]; 3]; 2];
        for k in 0..2 {
            for a in 0..3 {
                mean[k][a] = inner(psi.amps(), &applied[k][a]).re;
                for b in 0..3 {
                    // ⟨S_a S_b⟩ = ⟨S_a ψ | S_b ψ⟩ for Hermitian S_a
                    second[k][a][b] = inner(&applied[k][a], &applied[k][b]).re;
                }
            }
        }
        let mut cross = [[T::zero(); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                cross[a][b] = inner(&applied[0][a], &applied[1][b]).re;
            }
        }
        Self {
            mean: [MeanSpin::from_vector(mean[0]), MeanSpin::from_vector(mean[1])],
            second,
            cross,
        }
    }

    /// `Δ(S·d)²` for subsystem index 0 or 1, clamped at zero when the
    /// round-off lands in `[-1e-12, 0)`.
    pub fn variance(&self, k: usize, d: [T; 3]) -> T {
        let m = &self.second[k];
        let mut quad = T::zero();
        for a in 0..3 {
            for b in 0..3 {
                quad = quad + d[a] * m[a][b] * d[b];
            }
        }
        let mv = &self.mean[k].vector;
        let md = mv[0] * d[0] + mv[1] * d[1] + mv[2] * d[2];
        clamp_variance(quad - md * md)
    }

    /// `⟨S₁·d1 ⊗ S₂·d2⟩`.
    pub fn cross_term(&self, d1: [T; 3], d2: [T; 3]) -> T {
        let mut acc = T::zero();
        for a in 0..3 {
            for b in 0..3 {
                acc = acc + d1[a] * self.cross[a][b] * d2[b];
            }
        }
        acc
    }

    pub fn denominator(&self) -> T {
        self.mean[0].magnitude + self.mean[1].magnitude
    }

    pub fn is_valid(&self) -> bool {
        !(self.mean[0].is_degenerate() && self.mean[1].is_degenerate())
    }

    fn degenerate_set(&self) -> BTreeSet<Subsystem> {
        Subsystem::BOTH
            .into_iter()
            .zip(&self.mean)
            .filter(|(_, m)| m.is_degenerate())
            .map(|(s, _)| s)
            .collect()
    }

    /// ξ for explicit perpendicular directions.
    pub fn xi(&self, d1: [T; 3], d2: [T; 3]) -> T {
        let num = T::lit(2.0) * self.variance(0, d1)
            + T::lit(2.0) * self.variance(1, d2)
            + T::lit(4.0) * self.cross_term(d1, d2);
        num / self.denominator()
    }

    fn report(&self, frame1: Frame<T>, frame2: Frame<T>) -> SqueezingReport<T> {
        let d1 = frame1.n_perp.to_array();
        let d2 = frame2.n_perp.to_array();
        let var1 = self.variance(0, d1);
        let var2 = self.variance(1, d2);
        let cross = self.cross_term(d1, d2);
        let valid = self.is_valid();
        let xi = if valid {
            (T::lit(2.0) * var1 + T::lit(2.0) * var2 + T::lit(4.0) * cross) / self.denominator()
        } else {
            T::nan()
        };
        SqueezingReport {
            xi,
            frame1,
            frame2,
            var1,
            var2,
            cross,
            ms1: self.mean[0],
            ms2: self.mean[1],
            valid,
            degenerate_subsystems: self.degenerate_set(),
        }
    }
}

fn clamp_variance<T: Real>(v: T) -> T {
    if v < T::zero() && v >= T::lit(-1e-12) {
        T::zero()
    } else {
        v
    }
}

/// Mean-spin frame for one subsystem, or the lab frame when the mean spin
/// vanishes.
fn aligned_frame<T: Real>(ms: &MeanSpin<T>, gauge: FrameGauge) -> Frame<T> {
    match ms.direction() {
        None => Frame::lab(),
        Some(n) => match gauge {
            FrameGauge::Lab => build_frame_unchecked(n),
            FrameGauge::Xz => build_frame_xz(n).unwrap_or_else(|_| build_frame_unchecked(n)),
        },
    }
}

/// Computes ξ and its ingredients for `state` under `policy`.
///
/// Degenerate subsystems (mean-spin magnitude below `1e-9`) are flagged;
/// the aligned policy substitutes the lab frame for them and the optimized
/// policy searches their direction over the whole sphere. The report is
/// invalid (ξ = NaN) only when both mean spins vanish.
pub fn squeezing_report<T: Real>(state: &CoupledState<T>, policy: &FramePolicy<T>) -> SqueezingReport<T> {
    let moments = Moments::of(state);
    report_from_moments(&moments, policy)
}

pub fn report_from_moments<T: Real>(moments: &Moments<T>, policy: &FramePolicy<T>) -> SqueezingReport<T> {
    match policy {
        FramePolicy::Fixed(f1, f2) => moments.report(*f1, *f2),
        FramePolicy::MeanSpinAligned(gauge) => {
            let f1 = aligned_frame(&moments.mean[0], *gauge);
            let f2 = aligned_frame(&moments.mean[1], *gauge);
            moments.report(f1, f2)
        }
        FramePolicy::Optimized(settings) => {
            if !moments.is_valid() {
                return moments.report(Frame::lab(), Frame::lab());
            }
            let (f1, f2) = optimize::minimize_frames(moments, settings);
            moments.report(f1, f2)
        }
    }
}

/// Covariance `Re⟨S_a S_b⟩ − ⟨S_a⟩⟨S_b⟩` and mean spin of a single qutrit.
fn single_covariance<T: Real>(s: &Spin1State<T>) -> ([[T; 3]; 3], [T; 3]) {
    let ops = spin1_matrices::<T>();
    let v = s.amps.to_vec();
    let applied: Vec<Vec<C<T>>> = ops
        .components()
        .into_iter()
        .map(|m| m.apply(&v).expect("3-dim"))
        .collect();
    let inner = |a: &[C<T>], b: &[C<T>]| -> T { a.iter().zip(b).map(|(x, y)| (x.conj() * *y).re).sum() };
    let mut mean = [T::zero(); 3];
    for a in 0..3 {
        mean[a] = inner(&v, &applied[a]);
    }
    let mut cov = [[T::zero(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            cov[a][b] = inner(&applied[a], &applied[b]) - mean[a] * mean[b];
        }
    }
    (cov, mean)
}

/// Minimal variance of `S·d` over unit `d` perpendicular to the mean spin,
/// or over the whole sphere when the mean spin vanishes.
fn min_perpendicular_variance<T: Real>(s: &Spin1State<T>) -> (T, MeanSpin<T>) {
    let (cov, mean) = single_covariance(s);
    let ms = MeanSpin::from_vector(mean);
    let quad = |p: [T; 3], q: [T; 3]| -> T {
        let mut acc = T::zero();
        for a in 0..3 {
            for b in 0..3 {
                acc = acc + p[a] * cov[a][b] * q[b];
            }
        }
        acc
    };
    let min_var = match ms.direction() {
        Some(n) => {
            let f = build_frame_unchecked(n);
            let (p, q) = (f.n_perp.to_array(), f.n_perp2.to_array());
            let (a, b, c) = (quad(p, p), quad(p, q), quad(q, q));
            let half = T::lit(0.5);
            (a + c) * half - (((a - c) * half).powi(2) + b * b).sqrt()
        }
        None => {
            let rows: Vec<Vec<C<T>>> = cov.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect();
            eigh(&ComplexMatrix::from_rows(&rows)).expect("symmetric covariance").values[0]
        }
    };
    (clamp_variance(min_var), ms)
}

/// Kitagawa–Ueda parameter `min Δ(S·n⊥)² / (s/2)` with `s = 1`.
pub fn ku_parameter<T: Real>(s: &Spin1State<T>) -> T {
    let (v, _) = min_perpendicular_variance(s);
    v * T::lit(2.0)
}

/// Puri parameter `min Δ(S·n⊥)² / (|⟨S·n⟩| / 2)`.
pub fn puri_parameter<T: Real>(s: &Spin1State<T>) -> Result<T> {
    let (v, ms) = min_perpendicular_variance(s);
    if ms.is_degenerate() {
        return Err(Error::ZeroMeanSpin);
    }
    Ok(v * T::lit(2.0) / ms.magnitude)
}
