//! Coupled two-qutrit states: construction, Majorana/Schwinger maps,
//! separability and orientation tests, the three amplitude configurations,
//! and the z-alignment amplitude conditions.
//!
//! Amplitude index 0, 1, 2 corresponds to `m = +1, 0, -1` on both factors.
//! `c[i][j]` flattens row-major (`m₁` outer) to the 9-vector.

use std::fs;
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, ComplexMatrix, StateVector};
use crate::scalar::{c, re, Real, C};
use crate::spin::{
    embed, mean_spin, spin1_matrices, spin_component_unchecked, Direction, Subsystem,
};

/// Point on the Bloch sphere; amplitudes `(cos θ/2, e^{iφ} sin θ/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spinor<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> Spinor<T> {
    /// Wraps `phi` into `[0, 2π)`; `theta` must lie in `[0, π]`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::PI()) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta.as_f64(),
                lo: 0.0,
                hi: std::f64::consts::PI,
            });
        }
        let two_pi = T::TAU();
        let mut p = phi % two_pi;
        if p < T::zero() {
            p = p + two_pi;
        }
        if p >= two_pi {
            p = T::zero();
        }
        Ok(Self { theta, phi: p })
    }

    pub fn up() -> Self {
        Self { theta: T::zero(), phi: T::zero() }
    }

    pub fn amplitudes(&self) -> [C<T>; 2] {
        let half = self.theta * T::lit(0.5);
        [re(half.cos()), C::from_polar(half.sin(), self.phi)]
    }

    pub fn direction(&self) -> Direction<T> {
        Direction::spherical(self.theta, self.phi)
    }
}

/// Normalized spin-1 state, amplitudes ordered `m = +1, 0, -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spin1State<T> {
    pub amps: [C<T>; 3],
}

impl<T: Real> Spin1State<T> {
    pub fn new(amps: [C<T>; 3]) -> Result<Self> {
        let n: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n - T::one()).abs() > T::lit(T::STRUCTURAL_TOL) {
            return Err(Error::NotNormalized { norm_sq: n.as_f64() });
        }
        Ok(Self { amps })
    }

    pub fn normalized(amps: [C<T>; 3]) -> Result<Self> {
        let v = StateVector::normalized(amps.to_vec())?;
        let a = v.amps();
        Ok(Self { amps: [a[0], a[1], a[2]] })
    }

    /// `|m⟩` with `index` 0, 1, 2 ↔ `m = +1, 0, -1`.
    pub fn basis(index: usize) -> Self {
        let mut amps = [C::zero(); 3];
        amps[index] = C::one();
        Self { amps }
    }

    pub fn to_vector(&self) -> StateVector<T> {
        StateVector::new(self.amps.to_vec()).expect("three amplitudes")
    }

    /// Phase-insensitive overlap `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.to_vector().fidelity(&other.to_vector())
    }

    /// Mean spin vector `(⟨Sx⟩, ⟨Sy⟩, ⟨Sz⟩)`.
    pub fn mean_spin(&self) -> [T; 3] {
        let s = spin1_matrices::<T>();
        let v = self.to_vector();
        let mut out = [T::zero(); 3];
        for (k, op) in s.components().into_iter().enumerate() {
            out[k] = crate::linalg::expectation(&v, op).expect("3-dim").re;
        }
        out
    }
}

/// Pure state of two spin-1 systems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledState<T> {
    pub c: [[C<T>; 3]; 3],
}

impl<T: Real> CoupledState<T> {
    /// Validating constructor; `c` must already be normalized.
    pub fn new(c: [[C<T>; 3]; 3]) -> Result<Self> {
        let s = Self { c };
        let n = s.norm_sqr();
        if (n - T::one()).abs() > T::lit(T::STRUCTURAL_TOL) {
            return Err(Error::NotNormalized { norm_sq: n.as_f64() });
        }
        Ok(s)
    }

    /// Renormalizing constructor.
    pub fn normalized(c: [[C<T>; 3]; 3]) -> Result<Self> {
        let s = Self { c };
        let n = s.norm_sqr().sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let mut out = s;
        for row in &mut out.c {
            for a in row {
                *a = *a / n;
            }
        }
        Ok(out)
    }

    /// Renormalizing constructor from the flattened 9-vector.
    pub fn from_vector(amps: &[C<T>]) -> Result<Self> {
        if amps.len() != 9 {
            return Err(Error::DimensionMismatch {
                expected: "9 amplitudes".into(),
                found: format!("{}", amps.len()),
            });
        }
        let mut c = [[C::zero(); 3]; 3];
        for (k, a) in amps.iter().enumerate() {
            c[k / 3][k % 3] = *a;
        }
        Self::normalized(c)
    }

    /// Real amplitudes in row-major order, renormalized.
    pub fn from_real(amps: [T; 9]) -> Result<Self> {
        let v: Vec<C<T>> = amps.iter().map(|&x| re(x)).collect();
        Self::from_vector(&v)
    }

    /// `|m₁, m₂⟩` by index (0, 1, 2 ↔ m = +1, 0, -1).
    pub fn basis(i: usize, j: usize) -> Self {
        let mut c = [[C::zero(); 3]; 3];
        c[i][j] = C::one();
        Self { c }
    }

    pub fn norm_sqr(&self) -> T {
        self.c.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    pub fn flat(&self) -> [C<T>; 9] {
        let mut out = [C::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.c[i][j];
            }
        }
        out
    }

    pub fn to_vector(&self) -> StateVector<T> {
        StateVector::new(self.flat().to_vec()).expect("nine amplitudes")
    }

    pub fn amplitude_matrix(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(&self.c)
    }

    /// Phase-insensitive overlap `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.to_vector().fidelity(&other.to_vector())
    }

    /// Largest `|c_ij|` outside the given support (flattened indices).
    pub fn max_outside(&self, support: &[usize]) -> T {
        self.flat()
            .iter()
            .enumerate()
            .filter(|(k, _)| !support.contains(k))
            .map(|(_, a)| a.norm())
            .fold(T::zero(), T::max)
    }
}

/// Symmetrized product of two spinors as a spin-1 state.
pub fn schwinger<T: Real>(u1: Spinor<T>, u2: Spinor<T>) -> Spin1State<T> {
    let [a1, b1] = u1.amplitudes();
    let [a2, b2] = u2.amplitudes();
    let r2 = re(T::SQRT_2());
    Spin1State::normalized([r2 * a1 * a2, a1 * b2 + b1 * a2, r2 * b1 * b2])
        .expect("symmetrized spinor product never vanishes")
}

/// `(2cos(θ/2), √2 sin(θ/2), 0)/√(3 + cos θ)`: one spinor on the pole and
/// one at polar angle θ in the x-z plane.
pub fn canonical_squeezed<T: Real>(theta: T) -> Result<Spin1State<T>> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta.as_f64(),
            lo: 0.0,
            hi: std::f64::consts::PI,
        });
    }
    let half = theta * T::lit(0.5);
    let norm = (T::lit(3.0) + theta.cos()).sqrt();
    Ok(Spin1State {
        amps: [
            re(T::lit(2.0) * half.cos() / norm),
            re(T::SQRT_2() * half.sin() / norm),
            C::zero(),
        ],
    })
}

/// The unordered spinor pair whose symmetrized product is `s`.
///
/// With `z = β/α` the stereographic coordinate of a spinor, the two roots
/// of `a₊ z² − √2 a₀ z + a₋` are the constituent points. The smaller of the
/// polynomial and its reciprocal is solved to keep roots near infinity
/// accurate; a root at infinity is `θ = π`.
pub fn majorana<T: Real>(s: &Spin1State<T>) -> (Spinor<T>, Spinor<T>) {
    let [ap, a0, am] = s.amps;
    let lin = re(-T::SQRT_2()) * a0;
    let tiny = T::epsilon() * T::lit(8.0);
    if ap.norm() <= tiny && am.norm() <= tiny {
        // m = 0 like state: roots at 0 and ∞
        return (Spinor::up(), Spinor { theta: T::PI(), phi: T::zero() });
    }
    if ap.norm() >= am.norm() {
        let (r1, r2) = quadratic_roots(ap, lin, am);
        (spinor_from_z(r1), spinor_from_z(r2))
    } else {
        // w = 1/z solves a₋ w² − √2 a₀ w + a₊
        let (w1, w2) = quadratic_roots(am, lin, ap);
        (spinor_from_w(w1), spinor_from_w(w2))
    }
}

fn quadratic_roots<T: Real>(a: C<T>, b: C<T>, c_: C<T>) -> (C<T>, C<T>) {
    let disc = (b * b - a * c_ * T::lit(4.0)).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= T::zero() {
        (b + disc) * T::lit(-0.5)
    } else {
        (b - disc) * T::lit(-0.5)
    };
    if q.norm() <= T::min_positive_value() {
        return (C::zero(), C::zero());
    }
    (q / a, c_ / q)
}

fn spinor_from_z<T: Real>(z: C<T>) -> Spinor<T> {
    let theta = T::lit(2.0) * z.norm().atan();
    Spinor::new(theta, z.arg()).expect("theta in range")
}

fn spinor_from_w<T: Real>(w: C<T>) -> Spinor<T> {
    // z = 1/w: θ = π − 2 atan|w|, φ = −arg w
    let theta = T::PI() - T::lit(2.0) * w.norm().atan();
    let phi = if w.norm() == T::zero() { T::zero() } else { -w.arg() };
    Spinor::new(theta.max(T::zero()).min(T::PI()), phi).expect("theta in range")
}

/// `c[i][j] = s1[i] · s2[j]`.
pub fn product<T: Real>(s1: &Spin1State<T>, s2: &Spin1State<T>) -> CoupledState<T> {
    let mut c = [[C::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = s1.amps[i] * s2.amps[j];
        }
    }
    CoupledState { c }
}

/// Schmidt coefficients of the 3×3 amplitude matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchmidtInfo<T> {
    /// Descending.
    pub singular_values: [T; 3],
    pub product_flag: bool,
    pub tolerance_used: T,
}

pub const DEFAULT_SCHMIDT_TOL: f64 = 1e-10;

pub fn schmidt<T: Real>(state: &CoupledState<T>, tol: T) -> SchmidtInfo<T> {
    let sv = singular_values(&state.amplitude_matrix());
    SchmidtInfo {
        singular_values: [sv[0], sv[1], sv[2]],
        product_flag: sv[1] <= tol,
        tolerance_used: tol,
    }
}

/// All nine 2×2 minors `c_ij c_kl − c_il c_kj`, the literal product test.
pub fn max_minor<T: Real>(state: &CoupledState<T>) -> T {
    let c = &state.c;
    let mut worst = T::zero();
    for i in 0..3 {
        for k in (i + 1)..3 {
            for j in 0..3 {
                for l in (j + 1)..3 {
                    let m = c[i][j] * c[k][l] - c[i][l] * c[k][j];
                    worst = worst.max(m.norm());
                }
            }
        }
    }
    worst
}

/// Whether `state` is a simultaneous eigenstate of `S₁·q1` and `S₂·q2`
/// with eigenvalues in `{-1, 0, 1}`, each residual at most `tol`.
pub fn is_oriented<T: Real>(
    state: &CoupledState<T>,
    q1: Direction<T>,
    q2: Direction<T>,
    tol: T,
) -> Result<bool> {
    let q1 = Direction::new(q1.x, q1.y, q1.z)?;
    let q2 = Direction::new(q2.x, q2.y, q2.z)?;
    let s = spin1_matrices::<T>();
    let psi = state.to_vector();
    for (q, sub) in [(q1, Subsystem::First), (q2, Subsystem::Second)] {
        let op = embed(&spin_component_unchecked(&s, q), sub)?;
        let a_psi = op.apply(psi.amps())?;
        let lambda: T = psi
            .amps()
            .iter()
            .zip(&a_psi)
            .map(|(x, y)| (x.conj() * *y).re)
            .sum();
        let m = lambda.round().max(-T::one()).min(T::one());
        let resid: T = a_psi
            .iter()
            .zip(psi.amps())
            .map(|(y, x)| (*y - *x * m).norm_sqr())
            .sum::<T>()
            .sqrt();
        if resid > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The three amplitude families with only three non-zero entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigKind {
    /// `c11, c22, c33`
    One,
    /// `c11, c13, c22`
    Two,
    /// `c12, c21, c23`
    Three,
}

impl TryFrom<u8> for ConfigKind {
    type Error = Error;
    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(ConfigKind::One),
            2 => Ok(ConfigKind::Two),
            3 => Ok(ConfigKind::Three),
            other => Err(Error::InvalidSweep(format!("unknown configuration {other}"))),
        }
    }
}

impl ConfigKind {
    /// Flattened amplitude indices of the three free entries.
    pub fn support(self) -> [usize; 3] {
        match self {
            ConfigKind::One => [0, 4, 8],
            ConfigKind::Two => [0, 2, 4],
            ConfigKind::Three => [1, 3, 5],
        }
    }
}

/// Angle-parametrized configuration state, renormalized to unit norm.
///
/// Kinds 1 and 2 use `(sin α cos β, sin α sin β, cos β)`, kind 3 uses
/// `(cos α, sin α cos β e^{iφ₁}, sin α sin β e^{iφ₂})`; phases are ignored
/// for kinds 1 and 2.
pub fn config<T: Real>(kind: ConfigKind, alpha: T, beta: T, phi1: T, phi2: T) -> Result<CoupledState<T>> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let vals = match kind {
        ConfigKind::One | ConfigKind::Two => [re(sa * cb), re(sa * sb), re(cb)],
        ConfigKind::Three => [
            re(ca),
            C::from_polar(sa * cb, phi1),
            C::from_polar(sa * sb, phi2),
        ],
    };
    config_from_amplitudes(kind, vals)
}

/// Places three amplitudes on a configuration's support and renormalizes.
pub fn config_from_amplitudes<T: Real>(kind: ConfigKind, vals: [C<T>; 3]) -> Result<CoupledState<T>> {
    let mut flat = [C::zero(); 9];
    for (slot, v) in kind.support().into_iter().zip(vals) {
        flat[slot] = v;
    }
    // amplitudes at rounding level (e.g. cos(π/2)) count as zero
    if flat.iter().all(|a| a.norm() <= T::epsilon()) {
        return Err(Error::ZeroNorm);
    }
    CoupledState::from_vector(&flat)
}

/// The seven amplitudes that remain free once `c23` and `c21` are fixed by
/// requiring both mean spins to lie along ẑ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZAlignmentInput<T> {
    pub c11: C<T>,
    pub c12: C<T>,
    pub c13: C<T>,
    pub c22: C<T>,
    pub c31: C<T>,
    pub c32: C<T>,
    pub c33: C<T>,
}

impl<T: Real> ZAlignmentInput<T> {
    /// Completed state with the solved `c23`, `c21`, renormalized.
    pub fn complete(&self) -> Result<CoupledState<T>> {
        let (c23, c21) = solve_z_alignment(self)?;
        CoupledState::normalized([
            [self.c11, self.c12, self.c13],
            [c21, self.c22, c23],
            [self.c31, self.c32, self.c33],
        ])
    }

    pub fn to_array(&self) -> [C<T>; 7] {
        [self.c11, self.c12, self.c13, self.c22, self.c31, self.c32, self.c33]
    }
}

/// `(c23, c21)` from the closed-form alignment conditions:
///
/// ```text
/// c23 = ([|c22|² − (c11+c13)(c11+c31*)] c12* + [|c22|² − (c11+c31*)(c31+c33)] c32*)
///       / (c11 + c31* − c13 − c33*)
/// c21 = (−(c13* + c33*) c23 − (c12* + c32) c22) / (c11 + c31)
/// ```
pub fn solve_z_alignment<T: Real>(p: &ZAlignmentInput<T>) -> Result<(C<T>, C<T>)> {
    let tol = T::lit(1e-12);
    let d23 = p.c11 + p.c31.conj() - p.c13 - p.c33.conj();
    if d23.norm() <= tol {
        return Err(Error::DegenerateDenominator {
            which: "c11 + conj(c31) - c13 - conj(c33)",
        });
    }
    let d21 = p.c11 + p.c31;
    if d21.norm() <= tol {
        return Err(Error::DegenerateDenominator { which: "c11 + c31" });
    }
    let n22 = re(p.c22.norm_sqr());
    let c11_c31s = p.c11 + p.c31.conj();
    let num23 = (n22 - (p.c11 + p.c13) * c11_c31s) * p.c12.conj()
        + (n22 - c11_c31s * (p.c31 + p.c33)) * p.c32.conj();
    let c23 = num23 / d23;
    let c21 = (-(p.c13.conj() + p.c33.conj()) * c23 - (p.c12.conj() + p.c32) * p.c22) / d21;
    Ok((c23, c21))
}

/// Largest transverse mean-spin component `|⟨S_x⟩|, |⟨S_y⟩|` over both
/// subsystems; zero when both mean spins point along ±ẑ.
pub fn transverse_residual<T: Real>(state: &CoupledState<T>) -> T {
    Subsystem::BOTH
        .iter()
        .map(|&s| {
            let v = mean_spin(state, s).vector;
            v[0].abs().max(v[1].abs())
        })
        .fold(T::zero(), T::max)
}

pub const BASIS_ORDER: &str = "m=+1,0,-1";

/// On-disk representation of a coupled state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub basis_order: String,
    pub amps: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state<T: Real>(state: &CoupledState<T>) -> Self {
        let norm = state.norm_sqr().sqrt();
        Self {
            basis_order: BASIS_ORDER.to_string(),
            amps: state
                .flat()
                .iter()
                .map(|a| [(a.re / norm).as_f64(), (a.im / norm).as_f64()])
                .collect(),
        }
    }

    /// Accepts amplitudes normalized to within `1e-9` (decimal round-off)
    /// and renormalizes them exactly.
    pub fn to_state<T: Real>(&self) -> Result<CoupledState<T>> {
        if self.basis_order != BASIS_ORDER {
            return Err(Error::StateFormat(format!(
                "basis_order must be \"{BASIS_ORDER}\", got \"{}\"",
                self.basis_order
            )));
        }
        if self.amps.len() != 9 {
            return Err(Error::StateFormat(format!(
                "expected 9 amplitudes, got {}",
                self.amps.len()
            )));
        }
        if self.amps.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::StateFormat("non-finite amplitude".into()));
        }
        let norm_sq: f64 = self.amps.iter().map(|[r, i]| r * r + i * i).sum();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm_sq });
        }
        let v: Vec<C<T>> = self.amps.iter().map(|&[r, i]| c(T::lit(r), T::lit(i))).collect();
        CoupledState::from_vector(&v)
    }
}

pub fn read_state_file<T: Real>(path: impl AsRef<Path>) -> Result<CoupledState<T>> {
    let text = fs::read_to_string(path)?;
    let file: StateFile =
        serde_json::from_str(&text).map_err(|e| Error::StateFormat(e.to_string()))?;
    file.to_state()
}

pub fn write_state_file<T: Real>(path: impl AsRef<Path>, state: &CoupledState<T>) -> Result<()> {
    let text = serde_json::to_string_pretty(&StateFile::from_state(state))?;
    fs::write(path, text + "\n")?;
    Ok(())
}
