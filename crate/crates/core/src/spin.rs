//! Spin-1 operator algebra, subsystem embeddings, mean-spin vectors and
//! perpendicular frames.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expectation, kron, ComplexMatrix};
use crate::scalar::{c, re, Real};
use crate::states::CoupledState;

/// Which factor of the coupled space an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub const BOTH: [Subsystem; 2] = [Subsystem::First, Subsystem::Second];

    pub fn index(self) -> u8 {
        match self {
            Subsystem::First => 1,
            Subsystem::Second => 2,
        }
    }
}

impl TryFrom<u8> for Subsystem {
    type Error = Error;
    fn try_from(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Subsystem::First),
            2 => Ok(Subsystem::Second),
            other => Err(Error::BadSubsystem(other)),
        }
    }
}

/// Unit vector in R³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Direction<T> {
    /// Validating constructor; the components must already have unit norm.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - T::one()).abs() > T::lit(T::STRUCTURAL_TOL) || !norm.is_finite() {
            return Err(Error::NonUnitDirection { norm: norm.as_f64() });
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn from_vector(v: [T; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            x: v[0] / norm,
            y: v[1] / norm,
            z: v[2] / norm,
        })
    }

    /// Point on the unit sphere at polar angle `theta`, azimuth `phi`.
    pub fn spherical(theta: T, phi: T) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn unit_x() -> Self {
        Self { x: T::one(), y: T::zero(), z: T::zero() }
    }

    pub fn unit_y() -> Self {
        Self { x: T::zero(), y: T::one(), z: T::zero() }
    }

    pub fn unit_z() -> Self {
        Self { x: T::zero(), y: T::zero(), z: T::one() }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Cross product of the raw components (not renormalized).
    pub fn cross_vec(self, o: Self) -> [T; 3] {
        [
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        ]
    }

}

impl<T: Real> std::ops::Neg for Direction<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Right-handed orthonormal triple: mean-spin axis and two perpendiculars.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame<T> {
    pub n: Direction<T>,
    pub n_perp: Direction<T>,
    pub n_perp2: Direction<T>,
}

impl<T: Real> Frame<T> {
    /// Validates orthonormality and handedness (`n_perp × n_perp2 = n`).
    pub fn new(n: Direction<T>, n_perp: Direction<T>, n_perp2: Direction<T>) -> Result<Self> {
        let f = Self { n, n_perp, n_perp2 };
        let tol = T::lit(T::STRUCTURAL_TOL) * T::lit(10.0);
        if f.defect() > tol {
            return Err(Error::InvalidPolicy(format!(
                "frame is not right-handed orthonormal (defect {:e})",
                f.defect().as_f64()
            )));
        }
        Ok(f)
    }

    /// Lab frame `(ẑ, x̂, ŷ)`.
    pub fn lab() -> Self {
        Self {
            n: Direction::unit_z(),
            n_perp: Direction::unit_x(),
            n_perp2: Direction::unit_y(),
        }
    }

    /// Frame whose first perpendicular is `perp`, completed by the pole gauge.
    pub fn with_perp(perp: Direction<T>) -> Self {
        // build_frame(perp) = (perp, p, q) with p × q = perp, so (q, perp, p) is right-handed
        let aux = build_frame_unchecked(perp);
        Self {
            n: aux.n_perp2,
            n_perp: perp,
            n_perp2: aux.n_perp,
        }
    }

    /// In-plane direction `cos φ n_perp + sin φ n_perp2`.
    pub fn in_plane(&self, phi: T) -> Direction<T> {
        let (s, co) = phi.sin_cos();
        Direction {
            x: co * self.n_perp.x + s * self.n_perp2.x,
            y: co * self.n_perp.y + s * self.n_perp2.y,
            z: co * self.n_perp.z + s * self.n_perp2.z,
        }
    }

    /// Largest violation of orthonormality or handedness.
    pub fn defect(&self) -> T {
        let one = T::one();
        let mut worst = T::zero();
        for d in [self.n, self.n_perp, self.n_perp2] {
            worst = worst.max((d.dot(d) - one).abs());
        }
        worst = worst
            .max(self.n.dot(self.n_perp).abs())
            .max(self.n.dot(self.n_perp2).abs())
            .max(self.n_perp.dot(self.n_perp2).abs());
        let cr = self.n_perp.cross_vec(self.n_perp2);
        let n = self.n.to_array();
        for k in 0..3 {
            worst = worst.max((cr[k] - n[k]).abs());
        }
        worst
    }
}

/// The three spin-1 matrices in the `m = +1, 0, -1` basis.
#[derive(Clone, Debug)]
pub struct SpinMatrices<T: Real> {
    pub x: ComplexMatrix<T>,
    pub y: ComplexMatrix<T>,
    pub z: ComplexMatrix<T>,
}

impl<T: Real> SpinMatrices<T> {
    pub fn components(&self) -> [&ComplexMatrix<T>; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// `S+ = Sx + i Sy`.
    pub fn raising(&self) -> ComplexMatrix<T> {
        &self.x + &self.y.scale(crate::scalar::C::i())
    }

    /// `S- = Sx - i Sy`.
    pub fn lowering(&self) -> ComplexMatrix<T> {
        &self.x - &self.y.scale(crate::scalar::C::i())
    }
}

pub fn spin1_matrices<T: Real>() -> SpinMatrices<T> {
    let s = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let o = re(z);
    let x = ComplexMatrix::from_rows(&[[o, re(s), o], [re(s), o, re(s)], [o, re(s), o]]);
    let y = ComplexMatrix::from_rows(&[
        [o, c(z, -s), o],
        [c(z, s), o, c(z, -s)],
        [o, c(z, s), o],
    ]);
    let zm = ComplexMatrix::from_diag(&[re(T::one()), o, re(-T::one())]);
    SpinMatrices { x, y, z: zm }
}

/// `d · S`, the spin component along a unit direction.
pub fn spin_component<T: Real>(d: Direction<T>) -> Result<ComplexMatrix<T>> {
    let d = Direction::new(d.x, d.y, d.z)?;
    Ok(spin_component_unchecked(&spin1_matrices(), d))
}

pub(crate) fn spin_component_unchecked<T: Real>(
    s: &SpinMatrices<T>,
    d: Direction<T>,
) -> ComplexMatrix<T> {
    &(&s.x.scale_real(d.x) + &s.y.scale_real(d.y)) + &s.z.scale_real(d.z)
}

/// Lifts a 3×3 operator into the 9-dimensional coupled space.
pub fn embed<T: Real>(op: &ComplexMatrix<T>, subsystem: Subsystem) -> Result<ComplexMatrix<T>> {
    if op.rows() != 3 || op.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: "3x3 operator".into(),
            found: format!("{}x{}", op.rows(), op.cols()),
        });
    }
    let id = ComplexMatrix::identity(3);
    Ok(match subsystem {
        Subsystem::First => kron(op, &id),
        Subsystem::Second => kron(&id, op),
    })
}

/// Mean spin vector `(<S_x>, <S_y>, <S_z>)` of one subsystem and its length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSpin<T> {
    pub vector: [T; 3],
    pub magnitude: T,
}

impl<T: Real> MeanSpin<T> {
    pub fn from_vector(vector: [T; 3]) -> Self {
        let magnitude = vector.iter().map(|&v| v * v).sum::<T>().sqrt();
        Self { vector, magnitude }
    }

    pub fn is_degenerate(&self) -> bool {
        self.magnitude < T::lit(T::DEGENERATE_TOL)
    }

    /// Unit mean-spin direction, if it exists.
    pub fn direction(&self) -> Option<Direction<T>> {
        if self.is_degenerate() {
            None
        } else {
            Direction::from_vector(self.vector).ok()
        }
    }
}

pub fn mean_spin<T: Real>(state: &CoupledState<T>, subsystem: Subsystem) -> MeanSpin<T> {
    let psi = state.to_vector();
    let s = spin1_matrices::<T>();
    let mut v = [T::zero(); 3];
    for (k, op) in s.components().into_iter().enumerate() {
        let big = embed(op, subsystem).expect("3x3 spin matrix");
        v[k] = expectation(&psi, &big).expect("9-dim state").re;
    }
    MeanSpin::from_vector(v)
}

/// Deterministic perpendicular frame about `n`.
///
/// `n_perp = normalize(ẑ × n)` away from the poles; within `1e-9` of a pole
/// `n_perp` is x̂ projected off `n`. `n_perp2 = n × n_perp`.
pub fn build_frame<T: Real>(n: Direction<T>) -> Result<Frame<T>> {
    let n = Direction::new(n.x, n.y, n.z)?;
    Ok(build_frame_unchecked(n))
}

pub(crate) fn build_frame_unchecked<T: Real>(n: Direction<T>) -> Frame<T> {
    let pole = n.z.abs() > T::one() - T::lit(T::DEGENERATE_TOL);
    let perp = if pole {
        let proj = n.x;
        Direction::from_vector([T::one() - proj * n.x, -proj * n.y, -proj * n.z])
            .expect("x̂ is not parallel to a polar axis")
    } else {
        Direction::from_vector(Direction::unit_z().cross_vec(n)).expect("n off the pole")
    };
    let perp2 = Direction::from_vector(n.cross_vec(perp)).expect("orthogonal unit vectors");
    Frame {
        n,
        n_perp: perp,
        n_perp2: perp2,
    }
}

/// Frame keeping `n_perp` in the x-z plane: `n_perp ∝ (n_z, 0, -n_x)`,
/// `n_perp2 = n × n_perp` (which is ŷ when `n` itself lies in that plane).
pub fn build_frame_xz<T: Real>(n: Direction<T>) -> Result<Frame<T>> {
    let n = Direction::new(n.x, n.y, n.z)?;
    let perp = Direction::from_vector([n.z, T::zero(), -n.x]).map_err(|_| Error::OutsideXzGauge)?;
    let perp2 = Direction::from_vector(n.cross_vec(perp))?;
    Ok(Frame {
        n,
        n_perp: perp,
        n_perp2: perp2,
    })
}

/// Rodrigues rotation of `v` by `angle` about the unit axis `d`.
pub fn rotate_vector<T: Real>(v: [T; 3], d: Direction<T>, angle: T) -> [T; 3] {
    let (s, co) = angle.sin_cos();
    let k = d.to_array();
    let kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    let cross = [
        k[1] * v[2] - k[2] * v[1],
        k[2] * v[0] - k[0] * v[2],
        k[0] * v[1] - k[1] * v[0],
    ];
    let mut out = [T::zero(); 3];
    for i in 0..3 {
        out[i] = v[i] * co + cross[i] * s + k[i] * kv * (T::one() - co);
    }
    out
}

/// Direction rotated about `axis`.
pub fn rotate_direction<T: Real>(d: Direction<T>, axis: Direction<T>, angle: T) -> Direction<T> {
    let v = rotate_vector(d.to_array(), axis, angle);
    Direction { x: v[0], y: v[1], z: v[2] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, matrix_exponential, Symmetry};
    use crate::scalar::C;
    use crate::states::{canonical_squeezed, product, CoupledState, Spin1State};

    #[test]
    fn spin_matrices_match_printed_forms_and_algebra() {
        let s = spin1_matrices::<f64>();
        assert_eq!(s.z, ComplexMatrix::from_diag(&[re(1.0), re(0.0), re(-1.0)]));
        let comm = s.x.commutator(&s.y);
        assert!(comm.max_abs_diff(&s.z.scale(C::i())) < 1e-15);
        let casimir = &(&(&s.x * &s.x) + &(&s.y * &s.y)) + &(&s.z * &s.z);
        assert!(casimir.max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0)) < 1e-15);
        for m in s.components() {
            assert!(m.is_hermitian());
        }
    }

    #[test]
    fn spin_component_along_axes() {
        let s = spin1_matrices::<f64>();
        assert_eq!(spin_component(Direction::unit_z()).unwrap(), s.z);
        assert_eq!(spin_component(Direction::unit_x()).unwrap(), s.x);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = spin_component(Direction::new(h, 0.0, h).unwrap()).unwrap();
        let e = eigh(&m).unwrap();
        for (got, want) in e.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_component_rejects_non_unit() {
        let d = Direction { x: 1.0, y: 1.0, z: 0.0 };
        assert!(matches!(spin_component(d), Err(Error::NonUnitDirection { .. })));
    }

    #[test]
    fn embedding_examples() {
        let s = spin1_matrices::<f64>();
        let one_one = CoupledState::basis(0, 0);
        let one_zero = CoupledState::basis(0, 1);
        let psi = one_one.to_vector();
        assert!((expectation(&psi, &embed(&s.z, Subsystem::First).unwrap()).unwrap().re - 1.0).abs() < 1e-15);
        let v = expectation(&one_zero.to_vector(), &embed(&s.z, Subsystem::Second).unwrap()).unwrap();
        assert_eq!(v.re, 0.0);
        let prod = &embed(&s.x, Subsystem::First).unwrap() * &embed(&s.x, Subsystem::Second).unwrap();
        assert!(prod.max_abs_diff(&kron(&s.x, &s.x)) < 1e-15);
        assert!(matches!(Subsystem::try_from(3), Err(Error::BadSubsystem(3))));
        assert!(embed(&ComplexMatrix::<f64>::identity(9), Subsystem::First).is_err());
    }

    #[test]
    fn embedded_operators_on_different_factors_commute() {
        let s = spin1_matrices::<f64>();
        for a in s.components() {
            for b in s.components() {
                let c = embed(a, Subsystem::First)
                    .unwrap()
                    .commutator(&embed(b, Subsystem::Second).unwrap());
                assert!(c.max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mean_spin_basis_states() {
        let ms = mean_spin(&CoupledState::<f64>::basis(0, 0), Subsystem::Second);
        assert_eq!(ms.vector, [0.0, 0.0, 1.0]);
        assert_eq!(ms.magnitude, 1.0);
        let ms = mean_spin(&CoupledState::<f64>::basis(0, 1), Subsystem::Second);
        assert_eq!(ms.magnitude, 0.0);
        assert!(ms.is_degenerate() && ms.direction().is_none());
    }

    #[test]
    fn mean_spin_of_canonical_squeezed_state() {
        for &theta in &[0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.5] {
            let st = product(&canonical_squeezed(theta).unwrap(), &Spin1State::basis(0));
            let ms = mean_spin(&st, Subsystem::First);
            let cth: f64 = theta.cos();
            let mag = 2.0 * (2.0 * (1.0 + cth)).sqrt() / (3.0 + cth);
            assert!((ms.magnitude - mag).abs() < 1e-14);
            let n = ms.direction().unwrap();
            let want = [
                theta.sin() / (2.0 * (1.0 + cth)).sqrt(),
                0.0,
                ((1.0 + cth) / 2.0).sqrt(),
            ];
            for (g, w) in n.to_array().iter().zip(want) {
                assert!((g - w).abs() < 1e-14);
            }
            let f = build_frame_xz(n).unwrap();
            let want_perp = [((1.0 + cth) / 2.0).sqrt(), 0.0, -theta.sin() / (2.0 * (1.0 + cth)).sqrt()];
            for (g, w) in f.n_perp.to_array().iter().zip(want_perp) {
                assert!((g - w).abs() < 1e-14);
            }
            for (g, w) in f.n_perp2.to_array().iter().zip([0.0, 1.0, 0.0]) {
                assert!((g - w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pole_gauge() {
        let f = build_frame(Direction::<f64>::unit_z()).unwrap();
        assert_eq!(f.n_perp.to_array(), [1.0, 0.0, 0.0]);
        assert_eq!(f.n_perp2.to_array(), [0.0, 1.0, 0.0]);
        let f = build_frame(-Direction::<f64>::unit_z()).unwrap();
        assert!(f.defect() < 1e-15);
        assert_eq!(f.n_perp.to_array(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn xz_gauge_at_half_angle() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = build_frame_xz(Direction::new(h, 0.0, h).unwrap()).unwrap();
        let want = [h, 0.0, -h];
        for (g, w) in f.n_perp.to_array().iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        assert_eq!(f.n_perp2.to_array(), [0.0, 1.0, 0.0]);
        assert!(matches!(build_frame_xz(Direction::<f64>::unit_y()), Err(Error::OutsideXzGauge)));
    }

    #[test]
    fn with_perp_is_right_handed() {
        let d = Direction::<f64>::from_vector([0.3, -0.4, 0.8]).unwrap();
        let f = Frame::with_perp(d);
        assert_eq!(f.n_perp, d);
        assert!(f.defect() < 1e-14);
    }

    #[test]
    fn rotation_moves_mean_spin() {
        let st = product(&canonical_squeezed(1.1f64).unwrap(), &canonical_squeezed(0.4).unwrap());
        let axis = Direction::from_vector([0.2, 0.9, -0.3]).unwrap();
        let phi = 0.83;
        let gen = embed(&spin_component(axis).unwrap(), Subsystem::First)
            .unwrap()
            .scale(-C::i());
        let u = matrix_exponential(&gen, Symmetry::AntiHermitian, phi).unwrap();
        let rotated = CoupledState::from_vector(&u.apply(st.to_vector().amps()).unwrap()).unwrap();
        let before = mean_spin(&st, Subsystem::First).vector;
        let after = mean_spin(&rotated, Subsystem::First).vector;
        let want = rotate_vector(before, axis, phi);
        for k in 0..3 {
            assert!((after[k] - want[k]).abs() < 1e-10, "{after:?} vs {want:?}");
        }
        // the other subsystem is untouched
        let other = mean_spin(&rotated, Subsystem::Second).vector;
        let orig = mean_spin(&st, Subsystem::Second).vector;
        for k in 0..3 {
            assert!((other[k] - orig[k]).abs() < 1e-12);
        }
    }
}
