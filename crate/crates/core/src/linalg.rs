//! Dense complex linear algebra for the 3- and 9-dimensional spaces used
//! throughout the crate.
//!
//! Everything is small enough that plain row-major `Vec` storage and
//! cyclic Jacobi rotations are both exact to near machine precision and
//! trivially verifiable.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

/// Symmetry class of a generator or operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    AntiHermitian,
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from equally long rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C<T>]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), n_cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    /// Builds a real matrix from `f64` rows.
    pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        let rows: Vec<Vec<C<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| re(T::lit(x))).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|a| a.norm()).fold(T::zero(), T::max)
    }

    /// `max |A[i][j] - conj(A[j][i])|`; zero for Hermitian matrices.
    pub fn hermiticity_defect(&self) -> T {
        self.symmetry_defect(Symmetry::Hermitian)
    }

    pub fn symmetry_defect(&self, kind: Symmetry) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                let a = self[(i, j)];
                let b = self[(j, i)].conj();
                let d = match kind {
                    Symmetry::Hermitian => (a - b).norm(),
                    Symmetry::AntiHermitian => (a + b).norm(),
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= T::lit(T::STRUCTURAL_TOL)
    }

    /// Verifies the symmetry tag within the structural tolerance.
    pub fn check_symmetry(&self, kind: Symmetry) -> Result<()> {
        let defect = self.symmetry_defect(kind);
        if defect <= T::lit(T::STRUCTURAL_TOL) {
            Ok(())
        } else {
            Err(Error::SymmetryViolated {
                expected: match kind {
                    Symmetry::Hermitian => "hermitian",
                    Symmetry::AntiHermitian => "anti-hermitian",
                },
                defect: defect.as_f64(),
            })
        }
    }

    pub fn apply(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                found: format!("length {}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, x)| *a * *x).sum()
            })
            .collect())
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A ket in a 3- or 9-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amps: Vec<C<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: "non-empty amplitude list".into(),
                found: "0 amplitudes".into(),
            });
        }
        Ok(Self { amps })
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(amps: Vec<C<T>>) -> Result<Self> {
        let mut s = Self::new(amps)?;
        s.normalize()?;
        Ok(s)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![C::zero(); dim];
        amps[index] = C::one();
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::lit(T::STRUCTURAL_TOL)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = T::one() / n;
        for a in &mut self.amps {
            *a = *a * inv;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * *b)
            .sum()
    }

    /// `|<self|other>|`, the phase-insensitive overlap.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm()
    }
}

/// Kronecker product. Entry `[(i*b.rows + k), (j*b.cols + l)] = a[i][j] * b[k][l]`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij.is_zero() {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `<psi|A|psi>`.
pub fn expectation<T: Real>(state: &StateVector<T>, op: &ComplexMatrix<T>) -> Result<C<T>> {
    if !op.is_square() || op.rows() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} operator", state.dim(), state.dim()),
            found: format!("{}x{}", op.rows(), op.cols()),
        });
    }
    let a_psi = op.apply(state.amps())?;
    Ok(state
        .amps()
        .iter()
        .zip(&a_psi)
        .map(|(x, y)| x.conj() * *y)
        .sum())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn spectral_map(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C::zero();
                for k in 0..n {
                    acc = acc + v[(i, k)] * fv[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// Cyclic complex Jacobi eigen-solver for Hermitian matrices.
pub fn eigh<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    h.check_symmetry(Symmetry::Hermitian)?;
    let n = h.rows();
    // symmetrize so round-off in the input cannot break the rotation algebra
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (h[(i, j)] + h[(j, i)].conj()) * T::lit(0.5);
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(T::min_positive_value());
    let eps = T::lit(T::JACOBI_EPS);

    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off <= eps * scale * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs <= T::min_positive_value() {
                    continue;
                }
                let phase = g / g_abs; // e^{i alpha}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (T::lit(2.0) * g_abs);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // J = diag(1, e^{-i alpha}) * [[c, s], [-s, c]] on the (p, q) plane
                let jpp = re(cs);
                let jpq = re(sn);
                let jqp = phase.conj() * (-sn);
                let jqq = phase.conj() * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = re(a[(p, p)].re);
                a[(q, q)] = re(a[(q, q)].re);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// `exp(scale * g)` for a Hermitian or anti-Hermitian `g`, computed from the
/// spectrum of the associated Hermitian matrix (`g` itself or `i g`).
pub fn matrix_exponential<T: Real>(
    g: &ComplexMatrix<T>,
    kind: Symmetry,
    scale: T,
) -> Result<ComplexMatrix<T>> {
    g.check_symmetry(kind)?;
    match kind {
        Symmetry::Hermitian => {
            let eig = eigh(g)?;
            Ok(eig.spectral_map(|l| re((scale * l).exp())))
        }
        Symmetry::AntiHermitian => {
            // g = -i K with K = i g Hermitian
            let k = g.scale(C::i());
            let eig = eigh(&k)?;
            Ok(eig.spectral_map(|l| C::from_polar(T::one(), -(scale * l))))
        }
    }
}

/// Unitary propagator family `τ ↦ exp(-i τ K)` for a fixed Hermitian `K`,
/// diagonalized once and applied cheaply at many times.
#[derive(Clone, Debug)]
pub struct SpectralPropagator<T: Real> {
    eigen: HermitianEigen<T>,
}

impl<T: Real> SpectralPropagator<T> {
    pub fn new(hermitian: &ComplexMatrix<T>) -> Result<Self> {
        Ok(Self {
            eigen: eigh(hermitian)?,
        })
    }

    pub fn matrix(&self, tau: T) -> ComplexMatrix<T> {
        self.eigen
            .spectral_map(|l| C::from_polar(T::one(), -(tau * l)))
    }

    /// `exp(-i τ K) psi` without forming the full matrix.
    pub fn apply(&self, tau: T, psi: &[C<T>]) -> Vec<C<T>> {
        let v = &self.eigen.vectors;
        let n = self.eigen.values.len();
        let mut coeffs = vec![C::zero(); n];
        for (k, coeff) in coeffs.iter_mut().enumerate() {
            let proj: C<T> = (0..n).map(|i| v[(i, k)].conj() * psi[i]).sum();
            *coeff = proj * C::from_polar(T::one(), -(tau * self.eigen.values[k]));
        }
        (0..n)
            .map(|i| (0..n).map(|k| v[(i, k)] * coeffs[k]).sum())
            .collect()
    }
}

/// Singular values (descending) by one-sided Jacobi, which keeps small
/// singular values accurate to `eps * σ_max` rather than `sqrt(eps)`.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let rows = m.rows();
    let cols = m.cols();
    let mut cols_data: Vec<Vec<C<T>>> = (0..cols)
        .map(|j| (0..rows).map(|i| m[(i, j)]).collect())
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: T = cols_data[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: T = cols_data[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C<T> = cols_data[p]
                    .iter()
                    .zip(&cols_data[q])
                    .map(|(x, y)| x.conj() * *y)
                    .sum();
                let g_abs = gamma.norm();
                if g_abs <= eps * (alpha * beta).sqrt() || g_abs <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g_abs;
                let zeta = (beta - alpha) / (T::lit(2.0) * g_abs);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let xp = cols_data[p][i];
                    let xq = cols_data[q][i] * phase.conj();
                    cols_data[p][i] = xp * cs - xq * sn;
                    cols_data[q][i] = xp * sn + xq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols_data
        .iter()
        .map(|c| c.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sx() -> ComplexMatrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]])
    }

    #[test]
    fn kron_identity_and_diagonal_blocks() {
        let i3 = ComplexMatrix::<f64>::identity(3);
        assert_eq!(kron(&i3, &i3), ComplexMatrix::identity(9));
        let d = ComplexMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]]);
        let k = kron(&d, &i3);
        let want = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0];
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == j { want[i] } else { 0.0 };
                assert_eq!(k[(i, j)], re(expect));
            }
        }
    }

    #[test]
    fn kron_sx_sx_matches_naive_loop() {
        let a = sx();
        let k = kron(&a, &a);
        assert!((k[(0, 4)].re - 0.5).abs() < 1e-15);
        // independent quadruple loop
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..3 {
                        let want = a[(i, j)] * a[(p, q)];
                        assert_eq!(k[(3 * i + p, 3 * j + q)], want);
                    }
                }
            }
        }
    }

    #[test]
    fn expectation_on_basis_states() {
        let sz = ComplexMatrix::<f64>::from_real_rows(&[
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.0, -1.0],
        ]);
        let up = StateVector::basis(3, 0);
        assert_eq!(expectation(&up, &sz).unwrap(), re(1.0));
        assert_eq!(expectation(&up, &sx()).unwrap(), re(0.0));
        let psi = StateVector::normalized(vec![re(2f64.sqrt()), re(1.0), re(0.0)]).unwrap();
        let v = expectation(&psi, &sz).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn expectation_rejects_dimension_mismatch() {
        let psi = StateVector::<f64>::basis(9, 0);
        assert!(matches!(
            expectation(&psi, &sx()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exponential_at_zero_scale_is_identity() {
        let g = sx().scale(C::i());
        let u = matrix_exponential(&g, Symmetry::AntiHermitian, 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn quarter_turn_rotation() {
        let g = ComplexMatrix::<f64>::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let u = matrix_exponential(&g, Symmetry::AntiHermitian, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(u.max_abs_diff(&g) < 1e-14, "{u:?}");
    }

    #[test]
    fn exponential_rejects_wrong_tag() {
        let g = ComplexMatrix::<f64>::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        assert!(matches!(
            matrix_exponential(&g, Symmetry::Hermitian, 1.0),
            Err(Error::SymmetryViolated { .. })
        ));
    }

    #[test]
    fn hermitian_exponential_matches_scalar_exp() {
        let h = ComplexMatrix::<f64>::from_diag(&[re(1.0), re(-2.0)]);
        let e = matrix_exponential(&h, Symmetry::Hermitian, 0.5).unwrap();
        assert!((e[(0, 0)].re - 0.5f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let h = ComplexMatrix::from_rows(&[
            [re(2.0), c(0.3, -0.7), c(0.1, 0.2)],
            [c(0.3, 0.7), re(-1.0), c(0.0, 0.5)],
            [c(0.1, -0.2), c(0.0, -0.5), re(0.4)],
        ]);
        let e = eigh(&h).unwrap();
        let back = e.spectral_map(re);
        assert!(back.max_abs_diff(&h) < 1e-13);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn singular_values_of_rank_one_and_diagonal() {
        let u = [c(0.6, 0.0), c(0.0, 0.8), re(0.0)];
        let v = [re(0.5f64.sqrt()), c(0.0, -(0.5f64.sqrt())), re(0.0)];
        let rows: Vec<Vec<C<f64>>> = u.iter().map(|a| v.iter().map(|b| *a * *b).collect()).collect();
        let sv = singular_values(&ComplexMatrix::from_rows(&rows));
        assert!((sv[0] - 1.0).abs() < 1e-15);
        assert!(sv[1] < 1e-15 && sv[2] < 1e-15, "{sv:?}");

        let d = ComplexMatrix::<f64>::from_diag(&[re(0.2), re(-0.9), c(0.0, 0.4)]);
        let sv = singular_values(&d);
        for (got, want) in sv.iter().zip([0.9, 0.4, 0.2]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn single_precision_exponential_is_unitary() {
        let g = ComplexMatrix::<f32>::from_real_rows(&[[0.0, -1.0, 0.0], [1.0, 0.0, -1.0], [0.0, 1.0, 0.0]]);
        let u = matrix_exponential(&g, Symmetry::AntiHermitian, 0.7).unwrap();
        let uu = &u.adjoint() * &u;
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-5);
    }
}
