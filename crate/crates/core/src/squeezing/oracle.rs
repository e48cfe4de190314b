//! Independent evaluation of ξ by explicit amplitude sums.
//!
//! Nothing here goes through `linalg` or the moment matrices used by the
//! engine: the spin-1 matrix entries are written out locally and every
//! expectation value is an index sum over the 3×3 amplitude array.

use crate::scalar::{Real, C};
use crate::spin::Frame;
use crate::states::CoupledState;

/// `S·d` as a 3×3 array of complex entries, built from literal entries of
/// `Sx`, `Sy`, `Sz` in the `m = +1, 0, -1` basis.
fn component_entries<T: Real>(d: [T; 3]) -> [[C<T>; 3]; 3] {
    let h = T::FRAC_1_SQRT_2();
    let z = T::zero();
    let (x, y, zz) = (d[0], d[1], d[2]);
    // Sx: h on the first off-diagonals; Sy: -i h above, +i h below; Sz: diag(1, 0, -1)
    let up = C::new(x * h, -y * h);
    let down = C::new(x * h, y * h);
    [
        [C::new(zz, z), up, C::new(z, z)],
        [down, C::new(z, z), up],
        [C::new(z, z), down, C::new(-zz, z)],
    ]
}

/// `(A ⊗ I) ψ` as a 3×3 amplitude array.
fn act_first<T: Real>(a: &[[C<T>; 3]; 3], c: &[[C<T>; 3]; 3]) -> [[C<T>; 3]; 3] {
    let mut out = [[C::new(T::zero(), T::zero()); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = C::new(T::zero(), T::zero());
            for k in 0..3 {
                acc = acc + a[i][k] * c[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// `(I ⊗ B) ψ` as a 3×3 amplitude array.
fn act_second<T: Real>(b: &[[C<T>; 3]; 3], c: &[[C<T>; 3]; 3]) -> [[C<T>; 3]; 3] {
    let mut out = [[C::new(T::zero(), T::zero()); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = C::new(T::zero(), T::zero());
            for l in 0..3 {
                acc = acc + b[j][l] * c[i][l];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn braket<T: Real>(u: &[[C<T>; 3]; 3], v: &[[C<T>; 3]; 3]) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    for i in 0..3 {
        for j in 0..3 {
            acc = acc + u[i][j].conj() * v[i][j];
        }
    }
    acc
}

fn mean_magnitude<T: Real>(c: &[[C<T>; 3]; 3], first: bool) -> T {
    let axes = [
        [T::one(), T::zero(), T::zero()],
        [T::zero(), T::one(), T::zero()],
        [T::zero(), T::zero(), T::one()],
    ];
    axes.iter()
        .map(|&ax| {
            let m = component_entries(ax);
            let v = if first { act_first(&m, c) } else { act_second(&m, c) };
            braket(c, &v).re.powi(2)
        })
        .sum::<T>()
        .sqrt()
}

/// ξ for fixed frames, computed independently of the main engine.
///
/// Uses `⟨A²⟩ = ‖Aψ‖²`, `⟨A⊗B⟩ = ⟨(A⊗I)ψ | (I⊗B)ψ⟩` and the same
/// `(|⟨S₁⟩| + |⟨S₂⟩|)` denominator.
pub fn xi_oracle<T: Real>(state: &CoupledState<T>, frame1: &Frame<T>, frame2: &Frame<T>) -> T {
    let c = &state.c;
    let a = component_entries(frame1.n_perp.to_array());
    let b = component_entries(frame2.n_perp.to_array());
    let a_psi = act_first(&a, c);
    let b_psi = act_second(&b, c);
    let mean_a = braket(c, &a_psi).re;
    let mean_b = braket(c, &b_psi).re;
    let sq_a = braket(&a_psi, &a_psi).re;
    let sq_b = braket(&b_psi, &b_psi).re;
    let cross = braket(&a_psi, &b_psi).re;
    let var_a = sq_a - mean_a * mean_a;
    let var_b = sq_b - mean_b * mean_b;
    let denom = mean_magnitude(c, true) + mean_magnitude(c, false);
    (T::lit(2.0) * var_a + T::lit(2.0) * var_b + T::lit(4.0) * cross) / denom
}
