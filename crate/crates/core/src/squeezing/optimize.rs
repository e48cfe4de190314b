//! Minimization of ξ over the perpendicular directions: a coarse grid
//! followed by cyclic golden-section refinement of each angle.

use crate::scalar::Real;
use crate::spin::{build_frame_unchecked, Direction, Frame};

use super::{Moments, OptimizerSettings};

/// Angle parametrization of one subsystem's direction.
#[derive(Clone, Copy)]
enum Chart<T> {
    /// `cos φ n_perp + sin φ n_perp2` around a mean-spin frame.
    Plane(Frame<T>),
    /// `(θ, φ)` over the whole sphere, used when the mean spin vanishes.
    Sphere,
}

impl<T: Real> Chart<T> {
    fn dims(&self) -> usize {
        match self {
            Chart::Plane(_) => 1,
            Chart::Sphere => 2,
        }
    }

    fn direction(&self, angles: &[T]) -> [T; 3] {
        match self {
            Chart::Plane(f) => f.in_plane(angles[0]).to_array(),
            Chart::Sphere => Direction::spherical(angles[0], angles[1]).to_array(),
        }
    }

    /// Grid nodes (angle tuples) in lexicographic order, plus the node step.
    fn grid(&self, n: usize) -> (Vec<Vec<T>>, T) {
        let step = T::TAU() / T::lit(n as f64);
        match self {
            Chart::Plane(_) => ((0..n).map(|k| vec![step * T::lit(k as f64)]).collect(), step),
            Chart::Sphere => {
                let polar = n / 2;
                let mut out = Vec::with_capacity((polar + 1) * n);
                for i in 0..=polar {
                    let th = T::PI() * T::lit(i as f64) / T::lit(polar as f64);
                    for k in 0..n {
                        out.push(vec![th, step * T::lit(k as f64)]);
                    }
                }
                (out, step)
            }
        }
    }

    fn frame(&self, d: [T; 3]) -> Frame<T> {
        let dir = Direction::from_vector(d).expect("unit direction");
        match self {
            Chart::Plane(f) => {
                let n2 = Direction::from_vector(f.n.cross_vec(dir)).expect("perpendicular");
                Frame {
                    n: f.n,
                    n_perp: dir,
                    n_perp2: n2,
                }
            }
            Chart::Sphere => Frame::with_perp(dir),
        }
    }
}

fn chart_for<T: Real>(m: &crate::spin::MeanSpin<T>) -> Chart<T> {
    match m.direction() {
        Some(n) => Chart::Plane(build_frame_unchecked(n)),
        None => Chart::Sphere,
    }
}

/// Frames minimizing ξ. Ties on the grid (within `1e-14`) resolve to the
/// lexicographically lowest node.
pub(super) fn minimize_frames<T: Real>(m: &Moments<T>, s: &OptimizerSettings) -> (Frame<T>, Frame<T>) {
    let charts = [chart_for(&m.mean[0]), chart_for(&m.mean[1])];
    let n = s.grid_points();
    let (g1, step) = charts[0].grid(n);
    let (g2, _) = charts[1].grid(n);

    let dirs1: Vec<[T; 3]> = g1.iter().map(|a| charts[0].direction(a)).collect();
    let dirs2: Vec<[T; 3]> = g2.iter().map(|a| charts[1].direction(a)).collect();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let v1: Vec<T> = dirs1.iter().map(|&d| two * m.variance(0, d)).collect();
    let v2: Vec<T> = dirs2.iter().map(|&d| two * m.variance(1, d)).collect();
    // C d2 so the cross term is a dot product per node pair
    let cd2: Vec<[T; 3]> = dirs2
        .iter()
        .map(|d| {
            let mut out = [T::zero(); 3];
            for a in 0..3 {
                out[a] = (0..3).map(|b| m.cross[a][b] * d[b]).sum();
            }
            out
        })
        .collect();

    let tie = T::lit(1e-14);
    let mut best = (T::infinity(), 0usize, 0usize);
    for (i, d1) in dirs1.iter().enumerate() {
        for (j, c) in cd2.iter().enumerate() {
            let val = v1[i] + v2[j] + four * (d1[0] * c[0] + d1[1] * c[1] + d1[2] * c[2]);
            if val < best.0 - tie {
                best = (val, i, j);
            }
        }
    }

    let denom = m.denominator();
    let objective = |x: &[T]| -> T {
        let d1 = charts[0].direction(&x[..charts[0].dims()]);
        let d2 = charts[1].direction(&x[charts[0].dims()..]);
        m.xi(d1, d2) * denom
    };

    let mut x: Vec<T> = g1[best.1].iter().chain(g2[best.2].iter()).copied().collect();
    let mut fx = objective(&x);
    for _ in 0..s.refine_iters() {
        let before = fx;
        for k in 0..x.len() {
            let (xk, fk) = golden_section(|t| {
                let mut y = x.clone();
                y[k] = t;
                objective(&y)
            }, x[k] - step, x[k] + step);
            if fk < fx {
                x[k] = xk;
                fx = fk;
            }
        }
        if !(before - fx > T::epsilon() * before.abs().max(T::one())) {
            break;
        }
    }

    let d1 = charts[0].direction(&x[..charts[0].dims()]);
    let d2 = charts[1].direction(&x[charts[0].dims()..]);
    (charts[0].frame(d1), charts[1].frame(d2))
}

/// Golden-section minimum of a unimodal-on-bracket function.
fn golden_section<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    let tol = T::epsilon().sqrt() * T::lit(1e-3);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
