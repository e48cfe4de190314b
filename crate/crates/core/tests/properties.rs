use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use proptest::prelude::*;

use spinsq::dynamics::{cross_quadratic_generator, evolve, linspace, pair_exchange_generator, trajectory, Stage};
use spinsq::linalg::{expectation, kron, matrix_exponential, ComplexMatrix, StateVector, Symmetry};
use spinsq::spin::{build_frame, embed, rotate_direction, spin_component, Direction, Frame, Subsystem};
use spinsq::squeezing::{
    closed_form_xi, ku_parameter, puri_parameter, squeezing_report, xi_oracle, ClosedFormFamily, FrameGauge,
    FramePolicy,
};
use spinsq::states::{
    config, config_from_amplitudes, is_oriented, majorana, max_minor, product, schmidt, schwinger,
    transverse_residual, ConfigKind, CoupledState, Spin1State, Spinor, StateFile, DEFAULT_SCHMIDT_TOL,
};

type C = Complex<f64>;

fn complex() -> impl Strategy<Value = C> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| C::new(r, i))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| {
        let rows: Vec<Vec<C>> = v.chunks(n).map(|r| r.to_vec()).collect();
        ComplexMatrix::from_rows(&rows)
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    matrix(n).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

fn coupled_state() -> impl Strategy<Value = CoupledState<f64>> {
    prop::array::uniform9(complex())
        .prop_filter("non-zero", |a| a.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|a| CoupledState::from_vector(&a).unwrap())
}

fn spin1_state() -> impl Strategy<Value = Spin1State<f64>> {
    prop::array::uniform3(complex())
        .prop_filter("non-zero", |a| a.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|a| Spin1State::normalized(a).unwrap())
}

fn direction() -> impl Strategy<Value = Direction<f64>> {
    (0.0..PI, 0.0..TAU).prop_map(|(t, p)| Direction::spherical(t, p))
}

fn spinor() -> impl Strategy<Value = Spinor<f64>> {
    (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| Spinor::new(t, p).unwrap())
}

fn same_ray(a: &CoupledState<f64>, b: &CoupledState<f64>, tol: f64) -> bool {
    (a.fidelity(b) - 1.0).abs() <= tol
}

proptest! {
    #[test]
    fn kron_is_bilinear(a in matrix(2), b in matrix(3), c in matrix(3), s in complex()) {
        let lhs = kron(&a, &(&b + &c.scale(s)));
        let rhs = &kron(&a, &b) + &kron(&a, &c).scale(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), c in matrix(3)) {
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn kron_mixed_product(a in matrix(3), b in matrix(3), c in matrix(3), d in matrix(3)) {
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn expectation_is_additive(st in coupled_state(), a in hermitian(9), b in hermitian(9)) {
        let v = st.to_vector();
        let sum = expectation(&v, &(&a + &b)).unwrap();
        let parts = expectation(&v, &a).unwrap() + expectation(&v, &b).unwrap();
        prop_assert!((sum - parts).norm() < 1e-12);
        // Hermitian operators have real expectations
        prop_assert!(expectation(&v, &a).unwrap().im.abs() < 1e-13);
    }

    #[test]
    fn exponential_semigroup(h in hermitian(4), s in -1.5..1.5f64, t in -1.5..1.5f64) {
        let a = h.scale(C::new(0.0, -1.0));
        let es = matrix_exponential(&a, Symmetry::AntiHermitian, s).unwrap();
        let et = matrix_exponential(&a, Symmetry::AntiHermitian, t).unwrap();
        let est = matrix_exponential(&a, Symmetry::AntiHermitian, s + t).unwrap();
        prop_assert!((&es * &et).max_abs_diff(&est) < 1e-11);
        let u = &est.adjoint() * &est;
        prop_assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn evolution_semigroup_and_time_symmetry(st in coupled_state(), s in 0.0..1.5f64, t in 0.0..1.5f64) {
        for g in [pair_exchange_generator::<f64>(), cross_quadratic_generator()] {
            let two = evolve(&evolve(&st, &g, s), &g, t);
            let one = evolve(&st, &g, s + t);
            for (x, y) in two.flat().iter().zip(one.flat()) {
                prop_assert!((x - y).norm() < 1e-11);
            }
            let back = evolve(&evolve(&st, &g, t), &g, -t);
            for (x, y) in back.flat().iter().zip(st.flat()) {
                prop_assert!((x - y).norm() < 1e-11);
            }
            prop_assert!((evolve(&st, &g, s).norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn engine_matches_oracle(st in coupled_state(), d1 in direction(), d2 in direction()) {
        let (f1, f2) = (Frame::with_perp(d1), Frame::with_perp(d2));
        let r = squeezing_report(&st, &FramePolicy::Fixed(f1, f2));
        let o = xi_oracle(&st, &f1, &f2);
        if r.valid {
            prop_assert!((r.xi - o).abs() <= 1e-10 * o.abs().max(1.0), "engine {} oracle {}", r.xi, o);
        }
    }

    #[test]
    fn schwinger_majorana_round_trip(s in spin1_state()) {
        let (u1, u2) = majorana(&s);
        prop_assert!(schwinger(u1, u2).fidelity(&s) >= 1.0 - 1e-10);
    }
}

proptest! {
    #[test]
    fn majorana_schwinger_round_trip(u1 in spinor(), u2 in spinor()) {
        let s = schwinger(u1, u2);
        let (v1, v2) = majorana(&s);
        let d = |a: Spinor<f64>, b: Spinor<f64>| {
            let (x, y) = (a.direction(), b.direction());
            1.0 - x.dot(y)
        };
        let direct = d(u1, v1).max(d(u2, v2));
        let swapped = d(u1, v2).max(d(u2, v1));
        prop_assert!(direct.min(swapped) < 1e-9, "{u1:?} {u2:?} -> {v1:?} {v2:?}");
    }

    #[test]
    fn report_fields_are_consistent(st in coupled_state()) {
        for policy in [
            FramePolicy::MeanSpinAligned(FrameGauge::Lab),
            FramePolicy::MeanSpinAligned(FrameGauge::Xz),
            FramePolicy::optimized(),
        ] {
            let r = squeezing_report(&st, &policy);
            prop_assert!(r.var1 >= -1e-12 && r.var2 >= -1e-12);
            if r.valid {
                let rebuilt = (2.0 * r.var1 + 2.0 * r.var2 + 4.0 * r.cross) / r.denominator();
                prop_assert!((rebuilt - r.xi).abs() < 1e-12 * r.xi.abs().max(1.0));
                let o = xi_oracle(&st, &r.frame1, &r.frame2);
                prop_assert!((o - r.xi).abs() < 1e-10 * o.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rotation_covariance(st in coupled_state(), d1 in direction(), d2 in direction(),
                           axis in direction(), phi in -PI..PI) {
        let n = spin_component(axis).unwrap();
        let total = &embed(&n, Subsystem::First).unwrap() + &embed(&n, Subsystem::Second).unwrap();
        let u = matrix_exponential(&total.scale(C::new(0.0, -1.0)), Symmetry::AntiHermitian, phi).unwrap();
        let rotated = CoupledState::from_vector(&u.apply(&st.flat()).unwrap()).unwrap();
        let before = squeezing_report(&st, &FramePolicy::Fixed(Frame::with_perp(d1), Frame::with_perp(d2)));
        let r1 = Frame::with_perp(rotate_direction(d1, axis, phi));
        let r2 = Frame::with_perp(rotate_direction(d2, axis, phi));
        let after = squeezing_report(&rotated, &FramePolicy::Fixed(r1, r2));
        prop_assume!(before.valid);
        prop_assert!((before.xi - after.xi).abs() < 1e-10 * before.xi.abs().max(1.0));
    }

    #[test]
    fn optimized_dominates(st in coupled_state(), phi1 in 0.0..TAU, phi2 in 0.0..TAU) {
        let aligned = squeezing_report(&st, &FramePolicy::MeanSpinAligned(FrameGauge::Lab));
        prop_assume!(aligned.valid);
        let opt = squeezing_report(&st, &FramePolicy::optimized());
        prop_assert!(opt.xi <= aligned.xi + 1e-12, "optimized {} aligned {}", opt.xi, aligned.xi);
        // any other in-plane choice (full sphere for a degenerate subsystem)
        let in_plane = |f: &Frame<f64>, phi: f64| Frame::with_perp(f.in_plane(phi));
        let fixed = squeezing_report(
            &st,
            &FramePolicy::Fixed(in_plane(&aligned.frame1, phi1), in_plane(&aligned.frame2, phi2)),
        );
        prop_assert!(opt.xi <= fixed.xi + 1e-12, "optimized {} fixed {}", opt.xi, fixed.xi);
    }

    #[test]
    fn scale_invariance(st in coupled_state(), lambda in 0.01..100.0f64) {
        let scaled: Vec<C> = st.flat().iter().map(|a| a * lambda).collect();
        let again = CoupledState::from_vector(&scaled).unwrap();
        let p = FramePolicy::MeanSpinAligned(FrameGauge::Lab);
        let (a, b) = (squeezing_report(&st, &p), squeezing_report(&again, &p));
        prop_assume!(a.valid);
        prop_assert!((a.xi - b.xi).abs() < 1e-12 * a.xi.abs().max(1.0));
    }

    #[test]
    fn closed_forms_are_homogeneous(v in prop::array::uniform3(-1.0..1.0f64), lambda in 0.01..100.0f64) {
        let fams = [
            (ClosedFormFamily::Config1 { c11: v[0], c22: v[1], c33: v[2] },
             ClosedFormFamily::Config1 { c11: lambda * v[0], c22: lambda * v[1], c33: lambda * v[2] }),
            (ClosedFormFamily::Config2 { c11: v[0], c13: v[1], c22: v[2] },
             ClosedFormFamily::Config2 { c11: lambda * v[0], c13: lambda * v[1], c22: lambda * v[2] }),
            (ClosedFormFamily::Config3 { c12: v[0], c21: v[1], c23: v[2] },
             ClosedFormFamily::Config3 { c12: lambda * v[0], c21: lambda * v[1], c23: lambda * v[2] }),
        ];
        for (a, b) in fams {
            if let (Ok(x), Ok(y)) = (closed_form_xi(&a), closed_form_xi(&b)) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{a:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn product_states_have_no_cross_term(s1 in spin1_state(), s2 in spin1_state()) {
        let r = squeezing_report(&product(&s1, &s2), &FramePolicy::MeanSpinAligned(FrameGauge::Lab));
        prop_assert!(r.cross.abs() < 1e-12);
    }

    #[test]
    fn puri_is_more_stringent(s in spin1_state()) {
        if let Ok(p) = puri_parameter(&s) {
            prop_assert!(p >= ku_parameter(&s) - 1e-12);
        }
    }

    #[test]
    fn schmidt_agrees_with_minors(s1 in spin1_state(), s2 in spin1_state(), st in coupled_state()) {
        let tol = DEFAULT_SCHMIDT_TOL;
        let prod = product(&s1, &s2);
        let info = schmidt(&prod, tol);
        prop_assert!(info.product_flag);
        prop_assert!(max_minor(&prod) <= 10.0 * tol);
        let info = schmidt(&st, tol);
        prop_assert_eq!(info.product_flag, max_minor(&st) <= 10.0 * tol);
        let sum_sq: f64 = info.singular_values.iter().map(|s| s * s).sum();
        prop_assert!((sum_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_file_round_trip(st in coupled_state()) {
        let text = serde_json::to_string(&StateFile::from_state(&st)).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        let again = back.to_state::<f64>().unwrap();
        for (x, y) in again.flat().iter().zip(st.flat()) {
            prop_assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn configurations_are_normalized_and_z_aligned(a in 0.0..PI, b in 0.0..PI, p1 in 0.0..TAU, p2 in 0.0..TAU) {
        for kind in [ConfigKind::One, ConfigKind::Two, ConfigKind::Three] {
            if let Ok(st) = config(kind, a, b, p1, p2) {
                prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
                prop_assert!(transverse_residual(&st) < 1e-12);
                prop_assert!(st.max_outside(&kind.support()) == 0.0);
            }
        }
    }

    #[test]
    fn pair_exchange_support(tau in 0.0..3.0f64) {
        let g = pair_exchange_generator::<f64>();
        let from_11 = evolve(&CoupledState::basis(0, 0), &g, tau);
        prop_assert!(from_11.max_outside(&[0, 4, 8]) < 1e-12);
        let from_10 = evolve(&CoupledState::basis(0, 1), &g, tau);
        prop_assert!(from_10.max_outside(&[1, 5]) < 1e-12);
    }
}

#[test]
fn oriented_basis_states_do_not_squeeze() {
    let z = Direction::unit_z();
    for i in 0..3 {
        for j in 0..3 {
            let st = CoupledState::<f64>::basis(i, j);
            assert!(is_oriented(&st, z, z, 1e-12).unwrap());
            let r = squeezing_report(&st, &FramePolicy::optimized());
            if i != 1 && j != 1 {
                assert!(r.valid && r.xi >= 1.0 - 1e-9, "|{i},{j}>: {}", r.xi);
            }
        }
    }
}

#[test]
fn trajectory_matches_configuration_family() {
    let policy = FramePolicy::optimized();
    let stages = [Stage { generator: pair_exchange_generator(), tau_grid: linspace(0.0f64, 3.0, 31), launch: None }];
    let traj = trajectory(&CoupledState::basis(0, 0), &stages, &policy).unwrap();
    for p in &traj.points {
        assert!((p.state.norm_sqr() - 1.0).abs() < 1e-12);
        let f = p.state.flat();
        let amps = [f[0], f[4], f[8]];
        assert!(amps.iter().all(|a| a.im.abs() < 1e-12));
        let again = config_from_amplitudes(ConfigKind::One, amps).unwrap();
        let r = squeezing_report(&again, &policy);
        assert!((r.xi - p.report.xi).abs() < 1e-10, "tau {}: {} vs {}", p.tau, r.xi, p.report.xi);
    }
    assert!(same_ray(&traj.points[0].state, &CoupledState::basis(0, 0), 1e-15));
    assert!((traj.points[0].report.xi - 1.0).abs() < 1e-12);
}

#[test]
fn frame_builder_examples() {
    let f = build_frame(Direction::<f64>::unit_z()).unwrap();
    assert!(f.defect() < 1e-15);
    let v = StateVector::<f64>::basis(9, 0);
    assert_eq!(v.dim(), 9);
}

#[test]
fn single_and_double_precision_agree() {
    let st64 = config(ConfigKind::One, 1.1f64, 0.6, 0.0, 0.0).unwrap();
    let st32 = config(ConfigKind::One, 1.1f32, 0.6, 0.0, 0.0).unwrap();
    let p64 = FramePolicy::<f64>::MeanSpinAligned(FrameGauge::Lab);
    let p32 = FramePolicy::<f32>::MeanSpinAligned(FrameGauge::Lab);
    let a = squeezing_report(&st64, &p64).xi;
    let b = squeezing_report(&st32, &p32).xi as f64;
    assert!((a - b).abs() < 1e-4, "{a} vs {b}");
}
