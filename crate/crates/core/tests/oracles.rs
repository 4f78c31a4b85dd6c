//! Checks against independent constructions: numerical averaging of the
//! forcing, hand-expanded characteristic polynomials, and linear-algebra
//! probes of the linearised slow flow.

use std::f64::consts::PI;

use hopf_delay::charsolve::{slowflow_char_residual, CharacteristicSystem, ExactChar};
use hopf_delay::ddesim::{
    classify_long_run, detect_hopf_bisection, integrate, integrate_slowflow, ClassifyTolerances, DetectOptions,
    History, LongRunClass, SlowFlowMode,
};
use hopf_delay::hopf::{self, approach2_branch, erneux_approach2_branch, ErneuxPairing};
use hopf_delay::slowflow::{cartesian_rhs, linearized_cartesian_rhs, polar_rhs, PlaneState, PolarState};
use hopf_delay::{Branch, Error, SystemKind, SystemSpec};
use num_complex::Complex64;

/// The forcing `f` in `x'' + x = eps f`, written out per oscillator.
fn forcing(spec: &SystemSpec, x: f64, v: f64, xd: f64) -> f64 {
    let k = spec.k;
    match spec.kind {
        SystemKind::Duffing => -spec.alpha * v - spec.gamma * x.powi(3) + k * xd,
        SystemKind::VanDerPol => v * (1.0 - x * x) + k * xd,
        SystemKind::ErneuxGrasman => v * (1.0 - x * x) + k * xd - k * x,
    }
}

/// Mean of a 2 pi periodic function by the trapezoid rule, exact for
/// trigonometric polynomials of degree below `n`.
fn mean(n: usize, g: impl Fn(f64) -> f64) -> f64 {
    (0..n).map(|i| g(2.0 * PI * i as f64 / n as f64)).sum::<f64>() / n as f64
}

/// Averaged variation-of-parameters equations for `x = A cos t + B sin t`.
fn averaged_cartesian(spec: &SystemSpec, delay: f64, now: (f64, f64), past: (f64, f64)) -> (f64, f64) {
    let (a, b) = now;
    let (ad, bd) = past;
    let f = |t: f64| {
        let x = a * t.cos() + b * t.sin();
        let v = -a * t.sin() + b * t.cos();
        let xd = ad * (t - delay).cos() + bd * (t - delay).sin();
        forcing(spec, x, v, xd)
    };
    (-mean(64, |t| f(t) * t.sin()), mean(64, |t| f(t) * t.cos()))
}

fn specs() -> Vec<SystemSpec> {
    vec![
        SystemSpec::duffing(0.3, 0.07, 1.3, 0.9),
        SystemSpec::duffing(0.1, 0.0, -0.6, 2.2),
        SystemSpec::van_der_pol(0.2, 1.7),
        SystemSpec::erneux(0.4, 1.3),
    ]
}

#[test]
fn cartesian_slow_flow_is_the_average_of_the_forcing() {
    let states = [((0.7, -0.2), (0.3, 0.5)), ((-1.4, 0.9), (1.1, -0.8)), ((2.0, 0.0), (2.0, 0.0))];
    for spec in specs() {
        for &(now, past) in &states {
            for delay in [0.0, 0.4, 2.9, 7.3] {
                let (ea, eb) = averaged_cartesian(&spec, delay, now, past);
                let (a, b) = cartesian_rhs(
                    &spec,
                    delay,
                    &PlaneState::new(now.0, now.1),
                    &PlaneState::new(past.0, past.1),
                );
                assert!((a - ea).abs() < 1e-12 && (b - eb).abs() < 1e-12, "{spec:?} T={delay}: {a} {b} vs {ea} {eb}");
            }
        }
    }
}

#[test]
fn duffing_polar_flow_is_the_average_of_the_forcing() {
    // x = R cos(t - theta): R' = -<sin(t - theta) f>, theta' = <cos(t - theta) f> / R
    let spec = SystemSpec::duffing(0.25, 0.05, 1.0, 1.4);
    for &(r, th, rd, thd, delay) in &[(1.2, 0.3, 0.8, -1.0, 1.9), (0.4, -2.5, 1.5, 0.7, 4.4), (2.5, 1.0, 2.5, 1.0, 0.0)] {
        let f = |t: f64| {
            let x = r * (t - th).cos();
            let v = -r * (t - th).sin();
            let xd = rd * (t - delay - thd).cos();
            forcing(&spec, x, v, xd)
        };
        let dr = -mean(64, |t| (t - th).sin() * f(t));
        let dth = mean(64, |t| (t - th).cos() * f(t)) / r;
        let (pr, pth) = polar_rhs(
            &spec,
            delay,
            &PolarState { r, theta: th, eta: 0.0 },
            &PolarState { r: rd, theta: thd, eta: 0.0 },
        )
        .unwrap();
        assert!((pr - dr).abs() < 1e-12, "{pr} vs {dr}");
        assert!((pth - dth).abs() < 1e-12, "{pth} vs {dth}");
    }
    // pure cubic stiffness: the frequency correction is -3 gamma R^2 / 8
    let cubic = SystemSpec::duffing(0.25, 0.0, 2.0, 0.0);
    let s = PolarState { r: 1.5, theta: 0.2, eta: 0.0 };
    let (_, dth) = polar_rhs(&cubic, 0.0, &s, &s).unwrap();
    assert!((dth + 3.0 * 2.0 * 1.5 * 1.5 / 8.0).abs() < 1e-14);
}

/// The matrix `M(lambda)` of the linearised slow flow, probed column by column.
fn slow_flow_matrix(spec: &SystemSpec, delay: f64, lambda: Complex64) -> [[Complex64; 2]; 2] {
    let e = (-lambda * spec.epsilon * delay).exp();
    let zero = PlaneState::new(0.0, 0.0);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (j, unit) in [PlaneState::new(1.0, 0.0), PlaneState::new(0.0, 1.0)].iter().enumerate() {
        let now = linearized_cartesian_rhs(spec, delay, unit, &zero);
        let past = linearized_cartesian_rhs(spec, delay, &zero, unit);
        m[0][j] = now.0 + past.0 * e;
        m[1][j] = now.1 + past.1 * e;
    }
    m[0][0] -= lambda;
    m[1][1] -= lambda;
    m
}

fn det_at(spec: &SystemSpec, omega: f64, delay: f64) -> f64 {
    let m = slow_flow_matrix(spec, delay, Complex64::new(0.0, omega));
    (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm()
}

#[test]
fn closed_forms_are_eigenvalues_of_the_probed_slow_flow() {
    for eps in [0.05, 0.2, 0.5] {
        for k in [1.2, 1.9, 2.8] {
            for branch in Branch::BOTH {
                for spec in [SystemSpec::duffing(eps, 0.05, 1.0, k), SystemSpec::van_der_pol(eps, k)] {
                    let p = approach2_branch(&spec, branch, 0).unwrap();
                    assert!(det_at(&spec, p.omega, p.delay) < 1e-12, "{spec:?} {branch}");
                }
                let spec = SystemSpec::erneux(eps, k);
                let d = erneux_approach2_branch(&spec, branch, ErneuxPairing::Derived, 0).unwrap();
                assert!(det_at(&spec, d.omega, d.delay) < 1e-12);
                let p = erneux_approach2_branch(&spec, branch, ErneuxPairing::Printed, 0).unwrap();
                assert!(det_at(&spec, p.omega, p.delay) > 1e-3, "{spec:?} {branch}");
            }
        }
    }
}

#[test]
fn slow_flow_residual_is_the_probed_determinant() {
    for spec in specs() {
        let scale = if spec.kind == SystemKind::Duffing { 16.0 } else { 1.0 };
        for &(w, t) in &[(0.3, 1.1), (1.7, 4.2), (0.05, 0.3)] {
            let r = slowflow_char_residual(&spec, w, t).norm();
            assert!((r - scale * det_at(&spec, w, t)).abs() < 1e-12 * (1.0 + r));
        }
    }
}

#[test]
fn duffing_trigonometric_residuals() {
    let (alpha, eps) = (0.05, 0.37);
    for &(k, w, t) in &[(1.0, 0.6, 2.1), (2.5, 1.3, 5.9), (0.3, 0.11, 3.4)] {
        let spec = SystemSpec::duffing(eps, alpha, 1.0, k);
        let p = eps * w * t;
        let re = 4.0 * k * k * (2.0 * p).cos() + 16.0 * k * w * t.sin() * p.sin() + 8.0 * alpha * k * t.sin() * p.cos()
            - 16.0 * w * w
            + 4.0 * alpha * alpha;
        let im = -4.0 * k * k * (2.0 * p).sin() - 8.0 * alpha * k * t.sin() * p.sin() + 16.0 * k * w * t.sin() * p.cos()
            + 16.0 * alpha * w;
        let r = slowflow_char_residual(&spec, w, t);
        assert!((r.re - re).abs() < 1e-12 && (r.im - im).abs() < 1e-12);
    }
}

#[test]
fn vdp_trigonometric_residuals() {
    let eps = 0.29;
    for &(k, w, t) in &[(2.0, 0.6, 0.9), (1.4, 1.3, 2.6), (2.9, 0.2, 3.3)] {
        let spec = SystemSpec::van_der_pol(eps, k);
        let p = eps * w * t;
        let (st, sp, cp) = (t.sin(), p.sin(), p.cos());
        // real part carries +k w sin(p) sin(T)
        let re = -0.5 * k * cp * st + k * w * sp * st + 0.25 * k * k * (2.0 * p).cos() + 0.25 - w * w;
        let im = k * w * cp * st + 0.5 * k * sp * st - 0.25 * k * k * (2.0 * p).sin() - w;
        let r = slowflow_char_residual(&spec, w, t);
        assert!((r.re - re).abs() < 1e-12 && (r.im - im).abs() < 1e-12);
        // the opposite sign on that term is off by 2 k w sin(p) sin(T)
        let flipped = re - 2.0 * k * w * sp * st;
        assert!((r.re - flipped).abs() > 1e-3);
    }
}

#[test]
fn exact_characteristic_equation_by_hand() {
    // lambda^2 + c1 lambda + c0 - eps k exp(-lambda T) at lambda = i w
    for spec in specs() {
        let (c1, c0) = match spec.kind {
            SystemKind::Duffing => (spec.epsilon * spec.alpha, 1.0),
            SystemKind::VanDerPol => (-spec.epsilon, 1.0),
            SystemKind::ErneuxGrasman => (-spec.epsilon, 1.0 + spec.epsilon * spec.k),
        };
        for &(w, t) in &[(0.9, 0.5), (1.2, 2.4)] {
            let l = Complex64::new(0.0, w);
            let v = l * l + c1 * l + c0 - spec.epsilon * spec.k * (-l * t).exp();
            let r = ExactChar::new(spec).residual(w, t);
            assert!((r.re - v.re).abs() < 1e-14 && (r.im - v.im).abs() < 1e-14);
        }
    }
}

#[test]
fn harmonic_energy_is_conserved() {
    let spec = SystemSpec::duffing(1.0, 0.0, 0.0, 0.0);
    let tr = integrate(&spec, 0.0, &History::Constant(1.0), 0.01, 100.0).unwrap();
    let drift = tr
        .x
        .iter()
        .zip(&tr.v)
        .map(|(x, v)| (x * x + v * v - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(drift < 1e-6, "{drift:e}");
}

#[test]
fn rk4_error_ratio_under_halving() {
    let spec = SystemSpec::duffing(1.0, 0.0, 0.0, 0.0);
    let err = |dt: f64| {
        let tr = integrate(&spec, 0.0, &History::Constant(1.0), dt, 20.0).unwrap();
        let n = tr.len() - 1;
        (tr.x[n] - tr.t[n].cos()).abs()
    };
    let errs = [err(0.02), err(0.01), err(0.005)];
    for w in errs.windows(2) {
        let f = w[0] / w[1];
        assert!((12.0..=20.0).contains(&f), "factor {f}");
    }
}

#[test]
fn delayed_harmonic_matches_the_method_of_steps_by_hand() {
    // x'' + x = eps k x(t - T) with constant history 1: on [0, T] the forcing
    // is constant, so x = c + (1 - c) cos t with c = eps k
    let spec = SystemSpec::duffing(0.5, 0.0, 0.0, 0.4);
    let delay = 3.0;
    let tr = integrate(&spec, delay, &History::Constant(1.0), 0.01, delay).unwrap();
    let c = 0.2;
    for (t, x) in tr.t.iter().zip(&tr.x) {
        assert!((x - (c + (1.0 - c) * t.cos())).abs() < 1e-9);
    }
}

#[test]
fn duffing_slow_flow_damping() {
    let a = 0.05;
    let spec = SystemSpec::duffing(0.5, a, 0.0, 0.0);
    let sf = integrate_slowflow(&spec, 1.0, PlaneState::new(1.0, 0.0), 0.01, 10.0, SlowFlowMode::Delayed).unwrap();
    let n = sf.a.len() - 1;
    let expected = (-a * sf.eta[n] / 2.0).exp();
    assert!(((sf.a[n] - expected) / expected).abs() < 1e-4);

    // with cubic stiffness the amplitude still decays at the same rate
    let spec = SystemSpec::duffing(0.5, a, 1.0, 0.0);
    let sf = integrate_slowflow(&spec, 1.0, PlaneState::new(1.0, 0.0), 0.01, 10.0, SlowFlowMode::Delayed).unwrap();
    let r = sf.a[n].hypot(sf.b[n]);
    assert!(((r - expected) / expected).abs() < 1e-4);
}

#[test]
fn vdp_slow_flow_reaches_radius_two() {
    let spec = SystemSpec::van_der_pol(0.1, 0.0);
    let sf = integrate_slowflow(&spec, 0.0, PlaneState::new(0.1, 0.05), 0.01, 60.0, SlowFlowMode::Delayed).unwrap();
    let n = sf.a.len() - 1;
    assert!((sf.a[n].powi(2) + sf.b[n].powi(2) - 4.0).abs() < 1e-6);
}

#[test]
fn duffing_slow_flow_stability_changes_at_the_lower_delay() {
    let spec = SystemSpec::duffing(0.5, 0.05, 1.0, 1.0);
    let t_cr = approach2_branch(&spec, Branch::Lower, 0).unwrap().delay;
    assert!((t_cr - 2.5539).abs() < 1e-4);
    let radius = |delay: f64| {
        let sf = integrate_slowflow(&spec, delay, PlaneState::new(1e-3, 0.0), 0.01, 300.0, SlowFlowMode::Delayed)
            .unwrap();
        let n = sf.a.len() - 1;
        sf.a[n].hypot(sf.b[n])
    };
    assert!(radius(t_cr - 0.05) < 1e-3);
    assert!(radius(t_cr + 0.05) > 1e-3);
}

#[test]
fn approach1_dynamics_use_the_undelayed_flow() {
    // with the delay ignored, the slow-flow trace at T gives the growth rate
    let spec = SystemSpec::van_der_pol(0.5, 2.0);
    let delay = 1.2;
    let (tr, _) = hopf::approach1_trace_det(&spec, delay);
    let sf = integrate_slowflow(&spec, delay, PlaneState::new(1e-6, 0.0), 0.01, 5.0, SlowFlowMode::Undelayed).unwrap();
    let n = sf.a.len() - 1;
    let growth = (sf.a[n].hypot(sf.b[n]) / 1e-6).ln() / sf.eta[n];
    assert!((growth - tr / 2.0).abs() < 1e-6, "{growth} vs {}", tr / 2.0);
}

#[test]
fn classification_examples() {
    let tol = ClassifyTolerances::default();
    let tr = integrate(&SystemSpec::duffing(0.5, 0.05, 1.0, 0.0), 0.0, &History::Constant(0.5), 0.05, 800.0).unwrap();
    assert_eq!(classify_long_run(&tr, 0.25, &tol).unwrap(), LongRunClass::DecayToOrigin);

    let tr = integrate(&SystemSpec::van_der_pol(0.1, 0.0), 1.3, &History::Constant(0.1), 0.05, 1000.0).unwrap();
    match classify_long_run(&tr, 0.25, &tol).unwrap() {
        LongRunClass::LimitCycle { amplitude } => assert!((amplitude - 2.0).abs() < 0.1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn strong_delayed_feedback_escapes_without_oscillating() {
    // the origin is a saddle once eps k > 1
    let spec = SystemSpec::van_der_pol(0.5, 2.1);
    let tr = integrate(&spec, 0.4, &History::Constant(0.1), 0.01, 1000.0).unwrap();
    assert!(!tr.overflow);
    let crossing = tr.x.iter().position(|x| x.abs() > 10.0).expect("|x| passes 10");
    assert!(tr.t[crossing] < 1000.0);
    // still rising at the end of the run
    let n = tr.len() - 1;
    assert!(tr.x[n] > tr.x[n - 2000]);
    assert_eq!(
        classify_long_run(&tr, 0.25, &ClassifyTolerances::default()).unwrap(),
        LongRunClass::Growth
    );
}

#[test]
fn bisection_examples() {
    let opts = DetectOptions::default();
    let spec = SystemSpec::van_der_pol(0.1, 2.0);
    let up = detect_hopf_bisection(&spec, 2.0, 2.0, 2.8, 1e-3, &opts).unwrap();
    assert!((up.delay - 2.378).abs() < 0.05);
    assert_eq!(up.branch, Branch::Upper);
    assert!((up.omega - 1.0809).abs() < 0.01, "{}", up.omega);

    let duffing = SystemSpec::duffing(0.5, 0.05, 1.0, 0.04);
    assert!(matches!(
        detect_hopf_bisection(&duffing, 0.04, 0.5, 6.0, 1e-3, &opts),
        Err(Error::NoCrossing { .. })
    ));
    assert!(matches!(
        detect_hopf_bisection(&spec, 2.0, 1.0, 0.3, 1e-3, &opts),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn bisection_tracks_the_exact_roots() {
    let opts = DetectOptions::default();
    let tol = 1e-3;
    for k in [1.5, 3.0] {
        let spec = SystemSpec::van_der_pol(0.1, k);
        for branch in Branch::BOTH {
            let seed = hopf_delay::charsolve::initial_guess(&spec, branch, hopf_delay::charsolve::Target::ExactChar).unwrap();
            let exact = hopf_delay::charsolve::newton_solve(&ExactChar::new(spec), seed, 50, 1e-12).unwrap();
            let p = detect_hopf_bisection(&spec, k, exact.delay - 0.3, exact.delay + 0.3, tol, &opts).unwrap();
            assert!((p.delay - exact.delay).abs() < tol + 0.02, "k={k} {branch}: {} vs {}", p.delay, exact.delay);
            assert_eq!(p.branch, branch);
        }
    }
}
