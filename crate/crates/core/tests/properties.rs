use std::f64::consts::PI;

use hopf_delay::charsolve::{
    continuation_sweep, linspace, CharacteristicSystem, ExactChar, SlowFlowChar, Sweep, Target,
};
use hopf_delay::ddesim::History;
use hopf_delay::hopf::{self, parse_method_list, Sign};
use hopf_delay::slowflow::{cartesian_rhs, linearized_cartesian_rhs, polar_rhs, PlaneState, PolarState};
use hopf_delay::table::{
    comparison_to_csv, parse_comparison_csv, parse_curve_table, parse_trajectory_csv, ComparisonRow, CurveRow,
    CurveTable, TrajectoryRow,
};
use hopf_delay::{Branch, Method, SystemKind, SystemSpec};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = SystemKind> {
    prop_oneof![Just(SystemKind::Duffing), Just(SystemKind::VanDerPol), Just(SystemKind::ErneuxGrasman)]
}

fn spec() -> impl Strategy<Value = SystemSpec> {
    (kind(), 0.01..0.6f64, 0.0..0.5f64, -2.0..2.0f64, 0.0..3.0f64).prop_map(|(kind, epsilon, alpha, gamma, k)| {
        SystemSpec { kind, epsilon, alpha, gamma, k }
    })
}

fn polar() -> impl Strategy<Value = PolarState> {
    (0.05..3.0f64, -PI..PI).prop_map(|(r, theta)| PolarState { r, theta, eta: 0.0 })
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![
        Just(Method::ApproachI),
        Just(Method::ApproachII),
        Just(Method::ExactChar),
        Just(Method::Simulated)
    ]
}

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Lower), Just(Branch::Upper)]
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(1e-300), Just(-1.7976931348623157e308)]
}

fn curve_row() -> impl Strategy<Value = CurveRow> {
    (kind(), method(), branch(), finite(), finite(), finite(), finite(), finite(), finite()).prop_map(
        |(system, method, branch, epsilon, alpha, gamma, k, delay, omega)| CurveRow {
            system,
            method,
            branch,
            epsilon,
            alpha,
            gamma,
            k,
            delay,
            omega,
        },
    )
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn polar_and_cartesian_flows_agree(spec in spec(), delay in 0.0..12.0f64, now in polar(), past in polar()) {
        let (dr, dth) = polar_rhs(&spec, delay, &now, &past).unwrap();
        let (s, c) = now.theta.sin_cos();
        let (ea, eb) = cartesian_rhs(&spec, delay, &now.to_plane(), &past.to_plane());
        prop_assert!((c * dr - now.r * s * dth - ea).abs() < 1e-12);
        prop_assert!((s * dr + now.r * c * dth - eb).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn slow_flows_are_odd(spec in spec(), delay in 0.0..12.0f64, a in -3.0..3.0f64, b in -3.0..3.0f64,
                          ad in -3.0..3.0f64, bd in -3.0..3.0f64) {
        let (x, y) = cartesian_rhs(&spec, delay, &PlaneState::new(a, b), &PlaneState::new(ad, bd));
        let (u, v) = cartesian_rhs(&spec, delay, &PlaneState::new(-a, -b), &PlaneState::new(-ad, -bd));
        prop_assert_eq!((x, y), (-u, -v));
    }

    #[test]
    fn polar_radius_is_phase_invariant(spec in spec(), delay in 0.0..12.0f64, now in polar(), past in polar(),
                                       shift in -PI..PI) {
        // rotating both states together leaves dR and dtheta unchanged
        let (dr, dth) = polar_rhs(&spec, delay, &now, &past).unwrap();
        let rot = |p: &PolarState| PolarState { theta: p.theta + shift, ..*p };
        let (dr2, dth2) = polar_rhs(&spec, delay, &rot(&now), &rot(&past)).unwrap();
        prop_assert!((dr - dr2).abs() < 1e-12 && (dth - dth2).abs() < 1e-12);
    }

    #[test]
    fn linear_analysis_ignores_gamma(eps in 0.01..0.6f64, alpha in 0.0..0.5f64, k in 0.6..3.0f64,
                                     g1 in -2.0..2.0f64, g2 in -2.0..2.0f64, delay in 0.0..8.0f64,
                                     a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let s1 = SystemSpec::duffing(eps, alpha, g1, k);
        let s2 = SystemSpec::duffing(eps, alpha, g2, k);
        let st = PlaneState::new(a, b);
        prop_assert_eq!(linearized_cartesian_rhs(&s1, delay, &st, &st), linearized_cartesian_rhs(&s2, delay, &st, &st));
        for br in Branch::BOTH {
            let p1 = hopf::approach1_point(&s1, br, 0).unwrap();
            let p2 = hopf::approach1_point(&s2, br, 0).unwrap();
            prop_assert_eq!(p1, p2);
            prop_assert_eq!(hopf::approach2_branch(&s1, br, 0).ok(), hopf::approach2_branch(&s2, br, 0).ok());
        }
    }

    #[test]
    fn jacobians_match_finite_differences(spec in spec(), w in 0.05..2.0f64, t in 0.05..8.0f64) {
        let h = 1e-6;
        let systems: [Box<dyn CharacteristicSystem>; 2] =
            [Box::new(SlowFlowChar::new(spec)), Box::new(ExactChar::new(spec))];
        for sys in &systems {
            let j = sys.jacobian(w, t);
            let dw_p = sys.residual(w + h, t);
            let dw_m = sys.residual(w - h, t);
            let dt_p = sys.residual(w, t + h);
            let dt_m = sys.residual(w, t - h);
            let fd = [
                [(dw_p.re - dw_m.re) / (2.0 * h), (dt_p.re - dt_m.re) / (2.0 * h)],
                [(dw_p.im - dw_m.im) / (2.0 * h), (dt_p.im - dt_m.im) / (2.0 * h)],
            ];
            for r in 0..2 {
                for c in 0..2 {
                    prop_assert!(rel_close(j[r][c], fd[r][c], 1e-6), "{:?} vs {:?}", j, fd);
                }
            }
        }
    }

    #[test]
    fn approach1_branches_are_ordered(kind in kind(), eps in 0.01..0.6f64, k in 1.001..5.0f64, n in 0u32..3) {
        let spec = SystemSpec { kind, epsilon: eps, alpha: 0.05, gamma: 1.0, k };
        let (lo, hi) = hopf::approach1_delays_indexed(&spec, n).unwrap();
        prop_assert!(0.0 < lo && lo < hi);
        let (lo0, hi0) = hopf::approach1_delays(&spec).unwrap();
        prop_assert!(rel_close(lo - lo0, 2.0 * PI * f64::from(n), 1e-12));
        prop_assert!(rel_close(hi - hi0, 2.0 * PI * f64::from(n), 1e-12));
    }

    #[test]
    fn approach2_reduces_to_approach1_as_eps_vanishes(kind in kind(), k in 1.01..3.0f64) {
        let spec = SystemSpec { kind, epsilon: 1e-12, alpha: 0.05, gamma: 1.0, k };
        let (a, b) = hopf::approach1_delays(&spec).unwrap();
        let (lo, hi) = hopf::approach2_delays(&spec).unwrap();
        prop_assert!(lo.delay < hi.delay);
        let mut want = [a, b];
        want.sort_by(f64::total_cmp);
        prop_assert!((lo.delay - want[0]).abs() < 1e-9 && (hi.delay - want[1]).abs() < 1e-9);
    }

    #[test]
    fn geometric_series_converges_to_the_closed_form(kind in prop_oneof![Just(SystemKind::Duffing), Just(SystemKind::VanDerPol)],
                                                     eps in 0.01..0.5f64, k in 1.05..3.0f64, terms in 0u32..40) {
        let spec = SystemSpec { kind, epsilon: eps, alpha: 0.05, gamma: 1.0, k };
        let (t0_lo, t0_hi) = hopf::approach1_delays(&spec).unwrap();
        let (geometric, alternating, t0_g, t0_a) = match kind {
            SystemKind::Duffing => (Branch::Upper, Branch::Lower, t0_hi, t0_lo),
            _ => (Branch::Lower, Branch::Upper, t0_lo, t0_hi),
        };
        let g = hopf::approach2_branch(&spec, geometric, 0).unwrap();
        let a = hopf::approach2_branch(&spec, alternating, 0).unwrap();
        let q = eps * g.omega;
        let sum_g = hopf::series_partial_sum(t0_g, q, Sign::Plus, terms);
        let sum_a = hopf::series_partial_sum(t0_a, q, Sign::Minus, terms);
        let bound = hopf::series_truncation_bound(t0_g, q, terms) + 1e-12 * t0_g;
        prop_assert!((g.delay - sum_g).abs() <= bound);
        prop_assert!((a.delay - sum_a).abs() <= hopf::series_truncation_bound(t0_a, q, terms) + 1e-12 * t0_a);
        prop_assert!(sum_g <= g.delay * (1.0 + 1e-12));
    }

    #[test]
    fn curve_table_round_trips(rows in proptest::collection::vec(curve_row(), 0..30)) {
        let table = CurveTable::new(rows);
        let text = table.to_csv();
        let parsed = parse_curve_table(&text).unwrap();
        prop_assert_eq!(&parsed, &table);
        prop_assert_eq!(parsed.to_csv(), text);
        for w in parsed.rows().windows(2) {
            prop_assert!((w[0].method, w[0].branch) <= (w[1].method, w[1].branch));
            if (w[0].method, w[0].branch) == (w[1].method, w[1].branch) {
                prop_assert!(w[0].k <= w[1].k);
            }
        }
    }

    #[test]
    fn comparison_table_round_trips(kinds in proptest::collection::vec((kind(), method(), branch(), finite(), finite(), 0usize..10_000), 0..12)) {
        let rows: Vec<ComparisonRow> = kinds.into_iter().map(|(system, method, branch, a, b, n)| ComparisonRow {
            system, method, branch, max_abs_error: a, mean_abs_error: b, n_points: n,
        }).collect();
        let text = comparison_to_csv(&rows);
        prop_assert_eq!(parse_comparison_csv(&text).unwrap(), rows);
    }

    #[test]
    fn trajectory_text_round_trips(xs in proptest::collection::vec((finite(), finite()), 1..50)) {
        let mut text = String::from("t,x,v\n");
        let mut rows = Vec::new();
        for (i, (x, v)) in xs.into_iter().enumerate() {
            let t = i as f64 * 0.05;
            text.push_str(&format!("{t:.16e},{x:.16e},{v:.16e}\n"));
            rows.push(TrajectoryRow { t, x, v });
        }
        prop_assert_eq!(parse_trajectory_csv(&text).unwrap(), rows);
    }

    #[test]
    fn method_lists_parse_in_any_order(ms in proptest::collection::vec(method(), 1..8)) {
        let text: Vec<&str> = ms.iter().map(|m| m.as_str()).collect();
        let parsed = parse_method_list(&text.join(",")).unwrap();
        let mut want = ms.clone();
        want.sort();
        want.dedup();
        prop_assert_eq!(parsed, want);
    }

    #[test]
    fn history_specs_round_trip(v in finite()) {
        let h: History = format!("const:{v}").parse().unwrap();
        prop_assert_eq!(&h, &History::Constant(v));
        prop_assert_eq!(h.describe().parse::<History>().unwrap(), h);
    }
}

#[test]
fn exact_continuation_rows_solve_the_characteristic_equation() {
    for template in [SystemSpec::van_der_pol(0.3, 0.0), SystemSpec::duffing(0.3, 0.05, 1.0, 0.0), SystemSpec::erneux(0.1, 0.0)] {
        let from = hopf::feedback_threshold(&template) + 0.3;
        for br in Branch::BOTH {
            let curve = continuation_sweep(&template, &Sweep::over_k(from, 3.0, 60), br, Target::ExactChar).unwrap();
            assert!(!curve.points.is_empty());
            for p in &curve.points {
                let spec = template.with_k(p.sweep_value);
                assert!(ExactChar::new(spec).residual(p.point.omega, p.point.delay).norm() < 1e-9);
            }
        }
    }
    assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
}
