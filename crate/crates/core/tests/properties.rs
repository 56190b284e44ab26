use hartmann_core::estimates::{hardy_check_profile, running_sup, CheckVerdict, HardyVariant};
use hartmann_core::grid::{deriv_x, deriv_y, Field, GridSpec, YProfile};
use hartmann_core::io::Snapshot;
use hartmann_core::outer::OuterFlow;
use hartmann_core::solver::{divergence_residual, Params, State};
use proptest::prelude::*;

fn smooth_field(g: GridSpec, a: f64, b: f64, k: u32, rate: f64) -> Field {
    Field::from_fn(g, move |x, y| {
        (a + b * (k as f64 * x).sin()) * (-rate * y).exp() * (1.0 + 0.3 * y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hardy_holds_for_decaying_profiles(
        a in 0.6f64..2.0,
        c0 in -1.0f64..1.0,
        c1 in -1.0f64..1.0,
        lambda in 0.0f64..2.0,
    ) {
        let f = YProfile::from_fn(2048, 40.0, move |y| (-a * y).exp() * (c0 + c1 * y));
        let v = hardy_check_profile(&f, lambda, HardyVariant::Decay, 1e-3).unwrap();
        prop_assert!(v.pass, "{v:?}");
    }

    #[test]
    fn deriv_x_is_linear(
        a in -1.0f64..1.0, b in -1.0f64..1.0, k in 1u32..4, rate in 0.5f64..2.0, c in -3.0f64..3.0,
    ) {
        let g = GridSpec::new(32, 64, 20.0).unwrap();
        let f = smooth_field(g, a, b, k, rate);
        let h = smooth_field(g, b, a, k + 1, rate);
        let lhs = deriv_x(&(&f + &h.scale(c)), 1).unwrap();
        let rhs = &deriv_x(&f, 1).unwrap() + &deriv_x(&h, 1).unwrap().scale(c);
        let diff = (&lhs - &rhs).max_abs();
        prop_assert!(diff <= 1e-12 * (1.0 + rhs.max_abs()), "{diff}");
    }

    #[test]
    fn x_and_y_derivatives_commute(
        a in -1.0f64..1.0, b in -1.0f64..1.0, k in 1u32..4, rate in 0.5f64..2.0,
    ) {
        let g = GridSpec::new(32, 64, 20.0).unwrap();
        let f = smooth_field(g, a, b, k, rate);
        let xy = deriv_y(&deriv_x(&f, 1).unwrap(), 1).unwrap();
        let yx = deriv_x(&deriv_y(&f, 1).unwrap(), 1).unwrap();
        let diff = (&xy - &yx).max_abs();
        prop_assert!(diff <= 1e-11 * (1.0 + xy.max_abs()), "{diff}");
    }

    #[test]
    fn running_sup_is_monotone_and_dominates(values in prop::collection::vec(-1e3f64..1e3, 1..64)) {
        let s = running_sup(&values);
        prop_assert_eq!(s.len(), values.len());
        for i in 0..s.len() {
            prop_assert!(s[i] >= values[i]);
            if i > 0 {
                prop_assert!(s[i] >= s[i - 1]);
            }
        }
    }

    #[test]
    fn verdict_follows_tolerance_rule(lhs in 0.0f64..10.0, rhs in 0.01f64..10.0, tol in 0.0f64..0.1) {
        let v = CheckVerdict::new("p", lhs, rhs, tol);
        prop_assert_eq!(v.pass, lhs <= rhs * (1.0 + tol));
        prop_assert!((v.ratio - lhs / rhs).abs() <= 1e-15 * v.ratio.abs().max(1.0));
    }

    #[test]
    fn recovered_velocity_is_divergence_free(a in -1.0f64..1.0, b in -0.5f64..0.5, k in 1u32..4) {
        let g = GridSpec::new(16, 64, 20.0).unwrap();
        let outer = OuterFlow::sinusoidal(0.1);
        let p = Params::default();
        let s = State::from_vorticity(smooth_field(g, 1.0 + 0.1 * a, 0.1 * b, k, 1.0), &outer, 0.0, &p);
        prop_assert!(divergence_residual(&s.u, &s.v) <= 1e-12);
    }

    #[test]
    fn snapshot_round_trip_is_exact(a in -1.0f64..1.0, b in -1.0f64..1.0, t in 0.0f64..1.0) {
        let g = GridSpec::new(8, 16, 10.0).unwrap();
        let outer = OuterFlow::constant(1.0);
        let p = Params::default();
        let s = State::from_vorticity(smooth_field(g, 1.0 + a.abs(), b, 2, 1.0), &outer, t, &p);
        let snap = Snapshot::from_state(&s, &p);
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        let back = Snapshot::read_from(buf.as_slice()).unwrap();
        prop_assert_eq!(back, snap);
    }
}
