mod common;

use proptest::prelude::*;
use twrc::broadcast::{bc_boundary, BcChannel};
use twrc::channel::{capacity, db_to_linear, ChannelState};
use twrc::region::{direction_grid, RegionSolver};
use twrc::scheme::{scheme_constraints, ConstraintSet, PowerSplit, Scheme};

const ALL: [Scheme; 7] = [
    Scheme::TWO_STEP_XOR,
    Scheme::TWO_STEP_SUP,
    Scheme::TWO_STEP_SUX,
    Scheme::FOUR_STEP_XOR,
    Scheme::FOUR_STEP_SUP,
    Scheme::FOUR_STEP_SUX,
    Scheme::MabcCapacity,
];

fn snr() -> impl Strategy<Value = f64> {
    (-10.0f64..30.0).prop_map(db_to_linear)
}

fn reciprocal_channel() -> impl Strategy<Value = ChannelState> {
    (snr(), snr(), snr()).prop_map(|(a, b, c)| ChannelState::reciprocal(a, b, c).unwrap())
}

fn channel() -> impl Strategy<Value = ChannelState> {
    prop_oneof![
        reciprocal_channel(),
        (snr(), snr(), snr(), snr(), snr(), snr())
            .prop_map(|(a, b, c, d, e, f)| ChannelState::new(a, b, c, d, e, f).unwrap()),
    ]
}

fn coarse() -> RegionSolver {
    RegionSolver::with_theta_grid(33)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn regions_are_bounded_by_link_capacities(ch in channel()) {
        let s = coarse();
        let c = |g: f64| capacity(g).unwrap();
        for scheme in ALL {
            let r0 = s.support(scheme, &ch, [1.0, 0.0]).unwrap().value;
            let r2 = s.support(scheme, &ch, [0.0, 1.0]).unwrap().value;
            prop_assert!(r0 >= 0.0 && r2 >= 0.0);
            prop_assert!(r0 <= c(ch.g01()) + c(ch.g02()) + 1e-9, "{scheme}: R0 {r0}");
            prop_assert!(r2 <= c(ch.g21()) + c(ch.g20()) + 1e-9, "{scheme}: R2 {r2}");
        }
    }

    #[test]
    fn relabeling_sources_mirrors_the_region(ch in channel(), phi in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let s = coarse();
        let w = [phi.cos(), phi.sin()];
        for scheme in ALL {
            let a = s.support(scheme, &ch, w).unwrap().value;
            let b = s.support(scheme, &ch.swapped(), [w[1], w[0]]).unwrap().value;
            // The two LPs differ by a column permutation, so rounding can
            // steer the θ refinement apart by up to its tolerance.
            prop_assert!((a - b).abs() <= 1e-7 * a.max(1.0), "{scheme}: {a} vs {b}");
        }
    }

    #[test]
    fn support_is_positively_homogeneous(ch in reciprocal_channel(), phi in 0.0f64..1.5, k in 0.01f64..100.0) {
        let s = coarse();
        let w = [phi.cos(), phi.sin()];
        for scheme in ALL {
            let a = s.support(scheme, &ch, w).unwrap().value;
            let b = s.support(scheme, &ch, [k * w[0], k * w[1]]).unwrap().value;
            prop_assert!((k * a - b).abs() <= 1e-9 * b.abs().max(1.0), "{scheme}: {a} x {k} vs {b}");
        }
    }

    #[test]
    fn containment_and_nesting(ch in reciprocal_channel()) {
        let s = coarse();
        let h = |scheme: Scheme, w: [f64; 2]| s.support(scheme, &ch, w).unwrap().value;
        for w in direction_grid(19) {
            for (outer, inner) in [
                (Scheme::TWO_STEP_SUX, Scheme::TWO_STEP_XOR),
                (Scheme::TWO_STEP_SUX, Scheme::TWO_STEP_SUP),
                (Scheme::FOUR_STEP_SUX, Scheme::FOUR_STEP_XOR),
                (Scheme::FOUR_STEP_SUX, Scheme::FOUR_STEP_SUP),
                (Scheme::MabcCapacity, Scheme::TWO_STEP_SUX),
                (Scheme::FOUR_STEP_XOR, Scheme::TWO_STEP_XOR),
                (Scheme::FOUR_STEP_SUP, Scheme::TWO_STEP_SUP),
                (Scheme::FOUR_STEP_SUX, Scheme::TWO_STEP_SUX),
            ] {
                let (o, i) = (h(outer, w), h(inner, w));
                prop_assert!(o >= i - 1e-6, "{outer} {o} < {inner} {i} at {w:?}");
            }
        }
    }

    #[test]
    fn boundary_points_are_achievable(ch in reciprocal_channel(), pick in 0usize..7) {
        let scheme = ALL[pick];
        let s = coarse();
        let region = s.boundary(scheme, &ch, 25).unwrap();
        for sample in &region.samples {
            let [r0, r2] = sample.point;
            let w = sample.direction;
            prop_assert!((w[0] * r0 + w[1] * r2 - sample.value).abs() <= 1e-9 * sample.value.max(1.0));
            let set = scheme_constraints(scheme, &ch, sample.theta.map(|t| PowerSplit::new(t).unwrap())).unwrap();
            prop_assert!(set.admits(r0, r2, 1e-6).unwrap(), "{scheme}: ({r0}, {r2}) at θ = {:?}", sample.theta);
        }
        let poly = region.boundary();
        prop_assert_eq!(poly.first().unwrap()[0], 0.0);
        prop_assert_eq!(poly.last().unwrap()[1], 0.0);
        for pair in poly.windows(2) {
            prop_assert!(pair[1][0] >= pair[0][0] && pair[1][1] <= pair[0][1], "not monotone: {pair:?}");
        }
    }

    #[test]
    fn finer_theta_grid_never_shrinks_the_region(ch in reciprocal_channel()) {
        for scheme in [Scheme::TWO_STEP_SUP, Scheme::TWO_STEP_SUX, Scheme::FOUR_STEP_SUX] {
            let a = RegionSolver::with_theta_grid(17).boundary(scheme, &ch, 13).unwrap();
            let b = RegionSolver::with_theta_grid(33).boundary(scheme, &ch, 13).unwrap();
            for (x, y) in a.support_values().zip(b.support_values()) {
                prop_assert!(y >= x - 1e-6, "{scheme}: {y} < {x}");
            }
        }
    }

    #[test]
    fn allocation_respects_caps_and_region(ch in reciprocal_channel(), q0 in 0.0f64..20.0, q2 in 0.0f64..20.0) {
        let s = coarse();
        for scheme in [Scheme::TWO_STEP_XOR, Scheme::TWO_STEP_SUX, Scheme::FOUR_STEP_SUP] {
            let a = s.queue_weighted_allocation(scheme, &ch, q0, q2).unwrap();
            prop_assert!(a.r0 >= 0.0 && a.r0 <= q0 && a.r2 >= 0.0 && a.r2 <= q2);
            let theta = a.theta.map(|t| PowerSplit::new(t).unwrap());
            let theta = if scheme.uses_theta() { theta.or(Some(PowerSplit::new(0.0).unwrap())) } else { None };
            let set = scheme_constraints(scheme, &ch, theta).unwrap();
            prop_assert!(set.admits(a.r0, a.r2, 1e-6).unwrap());
            let value = q0 * a.r0 + q2 * a.r2;
            let h0 = s.support(scheme, &ch, [1.0, 0.0]).unwrap().value;
            let h2 = s.support(scheme, &ch, [0.0, 1.0]).unwrap().value;
            prop_assert!(value >= q0 * q0.min(h0) - 1e-6 * value.max(1.0));
            prop_assert!(value >= q2 * q2.min(h2) - 1e-6 * value.max(1.0));
        }
    }
}

fn max_over(set: &ConstraintSet, w: [f64; 2]) -> f64 {
    let sol = twrc::lp::solve_lp(&set.program(w).unwrap()).unwrap();
    assert!(sol.is_optimal());
    sol.value
}

#[test]
fn sux_at_full_common_power_is_xor_without_private_broadcast() {
    let channels = [
        ChannelState::reciprocal(20.0, 0.5, 3.0).unwrap(),
        ChannelState::reciprocal(2.0, 0.1, 9.0).unwrap(),
        ChannelState::new(5.0, 7.0, 0.3, 0.2, 1.5, 2.5).unwrap(),
    ];
    for ch in channels {
        let sux = scheme_constraints(Scheme::TWO_STEP_SUX, &ch, Some(PowerSplit::new(1.0).unwrap())).unwrap();
        let mut xor = scheme_constraints(Scheme::TWO_STEP_XOR, &ch, None).unwrap();
        let mut row = vec![0.0; xor.num_vars()];
        row[xor.lambda_index(3)] = 1.0;
        xor.push_row(&row, 0.0);
        // Both systems share their MAC rows; SuX adds one broadcast row that
        // the others imply, so the regions coincide.
        for w in direction_grid(37) {
            let (a, b) = (max_over(&sux, w), max_over(&xor, w));
            assert!((a - b).abs() < 1e-12, "{ch:?} {w:?}: {a} vs {b}");
        }
    }
}

#[test]
fn broadcast_arc_is_the_sux_frontier() {
    // With strong uplinks the broadcast rows bind. A point (x, y) of the arc
    // is reached by giving the broadcast step a share k and the uplink the
    // rest, where k is the largest share the uplink still supports.
    let (g10, g12) = (db_to_linear(13.17), db_to_linear(5.55));
    let ch = ChannelState::new(1e6, g10, 1e-3, 1e-3, g12, 1e6).unwrap();
    let c = ch.capacities();
    let bc = bc_boundary(&BcChannel::new(g10, g12).unwrap(), 41).unwrap();
    for &(theta, [x, y]) in &bc.arc {
        let m = (x / c.c01).max(y / c.c21).max((x + y) / c.cm);
        let k = 1.0 / (1.0 + m);
        let set = scheme_constraints(Scheme::TWO_STEP_SUX, &ch, Some(PowerSplit::new(theta).unwrap())).unwrap();
        assert!(set.admits(k * x, k * y, 1e-9).unwrap(), "arc point at θ = {theta}");
        let (px, py) = (k * (x + 1e-3), k * (y + 1e-3));
        for t in (0..=200).map(|i| i as f64 / 200.0) {
            let other = scheme_constraints(Scheme::TWO_STEP_SUX, &ch, Some(PowerSplit::new(t).unwrap())).unwrap();
            assert!(!other.admits(px, py, 0.0).unwrap(), "pushed point admitted at θ = {t}");
        }
    }
}
