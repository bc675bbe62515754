mod common;

use common::{enumerate_lp, Oracle};
use proptest::prelude::*;
use twrc::lp::{is_feasible, solve_lp, LinearProgram, LpStatus};

fn quarter(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo..=hi).prop_map(|v| v as f64 * 0.25)
}

/// `(objective, rows, rhs)` with up to 5 variables and 8 rows.
fn small_lp() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..=5, 1usize..=8).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(quarter(-8, 12), n),
            prop::collection::vec(prop::collection::vec(quarter(-12, 16), n), m),
            prop::collection::vec(quarter(-8, 40), m),
        )
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matches_vertex_enumeration((obj, rows, rhs) in small_lp()) {
        let lp = LinearProgram::new(obj.clone(), &rows, rhs.clone()).unwrap();
        let sol = solve_lp(&lp).unwrap();
        match (sol.status, enumerate_lp(&obj, &rows, &rhs)) {
            (LpStatus::Optimal, Oracle::Optimal(v)) => {
                prop_assert!(close(sol.value, v), "solver {} vs oracle {}", sol.value, v);
                prop_assert!(lp.max_violation(&sol.point) <= 1e-9 * (1.0 + rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()))));
            }
            (LpStatus::Infeasible, Oracle::Infeasible) | (LpStatus::Unbounded, Oracle::Unbounded) => {}
            (got, want) => prop_assert!(false, "solver {got:?}, oracle {want:?}"),
        }
        prop_assert_eq!(is_feasible(&lp).unwrap(), sol.status != LpStatus::Infeasible);
    }

    #[test]
    fn objective_scaling_scales_value((obj, rows, rhs) in small_lp(), k in 0.1f64..50.0) {
        let base = solve_lp(&LinearProgram::new(obj.clone(), &rows, rhs.clone()).unwrap()).unwrap();
        let scaled_obj: Vec<f64> = obj.iter().map(|c| c * k).collect();
        let scaled = solve_lp(&LinearProgram::new(scaled_obj, &rows, rhs.clone()).unwrap()).unwrap();
        prop_assert_eq!(base.status, scaled.status);
        if base.is_optimal() {
            prop_assert!(close(base.value * k, scaled.value));
        }
    }

    #[test]
    fn redundant_rows_change_nothing((obj, rows, rhs) in small_lp(), pick in any::<prop::sample::Index>(), slack in 0.0f64..5.0) {
        let base = solve_lp(&LinearProgram::new(obj.clone(), &rows, rhs.clone()).unwrap()).unwrap();
        let i = pick.index(rows.len());
        let mut more_rows = rows.clone();
        let mut more_rhs = rhs.clone();
        // A scaled copy of an existing row, loosened, is implied by it.
        more_rows.push(rows[i].iter().map(|v| 2.0 * v).collect());
        more_rhs.push(2.0 * rhs[i] + slack);
        let extended = solve_lp(&LinearProgram::new(obj, &more_rows, more_rhs).unwrap()).unwrap();
        prop_assert_eq!(base.status, extended.status);
        if base.is_optimal() {
            prop_assert!(close(base.value, extended.value));
        }
    }
}

#[test]
fn degenerate_vertex_with_small_coefficients() {
    // Several rows meet at the origin and one capacity is tiny.
    let rows = vec![
        vec![1.0, 0.0, -7.568_947_685_645_718, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, -1.476_906_538_100_471e-4, 0.0],
        vec![0.0, 1.0, -1.476_906_538_100_471e-4, 0.0, 0.0],
        vec![1.0, 1.0, -7.568_948_463_493_892, 0.0, 0.0],
        vec![-1.0, 1.0, 0.0, 0.0, -7.568_947_685_645_718],
        vec![0.0, 0.0, 1.0, 1.0, 1.0],
        vec![0.0, 0.0, -1.0, -1.0, -1.0],
        vec![1.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0],
        vec![-3.595_751_225_948_334, -6.751_291_334_629_059, 0.0, 0.0, 0.0],
    ];
    let rhs = vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 3.595_751_225_948_334, 6.751_291_334_629_059, -9.970_821_754_822_301e-4];
    let lp = LinearProgram::new(vec![1.0, 1.0, 0.0, 0.0, 0.0], &rows, rhs.clone()).unwrap();
    let sol = solve_lp(&lp).unwrap();
    assert!(sol.is_optimal());
    assert!(lp.max_violation(&sol.point) < 1e-12);
    match enumerate_lp(lp.objective(), &rows, &rhs) {
        Oracle::Optimal(v) => assert!(close(sol.value, v), "{} vs {v}", sol.value),
        other => panic!("oracle says {other:?}"),
    }
}
