use nalgebra::DMatrix;
use proptest::prelude::*;

use quasiproj::conditions::{strang_fix_order_with_tol, weak_compat_order};
use quasiproj::harness::{rate_fit, two_sided_ratio};
use quasiproj::smoothness::{best_approx, fractional_difference, omega};
use quasiproj::{AnalysisFunctional, AxisBox, DilationMatrix, Generator, Grid, OperatorSpec, TestFunction};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(32))]

    #[test]
    fn fit_recovers_geometric_slope(slope in -4.0f64..2.0, c in 0.1f64..10.0, j0 in 0i32..4) {
        let pts: Vec<(f64, f64)> = (j0..j0 + 5).map(|j| (j as f64, c * 2f64.powf(slope * j as f64))).collect();
        let f = rate_fit(&pts).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-9);
        prop_assert!(f.residual < 1e-9);
    }

    #[test]
    fn ratio_scales(vals in prop::collection::vec(1e-6f64..1.0, 1..8), k in 0.1f64..10.0) {
        let e: Vec<f64> = vals.iter().map(|v| k * v).collect();
        let r = two_sided_ratio(&e, &vals).unwrap();
        prop_assert!((r.min - k).abs() <= 1e-12 * k);
        prop_assert!((r.max - k).abs() <= 1e-12 * k);
    }

    #[test]
    fn integer_difference_of_polynomial_vanishes(h in -2.0f64..2.0, x in -3.0f64..3.0, a in -2.0f64..2.0) {
        // Δ_h² kills affine functions
        let f = TestFunction::linear(vec![a]);
        let d = fractional_difference(&f, &[h], 2.0, &[x], 64);
        prop_assert!(d.value.norm() < 1e-12 * (1.0 + a.abs() * (x.abs() + 2.0 * h.abs())));
    }

    #[test]
    fn operator_is_linear(c in -3.0f64..3.0, x in -1.0f64..1.0) {
        let q = OperatorSpec::new(
            Generator::bspline(2, 1).unwrap(),
            AnalysisFunctional::Dirac { dim: 1 },
            DilationMatrix::scalar(1, 2.0).unwrap(),
            2,
        )
        .unwrap();
        let g = TestFunction::gaussian(1);
        let scaled = TestFunction::new("scaled", 1, std::sync::Arc::new({
            let g = g.clone();
            move |y: &[f64]| g.eval(y) * c
        }));
        let a = q.evaluate_spatial(&scaled, &[x], 8).unwrap().value;
        let b = q.evaluate_spatial(&g, &[x], 8).unwrap().value * c;
        prop_assert!((a - b).norm() < 1e-13);
    }
}

proptest! {
    #![proptest_config(cases(6))]

    #[test]
    fn modulus_translation_invariant(shift in -2.0f64..2.0) {
        let grid = Grid::new(AxisBox::cube(1, 9.0), 901).unwrap();
        let f = TestFunction::gaussian(1);
        let g = f.translated(&[shift]).unwrap();
        let a = omega(&f, 1.0, 0.5, 2.0, &grid).unwrap().value;
        let b = omega(&g, 1.0, 0.5, 2.0, &grid).unwrap().value;
        prop_assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn best_approx_decreases(a in 0.5f64..4.0, factor in 1.1f64..3.0) {
        let grid = Grid::new(AxisBox::cube(1, 2.0), 11).unwrap();
        let f = TestFunction::gaussian(1);
        let e1 = best_approx(&f, &DMatrix::from_element(1, 1, a), 2.0, &grid).unwrap().ln_value;
        let e2 = best_approx(&f, &DMatrix::from_element(1, 1, a * factor), 2.0, &grid).unwrap().ln_value;
        prop_assert!(e2 <= e1);
    }

    #[test]
    fn strang_fix_monotone_in_tolerance(n in 1u32..4, t1 in -10.0f64..0.0, dt in 0.0f64..4.0) {
        let g = Generator::bspline(n, 1).unwrap();
        let lo = strang_fix_order_with_tol(&g, 6, 1, 10f64.powf(t1)).unwrap();
        let hi = strang_fix_order_with_tol(&g, 6, 1, 10f64.powf(t1 + dt)).unwrap();
        prop_assert!(hi >= lo);
    }
}

#[test]
fn even_symbols_pass_odd_orders() {
    // weak order is even for real even symbols: odd derivatives vanish
    for n in 1..=3 {
        let g = Generator::bspline(n, 1).unwrap();
        let w = weak_compat_order(&g, &AnalysisFunctional::BoxAverage { dim: 1 }, 6).unwrap();
        assert_eq!(w % 2, 0);
    }
}
