use minkprob_core::pogorelov::{check_lower_bound, determinant, halton_ball, search_beta, LowerBoundOptions, PogorelovFn};
use proptest::prelude::*;

/// `det Hess f = (32/27)β⁴(1 + βx₁²)(1 − 7βx₁²)` for `d = 3, k = 2`,
/// obtained by symbolic differentiation; independent of the `r` variable.
fn symbolic_det(beta: f64, x1: f64) -> f64 {
    32.0 / 27.0 * beta.powi(4) * (1.0 + beta * x1 * x1) * (1.0 - 7.0 * beta * x1 * x1)
}

#[test]
fn frozen_determinants() {
    assert!((symbolic_det(1.0, 0.1) - 1.113_244_444_444_444_3).abs() < 1e-12);
    assert!((symbolic_det(2.0, 0.2) - 9.011_2).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn finite_difference_hessian_matches_symbolic(
        beta in 1.0..4.0f64,
        x1 in -0.8..0.8f64,
        r in 0.1..0.8f64,
        phi in 0.0..std::f64::consts::TAU,
    ) {
        let f = PogorelovFn::new(3, 2, beta).unwrap();
        let x = [x1, r * phi.cos(), r * phi.sin()];
        let det = determinant(f.hessian_fd(&x, 1e-4));
        let exact = symbolic_det(beta, x1);
        prop_assert!((det - exact).abs() < 1e-3 * (1.0 + exact.abs()), "{det} vs {exact}");
    }

    #[test]
    fn vanishes_exactly_on_the_flat_set(x1 in -1.0..1.0f64, y in prop::array::uniform2(-0.7..0.7f64), beta in 1.0..16.0f64) {
        let f = PogorelovFn::new(3, 2, beta).unwrap();
        prop_assert_eq!(f.eval(&[x1, 0.0, 0.0]), 0.0);
        if y[0] != 0.0 || y[1] != 0.0 {
            prop_assert!(f.eval(&[x1, y[0], y[1]]) > 0.0);
        }
    }
}

#[test]
fn radial_slope_vanishes_at_the_flat_set() {
    let f = PogorelovFn::new(3, 2, 1.0).unwrap();
    let slopes: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&r| f.radial_slope(r)).collect();
    // slope ∝ r^{1/3}: each hundredfold step divides it by 100^{1/3}
    for w in slopes.windows(2) {
        assert!((w[0] / w[1] - 100f64.powf(1.0 / 3.0)).abs() < 1e-3, "{slopes:?}");
    }
    assert!(slopes[2] < 0.02);
}

#[test]
fn positive_density_on_the_slab() {
    // positive wherever 7βx₁² < 1: on the ball of radius 1/√(7β)
    let opts = LowerBoundOptions {
        samples: 5000,
        radius: 0.99 / 7f64.sqrt(),
        ..LowerBoundOptions::default()
    };
    let f = PogorelovFn::new(3, 2, 1.0).unwrap();
    let rep = check_lower_bound(&f, 0.0, &opts);
    assert!(rep.holds && rep.min_det > 0.0, "{rep:?}");
    assert_eq!(rep.flat_max, 0.0);
}

#[test]
fn unit_ball_minimum_is_negative_for_every_beta() {
    let opts = LowerBoundOptions {
        samples: 4000,
        ..LowerBoundOptions::default()
    };
    let s = search_beta(3, 2, 0.0, &opts).unwrap();
    assert_eq!(s.beta, None);
    for r in &s.reports {
        let x1 = r.argmin[0];
        assert!(r.min_det < 0.0);
        assert!((r.min_det - symbolic_det(r.beta, x1)).abs() < 1e-3 * r.min_det.abs());
    }
}

#[test]
fn sampling_is_reproducible() {
    let a = halton_ball(3, 500, 1.0, 0);
    assert_eq!(a, halton_ball(3, 500, 1.0, 0));
    assert_ne!(a, halton_ball(3, 500, 1.0, 1));
    assert!(a.iter().all(|p| p.iter().map(|v| v * v).sum::<f64>() < 1.0));
    let f = PogorelovFn::new(3, 2, 2.0).unwrap();
    let opts = LowerBoundOptions {
        samples: 500,
        ..LowerBoundOptions::default()
    };
    assert_eq!(check_lower_bound(&f, 0.0, &opts), check_lower_bound(&f, 0.0, &opts));
}
