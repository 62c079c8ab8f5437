use std::sync::Arc;

use minkprob_core::convex::{BoundaryData, PLFunctionB};
use minkprob_core::dirichlet::{
    alexandrov_heinz_probe, comparison_check, solve_dirichlet, DirichletOptions, Init, ProbeBoundary,
};
use minkprob_core::grid::BallGrid;
use minkprob_core::measure::{ma_measure, DiscreteMeasureB};
use proptest::prelude::*;

fn grid(r: usize, a: usize) -> Arc<BallGrid> {
    Arc::new(BallGrid::new(r, a, 0.995).unwrap())
}

fn trace_of(g: &BallGrid, f: impl Fn([f64; 2]) -> f64) -> BoundaryData {
    let r = g.rho_max;
    BoundaryData::from_fn(g.angular, |t| f([r * t.cos(), r * t.sin()])).unwrap()
}

fn recover(f: fn([f64; 2]) -> f64) {
    let g = grid(24, 48);
    let exact = PLFunctionB::from_fn(g.clone(), f).unwrap();
    let mu = ma_measure(&exact).unwrap();
    let data = trace_of(&g, f);
    let opts = DirichletOptions::default();
    let a = solve_dirichlet(&mu, &data, &opts).unwrap();
    let b = solve_dirichlet(&mu, &data, &DirichletOptions { init: Init::Paraboloid(0.5), ..opts }).unwrap();
    for s in [&a, &b] {
        assert!(s.report.converged && s.report.monotone);
        assert!(s.report.max_residual <= opts.solve.tol);
        assert!(s.h.max_abs_diff(&exact) <= 2e-2, "{}", s.h.max_abs_diff(&exact));
        for (a, b) in s.h.boundary_trace().iter().zip(exact.boundary_trace()) {
            assert!((a - b).abs() < 1e-14);
        }
        let c = s.h.convexify().unwrap();
        assert!(c.max_abs_diff(&s.h) < 1e-9);
    }
    assert!(a.h.max_abs_diff(&b.h) <= 3.0 * opts.solve.tol);
}

#[test]
fn recovers_the_round_paraboloid() {
    recover(|x| 0.5 * (x[0] * x[0] + x[1] * x[1]));
}

#[test]
fn recovers_the_elliptic_paraboloid() {
    recover(|x| 0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1]));
}

#[test]
fn comparison_minimum_sits_on_the_boundary() {
    let g = grid(24, 48);
    let mu1 = DiscreteMeasureB::from_density(g.clone(), |x| 1.0 + x[0] * x[0]).unwrap();
    let mu2 = mu1.scaled(2.0).unwrap();
    let data = BoundaryData::from_fn(48, |t| 0.3 * t.cos()).unwrap();
    let opts = DirichletOptions::default();
    let h1 = solve_dirichlet(&mu1, &data, &opts).unwrap().h;
    let h2 = solve_dirichlet(&mu2, &data, &opts).unwrap().h;
    let rep = comparison_check(&h1, &h2, 2.0 * opts.solve.tol, 1e-6).unwrap();
    assert!(rep.applicable && rep.attained_on_boundary, "{rep:?}");
    // the larger measure gives the lower function
    assert!(h2.values.iter().zip(&h1.values).all(|(a, b)| a <= &(b + 1e-9)));
}

#[test]
fn alexandrov_heinz_depth_is_stable() {
    let opts = DirichletOptions::default();
    let rep = alexandrov_heinz_probe(1.0, ProbeBoundary::Zero, &[(8, 16), (12, 24), (16, 32)], 0.995, &opts).unwrap();
    assert!(rep.c > 0.3 && rep.spread < 0.2, "{rep:?}");
    let control = alexandrov_heinz_probe(0.0, ProbeBoundary::Zero, &[(8, 16)], 0.995, &opts).unwrap();
    assert!(control.levels[0].h0.abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solutions_are_convex_and_keep_their_boundary(
        c in 0.2..2.0f64,
        tilt in -0.5..0.5f64,
        amp in 0.0..0.3f64,
    ) {
        let g = grid(10, 20);
        let mu = DiscreteMeasureB::from_density(g.clone(), |x| c * (1.0 + tilt * x[0])).unwrap();
        let data = BoundaryData::from_fn(20, |t| amp * (2.0 * t).cos()).unwrap();
        let opts = DirichletOptions::default();
        let s = solve_dirichlet(&mu, &data, &opts).unwrap();
        prop_assert!(s.report.monotone && s.report.max_residual <= opts.solve.tol);
        prop_assert!(s.residuals.iter().all(|r| r.abs() <= opts.solve.tol));
        let c = s.h.convexify().unwrap();
        prop_assert!(c.max_abs_diff(&s.h) < 1e-9);
        for (k, &b) in g.boundary_ring.iter().enumerate() {
            prop_assert_eq!(s.h.values[b], data.eval(g.angle(k)));
        }
    }
}
