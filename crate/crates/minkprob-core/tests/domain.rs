use std::f64::consts::PI;

use minkprob_core::domain::{disk, hyperboloid, DirichletPolygon, DomainGrid};
use minkprob_core::lattice::{element, Lattice};
use minkprob_core::mink::{projective_action, BallPoint};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn polygon_area_is_gauss_bonnet(r in 0.0..0.3f64, t in 0.0..(2.0 * PI)) {
        let lat = Lattice::genus2();
        let p = DirichletPolygon::new(&lat, &BallPoint::new(r * t.cos(), r * t.sin()), 4).unwrap();
        prop_assert!((p.area - 4.0 * PI).abs() < 1e-8, "{}", p.area);
        prop_assert!((p.quadrature_area() - 4.0 * PI).abs() < 1e-3 * 4.0 * PI);
        prop_assert!(p.pairing_error() < 1e-9);
        prop_assert!(p.contains(disk(&p.basepoint), 0.0));
        prop_assert!(p.len() % 2 == 0);
    }

    #[test]
    fn reduction_is_a_group_move(r in 0.0..0.999f64, t in 0.0..(2.0 * PI)) {
        let lat = Lattice::genus2();
        let p = DirichletPolygon::new(&lat, &BallPoint::new(0.0, 0.0), 2).unwrap();
        let x = [r * t.cos(), r * t.sin()];
        let (y, w) = p.reduce(&lat, x).unwrap();
        prop_assert!(p.contains(y, 1e-9));
        let back = projective_action(&element(&lat, None, &w).linear, &BallPoint(y));
        let dx = hyperboloid(back.0) - hyperboloid(x);
        prop_assert!(dx.max_abs() < 1e-8 * hyperboloid(x).0[2]);
    }
}

#[test]
fn grid_points_lie_on_the_hyperboloid() {
    let lat = Lattice::genus2();
    let g = DomainGrid::new(&lat, &BallPoint::new(0.0, 0.0), 2, 6).unwrap();
    assert_eq!(g.len(), 1 + 8 * 6 * 7 / 2);
    for p in &g.points {
        assert!((p.inner(p) + 1.0).abs() < 1e-9 * p.0[2] * p.0[2]);
    }
    for k in 0..g.num_vars() {
        assert_eq!(g.var_of[g.reps[k]], k);
        assert!(g.weights[k] > 0.0 && g.spacing[k] > 0.0);
        assert!(!g.stencils[k].is_empty());
    }
}

#[test]
fn interpolation_is_exact_at_nodes() {
    let lat = Lattice::genus2();
    let g = DomainGrid::new(&lat, &BallPoint::new(0.0, 0.0), 2, 5).unwrap();
    let values: Vec<f64> = g.nodes.iter().map(|x| x[0] - 2.0 * x[1]).collect();
    for (i, x) in g.nodes.iter().enumerate() {
        if g.on_boundary(i) {
            continue;
        }
        let v = g.interpolate(&values, *x).unwrap();
        assert!((v - values[i]).abs() < 1e-12);
    }
    let mid = [0.3 * g.nodes[7][0], 0.3 * g.nodes[7][1]];
    assert!((g.interpolate(&values, mid).unwrap() - (mid[0] - 2.0 * mid[1])).abs() < 1e-12);
}
