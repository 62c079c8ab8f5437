use std::f64::consts::PI;
use std::sync::Arc;

use minkprob_core::convex::{
    chi_map, convex_envelope_boundary, homog_extension, legendre, legendre_inverse, BoundaryData, PLFunctionB,
};
use minkprob_core::grid::BallGrid;
use minkprob_core::measure::{
    area_from_graph, area_measure, euclidean_area_measure, hessian_det_density, ma_law_checks, ma_measure,
};
use minkprob_core::mink::{lambda_of, MinkVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `½xᵀAx + ⟨q,x⟩ + e|x|⁴` with `A` positive definite.
#[derive(Clone, Copy, Debug)]
struct Smooth {
    a: [f64; 3],
    q: [f64; 2],
    e: f64,
}

impl Smooth {
    fn random(rng: &mut impl Rng) -> Self {
        let l1 = rng.gen_range(0.3..1.5);
        let l2 = rng.gen_range(0.3..1.5);
        let t: f64 = rng.gen_range(0.0..PI);
        let (c, s) = (t.cos(), t.sin());
        Smooth {
            a: [l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c],
            q: [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)],
            e: rng.gen_range(0.0..0.3),
        }
    }

    fn eval(&self, x: [f64; 2]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        0.5 * (self.a[0] * x[0] * x[0] + 2.0 * self.a[1] * x[0] * x[1] + self.a[2] * x[1] * x[1])
            + self.q[0] * x[0]
            + self.q[1] * x[1]
            + self.e * r2 * r2
    }
}

fn grid(r: usize, a: usize, rho: f64) -> Arc<BallGrid> {
    Arc::new(BallGrid::new(r, a, rho).unwrap())
}

#[test]
fn ma_total_of_half_square_norm_converges_linearly() {
    let exact = PI * 0.81;
    let mut errs = Vec::new();
    for (r, a) in [(24, 48), (48, 96), (96, 192)] {
        let g = Arc::new(BallGrid::covering(0.9, r, a).unwrap());
        let h = PLFunctionB::from_fn(g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        errs.push((ma_measure(&h).unwrap().total() - exact).abs() / exact);
    }
    assert!(errs[1] < 0.01, "{errs:?}");
    assert!(errs[1] <= 0.5 * errs[0] && errs[2] <= 0.5 * errs[1], "{errs:?}");
}

#[test]
fn area_measure_matches_the_graph_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = grid(24, 48, 0.95);
    let omega: Vec<usize> = (0..g.len()).filter(|&i| g.nodes[i][0].hypot(g.nodes[i][1]) < 0.8).collect();
    for _ in 0..5 {
        let f = Smooth::random(&mut rng);
        let h = PLFunctionB::from_fn(g.clone(), |x| f.eval(x)).unwrap();
        let a = area_measure(&h).unwrap().sum_over(&omega);
        let u = legendre(&h, 301).unwrap();
        let b = area_from_graph(&u, &g, &omega).area;
        assert!((a - b).abs() < 0.02 * a, "{f:?}: {a} vs {b}");
    }
}

#[test]
fn euclidean_and_lorentzian_areas_differ_by_the_lambda_ratio() {
    let g = grid(10, 32, 0.9);
    let h = PLFunctionB::from_fn(g.clone(), |x| 0.5 * x[0] * x[0] + x[1] * x[1] + 0.1 * x[0]).unwrap();
    let a = area_measure(&h).unwrap();
    let e = euclidean_area_measure(&h).unwrap();
    for (i, x) in g.nodes.iter().enumerate() {
        let le = (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
        let ratio = le / lambda_of(*x);
        assert!((e.mass()[i] - ratio * a.mass()[i]).abs() <= 1e-12 * (1.0 + e.mass()[i]));
    }
}

#[test]
fn density_bound_transfers_to_the_area_measure() {
    // h = ½|x|² has MA density 1; on the disk of radius r the area density is
    // λ(x) ≥ (1 − r²)^{1/2}, and per hyperbolic volume λ⁴ ≥ (1 − r²)².
    let g = grid(24, 48, 0.9);
    let h = PLFunctionB::from_fn(g.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
    let ma = ma_measure(&h).unwrap();
    let area = area_measure(&h).unwrap();
    let cells = g.cell_areas();
    let vols = g.hyperbolic_cell_volumes();
    let c = g.interior_nodes().map(|i| ma.mass()[i] / cells[i]).fold(f64::INFINITY, f64::min);
    let r: f64 = 0.6;
    for i in g.interior_nodes().filter(|&i| g.nodes[i][0].hypot(g.nodes[i][1]) < r) {
        let bound = c * (1.0 - r * r).powf(2.0) * vols[i];
        assert!(area.mass()[i] >= bound * (1.0 - 1e-9), "node {i}: {} < {bound}", area.mass()[i]);
    }
}

#[test]
fn smooth_density_oracle() {
    let f = |x: [f64; 2]| 0.5 * x[0] * x[0] + x[1] * x[1];
    assert!((hessian_det_density(f, [0.2, -0.1]) - 2.0).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn legendre_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Smooth::random(&mut rng);
        let g = grid(10, 24, 0.9);
        let h = PLFunctionB::from_fn(g.clone(), |x| f.eval(x)).unwrap().convexify().unwrap();
        let u = legendre(&h, 81).unwrap();
        let back = legendre_inverse(&u, g.clone()).unwrap();
        let step = u.step();
        let res = step[0].max(step[1]);
        let lip = g.rho_max;
        for (a, b) in back.values.iter().zip(&h.values) {
            prop_assert!((a - b).abs() <= 2.0 * res * lip + 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn envelope_dominates_convex_competitors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Smooth::random(&mut rng);
        let g0 = grid(8, 32, 0.9);
        let rho = g0.rho_max;
        let trace = BoundaryData::from_fn(32, |t| f.eval([rho * t.cos(), rho * t.sin()])).unwrap();
        let env = convex_envelope_boundary(&trace, g0.clone()).unwrap();
        let a: f64 = rng.gen_range(0.0..2.0);
        let noise: Vec<f64> = (0..g0.len()).map(|_| rng.gen_range(-0.1..0.1)).collect();
        let raw = PLFunctionB::from_fn(g0.clone(), |x| f.eval(x) + a * (x[0] * x[0] + x[1] * x[1] - rho * rho)).unwrap();
        let mut vals = raw.values.clone();
        for i in g0.interior_nodes() {
            vals[i] += noise[i];
        }
        let competitor = PLFunctionB::new(g0.clone(), vals).unwrap().convexify().unwrap();
        for &b in &g0.boundary_ring {
            prop_assert!((competitor.values[b] - env.values[b]).abs() < 1e-9);
        }
        for (c, e) in competitor.values.iter().zip(&env.values) {
            prop_assert!(*c <= e + 1e-9, "{c} > {e}");
        }
    }

    #[test]
    fn chi_lies_in_the_set(seed in any::<u64>(), x in prop::array::uniform2(-0.6..0.6f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Smooth::random(&mut rng);
        let p = chi_map(|y| f.eval(y), &minkprob_core::mink::BallPoint(x)).unwrap();
        let g = grid(6, 16, 0.9);
        for y in &g.nodes {
            prop_assert!(y[0] * p.0[0] + y[1] * p.0[1] - p.0[2] <= f.eval(*y) + 1e-6);
        }
    }

    #[test]
    fn extension_is_one_homogeneous(seed in any::<u64>(), x in prop::array::uniform2(-0.6..0.6f64), z in 0.5..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Smooth::random(&mut rng);
        let v = MinkVector::new(x[0] * z, x[1] * z, z);
        let base = homog_extension(|y| f.eval(y), &v).unwrap();
        for c in [0.5, 2.0, 7.0] {
            let hc = homog_extension(|y| f.eval(y), &(c * v)).unwrap();
            prop_assert!((hc - c * base).abs() <= 4.0 * f64::EPSILON * c * (1.0 + base.abs()));
        }
    }

    #[test]
    fn homothety_and_affine_laws_are_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = Smooth::random(&mut rng);
        let f2 = Smooth::random(&mut rng);
        let g = grid(8, 24, 0.9);
        let h1 = PLFunctionB::from_fn(g.clone(), |x| f1.eval(x)).unwrap();
        let h2 = PLFunctionB::from_fn(g.clone(), |x| f2.eval(x)).unwrap();
        let regions: Vec<Vec<usize>> = (0..10)
            .map(|_| {
                let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
                let r = rng.gen_range(0.1..0.4);
                (0..g.len()).filter(|&i| (g.nodes[i][0] - c[0]).hypot(g.nodes[i][1] - c[1]) < r).collect()
            })
            .collect();
        let rep = ma_law_checks(&h1, 2.0, [0.3, -0.2], 1.0, &h2, &regions).unwrap();
        let scale = 1.0 + ma_measure(&h1).unwrap().total();
        prop_assert!(rep.exact_laws_hold(1e-9 * scale), "{rep:?}");
        prop_assert!(rep.dominance_violations.is_empty(), "{rep:?}");
    }
}
