use minkprob_core::domain::{disk, hyperboloid, DirichletPolygon};
use minkprob_core::lattice::{element, enumerate_elements, Cocycle, Lattice, Letter};
use minkprob_core::mink::{hyperbolic_distance, BallPoint, MinkVector};
use minkprob_core::smoothing::{
    average_of_minus_one, convex_on_patch, support_correction, HyperbolicAverage, Patch, PolarQuadrature, C_SAFETY,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RADII: [f64; 3] = [0.05, 0.1, 0.3];

/// `Σ_γ exp(−κ cosh d(v, γc))`, summed after reducing `v` into the
/// fundamental polygon so that it is exactly Γ-invariant.
struct PoincareSeries {
    lattice: Lattice,
    polygon: DirichletPolygon,
    orbit: Vec<MinkVector>,
    kappa: f64,
}

impl PoincareSeries {
    fn new(c: [f64; 2], kappa: f64) -> Self {
        let lattice = Lattice::genus2();
        let polygon = DirichletPolygon::new(&lattice, &BallPoint::new(0.0, 0.0), 2).unwrap();
        let reach = polygon.vertices.iter().map(|v| hyperbolic_distance(&hyperboloid(*v), &MinkVector::TIME)).fold(0.0, f64::max)
            + (40.0 / kappa).acosh();
        let center = hyperboloid(c);
        let near = |depth| -> Vec<MinkVector> {
            enumerate_elements(&lattice, None, depth)
                .iter()
                .map(|e| e.isometry.apply(&center))
                .filter(|p| hyperbolic_distance(p, &MinkVector::TIME) <= reach)
                .collect()
        };
        // deepen until no orbit point within reach is missing
        let mut depth = 2;
        let mut orbit = near(depth);
        loop {
            depth += 1;
            let next = near(depth);
            if next.len() == orbit.len() {
                break;
            }
            orbit = next;
        }
        PoincareSeries {
            lattice,
            polygon,
            orbit,
            kappa,
        }
    }

    fn eval(&self, v: &MinkVector) -> f64 {
        let (y, _) = self.polygon.reduce(&self.lattice, disk(v)).unwrap();
        let yv = hyperboloid(y);
        self.orbit.iter().map(|p| (self.kappa * yv.inner(p)).exp()).sum()
    }
}

fn centre() -> impl Strategy<Value = MinkVector> {
    (0.0..0.9f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| hyperboloid([r * t.cos(), r * t.sin()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn linear_functions_are_fixed(p in prop::array::uniform3(-2.0..2.0f64), x in centre()) {
        let p = MinkVector(p);
        let lin = move |y: &MinkVector| y.inner(&p);
        for r in RADII {
            let avg = HyperbolicAverage::new(lin, r, PolarQuadrature::default()).unwrap();
            prop_assert!((avg.eval(&x) - lin(&x)).abs() <= 1e-6 * (1.0 + lin(&x).abs()));
        }
    }

    #[test]
    fn constant_average_closed_form(x in centre()) {
        for r in RADII {
            let avg = HyperbolicAverage::new(|_: &MinkVector| -1.0, r, PolarQuadrature::default()).unwrap();
            prop_assert!((avg.eval(&x) - average_of_minus_one(r)).abs() < 1e-4);
        }
    }
}

#[test]
fn averaging_preserves_equivariance() {
    let lat = Lattice::genus2();
    let t0 = MinkVector::new(0.3, -0.2, 0.1);
    let coc = Cocycle::coboundary(&lat, t0);
    let series = PoincareSeries::new([0.2, 0.1], 2.0);
    let hbar = |v: &MinkVector| series.eval(v) - v.inner(&t0);
    for r in RADII {
        let avg = HyperbolicAverage::new(hbar, r, PolarQuadrature::default()).unwrap();
        for g in 0..lat.rank() {
            let sigma = element(&lat, Some(&coc), &[Letter { generator: g, inverse: false }]);
            for x in [[0.0, 0.0], [0.3, -0.4], [-0.6, 0.2]] {
                let y = hyperboloid(x);
                let gy = sigma.apply_linear(&y);
                let defect = avg.eval(&gy) - avg.eval(&y) - gy.inner(&sigma.translation);
                assert!(defect.abs() < 1e-6, "r={r} generator {g}: {defect:e}");
            }
        }
    }
}

#[test]
fn averages_converge_uniformly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let probes: Vec<MinkVector> = (0..40)
        .map(|k| {
            let t = 0.37 * k as f64;
            let r = 0.5 * (k % 5) as f64 / 4.0;
            hyperboloid([0.1 + r * t.cos(), -0.2 + r * t.sin()])
        })
        .collect();
    for _ in 0..10 {
        let cs: Vec<(MinkVector, f64)> = (0..3)
            .map(|_| (hyperboloid([rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = move |v: &MinkVector| cs.iter().map(|(c, a)| a * hyperbolic_distance(v, c)).sum::<f64>();
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&r| {
                let avg = HyperbolicAverage::new(&f, r, PolarQuadrature::default()).unwrap();
                probes.iter().map(|p| (avg.eval(p) - f(p)).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }
}

#[test]
fn correction_convexifies_a_polyhedral_support_function() {
    let pts = [
        MinkVector::new(0.0, 0.0, 1.0),
        MinkVector::new(0.5, 0.0, 1.2),
        MinkVector::new(-0.3, 0.4, 1.1),
    ];
    let f = move |v: &MinkVector| pts.iter().map(|p| v.inner(p)).fold(f64::NEG_INFINITY, f64::max);
    let patch = Patch::new(hyperboloid([0.05, 0.0]), 0.4);
    assert!(convex_on_patch(&f, &patch).unwrap());
    let avg = HyperbolicAverage::new(f, 0.1, PolarQuadrature::default()).unwrap();
    let c = support_correction(&avg, &patch, C_SAFETY).unwrap();
    assert!(convex_on_patch(&|v: &MinkVector| c.eval(v), &patch).unwrap());
    assert!((c.shift - c.report.c * c.report.r).abs() < 1e-15);
    assert!(c.report.lipschitz > 0.0 && c.report.smoothing_error > 0.0);
}
