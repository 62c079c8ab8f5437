use minkprob_core::lattice::{cocycle_extend, element, enumerate_elements, Cocycle, Lattice, Letter};
use minkprob_core::math::mat_max_diff;
use minkprob_core::mink::{
    act_on_ball_function, check_lorentz, lambda_of, radial_map, radial_map_inverse, BallPoint, Isometry, MinkVector,
};
use proptest::prelude::*;

fn letter(generator: usize, inverse: bool) -> Letter {
    Letter { generator, inverse }
}

/// A convex ball function defined on the closed disk.
fn test_function(a: f64, b: f64, q: [f64; 2]) -> impl Fn(&BallPoint) -> f64 {
    move |x: &BallPoint| {
        let r2 = x.0[0] * x.0[0] + x.0[1] * x.0[1];
        -a * lambda_of(x.0) + b * r2 + q[0] * x.0[0] + q[1] * x.0[1]
    }
}

fn disk_point() -> impl Strategy<Value = [f64; 2]> {
    (0.0..0.97f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| [r * t.cos(), r * t.sin()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn radial_map_round_trip(x in disk_point()) {
        let v = radial_map(&BallPoint(x)).unwrap();
        prop_assert!((v.inner(&v) + 1.0).abs() < 1e-9 * v.0[2] * v.0[2]);
        let y = radial_map_inverse(&v).unwrap();
        prop_assert!((y.0[0] - x[0]).abs() < 1e-12 && (y.0[1] - x[1]).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn action_is_a_group_action(
        a in 0.5..3.0f64,
        b in 0.0..1.0f64,
        q in prop::array::uniform2(-1.0..1.0f64),
        t0 in prop::array::uniform3(-0.5..0.5f64),
        g1 in 0usize..4,
        g2 in 0usize..4,
        i1 in any::<bool>(),
        i2 in any::<bool>(),
    ) {
        let lat = Lattice::genus2();
        let coc = Cocycle::coboundary(&lat, MinkVector(t0));
        let s1 = element(&lat, Some(&coc), &[letter(g1, i1)]);
        let s2 = element(&lat, Some(&coc), &[letter(g2, i2)]);
        let s12 = element(&lat, Some(&coc), &[letter(g1, i1), letter(g2, i2)]);
        prop_assert!(s12.max_diff(&s1.compose(&s2)) < 1e-9 * (1.0 + s12.translation.max_abs()));
        let h = test_function(a, b, q);
        for k in 0..25 {
            let r = 0.95 * (k % 5) as f64 / 4.0;
            let t = 1.3 * k as f64;
            let x = BallPoint([r * t.cos(), r * t.sin()]);
            let inner = |y: &BallPoint| act_on_ball_function(&s2, &h, y).unwrap();
            let twice = act_on_ball_function(&s1, inner, &x).unwrap();
            let once = act_on_ball_function(&s12, &h, &x).unwrap();
            prop_assert!((twice - once).abs() <= 1e-8 * (1.0 + once.abs()), "{twice} vs {once}");
        }
    }

    #[test]
    fn coboundaries_satisfy_the_cocycle_rule(t0 in prop::array::uniform3(-2.0..2.0f64)) {
        let lat = Lattice::genus2();
        let coc = Cocycle::coboundary(&lat, MinkVector(t0));
        prop_assert!(Cocycle::new(&lat, coc.translations.clone(), 1e-8).is_ok());
        for rel in &lat.relators {
            let t = cocycle_extend(&lat, &coc, rel).unwrap();
            prop_assert!(t.max_abs() < 1e-8 * (1.0 + coc.max_abs()));
        }
    }

    #[test]
    fn inverse_undoes_an_isometry(g in 0usize..4, t in prop::array::uniform3(-1.0..1.0f64)) {
        let lat = Lattice::genus2();
        let s = Isometry::new(lat.generators[g], MinkVector(t)).unwrap();
        let id = s.compose(&s.inverse());
        prop_assert!(id.max_diff(&Isometry::IDENTITY) < 1e-9);
    }
}

#[test]
fn every_generator_is_future_preserving_lorentz() {
    let lat = Lattice::genus2();
    for g in &lat.generators {
        check_lorentz(g, 1e-10).unwrap();
    }
    let prod = lat.linear_word(&lat.relators[0]);
    assert!(mat_max_diff(&prod, &minkprob_core::math::IDENTITY3) < 1e-8);
}

#[test]
fn random_cocycles_violating_the_relator_are_rejected() {
    let lat = Lattice::genus2();
    let mut t = Cocycle::zero(&lat).translations;
    t[0] = MinkVector::new(0.3, 0.0, 0.0);
    assert!(Cocycle::new(&lat, t, 1e-8).is_err());
}

#[test]
fn enumeration_grows_and_is_free() {
    let lat = Lattice::genus2();
    let counts: Vec<usize> = (0..=3).map(|d| enumerate_elements(&lat, None, d).len()).collect();
    assert_eq!(counts[0], 1);
    assert_eq!(counts[1], 9);
    assert!(counts[2] > counts[1] && counts[3] > counts[2]);
    let elems = enumerate_elements(&lat, None, 2);
    let origin = MinkVector::TIME;
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[..i] {
            let pa = a.isometry.apply(&origin);
            let pb = b.isometry.apply(&origin);
            assert!((pa - pb).max_abs() > 1e-6);
        }
    }
}
