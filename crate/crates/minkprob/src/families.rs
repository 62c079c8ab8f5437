//! Seeded test families shared by the acceptance criteria and the CLI.

use std::f64::consts::PI;
use std::sync::Arc;

use minkprob_core::domain::{disk, hyperboloid, DirichletPolygon};
use minkprob_core::equivariant::{EqSpace, EquivariantSupport};
use minkprob_core::lattice::{enumerate_elements, Lattice};
use minkprob_core::mink::{hyperbolic_distance, BallPoint, MinkVector};
use minkprob_core::Result;
use rand::Rng;

/// `½xᵀAx + ⟨q,x⟩ + e|x|⁴` with `A` positive definite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothConvex {
    pub a: [f64; 3],
    pub q: [f64; 2],
    pub e: f64,
}

impl SmoothConvex {
    pub fn random(rng: &mut impl Rng) -> Self {
        let l1 = rng.gen_range(0.3..1.5);
        let l2 = rng.gen_range(0.3..1.5);
        let t: f64 = rng.gen_range(0.0..PI);
        let (c, s) = (t.cos(), t.sin());
        SmoothConvex {
            a: [l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c],
            q: [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)],
            e: rng.gen_range(0.0..0.3),
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        0.5 * (self.a[0] * x[0] * x[0] + 2.0 * self.a[1] * x[0] * x[1] + self.a[2] * x[1] * x[1])
            + self.q[0] * x[0]
            + self.q[1] * x[1]
            + self.e * r2 * r2
    }
}

/// `max(−c, sup_γ ⟨v, γp⟩) + h̄_τ` over a depth-2 orbit, lowered onto its
/// local hull: a τ-convex support function strictly below `h̄_τ`.
pub fn random_cauchy(space: &Arc<EqSpace>, rng: &mut impl Rng) -> Result<EquivariantSupport> {
    let lat = &space.grid.lattice;
    let c = rng.gen_range(0.5..2.0);
    let s = rng.gen_range(0.3..2.5);
    let q = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let p = s * hyperboloid(q);
    let orbit: Vec<MinkVector> = enumerate_elements(lat, None, 2).iter().map(|e| e.isometry.apply(&p)).collect();
    let g = &space.grid;
    let mut u: Vec<f64> = g
        .reps
        .iter()
        .zip(&space.h_tau)
        .map(|(&r, t)| {
            let v = g.points[r];
            orbit.iter().map(|o| v.inner(o)).fold(-c, f64::max) + t
        })
        .collect();
    space.convexify(&mut u)?;
    EquivariantSupport::new(space.clone(), u)
}

/// A random support function below `h`.
pub fn random_below(h: &EquivariantSupport, rng: &mut impl Rng) -> Result<EquivariantSupport> {
    let a = rng.gen_range(0.05..0.8);
    let mut u: Vec<f64> = h.hbar.iter().map(|v| v - a - rng.gen_range(0.0..0.3)).collect();
    h.space.convexify(&mut u)?;
    EquivariantSupport::new(h.space.clone(), u)
}

/// `Σ_γ exp(κ⟨v, γc⟩)` over the genus-2 orbit of `c`, evaluated after
/// reducing `v` into the fundamental polygon so that it is exactly
/// Γ-invariant.
pub struct PoincareSeries {
    lattice: Lattice,
    polygon: DirichletPolygon,
    orbit: Vec<MinkVector>,
    kappa: f64,
}

impl PoincareSeries {
    pub fn new(c: [f64; 2], kappa: f64) -> Result<Self> {
        let lattice = Lattice::genus2();
        let polygon = DirichletPolygon::new(&lattice, &BallPoint::new(0.0, 0.0), 2)?;
        // terms beyond this distance from the polygon are below e^{-40}
        let reach = polygon
            .vertices
            .iter()
            .map(|v| hyperbolic_distance(&hyperboloid(*v), &MinkVector::TIME))
            .fold(0.0, f64::max)
            + (40.0 / kappa).acosh();
        let center = hyperboloid(c);
        let near = |depth| -> Vec<MinkVector> {
            enumerate_elements(&lattice, None, depth)
                .iter()
                .map(|e| e.isometry.apply(&center))
                .filter(|p| hyperbolic_distance(p, &MinkVector::TIME) <= reach)
                .collect()
        };
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
        Ok(PoincareSeries {
            lattice,
            polygon,
            orbit,
            kappa,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn eval(&self, v: &MinkVector) -> f64 {
        let (y, _) = self.polygon.reduce(&self.lattice, disk(v)).expect("disk point reduces");
        let yv = hyperboloid(y);
        self.orbit.iter().map(|p| (self.kappa * yv.inner(p)).exp()).sum()
    }
}
