//! Hyperbolic averaging of functions on ℍ² and the support-function
//! correction that restores convexity.
//!
//! `ĥ_r(x) = A(r) ∫_{B(x,r)} h̄ dℍ²` with `A(r) = 1/(π sinh² r)` is computed
//! in geodesic polar coordinates around `x`: Gauss–Legendre in the radius
//! with weight `sinh ρ`, the trapezoid rule in the angle. The tangent frame
//! at `x` is the boost of the frame at the origin.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::convex::PLFunctionB;
use crate::domain::{boost_to_origin, hyperboloid};
use crate::grid::BallGrid;
use crate::math::{self, gauss_legendre_on, mat_vec, PI};
use crate::mink::{hyperbolic_distance, lorentz_inverse, MinkVector};
use crate::{Error, Result};

/// `A(r) = 1/(π sinh² r)`: the inverse of `∫_{B(x,r)} cosh d(x,·) dℍ²`, so
/// that restrictions of linear functions are fixed.
pub fn normalizer(r: f64) -> f64 {
    let s = math::sinh(r);
    1.0 / (PI * s * s)
}

/// `ĥ_r` of the constant `−1`: `−A(r)·2π(cosh r − 1) = −2/(cosh r + 1)`.
pub fn average_of_minus_one(r: f64) -> f64 {
    -2.0 / (math::cosh(r) + 1.0)
}

/// Geodesic polar quadrature on a hyperbolic disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolarQuadrature {
    pub radial: usize,
    pub angular: usize,
}

impl Default for PolarQuadrature {
    fn default() -> Self {
        PolarQuadrature { radial: 16, angular: 32 }
    }
}

/// Largest deviation from the fixed-point identity accepted by the self-test.
pub const SELF_TEST_TOL: f64 = 1e-6;

impl PolarQuadrature {
    /// Nodes `(ρ, θ)` and weights (area element included) on `B(0, r)`.
    fn rule(&self, r: f64) -> Vec<(f64, f64, f64)> {
        let (rho, w) = gauss_legendre_on(self.radial, 0.0, r);
        let dtheta = 2.0 * PI / self.angular as f64;
        let mut out = Vec::with_capacity(self.radial * self.angular);
        for (p, wp) in rho.iter().zip(&w) {
            for j in 0..self.angular {
                out.push((*p, j as f64 * dtheta, wp * math::sinh(*p) * dtheta));
            }
        }
        out
    }

    /// Worst deviation of the average of a linear function from itself,
    /// over a few centres.
    pub fn self_test(&self, r: f64) -> f64 {
        let p = MinkVector::new(0.7, -0.4, 1.3);
        let lin = |y: &MinkVector| y.inner(&p);
        let avg = HyperbolicAverage {
            f: lin,
            r,
            quad: *self,
            rule: self.rule(r),
        };
        [[0.0, 0.0], [0.5, -0.3], [-0.8, 0.1]]
            .iter()
            .map(|&x| {
                let v = hyperboloid(x);
                (avg.eval(&v) - lin(&v)).abs() / (1.0 + lin(&v).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// The evaluator `x ↦ ĥ_r(x)` for a function `f` on ℍ².
#[derive(Clone)]
pub struct HyperbolicAverage<F> {
    f: F,
    pub r: f64,
    pub quad: PolarQuadrature,
    rule: Vec<(f64, f64, f64)>,
}

impl<F: Fn(&MinkVector) -> f64> HyperbolicAverage<F> {
    /// Validates the quadrature against the linear fixed-point identity.
    pub fn new(f: F, r: f64, quad: PolarQuadrature) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::validation("averaging radius must be positive"));
        }
        if quad.radial == 0 || quad.angular < 3 {
            return Err(Error::validation("quadrature needs ≥1 radial and ≥3 angular nodes"));
        }
        let err = quad.self_test(r);
        if err > SELF_TEST_TOL {
            return Err(Error::validation(alloc::format!(
                "quadrature {}×{} too coarse at r = {r}: linear self-test error {err:.2e}",
                quad.radial,
                quad.angular
            )));
        }
        Ok(HyperbolicAverage {
            f,
            r,
            quad,
            rule: quad.rule(r),
        })
    }

    /// `ĥ_r` at a hyperboloid point.
    pub fn eval(&self, x: &MinkVector) -> f64 {
        let back = lorentz_inverse(&boost_to_origin(x));
        let mut s = 0.0;
        for &(rho, theta, w) in &self.rule {
            let (sr, cr) = (math::sinh(rho), math::cosh(rho));
            let y0 = [sr * math::cos(theta), sr * math::sin(theta), cr];
            s += w * (self.f)(&MinkVector(mat_vec(&back, &y0)));
        }
        normalizer(self.r) * s
    }

    /// `ĥ_r` at a disk point, in ball normalization `λ·ĥ_r`.
    pub fn eval_ball(&self, x: [f64; 2]) -> f64 {
        let v = hyperboloid(x);
        self.eval(&v) / v.0[2]
    }

    pub fn inner(&self) -> &F {
        &self.f
    }
}

/// A geodesic disk `B(center, radius)` sampled on a polar grid in the chart
/// centred at `center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Patch {
    pub center: MinkVector,
    pub radius: f64,
    pub rings: usize,
    pub angular: usize,
}

impl Patch {
    pub fn new(center: MinkVector, radius: f64) -> Self {
        Patch {
            center,
            radius,
            rings: 12,
            angular: 36,
        }
    }

    /// Grid in the centred chart (projective radius `tanh(radius)`).
    fn grid(&self, radius: f64) -> Result<BallGrid> {
        BallGrid::new(self.rings, self.angular, math::tanh(radius))
    }

    /// Hyperboloid points of the grid nodes.
    fn points(&self, grid: &BallGrid) -> Vec<MinkVector> {
        let back = lorentz_inverse(&boost_to_origin(&self.center));
        grid.nodes
            .iter()
            .map(|&z| MinkVector(mat_vec(&back, &hyperboloid(z).0)))
            .collect()
    }
}

/// Lipschitz constant of `f` along grid edges of the patch enlarged by `r`.
pub fn lipschitz_on(f: &impl Fn(&MinkVector) -> f64, patch: &Patch, r: f64) -> Result<f64> {
    let grid = patch.grid(patch.radius + r)?;
    let pts = patch.points(&grid);
    let vals: Vec<f64> = pts.iter().map(f).collect();
    let mut lip = 0.0_f64;
    for t in &grid.triangles {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            let d = hyperbolic_distance(&pts[a], &pts[b]);
            if d > 1e-12 {
                lip = lip.max((vals[a] - vals[b]).abs() / d);
            }
        }
    }
    Ok(lip)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionReport {
    pub c_safety: f64,
    pub lipschitz: f64,
    /// The subtracted constant is `c·r`.
    pub c: f64,
    pub r: f64,
    pub attempts: usize,
    /// `sup |ĥ_r − h̄|` on the patch nodes.
    pub smoothing_error: f64,
}

/// `ĥ_r − C·r` with `C = C_safety·Lip(h̄; K_r)`.
#[derive(Clone)]
pub struct SupportCorrection<F> {
    pub average: HyperbolicAverage<F>,
    pub shift: f64,
    pub report: CorrectionReport,
}

impl<F: Fn(&MinkVector) -> f64> SupportCorrection<F> {
    pub fn eval(&self, x: &MinkVector) -> f64 {
        self.average.eval(x) - self.shift
    }
}

pub const C_SAFETY: f64 = 4.0;
pub const CORRECTION_RETRIES: usize = 3;

/// Whether `x ↦ λ(x)·g(v(x))` is convex on the patch: every lifted node of
/// the chart grid lies on the lower hull.
pub fn convex_on_patch(g: &impl Fn(&MinkVector) -> f64, patch: &Patch) -> Result<bool> {
    let grid = Arc::new(patch.grid(patch.radius)?);
    let pts = patch.points(&grid);
    // in the centred chart λ = 1/(ψv)₃, and the support function transforms
    // linearly, so the chart ball values are g/(ψv)₃
    let psi = boost_to_origin(&patch.center);
    let values = pts
        .iter()
        .map(|p| g(p) / mat_vec(&psi, &p.0)[2])
        .collect();
    PLFunctionB::new(grid, values)?.verify_convexity()
}

/// Corrects `ĥ_r` into a support function on the patch, doubling the safety
/// factor on failure.
pub fn support_correction<F: Fn(&MinkVector) -> f64 + Clone>(
    average: &HyperbolicAverage<F>,
    patch: &Patch,
    c_safety: f64,
) -> Result<SupportCorrection<F>> {
    let r = average.r;
    let lip = lipschitz_on(average.inner(), patch, r)?;
    let grid = patch.grid(patch.radius)?;
    let pts = patch.points(&grid);
    let smoothing_error = pts
        .iter()
        .map(|p| (average.eval(p) - (average.inner())(p)).abs())
        .fold(0.0, f64::max);
    let mut cs = c_safety;
    for attempt in 0..=CORRECTION_RETRIES {
        let shift = cs * lip * r;
        let ok = convex_on_patch(&|p: &MinkVector| average.eval(p) - shift, patch)?;
        if ok {
            return Ok(SupportCorrection {
                average: average.clone(),
                shift,
                report: CorrectionReport {
                    c_safety: cs,
                    lipschitz: lip,
                    c: cs * lip,
                    r,
                    attempts: attempt + 1,
                    smoothing_error,
                },
            });
        }
        cs *= 2.0;
    }
    Err(Error::NonConvergence {
        what: "support correction convexity test".into(),
        iterations: CORRECTION_RETRIES + 1,
        residual: cs,
    })
}
