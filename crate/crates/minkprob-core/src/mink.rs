//! Minkowski space ℝ^{2,1}, the projective disk and affine isometries.
//!
//! The bilinear form is `⟨X,Y⟩ = X₁Y₁ + X₂Y₂ − X₃Y₃`. A point `x` of the unit
//! disk corresponds to the ray through `x̂ = (x, 1)` and to the hyperboloid
//! point `v(x) = x̂ / λ(x)` with `λ(x) = √(1 − |x|²)`.

use core::ops::{Add, Mul, Neg, Sub};

use crate::math::{self, det3, mat_max_diff, mat_mul, mat_vec, transpose, Mat3, IDENTITY3};
use crate::{Error, Result};

/// The Lorentz metric `J = diag(1, 1, −1)`.
pub const J: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];

/// Tolerance for the Lorentz condition `γᵀJγ = J`.
pub const LORENTZ_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkVector(pub [f64; 3]);

impl MinkVector {
    pub const ZERO: MinkVector = MinkVector([0.0; 3]);
    /// The future unit time vector `e₃`.
    pub const TIME: MinkVector = MinkVector([0.0, 0.0, 1.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        MinkVector([x, y, z])
    }

    pub fn inner(&self, other: &MinkVector) -> f64 {
        mink_inner(self, other)
    }

    pub fn is_future_timelike(&self) -> bool {
        self.inner(self) < 0.0 && self.0[2] > 0.0
    }

    pub fn spatial(&self) -> [f64; 2] {
        [self.0[0], self.0[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for MinkVector {
    type Output = MinkVector;
    fn add(self, o: MinkVector) -> MinkVector {
        MinkVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for MinkVector {
    type Output = MinkVector;
    fn sub(self, o: MinkVector) -> MinkVector {
        MinkVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for MinkVector {
    type Output = MinkVector;
    fn neg(self) -> MinkVector {
        MinkVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<MinkVector> for f64 {
    type Output = MinkVector;
    fn mul(self, v: MinkVector) -> MinkVector {
        MinkVector([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

/// `⟨X,Y⟩ = X₁Y₁ + X₂Y₂ − X₃Y₃`.
pub fn mink_inner(x: &MinkVector, y: &MinkVector) -> f64 {
    x.0[0] * y.0[0] + x.0[1] * y.0[1] - x.0[2] * y.0[2]
}

/// A point of the closed unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BallPoint(pub [f64; 2]);

impl BallPoint {
    pub fn new(x: f64, y: f64) -> Self {
        BallPoint([x, y])
    }

    pub fn norm(&self) -> f64 {
        math::norm2(self.0)
    }

    pub fn on_boundary(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    /// `x̂ = (x, 1)`.
    pub fn hat(&self) -> MinkVector {
        MinkVector([self.0[0], self.0[1], 1.0])
    }
}

/// `λ(x) = √(1 − |x|²)`; the Minkowski norm of `x̂`.
pub fn lambda(x: &BallPoint) -> Result<f64> {
    let r2 = x.0[0] * x.0[0] + x.0[1] * x.0[1];
    if r2 > 1.0 + 1e-14 {
        return Err(Error::domain("lambda: point outside the closed unit disk"));
    }
    Ok(math::sqrt((1.0 - r2).max(0.0)))
}

/// Unchecked λ for callers that already know `|x| ≤ 1`.
#[inline]
pub fn lambda_of(x: [f64; 2]) -> f64 {
    math::sqrt((1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0))
}

/// `v(x) = x̂ / λ(x)`, a point of the hyperboloid ℍ².
pub fn radial_map(x: &BallPoint) -> Result<MinkVector> {
    let l = lambda(x)?;
    if l <= 0.0 {
        return Err(Error::domain("radial_map: boundary point has no image on the hyperboloid"));
    }
    Ok((1.0 / l) * x.hat())
}

/// Inverse of [`radial_map`]: `(x, x₃) ↦ x / x₃`. Accepts any future vector.
pub fn radial_map_inverse(v: &MinkVector) -> Result<BallPoint> {
    if v.0[2] <= 0.0 {
        return Err(Error::domain("radial_map_inverse: vector is not future directed"));
    }
    Ok(BallPoint([v.0[0] / v.0[2], v.0[1] / v.0[2]]))
}

/// A Lorentz transformation together with a translation: `X ↦ γX + τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub linear: Mat3,
    pub translation: MinkVector,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        linear: IDENTITY3,
        translation: MinkVector::ZERO,
    };

    /// Validating constructor: `γ` must lie in SO⁺(2,1).
    pub fn new(linear: Mat3, translation: MinkVector) -> Result<Self> {
        check_lorentz(&linear, LORENTZ_TOL)?;
        Ok(Isometry { linear, translation })
    }

    pub fn linear(linear: Mat3) -> Result<Self> {
        Isometry::new(linear, MinkVector::ZERO)
    }

    pub fn translation(t: MinkVector) -> Self {
        Isometry {
            linear: IDENTITY3,
            translation: t,
        }
    }

    pub fn apply(&self, x: &MinkVector) -> MinkVector {
        MinkVector(mat_vec(&self.linear, &x.0)) + self.translation
    }

    pub fn apply_linear(&self, x: &MinkVector) -> MinkVector {
        MinkVector(mat_vec(&self.linear, &x.0))
    }

    /// `(γ₁,τ₁)(γ₂,τ₂) = (γ₁γ₂, τ₁ + γ₁τ₂)`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            linear: mat_mul(&self.linear, &other.linear),
            translation: self.translation + self.apply_linear(&other.translation),
        }
    }

    /// `(γ,τ)⁻¹ = (γ⁻¹, −γ⁻¹τ)` with `γ⁻¹ = JγᵀJ`.
    pub fn inverse(&self) -> Isometry {
        let inv = lorentz_inverse(&self.linear);
        let t = MinkVector(mat_vec(&inv, &self.translation.0));
        Isometry {
            linear: inv,
            translation: -t,
        }
    }

    pub fn max_diff(&self, other: &Isometry) -> f64 {
        mat_max_diff(&self.linear, &other.linear).max((self.translation - other.translation).max_abs())
    }
}

/// `γ⁻¹ = JγᵀJ` for a Lorentz matrix.
pub fn lorentz_inverse(g: &Mat3) -> Mat3 {
    mat_mul(&mat_mul(&J, &transpose(g)), &J)
}

/// Checks `‖γᵀJγ − J‖_max ≤ tol`, `det γ ≈ 1` and `γ₃₃ > 0`.
pub fn check_lorentz(g: &Mat3, tol: f64) -> Result<()> {
    let gjg = mat_mul(&mat_mul(&transpose(g), &J), g);
    let m = math::mat_max_abs(g);
    let scale = 1.0 + m * m;
    let dev = mat_max_diff(&gjg, &J);
    if dev > tol * scale {
        return Err(Error::validation(alloc::format!(
            "matrix is not Lorentzian: ‖γᵀJγ − J‖ = {dev:.3e}"
        )));
    }
    let d = det3(g);
    if (d - 1.0).abs() > 1e-8 * scale {
        return Err(Error::validation(alloc::format!("determinant {d} is not +1")));
    }
    if g[2][2] <= 0.0 {
        return Err(Error::validation("matrix does not preserve the future cone"));
    }
    Ok(())
}

/// Projective action `γ̄(x) = (γx̂)_{1,2} / (γx̂)₃` on the closed disk.
pub fn projective_action(g: &Mat3, x: &BallPoint) -> BallPoint {
    let y = mat_vec(g, &[x.0[0], x.0[1], 1.0]);
    BallPoint([y[0] / y[2], y[1] / y[2]])
}

/// `(σ·h)(x) = (λ(x)/λ(γ̄⁻¹x))·h(γ̄⁻¹x) + ⟨x̂, τ_γ⟩`, the action of an affine
/// isometry on support functions restricted to the disk.
///
/// The factor `λ(x)/λ(γ̄⁻¹x)` equals `(γ⁻¹x̂)₃`, which stays finite on the
/// boundary circle, so boundary points are handled by the same formula.
pub fn act_on_ball_function<F>(sigma: &Isometry, h: F, x: &BallPoint) -> Result<f64>
where
    F: Fn(&BallPoint) -> f64,
{
    let inv = lorentz_inverse(&sigma.linear);
    let y = mat_vec(&inv, &[x.0[0], x.0[1], 1.0]);
    let ratio = y[2];
    let pre = BallPoint([y[0] / y[2], y[1] / y[2]]);
    let val = ratio * h(&pre) + mink_inner(&x.hat(), &sigma.translation);
    if !val.is_finite() {
        return Err(Error::domain("act_on_ball_function: non-finite value"));
    }
    Ok(val)
}

/// Hyperbolic distance between two points of ℍ².
pub fn hyperbolic_distance(a: &MinkVector, b: &MinkVector) -> f64 {
    math::acosh((-mink_inner(a, b)).max(1.0))
}

/// Hyperbolic distance between two disk points (projective model).
pub fn disk_distance(x: [f64; 2], y: [f64; 2]) -> f64 {
    let lx = lambda_of(x);
    let ly = lambda_of(y);
    let c = (1.0 - x[0] * y[0] - x[1] * y[1]) / (lx * ly);
    math::acosh(c.max(1.0))
}

/// Minkowski reflection in the spacelike vector `n`.
pub fn reflection(n: &MinkVector) -> Mat3 {
    let nn = mink_inner(n, n);
    let mut m = IDENTITY3;
    // X ↦ X − 2⟨X,n⟩/⟨n,n⟩ n, with ⟨X,n⟩ = Σ X_j (Jn)_j
    let jn = [n.0[0], n.0[1], -n.0[2]];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e -= 2.0 * n.0[i] * jn[j] / nn;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{boost_x, rotation};

    #[test]
    fn inner_product_signs() {
        let e1 = MinkVector::new(1.0, 0.0, 0.0);
        let e3 = MinkVector::TIME;
        let l = MinkVector::new(1.0, 0.0, 1.0);
        assert_eq!(mink_inner(&e1, &e1), 1.0);
        assert_eq!(mink_inner(&e3, &e3), -1.0);
        assert_eq!(mink_inner(&l, &l), 0.0);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda(&BallPoint::new(0.0, 0.0)).unwrap(), 1.0);
        assert_eq!(lambda(&BallPoint::new(1.0, 0.0)).unwrap(), 0.0);
        assert!((lambda(&BallPoint::new(0.6, 0.0)).unwrap() - 0.8).abs() < 1e-15);
        assert!(lambda(&BallPoint::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn radial_map_examples() {
        let v = radial_map(&BallPoint::new(0.6, 0.0)).unwrap();
        assert!((v.0[0] - 0.75).abs() < 1e-15 && v.0[1] == 0.0 && (v.0[2] - 1.25).abs() < 1e-15);
        let back = radial_map_inverse(&v).unwrap();
        assert!((back.0[0] - 0.6).abs() < 1e-15);
        assert_eq!(radial_map(&BallPoint::new(0.0, 0.0)).unwrap(), MinkVector::TIME);
        assert!(radial_map(&BallPoint::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn boost_moves_origin_to_tanh() {
        let a = 0.7;
        let y = projective_action(&boost_x(a), &BallPoint::new(0.0, 0.0));
        assert!((y.0[0] - math::tanh(a)).abs() < 1e-15);
        assert_eq!(y.0[1], 0.0);
    }

    #[test]
    fn lorentz_validation() {
        assert!(Isometry::linear(boost_x(1.3)).is_ok());
        assert!(Isometry::linear(rotation(0.4)).is_ok());
        let mut bad = boost_x(1.0);
        bad[0][0] += 1e-3;
        assert!(Isometry::linear(bad).is_err());
        // time reversal is Lorentzian but not future preserving
        let tr = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(Isometry::linear(tr).is_err());
    }

    #[test]
    fn reflection_is_an_involution_in_o21() {
        let n = MinkVector::new(2.0, 0.5, 1.0);
        let r = reflection(&n);
        let rr = mat_mul(&r, &r);
        assert!(mat_max_diff(&rr, &IDENTITY3) < 1e-12);
        let rjr = mat_mul(&mat_mul(&transpose(&r), &J), &r);
        assert!(mat_max_diff(&rjr, &J) < 1e-12);
    }

    #[test]
    fn translation_action_adds_affine_function() {
        let t0 = MinkVector::new(0.3, -0.2, 0.5);
        let sigma = Isometry::translation(t0);
        let h = |x: &BallPoint| x.0[0] * x.0[0] + 0.1 * x.0[1];
        let x = BallPoint::new(0.2, 0.4);
        let got = act_on_ball_function(&sigma, h, &x).unwrap();
        assert!((got - (h(&x) + mink_inner(&x.hat(), &t0))).abs() < 1e-15);
    }

    #[test]
    fn hyperboloid_support_is_invariant() {
        let g = mat_mul(&rotation(0.3), &mat_mul(&boost_x(0.9), &rotation(-1.1)));
        let sigma = Isometry::linear(g).unwrap();
        let h = |x: &BallPoint| -lambda_of(x.0);
        for x in [[0.1, 0.2], [-0.5, 0.3], [0.0, -0.9]] {
            let p = BallPoint(x);
            let got = act_on_ball_function(&sigma, h, &p).unwrap();
            assert!((got - h(&p)).abs() < 1e-12);
        }
    }
}
