//! Convex functions on the disk: piecewise-linear samples, boundary data and
//! envelopes, 1-homogeneous extension, Legendre–Fenchel duality and the
//! inverse Gauss map.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::grid::BallGrid;
use crate::hull::LowerHull;
use crate::math::{self, PI};
use crate::mink::{BallPoint, MinkVector};
use crate::{Error, Result};

/// Relative tolerance for "lies on its own lower hull".
pub const CONVEX_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvexFlag {
    Unknown,
    Verified,
    Failed,
}

/// Nodal values on a [`BallGrid`], linear on its triangles.
#[derive(Clone, Debug)]
pub struct PLFunctionB {
    pub grid: Arc<BallGrid>,
    pub values: Vec<f64>,
    pub convex_flag: ConvexFlag,
}

impl PartialEq for PLFunctionB {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid && self.values == other.values
    }
}

impl PLFunctionB {
    pub fn new(grid: Arc<BallGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation("value count does not match grid size"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("nonfinite function value"));
        }
        Ok(PLFunctionB {
            grid,
            values,
            convex_flag: ConvexFlag::Unknown,
        })
    }

    pub fn from_fn(grid: Arc<BallGrid>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        PLFunctionB::new(grid, values)
    }

    /// Piecewise-linear interpolation; `None` outside the grid disk.
    pub fn eval(&self, x: [f64; 2]) -> Option<f64> {
        self.grid.interpolate(&self.values, x)
    }

    pub fn hull(&self) -> Result<LowerHull> {
        lower_hull_on_grid(&self.grid, &self.values)
    }

    /// Checks that every lifted node lies on the lower hull and records the
    /// outcome in `convex_flag`.
    pub fn verify_convexity(&mut self) -> Result<bool> {
        let hv = self.hull()?.node_values();
        let ok = self
            .values
            .iter()
            .zip(&hv)
            .all(|(v, h)| (v - h).abs() <= CONVEX_TOL * (1.0 + v.abs()));
        self.convex_flag = if ok { ConvexFlag::Verified } else { ConvexFlag::Failed };
        Ok(ok)
    }

    /// Greatest convex minorant on the grid.
    pub fn convexify(&self) -> Result<PLFunctionB> {
        let values = self.hull()?.node_values();
        Ok(PLFunctionB {
            grid: self.grid.clone(),
            values,
            convex_flag: ConvexFlag::Verified,
        })
    }

    pub fn boundary_trace(&self) -> Vec<f64> {
        self.grid.boundary_ring.iter().map(|&b| self.values[b]).collect()
    }

    pub fn max_abs_diff(&self, other: &PLFunctionB) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn([f64; 2], f64) -> f64) -> Result<PLFunctionB> {
        let values = self.grid.nodes.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        PLFunctionB::new(self.grid.clone(), values)
    }
}

/// Lower hull of grid values, inserting rings from the boundary inwards.
pub fn lower_hull_on_grid(grid: &BallGrid, values: &[f64]) -> Result<LowerHull> {
    let mut order = Vec::with_capacity(grid.len());
    for ring in (1..grid.rings).rev() {
        // alternate direction so consecutive insertions stay adjacent
        if ring % 2 == 0 {
            order.extend((0..grid.angular).map(|j| grid.node(ring, j)));
        } else {
            order.extend((0..grid.angular).rev().map(|j| grid.node(ring, j)));
        }
    }
    order.push(0);
    LowerHull::build(&grid.nodes, values, &grid.boundary_ring, &order)
}

/// Samples of a continuous function on the circle, linear in the angle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    samples: Vec<(f64, f64)>,
}

impl BoundaryData {
    /// `samples` are `(angle, value)` pairs; angles are reduced to `[0, 2π)` and sorted.
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::validation("boundary data needs at least 3 samples"));
        }
        if samples.iter().any(|(a, v)| !a.is_finite() || !v.is_finite()) {
            return Err(Error::validation("nonfinite boundary sample"));
        }
        for s in samples.iter_mut() {
            s.0 = math::rem_euclid(s.0, 2.0 * PI);
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in samples.windows(2) {
            if w[1].0 - w[0].0 <= 0.0 {
                return Err(Error::validation("duplicate boundary angle"));
            }
        }
        Ok(BoundaryData { samples })
    }

    /// `n` equally spaced samples of `f(θ)`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        BoundaryData::new(
            (0..n)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / n as f64;
                    (t, f(t))
                })
                .collect(),
        )
    }

    pub fn constant(c: f64) -> Self {
        BoundaryData::from_fn(4, |_| c).expect("valid constant data")
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let t = math::rem_euclid(theta, 2.0 * PI);
        let s = &self.samples;
        let i = s.partition_point(|p| p.0 <= t);
        let (a, b) = if i == 0 || i == s.len() {
            let last = s[s.len() - 1];
            let first = s[0];
            let span = first.0 + 2.0 * PI - last.0;
            let off = if i == 0 { t + 2.0 * PI - last.0 } else { t - last.0 };
            let w = off / span;
            return (1.0 - w) * last.1 + w * first.1;
        } else {
            (s[i - 1], s[i])
        };
        let w = (t - a.0) / (b.0 - a.0);
        (1.0 - w) * a.1 + w * b.1
    }
}

/// Greatest convex function on the grid with the given trace on the outer
/// ring: the lower hull of the lifted boundary samples.
pub fn convex_envelope_boundary(g: &BoundaryData, grid: Arc<BallGrid>) -> Result<PLFunctionB> {
    if g.samples().len() < 3 {
        return Err(Error::validation("envelope needs at least 3 boundary samples"));
    }
    let mut z = alloc::vec![0.0; grid.len()];
    for (j, &b) in grid.boundary_ring.iter().enumerate() {
        z[b] = g.eval(grid.angle(j));
    }
    let hull = LowerHull::build(&grid.nodes, &z, &grid.boundary_ring, &[])?;
    let values = (0..grid.len())
        .map(|i| if grid.is_boundary(i) { z[i] } else { hull.eval(grid.nodes[i]).unwrap_or(0.0) })
        .collect();
    Ok(PLFunctionB {
        grid,
        values,
        convex_flag: ConvexFlag::Verified,
    })
}

/// Convex envelope of data on the unit circle, evaluable strictly inside
/// the inscribed sample polygon.
#[derive(Clone, Debug)]
pub struct CircleEnvelope {
    hull: LowerHull,
    inner_radius: f64,
}

impl CircleEnvelope {
    pub fn new(g: &BoundaryData) -> Result<Self> {
        let s = g.samples();
        let pts: Vec<[f64; 2]> = s.iter().map(|&(t, _)| [math::cos(t), math::sin(t)]).collect();
        let z: Vec<f64> = s.iter().map(|&(_, v)| v).collect();
        let boundary: Vec<usize> = (0..s.len()).collect();
        let hull = LowerHull::build(&pts, &z, &boundary, &[])?;
        let max_gap = s
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(s[0].0 + 2.0 * PI - s[s.len() - 1].0, f64::max);
        Ok(CircleEnvelope {
            hull,
            inner_radius: math::cos(0.5 * max_gap),
        })
    }

    /// Radius of the largest disk on which the envelope is defined.
    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn eval(&self, x: [f64; 2]) -> Result<f64> {
        if math::norm2(x) > self.inner_radius {
            return Err(Error::domain("point outside the sampled envelope polygon"));
        }
        self.hull
            .eval(x)
            .ok_or_else(|| Error::domain("point outside the sampled envelope polygon"))
    }
}

/// `H(x, z) = z·h(x/z)` for future time-like `X`.
pub fn homog_extension(h: impl Fn([f64; 2]) -> f64, x: &MinkVector) -> Result<f64> {
    if !x.is_future_timelike() {
        return Err(Error::domain("extension is only defined on the future cone"));
    }
    let z = x.0[2];
    Ok(z * h([x.0[0] / z, x.0[1] / z]))
}

/// Finite point sample whose convex hull plus future cone stands for a convex set.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexSetPoints {
    points: Vec<MinkVector>,
}

impl ConvexSetPoints {
    pub fn new(points: Vec<MinkVector>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::validation("point set is empty"));
        }
        Ok(ConvexSetPoints { points })
    }

    pub fn points(&self) -> &[MinkVector] {
        &self.points
    }
}

/// `h(x) = max_p ⟨x̂, p⟩`.
pub fn support_from_points(p: &ConvexSetPoints, x: &BallPoint) -> f64 {
    support_of(p.points(), x.0)
}

pub(crate) fn support_of(points: &[MinkVector], x: [f64; 2]) -> f64 {
    points
        .iter()
        .map(|q| x[0] * q.0[0] + x[1] * q.0[1] - q.0[2])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Finite-difference step used for gradients of evaluators.
pub const FD_STEP: f64 = 1e-5;

/// Central-difference gradient, one-sided when the stencil would leave the disk.
pub fn fd_gradient(h: &impl Fn([f64; 2]) -> f64, x: [f64; 2]) -> [f64; 2] {
    let e = FD_STEP;
    let mut g = [0.0; 2];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut xp = x;
        let mut xm = x;
        xp[i] += e;
        xm[i] -= e;
        let inside = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1] < 1.0;
        *gi = match (inside(xp), inside(xm)) {
            (true, true) => (h(xp) - h(xm)) / (2.0 * e),
            (false, _) => (h(x) - h(xm)) / e,
            (_, false) => (h(xp) - h(x)) / e,
        };
    }
    g
}

/// The point of `∂K` with support direction `x̂`:
/// `grad h + (⟨x, grad h⟩ − h(x)) e₃`.
pub fn chi_from_gradient(hx: f64, grad: [f64; 2], x: [f64; 2]) -> MinkVector {
    MinkVector([grad[0], grad[1], math::dot2(x, grad) - hx])
}

/// [`chi_from_gradient`] with a finite-difference gradient.
pub fn chi_map(h: impl Fn([f64; 2]) -> f64, x: &BallPoint) -> Result<MinkVector> {
    if x.norm() >= 1.0 {
        return Err(Error::domain("chi map needs an interior point"));
    }
    let grad = fd_gradient(&h, x.0);
    Ok(chi_from_gradient(h(x.0), grad, x.0))
}

/// Legendre–Fenchel dual sampled on a square grid of slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFunctionU {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Nodes per side.
    pub n: usize,
    /// Row-major values, `values[j * n + i]` at `lo + (i, j)·step`.
    pub values: Vec<f64>,
    /// Index of the maximizing disk node per slope node.
    pub argmax: Vec<usize>,
}

impl GraphFunctionU {
    pub fn step(&self) -> [f64; 2] {
        let m = (self.n - 1) as f64;
        [(self.hi[0] - self.lo[0]) / m, (self.hi[1] - self.lo[1]) / m]
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let s = self.step();
        [self.lo[0] + i as f64 * s[0], self.lo[1] + j as f64 * s[1]]
    }

    /// Cell-centred gradient of cell `(i, j)` from its four corners.
    pub fn cell_gradient(&self, i: usize, j: usize) -> [f64; 2] {
        let s = self.step();
        let v = |a: usize, b: usize| self.values[b * self.n + a];
        let gx = 0.5 * ((v(i + 1, j) - v(i, j)) + (v(i + 1, j + 1) - v(i, j + 1))) / s[0];
        let gy = 0.5 * ((v(i, j + 1) - v(i, j)) + (v(i + 1, j + 1) - v(i + 1, j))) / s[1];
        [gx, gy]
    }

    /// Largest cell gradient norm.
    pub fn max_gradient_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.n - 1 {
            for i in 0..self.n - 1 {
                m = m.max(math::norm2(self.cell_gradient(i, j)));
            }
        }
        m
    }
}

/// `ũ(p) = max_x ⟨x, p⟩ − h(x)` over grid nodes, on an `n × n` slope grid
/// covering all facet gradients of the convex hull of `h`.
pub fn legendre(h: &PLFunctionB, n: usize) -> Result<GraphFunctionU> {
    if n < 2 {
        return Err(Error::validation("slope grid needs at least 2 nodes per side"));
    }
    let hull = h.hull()?;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for t in hull.triangles() {
        let g = hull.gradient(t);
        for k in 0..2 {
            lo[k] = lo[k].min(g[k]);
            hi[k] = hi[k].max(g[k]);
        }
    }
    for k in 0..2 {
        let pad = 1e-3 * (1.0 + hi[k] - lo[k]);
        lo[k] -= pad;
        hi[k] += pad;
    }
    let verts: Vec<usize> = (0..h.grid.len()).filter(|&i| hull.is_vertex(i)).collect();
    legendre_on_box(h, &verts, lo, hi, n)
}

pub(crate) fn legendre_on_box(
    h: &PLFunctionB,
    candidates: &[usize],
    lo: [f64; 2],
    hi: [f64; 2],
    n: usize,
) -> Result<GraphFunctionU> {
    let mut u = GraphFunctionU {
        lo,
        hi,
        n,
        values: alloc::vec![0.0; n * n],
        argmax: alloc::vec![0; n * n],
    };
    for j in 0..n {
        for i in 0..n {
            let p = u.node(i, j);
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for &k in candidates {
                let x = h.grid.nodes[k];
                let v = x[0] * p[0] + x[1] * p[1] - h.values[k];
                if v > best {
                    best = v;
                    arg = k;
                }
            }
            u.values[j * n + i] = best;
            u.argmax[j * n + i] = arg;
        }
    }
    Ok(u)
}

/// `h(x) = max_p ⟨x, p⟩ − ũ(p)` over slope nodes, at every disk node.
pub fn legendre_inverse(u: &GraphFunctionU, grid: Arc<BallGrid>) -> Result<PLFunctionB> {
    let values = grid
        .nodes
        .iter()
        .map(|&x| {
            let mut best = f64::NEG_INFINITY;
            for j in 0..u.n {
                for i in 0..u.n {
                    let p = u.node(i, j);
                    best = best.max(x[0] * p[0] + x[1] * p[1] - u.values[j * u.n + i]);
                }
            }
            best
        })
        .collect();
    PLFunctionB::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mink::lambda_of;

    fn grid(r: usize, a: usize, rho: f64) -> Arc<BallGrid> {
        Arc::new(BallGrid::new(r, a, rho).unwrap())
    }

    #[test]
    fn homogeneous_extension_examples() {
        let h = |x: [f64; 2]| -lambda_of(x);
        assert!((homog_extension(h, &MinkVector::new(0.0, 0.0, 2.0)).unwrap() + 2.0).abs() < 1e-15);
        let v = crate::mink::radial_map(&BallPoint::new(0.3, -0.4)).unwrap();
        let hb = homog_extension(h, &v).unwrap();
        assert!((hb + 1.0).abs() < 1e-14);
        assert!(homog_extension(h, &MinkVector::new(2.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn envelope_of_affine_trace_is_affine() {
        let g0 = grid(8, 32, 0.9);
        let p = MinkVector::new(0.2, -0.1, 0.5);
        let r = g0.rho_max;
        let g = BoundaryData::from_fn(32, |t| r * math::cos(t) * 0.2 - r * math::sin(t) * 0.1 - 0.5).unwrap();
        let h = convex_envelope_boundary(&g, g0.clone()).unwrap();
        for (x, v) in g0.nodes.iter().zip(&h.values) {
            assert!((v - (x[0] * p.0[0] + x[1] * p.0[1] - p.0[2])).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_of_abs_cos() {
        let g0 = grid(10, 64, 0.9);
        let r = g0.rho_max;
        let g = BoundaryData::from_fn(64, |t| math::cos(t).abs()).unwrap();
        let h = convex_envelope_boundary(&g, g0.clone()).unwrap();
        // the trace is |x₁|/r on the ring; the envelope is that function inside
        for (x, v) in g0.nodes.iter().zip(&h.values) {
            assert!((v - x[0].abs() / r).abs() < 1e-12, "{x:?} {v}");
        }
    }

    #[test]
    fn convexify_removes_a_raised_node() {
        let g0 = grid(8, 24, 0.9);
        let mut h = PLFunctionB::from_fn(g0.clone(), |x| -lambda_of(x)).unwrap();
        assert!(h.verify_convexity().unwrap());
        let k = g0.node(3, 5);
        let before = h.values[k];
        h.values[k] += 0.5;
        assert!(!h.verify_convexity().unwrap());
        let c = h.convexify().unwrap();
        // the node drops back onto the hull spanned by the other nodes
        let mut far = h.values.clone();
        far[k] += 100.0;
        let others = lower_hull_on_grid(&g0, &far).unwrap().eval(g0.nodes[k]).unwrap();
        assert!((c.values[k] - others).abs() < 1e-9);
        assert!(c.values[k] >= before && c.values[k] < before + 0.01);
        let again = c.convexify().unwrap();
        assert_eq!(again.values, c.values);
    }

    #[test]
    fn support_of_point_sets() {
        let x = BallPoint::new(0.3, 0.1);
        let origin = ConvexSetPoints::new(alloc::vec![MinkVector::ZERO]).unwrap();
        assert_eq!(support_from_points(&origin, &x), 0.0);
        let apex = ConvexSetPoints::new(alloc::vec![MinkVector::new(0.0, 0.0, 2.5)]).unwrap();
        assert_eq!(support_from_points(&apex, &x), -2.5);
        assert!(ConvexSetPoints::new(Vec::new()).is_err());
    }

    #[test]
    fn chi_examples() {
        let c = chi_map(|x| -lambda_of(x), &BallPoint::new(0.0, 0.0)).unwrap();
        assert!(c.0[0].abs() < 1e-9 && c.0[1].abs() < 1e-9 && (c.0[2] - 1.0).abs() < 1e-9);
        let c = chi_map(|x| 0.5 * (x[0] * x[0] + x[1] * x[1]), &BallPoint::new(0.3, 0.0)).unwrap();
        assert!((c.0[0] - 0.3).abs() < 1e-9 && c.0[1].abs() < 1e-9 && (c.0[2] - 0.045).abs() < 1e-9);
        let p = MinkVector::new(0.4, -0.2, 1.3);
        let c = chi_map(|x| x[0] * 0.4 - x[1] * 0.2 - 1.3, &BallPoint::new(-0.5, 0.2)).unwrap();
        assert!((c - p).max_abs() < 1e-9);
    }

    #[test]
    fn legendre_of_half_square_norm() {
        let g0 = grid(24, 64, 0.9);
        let h = PLFunctionB::from_fn(g0.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let u = legendre(&h, 41).unwrap();
        for j in 0..u.n {
            for i in 0..u.n {
                let p = u.node(i, j);
                let r = math::norm2(p);
                if r < 0.85 {
                    assert!((u.values[j * u.n + i] - 0.5 * r * r).abs() < 2e-3);
                }
            }
        }
        assert!(u.max_gradient_norm() <= 1.0 + 1e-6);
        let back = legendre_inverse(&u, g0.clone()).unwrap();
        for (a, b) in back.values.iter().zip(&h.values) {
            assert!(a <= &(b + 1e-12));
        }
    }

    #[test]
    fn legendre_of_negative_lambda() {
        let g0 = grid(32, 96, 0.95);
        let h = PLFunctionB::from_fn(g0, |x| -lambda_of(x)).unwrap();
        let u = legendre(&h, 33).unwrap();
        for j in 0..u.n {
            for i in 0..u.n {
                let p = u.node(i, j);
                let r = math::norm2(p);
                // √(1+r²) is attained at x = p/√(1+r²), inside the grid when r < 2
                if r < 2.0 {
                    assert!((u.values[j * u.n + i] - math::sqrt(1.0 + r * r)).abs() < 2e-3);
                }
            }
        }
    }

    #[test]
    fn boundary_data_interpolates_periodically() {
        let g = BoundaryData::new(alloc::vec![(0.0, 0.0), (PI / 2.0, 1.0), (PI, 0.0), (1.5 * PI, -1.0)]).unwrap();
        assert!((g.eval(PI / 4.0) - 0.5).abs() < 1e-15);
        assert!((g.eval(1.75 * PI) + 0.5).abs() < 1e-15);
        assert!((g.eval(-PI / 4.0) + 0.5).abs() < 1e-15);
        assert!(BoundaryData::new(alloc::vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
    }
}
