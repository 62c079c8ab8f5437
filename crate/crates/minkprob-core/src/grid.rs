//! Polar triangulations of the disk of radius `ρ_max < 1`.

use alloc::vec::Vec;

use crate::math::{self, orient2d, PI};
use crate::{Error, Result};

/// Concentric rings of nodes plus a center node. Ring `i` (1-based) has
/// radius `ρ_max·i/R` and `angular` equally spaced nodes; ring `R` is the
/// boundary ring.
#[derive(Clone, Debug, PartialEq)]
pub struct BallGrid {
    pub rings: usize,
    pub angular: usize,
    pub rho_max: f64,
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_ring: Vec<usize>,
}

impl Default for BallGrid {
    fn default() -> Self {
        BallGrid::new(48, 96, 0.995).expect("default grid is valid")
    }
}

impl BallGrid {
    pub fn new(rings: usize, angular: usize, rho_max: f64) -> Result<Self> {
        if rings < 1 || angular < 3 {
            return Err(Error::validation("grid needs at least 1 ring and 3 angular nodes"));
        }
        if !(rho_max > 0.0 && rho_max < 1.0) {
            return Err(Error::validation("rho_max must lie in (0, 1)"));
        }
        let mut nodes = Vec::with_capacity(1 + rings * angular);
        nodes.push([0.0, 0.0]);
        for i in 1..=rings {
            let r = rho_max * i as f64 / rings as f64;
            for j in 0..angular {
                let t = 2.0 * PI * j as f64 / angular as f64;
                nodes.push([r * math::cos(t), r * math::sin(t)]);
            }
        }
        let mut g = BallGrid {
            rings,
            angular,
            rho_max,
            nodes,
            triangles: Vec::new(),
            boundary_ring: Vec::new(),
        };
        let mut tris = Vec::with_capacity(angular * (2 * rings - 1));
        for j in 0..angular {
            tris.push([0, g.node(1, j), g.node(1, j + 1)]);
        }
        for i in 1..rings {
            for j in 0..angular {
                let a = g.node(i, j);
                let b = g.node(i + 1, j);
                let c = g.node(i + 1, j + 1);
                let d = g.node(i, j + 1);
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            }
        }
        g.triangles = tris;
        g.boundary_ring = (0..angular).map(|j| g.node(rings, j)).collect();
        Ok(g)
    }

    /// Node index of ring `ring` (0 is the center) and angular index `j` (mod `angular`).
    pub fn node(&self, ring: usize, j: usize) -> usize {
        if ring == 0 {
            0
        } else {
            1 + (ring - 1) * self.angular + j % self.angular
        }
    }

    /// `(ring, angular index)` of a node.
    pub fn ring_of(&self, node: usize) -> (usize, usize) {
        if node == 0 {
            (0, 0)
        } else {
            (1 + (node - 1) / self.angular, (node - 1) % self.angular)
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Grid whose interior nodes' dual cells reach exactly radius `r`: the
    /// boundary ring sits half a ring spacing beyond it.
    pub fn covering(r: f64, rings: usize, angular: usize) -> Result<Self> {
        if rings < 1 {
            return Err(Error::validation("grid needs at least 1 ring"));
        }
        BallGrid::new(rings, angular, r * rings as f64 / (rings as f64 - 0.5))
    }

    pub fn ring_radius(&self, ring: usize) -> f64 {
        self.rho_max * ring as f64 / self.rings as f64
    }

    pub fn ring_spacing(&self) -> f64 {
        self.rho_max / self.rings as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * (j % self.angular) as f64 / self.angular as f64
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.ring_of(node).0 == self.rings
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&n| !self.is_boundary(n))
    }

    /// Barycentric dual areas: one third of each incident triangle.
    pub fn cell_areas(&self) -> Vec<f64> {
        let mut a = alloc::vec![0.0; self.nodes.len()];
        for t in &self.triangles {
            let area = 0.5 * orient2d(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]);
            for &v in t {
                a[v] += area / 3.0;
            }
        }
        a
    }

    /// Hyperbolic dual volumes: one third of `∫ λ⁻³ dx` over each incident
    /// triangle, integrated with a 7-point rule.
    pub fn hyperbolic_cell_volumes(&self) -> Vec<f64> {
        let mut v = alloc::vec![0.0; self.nodes.len()];
        for t in &self.triangles {
            let vol = triangle_hyperbolic_volume(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]);
            for &n in t {
                v[n] += vol / 3.0;
            }
        }
        v
    }

    /// Largest spacing to the immediate grid neighbours of `node`.
    pub fn local_spacing(&self, node: usize) -> f64 {
        let (ring, _) = self.ring_of(node);
        let dr = self.ring_spacing();
        let outer = (ring + 1).min(self.rings);
        let dtheta = 2.0 * PI / self.angular as f64;
        dr.max(self.ring_radius(outer) * dtheta)
    }

    /// All nodes other than `node` within Euclidean distance `radius` of it.
    pub fn nodes_within(&self, node: usize, radius: f64) -> Vec<usize> {
        let x = self.nodes[node];
        let (ring, _) = self.ring_of(node);
        let k = (radius / self.ring_spacing()) as usize + 1;
        let lo = ring.saturating_sub(k);
        let hi = (ring + k).min(self.rings);
        let mut out = Vec::new();
        for i in lo..=hi {
            let range = if i == 0 { 0..1 } else { 0..self.angular };
            for j in range {
                let n = self.node(i, j);
                if n == node {
                    continue;
                }
                let y = self.nodes[n];
                let d2 = (x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]);
                if d2 <= radius * radius {
                    out.push(n);
                }
            }
        }
        out
    }

    /// Triangle containing `x` with barycentric coordinates. Points slightly
    /// outside the boundary polygon are attributed to the nearest boundary
    /// triangle (linear extrapolation).
    pub fn locate(&self, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let r = math::norm2(x);
        if r > self.rho_max * (1.0 + 1e-9) + 1e-12 {
            return None;
        }
        let dtheta = 2.0 * PI / self.angular as f64;
        let mut theta = math::atan2(x[1], x[0]);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        let j = ((theta / dtheta) as usize).min(self.angular - 1);
        let i = ((r / self.ring_spacing()) as usize).min(self.rings - 1);
        let mut best: Option<(usize, [f64; 3])> = None;
        let mut best_min = f64::NEG_INFINITY;
        for ring in i.saturating_sub(1)..=(i + 1).min(self.rings - 1) {
            for dj in [0usize, self.angular - 1, 1] {
                let jj = (j + dj) % self.angular;
                for t in self.triangles_in_cell(ring, jj) {
                    let b = self.barycentric(t, x);
                    let m = b[0].min(b[1]).min(b[2]);
                    if m > best_min {
                        best_min = m;
                        best = Some((t, b));
                    }
                }
                if best_min >= -1e-12 {
                    return best;
                }
            }
        }
        best
    }

    /// Triangle indices of the annular cell between rings `ring` and
    /// `ring+1` and angles `j`, `j+1`.
    fn triangles_in_cell(&self, ring: usize, j: usize) -> impl Iterator<Item = usize> {
        if ring == 0 {
            j..j + 1
        } else {
            let s = self.angular + 2 * ((ring - 1) * self.angular + j);
            s..s + 2
        }
    }

    pub fn barycentric(&self, t: usize, x: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        barycentric(self.nodes[a], self.nodes[b], self.nodes[c], x)
    }

    /// Linear interpolation of nodal values in the grid triangulation.
    pub fn interpolate(&self, values: &[f64], x: [f64; 2]) -> Option<f64> {
        let (t, b) = self.locate(x)?;
        let [i, j, k] = self.triangles[t];
        Some(b[0] * values[i] + b[1] * values[j] + b[2] * values[k])
    }
}

pub fn barycentric(a: [f64; 2], b: [f64; 2], c: [f64; 2], x: [f64; 2]) -> [f64; 3] {
    let d = orient2d(a, b, c);
    let l0 = orient2d(x, b, c) / d;
    let l1 = orient2d(a, x, c) / d;
    [l0, l1, 1.0 - l0 - l1]
}

/// `∫_T λ(x)⁻³ dx`, the hyperbolic area of a projective-model triangle,
/// by a degree-5 symmetric rule on a 4-fold subdivision.
pub fn triangle_hyperbolic_volume(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let mid = |p: [f64; 2], q: [f64; 2]| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    let parts = [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]];
    parts.iter().map(|t| dunavant5(t[0], t[1], t[2])).sum()
}

fn dunavant5(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    const W: [f64; 3] = [0.225, 0.132_394_152_788_506_2, 0.125_939_180_544_827_1];
    const A1: f64 = 0.059_715_871_789_769_8;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_3;
    let area = 0.5 * orient2d(a, b, c).abs();
    let f = |l: [f64; 3]| {
        let x = [
            l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
            l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
        ];
        let lam = crate::mink::lambda_of(x);
        1.0 / (lam * lam * lam)
    };
    let third = 1.0 / 3.0;
    let mut s = W[0] * f([third, third, third]);
    for l in [[A1, B1, B1], [B1, A1, B1], [B1, B1, A1]] {
        s += W[1] * f(l);
    }
    for l in [[A2, B2, B2], [B2, A2, B2], [B2, B2, A2]] {
        s += W[2] * f(l);
    }
    s * area
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_orientation() {
        let g = BallGrid::new(4, 12, 0.9).unwrap();
        assert_eq!(g.len(), 1 + 4 * 12);
        assert_eq!(g.triangles.len(), 12 * (2 * 4 - 1));
        for t in &g.triangles {
            assert!(orient2d(g.nodes[t[0]], g.nodes[t[1]], g.nodes[t[2]]) > 0.0);
        }
        assert_eq!(g.boundary_ring.len(), 12);
        assert!(g.boundary_ring.iter().all(|&b| g.is_boundary(b)));
    }

    #[test]
    fn cell_areas_sum_to_polygon_area() {
        let g = BallGrid::new(6, 20, 0.8).unwrap();
        let total: f64 = g.cell_areas().iter().sum();
        let polygon = 0.5 * 20.0 * 0.64 * math::sin(2.0 * PI / 20.0);
        assert!((total - polygon).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_linear_functions() {
        let g = BallGrid::new(7, 24, 0.95).unwrap();
        let vals: Vec<f64> = g.nodes.iter().map(|p| 0.3 * p[0] - 1.2 * p[1] + 0.5).collect();
        for x in [[0.0, 0.0], [0.31, -0.2], [-0.5, 0.77], [0.0, 0.94], [0.001, 0.0]] {
            let v = g.interpolate(&vals, x).unwrap();
            assert!((v - (0.3 * x[0] - 1.2 * x[1] + 0.5)).abs() < 1e-12);
        }
        assert!(g.interpolate(&vals, [0.99, 0.0]).is_none());
    }

    #[test]
    fn hyperbolic_volume_of_small_disk() {
        // hyperbolic area of the projective disk of radius ρ is 2π(1/√(1−ρ²) − 1)
        let g = BallGrid::new(40, 160, 0.6).unwrap();
        let total: f64 = g.hyperbolic_cell_volumes().iter().sum();
        let exact = 2.0 * PI * (1.0 / math::sqrt(1.0 - 0.36) - 1.0);
        assert!((total - exact).abs() / exact < 2e-3);
    }
}
