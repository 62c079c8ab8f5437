//! Monge–Ampère and area measures of piecewise-linear convex functions on
//! the disk, the graph-side area oracle and the Hessian densities.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::convex::{ConvexFlag, GraphFunctionU, PLFunctionB};
use crate::grid::BallGrid;
use crate::math::{self, convex_hull_2d, polygon_area};
use crate::mink::lambda_of;
use crate::{Error, Result};

/// Facet gradients closer than this are treated as one.
pub const GRADIENT_MERGE_TOL: f64 = 1e-9;

/// Nonnegative node masses on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasureB {
    pub grid: Arc<BallGrid>,
    mass: Vec<f64>,
    total: f64,
}

impl DiscreteMeasureB {
    pub fn new(grid: Arc<BallGrid>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.len() {
            return Err(Error::validation("mass count does not match grid size"));
        }
        if let Some(m) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::validation(alloc::format!("invalid node mass {m}")));
        }
        let total = mass.iter().sum();
        Ok(DiscreteMeasureB { grid, mass, total })
    }

    pub fn zero(grid: Arc<BallGrid>) -> Self {
        let n = grid.len();
        DiscreteMeasureB {
            grid,
            mass: alloc::vec![0.0; n],
            total: 0.0,
        }
    }

    /// `mass_i = f(x_i)·cell_area_i` on interior nodes, zero on the boundary ring.
    pub fn from_density(grid: Arc<BallGrid>, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let cells = grid.cell_areas();
        let mass = (0..grid.len())
            .map(|i| if grid.is_boundary(i) { 0.0 } else { f(grid.nodes[i]) * cells[i] })
            .collect();
        DiscreteMeasureB::new(grid, mass)
    }

    /// Unit mass at one node.
    pub fn dirac(grid: Arc<BallGrid>, node: usize, mass: f64) -> Result<Self> {
        let mut m = alloc::vec![0.0; grid.len()];
        *m.get_mut(node).ok_or_else(|| Error::validation("node index out of range"))? = mass;
        DiscreteMeasureB::new(grid, m)
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn sum_over(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&i| self.mass[i]).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        DiscreteMeasureB::new(self.grid.clone(), self.mass.iter().map(|m| c * m).collect())
    }

    /// Largest mass carried by a boundary-ring node.
    pub fn boundary_mass(&self) -> f64 {
        self.grid.boundary_ring.iter().map(|&b| self.mass[b]).fold(0.0, f64::max)
    }
}

/// Subdifferential polygon of one node.
#[derive(Clone, Debug, PartialEq)]
pub struct SubdifferentialCell {
    pub node: usize,
    pub polygon: Vec<[f64; 2]>,
    pub area: f64,
}

fn merge_gradients(mut g: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(g.len());
    g.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    for p in g {
        if !out
            .iter()
            .any(|q| (q[0] - p[0]).abs() <= GRADIENT_MERGE_TOL && (q[1] - p[1]).abs() <= GRADIENT_MERGE_TOL)
        {
            out.push(p);
        }
    }
    out
}

/// Subdifferential cells of the interior nodes (`None` on the boundary ring).
pub fn subdifferential_cells(h: &PLFunctionB) -> Result<Vec<Option<SubdifferentialCell>>> {
    if h.convex_flag == ConvexFlag::Failed {
        return Err(Error::NotConvex);
    }
    let hull = h.hull()?;
    let inc = hull.incidence();
    let grid = &h.grid;
    Ok((0..grid.len())
        .map(|i| {
            if grid.is_boundary(i) {
                return None;
            }
            if !hull.is_vertex(i) {
                return Some(SubdifferentialCell {
                    node: i,
                    polygon: Vec::new(),
                    area: 0.0,
                });
            }
            let grads = merge_gradients(inc[i].iter().map(|&t| hull.gradient(t)).collect());
            let polygon = convex_hull_2d(&grads);
            let area = polygon_area(&polygon).max(0.0);
            Some(SubdifferentialCell { node: i, polygon, area })
        })
        .collect())
}

/// `MA(h)`: Lebesgue area of each interior node's subdifferential.
pub fn ma_measure(h: &PLFunctionB) -> Result<DiscreteMeasureB> {
    let cells = subdifferential_cells(h)?;
    let mass = cells.iter().map(|c| c.as_ref().map_or(0.0, |c| c.area)).collect();
    DiscreteMeasureB::new(h.grid.clone(), mass)
}

/// `A(h) = λ·MA(h)`.
pub fn area_measure(h: &PLFunctionB) -> Result<DiscreteMeasureB> {
    let ma = ma_measure(h)?;
    weight(&ma, lambda_of)
}

/// `Aᵉ(h) = λᵉ·MA(h)` with `λᵉ(x) = √(1+‖x‖²)`.
pub fn euclidean_area_measure(h: &PLFunctionB) -> Result<DiscreteMeasureB> {
    let ma = ma_measure(h)?;
    weight(&ma, |x| math::sqrt(1.0 + x[0] * x[0] + x[1] * x[1]))
}

fn weight(m: &DiscreteMeasureB, w: impl Fn([f64; 2]) -> f64) -> Result<DiscreteMeasureB> {
    let grid = m.grid.clone();
    let mass = m.mass().iter().zip(&grid.nodes).map(|(a, &x)| a * w(x)).collect();
    DiscreteMeasureB::new(grid, mass)
}

/// Hyperbolic volume form pushed to the disk, `λ^{-3}` times cell areas.
pub fn volume_measure(grid: Arc<BallGrid>) -> Result<DiscreteMeasureB> {
    DiscreteMeasureB::from_density(grid, |x| {
        let l = lambda_of(x);
        1.0 / (l * l * l)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphArea {
    pub area: f64,
    /// Cells dropped because their gradient norm reached 1.
    pub excluded_cells: usize,
}

/// Integrates `√(1 − ‖grad ũ‖²)` over the slope cells whose gradient falls
/// in the grid cell of a node of `omega`.
pub fn area_from_graph(u: &GraphFunctionU, grid: &BallGrid, omega: &[usize]) -> GraphArea {
    let mut member = alloc::vec![false; grid.len()];
    for &i in omega {
        if i < member.len() {
            member[i] = true;
        }
    }
    let s = u.step();
    let cell = s[0] * s[1];
    let mut area = 0.0;
    let mut excluded = 0;
    for j in 0..u.n - 1 {
        for i in 0..u.n - 1 {
            let g = u.cell_gradient(i, j);
            let r2 = g[0] * g[0] + g[1] * g[1];
            if r2 >= 1.0 {
                excluded += 1;
                continue;
            }
            if let Some(node) = nearest_node(grid, g) {
                if member[node] {
                    area += cell * math::sqrt(1.0 - r2);
                }
            }
        }
    }
    GraphArea {
        area,
        excluded_cells: excluded,
    }
}

fn nearest_node(grid: &BallGrid, x: [f64; 2]) -> Option<usize> {
    let r = math::norm2(x);
    let y = if r > grid.rho_max { [x[0] * grid.rho_max / r, x[1] * grid.rho_max / r] } else { x };
    let (t, _) = grid.locate(y)?;
    grid.triangles[t].iter().copied().min_by(|&a, &b| {
        let da = math::norm2(math::sub2(grid.nodes[a], y));
        let db = math::norm2(math::sub2(grid.nodes[b], y));
        da.total_cmp(&db)
    })
}

/// Finite-difference step for Hessians.
pub const HESSIAN_STEP: f64 = 1e-4;

/// Central-difference Hessian of an evaluator.
pub fn hessian_fd(h: &impl Fn([f64; 2]) -> f64, x: [f64; 2], step: f64) -> [[f64; 2]; 2] {
    let e = step;
    let f = |a: f64, b: f64| h([x[0] + a, x[1] + b]);
    let f0 = h(x);
    let hxx = (f(e, 0.0) - 2.0 * f0 + f(-e, 0.0)) / (e * e);
    let hyy = (f(0.0, e) - 2.0 * f0 + f(0.0, -e)) / (e * e);
    let hxy = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4.0 * e * e);
    [[hxx, hxy], [hxy, hyy]]
}

/// `det Hess h(x)`.
pub fn hessian_det_density(h: impl Fn([f64; 2]) -> f64, x: [f64; 2]) -> f64 {
    let m = hessian_fd(&h, x, HESSIAN_STEP);
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// `(λ(x)/2)(tr Hess h − Hess h(x, x))`.
pub fn mean_radius(h: impl Fn([f64; 2]) -> f64, x: [f64; 2]) -> f64 {
    let m = hessian_fd(&h, x, HESSIAN_STEP);
    let tr = m[0][0] + m[1][1];
    let xx = m[0][0] * x[0] * x[0] + 2.0 * m[0][1] * x[0] * x[1] + m[1][1] * x[1] * x[1];
    0.5 * lambda_of(x) * (tr - xx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaLawReport {
    /// `max_i |MA(ch)_i − c²·MA(h)_i|`.
    pub homothety_error: f64,
    /// `max_i |MA(h+A)_i − MA(h)_i|`.
    pub affine_error: f64,
    /// Regions where `MA(max)(ω) < min(MA(h₁)(ω), MA(h₂)(ω))`.
    pub max_law_violations: Vec<usize>,
    /// Regions where the nodewise bound `MA(max)(ω) ≥ Σ_{i∈ω} MA(h_{k(i)})_i`
    /// fails, `k(i)` being the function attaining the max at node `i`.
    pub dominance_violations: Vec<usize>,
    pub regions_tested: usize,
}

impl MaLawReport {
    pub fn exact_laws_hold(&self, tol: f64) -> bool {
        self.homothety_error <= tol && self.affine_error <= tol
    }
}

/// Checks `MA(ch) = c²MA(h)`, `MA(h + ⟨x,q⟩ + b) = MA(h)` nodewise and the
/// max inequality against `other` on every region of `regions`.
pub fn ma_law_checks(
    h: &PLFunctionB,
    c: f64,
    q: [f64; 2],
    b: f64,
    other: &PLFunctionB,
    regions: &[Vec<usize>],
) -> Result<MaLawReport> {
    if !(c > 0.0) {
        return Err(Error::validation("homothety factor must be positive"));
    }
    let base = ma_measure(h)?;
    let scaled = ma_measure(&h.map(|_, v| c * v)?)?;
    let shifted = ma_measure(&h.map(|x, v| v + q[0] * x[0] + q[1] * x[1] + b)?)?;
    let homothety_error = base
        .mass()
        .iter()
        .zip(scaled.mass())
        .fold(0.0, |m, (a, s)| f64::max(m, (s - c * c * a).abs()));
    let affine_error = base
        .mass()
        .iter()
        .zip(shifted.mass())
        .fold(0.0, |m, (a, s)| f64::max(m, (s - a).abs()));

    let ma2 = ma_measure(other)?;
    let mut hmax = h.map(|_, v| v)?;
    for (v, w) in hmax.values.iter_mut().zip(&other.values) {
        *v = v.max(*w);
    }
    let mam = ma_measure(&hmax)?;
    let scale = 1.0 + base.total().max(ma2.total());
    let mut max_law_violations = Vec::new();
    let mut dominance_violations = Vec::new();
    for (k, omega) in regions.iter().enumerate() {
        let lhs = mam.sum_over(omega);
        let rhs = base.sum_over(omega).min(ma2.sum_over(omega));
        if lhs < rhs - 1e-9 * scale {
            max_law_violations.push(k);
        }
        let dom: f64 = omega
            .iter()
            .map(|&i| {
                let (a, b) = (h.values[i], other.values[i]);
                if a > b {
                    base.mass()[i]
                } else if b > a {
                    ma2.mass()[i]
                } else {
                    base.mass()[i].max(ma2.mass()[i])
                }
            })
            .sum();
        if lhs < dom - 1e-9 * scale {
            dominance_violations.push(k);
        }
    }
    Ok(MaLawReport {
        homothety_error,
        affine_error,
        max_law_violations,
        dominance_violations,
        regions_tested: regions.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::legendre;
    use crate::math::PI;

    fn grid(r: usize, a: usize, rho: f64) -> Arc<BallGrid> {
        Arc::new(BallGrid::new(r, a, rho).unwrap())
    }

    #[test]
    fn affine_function_has_no_mass() {
        let g = grid(8, 24, 0.9);
        let h = PLFunctionB::from_fn(g, |x| 0.3 * x[0] - x[1] + 2.0).unwrap();
        let m = ma_measure(&h).unwrap();
        assert!(m.total().abs() < 1e-12);
    }

    #[test]
    fn cone_puts_all_mass_at_the_apex() {
        let g = grid(10, 40, 0.9);
        let h = PLFunctionB::from_fn(g.clone(), math::norm2).unwrap();
        let m = ma_measure(&h).unwrap();
        let others: f64 = m.mass()[1..].iter().sum();
        assert!(others < 1e-9);
        // the apex subdifferential is the polygon with vertices at the facet slopes
        let n = 40.0;
        let expect = 0.5 * n * math::sin(2.0 * PI / n) / math::cos(PI / n).powi(2);
        assert!((m.mass()[0] - expect).abs() < 1e-9);
    }

    #[test]
    fn half_square_norm_total_mass() {
        let g = grid(48, 96, 0.9);
        let h = PLFunctionB::from_fn(g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let m = ma_measure(&h).unwrap();
        let exact = PI * 0.81;
        assert!((m.total() - exact).abs() / exact < 0.05);
    }

    #[test]
    fn hessian_examples() {
        let d = hessian_det_density(|x| -lambda_of(x), [0.6, 0.0]);
        assert!((d - 0.8f64.powi(-4)).abs() < 1e-5);
        let d = hessian_det_density(|x| 0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1]), [0.2, -0.3]);
        assert!((d - 4.0).abs() < 1e-6);
        let r = mean_radius(|x| -lambda_of(x), [0.3, 0.2]);
        assert!((r - 1.0).abs() < 1e-6);
        let r = mean_radius(|x| -2.5 * lambda_of(x), [0.3, 0.2]);
        assert!((r - 2.5).abs() < 1e-6);
        assert!(mean_radius(|x| x[0] - 3.0 * x[1], [0.1, 0.1]).abs() < 1e-6);
    }

    #[test]
    fn graph_oracle_matches_disk_integral() {
        let g = grid(32, 64, 0.9);
        let h = PLFunctionB::from_fn(g.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let u = legendre(&h, 241).unwrap();
        let r = 0.6;
        let omega: Vec<usize> = (0..g.len()).filter(|&i| math::norm2(g.nodes[i]) <= r + 1e-9).collect();
        let a = area_from_graph(&u, &g, &omega);
        // the nearest-node cells reach half a ring past the last ring inside r
        let dr = g.ring_spacing();
        let rr = math::floor(r / dr) * dr + 0.5 * dr;
        let exact = 2.0 * PI / 3.0 * (1.0 - (1.0 - rr * rr).powf(1.5));
        assert!((a.area - exact).abs() / exact < 0.02, "{} {}", a.area, exact);
        assert_eq!(area_from_graph(&u, &g, &[]).area, 0.0);
    }

    #[test]
    fn laws_on_a_quadratic_pair() {
        let g = grid(12, 36, 0.9);
        let h = PLFunctionB::from_fn(g.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let h2 = h.map(|x, v| v + 0.1 * x[0]).unwrap();
        let regions: Vec<Vec<usize>> = (1..6)
            .map(|k| (0..g.len()).filter(|&i| math::norm2(g.nodes[i]) < 0.15 * k as f64).collect())
            .collect();
        let rep = ma_law_checks(&h, 2.0, [0.4, -1.0], 3.0, &h2, &regions).unwrap();
        assert!(rep.exact_laws_hold(1e-9), "{rep:?}");
        assert!(rep.max_law_violations.is_empty());
        assert!(rep.dominance_violations.is_empty());
    }
}
