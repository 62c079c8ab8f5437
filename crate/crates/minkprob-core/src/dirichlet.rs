//! The Dirichlet problem `MA(h) = μ` on the disk with prescribed boundary
//! values, the comparison principle and the Alexandrov–Heinz probe.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::convex::{convex_envelope_boundary, lower_hull_on_grid, BoundaryData, ConvexFlag, PLFunctionB};
use crate::grid::BallGrid;
use crate::math::{self, convex_hull_2d, polygon_area};
use crate::measure::{ma_measure, DiscreteMeasureB};
use crate::monotone::{self, local_cell, Evaluation, MaSystem, SolveOptions, SolveReport};
use crate::{Error, Result};

/// Starting point of the monotone iteration. Both are subsolutions above
/// the solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    /// The convex envelope `h_g` of the boundary data.
    Envelope,
    /// `h_g − a(ρ² − |x|²)/2`, with `a` halved until it is a subsolution.
    Paraboloid(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletOptions {
    pub solve: SolveOptions,
    pub init: Init,
    /// Stencil radius of the per-node update, in local grid spacings.
    pub stencil: f64,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        DirichletOptions {
            solve: SolveOptions::default(),
            init: Init::Envelope,
            stencil: 2.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub h: PLFunctionB,
    pub report: SolveReport,
    /// Per-node `(MA − μ)/(cell + μ)` of the returned function.
    pub residuals: Vec<f64>,
}

struct DirichletSystem<'a> {
    grid: &'a BallGrid,
    nodes: Vec<usize>,
    var_of: Vec<Option<usize>>,
    fixed: Vec<f64>,
    target: Vec<f64>,
    cell: Vec<f64>,
    stencils: Vec<Vec<usize>>,
}

impl DirichletSystem<'_> {
    fn full(&self, u: &[f64]) -> Vec<f64> {
        let mut z = self.fixed.clone();
        for (k, &i) in self.nodes.iter().enumerate() {
            z[i] = u[k];
        }
        z
    }

    fn value(&self, j: usize, u: &[f64]) -> f64 {
        match self.var_of[j] {
            Some(l) => u[l],
            None => self.fixed[j],
        }
    }
}

/// Box large enough to contain any subdifferential of the local data.
fn slope_bound(x: [f64; 2], h: f64, nbrs: &[([f64; 2], f64)]) -> f64 {
    let s = nbrs
        .iter()
        .map(|(y, v)| (v - h).abs() / math::norm2(math::sub2(*y, x)))
        .fold(0.0, f64::max);
    100.0 * s + 10.0
}

impl MaSystem for DirichletSystem<'_> {
    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn target(&self, k: usize) -> f64 {
        self.target[k]
    }

    fn cell(&self, k: usize) -> f64 {
        self.cell[k]
    }

    fn f_local(&self, k: usize, uk: f64, u: &[f64], links: &[usize]) -> f64 {
        let i = self.nodes[k];
        let x = self.grid.nodes[i];
        let nbrs: Vec<([f64; 2], f64)> = self.stencils[k]
            .iter()
            .chain(links)
            .filter(|&&j| j != i)
            .map(|&j| (self.grid.nodes[j], self.value(j, u)))
            .collect();
        let bound = slope_bound(x, uk, &nbrs);
        local_cell(x, uk, nbrs.iter().copied(), bound).area()
    }

    fn evaluate(&self, u: &[f64]) -> Result<Evaluation> {
        let z = self.full(u);
        let hull = lower_hull_on_grid(self.grid, &z)?;
        let pts = hull.points();
        let inc = hull.incidence();
        // facet gradients on both sides of each hull edge
        let mut edges: BTreeMap<(usize, usize), ([f64; 2], Option<[f64; 2]>)> = BTreeMap::new();
        for t in hull.triangles() {
            let g = hull.gradient(t);
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                edges
                    .entry(key)
                    .and_modify(|v| v.1 = Some(g))
                    .or_insert((g, None));
            }
        }
        let n = self.nodes.len();
        let mut f = alloc::vec![0.0; n];
        let mut links: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|k| alloc::vec![(k, 0.0)]).collect();
        for (k, &i) in self.nodes.iter().enumerate() {
            if !hull.is_vertex(i) {
                continue;
            }
            let grads: Vec<[f64; 2]> = inc[i].iter().map(|&t| hull.gradient(t)).collect();
            links[k] = inc[i].iter().flatten().copied().filter(|&j| j != i).collect();
            links[k].sort_unstable();
            links[k].dedup();
            f[k] = polygon_area(&convex_hull_2d(&grads)).max(0.0);
        }
        for (&(a, b), &(g1, g2)) in &edges {
            let Some(g2) = g2 else { continue };
            let len = math::norm2(math::sub2(g1, g2));
            if len == 0.0 {
                continue;
            }
            let w = len / math::norm2(math::sub2(pts[a], pts[b]));
            let (va, vb) = (self.var_of[a], self.var_of[b]);
            if let Some(ka) = va {
                rows[ka][0].1 += w;
                if let Some(kb) = vb {
                    rows[ka].push((kb, -w));
                }
            }
            if let Some(kb) = vb {
                rows[kb][0].1 += w;
                if let Some(ka) = va {
                    rows[kb].push((ka, -w));
                }
            }
        }
        Ok(Evaluation { f, rows, links })
    }

    fn project(&self, u: &mut [f64]) -> Result<()> {
        let z = self.full(u);
        let hv = lower_hull_on_grid(self.grid, &z)?.node_values();
        for (k, &i) in self.nodes.iter().enumerate() {
            u[k] = u[k].min(hv[i]);
        }
        Ok(())
    }

    fn lift_direction(&self) -> Option<Vec<f64>> {
        // curvature grows like |x|, matching the width of polar cells, so
        // envelope creases through the centre do not cap the lift
        let r3 = self.grid.rho_max * self.grid.rho_max * self.grid.rho_max;
        Some(
            self.nodes
                .iter()
                .map(|&i| {
                    let r = math::norm2(self.grid.nodes[i]);
                    (r3 - r * r * r) / 3.0
                })
                .collect(),
        )
    }
}

fn boundary_values(grid: &BallGrid, g: &BoundaryData) -> Vec<f64> {
    let mut z = alloc::vec![0.0; grid.len()];
    for (j, &b) in grid.boundary_ring.iter().enumerate() {
        z[b] = g.eval(grid.angle(j));
    }
    z
}

fn build_system<'a>(mu: &DiscreteMeasureB, g: &BoundaryData, grid: &'a BallGrid, stencil: f64) -> DirichletSystem<'a> {
    let nodes: Vec<usize> = grid.interior_nodes().collect();
    let mut var_of = alloc::vec![None; grid.len()];
    for (k, &i) in nodes.iter().enumerate() {
        var_of[i] = Some(k);
    }
    let cells = grid.cell_areas();
    DirichletSystem {
        grid,
        fixed: boundary_values(grid, g),
        target: nodes.iter().map(|&i| mu.mass()[i]).collect(),
        cell: nodes.iter().map(|&i| cells[i]).collect(),
        stencils: nodes
            .iter()
            .map(|&i| grid.nodes_within(i, stencil * grid.local_spacing(i)))
            .collect(),
        nodes,
        var_of,
    }
}

/// Solves `MA(h) = μ` with `h = g` on the outer ring by monotone descent
/// from a subsolution. The data `g(θ)` is imposed at the ring node with
/// angle `θ`.
pub fn solve_dirichlet(mu: &DiscreteMeasureB, g: &BoundaryData, opts: &DirichletOptions) -> Result<DirichletSolution> {
    let grid = mu.grid.clone();
    if mu.boundary_mass() > 0.0 {
        return Err(Error::validation("prescribed measure charges the boundary ring"));
    }
    if !mu.total().is_finite() {
        return Err(Error::validation("prescribed measure has infinite mass"));
    }
    let sys = build_system(mu, g, &grid, opts.stencil);
    let env = convex_envelope_boundary(g, grid.clone())?;
    let env_u: Vec<f64> = sys.nodes.iter().map(|&i| env.values[i]).collect();
    let u0 = match opts.init {
        Init::Envelope => env_u,
        Init::Paraboloid(a0) => paraboloid_start(&sys, &env_u, a0, opts.solve.tol)?,
    };
    let (u, report) = monotone::solve(&sys, u0, &opts.solve)?;
    if !report.converged {
        return Err(Error::NonConvergence {
            what: "Dirichlet solve".into(),
            iterations: report.sweeps + report.newton_steps,
            residual: report.max_residual,
        });
    }
    let values = sys.full(&u);
    let f = sys.evaluate(&u)?.f;
    let mut residuals = alloc::vec![0.0; grid.len()];
    for (k, &i) in sys.nodes.iter().enumerate() {
        residuals[i] = (f[k] - sys.target[k]) / (sys.cell[k] + sys.target[k]);
    }
    Ok(DirichletSolution {
        h: PLFunctionB {
            grid,
            values,
            convex_flag: ConvexFlag::Verified,
        },
        report,
        residuals,
    })
}

fn paraboloid_start(sys: &DirichletSystem<'_>, env: &[f64], a0: f64, tol: f64) -> Result<Vec<f64>> {
    let rho = sys.grid.rho_max;
    let mut a = a0;
    for _ in 0..30 {
        let mut u: Vec<f64> = sys
            .nodes
            .iter()
            .zip(env)
            .map(|(&i, e)| {
                let x = sys.grid.nodes[i];
                e - 0.5 * a * (rho * rho - math::dot2(x, x))
            })
            .collect();
        sys.project(&mut u)?;
        let f = sys.evaluate(&u)?.f;
        let ok = f
            .iter()
            .enumerate()
            .all(|(k, fk)| *fk <= sys.target[k] + 0.5 * tol * (sys.cell[k] + sys.target[k]));
        if ok {
            return Ok(u);
        }
        a *= 0.5;
    }
    Ok(env.to_vec())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// Whether `MA(h₁) ≤ MA(h₂)` held nodewise within the tolerance.
    pub applicable: bool,
    pub min_all: f64,
    pub min_boundary: f64,
    pub argmin: usize,
    /// `min_boundary ≤ min_all + tol`.
    pub attained_on_boundary: bool,
}

/// Checks that `min(h₁ − h₂)` is attained on the outer ring when
/// `MA(h₁) ≤ MA(h₂)`. Measures are compared in density units: node `i`
/// passes when `MA₁ ≤ MA₂ + measure_tol·(cell + MA₂)`.
pub fn comparison_check(h1: &PLFunctionB, h2: &PLFunctionB, measure_tol: f64, tol: f64) -> Result<ComparisonReport> {
    if *h1.grid != *h2.grid {
        return Err(Error::validation("functions live on different grids"));
    }
    let grid = &h1.grid;
    let m1 = ma_measure(h1)?;
    let m2 = ma_measure(h2)?;
    let cells = grid.cell_areas();
    let applicable = grid
        .interior_nodes()
        .all(|i| m1.mass()[i] <= m2.mass()[i] + measure_tol * (cells[i] + m2.mass()[i]));
    let mut min_all = f64::INFINITY;
    let mut argmin = 0;
    let mut min_boundary = f64::INFINITY;
    for i in 0..grid.len() {
        let d = h1.values[i] - h2.values[i];
        if d < min_all {
            min_all = d;
            argmin = i;
        }
        if grid.is_boundary(i) {
            min_boundary = min_boundary.min(d);
        }
    }
    Ok(ComparisonReport {
        applicable,
        min_all,
        min_boundary,
        argmin,
        attained_on_boundary: min_boundary <= min_all + tol,
    })
}

/// Boundary data of the Alexandrov–Heinz probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeBoundary {
    Zero,
    /// Zero at `±e₁`, rising linearly in the angle to 1 at `±e₂`.
    Tent,
}

impl ProbeBoundary {
    pub fn data(self, samples: usize) -> Result<BoundaryData> {
        match self {
            ProbeBoundary::Zero => BoundaryData::from_fn(samples, |_| 0.0),
            ProbeBoundary::Tent => BoundaryData::from_fn(samples, |t| {
                let s = math::rem_euclid(t, core::f64::consts::PI);
                s.min(core::f64::consts::PI - s) / core::f64::consts::FRAC_PI_2
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeLevel {
    pub rings: usize,
    pub angular: usize,
    pub h0: f64,
    pub report: SolveReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlexandrovHeinzReport {
    pub c0: f64,
    pub levels: Vec<ProbeLevel>,
    /// `−h(0)` on the finest level.
    pub c: f64,
    /// `(max − min)/max` of `−h(0)` across levels.
    pub spread: f64,
}

/// Solves `MA(h) = c₀·L` with the given boundary data at each refinement
/// level and reports the depth `−h(0)`.
pub fn alexandrov_heinz_probe(
    c0: f64,
    boundary: ProbeBoundary,
    levels: &[(usize, usize)],
    rho_max: f64,
    opts: &DirichletOptions,
) -> Result<AlexandrovHeinzReport> {
    if !(c0 >= 0.0) {
        return Err(Error::validation("c0 must be nonnegative"));
    }
    let mut out = Vec::with_capacity(levels.len());
    for &(rings, angular) in levels {
        let grid = Arc::new(BallGrid::new(rings, angular, rho_max)?);
        let mu = DiscreteMeasureB::from_density(grid.clone(), |_| c0)?;
        let g = boundary.data(angular)?;
        let sol = solve_dirichlet(&mu, &g, opts)?;
        out.push(ProbeLevel {
            rings,
            angular,
            h0: sol.h.values[0],
            report: sol.report,
        });
    }
    let depths: Vec<f64> = out.iter().map(|l| -l.h0).collect();
    let hi = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = depths.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AlexandrovHeinzReport {
        c0,
        c: depths.last().copied().unwrap_or(0.0),
        spread: if hi > 0.0 { (hi - lo) / hi } else { 0.0 },
        levels: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Arc<BallGrid> {
        Arc::new(BallGrid::new(12, 24, 0.9).unwrap())
    }

    #[test]
    fn zero_measure_returns_envelope() {
        let grid = small();
        let g = BoundaryData::from_fn(24, |t| math::cos(t).abs()).unwrap();
        let sol = solve_dirichlet(&DiscreteMeasureB::zero(grid.clone()), &g, &DirichletOptions::default()).unwrap();
        let env = convex_envelope_boundary(&g, grid).unwrap();
        assert!(sol.h.max_abs_diff(&env) < 1e-12);
        assert_eq!(sol.report.sweeps + sol.report.newton_steps, 0);
    }

    #[test]
    fn recovers_quadratic_on_small_grid() {
        let grid = small();
        let rho = grid.rho_max;
        let exact = PLFunctionB::from_fn(grid.clone(), |x| 0.5 * math::dot2(x, x)).unwrap();
        let mu = ma_measure(&exact).unwrap();
        let g = BoundaryData::from_fn(24, |_| 0.5 * rho * rho).unwrap();
        let sol = solve_dirichlet(&mu, &g, &DirichletOptions::default()).unwrap();
        assert!(sol.report.converged && sol.report.monotone);
        assert!(sol.h.max_abs_diff(&exact) < 2e-3, "{}", sol.h.max_abs_diff(&exact));
    }

    #[test]
    fn dirac_gives_cone_with_unit_apex_cell() {
        let grid = small();
        let mu = DiscreteMeasureB::dirac(grid.clone(), 0, 1.0).unwrap();
        let sol = solve_dirichlet(&mu, &BoundaryData::constant(0.0), &DirichletOptions::default()).unwrap();
        let ma = ma_measure(&sol.h).unwrap();
        assert!((ma.mass()[0] - 1.0).abs() < 2e-3);
        assert!(sol.h.values[0] < 0.0);
        // cone: values linear in the radius along each ray
        let apex = sol.h.values[0];
        for &i in &[grid.node(6, 0), grid.node(6, 5)] {
            let r = math::norm2(grid.nodes[i]);
            let ray_end = sol.h.values[grid.node(12, grid.ring_of(i).1)];
            let expect = apex + (ray_end - apex) * r / grid.rho_max;
            assert!((sol.h.values[i] - expect).abs() < 2e-2 * apex.abs());
        }
    }

    #[test]
    fn rejects_boundary_mass() {
        let grid = small();
        let b = grid.boundary_ring[0];
        let mut m = alloc::vec![0.0; grid.len()];
        m[b] = 1.0;
        let mu = DiscreteMeasureB::new(grid, m).unwrap();
        assert!(matches!(
            solve_dirichlet(&mu, &BoundaryData::constant(0.0), &DirichletOptions::default()),
            Err(Error::Validation(_))
        ));
    }
}
