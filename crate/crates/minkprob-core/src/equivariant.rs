//! The equivariant Minkowski problem for a surface group Γ_τ ⊂ Isom(ℝ^{2,1}).
//!
//! A τ-equivariant support function is stored by its hyperbolic values
//! `h̄ = h/λ` at the representatives of a fundamental-domain grid; any other
//! value follows from `H(γY) = H(Y) + ⟨γY, τ_γ⟩`. The area measure at a
//! representative is the intrinsic area of the corresponding face of the
//! discrete convex set, computed as a subdifferential area in a chart
//! recentred at the node (a boost taking it to `e₃`, where `λ = 1` and the
//! projective gradient plane is the face's own plane).

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::convex::{BoundaryData, CircleEnvelope};
use crate::domain::{boost_to_origin, disk, DomainGrid};
use crate::lattice::{element, enumerate_elements, Cocycle};
use crate::math::{self, gauss_legendre_on, mat_vec, PI};
use crate::mink::{self, BallPoint, MinkVector};
use crate::monotone::{self, local_cell, Cell, Entry, Evaluation, MaSystem, SolveOptions, SolveReport, BOX_LABEL};
use crate::{Error, Result};

/// A fundamental-domain grid together with a cocycle and its `h̄_τ`.
#[derive(Clone, Debug)]
pub struct EqSpace {
    pub grid: DomainGrid,
    pub cocycle: Cocycle,
    /// `h̄_τ` at the representatives.
    pub h_tau: Vec<f64>,
    /// Per representative: stencil in its centred chart, `h = a + b·u[var]`.
    charts: Vec<Vec<Entry>>,
    /// Per node: `⟨v(node), τ_w⟩` for the word `w` taking its representative to it.
    node_shift: Vec<f64>,
}

impl EqSpace {
    pub fn new(grid: DomainGrid, cocycle: Cocycle, h_tau: Vec<f64>) -> Result<Arc<Self>> {
        if cocycle.translations.len() != grid.lattice.rank() {
            return Err(Error::validation("cocycle does not match the lattice"));
        }
        if h_tau.len() != grid.num_vars() {
            return Err(Error::validation("h_tau has the wrong length"));
        }
        let lat = &grid.lattice;
        let charts = grid
            .stencils
            .iter()
            .enumerate()
            .map(|(k, st)| {
                let psi = boost_to_origin(&grid.points[grid.reps[k]]);
                st.iter()
                    .map(|s| {
                        let tau = element(lat, Some(&cocycle), &s.word).translation;
                        let q = mat_vec(&psi, &s.point.0);
                        Entry {
                            x: [q[0] / q[2], q[1] / q[2]],
                            a: s.point.inner(&tau) / q[2],
                            b: 1.0 / q[2],
                            var: Some(s.var),
                        }
                    })
                    .collect()
            })
            .collect();
        let node_shift = grid
            .points
            .iter()
            .zip(&grid.from_rep)
            .map(|(p, w)| p.inner(&element(lat, Some(&cocycle), w).translation))
            .collect();
        Ok(Arc::new(EqSpace {
            grid,
            cocycle,
            h_tau,
            charts,
            node_shift,
        }))
    }

    /// τ = 0: the domain of dependence is the future cone of the origin and
    /// `h̄_τ ≡ 0`.
    pub fn fuchsian(grid: DomainGrid) -> Result<Arc<Self>> {
        let c = Cocycle::zero(&grid.lattice);
        let h = alloc::vec![0.0; grid.num_vars()];
        EqSpace::new(grid, c, h)
    }

    /// Coboundary `τ_γ = γt₀ − t₀`: the domain is the future cone of `−t₀`,
    /// so `h̄_τ(v) = −⟨v, t₀⟩`.
    pub fn coboundary(grid: DomainGrid, t0: MinkVector) -> Result<Arc<Self>> {
        let c = Cocycle::coboundary(&grid.lattice, t0);
        let h = grid.reps.iter().map(|&r| -grid.points[r].inner(&t0)).collect();
        EqSpace::new(grid, c, h)
    }

    pub fn num_vars(&self) -> usize {
        self.grid.num_vars()
    }

    /// The centred-chart stencil of representative `k`.
    pub fn chart(&self, k: usize) -> &[Entry] {
        &self.charts[k]
    }

    /// Hyperbolic values at all nodes from values at representatives.
    pub fn node_hbar(&self, u: &[f64]) -> Vec<f64> {
        self.grid
            .var_of
            .iter()
            .zip(&self.node_shift)
            .map(|(&k, s)| u[k] + s)
            .collect()
    }

    fn cell(&self, k: usize, uk: f64, u: &[f64]) -> Cell {
        let st = &self.charts[k];
        let vals = st.iter().map(|e| if e.var == Some(k) { e.a + e.b * uk } else { e.value(u) });
        let slope = st
            .iter()
            .zip(vals.clone())
            .map(|(e, v)| (v - uk).abs() / math::norm2(e.x))
            .fold(0.0, f64::max);
        local_cell([0.0, 0.0], uk, st.iter().map(|e| e.x).zip(vals), 100.0 * (1.0 + slope))
    }

    /// A-masses at the representatives, plus the labelled cells.
    fn cells(&self, u: &[f64]) -> Result<Vec<Cell>> {
        (0..self.num_vars())
            .map(|k| {
                let c = self.cell(k, u[k], u);
                if !c.is_empty() && c.labels.contains(&BOX_LABEL) {
                    return Err(Error::domain("stencil does not bound the subdifferential"));
                }
                Ok(c)
            })
            .collect()
    }

    pub fn area_masses(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.cells(u)?.iter().map(|c| c.area()).collect())
    }

    /// Representatives whose value lies above the lower hull of their
    /// chart stencil (empty subdifferential).
    pub fn nonconvex_nodes(&self, u: &[f64]) -> Vec<usize> {
        (0..self.num_vars())
            .filter(|&k| self.cell(k, u[k], u).is_empty())
            .collect()
    }

    /// Lowers each representative onto the lower hull of its chart stencil,
    /// repeating until the glued function is locally convex.
    pub fn convexify(&self, u: &mut [f64]) -> Result<()> {
        for _ in 0..200 {
            let mut changed = false;
            for k in 0..self.num_vars() {
                if !self.cell(k, u[k], u).is_empty() {
                    continue;
                }
                let low = self.charts[k].iter().map(|e| e.value(u)).fold(u[k], f64::min);
                let (mut lo, mut hi) = (low - 1e-12 * (1.0 + low.abs()), u[k]);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if self.cell(k, mid, u).is_empty() {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo <= 1e-14 * (1.0 + lo.abs()) {
                        break;
                    }
                }
                u[k] = lo;
                changed = true;
            }
            if !changed {
                return Ok(());
            }
        }
        Err(Error::NonConvergence {
            what: "local convexification".into(),
            iterations: 200,
            residual: self.nonconvex_nodes(u).len() as f64,
        })
    }
}

/// A τ-equivariant support function on a fundamental-domain grid.
#[derive(Clone, Debug)]
pub struct EquivariantSupport {
    pub space: Arc<EqSpace>,
    /// `h̄` at the representatives.
    pub hbar: Vec<f64>,
}

impl EquivariantSupport {
    pub fn new(space: Arc<EqSpace>, hbar: Vec<f64>) -> Result<Self> {
        if hbar.len() != space.num_vars() {
            return Err(Error::validation("values do not match the representatives"));
        }
        if hbar.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite support value"));
        }
        Ok(EquivariantSupport { space, hbar })
    }

    /// `h̄_τ` itself.
    pub fn h_tau(space: &Arc<EqSpace>) -> Self {
        EquivariantSupport {
            space: space.clone(),
            hbar: space.h_tau.clone(),
        }
    }

    /// Constant hyperbolic values `c + h̄_τ`.
    pub fn shifted_tau(space: &Arc<EqSpace>, c: f64) -> Self {
        EquivariantSupport {
            space: space.clone(),
            hbar: space.h_tau.iter().map(|t| t + c).collect(),
        }
    }

    /// From a τ-equivariant function on ℍ², sampled at the representatives.
    pub fn from_hbar_fn(space: &Arc<EqSpace>, f: impl Fn(&MinkVector) -> f64) -> Result<Self> {
        let g = &space.grid;
        let hbar = g.reps.iter().map(|&r| f(&g.points[r])).collect();
        EquivariantSupport::new(space.clone(), hbar)
    }

    /// Ball values `h = λ·h̄` at every grid node.
    pub fn node_values(&self) -> Vec<f64> {
        self.space
            .node_hbar(&self.hbar)
            .iter()
            .zip(&self.space.grid.points)
            .map(|(h, p)| h / p.0[2])
            .collect()
    }

    /// `h(x)` for any `x` in the open disk: reduce `x = w̄(y)` into the
    /// polygon, interpolate at `y`, and pull back by the affine element of `w`.
    pub fn eval(&self, x: [f64; 2]) -> Result<f64> {
        let g = &self.space.grid;
        let (y, w) = g.polygon.reduce(&g.lattice, x)?;
        let values = self.node_values();
        let sigma = element(&g.lattice, Some(&self.space.cocycle), &w);
        let yv = g
            .interpolate(&values, y)
            .ok_or_else(|| Error::domain("reduced point not found in the domain grid"))?;
        // the pulled-back point is y up to rounding
        mink::act_on_ball_function(&sigma, |_| yv, &BallPoint(x))
    }

    /// `h̄(v(x)) = h(x)/λ(x)`.
    pub fn eval_hbar(&self, v: &MinkVector) -> Result<f64> {
        Ok(self.eval(disk(v))? * v.0[2])
    }

    /// `max |(σ·h)(x) − h(x)|` over the generators σ and the given points.
    pub fn equivariance_defect(&self, points: &[[f64; 2]]) -> Result<f64> {
        let g = &self.space.grid;
        let mut worst = 0.0_f64;
        for gen in 0..g.lattice.rank() {
            let w = [crate::lattice::Letter {
                generator: gen,
                inverse: false,
            }];
            let sigma = element(&g.lattice, Some(&self.space.cocycle), &w);
            for &x in points {
                let hx = self.eval(x)?;
                let acted = mink::act_on_ball_function(&sigma, |p| self.eval(p.0).unwrap_or(f64::NAN), &BallPoint(x))?;
                worst = worst.max((acted - hx).abs());
            }
        }
        Ok(worst)
    }

    /// Largest disagreement between the two evaluations of points on paired
    /// sides: directly, and by transporting from the partner side.
    pub fn pairing_defect(&self, per_side: usize) -> Result<f64> {
        let g = &self.space.grid;
        let poly = &g.polygon;
        let values = self.node_values();
        let m = poly.len();
        let mut worst = 0.0_f64;
        for (s, side) in poly.sides.iter().enumerate() {
            let a = poly.vertices[s];
            let b = poly.vertices[(s + 1) % m];
            let sigma = element(&g.lattice, Some(&self.space.cocycle), &side.element.word);
            let inv = mink::lorentz_inverse(&sigma.linear);
            for i in 0..per_side {
                let f = (i as f64 + 0.5) / per_side as f64;
                let y = [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])];
                let direct = g.interpolate(&values, y).ok_or_else(|| Error::domain("side point not located"))?;
                let yp = mink::projective_action(&inv, &BallPoint(y));
                let hp = g.interpolate(&values, yp.0).ok_or_else(|| Error::domain("partner point not located"))?;
                let moved = mink::act_on_ball_function(&sigma, |_| hp, &BallPoint(y))?;
                worst = worst.max((direct - moved).abs());
            }
        }
        Ok(worst)
    }

    /// Local lifted-hull test at every representative.
    pub fn is_locally_convex(&self) -> bool {
        self.space.nonconvex_nodes(&self.hbar).is_empty()
    }

    pub fn area_masses(&self) -> Result<Vec<f64>> {
        self.space.area_masses(&self.hbar)
    }

    pub fn max_abs_diff(&self, other: &EquivariantSupport) -> f64 {
        self.hbar
            .iter()
            .zip(&other.hbar)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// A Γ-invariant measure on ℍ² given by masses at the representatives.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMeasure {
    pub masses: Vec<f64>,
}

impl InvariantMeasure {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::validation("measure masses must be finite and nonnegative"));
        }
        Ok(InvariantMeasure { masses })
    }

    /// `c · dℍ²` on the Voronoi cells of the representatives.
    pub fn constant(grid: &DomainGrid, c: f64) -> Result<Self> {
        InvariantMeasure::new(grid.weights.iter().map(|w| c * w).collect())
    }

    /// `f · dℍ²` for a Γ-invariant density `f`.
    pub fn from_density(grid: &DomainGrid, f: impl Fn(&MinkVector) -> f64) -> Result<Self> {
        InvariantMeasure::new(
            grid.reps
                .iter()
                .zip(&grid.weights)
                .map(|(&r, w)| f(&grid.points[r]) * w)
                .collect(),
        )
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// `g_τ` and the representative values of `h̄_τ` from an orbit hull.
#[derive(Clone, Debug)]
pub struct HTau {
    pub g_tau: BoundaryData,
    /// `sup |g^{(d)} − g^{(d−1)}|` for `d = 1..=depth`.
    pub gaps: Vec<f64>,
    /// Whether the gaps decrease over the last levels.
    pub stabilizing: bool,
    pub warning: Option<String>,
    pub support: EquivariantSupport,
}

/// Boundary samples used for `g_τ`.
pub const TRACE_SAMPLES: usize = 720;

/// `h_depth(x) = max ⟨x̂, q⟩` over the orbit of `seed` is a τ-convex support
/// function increasing in depth; its trace on the unit circle approximates
/// `g_τ`, and `h_τ` is the convex envelope of that trace.
pub fn compute_h_tau(grid: DomainGrid, cocycle: Cocycle, seed: MinkVector, depth: usize) -> Result<HTau> {
    if !seed.is_future_timelike() {
        return Err(Error::domain("seed must be future timelike"));
    }
    let elems = enumerate_elements(&grid.lattice, Some(&cocycle), depth);
    let dirs: Vec<MinkVector> = (0..TRACE_SAMPLES)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / TRACE_SAMPLES as f64;
            MinkVector([math::cos(t), math::sin(t), 1.0])
        })
        .collect();
    let mut g = alloc::vec![f64::NEG_INFINITY; TRACE_SAMPLES];
    let mut gaps = Vec::new();
    let mut level = 0;
    let mut prev = g.clone();
    for e in &elems {
        if e.word.len() > level {
            if level > 0 || e.word.len() > 1 {
                gaps.push(max_gap(&g, &prev));
            }
            prev.clone_from(&g);
            level = e.word.len();
        }
        let q = e.isometry.apply(&seed);
        for (gj, d) in g.iter_mut().zip(&dirs) {
            *gj = gj.max(d.inner(&q));
        }
    }
    gaps.push(max_gap(&g, &prev));
    let k = gaps.len();
    let stabilizing = k < 3 || gaps[k - 1] <= gaps[k - 2] && gaps[k - 2] <= gaps[k - 3];
    let warning = (!stabilizing).then(|| alloc::format!("boundary trace gap is not decreasing: {gaps:?}"));
    let samples = (0..TRACE_SAMPLES)
        .map(|j| (2.0 * PI * j as f64 / TRACE_SAMPLES as f64, g[j]))
        .collect();
    let g_tau = BoundaryData::new(samples)?;
    let env = CircleEnvelope::new(&g_tau)?;
    let h_tau = grid
        .reps
        .iter()
        .map(|&r| Ok(env.eval(grid.nodes[r])? * grid.points[r].0[2]))
        .collect::<Result<Vec<f64>>>()?;
    let space = EqSpace::new(grid, cocycle, h_tau.clone())?;
    Ok(HTau {
        g_tau,
        gaps,
        stabilizing,
        warning,
        support: EquivariantSupport::new(space, h_tau)?,
    })
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(_, y)| y.is_finite())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `(min, max)` of `h̄_τ − h̄` over the representatives: the extrema of the
/// cosmological time on the boundary of the set.
pub fn tmin_tmax(h: &EquivariantSupport) -> (f64, f64) {
    h.space
        .h_tau
        .iter()
        .zip(&h.hbar)
        .map(|(t, v)| t - v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), d| (a.min(d), b.max(d)))
}

fn check_below_tau(h: &EquivariantSupport) -> Result<()> {
    for (k, (v, t)) in h.hbar.iter().zip(&h.space.h_tau).enumerate() {
        if *v > t + 1e-12 * (1.0 + t.abs()) {
            return Err(Error::domain(alloc::format!(
                "support value exceeds h_tau at representative {k}"
            )));
        }
    }
    Ok(())
}

/// Default Gauss–Legendre order of the covolume quadrature.
pub const COVOLUME_ORDER: usize = 8;

/// `covol(h̄) = ∫₀¹ ∫ (h̄_τ − h̄) dA(h̄_t) dt` with `h̄_t = (1−t)h̄_τ + t h̄`,
/// using that `A(h̄_τ) = 0`.
pub fn covolume(h: &EquivariantSupport, order: usize) -> Result<f64> {
    check_below_tau(h)?;
    let sp = &h.space;
    let (ts, ws) = gauss_legendre_on(order.max(1), 0.0, 1.0);
    let mut total = 0.0;
    for (t, w) in ts.iter().zip(&ws) {
        let u: Vec<f64> = sp.h_tau.iter().zip(&h.hbar).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        let f = sp.area_masses(&u)?;
        total += w * f.iter().zip(sp.h_tau.iter().zip(&h.hbar)).map(|(m, (a, b))| (a - b) * m).sum::<f64>();
    }
    Ok(total.max(0.0))
}

/// `covol(h̄) = −⅓ ∫ h̄ dA(h̄)`, valid for τ = 0.
pub fn covol_fuchsian(h: &EquivariantSupport) -> Result<f64> {
    if !h.space.cocycle.is_zero() {
        return Err(Error::Inapplicable("the Fuchsian covolume formula needs τ = 0".into()));
    }
    if h.hbar.iter().any(|v| *v > 0.0) {
        return Err(Error::domain("Fuchsian support values must be ≤ 0"));
    }
    let f = h.area_masses()?;
    Ok(-h.hbar.iter().zip(&f).map(|(v, m)| v * m).sum::<f64>() / 3.0)
}

/// `L_μ(h̄) = covol(h̄) − ∫ (h̄_τ − h̄) dμ`.
pub fn l_mu(h: &EquivariantSupport, mu: &InvariantMeasure, order: usize) -> Result<f64> {
    if mu.masses.len() != h.hbar.len() {
        return Err(Error::validation("measure does not match the representatives"));
    }
    let c = covolume(h, order)?;
    let lin: f64 = h
        .space
        .h_tau
        .iter()
        .zip(&h.hbar)
        .zip(&mu.masses)
        .map(|((t, v), m)| (t - v) * m)
        .sum();
    Ok(c - lin)
}

pub fn total_area(h: &EquivariantSupport) -> Result<f64> {
    Ok(h.area_masses()?.iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub area_outer: f64,
    pub area_inner: f64,
    pub holds: bool,
}

/// For `K₁ ⊂ K₀` (`h̄₁ ≤ h̄₀`): `Area(K₀) ≤ Area(K₁) + tol`.
pub fn monotonicity_check(h0: &EquivariantSupport, h1: &EquivariantSupport, tol: f64) -> Result<MonotonicityReport> {
    if h1.hbar.iter().zip(&h0.hbar).any(|(a, b)| a > b) {
        return Err(Error::validation("the inner support function must lie below the outer one"));
    }
    let a0 = total_area(h0)?;
    let a1 = total_area(h1)?;
    Ok(MonotonicityReport {
        area_outer: a0,
        area_inner: a1,
        holds: a0 <= a1 + tol,
    })
}

/// Margin kept below `h̄_τ` while iterating.
pub const CAUCHY_CLAMP: f64 = 1e-9;

struct QuotientSystem<'a> {
    space: &'a EqSpace,
    mu: &'a InvariantMeasure,
}

impl MaSystem for QuotientSystem<'_> {
    fn len(&self) -> usize {
        self.space.num_vars()
    }

    fn target(&self, k: usize) -> f64 {
        self.mu.masses[k]
    }

    fn cell(&self, k: usize) -> f64 {
        self.space.grid.weights[k]
    }

    fn upper(&self, k: usize) -> f64 {
        self.space.h_tau[k] - CAUCHY_CLAMP
    }

    fn f_local(&self, k: usize, uk: f64, u: &[f64], _links: &[usize]) -> f64 {
        self.space.cell(k, uk, u).area()
    }

    fn evaluate(&self, u: &[f64]) -> Result<Evaluation> {
        let n = self.len();
        let cells = self.space.cells(u)?;
        let mut jac: alloc::collections::BTreeMap<(usize, usize), f64> = alloc::collections::BTreeMap::new();
        let mut f = Vec::with_capacity(n);
        for (k, c) in cells.iter().enumerate() {
            f.push(c.area());
            let st = &self.space.charts[k];
            for (label, len) in c.edge_lengths() {
                if label == BOX_LABEL || len <= 0.0 {
                    continue;
                }
                let e = &st[label];
                let w = len / math::norm2(e.x);
                // −∂F_k/∂u_k gets w; −∂F_k/∂u_var gets −b·w
                *jac.entry((k, k)).or_default() += w;
                let j = e.var.expect("chart entries carry a variable");
                *jac.entry((k, j)).or_default() -= e.b * w;
            }
        }
        let mut rows: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); n];
        for (&(k, j), &v) in &jac {
            let val = if k == j {
                v
            } else {
                0.5 * (v + jac.get(&(j, k)).copied().unwrap_or(0.0))
            };
            rows[k].push((j, val));
        }
        // symmetrization can leave (j,k) without its partner entry
        for k in 0..n {
            let missing: Vec<(usize, f64)> = rows[k]
                .iter()
                .filter(|&&(j, _)| j != k && !jac.contains_key(&(j, k)))
                .map(|&(j, v)| (j, v))
                .collect();
            for (j, v) in missing {
                rows[j].push((k, v));
            }
        }
        Ok(Evaluation {
            f,
            rows,
            links: Vec::new(),
        })
    }

    fn project(&self, u: &mut [f64]) -> Result<()> {
        self.space.convexify(u)
    }

    fn lift_direction(&self) -> Option<Vec<f64>> {
        Some(alloc::vec![1.0; self.len()])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EqInit {
    /// Start from `h̄_τ` itself.
    Tau,
    /// Start from `h̄_τ − c`, halving `c` until it is a subsolution.
    Below(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EqSolveOptions {
    pub solve: SolveOptions,
    pub init: EqInit,
    pub quad_order: usize,
}

impl Default for EqSolveOptions {
    fn default() -> Self {
        EqSolveOptions {
            solve: SolveOptions::default(),
            init: EqInit::Tau,
            quad_order: COVOLUME_ORDER,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EqSolution {
    pub h: EquivariantSupport,
    pub report: SolveReport,
    /// `L_μ` at the initial iterate and at the solution.
    pub l_initial: f64,
    pub l_final: f64,
    /// Some representative reached `h̄_τ` (within the clamp margin).
    pub touches_h_tau: bool,
    /// Per representative `|A − μ| / (weight + μ)`.
    pub residuals: Vec<f64>,
}

/// Finds the τ-convex set whose area measure is `μ` by the monotone
/// iteration on the quotient, started above the solution.
pub fn solve_equivariant(space: &Arc<EqSpace>, mu: &InvariantMeasure, opts: &EqSolveOptions) -> Result<EqSolution> {
    let n = space.num_vars();
    if mu.masses.len() != n {
        return Err(Error::validation("measure does not match the representatives"));
    }
    let sys = QuotientSystem { space, mu };
    let mut u0: Vec<f64> = space.h_tau.iter().map(|t| t - CAUCHY_CLAMP).collect();
    if let EqInit::Below(c) = opts.init {
        let mut c = c;
        loop {
            let mut v: Vec<f64> = space.h_tau.iter().map(|t| t - c).collect();
            space.convexify(&mut v)?;
            let f = space.area_masses(&v)?;
            if f.iter().zip(&mu.masses).all(|(a, m)| *a <= *m) {
                u0 = v;
                break;
            }
            c *= 0.5;
            if c < 1e-12 {
                break;
            }
        }
    }
    let l_initial = l_mu(&EquivariantSupport::new(space.clone(), u0.clone())?, mu, opts.quad_order)?;
    let (u, report) = monotone::solve(&sys, u0, &opts.solve)?;
    let f = space.area_masses(&u)?;
    let residuals = (0..n)
        .map(|k| (f[k] - mu.masses[k]).abs() / (space.grid.weights[k] + mu.masses[k]))
        .collect();
    let touches_h_tau = u.iter().zip(&space.h_tau).any(|(v, t)| *v >= t - 2.0 * CAUCHY_CLAMP);
    let h = EquivariantSupport::new(space.clone(), u)?;
    let l_final = l_mu(&h, mu, opts.quad_order)?;
    Ok(EqSolution {
        h,
        report,
        l_initial,
        l_final,
        touches_h_tau,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn space(n: usize) -> Arc<EqSpace> {
        let g = DomainGrid::new(&Lattice::genus2(), &BallPoint::new(0.0, 0.0), 2, n).unwrap();
        EqSpace::fuchsian(g).unwrap()
    }

    #[test]
    fn constant_support_has_quadratic_area() {
        let sp = space(8);
        let a1 = total_area(&EquivariantSupport::shifted_tau(&sp, -1.0)).unwrap();
        let a2 = total_area(&EquivariantSupport::shifted_tau(&sp, -2.0)).unwrap();
        assert!((a2 - 4.0 * a1).abs() < 1e-9 * a2);
        assert!((a1 - 4.0 * PI).abs() < 0.05 * 4.0 * PI, "{a1}");
    }

    #[test]
    fn covolume_of_h_tau_vanishes() {
        let sp = space(4);
        assert_eq!(covolume(&EquivariantSupport::h_tau(&sp), 8).unwrap(), 0.0);
        let above = EquivariantSupport::shifted_tau(&sp, 0.1);
        assert!(matches!(covolume(&above, 8), Err(Error::Domain(_))));
    }
}
