//! Monotone solver shared by the Dirichlet and equivariant problems.
//!
//! Unknowns `u_k` are lowered only. Each equation reads
//! `F_k(u) = target_k` where `F_k` is a weighted subdifferential area. The
//! iterate stays a subsolution (`F ≤ target` up to a small slack), which by
//! comparison keeps it above the solution. Progress comes from damped
//! Newton steps on the weighted-Laplacian Jacobian of the subdifferential
//! areas, falling back to Gauss–Seidel sweeps with 1D root finding per node.

use alloc::vec::Vec;

use crate::math::{self, dot2};
use crate::{Error, Result};

/// Value of a stencil point: `a + b·u[var]`, or just `a` when `var` is `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub x: [f64; 2],
    pub a: f64,
    pub b: f64,
    pub var: Option<usize>,
}

impl Entry {
    #[inline]
    pub fn value(&self, u: &[f64]) -> f64 {
        match self.var {
            Some(k) => self.a + self.b * u[k],
            None => self.a,
        }
    }
}

/// Labelled convex polygon: `edges[k]` tags the edge leaving `verts[k]`.
#[derive(Clone, Debug, Default)]
pub struct Cell {
    pub verts: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
}

pub const BOX_LABEL: usize = usize::MAX;

impl Cell {
    pub fn square(r: f64) -> Cell {
        Cell {
            verts: alloc::vec![[-r, -r], [r, -r], [r, r], [-r, r]],
            labels: alloc::vec![BOX_LABEL; 4],
        }
    }

    pub fn area(&self) -> f64 {
        math::polygon_area(&self.verts).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    /// Intersects with `n·p ≤ c`; the new edge gets `label`.
    pub fn clip(&mut self, n: [f64; 2], c: f64, label: usize, scratch: &mut Cell) {
        scratch.verts.clear();
        scratch.labels.clear();
        let m = self.verts.len();
        for i in 0..m {
            let p = self.verts[i];
            let q = self.verts[(i + 1) % m];
            let fp = dot2(n, p) - c;
            let fq = dot2(n, q) - c;
            if fp <= 0.0 {
                scratch.verts.push(p);
                scratch.labels.push(self.labels[i]);
                if fq > 0.0 {
                    let t = fp / (fp - fq);
                    scratch.verts.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    scratch.labels.push(label);
                }
            } else if fq < 0.0 {
                let t = fp / (fp - fq);
                scratch.verts.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                scratch.labels.push(self.labels[i]);
            }
        }
        core::mem::swap(self, scratch);
    }

    /// Whether some vertex violates `n·p ≤ c`.
    pub fn cut_by(&self, n: [f64; 2], c: f64) -> bool {
        self.verts.iter().any(|&p| dot2(n, p) > c)
    }

    /// Length of each labelled edge.
    pub fn edge_lengths(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let m = self.verts.len();
        (0..m).map(move |i| {
            let p = self.verts[i];
            let q = self.verts[(i + 1) % m];
            (self.labels[i], math::norm2(math::sub2(q, p)))
        })
    }
}

/// Subdifferential of the lower envelope of the points `(x_j, h_j)` at the
/// centre `(x, h)`: `{p : p·(x_j − x) ≤ h_j − h}`. Constraint labels are the
/// indices into `nbrs`.
pub fn local_cell(x: [f64; 2], h: f64, nbrs: impl Iterator<Item = ([f64; 2], f64)>, bound: f64) -> Cell {
    let mut cell = Cell::square(bound);
    let mut scratch = Cell::default();
    for (j, (y, hy)) in nbrs.enumerate() {
        let n = [y[0] - x[0], y[1] - x[1]];
        let c = hy - h;
        if cell.cut_by(n, c) {
            cell.clip(n, c, j, &mut scratch);
            if cell.is_empty() {
                break;
            }
        }
    }
    cell
}

/// Exact evaluation of all equations: values `F_k` and the rows of the
/// symmetric matrix `−∂F/∂u` (diagonal included).
#[derive(Clone, Debug, Default)]
pub struct Evaluation {
    pub f: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    /// Extra stencil points per equation (system-specific ids), typically
    /// the current neighbours in the global hull.
    pub links: Vec<Vec<usize>>,
}

pub trait MaSystem {
    fn len(&self) -> usize;
    fn target(&self, k: usize) -> f64;
    /// Measure of the node's cell, used to express residuals as densities.
    fn cell(&self, k: usize) -> f64;
    /// Upper bound enforced on `u_k`.
    fn upper(&self, k: usize) -> f64 {
        let _ = k;
        f64::INFINITY
    }
    /// `F_k` with `u_k` replaced by `uk`, from a local stencil widened by
    /// `links`. Must not underestimate the exact `F_k`.
    fn f_local(&self, k: usize, uk: f64, u: &[f64], links: &[usize]) -> f64;
    fn evaluate(&self, u: &[f64]) -> Result<Evaluation>;
    /// Lowers values so that the represented function is convex.
    fn project(&self, u: &mut [f64]) -> Result<()>;
    /// Nonnegative direction whose subtraction makes every cell
    /// nondegenerate; the solver starts with the longest such step that
    /// keeps a subsolution.
    fn lift_direction(&self) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative residual tolerance: `|F_k − target_k| ≤ tol·(cell_k + target_k)`.
    pub tol: f64,
    /// Cap on Newton steps plus sweeps.
    pub max_sweeps: usize,
    /// Height tolerance of the per-node root finder.
    pub height_tol: f64,
    pub newton: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-3,
            max_sweeps: 500,
            height_tol: 1e-10,
            newton: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub sweeps: usize,
    pub newton_steps: usize,
    /// Largest `|F_k − target_k| / (cell_k + target_k)` at exit.
    pub max_residual: f64,
    pub converged: bool,
    /// Iterate never increased at any node.
    pub monotone: bool,
    pub residual_history: Vec<f64>,
}

fn scaled_residuals<S: MaSystem>(sys: &S, f: &[f64]) -> (f64, f64) {
    let mut max_abs: f64 = 0.0;
    let mut deficit = 0.0;
    for (k, fk) in f.iter().enumerate() {
        let s = sys.cell(k) + sys.target(k);
        let r = (sys.target(k) - fk) / s;
        max_abs = max_abs.max(r.abs());
        deficit += r.max(0.0);
    }
    (max_abs, deficit)
}

fn is_subsolution<S: MaSystem>(sys: &S, f: &[f64], slack: f64) -> bool {
    f.iter()
        .enumerate()
        .all(|(k, fk)| *fk <= sys.target(k) + slack * (sys.cell(k) + sys.target(k)))
}

/// Runs the monotone iteration from a subsolution `u`.
pub fn solve<S: MaSystem>(sys: &S, mut u: Vec<f64>, opts: &SolveOptions) -> Result<(Vec<f64>, SolveReport)> {
    let n = sys.len();
    if u.len() != n {
        return Err(Error::validation("initial iterate has the wrong length"));
    }
    for (k, v) in u.iter_mut().enumerate() {
        *v = v.min(sys.upper(k));
    }
    sys.project(&mut u)?;
    let slack = 0.5 * opts.tol;
    let mut report = SolveReport {
        monotone: true,
        ..SolveReport::default()
    };
    if let Some(q) = sys.lift_direction() {
        u = lift(sys, u, &q)?;
    }
    let mut ev = sys.evaluate(&u)?;
    // Newton steps may shrink cells, but never below this floor
    let floor = 0.5
        * (0..n)
            .filter(|&k| sys.target(k) > 0.0)
            .map(|k| ev.f[k].min(sys.target(k)))
            .fold(f64::INFINITY, f64::min);
    // sweeps to run before Newton is tried again after a rejected step
    let mut cooldown = 0usize;
    loop {
        let (max_res, deficit) = scaled_residuals(sys, &ev.f);
        report.residual_history.push(max_res);
        report.max_residual = max_res;
        if max_res <= opts.tol {
            report.converged = true;
            break;
        }
        if report.sweeps + report.newton_steps >= opts.max_sweeps {
            break;
        }
        if opts.newton && cooldown == 0 {
            if let Some((u2, ev2)) = newton_step(sys, &u, &ev, deficit, slack, floor)? {
                report.monotone &= u2.iter().zip(&u).all(|(a, b)| a <= b);
                u = u2;
                ev = ev2;
                report.newton_steps += 1;
                continue;
            }
            cooldown = 3;
        }
        let before = u.clone();
        gauss_seidel_sweep(sys, &mut u, &ev, opts)?;
        sys.project(&mut u)?;
        report.monotone &= u.iter().zip(&before).all(|(a, b)| a <= b);
        ev = sys.evaluate(&u)?;
        report.sweeps += 1;
        cooldown = cooldown.saturating_sub(1);
    }
    Ok((u, report))
}

/// `u − a·q` for the largest `a` (within 1%) that keeps a subsolution.
fn lift<S: MaSystem>(sys: &S, u: Vec<f64>, q: &[f64]) -> Result<Vec<f64>> {
    let trial = |a: f64| -> Option<Vec<f64>> {
        let mut v: Vec<f64> = u.iter().zip(q).map(|(x, d)| x - a * d.max(0.0)).collect();
        sys.project(&mut v).ok()?;
        let ev = sys.evaluate(&v).ok()?;
        is_subsolution(sys, &ev.f, 0.0).then_some(v)
    };
    let mut lo = 0.0;
    let mut best = None;
    let mut hi = 1e-3;
    while let Some(v) = trial(hi) {
        lo = hi;
        best = Some(v);
        hi *= 4.0;
        if hi > 1e12 {
            return Ok(best.unwrap_or(u));
        }
    }
    while hi - lo > 1e-2 * hi {
        let mid = 0.5 * (lo + hi);
        match trial(mid) {
            Some(v) => {
                lo = mid;
                best = Some(v);
            }
            None => hi = mid,
        }
    }
    Ok(best.unwrap_or(u))
}

/// Largest factor by which one Newton step may ask a cell to grow.
const GROWTH: f64 = 4.0;

fn newton_step<S: MaSystem>(
    sys: &S,
    u: &[f64],
    ev: &Evaluation,
    deficit: f64,
    slack: f64,
    floor: f64,
) -> Result<Option<(Vec<f64>, Evaluation)>> {
    let n = sys.len();
    let active: Vec<bool> = (0..n)
        .map(|k| {
            let d = ev.rows[k].iter().find(|e| e.0 == k).map_or(0.0, |e| e.1);
            d > 1e-14 * (1.0 + sys.cell(k))
        })
        .collect();
    if !active.iter().any(|&a| a) {
        return Ok(None);
    }
    // Newton on √F: areas are quadratic in the lowering, so plain Newton
    // overshoots by the ratio target/F from nearly flat iterates
    let rhs: Vec<f64> = (0..n)
        .map(|k| {
            if active[k] {
                let f = ev.f[k].max(0.0);
                let t = sys.target(k).min(GROWTH * f);
                2.0 * math::sqrt(f) * (math::sqrt(t) - math::sqrt(f))
            } else {
                0.0
            }
        })
        .collect();
    let mut delta = pcg(&ev.rows, &active, &rhs, 1e-10, 4 * n + 100);
    let dmax = delta.iter().copied().fold(0.0, f64::max);
    if !(dmax > 0.0) || !dmax.is_finite() {
        return Ok(None);
    }
    // trust region: never lower by more than the current spread of values
    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let radius = (hi - lo).max(1e-3 * (1.0 + hi.abs().max(lo.abs())));
    if dmax > radius {
        let s = radius / dmax;
        delta.iter_mut().for_each(|d| *d *= s);
    }
    let mut theta = 1.0;
    for _ in 0..12 {
        let mut u2: Vec<f64> = (0..n)
            .map(|k| (u[k] - theta * delta[k].max(0.0)).min(sys.upper(k)).min(u[k]))
            .collect();
        theta *= 0.5;
        // a degenerate trial iterate is just a rejected step
        if sys.project(&mut u2).is_err() {
            continue;
        }
        let Ok(ev2) = sys.evaluate(&u2) else { continue };
        let (_, d2) = scaled_residuals(sys, &ev2.f);
        // cells may shrink, but not below the floor fixed after the lift
        let kept = (0..n).all(|k| sys.target(k) == 0.0 || ev2.f[k] >= floor);
        if kept && is_subsolution(sys, &ev2.f, slack) && d2 < deficit * (1.0 - 5e-4 * theta) {
            return Ok(Some((u2, ev2)));
        }
    }
    Ok(None)
}

/// Jacobi-preconditioned conjugate gradients on the active rows.
fn pcg(rows: &[Vec<(usize, f64)>], active: &[bool], b: &[f64], rtol: f64, max_iter: usize) -> Vec<f64> {
    let n = b.len();
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if active[k] {
                rows[k].iter().find(|e| e.0 == k).map_or(1.0, |e| e.1)
            } else {
                1.0
            }
        })
        .collect();
    let matvec = |x: &[f64], y: &mut [f64]| {
        for k in 0..n {
            y[k] = if active[k] {
                rows[k]
                    .iter()
                    .filter(|e| active[e.0])
                    .map(|&(j, a)| a * x[j])
                    .sum()
            } else {
                x[k]
            };
        }
    };
    let mut x = alloc::vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut ap = alloc::vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let bnorm = math::sqrt(b.iter().map(|v| v * v).sum::<f64>());
    if bnorm == 0.0 {
        return x;
    }
    for _ in 0..max_iter {
        matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rnorm = math::sqrt(r.iter().map(|v| v * v).sum::<f64>());
        if rnorm <= rtol * bnorm {
            break;
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        let rz2: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz2 / rz;
        rz = rz2;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    x
}

fn gauss_seidel_sweep<S: MaSystem>(sys: &S, u: &mut [f64], ev: &Evaluation, opts: &SolveOptions) -> Result<()> {
    let n = sys.len();
    let f = &ev.f;
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|k| ((sys.target(k) - f[k]) / (sys.cell(k) + sys.target(k)), k))
        .filter(|(r, _)| *r > 0.25 * opts.tol)
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, k) in &order {
        let target = sys.target(k);
        let links = ev.links.get(k).map_or(&[][..], |l| &l[..]);
        if sys.f_local(k, u[k], u, links) >= target {
            continue;
        }
        u[k] = lower_until(|v| sys.f_local(k, v, u, links), u[k], target, opts.height_tol)?;
    }
    Ok(())
}

/// Largest `v ≤ start` (within `tol`) with `f(v) ≥ target`, for `f`
/// nonincreasing in `v`.
pub fn lower_until(f: impl Fn(f64) -> f64, start: f64, target: f64, tol: f64) -> Result<f64> {
    let mut hi = start; // f(hi) < target
    let mut step = tol.max(1e-6 * (1.0 + start.abs()));
    let mut lo = start - step;
    let mut f_lo = f(lo);
    let mut guard = 0;
    while f_lo < target {
        hi = lo;
        step *= 2.0;
        lo = start - step;
        f_lo = f(lo);
        guard += 1;
        if guard > 200 || !f_lo.is_finite() {
            return Err(Error::NonConvergence {
                what: "node bracket".into(),
                iterations: guard,
                residual: target - f_lo,
            });
        }
    }
    // bisection keeps lo feasible
    let mut iter = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        if iter > 200 {
            break;
        }
    }
    Ok(lo)
}
