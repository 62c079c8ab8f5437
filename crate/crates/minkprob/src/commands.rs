//! Subcommands of the `minkprob` binary.
//!
//! Every command writes its CSV outputs and a `report.json` into the output
//! directory; `--plots` adds SVG heat maps next to them.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand};
use minkprob_core::convex::{legendre, legendre_inverse, PLFunctionB};
use minkprob_core::dirichlet::solve_dirichlet;
use minkprob_core::domain::{disk, hyperboloid};
use minkprob_core::equivariant::{
    compute_h_tau, covol_fuchsian, covolume, l_mu, solve_equivariant, tmin_tmax, total_area, EquivariantSupport,
    COVOLUME_ORDER,
};
use minkprob_core::grid::BallGrid;
use minkprob_core::measure::{area_from_graph, area_measure, euclidean_area_measure, ma_measure, DiscreteMeasureB};
use minkprob_core::mink::MinkVector;
use minkprob_core::pogorelov::{search_beta, sharpness_contrast, BetaSearch};
use minkprob_core::smoothing::{support_correction, HyperbolicAverage, Patch, PolarQuadrature};
use serde_json::{json, Value};

use crate::criteria::{self, sample_points, CRITERIA};
use crate::io::{self, Outputs};
use crate::plot::heat_map;
use crate::spec::Problem;
use crate::{CliError, CliResult};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monge-Ampère measure of a function.
    Ma(InputArgs),
    /// Hyperbolic and Euclidean area measures, with the Legendre graph oracle.
    Area(InputArgs),
    /// Legendre transform on a slope grid and its round trip.
    Legendre(InputArgs),
    /// Convex envelope of the boundary data.
    Envelope,
    /// Dirichlet problem on the disk.
    Solve,
    /// Equivariant problem on the fundamental domain.
    SolveEq,
    /// Boundary trace g_tau and h_tau from an orbit hull.
    Gtau,
    /// Covolume of a tau-convex support function.
    Covol(InputArgs),
    /// Hyperbolic average with support correction.
    Smooth(InputArgs),
    /// Lower-bound check for the Pogorelov family.
    Pogorelov(PogorelovArgs),
    /// Runs the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV input instead of the spec's function.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PogorelovArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Also run the two-dimensional probe for comparison.
    #[arg(long)]
    pub contrast: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Criterion ids to run, e.g. `--only 1,4`.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

pub struct Context {
    pub problem: Problem,
    pub out: Outputs,
    pub plots: bool,
}

impl Context {
    fn plot_function(&mut self, name: &str, title: &str, grid: &BallGrid, values: &[f64]) -> CliResult<()> {
        if self.plots {
            self.out.write(name, &heat_map(&grid.nodes, &grid.triangles, values, title, 10))?;
        }
        Ok(())
    }

    /// Mass divided by cell area, so the picture does not depend on the grid.
    fn plot_measure(&mut self, name: &str, title: &str, mu: &DiscreteMeasureB) -> CliResult<()> {
        let cells = mu.grid.cell_areas();
        let density: Vec<f64> = mu.mass().iter().zip(&cells).map(|(m, c)| m / c).collect();
        self.plot_function(name, title, &mu.grid.clone(), &density)
    }

    fn plot_domain(&mut self, name: &str, title: &str, h: &EquivariantSupport) -> CliResult<()> {
        let g = &h.space.grid;
        let values = h.node_values();
        if self.plots {
            self.out.write(name, &heat_map(&g.nodes, &g.triangles, &values, title, 10))?;
        }
        Ok(())
    }

    fn input_function(&self, input: &Option<PathBuf>) -> CliResult<PLFunctionB> {
        match input {
            Some(p) => io::read_function(p),
            None => self.problem.function(),
        }
    }
}

pub fn run(cmd: &Command, ctx: &mut Context) -> CliResult<()> {
    match cmd {
        Command::Ma(a) => ma(ctx, a),
        Command::Area(a) => area(ctx, a),
        Command::Legendre(a) => legendre_cmd(ctx, a),
        Command::Envelope => envelope(ctx),
        Command::Solve => solve(ctx),
        Command::SolveEq => solve_eq(ctx),
        Command::Gtau => gtau(ctx),
        Command::Covol(a) => covol(ctx, a),
        Command::Smooth(a) => smooth(ctx, a),
        Command::Pogorelov(a) => pogorelov(ctx, a),
        Command::Verify(a) => verify(ctx, a),
    }
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn ma(ctx: &mut Context, a: &InputArgs) -> CliResult<()> {
    let h = ctx.input_function(&a.input)?;
    let hc = h.convexify()?;
    let mu = ma_measure(&hc)?;
    ctx.out.write("ma.csv", &io::measure_csv(&mu))?;
    ctx.plot_measure("ma.svg", "MA density", &mu)?;
    ctx.out.json(
        "report.json",
        &json!({
            "total": mu.total(),
            "max": max_of(mu.mass().iter().copied()),
            "nonzero_nodes": mu.mass().iter().filter(|m| **m > 0.0).count(),
            "convexified_change": hc.max_abs_diff(&h),
        }),
    )
}

/// Interior nodes with `|x| < 0.8`, the region where the graph oracle applies.
fn oracle_region(g: &BallGrid) -> Vec<usize> {
    g.interior_nodes().filter(|&i| g.nodes[i][0].hypot(g.nodes[i][1]) < 0.8).collect()
}

fn area(ctx: &mut Context, a: &InputArgs) -> CliResult<()> {
    let h = ctx.input_function(&a.input)?.convexify()?;
    let hyp = area_measure(&h)?;
    let euc = euclidean_area_measure(&h)?;
    ctx.out.write("area.csv", &io::measure_csv(&hyp))?;
    ctx.out.write("area_euclidean.csv", &io::measure_csv(&euc))?;
    ctx.plot_measure("area.svg", "area density", &hyp)?;
    let omega = oracle_region(&h.grid);
    let n = ctx.problem.spec.legendre_nodes.unwrap_or(301);
    let u = legendre(&h, n)?;
    let oracle = area_from_graph(&u, &h.grid, &omega);
    ctx.out.json(
        "report.json",
        &json!({
            "total": hyp.total(),
            "total_euclidean": euc.total(),
            "oracle_region_radius": 0.8,
            "region_area": hyp.sum_over(&omega),
            "graph_oracle_area": oracle.area,
            "graph_oracle_excluded_cells": oracle.excluded_cells,
            "legendre_nodes": n,
        }),
    )
}

fn legendre_cmd(ctx: &mut Context, a: &InputArgs) -> CliResult<()> {
    let h = ctx.input_function(&a.input)?.convexify()?;
    let n = ctx.problem.spec.legendre_nodes.unwrap_or(301);
    let u = legendre(&h, n)?;
    let back = legendre_inverse(&u, h.grid.clone())?;
    ctx.out.write("legendre.csv", &io::legendre_csv(&u))?;
    ctx.out.write("roundtrip.csv", &io::function_csv(&back))?;
    let step = u.step();
    let bound = 2.0 * step[0].max(step[1]) * h.grid.rho_max;
    let err = back.max_abs_diff(&h);
    ctx.out.json(
        "report.json",
        &json!({
            "nodes": n,
            "slope_lo": u.lo,
            "slope_hi": u.hi,
            "max_roundtrip_error": err,
            "error_bound": bound,
            "within_bound": err <= bound,
        }),
    )
}

fn envelope(ctx: &mut Context) -> CliResult<()> {
    let grid = ctx.problem.grid()?;
    let g = ctx.problem.boundary(&grid)?;
    let env = minkprob_core::convex::convex_envelope_boundary(&g, grid.clone())?;
    ctx.out.write("envelope.csv", &io::function_csv(&env))?;
    ctx.out.write("boundary.csv", &io::boundary_csv(&g))?;
    ctx.plot_function("envelope.svg", "convex envelope", &grid, &env.values)?;
    let mu = ma_measure(&env)?;
    ctx.out.json(
        "report.json",
        &json!({
            "ma_total": mu.total(),
            "min": min_of(env.values.iter().copied()),
            "max": max_of(env.values.iter().copied()),
        }),
    )
}

fn solve(ctx: &mut Context) -> CliResult<()> {
    let p = &ctx.problem;
    let grid = p.grid()?;
    let mu = p.measure(grid.clone())?;
    let g = p.boundary(&grid)?;
    let opts = p.dirichlet_options()?;
    let env = minkprob_core::convex::convex_envelope_boundary(&g, grid.clone())?;
    let closed = p.closed_form()?;
    let sol = solve_dirichlet(&mu, &g, &opts)?;
    let sup_error = match closed {
        Some(f) => Value::from(sol.h.max_abs_diff(&PLFunctionB::from_fn(grid.clone(), f)?)),
        None => Value::Null,
    };
    let below = sol.h.values.iter().zip(&env.values).all(|(h, e)| *h <= e + 1e-9);
    ctx.out.write("solution.csv", &io::function_csv(&sol.h))?;
    ctx.out.write("residuals.csv", &io::node_column_csv(&grid, "residual", &sol.residuals))?;
    ctx.plot_function("solution.svg", "solution", &grid, &sol.h.values)?;
    let r = &sol.report;
    ctx.out.json(
        "report.json",
        &json!({
            "converged": r.converged,
            "sweeps": r.sweeps,
            "newton_steps": r.newton_steps,
            "max_residual": r.max_residual,
            "monotone": r.monotone,
            "residual_history": r.residual_history,
            "h0": sol.h.values[0],
            "sup_error": sup_error,
            "below_envelope": below,
            "tol": opts.solve.tol,
        }),
    )
}

fn support_summary(h: &EquivariantSupport, order: usize) -> CliResult<Value> {
    let (tmin, tmax) = tmin_tmax(h);
    let fuchsian = if h.space.cocycle.is_zero() {
        Value::from(covol_fuchsian(h)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "covolume": covolume(h, order)?,
        "covol_fuchsian": fuchsian,
        "total_area": total_area(h)?,
        "tmin": tmin,
        "tmax": tmax,
        "hbar_min": min_of(h.hbar.iter().copied()),
        "hbar_max": max_of(h.hbar.iter().copied()),
        "locally_convex": h.is_locally_convex(),
    }))
}

fn solve_eq(ctx: &mut Context) -> CliResult<()> {
    let p = &ctx.problem;
    let space = p.eq_space()?;
    let mu = p.eq_measure(&space.grid)?;
    let opts = p.eq_options()?;
    let sol = solve_equivariant(&space, &mu, &opts)?;
    let h = &sol.h;
    ctx.out.write("domain.csv", &io::domain_csv(h))?;
    let mut report = support_summary(h, opts.quad_order)?;
    let r = &sol.report;
    let extra = json!({
        "l_mu": l_mu(h, &mu, opts.quad_order)?,
        "l_initial": sol.l_initial,
        "l_final": sol.l_final,
        "touches_h_tau": sol.touches_h_tau,
        "equivariance_defect": h.equivariance_defect(&sample_points())?,
        "pairing_defect": h.pairing_defect(8)?,
        "converged": r.converged,
        "sweeps": r.sweeps,
        "newton_steps": r.newton_steps,
        "max_residual": r.max_residual,
        "monotone": r.monotone,
        "representatives": space.num_vars(),
    });
    merge(&mut report, extra);
    ctx.plot_domain("domain.svg", "h on the fundamental domain", &sol.h)?;
    ctx.out.json("report.json", &report)
}

fn merge(a: &mut Value, b: Value) {
    if let (Value::Object(a), Value::Object(b)) = (a, b) {
        a.extend(b);
    }
}

fn gtau(ctx: &mut Context) -> CliResult<()> {
    let p = &ctx.problem;
    let (lat, file_cocycle) = p.lattice()?;
    let grid = p.domain_grid(&lat)?;
    let cocycle = p.cocycle(&lat, file_cocycle)?;
    let depth = p.orbit_depth();
    let ht = compute_h_tau(grid, cocycle, p.seed_point()?, depth)?;
    ctx.out.write("gtau.csv", &io::boundary_csv(&ht.g_tau))?;
    ctx.out.write("htau.csv", &io::domain_csv(&ht.support))?;
    ctx.plot_domain("htau.svg", "h_tau", &ht.support)?;
    ctx.out.json(
        "report.json",
        &json!({
            "orbit_depth": depth,
            "gaps": ht.gaps,
            "stabilizing": ht.stabilizing,
            "warning": ht.warning,
        }),
    )
}

fn covol(ctx: &mut Context, a: &InputArgs) -> CliResult<()> {
    let p = &ctx.problem;
    let space = p.eq_space()?;
    let order = p.spec.quad_order.unwrap_or(COVOLUME_ORDER);
    let mu = p.spec.measure.as_ref().map(|_| p.eq_measure(&space.grid)).transpose()?;
    let mut entries = Vec::new();
    let supports: Vec<(Value, EquivariantSupport)> = match &a.input {
        Some(path) => vec![(
            Value::from(path.display().to_string()),
            io::parse_domain(&io::read_text(path)?, path, &space)?,
        )],
        None => p
            .spec
            .shifts
            .clone()
            .unwrap_or_else(|| vec![1.0])
            .into_iter()
            .map(|s| {
                if !(s > 0.0) {
                    return Err(CliError::field(&p.source_name, "shifts", "must be positive"));
                }
                Ok((Value::from(s), EquivariantSupport::shifted_tau(&space, -s)))
            })
            .collect::<CliResult<_>>()?,
    };
    for (label, h) in &supports {
        let mut e = json!({ "input": label });
        merge(&mut e, support_summary(h, order)?);
        if let (Value::Number(s), true) = (label, space.cocycle.is_zero()) {
            let s = s.as_f64().unwrap_or(f64::NAN);
            merge(&mut e, json!({ "exact": 4.0 * PI / 3.0 * s * s * s }));
        }
        if let Some(mu) = &mu {
            merge(&mut e, json!({ "l_mu": l_mu(h, mu, order)? }));
        }
        entries.push(e);
    }
    if let Some((_, h)) = supports.first() {
        ctx.plot_domain("covol.svg", "support function", h)?;
    }
    ctx.out.json(
        "report.json",
        &json!({ "quad_order": order, "polygon_area": space.grid.polygon.area, "supports": entries }),
    )
}

fn smooth(ctx: &mut Context, a: &InputArgs) -> CliResult<()> {
    let p = &ctx.problem;
    let s = p.spec.smoothing.unwrap_or_default();
    let h = ctx.input_function(&a.input)?.convexify()?;
    let grid = h.grid.clone();
    let outer = grid.rho_max.atanh();
    if !(s.radius > 0.0 && s.radius < outer) {
        return Err(CliError::field(&p.source_name, "smoothing.radius", "must be positive and below the grid radius"));
    }
    // the averaged function needs the r-neighbourhood of the patch inside the grid
    let reach = 0.9 * (outer - s.radius);
    let hbar = |v: &MinkVector| h.eval(disk(v)).map_or(f64::NAN, |x| v.0[2] * x);
    let quad = PolarQuadrature::default();
    let self_test = quad.self_test(s.radius);
    let avg = HyperbolicAverage::new(hbar, s.radius, quad)?;
    let corr = support_correction(&avg, &Patch::new(MinkVector::TIME, reach), s.c_safety)?;
    let out_grid = Arc::new(BallGrid::new(grid.rings, grid.angular, reach.tanh())?);
    let values = out_grid
        .nodes
        .iter()
        .map(|&x| {
            let v = hyperboloid(x);
            corr.eval(&v) / v.0[2]
        })
        .collect();
    let smoothed = PLFunctionB::new(out_grid.clone(), values)?;
    ctx.out.write("smoothed.csv", &io::function_csv(&smoothed))?;
    ctx.plot_function("smoothed.svg", "smoothed", &out_grid, &smoothed.values)?;
    let r = &corr.report;
    ctx.out.json(
        "report.json",
        &json!({
            "r": s.radius,
            "patch_radius": reach,
            "quadrature_self_test": self_test,
            "c_safety": r.c_safety,
            "lipschitz": r.lipschitz,
            "c": r.c,
            "shift": corr.shift,
            "attempts": r.attempts,
            "smoothing_error": r.smoothing_error,
            "convex": true,
        }),
    )
}

fn beta_search_json(s: &BetaSearch) -> Value {
    json!({
        "d": s.d,
        "k": s.k,
        "c0": s.c0,
        "beta": s.beta,
        "scan": s.reports.iter().map(|r| json!({
            "beta": r.beta,
            "samples": r.samples,
            "min_det": r.min_det,
            "argmin": r.argmin,
            "flat_max": r.flat_max,
            "holds": r.holds,
        })).collect::<Vec<_>>(),
    })
}

fn pogorelov(ctx: &mut Context, a: &PogorelovArgs) -> CliResult<()> {
    let (mut spec, mut opts) = ctx.problem.pogorelov();
    spec.d = a.d.unwrap_or(spec.d);
    spec.k = a.k.unwrap_or(spec.k);
    spec.c0 = a.c0.unwrap_or(spec.c0);
    opts.samples = a.samples.unwrap_or(opts.samples);
    opts.radius = a.radius.unwrap_or(opts.radius);
    let search = search_beta(spec.d, spec.k, spec.c0, &opts)?;
    let mut report = beta_search_json(&search);
    if a.contrast || spec.contrast {
        let dir = ctx.problem.dirichlet_options()?;
        let c = sharpness_contrast(&[(12, 24), (24, 48), (48, 96)], 0.995, &dir, &opts)?;
        let levels: Vec<Value> = c
            .probe
            .levels
            .iter()
            .map(|l| json!({ "rings": l.rings, "angular": l.angular, "h0": l.h0 }))
            .collect();
        merge(
            &mut report,
            json!({ "probe": { "c": c.probe.c, "spread": c.probe.spread, "levels": levels, "control_h0": c.control_h0 } }),
        );
    }
    ctx.out.json("report.json", &report)?;
    match search.beta {
        Some(_) => Ok(()),
        None => Err(CliError::Failed(format!(
            "no scanned beta gives det Hess f >= {} on the sampled ball",
            spec.c0
        ))),
    }
}

fn verify(ctx: &mut Context, a: &VerifyArgs) -> CliResult<()> {
    let ids: Vec<usize> = if a.only.is_empty() {
        CRITERIA.iter().map(|c| c.id).collect()
    } else {
        a.only.clone()
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = criteria::run(id, ctx.problem.seed).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?;
        println!("{o}");
        outcomes.push(o);
    }
    ctx.out.json("verify.json", &outcomes)?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("criteria failed: {}", failed.join(", "))))
    }
}

/// Resolves `--spec`/`--preset` into a problem; neither gives an empty spec.
pub fn load_problem(spec: Option<&Path>, preset: Option<&str>, seed: u64) -> CliResult<Problem> {
    match (spec, preset) {
        (Some(path), None) => {
            let text = io::read_text(path)?;
            let name = path.display().to_string();
            let base = path.parent().unwrap_or(Path::new("."));
            Ok(Problem::new(crate::spec::parse_spec(&text, &name)?, &name, base, seed))
        }
        (None, Some(name)) => {
            let src = format!("preset {name}");
            Ok(Problem::new(crate::presets::preset(name)?, &src, Path::new("."), seed))
        }
        (None, None) => Ok(Problem::new(crate::spec::parse_spec("{}", "<empty>")?, "<empty>", Path::new("."), seed)),
        (Some(_), Some(_)) => Err(CliError::Usage("--spec and --preset are mutually exclusive".into())),
    }
}
