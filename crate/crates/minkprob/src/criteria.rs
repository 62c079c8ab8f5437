//! The twelve acceptance criteria, shared by `minkprob verify` and the
//! `acceptance` test target.
//!
//! Each criterion returns a pass flag and a one-line measurement summary.
//! The summary never contains timings, so the JSON matrix is reproducible;
//! the runtime budget is checked separately and folded into the verdict.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use minkprob_core::convex::{convex_envelope_boundary, BoundaryData, PLFunctionB};
use minkprob_core::dirichlet::{
    alexandrov_heinz_probe, comparison_check, solve_dirichlet, DirichletOptions, Init, ProbeBoundary,
};
use minkprob_core::domain::{hyperboloid, DomainGrid};
use minkprob_core::equivariant::{
    covol_fuchsian, covolume, monotonicity_check, solve_equivariant, EqSolveOptions, EqSpace, EquivariantSupport,
    InvariantMeasure, COVOLUME_ORDER,
};
use minkprob_core::grid::BallGrid;
use minkprob_core::lattice::{element, Cocycle, Lattice, Letter};
use minkprob_core::measure::{area_from_graph, area_measure, ma_law_checks, ma_measure, DiscreteMeasureB};
use minkprob_core::mink::{BallPoint, MinkVector};
use minkprob_core::pogorelov::{sharpness_contrast, LowerBoundOptions};
use minkprob_core::smoothing::{average_of_minus_one, HyperbolicAverage, PolarQuadrature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::families::{random_below, random_cauchy, PoincareSeries, SmoothConvex};
use crate::CliResult;

/// Measured verdict of one criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub limit: Duration,
    run: fn(u64) -> CliResult<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub limit_seconds: f64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} [{:.1} s / {:.0} s] {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit_seconds,
            self.detail
        )
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "MA total-mass law", limit: secs(10), run: c1_total_mass },
    Criterion { id: 2, name: "area measure vs graph oracle", limit: secs(60), run: c2_area_oracle },
    Criterion { id: 3, name: "transformation laws", limit: secs(30), run: c3_laws },
    Criterion { id: 4, name: "Dirichlet recovery", limit: secs(120), run: c4_recovery },
    Criterion { id: 5, name: "comparison principle", limit: secs(120), run: c5_comparison },
    Criterion { id: 6, name: "Alexandrov-Heinz d=2", limit: secs(120), run: c6_alexandrov_heinz },
    Criterion { id: 7, name: "equivariant constant curvature", limit: secs(300), run: c7_constant_curvature },
    Criterion { id: 8, name: "covolume consistency", limit: secs(120), run: c8_covolume },
    Criterion { id: 9, name: "covolume convexity", limit: secs(600), run: c9_convexity },
    Criterion { id: 10, name: "total-area monotonicity", limit: secs(120), run: c10_monotonicity },
    Criterion { id: 11, name: "smoothing oracles", limit: secs(60), run: c11_smoothing },
    Criterion { id: 12, name: "Pogorelov sharpness", limit: secs(120), run: c12_pogorelov },
];

/// Runs criterion `id`; errors count as failures.
pub fn run(id: usize, seed: u64) -> Option<Outcome> {
    let c = CRITERIA.iter().find(|c| c.id == id)?;
    let start = Instant::now();
    let check = (c.run)(seed).unwrap_or_else(|e| Check {
        passed: false,
        detail: format!("error: {e}"),
    });
    let elapsed = start.elapsed();
    Some(Outcome {
        id: c.id,
        name: c.name,
        passed: check.passed && elapsed <= c.limit,
        detail: check.detail,
        limit_seconds: c.limit.as_secs_f64(),
        elapsed,
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn default_grid() -> Arc<BallGrid> {
    Arc::new(BallGrid::default())
}

fn trace_of(g: &BallGrid, f: impl Fn([f64; 2]) -> f64) -> CliResult<BoundaryData> {
    let r = g.rho_max;
    Ok(BoundaryData::from_fn(g.angular, |t| f([r * t.cos(), r * t.sin()]))?)
}

fn c1_total_mass(_: u64) -> CliResult<Check> {
    let exact = PI * 0.81;
    let errs = [(24, 48), (48, 96), (96, 192)]
        .par_iter()
        .map(|&(r, a)| {
            let g = Arc::new(BallGrid::covering(0.9, r, a)?);
            let h = PLFunctionB::from_fn(g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]))?;
            Ok(rel(ma_measure(&h)?.total(), exact))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(Check {
        passed: errs[1] < 0.01 && errs[1] <= 0.5 * errs[0] && errs[2] <= 0.5 * errs[1],
        detail: format!(
            "relative error {:.2e} (24x48), {:.2e} (48x96), {:.2e} (96x192)",
            errs[0], errs[1], errs[2]
        ),
    })
}

fn c2_area_oracle(seed: u64) -> CliResult<Check> {
    let g = default_grid();
    let omega: Vec<usize> = g.interior_nodes().filter(|&i| g.nodes[i][0].hypot(g.nodes[i][1]) < 0.8).collect();
    let diffs = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let f = SmoothConvex::random(&mut rng(seed, 200 + k));
            let h = PLFunctionB::from_fn(g.clone(), |x| f.eval(x))?;
            let a = area_measure(&h)?.sum_over(&omega);
            let u = minkprob_core::convex::legendre(&h, 301)?;
            Ok(rel(area_from_graph(&u, &g, &omega).area, a))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    Ok(Check {
        passed: worst < 0.02,
        detail: format!("largest relative difference {worst:.2e} over 20 functions"),
    })
}

fn c3_laws(seed: u64) -> CliResult<Check> {
    let g = default_grid();
    let n = g.len();
    let half = PLFunctionB::from_fn(g.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1]))?;
    let tilted = PLFunctionB::from_fn(g.clone(), |x| 0.5 * (x[0] * x[0] + x[1] * x[1]) + 0.1 * x[0])?;
    let interior: Vec<usize> = g.interior_nodes().collect();
    let reports = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng(seed, 300 + k);
            let f1 = SmoothConvex::random(&mut r);
            let f2 = SmoothConvex::random(&mut r);
            let h1 = PLFunctionB::from_fn(g.clone(), |x| f1.eval(x))?;
            let h2 = PLFunctionB::from_fn(g.clone(), |x| f2.eval(x))?;
            let omega: Vec<usize> = interior.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
            let q = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
            let b = r.gen_range(-1.0..1.0);
            Ok(ma_law_checks(&h1, 2.0, q, b, &h2, &[omega])?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let homothety = reports.iter().map(|r| r.homothety_error).fold(0.0, f64::max);
    let affine = reports.iter().map(|r| r.affine_error).fold(0.0, f64::max);
    let literal = reports.iter().filter(|r| !r.max_law_violations.is_empty()).count();
    let dominance = reports.iter().filter(|r| !r.dominance_violations.is_empty()).count();
    // the pair ½|x|², ½|x|² + 0.1x₁ on random node subsets
    let mut r = rng(seed, 399);
    let regions: Vec<Vec<usize>> = (0..50).map(|_| (0..n).filter(|_| r.gen_bool(0.3)).collect()).collect();
    let example = ma_law_checks(&half, 2.0, [0.3, -0.2], 0.5, &tilted, &regions)?;
    Ok(Check {
        passed: homothety <= 1e-9
            && affine <= 1e-9
            && literal == 0
            && dominance == 0
            && example.max_law_violations.is_empty()
            && example.exact_laws_hold(1e-9),
        detail: format!(
            "homothety {homothety:.1e}, affine {affine:.1e}; max law violated on {literal}/50 random pairs \
             (nodewise dominance on {dominance}/50), example pair {}/50",
            example.max_law_violations.len()
        ),
    })
}

fn c4_recovery(_: u64) -> CliResult<Check> {
    let g = default_grid();
    let opts = DirichletOptions::default();
    let cases: [(&str, fn([f64; 2]) -> f64); 2] = [
        ("|x|^2/2", |x| 0.5 * (x[0] * x[0] + x[1] * x[1])),
        ("(x1^2+4x2^2)/2", |x| 0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1])),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, f) in cases {
        let start = Instant::now();
        let exact = PLFunctionB::from_fn(g.clone(), f)?;
        let mu = ma_measure(&exact)?;
        let data = trace_of(&g, f)?;
        let a = solve_dirichlet(&mu, &data, &opts)?;
        let b = solve_dirichlet(&mu, &data, &DirichletOptions { init: Init::Paraboloid(0.5), ..opts })?;
        let err = a.h.max_abs_diff(&exact).max(b.h.max_abs_diff(&exact));
        let agree = a.h.max_abs_diff(&b.h);
        passed &= err <= 2e-2 && agree <= 3.0 * opts.solve.tol && start.elapsed() <= secs(60);
        parts.push(format!("{name}: sup error {err:.2e}, initializations differ by {agree:.1e}"));
    }
    Ok(Check {
        passed,
        detail: parts.join("; "),
    })
}

fn c5_comparison(_: u64) -> CliResult<Check> {
    let g = default_grid();
    let opts = DirichletOptions::default();
    let mu1 = DiscreteMeasureB::from_density(g.clone(), |x| 1.0 + x[0] * x[0])?;
    let mu2 = mu1.scaled(2.0)?;
    let data = BoundaryData::from_fn(g.angular, |t| 0.3 * t.cos())?;
    let (s1, s2) = rayon::join(|| solve_dirichlet(&mu1, &data, &opts), || solve_dirichlet(&mu2, &data, &opts));
    let (h1, h2) = (s1?.h, s2?.h);
    let rep = comparison_check(&h1, &h2, 2.0 * opts.solve.tol, 1e-6)?;
    let env = convex_envelope_boundary(&data, g)?;
    let rep_env = comparison_check(&env, &h1, 2.0 * opts.solve.tol, 1e-6)?;
    let below = h1.values.iter().zip(&env.values).all(|(h, e)| *h <= e + 1e-9);
    Ok(Check {
        passed: rep.applicable && rep.attained_on_boundary && rep_env.applicable && rep_env.attained_on_boundary && below,
        detail: format!(
            "min(h1-h2) {:.3e} overall, {:.3e} on the boundary; envelope pair {:.1e} / {:.1e}",
            rep.min_all, rep.min_boundary, rep_env.min_all, rep_env.min_boundary
        ),
    })
}

const PROBE_LEVELS: [(usize, usize); 3] = [(12, 24), (24, 48), (48, 96)];

fn c6_alexandrov_heinz(_: u64) -> CliResult<Check> {
    let opts = DirichletOptions::default();
    let rep = alexandrov_heinz_probe(1.0, ProbeBoundary::Zero, &PROBE_LEVELS, 0.995, &opts)?;
    let control = alexandrov_heinz_probe(0.0, ProbeBoundary::Zero, &PROBE_LEVELS[..1], 0.995, &opts)?;
    let doubled = alexandrov_heinz_probe(2.0, ProbeBoundary::Zero, &PROBE_LEVELS[..1], 0.995, &opts)?;
    let h0: Vec<String> = rep.levels.iter().map(|l| format!("{:.4}", l.h0)).collect();
    Ok(Check {
        passed: rep.c > 0.0
            && rep.spread <= 0.2
            && control.levels[0].h0.abs() <= 1e-12
            && doubled.levels[0].h0 < rep.levels[0].h0,
        detail: format!(
            "h(0) = {} (spread {:.2}%), c0=0 control h(0) = {:.1e}, c0=2 gives {:.4}",
            h0.join(", "),
            100.0 * rep.spread,
            control.levels[0].h0,
            doubled.levels[0].h0
        ),
    })
}

fn genus2_grid(n: usize) -> CliResult<DomainGrid> {
    Ok(DomainGrid::new(&Lattice::genus2(), &BallPoint::new(0.0, 0.0), 2, n)?)
}

/// Points spread over the fundamental polygon.
pub fn sample_points() -> Vec<[f64; 2]> {
    (0..12)
        .map(|k| {
            let r = 0.9 * (k % 4) as f64 / 3.0;
            let t = 0.7 * k as f64;
            [r * t.cos(), r * t.sin()]
        })
        .collect()
}

fn c7_constant_curvature(_: u64) -> CliResult<Check> {
    let space = EqSpace::fuchsian(genus2_grid(16)?)?;
    let sols = [1.0, 2.0]
        .par_iter()
        .map(|&t: &f64| {
            let mu = InvariantMeasure::constant(&space.grid, t * t)?;
            let s = solve_equivariant(&space, &mu, &EqSolveOptions::default())?;
            let err = s.h.hbar.iter().fold(0.0, |m: f64, v| m.max((v + t).abs())) / t;
            let defect = s.h.equivariance_defect(&sample_points())?;
            Ok((s.h, err, defect))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let scaling = sols[0].0.hbar.iter().zip(&sols[1].0.hbar).fold(0.0, |m: f64, (a, b)| m.max((2.0 * a - b).abs()));
    Ok(Check {
        passed: sols.iter().all(|s| s.1 <= 0.02 && s.2 <= 1e-6) && scaling <= 0.02,
        detail: format!(
            "relative sup error {:.2e} (t=1), {:.2e} (t=2); |h2 - 2h1| {scaling:.1e}; equivariance defect {:.1e}",
            sols[0].1,
            sols[1].1,
            sols[0].2.max(sols[1].2)
        ),
    })
}

fn c8_covolume(_: u64) -> CliResult<Check> {
    let space = EqSpace::fuchsian(genus2_grid(16)?)?;
    let mut passed = true;
    let mut parts = Vec::new();
    for t in [1.0, 2.0] {
        let h = EquivariantSupport::shifted_tau(&space, -t);
        let exact = 4.0 * PI / 3.0 * t * t * t;
        let c = covolume(&h, COVOLUME_ORDER)?;
        let f = covol_fuchsian(&h)?;
        passed &= rel(c, exact) <= 0.01 && rel(c, f) <= 0.01;
        parts.push(format!("t={t}: covol {c:.4} vs {exact:.4} (fuchsian formula {f:.4})"));
    }
    let poly = &space.grid.polygon;
    let q = poly.quadrature_area();
    passed &= rel(poly.area, 4.0 * PI) <= 0.01 && rel(q, 4.0 * PI) <= 0.01;
    parts.push(format!("polygon area {:.6} (quadrature {q:.4}) vs 4pi", poly.area));
    Ok(Check {
        passed,
        detail: parts.join("; "),
    })
}

fn integral(f: &EquivariantSupport, weight: &[f64], g: &EquivariantSupport) -> f64 {
    f.hbar.iter().zip(&g.hbar).zip(weight).map(|((a, b), w)| (a - b) * w).sum()
}

const T0: MinkVector = MinkVector([0.2, -0.1, 0.05]);

fn c9_convexity(seed: u64) -> CliResult<Check> {
    let fuchsian = EqSpace::fuchsian(genus2_grid(8)?)?;
    let coboundary = EqSpace::coboundary(genus2_grid(8)?, T0)?;
    let midpoint = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let space = if k % 2 == 0 { &fuchsian } else { &coboundary };
            let mut r = rng(seed, 900 + k);
            let h0 = random_cauchy(space, &mut r)?;
            let h1 = random_cauchy(space, &mut r)?;
            let mid = h0.hbar.iter().zip(&h1.hbar).map(|(a, b)| 0.5 * (a + b)).collect();
            let hm = EquivariantSupport::new(space.clone(), mid)?;
            let c0 = covolume(&h0, COVOLUME_ORDER)?;
            let c1 = covolume(&h1, COVOLUME_ORDER)?;
            let cm = covolume(&hm, COVOLUME_ORDER)?;
            // excess over the chord, relative to it
            Ok((cm - 0.5 * (c0 + c1)) / (0.5 * (c0 + c1)))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let sandwich = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng(seed, 950 + k);
            let h0 = random_cauchy(&fuchsian, &mut r)?;
            let h1 = random_below(&h0, &mut r)?;
            let d = covolume(&h1, COVOLUME_ORDER)? - covolume(&h0, COVOLUME_ORDER)?;
            let lo = integral(&h0, &h0.area_masses()?, &h1);
            let hi = integral(&h0, &h1.area_masses()?, &h1);
            let tol = 1e-3 * hi.abs();
            Ok(lo <= d + tol && d <= hi + tol)
        })
        .collect::<CliResult<Vec<bool>>>()?;
    let worst = midpoint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bad_mid = midpoint.iter().filter(|e| **e > 1e-3).count();
    let bad_sandwich = sandwich.iter().filter(|ok| !**ok).count();
    Ok(Check {
        passed: bad_mid == 0 && bad_sandwich == 0,
        detail: format!(
            "midpoint excess at most {worst:.2e} (violations {bad_mid}/50); sandwich violations {bad_sandwich}/20"
        ),
    })
}

fn c10_monotonicity(seed: u64) -> CliResult<Check> {
    let space = EqSpace::fuchsian(genus2_grid(8)?)?;
    let pairs = (0..19u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng(seed, 1000 + k);
            let h0 = random_cauchy(&space, &mut r)?;
            let h1 = random_below(&h0, &mut r)?;
            let tol = 1e-3 * (1.0 + integral(&h0, &h1.area_masses()?, &h1).abs());
            Ok(monotonicity_check(&h0, &h1, tol)?.holds)
        })
        .collect::<CliResult<Vec<bool>>>()?;
    let fine = EqSpace::fuchsian(genus2_grid(16)?)?;
    let rep = monotonicity_check(
        &EquivariantSupport::shifted_tau(&fine, -1.0),
        &EquivariantSupport::shifted_tau(&fine, -2.0),
        1e-9,
    )?;
    let failures = pairs.iter().filter(|ok| !**ok).count();
    Ok(Check {
        passed: failures == 0
            && rep.holds
            && rel(rep.area_outer, 4.0 * PI) <= 0.01
            && rel(rep.area_inner, 16.0 * PI) <= 0.01,
        detail: format!(
            "random nested pairs failing {failures}/19; h=-1 area {:.4} (4pi {:.4}), h=-2 area {:.4} (16pi {:.4})",
            rep.area_outer,
            4.0 * PI,
            rep.area_inner,
            16.0 * PI
        ),
    })
}

const SMOOTHING_RADII: [f64; 3] = [0.05, 0.1, 0.3];

fn c11_smoothing(seed: u64) -> CliResult<Check> {
    let mut r = rng(seed, 1100);
    let quad = PolarQuadrature::default();
    let mut linear: f64 = 0.0;
    let mut constant: f64 = 0.0;
    for _ in 0..20 {
        let p = MinkVector([r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]);
        let (rad, t): (f64, f64) = (r.gen_range(0.0..0.9), r.gen_range(0.0..2.0 * PI));
        let x = hyperboloid([rad * t.cos(), rad * t.sin()]);
        let lin = move |y: &MinkVector| y.inner(&p);
        for radius in SMOOTHING_RADII {
            let avg = HyperbolicAverage::new(lin, radius, quad)?;
            linear = linear.max((avg.eval(&x) - lin(&x)).abs() / (1.0 + lin(&x).abs()));
            let one = HyperbolicAverage::new(|_: &MinkVector| -1.0, radius, quad)?;
            constant = constant.max((one.eval(&x) - average_of_minus_one(radius)).abs());
        }
    }
    let series = PoincareSeries::new([0.2, 0.1], 2.0)?;
    let lat = series.lattice().clone();
    let coc = Cocycle::coboundary(&lat, MinkVector::new(0.3, -0.2, 0.1));
    let t0 = MinkVector::new(0.3, -0.2, 0.1);
    let hbar = |v: &MinkVector| series.eval(v) - v.inner(&t0);
    let mut equivariance: f64 = 0.0;
    for radius in SMOOTHING_RADII {
        let avg = HyperbolicAverage::new(hbar, radius, quad)?;
        for g in 0..lat.rank() {
            let sigma = element(&lat, Some(&coc), &[Letter { generator: g, inverse: false }]);
            for x in [[0.0, 0.0], [0.3, -0.4], [-0.6, 0.2]] {
                let y = hyperboloid(x);
                let gy = sigma.apply_linear(&y);
                let d = avg.eval(&gy) - avg.eval(&y) - gy.inner(&sigma.translation);
                equivariance = equivariance.max(d.abs());
            }
        }
    }
    Ok(Check {
        passed: linear <= 1e-6 && constant <= 1e-4 && equivariance <= 1e-6,
        detail: format!(
            "linear fixed point {linear:.1e}, constant closed form {constant:.1e}, equivariance {equivariance:.1e}"
        ),
    })
}

fn c12_pogorelov(_: u64) -> CliResult<Check> {
    let rep = sharpness_contrast(&PROBE_LEVELS, 0.995, &DirichletOptions::default(), &LowerBoundOptions::default())?;
    let minima: Vec<String> = rep.pogorelov.reports.iter().map(|r| format!("{}:{:.3e}", r.beta, r.min_det)).collect();
    let flat = rep.pogorelov.reports.iter().map(|r| r.flat_max).fold(0.0, f64::max);
    Ok(Check {
        passed: rep.pogorelov.beta.is_some() && flat == 0.0 && rep.probe.c > 0.0 && rep.control_h0.abs() <= 1e-12,
        detail: format!(
            "probe h(0) = {:.4} (control {:.1e}); f on segment max {flat:.1e}; sampled min det Hess by beta {}; beta found: {}",
            -rep.probe.c,
            rep.control_h0,
            minima.join(", "),
            rep.pogorelov.beta.map_or("none".into(), |b| b.to_string())
        ),
    })
}
