//! JSON problem specs and their resolution into core objects.
//!
//! Unknown fields are rejected. Parse errors carry the JSON line and column;
//! semantic errors name the offending field.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use minkprob_core::convex::{convex_envelope_boundary, BoundaryData, PLFunctionB};
use minkprob_core::dirichlet::{DirichletOptions, Init, ProbeBoundary};
use minkprob_core::domain::DomainGrid;
use minkprob_core::equivariant::{compute_h_tau, EqInit, EqSolveOptions, EqSpace, InvariantMeasure, COVOLUME_ORDER};
use minkprob_core::grid::BallGrid;
use minkprob_core::lattice::{parse_word, Cocycle, Lattice};
use minkprob_core::math::Mat3;
use minkprob_core::measure::{ma_measure, DiscreteMeasureB};
use minkprob_core::mink::{lambda_of, BallPoint, MinkVector};
use minkprob_core::pogorelov::LowerBoundOptions;
use minkprob_core::MATRIX_TOL;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::families::SmoothConvex;
use crate::{io, CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub grid: Option<GridSpec>,
    /// A known convex function: input of `ma`, `area`, `legendre`, and the
    /// reference solution of `solve`.
    pub function: Option<FunctionSpec>,
    pub boundary: Option<BoundarySpec>,
    pub measure: Option<MeasureSpec>,
    pub tol: Option<f64>,
    pub max_sweeps: Option<usize>,
    pub init: Option<InitSpec>,
    pub legendre_nodes: Option<usize>,
    /// `"genus2"` or a path to a lattice JSON file.
    pub lattice: Option<String>,
    pub cocycle: Option<CocycleSpec>,
    pub domain: Option<DomainSpec>,
    pub orbit_depth: Option<usize>,
    pub quad_order: Option<usize>,
    pub seed_point: Option<[f64; 3]>,
    /// Constants `s` for which `covol` evaluates `h̄_τ − s`.
    pub shifts: Option<Vec<f64>>,
    pub smoothing: Option<SmoothingSpec>,
    pub pogorelov: Option<PogorelovSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_rings")]
    pub rings: usize,
    #[serde(default = "default_angular")]
    pub angular: usize,
    #[serde(default = "default_rho")]
    pub rho_max: f64,
}

fn default_rings() -> usize {
    48
}
fn default_angular() -> usize {
    96
}
fn default_rho() -> f64 {
    0.995
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rings: default_rings(),
            angular: default_angular(),
            rho_max: default_rho(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionPreset {
    /// `½(a₁₁x₁² + 2a₁₂x₁x₂ + a₂₂x₂²) + ⟨q,x⟩ + c`.
    Quadratic,
    /// `⟨q,x⟩ + c`.
    Affine,
    /// `−t·λ(x)`, the hyperboloid of radius `t`.
    Hyperboloid,
    /// A random smooth convex function drawn from `--seed`.
    Random,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub preset: Option<FunctionPreset>,
    pub csv: Option<PathBuf>,
    /// `[a₁₁, a₁₂, a₂₂]`, default identity.
    pub a: Option<[f64; 3]>,
    pub q: Option<[f64; 2]>,
    pub c: Option<f64>,
    pub t: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPreset {
    /// Trace of `function` on the outer ring.
    Trace,
    Constant,
    /// Zero at `±e₁`, rising linearly in the angle to 1 at `±e₂`.
    Tent,
    /// `amplitude·cos(frequency·θ)`.
    Cosine,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub preset: Option<BoundaryPreset>,
    /// Equally spaced values starting at angle 0.
    pub samples: Option<Vec<f64>>,
    pub csv: Option<PathBuf>,
    pub value: Option<f64>,
    pub amplitude: Option<f64>,
    pub frequency: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurePreset {
    Zero,
    /// `MA(function)` on the grid.
    FromFunction,
    /// `value` times Lebesgue cell areas.
    Density,
    /// `value` at node `node` (default the centre).
    Dirac,
    /// `value` times hyperbolic cell volumes (on a domain grid: per
    /// representative Voronoi cell).
    Hyperbolic,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub preset: Option<MeasurePreset>,
    pub csv: Option<PathBuf>,
    pub value: Option<f64>,
    pub node: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    Envelope,
    Paraboloid(f64),
    Below(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CocycleSpec {
    /// `"zero"`.
    Named(String),
    /// `{"coboundary": [t₀]}`.
    Coboundary { coboundary: [f64; 3] },
    /// One translation per generator.
    Explicit(Vec<[f64; 3]>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default = "default_subdivisions")]
    pub n: usize,
    #[serde(default = "default_polygon_depth")]
    pub depth: usize,
    #[serde(default)]
    pub basepoint: [f64; 2],
}

fn default_subdivisions() -> usize {
    16
}
fn default_polygon_depth() -> usize {
    2
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec {
            n: default_subdivisions(),
            depth: default_polygon_depth(),
            basepoint: [0.0, 0.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingSpec {
    #[serde(default = "default_smoothing_radius")]
    pub radius: f64,
    #[serde(default = "default_c_safety")]
    pub c_safety: f64,
}

fn default_smoothing_radius() -> f64 {
    0.1
}
fn default_c_safety() -> f64 {
    minkprob_core::smoothing::C_SAFETY
}

impl Default for SmoothingSpec {
    fn default() -> Self {
        SmoothingSpec {
            radius: default_smoothing_radius(),
            c_safety: default_c_safety(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PogorelovSpec {
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub c0: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Run the Alexandrov–Heinz probe alongside.
    #[serde(default)]
    pub contrast: bool,
}

fn default_d() -> usize {
    3
}
fn default_k() -> usize {
    2
}
fn default_samples() -> usize {
    100_000
}
fn default_radius() -> f64 {
    1.0
}

impl Default for PogorelovSpec {
    fn default() -> Self {
        PogorelovSpec {
            d: 3,
            k: 2,
            samples: default_samples(),
            c0: 0.0,
            radius: 1.0,
            contrast: false,
        }
    }
}

/// JSON lattice file: row-major generators, relators over `a b c …` and
/// inverses `A B C …`, optional cocycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub generators: Vec<[f64; 9]>,
    pub relators: Vec<Vec<String>>,
    pub cocycle: Option<Vec<[f64; 3]>>,
}

/// Parses `text`, reporting syntax and type errors with line and column.
pub fn parse_spec(text: &str, source_name: &str) -> CliResult<ProblemSpec> {
    serde_json::from_str(text).map_err(|e| CliError::Spec {
        source_name: source_name.to_string(),
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// A spec with the context needed to resolve relative paths and seeds.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub source_name: String,
    pub base_dir: PathBuf,
    pub seed: u64,
}

fn one_of<T>(name: &str, src: &str, a: (&str, bool), b: (&str, bool), c: (&str, bool), out: T) -> CliResult<T> {
    let n = [a.1, b.1, c.1].iter().filter(|x| **x).count();
    if n != 1 {
        let names: Vec<&str> = [a, b, c].iter().filter(|x| !x.0.is_empty()).map(|x| x.0).collect();
        return Err(CliError::field(src, name, format!("exactly one of {} is required", names.join(", "))));
    }
    Ok(out)
}

impl Problem {
    pub fn new(spec: ProblemSpec, source_name: &str, base_dir: &Path, seed: u64) -> Self {
        Problem {
            spec,
            source_name: source_name.to_string(),
            base_dir: base_dir.to_path_buf(),
            seed,
        }
    }

    fn err(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::field(&self.source_name, field, message)
    }

    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn require<'a, T>(&self, v: &'a Option<T>, field: &str) -> CliResult<&'a T> {
        v.as_ref().ok_or_else(|| self.err(field, "missing"))
    }

    pub fn grid(&self) -> CliResult<Arc<BallGrid>> {
        let g = self.spec.grid.unwrap_or_default();
        BallGrid::new(g.rings, g.angular, g.rho_max)
            .map(Arc::new)
            .map_err(|e| self.err("grid", e.to_string()))
    }

    pub fn tol(&self) -> f64 {
        self.spec.tol.unwrap_or(1e-3)
    }

    pub fn dirichlet_options(&self) -> CliResult<DirichletOptions> {
        let mut o = DirichletOptions::default();
        o.solve.tol = self.tol();
        if !(o.solve.tol > 0.0) {
            return Err(self.err("tol", "must be positive"));
        }
        if let Some(m) = self.spec.max_sweeps {
            o.solve.max_sweeps = m;
        }
        o.init = match self.spec.init {
            None | Some(InitSpec::Envelope) => Init::Envelope,
            Some(InitSpec::Paraboloid(a)) => Init::Paraboloid(a),
            Some(InitSpec::Below(_)) => return Err(self.err("init", "`below` applies to equivariant problems")),
        };
        Ok(o)
    }

    /// The known function as a closure on the disk.
    pub fn closed_form(&self) -> CliResult<Option<Box<dyn Fn([f64; 2]) -> f64 + Send + Sync>>> {
        let Some(f) = &self.spec.function else { return Ok(None) };
        let Some(preset) = f.preset else { return Ok(None) };
        if f.csv.is_some() {
            return Err(self.err("function", "exactly one of preset, csv is required"));
        }
        let q = f.q.unwrap_or([0.0, 0.0]);
        let c = f.c.unwrap_or(0.0);
        Ok(Some(match preset {
            FunctionPreset::Quadratic => {
                let a = f.a.unwrap_or([1.0, 0.0, 1.0]);
                if a[0] <= 0.0 || a[0] * a[2] - a[1] * a[1] < 0.0 {
                    return Err(self.err("function.a", "quadratic form must be positive semidefinite"));
                }
                Box::new(move |x| {
                    0.5 * (a[0] * x[0] * x[0] + 2.0 * a[1] * x[0] * x[1] + a[2] * x[1] * x[1])
                        + q[0] * x[0]
                        + q[1] * x[1]
                        + c
                })
            }
            FunctionPreset::Affine => Box::new(move |x| q[0] * x[0] + q[1] * x[1] + c),
            FunctionPreset::Hyperboloid => {
                let t = f.t.unwrap_or(1.0);
                if !(t > 0.0) {
                    return Err(self.err("function.t", "must be positive"));
                }
                Box::new(move |x| -t * lambda_of(x))
            }
            FunctionPreset::Random => {
                let s = SmoothConvex::random(&mut ChaCha8Rng::seed_from_u64(self.seed));
                Box::new(move |x| s.eval(x))
            }
        }))
    }

    /// The known function on the spec grid (or on its own grid if read from CSV).
    pub fn function(&self) -> CliResult<PLFunctionB> {
        let f = self.require(&self.spec.function, "function")?;
        if let Some(csv) = &f.csv {
            if f.preset.is_some() {
                return Err(self.err("function", "exactly one of preset, csv is required"));
            }
            return io::read_function(&self.path(csv));
        }
        let closed = self.closed_form()?.ok_or_else(|| self.err("function", "exactly one of preset, csv is required"))?;
        Ok(PLFunctionB::from_fn(self.grid()?, closed)?)
    }

    pub fn boundary(&self, grid: &BallGrid) -> CliResult<BoundaryData> {
        let b = self.require(&self.spec.boundary, "boundary")?;
        let src = &self.source_name;
        one_of(
            "boundary",
            src,
            ("preset", b.preset.is_some()),
            ("samples", b.samples.is_some()),
            ("csv", b.csv.is_some()),
            (),
        )?;
        if let Some(s) = &b.samples {
            let n = s.len();
            return BoundaryData::from_fn(n, |t| s[((t * n as f64 / std::f64::consts::TAU).round() as usize) % n])
                .map_err(|e| self.err("boundary.samples", e.to_string()));
        }
        if let Some(p) = &b.csv {
            let path = self.path(p);
            return io::parse_boundary(&io::read_text(&path)?, &path);
        }
        let n = grid.angular;
        let data = match b.preset.expect("checked above") {
            BoundaryPreset::Trace => {
                let f = self
                    .closed_form()?
                    .ok_or_else(|| self.err("boundary.preset", "`trace` needs a preset `function`"))?;
                let r = grid.rho_max;
                BoundaryData::from_fn(n, |t| f([r * t.cos(), r * t.sin()]))
            }
            BoundaryPreset::Constant => BoundaryData::from_fn(n, |_| b.value.unwrap_or(0.0)),
            BoundaryPreset::Tent => ProbeBoundary::Tent.data(n),
            BoundaryPreset::Cosine => {
                let (a, k) = (b.amplitude.unwrap_or(1.0), b.frequency.unwrap_or(1.0));
                BoundaryData::from_fn(n, |t| a * (k * t).cos())
            }
        };
        data.map_err(|e| self.err("boundary", e.to_string()))
    }

    pub fn envelope(&self, grid: Arc<BallGrid>) -> CliResult<PLFunctionB> {
        let g = self.boundary(&grid)?;
        Ok(convex_envelope_boundary(&g, grid)?)
    }

    pub fn measure(&self, grid: Arc<BallGrid>) -> CliResult<DiscreteMeasureB> {
        let m = self.require(&self.spec.measure, "measure")?;
        one_of(
            "measure",
            &self.source_name,
            ("preset", m.preset.is_some()),
            ("csv", m.csv.is_some()),
            ("", false),
            (),
        )?;
        if let Some(p) = &m.csv {
            let path = self.path(p);
            return io::parse_measure(&io::read_text(&path)?, &path, grid);
        }
        let value = m.value.unwrap_or(1.0);
        let mu = match m.preset.expect("checked above") {
            MeasurePreset::Zero => Ok(DiscreteMeasureB::zero(grid)),
            MeasurePreset::FromFunction => {
                let h = self.function()?;
                if h.grid.nodes != grid.nodes {
                    return Err(self.err("measure.preset", "function CSV grid differs from `grid`"));
                }
                ma_measure(&h.convexify()?)
            }
            MeasurePreset::Density => DiscreteMeasureB::from_density(grid, |_| value),
            MeasurePreset::Dirac => {
                let node = m.node.unwrap_or(0);
                if node >= grid.len() || grid.is_boundary(node) {
                    return Err(self.err("measure.node", "must be an interior node"));
                }
                DiscreteMeasureB::dirac(grid, node, value)
            }
            MeasurePreset::Hyperbolic => {
                let v = grid.hyperbolic_cell_volumes();
                let mass = (0..grid.len()).map(|i| if grid.is_boundary(i) { 0.0 } else { value * v[i] }).collect();
                DiscreteMeasureB::new(grid, mass)
            }
        };
        mu.map_err(|e| self.err("measure", e.to_string()))
    }

    pub fn lattice(&self) -> CliResult<(Lattice, Option<Vec<[f64; 3]>>)> {
        match self.spec.lattice.as_deref() {
            None | Some("genus2") => Ok((Lattice::genus2(), None)),
            Some(p) => {
                let path = self.path(Path::new(p));
                let text = io::read_text(&path)?;
                let name = path.display().to_string();
                let file: LatticeFile = serde_json::from_str(&text).map_err(|e| CliError::Spec {
                    source_name: name.clone(),
                    location: format!("line {}, column {}", e.line(), e.column()),
                    message: e.to_string(),
                })?;
                let gens: Vec<Mat3> = file
                    .generators
                    .iter()
                    .map(|m| [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]])
                    .collect();
                let rels = file
                    .relators
                    .iter()
                    .map(|w| parse_word(w, gens.len()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::field(&name, "relators", e.to_string()))?;
                let lat = Lattice::new(gens, rels, None, MATRIX_TOL)
                    .map_err(|e| CliError::field(&name, "generators", e.to_string()))?;
                Ok((lat, file.cocycle))
            }
        }
    }

    pub fn domain_grid(&self, lattice: &Lattice) -> CliResult<DomainGrid> {
        let d = self.spec.domain.unwrap_or_default();
        DomainGrid::new(lattice, &BallPoint(d.basepoint), d.depth, d.n).map_err(|e| self.err("domain", e.to_string()))
    }

    /// The lattice's cocycle: from the spec, else from the lattice file, else zero.
    pub fn cocycle(&self, lattice: &Lattice, from_file: Option<Vec<[f64; 3]>>) -> CliResult<Cocycle> {
        let explicit = |v: Vec<[f64; 3]>| {
            Cocycle::new(lattice, v.into_iter().map(MinkVector).collect(), MATRIX_TOL)
                .map_err(|e| self.err("cocycle", e.to_string()))
        };
        match self.spec.cocycle.clone() {
            None => from_file.map_or_else(|| Ok(Cocycle::zero(lattice)), explicit),
            Some(CocycleSpec::Named(s)) if s == "zero" => Ok(Cocycle::zero(lattice)),
            Some(CocycleSpec::Named(s)) => Err(self.err("cocycle", format!("unknown cocycle `{s}`"))),
            Some(CocycleSpec::Coboundary { coboundary }) => Ok(Cocycle::coboundary(lattice, MinkVector(coboundary))),
            Some(CocycleSpec::Explicit(v)) => explicit(v),
        }
    }

    pub fn seed_point(&self) -> CliResult<MinkVector> {
        let p = MinkVector(self.spec.seed_point.unwrap_or([0.0, 0.0, 3.0]));
        if !p.is_future_timelike() {
            return Err(self.err("seed_point", "must be future timelike"));
        }
        Ok(p)
    }

    pub fn orbit_depth(&self) -> usize {
        self.spec.orbit_depth.unwrap_or(6)
    }

    /// The equivariant space. Fuchsian and coboundary cocycles get their
    /// exact `h̄_τ`; any other cocycle uses the orbit-hull approximation.
    pub fn eq_space(&self) -> CliResult<Arc<EqSpace>> {
        let (lat, file_cocycle) = self.lattice()?;
        let grid = self.domain_grid(&lat)?;
        let cocycle = self.cocycle(&lat, file_cocycle)?;
        if cocycle.is_zero() {
            return Ok(EqSpace::fuchsian(grid)?);
        }
        if let Some(CocycleSpec::Coboundary { coboundary }) = &self.spec.cocycle {
            return Ok(EqSpace::coboundary(grid, MinkVector(*coboundary))?);
        }
        let ht = compute_h_tau(grid, cocycle, self.seed_point()?, self.orbit_depth())?;
        Ok(ht.support.space)
    }

    pub fn eq_measure(&self, grid: &DomainGrid) -> CliResult<InvariantMeasure> {
        let m = self.require(&self.spec.measure, "measure")?;
        let value = m.value.unwrap_or(1.0);
        match m.preset {
            Some(MeasurePreset::Hyperbolic) if m.csv.is_none() => {
                InvariantMeasure::constant(grid, value).map_err(|e| self.err("measure.value", e.to_string()))
            }
            _ => Err(self.err("measure", "equivariant problems take `{\"preset\": \"hyperbolic\", \"value\": c}`")),
        }
    }

    pub fn eq_options(&self) -> CliResult<EqSolveOptions> {
        let mut o = EqSolveOptions::default();
        o.solve.tol = self.tol();
        if !(o.solve.tol > 0.0) {
            return Err(self.err("tol", "must be positive"));
        }
        if let Some(m) = self.spec.max_sweeps {
            o.solve.max_sweeps = m;
        }
        o.quad_order = self.spec.quad_order.unwrap_or(COVOLUME_ORDER);
        if o.quad_order == 0 {
            return Err(self.err("quad_order", "must be positive"));
        }
        o.init = match self.spec.init {
            None => EqInit::Tau,
            Some(InitSpec::Below(c)) => EqInit::Below(c),
            Some(_) => return Err(self.err("init", "equivariant problems take `below`")),
        };
        Ok(o)
    }

    pub fn pogorelov(&self) -> (PogorelovSpec, LowerBoundOptions) {
        let p = self.spec.pogorelov.unwrap_or_default();
        let opts = LowerBoundOptions {
            samples: p.samples,
            radius: p.radius,
            seed: self.seed,
            ..LowerBoundOptions::default()
        };
        (p, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_the_position() {
        let err = parse_spec("{\n  \"tol\": 1e-3,\n  \"grid\": {\"rings\": \"x\"}\n}", "p.json").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = parse_spec("{\"tolerance\": 1}", "p.json").unwrap_err();
        assert!(err.to_string().contains("unknown field `tolerance`"), "{err}");
    }

    #[test]
    fn measure_needs_exactly_one_source() {
        let spec = parse_spec(r#"{"measure": {"preset": "zero", "csv": "m.csv"}}"#, "p.json").unwrap();
        let p = Problem::new(spec, "p.json", Path::new("."), 0);
        let err = p.measure(p.grid().unwrap()).unwrap_err();
        assert!(err.to_string().contains("field `measure`"), "{err}");
    }

    #[test]
    fn cocycle_forms() {
        for (text, zero) in [
            (r#"{"cocycle": "zero"}"#, true),
            (r#"{"cocycle": {"coboundary": [0.1, 0, 0]}}"#, false),
        ] {
            let p = Problem::new(parse_spec(text, "c").unwrap(), "c", Path::new("."), 0);
            let lat = Lattice::genus2();
            assert_eq!(p.cocycle(&lat, None).unwrap().is_zero(), zero);
        }
        let p = Problem::new(parse_spec(r#"{"cocycle": [[1,0,0],[0,0,0],[0,0,0],[0,0,0]]}"#, "c").unwrap(), "c", Path::new("."), 0);
        assert!(p.cocycle(&Lattice::genus2(), None).is_err());
    }
}
