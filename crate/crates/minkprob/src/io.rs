//! CSV and JSON formats.
//!
//! Every CSV has a header row; floats are written with 17 significant
//! digits, which round-trips `f64` exactly.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use minkprob_core::convex::{BoundaryData, GraphFunctionU, PLFunctionB};
use minkprob_core::equivariant::{EqSpace, EquivariantSupport};
use minkprob_core::grid::BallGrid;
use minkprob_core::measure::DiscreteMeasureB;
use serde::Serialize;

use crate::{CliError, CliResult};

pub const FUNCTION_HEADER: [&str; 5] = ["ring", "angle", "x1", "x2", "value"];
pub const MEASURE_HEADER: [&str; 4] = ["node", "x1", "x2", "mass"];
pub const BOUNDARY_HEADER: [&str; 2] = ["angle", "value"];
pub const DOMAIN_HEADER: [&str; 6] = ["rep", "node", "x1", "x2", "hbar", "h_tau"];

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn function_csv(h: &PLFunctionB) -> String {
    let g = &h.grid;
    csv_string(
        &FUNCTION_HEADER,
        (0..g.len()).map(|i| {
            let (ring, j) = g.ring_of(i);
            let angle = if ring == 0 { 0.0 } else { g.angle(j) };
            vec![
                ring.to_string(),
                num(angle),
                num(g.nodes[i][0]),
                num(g.nodes[i][1]),
                num(h.values[i]),
            ]
        }),
    )
}

pub fn measure_csv(mu: &DiscreteMeasureB) -> String {
    node_column_csv(&mu.grid, "mass", mu.mass())
}

/// One value per ball-grid node: `node, x1, x2, <name>`.
pub fn node_column_csv(grid: &BallGrid, name: &str, values: &[f64]) -> String {
    csv_string(
        &["node", "x1", "x2", name],
        values.iter().enumerate().map(|(i, v)| {
            vec![i.to_string(), num(grid.nodes[i][0]), num(grid.nodes[i][1]), num(*v)]
        }),
    )
}

pub fn boundary_csv(g: &BoundaryData) -> String {
    csv_string(&BOUNDARY_HEADER, g.samples().iter().map(|(t, v)| vec![num(*t), num(*v)]))
}

pub fn legendre_csv(u: &GraphFunctionU) -> String {
    csv_string(
        &["i", "j", "p1", "p2", "u"],
        (0..u.n).flat_map(|j| {
            (0..u.n).map(move |i| {
                let p = u.node(i, j);
                vec![i.to_string(), j.to_string(), num(p[0]), num(p[1]), num(u.values[j * u.n + i])]
            })
        }),
    )
}

pub fn domain_csv(h: &EquivariantSupport) -> String {
    let g = &h.space.grid;
    csv_string(
        &DOMAIN_HEADER,
        g.reps.iter().enumerate().map(|(k, &node)| {
            vec![
                k.to_string(),
                node.to_string(),
                num(g.nodes[node][0]),
                num(g.nodes[node][1]),
                num(h.hbar[k]),
                num(h.space.h_tau[k]),
            ]
        }),
    )
}

/// Parsed CSV body: one numeric row per record with its line number.
struct Table {
    rows: Vec<(u64, Vec<f64>)>,
}

fn read_table(text: &str, path: &Path, header: &[&str]) -> CliResult<Table> {
    let bad = |line: u64, message: String| CliError::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let found = r.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(bad(1, format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(bad(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let vals = rec
            .iter()
            .zip(header)
            .map(|(s, name)| {
                s.parse::<f64>()
                    .map_err(|_| bad(line, format!("column `{name}`: `{s}` is not a number")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push((line, vals));
    }
    if rows.is_empty() {
        return Err(bad(1, "no data rows".into()));
    }
    Ok(Table { rows })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Rebuilds the polar grid from the rows and checks every node position.
pub fn parse_function(text: &str, path: &Path) -> CliResult<PLFunctionB> {
    let t = read_table(text, path, &FUNCTION_HEADER)?;
    let bad = |line: u64, message: String| CliError::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let rings = t.rows.iter().map(|r| r.1[0]).fold(0.0, f64::max) as usize;
    let angular = t.rows.iter().filter(|r| r.1[0] == 1.0).count();
    if rings == 0 || t.rows.len() != 1 + rings * angular {
        return Err(bad(1, format!("{} rows do not form a polar grid", t.rows.len())));
    }
    // node (rings, 0) sits at (ρ_max, 0) up to the rounding of ρ_max·i/R
    let last = t.rows[1 + (rings - 1) * angular].1[2];
    let grid = [last, f64::from_bits(last.to_bits() + 1), f64::from_bits(last.to_bits() - 1)]
        .into_iter()
        .filter_map(|rho| BallGrid::new(rings, angular, rho).ok())
        .find(|g| g.nodes.iter().zip(&t.rows).all(|(x, r)| x[0] == r.1[2] && x[1] == r.1[3]))
        .ok_or_else(|| bad(1, "node coordinates do not match a polar grid".into()))?;
    for (i, (line, r)) in t.rows.iter().enumerate() {
        let (ring, _) = grid.ring_of(i);
        if r[0] != ring as f64 {
            return Err(bad(*line, format!("expected ring {ring}")));
        }
    }
    let values = t.rows.iter().map(|r| r.1[4]).collect();
    Ok(PLFunctionB::new(Arc::new(grid), values)?)
}

pub fn read_function(path: &Path) -> CliResult<PLFunctionB> {
    parse_function(&read_text(path)?, path)
}

/// A measure on a known grid; node positions must match within `1e-12`.
pub fn parse_measure(text: &str, path: &Path, grid: Arc<BallGrid>) -> CliResult<DiscreteMeasureB> {
    let t = read_table(text, path, &MEASURE_HEADER)?;
    let bad = |line: u64, message: String| CliError::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    if t.rows.len() != grid.len() {
        return Err(bad(1, format!("{} rows for a grid of {} nodes", t.rows.len(), grid.len())));
    }
    for (i, (line, r)) in t.rows.iter().enumerate() {
        let x = grid.nodes[i];
        if r[0] != i as f64 || (r[1] - x[0]).abs() > 1e-12 || (r[2] - x[1]).abs() > 1e-12 {
            return Err(bad(*line, format!("row does not match grid node {i}")));
        }
    }
    Ok(DiscreteMeasureB::new(grid, t.rows.iter().map(|r| r.1[3]).collect())?)
}

pub fn parse_boundary(text: &str, path: &Path) -> CliResult<BoundaryData> {
    let t = read_table(text, path, &BOUNDARY_HEADER)?;
    Ok(BoundaryData::new(t.rows.iter().map(|r| (r.1[0], r.1[1])).collect())?)
}

/// Values at the representatives of `space`; node indices must match.
pub fn parse_domain(text: &str, path: &Path, space: &Arc<EqSpace>) -> CliResult<EquivariantSupport> {
    let t = read_table(text, path, &DOMAIN_HEADER)?;
    let reps = &space.grid.reps;
    if t.rows.len() != reps.len() {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            line: 1,
            message: format!("{} rows for {} representatives", t.rows.len(), reps.len()),
        });
    }
    for (k, (line, r)) in t.rows.iter().enumerate() {
        if r[0] != k as f64 || r[1] != reps[k] as f64 {
            return Err(CliError::Csv {
                path: path.to_path_buf(),
                line: *line,
                message: format!("expected representative {k} at node {}", reps[k]),
            });
        }
    }
    Ok(EquivariantSupport::new(space.clone(), t.rows.iter().map(|r| r.1[4]).collect())?)
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Output directory of one command; remembers what it wrote.
#[derive(Debug)]
pub struct Outputs {
    pub dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Outputs {
    pub fn create(dir: impl Into<PathBuf>) -> CliResult<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Outputs { dir, written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.write(name, &json(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_round_trip_is_bit_exact() {
        let g = Arc::new(BallGrid::new(7, 13, 0.93).unwrap());
        let h = PLFunctionB::from_fn(g, |x| (1.0 + x[0]).ln() + x[1] / 3.0).unwrap();
        let back = parse_function(&function_csv(&h), Path::new("h.csv")).unwrap();
        assert_eq!(back.values, h.values);
        assert_eq!(back.grid.nodes, h.grid.nodes);
        assert_eq!(back.grid.rho_max, h.grid.rho_max);
    }

    #[test]
    fn bad_rows_report_their_line() {
        let g = Arc::new(BallGrid::new(2, 4, 0.5).unwrap());
        let h = PLFunctionB::from_fn(g, |x| x[0]).unwrap();
        let text = function_csv(&h).replacen("0.0000000000000000e0\n", "oops\n", 1);
        match parse_function(&text, Path::new("h.csv")) {
            Err(CliError::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let err = parse_function("a,b\n1,2\n", Path::new("h.csv")).unwrap_err();
        assert!(err.to_string().contains("expected header"));
    }

    #[test]
    fn measure_and_boundary_round_trip() {
        let g = Arc::new(BallGrid::new(3, 6, 0.8).unwrap());
        let mu = DiscreteMeasureB::from_density(g.clone(), |x| 1.0 + x[0]).unwrap();
        let back = parse_measure(&measure_csv(&mu), Path::new("m.csv"), g).unwrap();
        assert_eq!(back.mass(), mu.mass());
        let b = BoundaryData::from_fn(9, |t| t.sin()).unwrap();
        assert_eq!(parse_boundary(&boundary_csv(&b), Path::new("b.csv")).unwrap(), b);
    }
}
