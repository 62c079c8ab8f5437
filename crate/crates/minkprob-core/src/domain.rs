//! Dirichlet fundamental polygons of surface groups and their triangulation.
//!
//! In the projective model geodesics are straight chords, so the Dirichlet
//! domain `{y : d(y, b) ≤ d(y, γb)}` is a Euclidean polygon cut out by the
//! half-planes `⟨ŷ, γb − b⟩ ≤ 0`.

use alloc::vec::Vec;

use crate::grid::triangle_hyperbolic_volume;
use crate::lattice::{element, enumerate_elements, GroupElement, Lattice, Letter, Word};
use crate::math::{self, mat_max_diff, mat_vec, Mat3, PI};
use crate::mink::{self, hyperbolic_distance, lorentz_inverse, BallPoint, MinkVector};
use crate::monotone::{Cell, BOX_LABEL};
use crate::{Error, Result};

/// One side of a Dirichlet polygon: the bisector of `b` and `γb`.
#[derive(Clone, Debug)]
pub struct PolygonSide {
    /// `γ`; its inverse maps this side onto `partner`.
    pub element: GroupElement,
    pub partner: usize,
    /// `γb − b`, the outward normal of the side.
    pub normal: MinkVector,
}

/// Convex fundamental polygon; side `s` runs from `vertices[s]` to `vertices[s + 1]`
/// counterclockwise.
#[derive(Clone, Debug)]
pub struct DirichletPolygon {
    pub basepoint: MinkVector,
    pub vertices: Vec<[f64; 2]>,
    pub sides: Vec<PolygonSide>,
    /// Hyperbolic area from the angle sum.
    pub area: f64,
}

/// Hyperboloid point of a disk point.
pub fn hyperboloid(x: [f64; 2]) -> MinkVector {
    let l = mink::lambda_of(x);
    MinkVector([x[0] / l, x[1] / l, 1.0 / l])
}

/// Disk point of a future timelike vector.
pub fn disk(v: &MinkVector) -> [f64; 2] {
    [v.0[0] / v.0[2], v.0[1] / v.0[2]]
}

/// Pure boost taking the hyperboloid point `v` to the origin `e₃`.
pub fn boost_to_origin(v: &MinkVector) -> Mat3 {
    let [x1, x2, x3] = v.0;
    let c = 1.0 / (1.0 + x3);
    [
        [1.0 + x1 * x1 * c, x1 * x2 * c, -x1],
        [x1 * x2 * c, 1.0 + x2 * x2 * c, -x2],
        [-x1, -x2, x3],
    ]
}

/// Point at fraction `f` of the geodesic from `p` to `q` (hyperboloid points).
pub fn geodesic_point(p: &MinkVector, q: &MinkVector, f: f64) -> MinkVector {
    let d = hyperbolic_distance(p, q);
    if d < 1e-14 {
        return *p;
    }
    let s = math::sinh(d);
    (math::sinh((1.0 - f) * d) / s) * *p + (math::sinh(f * d) / s) * *q
}

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// Cancels adjacent inverse pairs.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl DirichletPolygon {
    /// The Dirichlet domain at `basepoint` over group elements of word length
    /// ≤ `depth`.
    pub fn new(lattice: &Lattice, basepoint: &BallPoint, depth: usize) -> Result<Self> {
        if basepoint.norm() >= 1.0 {
            return Err(Error::domain("basepoint must lie in the open disk"));
        }
        let b = hyperboloid(basepoint.0);
        let elems = enumerate_elements(lattice, None, depth);
        let mut cell = Cell::square(2.0);
        let mut scratch = Cell::default();
        let mut normals = Vec::with_capacity(elems.len());
        for (i, e) in elems.iter().enumerate() {
            let m = e.isometry.apply_linear(&b) - b;
            normals.push(m);
            if i == 0 {
                continue;
            }
            if m.max_abs() < 1e-9 {
                return Err(Error::validation("basepoint is fixed by a nontrivial group element"));
            }
            let n = [m.0[0], m.0[1]];
            if cell.cut_by(n, m.0[2]) {
                cell.clip(n, m.0[2], i, &mut scratch);
            }
        }
        // bisectors through a vertex leave slivers of rounding size
        let mut k = 0;
        while k < cell.verts.len() && cell.verts.len() > 2 {
            let next = (k + 1) % cell.verts.len();
            if math::norm2(math::sub2(cell.verts[next], cell.verts[k])) < 1e-9 {
                cell.verts.remove(k);
                cell.labels.remove(k);
            } else {
                k += 1;
            }
        }
        if cell.verts.len() < 3
            || cell.labels.contains(&BOX_LABEL)
            || cell.verts.iter().any(|&v| math::norm2(v) >= 1.0 - 1e-12)
        {
            return Err(Error::IncreaseDepth(depth));
        }
        let m = cell.verts.len();
        let mut sides: Vec<PolygonSide> = cell
            .labels
            .iter()
            .map(|&l| PolygonSide {
                element: elems[l].clone(),
                partner: usize::MAX,
                normal: normals[l],
            })
            .collect();
        for s in 0..m {
            let inv = lorentz_inverse(&sides[s].element.isometry.linear);
            let partner = (0..m)
                .find(|&t| mat_max_diff(&sides[t].element.isometry.linear, &inv) < 1e-8 * (1.0 + math::mat_max_abs(&inv)))
                .ok_or(Error::IncreaseDepth(depth))?;
            sides[s].partner = partner;
        }
        let poly = DirichletPolygon {
            basepoint: b,
            vertices: cell.verts,
            sides,
            area: 0.0,
        };
        let err = poly.pairing_error();
        if err > 1e-8 {
            return Err(Error::validation(alloc::format!(
                "side pairings do not match edges (deviation {err:.2e})"
            )));
        }
        let area = poly.angle_area();
        Ok(DirichletPolygon { area, ..poly })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Largest disk-coordinate deviation when mapping each side onto its
    /// partner by the recorded pairing (endpoints reversed).
    pub fn pairing_error(&self) -> f64 {
        let m = self.len();
        let mut err = 0.0_f64;
        for (s, side) in self.sides.iter().enumerate() {
            let inv = lorentz_inverse(&side.element.isometry.linear);
            let p = side.partner;
            let a = mink::projective_action(&inv, &BallPoint(self.vertices[s]));
            let b = mink::projective_action(&inv, &BallPoint(self.vertices[(s + 1) % m]));
            err = err
                .max(math::norm2(math::sub2(a.0, self.vertices[(p + 1) % m])))
                .max(math::norm2(math::sub2(b.0, self.vertices[p])));
        }
        err
    }

    /// `(m − 2)π − Σ interior angles` (Gauss–Bonnet).
    fn angle_area(&self) -> f64 {
        let m = self.len();
        let unit = |v: &MinkVector| (1.0 / math::sqrt(v.inner(v))) * *v;
        let mut angles = 0.0;
        for s in 0..m {
            let a = unit(&self.sides[(s + m - 1) % m].normal);
            let b = unit(&self.sides[s].normal);
            angles += libm::acos((-a.inner(&b)).clamp(-1.0, 1.0));
        }
        (m as f64 - 2.0) * PI - angles
    }

    /// Hyperbolic area by quadrature over the fan from the basepoint, each
    /// fan triangle split into `32²` pieces (the density blows up towards
    /// the vertices).
    pub fn quadrature_area(&self) -> f64 {
        const SPLIT: usize = 32;
        let c = disk(&self.basepoint);
        let m = self.len();
        let mut total = 0.0;
        for s in 0..m {
            let (a, b) = (self.vertices[s], self.vertices[(s + 1) % m]);
            let at = |i: usize, j: usize| {
                let (u, v) = (i as f64 / SPLIT as f64, j as f64 / SPLIT as f64);
                [
                    c[0] + u * (a[0] - c[0]) + v * (b[0] - c[0]),
                    c[1] + u * (a[1] - c[1]) + v * (b[1] - c[1]),
                ]
            };
            for i in 0..SPLIT {
                for j in 0..SPLIT - i {
                    total += triangle_hyperbolic_volume(at(i, j), at(i + 1, j), at(i, j + 1));
                    if i + j + 1 < SPLIT {
                        total += triangle_hyperbolic_volume(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
                    }
                }
            }
        }
        total
    }

    /// Largest violation `⟨x̂, γb − b⟩` over the sides (≤ 0 inside).
    pub fn excess(&self, x: [f64; 2]) -> (usize, f64) {
        let xh = MinkVector([x[0], x[1], 1.0]);
        self.sides
            .iter()
            .enumerate()
            .map(|(s, side)| (s, xh.inner(&side.normal) / math::sqrt(side.normal.inner(&side.normal))))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    }

    pub fn contains(&self, x: [f64; 2], tol: f64) -> bool {
        self.excess(x).1 <= tol
    }

    /// Moves `x` into the polygon: returns `y` and a word `w` with `x = w̄(y)`.
    pub fn reduce(&self, lattice: &Lattice, x: [f64; 2]) -> Result<([f64; 2], Word)> {
        if math::norm2(x) >= 1.0 {
            return Err(Error::domain("point outside the open disk"));
        }
        let mut y = hyperboloid(x);
        let mut word = Word::new();
        for _ in 0..10_000 {
            let (s, e) = self.excess(disk(&y));
            if e <= 1e-12 {
                let w = free_reduce(&word);
                // re-derive the point from the word to avoid drift
                let g = lorentz_inverse(&element(lattice, None, &w).linear);
                let v = MinkVector(mat_vec(&g, &hyperboloid(x).0));
                return Ok((disk(&v), w));
            }
            let side = &self.sides[s];
            y = MinkVector(mat_vec(&lorentz_inverse(&side.element.isometry.linear), &y.0));
            word.extend_from_slice(&side.element.word);
        }
        Err(Error::NonConvergence {
            what: "reduction to the fundamental polygon".into(),
            iterations: 10_000,
            residual: self.excess(disk(&y)).1,
        })
    }
}

/// A neighbour of a representative node in the tessellation: the image
/// `ε·v(rep(var))` of the representative of `var` under the word `word`.
#[derive(Clone, Debug)]
pub struct StencilPoint {
    pub var: usize,
    pub word: Word,
    pub point: MinkVector,
}

/// Triangulation of a Dirichlet polygon by geodesic subdivision of the
/// sectors from the basepoint.
///
/// Sector `s` is the triangle (basepoint, vertex s, vertex s+1); row `i`
/// joins the points at fraction `i/n` of its two radial edges, and carries
/// `i + 1` equally spaced nodes. Nodes on paired sides and at identified
/// vertices are tied to one representative each, so the unknowns of an
/// equivariant function are the values at representatives.
#[derive(Clone, Debug)]
pub struct DomainGrid {
    pub lattice: Lattice,
    pub polygon: DirichletPolygon,
    pub n: usize,
    /// Disk coordinates.
    pub nodes: Vec<[f64; 2]>,
    /// Hyperboloid points.
    pub points: Vec<MinkVector>,
    pub triangles: Vec<[usize; 3]>,
    /// Index of the node's representative among `reps`.
    pub var_of: Vec<usize>,
    pub reps: Vec<usize>,
    /// `v(node) = element(word)·v(rep)`.
    pub from_rep: Vec<Word>,
    /// Per representative: tessellation neighbours within a few spacings.
    pub stencils: Vec<Vec<StencilPoint>>,
    /// Per representative: hyperbolic area of its Voronoi cell.
    pub weights: Vec<f64>,
    /// Per representative: longest incident edge.
    pub spacing: Vec<f64>,
}

/// Stencil radius in units of the local spacing.
const STENCIL_SPACINGS: f64 = 2.2;

impl DomainGrid {
    pub fn new(lattice: &Lattice, basepoint: &BallPoint, depth: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("domain grid needs at least one subdivision"));
        }
        let polygon = DirichletPolygon::new(lattice, basepoint, depth)?;
        let m = polygon.len();
        let b = polygon.basepoint;
        let corners: Vec<MinkVector> = polygon.vertices.iter().map(|&v| hyperboloid(v)).collect();
        let total = 1 + m * n * (n + 1) / 2;
        let node = |s: usize, i: usize, j: usize| -> usize {
            if i == 0 {
                return 0;
            }
            let (s, j) = if j == i { ((s + 1) % m, 0) } else { (s % m, j) };
            1 + m * i * (i - 1) / 2 + s * i + j
        };
        let mut points = alloc::vec![MinkVector::ZERO; total];
        points[0] = b;
        for s in 0..m {
            for i in 1..=n {
                let f = i as f64 / n as f64;
                let a = geodesic_point(&b, &corners[s], f);
                let c = geodesic_point(&b, &corners[(s + 1) % m], f);
                for j in 0..i {
                    let p = geodesic_point(&a, &c, j as f64 / i as f64);
                    let l = math::sqrt(-p.inner(&p));
                    points[node(s, i, j)] = (1.0 / l) * p;
                }
            }
        }
        let nodes: Vec<[f64; 2]> = points.iter().map(disk).collect();
        let mut triangles = Vec::with_capacity(m * n * n);
        for s in 0..m {
            for i in 0..n {
                for j in 0..=i {
                    triangles.push([node(s, i, j), node(s, i + 1, j), node(s, i + 1, j + 1)]);
                    if j < i {
                        triangles.push([node(s, i, j), node(s, i + 1, j + 1), node(s, i, j + 1)]);
                    }
                }
            }
        }

        // identifications along paired sides: v(y) = γ_s v(y')
        let mut links: Vec<Vec<(usize, Word)>> = alloc::vec![Vec::new(); total];
        for (s, side) in polygon.sides.iter().enumerate() {
            let p = side.partner;
            let g = side.element.isometry.linear;
            for j in 0..=n {
                let y = node(s, n, j);
                let yp = node(p, n, n - j);
                let img = MinkVector(mat_vec(&g, &points[yp].0));
                if (img - points[y]).max_abs() > 1e-8 * (1.0 + points[y].max_abs()) {
                    return Err(Error::validation("side nodes do not match under the pairing"));
                }
                links[yp].push((y, side.element.word.clone()));
                links[y].push((yp, inverse_word(&side.element.word)));
            }
        }
        let mut var_of = alloc::vec![usize::MAX; total];
        let mut from_rep: Vec<Word> = alloc::vec![Word::new(); total];
        let mut reps = Vec::new();
        for start in 0..total {
            if var_of[start] != usize::MAX {
                continue;
            }
            let var = reps.len();
            reps.push(start);
            var_of[start] = var;
            let mut stack = alloc::vec![start];
            while let Some(a) = stack.pop() {
                for (c, w) in &links[a] {
                    if var_of[*c] == usize::MAX {
                        var_of[*c] = var;
                        let mut word = w.clone();
                        word.extend_from_slice(&from_rep[a]);
                        from_rep[*c] = free_reduce(&word);
                        stack.push(*c);
                    }
                }
            }
        }

        let nv = reps.len();
        let mut spacing = alloc::vec![0.0_f64; nv];
        for t in &triangles {
            for e in 0..3 {
                let (p, q) = (t[e], t[(e + 1) % 3]);
                let d = hyperbolic_distance(&points[p], &points[q]);
                for v in [p, q] {
                    let k = var_of[v];
                    spacing[k] = spacing[k].max(d);
                }
            }
        }

        let mut grid = DomainGrid {
            lattice: lattice.clone(),
            polygon,
            n,
            nodes,
            points,
            triangles,
            var_of,
            reps,
            from_rep,
            stencils: Vec::new(),
            weights: Vec::new(),
            spacing,
        };
        grid.build_stencils(depth)?;
        Ok(grid)
    }

    fn build_stencils(&mut self, depth: usize) -> Result<()> {
        let b = self.polygon.basepoint;
        let outer = self.points.iter().map(|p| hyperbolic_distance(p, &b)).fold(0.0, f64::max);
        let reach = self.spacing.iter().fold(0.0_f64, |a, &s| a.max(s)) * STENCIL_SPACINGS;
        // tiles meeting the reach-neighbourhood of the polygon
        let tiles: Vec<GroupElement> = enumerate_elements(&self.lattice, None, depth.max(4) + 1)
            .into_iter()
            .filter(|e| hyperbolic_distance(&e.isometry.apply_linear(&b), &b) <= 2.0 * outer + reach + 1e-9)
            .collect();
        let centres: Vec<MinkVector> = tiles.iter().map(|e| e.isometry.apply_linear(&b)).collect();
        let nv = self.reps.len();
        let mut stencils = Vec::with_capacity(nv);
        let mut weights = Vec::with_capacity(nv);
        for k in 0..nv {
            let vk = self.points[self.reps[k]];
            let radius = STENCIL_SPACINGS * self.spacing[k];
            let mut st: Vec<StencilPoint> = Vec::new();
            for (t, tile) in tiles.iter().enumerate() {
                if hyperbolic_distance(&centres[t], &vk) > outer + radius + 1e-9 {
                    continue;
                }
                for (y, py) in self.points.iter().enumerate() {
                    let p = tile.isometry.apply_linear(py);
                    // acosh amplifies rounding near 1, so self-images are caught by coordinates
                    if hyperbolic_distance(&p, &vk) > radius || (p - vk).max_abs() < 1e-9 * (1.0 + p.max_abs()) {
                        continue;
                    }
                    if st.iter().any(|q| (q.point - p).max_abs() < 1e-9 * (1.0 + p.max_abs())) {
                        continue;
                    }
                    let mut word = tile.word.clone();
                    word.extend_from_slice(&self.from_rep[y]);
                    st.push(StencilPoint {
                        var: self.var_of[y],
                        word: free_reduce(&word),
                        point: p,
                    });
                }
            }
            weights.push(voronoi_area(&vk, st.iter().map(|s| s.point))?);
            stencils.push(st);
        }
        self.stencils = stencils;
        self.weights = weights;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.reps.len()
    }

    /// Triangle containing `y` (a point of the polygon) and its barycentric
    /// coordinates.
    pub fn locate(&self, y: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let m = self.polygon.len();
        let per = self.n * self.n;
        let c = disk(&self.polygon.basepoint);
        let eps = 1e-9;
        for s in 0..m {
            let sb = crate::grid::barycentric(c, self.polygon.vertices[s], self.polygon.vertices[(s + 1) % m], y);
            if sb.iter().any(|&l| l < -eps) {
                continue;
            }
            let mut best: Option<(usize, [f64; 3])> = None;
            for t in s * per..(s + 1) * per {
                let [i, j, k] = self.triangles[t];
                let l = crate::grid::barycentric(self.nodes[i], self.nodes[j], self.nodes[k], y);
                let worst = l.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                if worst >= -eps {
                    return Some((t, l));
                }
                if best.map_or(true, |(_, bl)| worst > bl.iter().fold(f64::INFINITY, |a, &b| a.min(b))) {
                    best = Some((t, l));
                }
            }
            if let Some((t, l)) = best {
                if l.iter().all(|&v| v >= -1e-6) {
                    return Some((t, l));
                }
            }
        }
        None
    }

    /// Piecewise-linear interpolation (in disk coordinates) of per-node values.
    pub fn interpolate(&self, values: &[f64], y: [f64; 2]) -> Option<f64> {
        let (t, b) = self.locate(y)?;
        let [i, j, k] = self.triangles[t];
        Some(b[0] * values[i] + b[1] * values[j] + b[2] * values[k])
    }

    /// Whether node `i` lies on the polygon boundary.
    pub fn on_boundary(&self, i: usize) -> bool {
        i > self.polygon.len() * self.n * (self.n - 1) / 2
    }
}

/// Hyperbolic area of the Voronoi cell of `v` among `others`.
pub fn voronoi_area(v: &MinkVector, others: impl Iterator<Item = MinkVector>) -> Result<f64> {
    let psi = boost_to_origin(v);
    let mut cell = Cell::square(2.0);
    let mut scratch = Cell::default();
    for p in others {
        let q = mat_vec(&psi, &p.0);
        // closer to e₃ than to q: z·q₁₂ ≤ q₃ − 1
        let n = [q[0], q[1]];
        if cell.cut_by(n, q[2] - 1.0) {
            cell.clip(n, q[2] - 1.0, 0, &mut scratch);
        }
    }
    if cell.labels.contains(&BOX_LABEL) || cell.verts.iter().any(|&z| math::norm2(z) >= 1.0) {
        return Err(Error::validation("stencil does not enclose the Voronoi cell"));
    }
    let m = cell.verts.len();
    Ok((0..m)
        .map(|i| triangle_hyperbolic_volume([0.0, 0.0], cell.verts[i], cell.verts[(i + 1) % m]))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus2_polygon_is_the_regular_octagon() {
        let lat = Lattice::genus2();
        let p = DirichletPolygon::new(&lat, &BallPoint::new(0.0, 0.0), 2).unwrap();
        assert_eq!(p.len(), 8);
        assert!((p.area - 4.0 * PI).abs() < 1e-9);
        assert!(p.pairing_error() < 1e-10);
        // circumradius of the regular octagon with angles π/4: cosh R = cot²(π/8)
        let c = math::cos(PI / 8.0) / math::sin(PI / 8.0);
        let r = math::tanh(math::acosh(c * c));
        for v in &p.vertices {
            assert!((math::norm2(*v) - r).abs() < 1e-10);
        }
    }

    #[test]
    fn depth_zero_does_not_close() {
        let lat = Lattice::genus2();
        assert!(matches!(
            DirichletPolygon::new(&lat, &BallPoint::new(0.0, 0.0), 0),
            Err(Error::IncreaseDepth(0))
        ));
    }

    #[test]
    fn node_count_and_representatives() {
        let lat = Lattice::genus2();
        let g = DomainGrid::new(&lat, &BallPoint::new(0.0, 0.0), 2, 4).unwrap();
        assert_eq!(g.len(), 1 + 4 * 4 * 5);
        // 8 sides of n+1 nodes pair off; the 8 vertices form one class
        let boundary = 8 * 4;
        let expected = g.len() - boundary + (boundary - 8) / 2 + 1;
        assert_eq!(g.num_vars(), expected);
        for (i, p) in g.points.iter().enumerate() {
            let rep = g.points[g.reps[g.var_of[i]]];
            let e = element(&lat, None, &g.from_rep[i]);
            let img = MinkVector(mat_vec(&e.linear, &rep.0));
            assert!((img - *p).max_abs() < 1e-8 * p.max_abs());
        }
    }

    #[test]
    fn voronoi_weights_tile_the_polygon() {
        let lat = Lattice::genus2();
        let g = DomainGrid::new(&lat, &BallPoint::new(0.0, 0.0), 2, 6).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-3 * 4.0 * PI, "{total}");
    }

    #[test]
    fn reduction_lands_in_the_polygon() {
        let lat = Lattice::genus2();
        let p = DirichletPolygon::new(&lat, &BallPoint::new(0.0, 0.0), 2).unwrap();
        for x in [[0.99, 0.0], [-0.3, 0.95], [0.5, 0.5], [0.1, -0.2]] {
            let (y, w) = p.reduce(&lat, x).unwrap();
            assert!(p.contains(y, 1e-9));
            let back = mink::projective_action(&element(&lat, None, &w).linear, &BallPoint(y));
            assert!(math::norm2(math::sub2(back.0, x)) < 1e-9);
        }
    }
}
