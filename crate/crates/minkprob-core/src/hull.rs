//! Lower convex hulls of lifted planar point sets, stored as regular
//! triangulations of the projected points.
//!
//! The projected points must have a convex boundary polygon listed
//! counterclockwise; every other point is inserted Bowyer–Watson style. A
//! point lying strictly above the current lower hull is not a vertex and
//! stays that way, since insertions only lower the hull.

use alloc::vec::Vec;

use crate::math::orient2d;
use crate::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Tri {
    v: [usize; 3],
    /// `n[k]` is the neighbour across the edge opposite `v[k]`.
    n: [usize; 3],
    alive: bool,
}

#[derive(Clone, Debug)]
pub struct LowerHull {
    pts: Vec<[f64; 2]>,
    z: Vec<f64>,
    tris: Vec<Tri>,
    free: Vec<usize>,
    vertex: Vec<bool>,
    mark: Vec<u32>,
    generation: u32,
    hint: usize,
    eps: f64,
}

impl LowerHull {
    /// Builds the lower hull of `(points[i], z[i])`. `boundary` lists the
    /// indices of the convex boundary polygon counterclockwise; `order` lists
    /// the remaining indices in insertion order (spatially coherent orders
    /// keep point location cheap).
    pub fn build(points: &[[f64; 2]], z: &[f64], boundary: &[usize], order: &[usize]) -> Result<LowerHull> {
        if points.len() != z.len() {
            return Err(Error::validation("point and height arrays differ in length"));
        }
        if boundary.len() < 3 {
            return Err(Error::validation("lower hull needs at least 3 boundary points"));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("nonfinite height"));
        }
        let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut hull = LowerHull {
            pts: points.to_vec(),
            z: z.to_vec(),
            tris: Vec::new(),
            free: Vec::new(),
            vertex: alloc::vec![false; points.len()],
            mark: Vec::new(),
            generation: 0,
            hint: 0,
            eps: 1e-12 * zmax,
        };
        hull.seed(boundary)?;
        for &i in order {
            hull.insert(i)?;
        }
        Ok(hull)
    }

    fn seed(&mut self, boundary: &[usize]) -> Result<()> {
        let m = boundary.len();
        for i in 0..m {
            let o = orient2d(
                self.pts[boundary[i]],
                self.pts[boundary[(i + 1) % m]],
                self.pts[boundary[(i + 2) % m]],
            );
            if o <= 0.0 {
                return Err(Error::validation("boundary polygon is not strictly convex and counterclockwise"));
            }
        }
        for &b in boundary {
            self.vertex[b] = true;
        }
        let b0 = boundary[0];
        for i in 1..m - 1 {
            self.tris.push(Tri {
                v: [b0, boundary[i], boundary[i + 1]],
                n: [NONE; 3],
                alive: true,
            });
        }
        // fan adjacency: triangle i-1 and i share the edge (b0, boundary[i+1])
        let t = self.tris.len();
        for i in 0..t {
            if i + 1 < t {
                self.tris[i].n[1] = i + 1;
            }
            if i > 0 {
                self.tris[i].n[2] = i - 1;
            }
        }
        self.mark = alloc::vec![0; t];
        let mut stack: Vec<(usize, usize)> = (0..t).flat_map(|i| (0..3).map(move |k| (i, k))).collect();
        let mut guard = 0usize;
        while let Some((t, k)) = stack.pop() {
            guard += 1;
            if guard > 100 * (m * m + 10) {
                return Err(Error::NonConvergence {
                    what: "boundary flips".into(),
                    iterations: guard,
                    residual: 0.0,
                });
            }
            if !self.tris[t].alive || self.tris[t].n[k] == NONE {
                continue;
            }
            if let Some(touched) = self.try_flip(t, k) {
                stack.extend(touched);
            }
        }
        Ok(())
    }

    fn plane_at(&self, t: usize, p: [f64; 2]) -> f64 {
        let [a, b, c] = self.tris[t].v;
        let (pa, pb, pc) = (self.pts[a], self.pts[b], self.pts[c]);
        let d = orient2d(pa, pb, pc);
        let l0 = orient2d(p, pb, pc) / d;
        let l1 = orient2d(pa, p, pc) / d;
        let l2 = 1.0 - l0 - l1;
        l0 * self.z[a] + l1 * self.z[b] + l2 * self.z[c]
    }

    /// Flips the edge opposite `v[k]` of triangle `t` when the far vertex of
    /// the neighbour lies strictly below the plane of `t` and the quad is
    /// convex. Returns the four outer edges to recheck.
    fn try_flip(&mut self, t: usize, k: usize) -> Option<[(usize, usize); 4]> {
        let u = self.tris[t].n[k];
        let c = self.tris[t].v[k];
        let a = self.tris[t].v[(k + 1) % 3];
        let b = self.tris[t].v[(k + 2) % 3];
        let ku = (0..3).find(|&j| self.tris[u].n[j] == t)?;
        let d = self.tris[u].v[ku];
        if self.z[d] >= self.plane_at(t, self.pts[d]) - self.eps {
            return None;
        }
        let (pa, pb, pc, pd) = (self.pts[a], self.pts[b], self.pts[c], self.pts[d]);
        if !strictly_left(pc, pa, pd) || !strictly_left(pc, pd, pb) {
            return None;
        }
        // outer neighbours: t across (c,a) is opposite b, across (b,c) opposite a
        let t_ca = self.tris[t].n[(k + 2) % 3];
        let t_bc = self.tris[t].n[(k + 1) % 3];
        // u is ordered d, b, a starting at ku
        let u_bd = self.tris[u].n[(ku + 2) % 3]; // opposite a: edge (d, b)
        let u_ad = self.tris[u].n[(ku + 1) % 3]; // opposite b: edge (a, d)
        self.tris[t].v = [c, a, d];
        self.tris[t].n = [u_ad, u, t_ca];
        self.tris[u].v = [c, d, b];
        self.tris[u].n = [u_bd, t_bc, t];
        self.relink(u_ad, a, d, t);
        self.relink(t_bc, b, c, u);
        Some([(t, 0), (t, 2), (u, 0), (u, 1)])
    }

    /// Points the neighbour slot of `tri` across edge `{a, b}` at `new`.
    fn relink(&mut self, tri: usize, a: usize, b: usize, new: usize) {
        if tri == NONE {
            return;
        }
        let v = self.tris[tri].v;
        for k in 0..3 {
            let (x, y) = (v[(k + 1) % 3], v[(k + 2) % 3]);
            if (x == a && y == b) || (x == b && y == a) {
                self.tris[tri].n[k] = new;
                return;
            }
        }
    }

    fn locate(&self, p: [f64; 2], hint: usize) -> Option<usize> {
        let mut t = hint;
        if t >= self.tris.len() || !self.tris[t].alive {
            t = self.tris.iter().position(|tr| tr.alive)?;
        }
        let limit = self.tris.len() + 10;
        let mut start = 0usize;
        'walk: for _ in 0..limit {
            let tr = &self.tris[t];
            for s in 0..3 {
                let k = (s + start) % 3;
                let e1 = self.pts[tr.v[(k + 1) % 3]];
                let e2 = self.pts[tr.v[(k + 2) % 3]];
                if orient2d(e1, e2, p) < 0.0 {
                    let nb = tr.n[k];
                    if nb == NONE {
                        break 'walk;
                    }
                    t = nb;
                    start = (start + 1) % 3;
                    continue 'walk;
                }
            }
            return Some(t);
        }
        // fallback: best barycentric containment
        let mut best = None;
        let mut best_min = f64::NEG_INFINITY;
        for (i, tr) in self.tris.iter().enumerate() {
            if !tr.alive {
                continue;
            }
            let (pa, pb, pc) = (self.pts[tr.v[0]], self.pts[tr.v[1]], self.pts[tr.v[2]]);
            let d = orient2d(pa, pb, pc);
            let m = (orient2d(p, pb, pc) / d).min(orient2d(pa, p, pc) / d).min(orient2d(pa, pb, p) / d);
            if m > best_min {
                best_min = m;
                best = Some(i);
            }
        }
        best
    }

    fn next_generation(&mut self) -> u32 {
        if self.mark.len() < self.tris.len() {
            self.mark.resize(self.tris.len(), 0);
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.generation = 1;
        }
        self.generation
    }

    /// Triangles replaced by the fan around the inserted point, with the rim
    /// edges `(e1, e2, outer, inner)`. `None` when the rim is not a simple
    /// cycle.
    #[allow(clippy::type_complexity)]
    fn cavity(
        &mut self,
        t0: usize,
        p: [f64; 2],
        zq: f64,
        by_height: bool,
    ) -> Result<Option<(Vec<usize>, Vec<(usize, usize, usize, usize)>)>> {
        let gen = self.next_generation();
        let mut cavity = alloc::vec![t0];
        self.mark[t0] = gen;
        let mut i = 0;
        while by_height && i < cavity.len() {
            let t = cavity[i];
            i += 1;
            for k in 0..3 {
                let u = self.tris[t].n[k];
                if u != NONE && self.mark[u] != gen && zq < self.plane_at(u, p) - self.eps {
                    self.mark[u] = gen;
                    cavity.push(u);
                }
            }
        }
        // make the cavity star-shaped from p in the plane
        loop {
            let mut grew = false;
            let mut j = 0;
            while j < cavity.len() {
                let t = cavity[j];
                j += 1;
                for k in 0..3 {
                    let u = self.tris[t].n[k];
                    if u != NONE && self.mark[u] == gen {
                        continue;
                    }
                    let e1 = self.pts[self.tris[t].v[(k + 1) % 3]];
                    let e2 = self.pts[self.tris[t].v[(k + 2) % 3]];
                    if !strictly_left(e1, e2, p) {
                        if u == NONE {
                            return Err(Error::validation("inserted point lies on the boundary polygon"));
                        }
                        self.mark[u] = gen;
                        cavity.push(u);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();
        for &t in &cavity {
            for k in 0..3 {
                let u = self.tris[t].n[k];
                if u == NONE || self.mark[u] != gen {
                    edges.push((self.tris[t].v[(k + 1) % 3], self.tris[t].v[(k + 2) % 3], u, t));
                }
            }
        }
        // the rim must be one cycle through distinct vertices
        let mut starts: Vec<usize> = edges.iter().map(|e| e.0).collect();
        starts.sort_unstable();
        if starts.windows(2).any(|w| w[0] == w[1]) {
            return Ok(None);
        }
        let mut at = edges[0].1;
        let mut steps = 1;
        while at != edges[0].0 {
            match edges.iter().find(|e| e.0 == at) {
                Some(e) => at = e.1,
                None => return Ok(None),
            }
            steps += 1;
            if steps > edges.len() {
                return Ok(None);
            }
        }
        if steps != edges.len() {
            return Ok(None);
        }
        Ok(Some((cavity, edges)))
    }

    fn insert(&mut self, q: usize) -> Result<()> {
        let p = self.pts[q];
        let zq = self.z[q];
        let t0 = self.locate(p, self.hint).ok_or_else(|| Error::validation("point outside the boundary polygon"))?;
        if zq > self.plane_at(t0, p) + self.eps {
            self.vertex[q] = false;
            return Ok(());
        }
        // near ties the height-grown region can be pinched; splitting the
        // containing triangle and flipping is always topologically valid
        let (cavity, edges) = match self.cavity(t0, p, zq, true)? {
            Some(c) => c,
            None => self
                .cavity(t0, p, zq, false)?
                .ok_or_else(|| Error::validation("could not form an insertion cavity"))?,
        };
        let mut on_rim: Vec<usize> = edges.iter().map(|e| e.0).collect();
        on_rim.sort_unstable();
        for &t in &cavity {
            for &v in &self.tris[t].v {
                if on_rim.binary_search(&v).is_err() {
                    self.vertex[v] = false;
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
            self.free.push(t);
        }
        let mut created: Vec<(usize, usize, usize)> = Vec::with_capacity(edges.len()); // (e1, e2, tri)
        for &(e1, e2, outer, _) in &edges {
            let tri = Tri {
                v: [q, e1, e2],
                n: [outer, NONE, NONE],
                alive: true,
            };
            let id = match self.free.pop() {
                Some(id) => {
                    self.tris[id] = tri;
                    id
                }
                None => {
                    self.tris.push(tri);
                    self.tris.len() - 1
                }
            };
            self.relink(outer, e1, e2, id);
            created.push((e1, e2, id));
        }
        for i in 0..created.len() {
            let (e1, e2, id) = created[i];
            // opposite e1 is edge (e2, q): shared with the triangle starting at e2
            let after = created.iter().find(|c| c.0 == e2).map(|c| c.2).unwrap_or(NONE);
            // opposite e2 is edge (q, e1): shared with the triangle ending at e1
            let before = created.iter().find(|c| c.1 == e1).map(|c| c.2).unwrap_or(NONE);
            self.tris[id].n[1] = after;
            self.tris[id].n[2] = before;
        }
        self.vertex[q] = true;
        self.hint = created[0].2;
        if self.mark.len() < self.tris.len() {
            self.mark.resize(self.tris.len(), 0);
        }
        // repair any non-regular link edge left by the star-shape fix
        let mut stack: Vec<(usize, usize)> = created.iter().flat_map(|c| [(c.2, 0), (c.2, 1), (c.2, 2)]).collect();
        let mut guard = 0usize;
        while let Some((t, k)) = stack.pop() {
            guard += 1;
            if guard > 10_000 {
                break;
            }
            if !self.tris[t].alive || self.tris[t].n[k] == NONE {
                continue;
            }
            if let Some(touched) = self.try_flip(t, k) {
                stack.extend(touched);
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.pts
    }

    pub fn heights(&self) -> &[f64] {
        &self.z
    }

    /// Whether point `i` is a vertex of the lower hull (points on the hull
    /// but inside a flat facet count as vertices when they were inserted).
    pub fn is_vertex(&self, i: usize) -> bool {
        self.vertex[i]
    }

    /// Live triangles of the regular triangulation, counterclockwise.
    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.tris.iter().filter(|t| t.alive).map(|t| t.v)
    }

    /// Gradient of the affine function interpolating `z` on a triangle.
    pub fn gradient(&self, t: [usize; 3]) -> [f64; 2] {
        facet_gradient(
            [self.pts[t[0]], self.pts[t[1]], self.pts[t[2]]],
            [self.z[t[0]], self.z[t[1]], self.z[t[2]]],
        )
    }

    /// Per-point lists of incident live triangles.
    pub fn incidence(&self) -> Vec<Vec<[usize; 3]>> {
        let mut inc: Vec<Vec<[usize; 3]>> = alloc::vec![Vec::new(); self.pts.len()];
        for t in self.triangles() {
            for &v in &t {
                inc[v].push(t);
            }
        }
        inc
    }

    /// Value of the lower hull at an arbitrary point inside the boundary
    /// polygon (points slightly outside get the nearest facet extended).
    pub fn eval(&self, x: [f64; 2]) -> Option<f64> {
        let t = self.locate(x, self.hint)?;
        Some(self.plane_at(t, x))
    }

    /// Hull value at each input point: the height itself at vertices,
    /// the facet value otherwise.
    pub fn node_values(&self) -> Vec<f64> {
        let mut hint = self.hint;
        (0..self.pts.len())
            .map(|i| {
                if self.vertex[i] {
                    self.z[i]
                } else {
                    match self.locate(self.pts[i], hint) {
                        Some(t) => {
                            hint = t;
                            self.plane_at(t, self.pts[i])
                        }
                        None => self.z[i],
                    }
                }
            })
            .collect()
    }
}

/// `c` lies left of the line `ab` by a margin relative to the triangle
/// size, so that accepted triangles are never slivers.
fn strictly_left(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    let d2 = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]);
    let scale = d2(a, b).max(d2(a, c)).max(d2(b, c));
    orient2d(a, b, c) > 1e-10 * scale
}

pub fn facet_gradient(p: [[f64; 2]; 3], z: [f64; 3]) -> [f64; 2] {
    let [a, b, c] = p;
    let d = orient2d(a, b, c);
    let (zb, zc) = (z[1] - z[0], z[2] - z[0]);
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    [(zb * cy - zc * by) / d, (zc * bx - zb * cx) / d]
}
