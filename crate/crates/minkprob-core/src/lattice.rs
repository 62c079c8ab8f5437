//! Cocompact surface groups in SO⁺(2,1), cocycles and orbit enumeration.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{self, mat_max_abs, mat_max_diff, mat_mul, mat_vec, Mat3, IDENTITY3, PI};
use crate::mink::{self, check_lorentz, lorentz_inverse, reflection, Isometry, MinkVector};
use crate::{Error, Result, MATRIX_TOL};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Generators are named `a, b, c, …`; capitals denote inverses.
    pub fn symbol(self) -> char {
        let c = (b'a' + self.generator as u8) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn parse(symbol: &str, generators: usize) -> Result<Letter> {
        let mut chars = symbol.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(Error::validation(format!("unknown generator symbol {symbol:?}")));
        };
        if !c.is_ascii_alphabetic() {
            return Err(Error::validation(format!("unknown generator symbol {symbol:?}")));
        }
        let generator = (c.to_ascii_lowercase() as u8 - b'a') as usize;
        if generator >= generators {
            return Err(Error::validation(format!(
                "unknown generator symbol {symbol:?} ({generators} generators)"
            )));
        }
        Ok(Letter {
            generator,
            inverse: c.is_ascii_uppercase(),
        })
    }
}

pub type Word = Vec<Letter>;

pub fn parse_word<S: AsRef<str>>(symbols: &[S], generators: usize) -> Result<Word> {
    symbols.iter().map(|s| Letter::parse(s.as_ref(), generators)).collect()
}

pub fn word_string(w: &[Letter]) -> String {
    w.iter().map(|l| l.symbol()).collect()
}

/// A uniform lattice Γ ⊂ SO⁺(2,1) given by generators and relators.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub generators: Vec<Mat3>,
    pub relators: Vec<Word>,
    pub preset_name: Option<String>,
}

impl Lattice {
    /// Validates the generators and evaluates every relator to the identity.
    pub fn new(generators: Vec<Mat3>, relators: Vec<Word>, preset_name: Option<String>, tol: f64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::validation("lattice needs at least one generator"));
        }
        for g in &generators {
            check_lorentz(g, tol)?;
        }
        let lat = Lattice {
            generators,
            relators,
            preset_name,
        };
        for r in &lat.relators {
            if r.iter().any(|l| l.generator >= lat.generators.len()) {
                return Err(Error::validation("relator refers to a missing generator"));
            }
            let m = lat.linear_word(r);
            let dev = mat_max_diff(&m, &IDENTITY3);
            if dev > tol * (1.0 + mat_max_abs(&m)) {
                return Err(Error::validation(format!(
                    "relator {} evaluates {dev:.3e} away from the identity",
                    word_string(r)
                )));
            }
        }
        Ok(lat)
    }

    /// The genus-2 surface group of the regular hyperbolic octagon with
    /// interior angles π/4, with relator `[a₁,b₁][a₂,b₂]`.
    ///
    /// Side `k` of the octagon has outward direction `kπ/4` and hyperbolic
    /// distance `arccosh(1+√2)` from the origin. The side pairing taking side
    /// `i` to side `j` is the reflection in side `j` composed with the
    /// Euclidean reflection in the bisector of the two side directions; the
    /// four generators pair sides (2,0), (1,3), (6,4), (5,7).
    pub fn genus2() -> Lattice {
        let d0 = math::acosh(1.0 + math::sqrt(2.0));
        let theta = |k: usize| k as f64 * PI / 4.0;
        let side = |k: usize| {
            reflection(&MinkVector::new(
                math::cosh(d0) * math::cos(theta(k)),
                math::cosh(d0) * math::sin(theta(k)),
                math::sinh(d0),
            ))
        };
        let pair = |i: usize, j: usize| {
            let psi = 0.5 * (theta(i) + theta(j));
            let bisector = reflection(&MinkVector::new(-math::sin(psi), math::cos(psi), 0.0));
            mat_mul(&side(j), &bisector)
        };
        let generators = alloc::vec![pair(2, 0), pair(1, 3), pair(6, 4), pair(5, 7)];
        let relator = parse_word(&["a", "b", "A", "B", "c", "d", "C", "D"], 4).expect("static word");
        Lattice::new(generators, alloc::vec![relator], Some("genus2".into()), MATRIX_TOL)
            .expect("genus-2 preset satisfies its relator")
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn letter_matrix(&self, l: Letter) -> Mat3 {
        let g = &self.generators[l.generator];
        if l.inverse {
            lorentz_inverse(g)
        } else {
            *g
        }
    }

    /// Product of the linear parts along a word, left to right.
    pub fn linear_word(&self, w: &[Letter]) -> Mat3 {
        w.iter().fold(IDENTITY3, |acc, &l| mat_mul(&acc, &self.letter_matrix(l)))
    }
}

/// Translation parts `τ_γ` attached to the generators of a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    pub translations: Vec<MinkVector>,
}

impl Cocycle {
    pub fn zero(lattice: &Lattice) -> Cocycle {
        Cocycle {
            translations: alloc::vec![MinkVector::ZERO; lattice.rank()],
        }
    }

    /// The coboundary `τ_γ = γt₀ − t₀`.
    pub fn coboundary(lattice: &Lattice, t0: MinkVector) -> Cocycle {
        Cocycle {
            translations: lattice
                .generators
                .iter()
                .map(|g| MinkVector(mat_vec(g, &t0.0)) - t0)
                .collect(),
        }
    }

    /// Validates the cocycle condition: each relator accumulates zero translation.
    pub fn new(lattice: &Lattice, translations: Vec<MinkVector>, tol: f64) -> Result<Cocycle> {
        if translations.len() != lattice.rank() {
            return Err(Error::validation(format!(
                "cocycle has {} vectors for {} generators",
                translations.len(),
                lattice.rank()
            )));
        }
        let c = Cocycle { translations };
        for r in &lattice.relators {
            let e = element(lattice, Some(&c), r);
            let scale = 1.0 + mat_max_abs(&e.linear) * c.max_abs();
            if e.translation.max_abs() > tol * scale {
                return Err(Error::validation(format!(
                    "cocycle violates relator {}: accumulated translation {:?}",
                    word_string(r),
                    e.translation.0
                )));
            }
        }
        Ok(c)
    }

    pub fn is_zero(&self) -> bool {
        self.translations.iter().all(|t| t.max_abs() == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.translations.iter().fold(0.0, |m, t| m.max(t.max_abs()))
    }
}

fn letter_isometry(lattice: &Lattice, cocycle: Option<&Cocycle>, l: Letter) -> Isometry {
    let g = lattice.generators[l.generator];
    let t = cocycle.map_or(MinkVector::ZERO, |c| c.translations[l.generator]);
    let s = Isometry {
        linear: g,
        translation: t,
    };
    if l.inverse {
        s.inverse()
    } else {
        s
    }
}

/// The affine isometry of a word in Γ_τ.
pub fn element(lattice: &Lattice, cocycle: Option<&Cocycle>, w: &[Letter]) -> Isometry {
    w.iter().fold(Isometry::IDENTITY, |acc, &l| {
        acc.compose(&letter_isometry(lattice, cocycle, l))
    })
}

/// `τ_w` from `τ_{αβ} = τ_α + ατ_β` and `τ_{γ⁻¹} = −γ⁻¹τ_γ`.
pub fn cocycle_extend(lattice: &Lattice, cocycle: &Cocycle, w: &[Letter]) -> Result<MinkVector> {
    if let Some(l) = w.iter().find(|l| l.generator >= lattice.rank()) {
        return Err(Error::validation(format!("unknown generator index {}", l.generator)));
    }
    Ok(element(lattice, Some(cocycle), w).translation)
}

/// A group element reached by a reduced word.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub word: Word,
    pub isometry: Isometry,
}

/// Bucketed lookup of hyperboloid points by (distance from origin, angle).
struct PointIndex {
    buckets: BTreeMap<(i64, i64), Vec<usize>>,
}

impl PointIndex {
    const RADIAL: f64 = 1e6;
    const ANGULAR: f64 = 1e9;

    fn new() -> Self {
        PointIndex {
            buckets: BTreeMap::new(),
        }
    }

    fn key(p: &MinkVector) -> (i64, i64) {
        let r = math::acosh(p.0[2].max(1.0));
        let phi = math::atan2(p.0[1], p.0[0]);
        (
            math::round(r * Self::RADIAL) as i64,
            math::round(phi * Self::ANGULAR) as i64,
        )
    }

    /// Looks up `p` among `pts`, bucketed by the hyperboloid point `at`.
    fn find(&self, at: &MinkVector, p: &MinkVector, pts: &[MinkVector], tol: f64) -> Option<usize> {
        let (kr, ka) = Self::key(at);
        for dr in -1..=1 {
            for da in -1..=1 {
                if let Some(ids) = self.buckets.get(&(kr + dr, ka + da)) {
                    for &i in ids {
                        let q = &pts[i];
                        if (*q - *p).max_abs() <= tol * (1.0 + p.max_abs()) {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: &MinkVector, id: usize) {
        self.buckets.entry(Self::key(p)).or_default().push(id);
    }
}

/// Breadth-first enumeration of the group elements of word length ≤ `depth`,
/// deduplicated by the image of the origin of ℍ² (the action is free).
pub fn enumerate_elements(lattice: &Lattice, cocycle: Option<&Cocycle>, depth: usize) -> Vec<GroupElement> {
    let x0 = MinkVector::TIME;
    let mut out = alloc::vec![GroupElement {
        word: Word::new(),
        isometry: Isometry::IDENTITY,
    }];
    let mut images = alloc::vec![x0];
    let mut index = PointIndex::new();
    index.insert(&x0, 0);
    let mut frontier = alloc::vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &e in &frontier {
            let last = out[e].word.last().copied();
            for g in 0..lattice.rank() {
                for inverse in [false, true] {
                    let l = Letter { generator: g, inverse };
                    if last == Some(l.inv()) {
                        continue;
                    }
                    let iso = out[e].isometry.compose(&letter_isometry(lattice, cocycle, l));
                    let img = iso.apply_linear(&x0);
                    if index.find(&img, &img, &images, 1e-9).is_some() {
                        continue;
                    }
                    let mut word = out[e].word.clone();
                    word.push(l);
                    let id = out.len();
                    out.push(GroupElement { word, isometry: iso });
                    images.push(img);
                    index.insert(&img, id);
                    next.push(id);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Distinct images `γ_τ(p)` over reduced words of length ≤ `depth`,
/// deduplicated within `1e-9` (relative to the coordinates).
pub fn orbit(lattice: &Lattice, cocycle: Option<&Cocycle>, p: &MinkVector, depth: usize) -> Vec<MinkVector> {
    let elems = enumerate_elements(lattice, cocycle, depth);
    let mut pts: Vec<MinkVector> = Vec::with_capacity(elems.len());
    let mut index = PointIndex::new();
    for e in &elems {
        let q = e.isometry.apply(p);
        // index on the direction of q, which is timelike for seeds in the future
        let at = if q.is_future_timelike() {
            (1.0 / math::sqrt(-q.inner(&q))) * q
        } else {
            MinkVector::TIME
        };
        if index.find(&at, &q, &pts, 1e-9).is_some() {
            continue;
        }
        index.insert(&at, pts.len());
        pts.push(q);
    }
    pts
}

/// Elements moving the origin of ℍ² by at most `radius`.
pub fn elements_within(lattice: &Lattice, cocycle: Option<&Cocycle>, radius: f64, max_depth: usize) -> Vec<GroupElement> {
    let x0 = MinkVector::TIME;
    enumerate_elements(lattice, cocycle, max_depth)
        .into_iter()
        .filter(|e| mink::hyperbolic_distance(&e.isometry.apply_linear(&x0), &x0) <= radius)
        .collect()
}
