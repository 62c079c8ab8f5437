//! Pogorelov-type convex functions: `f(x) = β r(x)^α (1 + β t(x)²)` with
//! `r` the norm of the last `k` coordinates, `t` the norm of the first
//! `d − k`, and `α = 2k/d`. The function vanishes on the `(d−k)`-ball
//! `{r = 0}` while its Monge–Ampère density stays positive near it.

use alloc::vec::Vec;

use crate::dirichlet::{alexandrov_heinz_probe, AlexandrovHeinzReport, DirichletOptions, ProbeBoundary};
use crate::math;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PogorelovFn {
    pub d: usize,
    pub k: usize,
    pub beta: f64,
}

impl PogorelovFn {
    /// Requires `d/2 < k < d` and `β ≥ 1`.
    pub fn new(d: usize, k: usize, beta: f64) -> Result<Self> {
        if 2 * k <= d {
            return Err(Error::validation(alloc::format!(
                "k = {k} must exceed d/2 = {} (otherwise the Alexandrov–Heinz bound forbids the flat piece)",
                d as f64 / 2.0
            )));
        }
        if k >= d {
            return Err(Error::validation("k = d leaves no flat piece of positive codimension"));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::validation("β must be ≥ 1"));
        }
        Ok(PogorelovFn { d, k, beta })
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.k as f64 / self.d as f64
    }

    /// `(t, r)`: norms of the first `d − k` and of the last `k` coordinates.
    pub fn split(&self, x: &[f64]) -> (f64, f64) {
        let m = self.d - self.k;
        let t = math::sqrt(x[..m].iter().map(|v| v * v).sum());
        let r = math::sqrt(x[m..self.d].iter().map(|v| v * v).sum());
        (t, r)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (t, r) = self.split(x);
        if r == 0.0 {
            return 0.0;
        }
        self.beta * math::pow(r, self.alpha()) * (1.0 + self.beta * t * t)
    }

    /// Central-difference Hessian with step `h`.
    pub fn hessian_fd(&self, x: &[f64], h: f64) -> Vec<Vec<f64>> {
        let d = self.d;
        let mut y = x.to_vec();
        let at = |y: &mut Vec<f64>, moves: &[(usize, f64)]| {
            for &(i, s) in moves {
                y[i] += s;
            }
            let v = self.eval(y);
            for &(i, s) in moves {
                y[i] -= s;
            }
            v
        };
        let f0 = self.eval(x);
        let mut hess = alloc::vec![alloc::vec![0.0; d]; d];
        for i in 0..d {
            hess[i][i] = (at(&mut y, &[(i, h)]) - 2.0 * f0 + at(&mut y, &[(i, -h)])) / (h * h);
            for j in 0..i {
                let v = (at(&mut y, &[(i, h), (j, h)]) - at(&mut y, &[(i, h), (j, -h)]) - at(&mut y, &[(i, -h), (j, h)])
                    + at(&mut y, &[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        hess
    }

    /// Derivative of `f` along the `r` direction at distance `r` from the
    /// flat set (first difference with step `r/100`), at `t = 0`.
    pub fn radial_slope(&self, r: f64) -> f64 {
        let mut x = alloc::vec![0.0; self.d];
        let m = self.d - self.k;
        let h = 0.01 * r;
        x[m] = r + h;
        let fp = self.eval(&x);
        x[m] = r - h;
        (fp - self.eval(&x)) / (2.0 * h)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
        }
    }
    det
}

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut v = 0.0;
    while i > 0 {
        f /= b as f64;
        v += f * (i % b) as f64;
        i /= b;
    }
    v
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Halton points in the ball of radius `radius` in ℝ^d (rejection from the
/// cube), starting at sequence index `seed + 1`.
pub fn halton_ball(d: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut i = seed + 1;
    while out.len() < count {
        let p: Vec<f64> = (0..d).map(|c| radius * (2.0 * radical_inverse(i, PRIMES[c]) - 1.0)).collect();
        i += 1;
        if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundOptions {
    pub samples: usize,
    /// Sampling ball radius (1 for the unit ball).
    pub radius: f64,
    /// Excluded tube `{r < tube}` around the flat set.
    pub tube: f64,
    /// Finite-difference step.
    pub step: f64,
    pub seed: u64,
}

impl Default for LowerBoundOptions {
    fn default() -> Self {
        LowerBoundOptions {
            samples: 100_000,
            radius: 1.0,
            tube: 1e-3,
            step: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundReport {
    pub beta: f64,
    pub samples: usize,
    pub min_det: f64,
    pub argmin: Vec<f64>,
    /// `max |f|` on sample points of the flat set.
    pub flat_max: f64,
    pub c0: f64,
    pub holds: bool,
}

/// Samples `det Hess f` off the tube around the flat set and compares the
/// minimum with `c0`.
pub fn check_lower_bound(f: &PogorelovFn, c0: f64, opts: &LowerBoundOptions) -> LowerBoundReport {
    let mut min_det = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut used = 0;
    for p in halton_ball(f.d, opts.samples, opts.radius, opts.seed) {
        if f.split(&p).1 < opts.tube {
            continue;
        }
        used += 1;
        let det = determinant(f.hessian_fd(&p, opts.step));
        if det < min_det {
            min_det = det;
            argmin = p;
        }
    }
    let m = f.d - f.k;
    let flat_max = (0..=100)
        .map(|i| {
            let mut x = alloc::vec![0.0; f.d];
            if m > 0 {
                x[0] = opts.radius * (2.0 * i as f64 / 100.0 - 1.0);
            }
            f.eval(&x).abs()
        })
        .fold(0.0, f64::max);
    LowerBoundReport {
        beta: f.beta,
        samples: used,
        min_det,
        argmin,
        flat_max,
        c0,
        holds: min_det >= c0 && min_det > 0.0,
    }
}

pub const BETA_SCAN: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

#[derive(Clone, Debug, PartialEq)]
pub struct BetaSearch {
    pub d: usize,
    pub k: usize,
    pub c0: f64,
    pub reports: Vec<LowerBoundReport>,
    /// Smallest scanned β whose sampled minimum is ≥ `c0` and positive.
    pub beta: Option<f64>,
}

pub fn search_beta(d: usize, k: usize, c0: f64, opts: &LowerBoundOptions) -> Result<BetaSearch> {
    let mut reports = Vec::with_capacity(BETA_SCAN.len());
    for &b in &BETA_SCAN {
        reports.push(check_lower_bound(&PogorelovFn::new(d, k, b)?, c0, opts));
    }
    let beta = reports.iter().find(|r| r.holds).map(|r| r.beta);
    Ok(BetaSearch { d, k, c0, reports, beta })
}

/// The two sides of the dimension threshold: forced negativity of the
/// Dirichlet solution in d = 2, and a flat convex function with positive
/// density bound in d = 3.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessReport {
    pub probe: AlexandrovHeinzReport,
    pub pogorelov: BetaSearch,
    /// Probe at `c₀ = 0`: the solution stays at the zero boundary datum.
    pub control_h0: f64,
}

pub fn sharpness_contrast(
    levels: &[(usize, usize)],
    rho_max: f64,
    dirichlet: &DirichletOptions,
    pogorelov: &LowerBoundOptions,
) -> Result<SharpnessReport> {
    let probe = alexandrov_heinz_probe(1.0, ProbeBoundary::Zero, levels, rho_max, dirichlet)?;
    let control = alexandrov_heinz_probe(0.0, ProbeBoundary::Zero, &levels[..1], rho_max, dirichlet)?;
    let pogorelov = search_beta(3, 2, 0.0, pogorelov)?;
    Ok(SharpnessReport {
        probe,
        pogorelov,
        control_h0: control.levels[0].h0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_enforces_dimension_threshold() {
        assert!(PogorelovFn::new(2, 1, 1.0).is_err());
        assert!(PogorelovFn::new(3, 3, 1.0).is_err());
        assert!(PogorelovFn::new(3, 2, 0.5).is_err());
        assert!((PogorelovFn::new(3, 2, 1.0).unwrap().alpha() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn value_off_the_segment() {
        let f = PogorelovFn::new(3, 2, 1.0).unwrap();
        assert!((f.eval(&[0.0, 0.5, 0.0]) - 0.396_850_262_992_049_9).abs() < 1e-15);
        assert_eq!(f.eval(&[0.7, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(6, 2), 0.375);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn determinant_of_permutation() {
        let a = alloc::vec![
            alloc::vec![0.0, 2.0, 0.0],
            alloc::vec![3.0, 0.0, 0.0],
            alloc::vec![0.0, 0.0, 5.0]
        ];
        assert!((determinant(a) + 30.0).abs() < 1e-12);
    }
}
