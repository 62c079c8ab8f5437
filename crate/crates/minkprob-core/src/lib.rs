//! Numerical core for Minkowski problems in the Minkowski space ℝ^{2,1}.
//!
//! Convex sets whose Gauss map covers the hyperboloid are described by their
//! support functions restricted to the open unit disk `B` (the projective
//! model). This crate discretizes those functions on polar grids and provides
//! the Monge–Ampère and area measures, a monotone solver for prescribed
//! measures with Dirichlet data, the equivariant (surface group) version of
//! the problem with covolume and cosmological time diagnostics, the
//! hyperbolic averaging operator and the Pogorelov-type flat examples.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

pub mod convex;
pub mod dirichlet;
pub mod domain;
pub mod equivariant;
pub mod grid;
pub mod hull;
pub mod lattice;
pub mod math;
pub mod measure;
pub mod mink;
pub mod monotone;
pub mod pogorelov;
pub mod smoothing;

mod error;

pub use error::{Error, Result};

/// Default tolerance for matrix identities (relators, Lorentz conditions).
pub const MATRIX_TOL: f64 = 1e-8;
