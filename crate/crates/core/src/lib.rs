//! Exact-arithmetic engine for automorphisms of affine toric varieties and
//! affine suspensions.
//!
//! The engine works over the rationals by default: lattice and cone data are
//! arbitrary-precision integers, character values and automorphism parameters
//! are arbitrary-precision rationals, and every certificate it emits is
//! bit-reproducible. The suspension solver additionally supports a complex
//! floating-point mode with a configurable tolerance.
//!
//! Main entry points:
//! - [`lattice`]: integer lattices, rational polyhedral cones, duality, face
//!   lattices, Hilbert bases.
//! - [`toric`]: the affine toric variety of a pointed full-dimensional cone,
//!   its points and torus orbits, flexibility and Makar-Limanov certificates.
//! - [`demazure`]: Demazure roots, the associated locally nilpotent
//!   derivations, their exponentials and the one-parameter torus actions.
//! - [`transitivity`]: the constructive solver that moves any tuple of
//!   distinct smooth points to any other by an explicit automorphism word.
//! - [`suspension`]: hypersurfaces `uv = f` over a base, their automorphism
//!   subgroups, derivation lifting, and the surface solver.

pub mod catalog;
pub mod demazure;
pub mod json;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod suspension;
pub mod toric;
pub mod transitivity;

use thiserror::Error;

/// Engine-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("vectors live in different lattices")]
    SpaceMismatch,
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("field extension required: {0}")]
    FieldExtension(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Version string embedded in certificates.
pub const ENGINE_VERSION: &str = concat!("torflex ", env!("CARGO_PKG_VERSION"));
