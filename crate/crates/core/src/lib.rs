//! WDVV associativity equations, Frobenius algebras and flat torsionless
//! submanifolds of pseudo-Euclidean space.
//!
//! In flat coordinates a flat torsionless submanifold `M^N ⊂ E^{N+L}` is
//! described by functions `ψ_α` whose Hessians are the second fundamental
//! forms, subject to the Gauss and Ricci systems. With `L = N`, `μ = c·η` and
//! `ψ_α = ∂Φ/∂u^α` both systems collapse to the WDVV equations for `Φ`, and
//! the Weingarten operators are (minus) the structure constants of a Frobenius
//! algebra on each tangent space.
//!
//! Modules:
//! - [`potential`]: exact polynomials, metrics, the problem file.
//! - [`frobenius`]: structure constants, WDVV/associativity/invariance residuals, Weingarten operators.
//! - [`submanifold`]: Gauss, Ricci and Codazzi residuals and the potential reduction identity.
//! - [`lax`]: transport along paths for the auxiliary linear problem and loop holonomy.
//! - [`bonnet`]: reconstruction of the immersion from its fundamental forms.
//! - [`hydro`]: the associated hydrodynamic-type flows and their commutator.
//! - [`cli`]: report assembly behind the `wdvv` binary.

#![allow(clippy::needless_range_loop)]

pub mod bonnet;
pub mod cli;
pub mod error;
pub mod frobenius;
pub mod hydro;
pub mod lax;
pub mod linalg;
pub mod potential;
pub mod report;
pub mod scalar;
pub mod submanifold;

pub use error::{GeomError, Result};
pub use scalar::{Mode, Rational, Scalar};
