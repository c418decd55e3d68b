//! Curvature invariants, Jacobi-operator spectra and Möbius balancing for
//! hypersurfaces of constant scalar curvature `n(n-1)r` in the unit sphere.
//!
//! The crate is organised in layers:
//!
//! - [`curvature`]: pointwise symmetric-function algebra of principal curvatures.
//! - [`model`], [`spectrum`], [`bounds`]: the umbilical and Clifford model
//!   families, their closed-form spectra and eigenvalue bound evaluation.
//! - [`discrete`]: finite-difference zonal Laplacians and a Sturm bisection
//!   eigensolver used to confirm the closed forms independently.
//! - [`quadrature`] and [`conformal`]: sampled hypersurfaces, the conformal
//!   maps `F_g`, centering and the integral identities behind the min-max
//!   argument.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod conformal;
pub mod curvature;
pub mod discrete;
mod error;
pub mod model;
pub mod quadrature;
pub mod spectrum;

pub use bounds::{evaluate_bounds, BoundCheck, BoundReport, BoundVerdict, Theorem};
pub use curvature::{CurvatureInvariants, PrincipalCurvatures};
pub use error::{Error, Result};
pub use model::{critical_radius, HypersurfaceModel};
pub use spectrum::{OperatorKind, Spectrum};
