//! Fundamental-tone bounds for the exterior parts of bounded immersed
//! submanifolds, and a discrete Laplace–Beltrami toolkit to test them.
//!
//! - [`comparison`]: closed-form comparison functions, thresholds and bounds.
//! - [`mesh`]: triangle meshes, cotangent Laplacian, mean curvature, exhaustion regions.
//! - [`spectral`]: Dirichlet eigenpairs, Rayleigh quotients, discrete Barta bounds.
//! - [`harness`]: surface generators and end-to-end experiments.
//! - [`report`]: CSV/JSON serialization of sweep reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
