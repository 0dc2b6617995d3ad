//! Information geometry of single-qubit state manifolds.
//!
//! The Bloch ball of qubit states carries several natural Riemannian
//! structures: the Fubini-Study metric on pure states and the Sjoqvist and
//! Bures metrics on mixed ones. This crate evaluates the metrics, their
//! curvature, closed-form and numerically integrated geodesics, and the
//! volume-based complexity measures built from them (explored volumes,
//! their temporal averages, and the entropy of the average), with every
//! analytic result backed by an independent numerical cross-check in
//! [`verify`].

// Tensor kernels index coordinate axes explicitly.
#![allow(clippy::needless_range_loop)]

pub mod complexity;
pub mod curvature;
pub mod error;
pub mod geodesics;
pub mod metrics;
pub mod numerics;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use metrics::MetricKind;
pub use states::BlochPoint;
