//! Weighted Poincaré, logarithmic Sobolev and Wirtinger inequalities for
//! heavy-tailed densities: closed-form constants, quadrature-based
//! verification, spectral best-constant estimates and Fokker–Planck entropy
//! decay.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod constants;
pub mod densities;
pub mod error;
pub mod evolution;
pub mod fp_models;
pub mod io;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod verifiers;

pub use densities::{DensityModel, Family, Moment};
pub use error::{Error, Result};
pub use quadrature::{expectation, integrate, Integral, Interval, QuadratureConfig, Substitution};

/// Shared real-valued callable.
pub type RealFn = std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>;
