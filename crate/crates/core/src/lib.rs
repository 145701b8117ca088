//! Exact Fourier-series coefficients of spectral-element fields.
//!
//! A field is stored as nodal values on the Gauss-Lobatto-Legendre points of
//! axis-aligned boxes that tile `[-pi, pi]^d`, possibly with hanging nodes.
//! Each mapped basis function has a closed-form Fourier coefficient in terms
//! of spherical Bessel functions, so the global coefficients follow from a
//! finite sum with no error beyond round-off.

pub mod bessel;
pub mod cases;
pub mod cubature;
pub mod error;
pub mod field;
pub mod gll;
pub mod harness;
pub mod mesh;
pub mod transform;

pub use cases::{AnalyticCase, BurgersParams, RotatedSeriesParams};
pub use cubature::{aliasing_error, cubature_transform, TrigGrid};
pub use error::{Error, Result};
pub use field::NodalField;
pub use gll::{Basis, GllRule, LegendreCoeffTable};
pub use mesh::{Element, ExactBox, Mesh};
pub use transform::{rms_relative_error, transform, Spectrum, TransformPlan, WaveSet};
