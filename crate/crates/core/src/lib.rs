//! Numerical laboratory for grafted hyperbolic collars.
//!
//! The model surface is a flat cylinder of circumference `ℓ` and height `s`
//! glued to two hyperbolic Fermi strips. The crate evaluates, mode by mode,
//! the infinitesimal deformation theory of this surface: harmonic conformal
//! factors on the cylinder, the induced displacement of the seam geodesics,
//! the hyperbolic-side boundary value problems, and the boundary and area
//! identities that tie them together.
//!
//! Everything numerical is generic over [`Scalar`] (`f32`, `f64`); the
//! `f64` aliases below are what the command-line tool uses.

pub mod error;
pub mod geometry;
pub mod hypersolve;
pub mod identities;
pub mod linalg;
pub mod quad;
pub mod sample;
pub mod scalar;
pub mod spectral;
pub mod suite;
pub mod variation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use num_complex::Complex;

pub type Collar = geometry::GraftedCollar<f64>;
pub type Family = geometry::ConformalFamily<f64>;
pub type Field = geometry::GlobalField<f64>;
pub type Fourier = spectral::FourierSolution<f64>;
pub type Trace = spectral::TraceModes<f64>;
pub type Variation = variation::VariationField<f64>;
pub type QuadModes = variation::QuadDiffModes<f64>;
pub type ModeSolution = hypersolve::HyperbolicModeSolution<f64>;
pub type HyperField = hypersolve::HyperbolicField<f64>;
pub type Config = identities::Configuration<f64>;
pub use identities::IdentityReport as Report;
