//! Cooperative spontaneous emission of a line of two-level atoms near a
//! planar dielectric surface.
//!
//! The crate builds the coupled-dipole evolution matrix from the free-space
//! and surface-reflected Green tensors, evolves the single-excitation
//! amplitudes, and extracts fluorescence decay times. See the `examples/`
//! directory for end-to-end usage.

pub mod bessel;
pub mod cli;
pub mod coupling;
pub mod dielectric;
pub mod dynamics;
pub mod error;
pub mod green_free;
pub mod green_surface;
pub mod quad;
pub mod scenario;

pub use coupling::{AtomArray, BuildOptions, CouplingMatrices, DetuningConvention};
pub use dielectric::Permittivity;
pub use dynamics::{DecayFit, DriveDirection};
pub use error::{Error, Result};
pub use green_free::CouplingScale;
pub use green_surface::{SommerfeldConfig, SurfaceGreenResult, SurfacePairInput};
pub use scenario::{RunManifest, Scenario};
