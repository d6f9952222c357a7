//! Electromagnetic mode spectra of planar three-layer media and the Casimir
//! force via the Lifshitz formula.
//!
//! The library covers:
//! - permittivity models evaluated on the real and imaginary frequency axes
//!   ([`dielectric`]);
//! - Fresnel amplitudes, the dispersion function `D`, and the unitary 1-D
//!   scattering matrix for a symmetric three-layer stack ([`scattering`]);
//! - discrete mode finding (surface, waveguide, hybrid) and dispersion-curve
//!   continuation ([`spectrum`]);
//! - Casimir energy and force by adaptive double quadrature over imaginary
//!   frequency and transverse wavenumber ([`lifshitz`]);
//! - the spectral-summation cross-check: per-wavenumber force from discrete
//!   mode derivatives plus a continuum phase-shift integral, compared against
//!   the imaginary-axis route ([`spectral_sum`]).
//!
//! The crate is `no_std` (alloc required); all I/O lives in the companion CLI
//! crate.

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod consts;
pub mod dielectric;
pub mod quad;
pub mod scattering;
pub mod spectrum;
pub mod lifshitz;
pub mod spectral_sum;

pub use dielectric::{Medium, PermittivityModel};
pub use scattering::{FrequencyPoint, LayerConfig, Polarization, Preset};
