//! Periodic orbits bifurcating from minimal SO(2)-orbits of planar N-body potentials.

pub mod conley;
pub mod config;
pub mod critical;
pub mod degree;
pub mod error;
pub mod euler;
pub mod expr;
pub mod periodic;
pub mod pipeline;
pub mod potential;
pub mod presets;
pub mod report;
pub mod resonance;
pub mod spectral;
pub mod symmetry;
pub mod validate;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    pub mod configuration {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    pub mod spectra {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    pub mod certificates {}
    #[doc = include_str!("../../../book/src/orbits.md")]
    pub mod orbits {}
    #[doc = include_str!("../../../book/src/validation.md")]
    pub mod validation {}
}
