//! Numerical toolkit for Hardy spaces adapted to Fourier integral operators.
//!
//! Fields live on periodic grids ([`spectral`]); the wave-packet frame
//! ([`wavepacket`]) defines the directional norms ([`norms`]); [`decoupling`]
//! handles cone caps, [`fio`] standard-form operators and wave propagators,
//! [`torus`] the chart calculus on flat tori, and [`experiments`] the scaling
//! studies built on top of them.

pub mod error;
pub mod fit;
pub mod profile;
pub mod quadrature;
pub mod spectral;
pub mod wavepacket;
pub mod norms;
pub mod decoupling;
pub mod fio;
pub mod torus;
pub mod experiments;

pub use error::{Error, Result};
