//! Periodic grids, FFTs, Fourier multipliers and Lebesgue/Sobolev norms.
//!
//! Convention: `f^(xi) = int f(x) e^{-i x.xi} dx`, with inversion carrying
//! `(2 pi)^{-n}`. On a grid of period `L` the stored coefficients approximate
//! this transform, so `f(x) = L^{-n} sum_m f^(xi_m) e^{i x.xi_m}`.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod littlewood_paley;
pub mod multiplier;
pub mod norms;

pub use field::{SampledField, Spectrum};
pub use grid::PeriodicGrid;
pub use littlewood_paley::{littlewood_paley, littlewood_paley_widened};
pub use multiplier::{apply_multiplier, FourierMultiplier, MultiplierMeta};
pub use norms::{lp_norm, sobolev_norm};
