//! Dyadic-parabolic wave packets `phi_omega`, their normalizers and the
//! reproducing multiplier.

pub mod directions;
pub mod frame;
pub mod table;

pub use directions::DirectionSet;
pub use frame::{c_sigma, phi_omega, reproducing_multiplier, FrameConfig, WavePacketFrame};
