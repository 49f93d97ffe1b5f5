//! Cone caps `Theta_k`, angular partitions, decoupling and square-function norms.

pub mod caps;
pub mod norms;
pub mod wolff;

pub use caps::{circle_count, CapSystem};
pub use norms::{cap_norms, decoupling_norm, square_function_norm, CapNorms};
pub use wolff::{wolff_experiment, DecouplingReport, WolffLevel};
