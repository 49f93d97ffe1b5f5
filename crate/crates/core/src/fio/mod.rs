//! Standard-form Fourier integral operators, wave propagators, the cinematic
//! curvature check and the flow-approximation diagnostic.

pub mod curvature;
pub mod flow;
pub mod operator;
pub mod phase;
pub mod propagator;
pub mod symbol;

pub use curvature::{curvature_check, CurvatureReport, DEFAULT_RANK_THRESHOLD};
pub use flow::{flow_diagnostic, FlowReport};
pub use operator::{apply_fio, SpaceTimeField, StandardFormFIO, TimeGrid};
pub use phase::{PhaseFunction, PhaseSpec};
pub use propagator::{half_wave_propagator, wave_solution, wave_velocity};
pub use symbol::{ProductSymbol, SymbolFunction};
