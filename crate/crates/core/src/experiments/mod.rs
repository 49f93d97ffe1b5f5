//! Packet families, slope laws and the configuration-driven runner.

pub mod families;
pub mod run;
pub mod sharpness;
pub mod wave;

pub use families::{make_family, make_family_on, FamilyKind, PacketFamily, PacketFamilySpec};
pub use run::{run_config, run_experiment, ExperimentConfig, ExperimentEntry, ExperimentOutcome, RunSummary};
pub use sharpness::{family_norms, predicted_slope, sharpness_experiment, SlopeReport};
pub use wave::{focusing_wolff, propagation_experiment, wolff_verdict, FocusTiming, PropagationReport};
