//! Flat tori: chart atlases, FIO norms through charts, half-density
//! pullbacks, the cubic wave equation and local smoothing probes.

pub mod atlas;
pub mod nlw;
pub mod norm;
pub mod pullback;
pub mod smoothing;

pub use atlas::{AtlasSpec, ChartSequence, TorusAtlas, WindowParams};
pub use norm::{chart_directions, hfio_norm_torus};
pub use pullback::{half_density_pullback, Diffeomorphism, Identity, LinearMap, Translation};
pub use nlw::{nlw_picard, random_data, Nonlinearity, NlwConfig, NlwReport, NlwSolution, StrichartzProfile};
pub use smoothing::{local_smoothing_probe, SmoothingConfig, SmoothingData, SmoothingLevel, SmoothingReport};
