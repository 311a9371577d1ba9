//! Discrete magnetic Ginzburg–Landau energies on a square grid: Coulomb-gauge
//! reconstruction of vector potentials, the energy and its gradient, a monotone
//! minimizer, spectral inequality checks and energy-growth experiments.

pub mod error;
pub mod grid;
pub mod fields;
pub mod quadrature;
pub mod gauge;
pub mod energy;
pub mod minimize;
pub mod spectral;
pub mod dichotomy;
pub mod io;

pub use error::{Error, Result};
pub use grid::{GridSpec, Norms, Region, ScalarField, VectorField, WaveField};
pub use fields::{FieldSpec, Flux, HypothesisReport};
pub use gauge::{coulomb_gauge, GaugeReport};
pub use energy::{energy, EnergyReport};
pub use minimize::{minimize, Initializer, MinimizeOptions, MinimizeReport, Termination};
pub use spectral::{CutoffSpec, SpectralReport};
pub use dichotomy::{ExperimentOptions, ExperimentTable};
