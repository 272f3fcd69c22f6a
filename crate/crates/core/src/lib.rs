//! Quantum tunneling of a wave packet in a biquadratic double well whose minima move
//! periodically in time while the barrier height stays fixed.
//!
//! Everything is dimensionless: lengths in units of the oscillator length `xi`, time
//! `tau = omega0 t / 2`, energies in units of the zero-point energy. The evolution law is
//!
//! ```text
//! i dpsi/dtau = -d^2 psi/dx^2 + u(x, tau) psi
//! ```
//!
//! See [`potential::DrivePotential`] for `u`, [`propagator`] for the two integrators and
//! [`experiment::run_simulation`] for the full pipeline.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod observables;
pub mod potential;
pub mod propagator;

pub use error::{Error, Result};
pub use experiment::{run_simulation, scan_epsilon, RunConfig, RunRecord, ScanRecord};
pub use grid::{gaussian_packet, norm, normalize, PhysicalScales, SpatialGrid, WaveField};
pub use observables::{ObservableSample, TunnelingMetrics};
pub use potential::DrivePotential;
pub use propagator::{propagate, PotentialProvider, Propagator, StepScheme};
