//! Simulation toolkit for post-quench revivals in the transverse-field XY
//! spin chain.
//!
//! Three engines cooperate:
//!
//! * [`model`] — momentum grid, quasiparticle dispersion, Bogoliubov angles,
//!   group velocities, and the revival-time estimate `T_rev = N / (2 v_max)`.
//! * [`freefermion`] — exact time series (Loschmidt echo, magnetization,
//!   single-spin entropy, local-disturbance wavefront) for quenched chains of
//!   up to ~10^6 sites, built from the analytic mode data.
//! * [`ed`] — exact diagonalization for small and truncated chains, including
//!   the non-integrable XZ chain and random-field disorder, with a dense
//!   spectral path and a Chebyshev propagator for large sectors.
//!
//! [`revival`] implements the statistical revival detector (3-sigma
//! excursions from the long-time mean) and the scaling/visibility analyses.

pub mod ed;
pub mod error;
pub mod freefermion;
pub mod model;
pub mod revival;

pub use error::QuenchError;
pub use freefermion::{ModeTable, QuenchSpec, TimeSeries, WavefrontField};
pub use model::{ModelParams, MomentumMode, VelocityProfile};
pub use revival::{RevivalEvent, RevivalReport, SeriesStats};
