//! Interface (zero-crossing) dynamics of shock and anti-shock waves in the
//! scalar viscous conservation law `u_t = u_xx + f(u)_x`.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`snapshot`], [`config`]: immutable domain types.
//! * [`flux`] and [`initial`]: the flux and initial-condition families, each
//!   selected at runtime by name through a [`registry::Registry`].
//! * [`shock`]: entropy condition, Rankine–Hugoniot speed, classification.
//! * [`solver`]: Crank–Nicolson predictor-corrector time stepping.
//! * [`interfaces`]: zero extraction, counting and branch tracking.
//! * [`special`], [`quadrature`], [`oracles`]: closed-form reference solutions.
//! * [`analysis`]: scaling-law fits, bifurcation asymptotics and extinction bounds.

pub mod analysis;
pub mod config;
pub mod error;
pub mod flux;
pub mod grid;
pub mod initial;
pub mod interfaces;
pub mod io;
pub mod oracles;
pub mod params;
pub mod quadrature;
pub mod registry;
pub mod shock;
pub mod snapshot;
pub mod solver;
pub mod special;

pub use config::{LeftBoundary, SimConfig};
pub use error::{Error, Result};
pub use flux::{Flux, FluxSpec};
pub use grid::{SpatialGrid, TimeGrid};
pub use initial::{InitialConditionSpec, InitialProfile};
pub use interfaces::{InterfaceTrack, ZeroSet};
pub use params::{ParamValue, Params};
pub use snapshot::{Snapshot, Trajectory};
