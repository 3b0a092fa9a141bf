//! Exact equatorially-trapped water waves with a constant underlying current.
//!
//! The wave is prescribed in Lagrangian form: labels `(q, r, s)` and time `t`
//! map explicitly to Eulerian positions. Everything that is implicit in the
//! Eulerian picture (the free surface, fixed-depth label curves, fixed-station
//! columns, inverse map) is recovered here with bracketed root solves, and the
//! mean flows and mass fluxes are evaluated with adaptive Gauss–Kronrod
//! quadrature.
//!
//! Module map:
//!
//! - [`model`]: constants, configuration, flow map, velocity, Jacobian.
//! - [`geometry`]: free surface, trapping region, fixed-depth labels.
//! - [`mean_flow`]: mean Lagrangian/Eulerian velocities, Stokes drift, bounds.
//! - [`mass_transport`]: fixed-station labels and vertical mass fluxes.
//! - [`field`]: inverse map, Eulerian field sampling, particle integration.
//! - [`scenario`], [`check`], [`cli`]: file formats and the command line.
//!
//! Sweeps over independent evaluation points go through [`sweep`], which uses
//! rayon when the `parallel` feature is enabled and runs sequentially
//! otherwise.

pub mod check;
pub mod cli;
pub mod error;
pub mod field;
pub mod geometry;
pub mod mass_transport;
pub mod mean_flow;
pub mod model;
pub mod quad;
pub mod roots;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{FlowSample, LagrangianLabel, PhysicalConstants, WaveConfig};
pub use quad::QuadResult;
