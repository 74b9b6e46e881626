//! Oscillation-mitigating intrusive uncertainty quantification for the
//! uncertain compressible Euler equations.
//!
//! The random input is a scalar ξ, uniformly distributed on an interval that is
//! split into multi-elements, each carrying its own orthonormal Legendre basis.
//! Two intrusive schemes are provided:
//!
//! * [`sg`]: stochastic Galerkin with a hyperbolicity-preserving limiter and
//!   optional L2 / exponential filters,
//! * [`ipm`]: the intrusive polynomial moment method, which expands the
//!   entropic variable and solves one small convex dual problem per cell and element.
//!
//! [`reference`] holds exact and collocation references, [`stats`] the moment
//! statistics and error metrics, and [`experiment`] ties everything to the
//! configuration format used by the command-line runner.

pub mod basis;
pub mod config;
pub mod error;
pub mod euler;
pub mod experiment;
pub mod fv;
pub mod ipm;
pub mod reference;
pub mod sg;
pub mod stats;

pub use basis::{ElementPartition, GpcBasis, QuadratureKind, QuadratureRule, QuadratureSpec};
pub use error::{Error, Result};
pub use euler::{ConservedState, Direction, GasModel, State1, State2};
pub use fv::{BoundaryCondition, Discretization, MomentField, NodeField, NumericalFlux, StructuredGrid};
