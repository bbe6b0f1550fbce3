//! Pseudospectral solvers and diagnostics for the anisotropic fractional NLS
//!
//!     i u_t + u_xx - D_y^{2s} u + |u|^{p-2} u = 0
//!
//! on a periodic box, with D_y^{2s} the one-dimensional fractional Laplacian
//! acting in y. The crate provides the conserved functionals of the flow,
//! constrained variational solvers for standing and traveling waves, the
//! resolvent kernels of the stationary equation with their decay bounds, and
//! split-step time evolution with blow-up diagnostics.

pub mod config;
pub mod error;
pub mod evolution;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod ground_state;
pub mod io;
pub mod kernel;
pub mod quad;
pub mod runner;
pub mod seeding;
pub mod symbol;
pub mod traveling;

pub use error::{Error, Result};
pub use field::{dealias, from_spectrum, to_spectrum, Field, Space};
pub use grid::{build_grid, GridSpec};
pub use symbol::{apply_symbol, Symbol};
