//! Dynamics, spectra and equilibrium statistics of a charged nanoparticle
//! levitated in a trap and threaded by a static magnetic field.
//!
//! Two trapped torsional modes couple to the free spin mode through the
//! magnetic field. For a large quality factor `q` the spin locks to a fixed
//! angular speed near the ground state: a classical time crystal, and with
//! a flux through the rotor, a quantum one.
//!
//! Module map:
//!
//! * [`model`]: parameter types, rigid-body tensors, dimensionless reduction.
//! * [`full`]: the three-Euler-angle rotor with magnetic coupling and damping.
//! * [`reduced`]: the two-degree-of-freedom Hamiltonian and its double well.
//! * [`quantum`]: radial eigenproblem with flux, closed forms, flux scans.
//! * [`specfun`]: Laguerre polynomials, `K0`, and `U(-1/2, 0, z)`.
//! * [`thermo`]: canonical-ensemble speed statistics and the phase diagram.
//! * [`design`]: hollow-shell experiment calculator.
//!
//! Numerical plumbing lives in [`ode`], [`quad`] and [`tridiag`].

pub mod config;
pub mod design;
pub mod error;
pub mod full;
pub mod model;
pub mod ode;
pub mod quad;
pub mod quantum;
pub mod reduced;
pub mod specfun;
pub mod thermo;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{BodySpec, DimlessParams, ModelParams, ShellSpec};
