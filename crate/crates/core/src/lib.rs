//! Numerics and exact certificates for the peakons of the generalized
//! modified Camassa–Holm (gmCH) equation
//!
//! ```text
//! y_t + ((u² − u_x²)ⁿ y)_x = 0,    y = u − u_xx.
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and splits into:
//!
//! * [`exact`] and [`coefficients`]: big-rational construction of the
//!   auxiliary coefficients `c_k`, `d_k` and certificates for the
//!   combinatorial identities and polynomial inequalities behind the
//!   stability argument.
//! * [`spectral`]: periodic grids, a radix-2 FFT, spectral derivatives and
//!   the Helmholtz inverse `(1 − ∂²)⁻¹`.
//! * [`profiles`]: the peakon family, its speed–amplitude law and smooth
//!   initial data with nonnegative momentum density.
//! * [`functionals`]: conserved quantities `E`, `F`, `H`, the auxiliary
//!   functions `g`, `h` and the inequalities evaluated on grid functions.
//! * [`evolution`] and [`flow`]: time stepping of the nonlocal form,
//!   characteristics and momentum transport.
//! * [`quadrature`] and [`weakform`]: line quadrature showing the peakon is
//!   a weak solution.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coefficients;
pub mod error;
pub mod evolution;
pub mod exact;
mod float;
pub mod flow;
pub mod functionals;
pub mod profiles;
pub mod quadrature;
pub mod spectral;
pub mod weakform;

pub use coefficients::{Certificate, CoefficientTable, IdentityId, Model, Status, Witness};
pub use error::{Error, Result};
pub use evolution::{Dealias, ObserverRecord, RunOutcome, Solver, SolverConfig, SolverState};
pub use exact::Rational;
pub use profiles::{MollifierShape, MollifierSpec, PeakonParams};
pub use spectral::{GridFunction, GridSpec};
