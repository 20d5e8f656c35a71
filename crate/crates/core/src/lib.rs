//! Energy spectrum of a two-dimensional hydrogen atom clamped at the centre of
//! an impenetrable circular box, with a uniform in-plane electric field.
//!
//! The dimensionless Hamiltonian is
//!
//! ```text
//! H = -1/2 ∇² - 1/r - λ r cos φ,      ψ(r0, φ) = 0
//! ```
//!
//! (lengths in units of ħ²/(m_e K)), solved by the Rayleigh–Ritz method in the
//! polynomial basis `r^i (r0 - r) cos(jφ)` / `r^i (r0 - r) sin(jφ)`. The
//! zero-field problem on the unit disk, `H = -1/2 ∇² - β/r`, is solved in the
//! separable radial basis `r^(i+ν) (1 - r)`.
//!
//! Modules, bottom-up:
//!
//! * [`scaling`]: physical parameters to the dimensionless couplings λ, β, r0.
//! * [`basis`]: enumeration and evaluation of the basis functions.
//! * [`assembly`]: closed-form overlap and Hamiltonian matrix elements.
//! * [`eigensolver`]: Jacobi diagonalization and the whitened generalized solve.
//! * [`reference`]: Bessel zeros, free-atom levels, the exact β = 3/4 state.
//! * [`analysis`]: sweeps, labelling, degeneracies, crossings.

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod dd;
pub mod eigensolver;
pub mod error;
pub mod reference;
pub mod scaling;

pub use error::{Error, Result};
