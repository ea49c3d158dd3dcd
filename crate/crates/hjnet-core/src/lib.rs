//! Finite-difference solvers and property-verification tools for time-dependent
//! Hamilton-Jacobi equations on star-shaped junction networks.
//!
//! A network is `K` half-open segments (branches) glued at a single junction.
//! On each branch the solution obeys `u_t + H_i(u_x, x, t) = 0`; at the junction
//! the branches are coupled either by a generalized Kirchhoff condition
//! (the sum of inward slopes equals a prescribed constant `B`) or by a
//! flux-limiter condition with limiter level `A`. The crate provides
//!
//! * monotone explicit solvers for both junction conditions ([`evolve`]),
//! * an IMEX solver for the viscous regularization `u_t - eps u_xx + H = 0`
//!   with an exact discrete Kirchhoff balance ([`viscous`]),
//! * a randomized laboratory for the junction comparison lemma ([`lemma`]),
//! * experiment drivers producing deterministic CSV tables ([`experiments`]).
//!
//! All numerics are generic over the scalar type through the [`scalar::Real`]
//! trait (`f64` and `f32` both satisfy it); the aliases at the crate root pin
//! the common double-precision instantiations.

pub mod error;
pub mod evolve;
pub mod experiments;
pub mod fluxes;
pub mod hamiltonians;
pub mod initial;
pub mod lemma;
pub mod network;
pub mod scalar;
pub mod viscous;

pub use error::{HjError, Result};
pub use scalar::Real;

/// Double-precision grid over a star network.
pub type Grid64 = network::Grid<f64>;
/// Double-precision nodal function (junction value plus per-branch arrays).
pub type GridFunction64 = network::GridFunction<f64>;
/// Double-precision Hamiltonian catalog entry.
pub type Hamiltonian64 = hamiltonians::HamiltonianSpec<f64>;
/// Double-precision solver trajectory.
pub type Trajectory64 = evolve::Trajectory<f64>;
/// Single-precision variants, mostly useful for smoke-testing genericity.
pub type Grid32 = network::Grid<f32>;
pub type GridFunction32 = network::GridFunction<f32>;
pub type Hamiltonian32 = hamiltonians::HamiltonianSpec<f32>;
