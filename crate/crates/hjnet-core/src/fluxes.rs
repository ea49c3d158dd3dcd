//! Monotone numerical Hamiltonians for the explicit interior scheme.
//!
//! A numerical Hamiltonian `F(p-, p+, x, t)` consumes the backward and
//! forward difference quotients of the solution and must be nondecreasing in
//! `p-` and nonincreasing in `p+` (on the visited slope range) for the
//! forward-Euler scheme to be monotone under the CFL restriction.
//!
//! * Lax-Friedrichs: `H((p- + p+)/2, x, t) - alpha (p+ - p-)/2`; monotone when
//!   `alpha >= |H_p|` over the visited slopes, and the CFL coefficient equals
//!   `alpha` exactly.
//! * Godunov (convex `H` only): `max(H^+(p-), H^-(p+))`, built from the
//!   flux-limiter split; for `p- <= p+` this is `min_[p-,p+] H`, otherwise
//!   `max_[p+,p-] H`. Both one-sided derivatives can be active at a straddle,
//!   so its CFL coefficient is `2 * Lip_p(H)`.

use crate::error::{HjError, Result};
use crate::hamiltonians::{split_flux_limiter, FluxSplit, HamiltonianSpec};
use crate::scalar::Real;

/// Flux family selector used by solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    LaxFriedrichs,
    Godunov,
}

/// A branch's numerical Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericalFlux<T> {
    LaxFriedrichs { h: HamiltonianSpec<T>, alpha: T },
    Godunov { split: FluxSplit<T>, speed: T },
}

/// Lax-Friedrichs flux value.
pub fn lf_flux<T: Real>(h: &HamiltonianSpec<T>, alpha: T, p_minus: T, p_plus: T, x: T, t: T) -> T {
    let half = T::of(0.5);
    h.eval(half * (p_minus + p_plus), x, t) - alpha * half * (p_plus - p_minus)
}

/// Godunov flux value from the monotone/antitone split.
pub fn godunov_flux<T: Real>(split: &FluxSplit<T>, p_minus: T, p_plus: T) -> T {
    split.plus(p_minus).max(split.minus(p_plus))
}

/// Monotone time step: `cfl * dx / alpha` with `cfl in (0, 1]`. `alpha` is the
/// flux's CFL coefficient ([`NumericalFlux::cfl_speed`]), not the raw
/// Lipschitz bound.
pub fn cfl_dt<T: Real>(alpha: T, dx: T, cfl: T) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(HjError::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(dx > T::zero()) {
        return Err(HjError::InvalidInput(format!("dx must be positive, got {dx}")));
    }
    if !(cfl > T::zero() && cfl <= T::one()) {
        return Err(HjError::InvalidInput(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    Ok(cfl * dx / alpha)
}

impl<T: Real> NumericalFlux<T> {
    /// Lax-Friedrichs with `alpha` covering `|H_p|` over `[slope_lo, slope_hi]`.
    pub fn lax_friedrichs(h: &HamiltonianSpec<T>, slope_lo: T, slope_hi: T) -> Self {
        NumericalFlux::LaxFriedrichs { h: *h, alpha: h.lipschitz_p(slope_lo, slope_hi) }
    }

    /// Lax-Friedrichs with an explicit (possibly non-monotone) `alpha`.
    pub fn lax_friedrichs_with_alpha(h: &HamiltonianSpec<T>, alpha: T) -> Self {
        NumericalFlux::LaxFriedrichs { h: *h, alpha }
    }

    /// Godunov flux; requires a convex, time-independent entry. The slope
    /// range fixes the CFL coefficient, exactly as for Lax-Friedrichs.
    pub fn godunov(h: &HamiltonianSpec<T>, slope_lo: T, slope_hi: T) -> Result<Self> {
        let speed = T::of(2.0) * h.lipschitz_p(slope_lo, slope_hi);
        Ok(NumericalFlux::Godunov { split: split_flux_limiter(h)?, speed })
    }

    pub fn eval(&self, p_minus: T, p_plus: T, x: T, t: T) -> T {
        match self {
            NumericalFlux::LaxFriedrichs { h, alpha } => lf_flux(h, *alpha, p_minus, p_plus, x, t),
            NumericalFlux::Godunov { split, .. } => godunov_flux(split, p_minus, p_plus),
        }
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec<T> {
        match self {
            NumericalFlux::LaxFriedrichs { h, .. } => h,
            NumericalFlux::Godunov { split, .. } => split.hamiltonian(),
        }
    }

    /// CFL coefficient fixed at construction: alpha for LF, twice the
    /// Lipschitz bound over the working slope range for Godunov. The monotone
    /// step requires `dt * cfl_speed <= dx`; slopes outside the working range
    /// (frozen far-boundary layers) are the caller's concern.
    pub fn cfl_speed(&self) -> T {
        match self {
            NumericalFlux::LaxFriedrichs { alpha, .. } => *alpha,
            NumericalFlux::Godunov { speed, .. } => *speed,
        }
    }
}
