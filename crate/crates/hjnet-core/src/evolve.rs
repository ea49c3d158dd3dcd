//! Explicit monotone evolution on the network with junction coupling.
//!
//! Interior nodes advance by forward Euler on a monotone numerical
//! Hamiltonian; the junction node is then overwritten by the boundary rule:
//!
//! * Kirchhoff level `B`: the unique `z` with
//!   `sum_i (z - u_{i,1}) / dx = B`, i.e. `z = (sum_i u_{i,1} + B dx) / K`,
//!   evaluated on the *updated* first-interior values so every stored
//!   snapshot satisfies the discrete balance exactly (and the inviscid solver
//!   agrees bit-for-bit with the viscous solver at `eps = 0`).
//! * Flux limiter level `A`: explicit Euler on
//!   `u0' = -max(A, max_i H_i^-((u_{i,1} - u0)/dx))`, all values taken at the
//!   old time. Limiter runs use the outgoing orientation (branch coordinate
//!   grows away from the junction); Kirchhoff runs use the incoming one.
//!
//! Both rules are nondecreasing in every input under the CFL restriction, so
//! ordered initial data stay ordered at every step to rounding accuracy.

use crate::error::{HjError, Result};
use crate::fluxes::{FluxKind, NumericalFlux};
use crate::hamiltonians::{split_flux_limiter, FluxSplit, HamiltonianSpec, P_A_VALUE_TOL};
use crate::network::{FarBoundary, Grid, GridFunction};
use crate::scalar::Real;

/// Direction of the branch coordinate relative to the junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Branch occupies `x in [-L, 0]`, junction at the right end.
    Incoming,
    /// Branch occupies `x in [0, L]`, junction at the left end.
    Outgoing,
}

/// Junction boundary rule.
#[derive(Debug, Clone, PartialEq)]
pub enum JunctionBC<T> {
    Kirchhoff { b: T },
    FluxLimiter { a: T, splits: Vec<FluxSplit<T>> },
}

impl<T: Real> JunctionBC<T> {
    pub fn kirchhoff(b: T) -> Self {
        JunctionBC::Kirchhoff { b }
    }

    /// Build the `A`-limiter rule for a branch family; requires convex,
    /// time-independent entries and `A >= A_0`.
    pub fn flux_limiter(a: T, hs: &[HamiltonianSpec<T>]) -> Result<Self> {
        let splits: Vec<FluxSplit<T>> = hs
            .iter()
            .map(split_flux_limiter)
            .collect::<Result<_>>()?;
        let a0 = splits
            .iter()
            .map(|s| s.floor())
            .fold(T::neg_infinity(), T::max);
        if a < a0 - T::of(P_A_VALUE_TOL) {
            return Err(HjError::LimiterBelowMinimum(format!("A = {a} < A_0 = {a0}")));
        }
        Ok(JunctionBC::FluxLimiter { a, splits })
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            JunctionBC::Kirchhoff { .. } => Orientation::Incoming,
            JunctionBC::FluxLimiter { .. } => Orientation::Outgoing,
        }
    }
}

/// Knobs for [`solve`]. `slope_margin` widens the initial Lipschitz estimate
/// when sizing the Lax-Friedrichs `alpha` and the CFL speed;
/// `alpha_override` replaces the policy `alpha` (useful to demonstrate what a
/// non-monotone flux does to the comparison principle).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig<T> {
    pub flux: FluxKind,
    pub cfl: T,
    pub snapshot_stride: usize,
    pub slope_margin: T,
    pub alpha_override: Option<T>,
}

impl<T: Real> Default for SolveConfig<T> {
    fn default() -> Self {
        SolveConfig {
            flux: FluxKind::LaxFriedrichs,
            cfl: T::of(0.45),
            snapshot_stride: 1,
            slope_margin: T::of(2.0),
            alpha_override: None,
        }
    }
}

/// Stored solver output: snapshot times (strictly increasing, starting at 0)
/// and the matching states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub snapshots: Vec<GridFunction<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn final_state(&self) -> &GridFunction<T> {
        self.snapshots.last().expect("nonempty trajectory")
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("nonempty trajectory")
    }
}

/// Coordinate flip `u(x) = v(-x)` between the outgoing and incoming pictures.
/// Node `j` sits at distance `j dx` from the junction in both, so the flip
/// preserves indices and values; the function exists to mark conversion
/// points in calling code and to keep the round-trip property testable.
pub fn reflect_trajectory<T: Real>(traj: &Trajectory<T>) -> Trajectory<T> {
    traj.clone()
}

/// One forward-Euler step on the interior nodes of every branch. The junction
/// value is copied unchanged (the junction rule is applied by the caller) and
/// the far node follows the grid's far-boundary rule. Rejects time steps
/// violating `dt * cfl_speed <= dx` for any branch flux. The check is against
/// each flux's working-range coefficient, not per-step slopes: a frozen far
/// boundary grows a wall layer whose steep quotients never feed back through
/// an upwind flux, and rejecting those would abort legitimate runs.
pub fn interior_step<T: Real>(
    grid: &Grid<T>,
    u: &GridFunction<T>,
    fluxes: &[NumericalFlux<T>],
    dt: T,
    t: T,
    orientation: Orientation,
) -> Result<GridFunction<T>> {
    if !u.matches(grid) {
        return Err(HjError::GridMismatch("state does not match grid".into()));
    }
    if fluxes.len() != grid.branch_count() {
        return Err(HjError::InvalidInput(format!(
            "{} fluxes for {} branches",
            fluxes.len(),
            grid.branch_count()
        )));
    }
    if !(dt > T::zero()) {
        return Err(HjError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let dx = grid.dx();
    for (i, flux) in fluxes.iter().enumerate() {
        let speed = flux.cfl_speed();
        if dt * speed > dx * (T::one() + T::of(1e-12)) {
            return Err(HjError::CflViolation(format!(
                "branch {}: dt = {dt} exceeds dx / speed = {}",
                i + 1,
                dx / speed
            )));
        }
    }
    let mut out = u.clone();
    for (i, flux) in fluxes.iter().enumerate() {
        let v = &u.branches[i];
        let n = v.len();
        let new_branch = &mut out.branches[i];
        for k in 0..n - 1 {
            let inner = if k == 0 { u.junction } else { v[k - 1] };
            let outer = v[k + 1];
            let (p_minus, p_plus, x) = match orientation {
                Orientation::Incoming => (
                    (v[k] - outer) / dx,
                    (inner - v[k]) / dx,
                    -T::of_usize(k + 1) * dx,
                ),
                Orientation::Outgoing => (
                    (v[k] - inner) / dx,
                    (outer - v[k]) / dx,
                    T::of_usize(k + 1) * dx,
                ),
            };
            new_branch[k] = v[k] - dt * flux.eval(p_minus, p_plus, x, t);
        }
        match grid.far_bc() {
            FarBoundary::FrozenDirichlet => new_branch[n - 1] = v[n - 1],
            FarBoundary::ZeroSlopeExtrapolation => new_branch[n - 1] = new_branch[n - 2],
        }
    }
    Ok(out)
}

/// The Kirchhoff junction value: the unique `z` with
/// `sum_i (z - u_{i,1}) / dx = B`.
pub fn kirchhoff_junction_value<T: Real>(first_interior: &[T], b: T, dx: T) -> T {
    let k = T::of_usize(first_interior.len());
    (first_interior.iter().cloned().sum::<T>() + b * dx) / k
}

/// One explicit junction update for the `A`-limiter (outgoing orientation,
/// slopes measured into each branch). All inputs are old-time values.
pub fn flux_limiter_junction_step<T: Real>(
    u_junction: T,
    first_interior: &[T],
    a: T,
    splits: &[FluxSplit<T>],
    dx: T,
    dt: T,
) -> Result<T> {
    if first_interior.len() != splits.len() {
        return Err(HjError::InvalidInput(format!(
            "{} first-interior values for {} splits",
            first_interior.len(),
            splits.len()
        )));
    }
    let a0 = splits
        .iter()
        .map(|s| s.floor())
        .fold(T::neg_infinity(), T::max);
    if a < a0 - T::of(P_A_VALUE_TOL) {
        return Err(HjError::LimiterBelowMinimum(format!("A = {a} < A_0 = {a0}")));
    }
    let mut worst = a;
    for (&v, split) in first_interior.iter().zip(splits.iter()) {
        worst = worst.max(split.minus((v - u_junction) / dx));
    }
    Ok(u_junction - dt * worst)
}

/// Fluxes and time step chosen by the CFL policy for one run.
#[derive(Debug, Clone)]
pub struct TimePlan<T> {
    pub fluxes: Vec<NumericalFlux<T>>,
    pub dt: T,
    pub n_steps: usize,
}

/// Size the time step and build the per-branch fluxes: `dt = cfl * dx /
/// speed` with `speed` the largest branch CFL coefficient over the slope
/// range `[-L, L], L = Lip(u0) + slope_margin`, then shrunk so `n_steps`
/// equal steps land on the horizon exactly. Shared by the explicit and the
/// viscous solver so the `eps = 0` runs of the latter step identically.
pub fn plan_time_stepping<T: Real>(
    grid: &Grid<T>,
    hs: &[HamiltonianSpec<T>],
    u0: &GridFunction<T>,
    t_final: T,
    cfg: &SolveConfig<T>,
) -> Result<TimePlan<T>> {
    if hs.len() != grid.branch_count() {
        return Err(HjError::InvalidInput(format!(
            "{} Hamiltonians for {} branches",
            hs.len(),
            grid.branch_count()
        )));
    }
    if !u0.matches(grid) {
        return Err(HjError::GridMismatch("u0 does not match grid".into()));
    }
    if !u0.all_finite() {
        return Err(HjError::NonFinite("u0".into()));
    }
    if !(t_final > T::zero()) {
        return Err(HjError::InvalidInput(format!("t_final must be positive, got {t_final}")));
    }
    if !(cfg.cfl > T::zero() && cfg.cfl <= T::one()) {
        return Err(HjError::InvalidInput(format!("cfl must lie in (0, 1], got {}", cfg.cfl)));
    }
    if cfg.snapshot_stride == 0 {
        return Err(HjError::InvalidInput("snapshot_stride must be >= 1".into()));
    }

    let dx = grid.dx();
    let lip = u0.discrete_lipschitz(dx);
    let bound = lip + cfg.slope_margin;
    let fluxes: Vec<NumericalFlux<T>> = hs
        .iter()
        .map(|h| match cfg.flux {
            FluxKind::LaxFriedrichs => match cfg.alpha_override {
                Some(alpha) => Ok(NumericalFlux::lax_friedrichs_with_alpha(h, alpha)),
                None => Ok(NumericalFlux::lax_friedrichs(h, -bound, bound)),
            },
            FluxKind::Godunov => NumericalFlux::godunov(h, -bound, bound),
        })
        .collect::<Result<_>>()?;
    // dt follows the physical Lipschitz speed over the working range even
    // when alpha is overridden: an override changes the flux, not the pace of
    // the run it is meant to mimic. The larger of the two wins so an inflated
    // alpha keeps the center coefficient of the LF step nonnegative.
    let speed = fluxes
        .iter()
        .zip(hs)
        .map(|(f, h)| f.cfl_speed().max(h.lipschitz_p(-bound, bound)))
        .fold(T::zero(), T::max);
    let dt_cap = if speed > T::zero() { cfg.cfl * dx / speed } else { t_final };
    let raw_steps = (t_final / dt_cap).ceil();
    let n_steps = raw_steps.to_usize().ok_or_else(|| {
        HjError::InvalidInput(format!("CFL requires {raw_steps} steps; refusing to run"))
    })?;
    let n_steps = n_steps.max(1);
    let dt = t_final / T::of_usize(n_steps);
    Ok(TimePlan { fluxes, dt, n_steps })
}

/// Run the explicit solver to `t_final`, storing every `snapshot_stride`-th
/// state (the initial and final states always included). Time stepping per
/// [`plan_time_stepping`].
pub fn solve<T: Real>(
    grid: &Grid<T>,
    hs: &[HamiltonianSpec<T>],
    bc: &JunctionBC<T>,
    u0: &GridFunction<T>,
    t_final: T,
    cfg: &SolveConfig<T>,
) -> Result<Trajectory<T>> {
    let plan = plan_time_stepping(grid, hs, u0, t_final, cfg)?;
    solve_with_plan(grid, bc, u0, cfg, &plan)
}

/// [`solve`] with the time stepping fixed by the caller. Comparison-principle
/// experiments run ordered pairs through one shared plan: order is only
/// preserved between runs of the *same* scheme (same fluxes, same dt), so the
/// plan must come from whichever initial state has the steeper slopes.
pub fn solve_with_plan<T: Real>(
    grid: &Grid<T>,
    bc: &JunctionBC<T>,
    u0: &GridFunction<T>,
    cfg: &SolveConfig<T>,
    plan: &TimePlan<T>,
) -> Result<Trajectory<T>> {
    if let JunctionBC::FluxLimiter { splits, .. } = bc {
        if splits.len() != plan.fluxes.len() {
            return Err(HjError::InvalidInput(format!(
                "{} limiter splits for {} branches",
                splits.len(),
                plan.fluxes.len()
            )));
        }
    }
    let dx = grid.dx();
    let orientation = bc.orientation();
    let TimePlan { fluxes, dt, n_steps } = plan;
    let (dt, n_steps) = (*dt, *n_steps);

    let mut times = Vec::with_capacity(n_steps / cfg.snapshot_stride + 2);
    let mut snapshots = Vec::with_capacity(n_steps / cfg.snapshot_stride + 2);
    times.push(T::zero());
    snapshots.push(u0.clone());

    let mut state = u0.clone();
    for step in 0..n_steps {
        let t = dt * T::of_usize(step);
        let mut next = interior_step(grid, &state, fluxes, dt, t, orientation)?;
        next.junction = match bc {
            JunctionBC::Kirchhoff { b } => {
                kirchhoff_junction_value(&next.first_interior(), *b, dx)
            }
            JunctionBC::FluxLimiter { a, splits } => flux_limiter_junction_step(
                state.junction,
                &state.first_interior(),
                *a,
                splits,
                dx,
                dt,
            )?,
        };
        if !next.all_finite() {
            return Err(HjError::NonFinite(format!(
                "solution lost finiteness at step {} (t = {t})",
                step + 1
            )));
        }
        state = next;
        let done = step + 1 == n_steps;
        if (step + 1) % cfg.snapshot_stride == 0 || done {
            times.push(dt * T::of_usize(step + 1));
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory { times, snapshots })
}

/// One-sided slope summary at the junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeInterval<T> {
    pub lo: T,
    pub hi: T,
}

/// Min/max of the difference quotients `(u(0) - u(-j dx)) / (j dx)` over
/// `j = 1..=m` on one branch (incoming convention: the discrete surrogate of
/// `u(x)/x` as `x -> 0^-`).
pub fn slope_interval<T: Real>(
    u: &GridFunction<T>,
    dx: T,
    branch: usize,
    m: usize,
) -> Result<SlopeInterval<T>> {
    let values = u
        .branches
        .get(branch)
        .ok_or_else(|| HjError::InvalidInput(format!("no branch {branch}")))?;
    if m == 0 || m > values.len() {
        return Err(HjError::InvalidInput(format!(
            "stencil m = {m} outside 1..={}",
            values.len()
        )));
    }
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for j in 1..=m {
        let q = (u.junction - values[j - 1]) / (T::of_usize(j) * dx);
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok(SlopeInterval { lo, hi })
}

/// How the generalized-condition residual samples test slopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualSampling {
    /// Nodes per branch entering the slope interval.
    pub stencil: usize,
    /// Sample count per branch axis inside the compact violation box.
    pub samples_per_axis: usize,
}

impl Default for ResidualSampling {
    fn default() -> Self {
        ResidualSampling { stencil: 3, samples_per_axis: 41 }
    }
}

/// Junction residual of the generalized (viscosity-sense) conditions at one
/// interior snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub time: T,
    /// Centered time quotient of the junction value.
    pub a_hat: T,
    /// `max` over sampled `p' <= p_lower` of
    /// `min(sum p' - B, min_i(a_hat + H_i(p'_i)))`; a generalized solution
    /// keeps this below the tolerance.
    pub sub_worst: T,
    /// `min` over sampled `q' >= q_upper` of
    /// `max(sum q' - B, max_i(a_hat + H_i(q'_i)))`; a generalized solution
    /// keeps this above minus the tolerance.
    pub super_worst: T,
    pub sub_ok: bool,
    pub super_ok: bool,
    /// Lower slope bound per branch (`lo` of the slope interval).
    pub p_lower: Vec<T>,
    /// Upper slope bound per branch (`hi` of the slope interval).
    pub q_upper: Vec<T>,
}

impl<T: Real> ResidualReport<T> {
    /// True when either generalized condition is violated beyond tolerance.
    pub fn flagged(&self) -> bool {
        !self.sub_ok || !self.super_ok
    }
}

/// Evaluate the generalized-condition residual at snapshot `n` (which must
/// have neighbours on both sides). Test slopes are sampled on the same
/// compact boxes the comparison-lemma checker derives: a sub-side violation
/// needs `sum_i p'_i > B`, so with `p'_j <= p_j` each coordinate is bounded
/// below by `B - sum_{j != i} p_j`; dually for the super side.
pub fn generalized_residual<T: Real>(
    traj: &Trajectory<T>,
    n: usize,
    hs: &[HamiltonianSpec<T>],
    b: T,
    dx: T,
    sampling: &ResidualSampling,
    tol: T,
) -> Result<ResidualReport<T>> {
    if traj.len() < 3 {
        return Err(HjError::InvalidInput("need at least 3 snapshots".into()));
    }
    if n == 0 || n + 1 >= traj.len() {
        return Err(HjError::InvalidInput(format!(
            "snapshot index {n} not interior to 1..{}",
            traj.len() - 1
        )));
    }
    let u = &traj.snapshots[n];
    if hs.len() != u.branches.len() {
        return Err(HjError::InvalidInput(format!(
            "{} Hamiltonians for {} branches",
            hs.len(),
            u.branches.len()
        )));
    }
    if sampling.samples_per_axis < 2 {
        return Err(HjError::InvalidInput("need at least 2 samples per axis".into()));
    }
    let k = hs.len();
    let total = (sampling.samples_per_axis as u128).pow(k as u32);
    if total > 20_000_000 {
        return Err(HjError::InvalidInput(format!(
            "sampling grid of {total} tuples is too large; reduce samples_per_axis"
        )));
    }

    let t_now = traj.times[n];
    let a_hat = (traj.snapshots[n + 1].junction - traj.snapshots[n - 1].junction)
        / (traj.times[n + 1] - traj.times[n - 1]);

    let mut p_lower = Vec::with_capacity(k);
    let mut q_upper = Vec::with_capacity(k);
    for i in 0..k {
        let si = slope_interval(u, dx, i, sampling.stencil.min(u.branches[i].len()))?;
        p_lower.push(si.lo);
        q_upper.push(si.hi);
    }
    let sum_p: T = p_lower.iter().cloned().sum();
    let sum_q: T = q_upper.iter().cloned().sum();

    // Per-axis sample points and Hamiltonian values at the junction.
    let axis = |from: T, to: T| -> Vec<T> {
        if (to - from).abs() <= T::epsilon() * (T::one() + from.abs()) {
            vec![from]
        } else {
            let m = sampling.samples_per_axis;
            (0..m)
                .map(|s| from + (to - from) * T::of(s as f64 / (m - 1) as f64))
                .collect()
        }
    };

    let sub_axes: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let floor = (b - (sum_p - p_lower[i])).min(p_lower[i]);
            axis(floor, p_lower[i])
        })
        .collect();
    let super_axes: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let ceil = (b - (sum_q - q_upper[i])).max(q_upper[i]);
            axis(q_upper[i], ceil)
        })
        .collect();

    let h_at = |i: usize, p: T| hs[i].eval(p, T::zero(), t_now);

    // Odometer scan of the product grid.
    let scan = |axes: &[Vec<T>], sub_side: bool| -> T {
        let h_values: Vec<Vec<T>> = axes
            .iter()
            .enumerate()
            .map(|(i, pts)| pts.iter().map(|&p| a_hat + h_at(i, p)).collect())
            .collect();
        let mut idx = vec![0usize; k];
        let mut worst = if sub_side { T::neg_infinity() } else { T::infinity() };
        loop {
            let mut sum = -b;
            let mut inner = if sub_side { T::infinity() } else { T::neg_infinity() };
            for i in 0..k {
                sum = sum + axes[i][idx[i]];
                let hv = h_values[i][idx[i]];
                inner = if sub_side { inner.min(hv) } else { inner.max(hv) };
            }
            let value = if sub_side { sum.min(inner) } else { sum.max(inner) };
            worst = if sub_side { worst.max(value) } else { worst.min(value) };
            // Advance the odometer.
            let mut carry = 0;
            while carry < k {
                idx[carry] += 1;
                if idx[carry] < axes[carry].len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
            if carry == k {
                break;
            }
        }
        worst
    };

    let sub_worst = scan(&sub_axes, true);
    let super_worst = scan(&super_axes, false);

    Ok(ResidualReport {
        time: t_now,
        a_hat,
        sub_worst,
        super_worst,
        sub_ok: sub_worst <= tol,
        super_ok: super_worst >= -tol,
        p_lower,
        q_upper,
    })
}
