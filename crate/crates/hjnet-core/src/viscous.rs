//! The `eps`-regularized parabolic solver: implicit diffusion, explicit
//! Hamiltonian (IMEX), with the Kirchhoff flux constraint solved exactly at
//! the new time level.
//!
//! Each step solves the arrowhead-shaped linear system
//!
//! ```text
//!   (I - dt eps D2) u_i^{n+1}           = u_i^n - dt F_i(D+- u^n)   (interior)
//!   far row per the grid's far boundary
//!   K z - sum_i u_{i,1}                 = B dx                      (junction)
//! ```
//!
//! where `D2` is the 1-D three-point Laplacian whose leftmost stencil reaches
//! the junction unknown `z`. Branch blocks are tridiagonal M-matrices
//! (diagonal `1 + 2r`, off-diagonals `-r`, `r = dt eps / dx^2`), so the whole
//! matrix is an M-matrix and the step map is monotone; at `eps = 0` every row
//! degenerates to the identity and the solver reproduces the explicit
//! Kirchhoff update bit for bit.

use crate::error::{HjError, Result};
use crate::evolve::{
    interior_step, plan_time_stepping, solve_with_plan, JunctionBC, Orientation, SolveConfig,
    TimePlan, Trajectory,
};
use crate::hamiltonians::HamiltonianSpec;
use crate::network::{sup_distance, FarBoundary, Grid, GridFunction};
use crate::scalar::Real;

/// Knobs for [`viscous_solve`]. `dt_override` replaces the explicit-CFL
/// policy step (it must still satisfy that CFL — the Hamiltonian part stays
/// explicit; only the diffusion is unconditionally stable).
#[derive(Debug, Clone, PartialEq)]
pub struct ViscousConfig<T> {
    pub epsilon: T,
    pub dt_override: Option<T>,
    pub solve: SolveConfig<T>,
}

impl<T: Real> ViscousConfig<T> {
    pub fn new(epsilon: T) -> Self {
        ViscousConfig { epsilon, dt_override: None, solve: SolveConfig::default() }
    }
}

/// One implicit step's linear system. Branch blocks are tridiagonal; the
/// junction unknown couples only through each branch's first row
/// (`junction_col`) and the final scalar junction row.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowheadSystem<T> {
    /// Sub-diagonal per branch, length `n - 1`.
    pub lower: Vec<Vec<T>>,
    /// Diagonal per branch, length `n`.
    pub diag: Vec<Vec<T>>,
    /// Super-diagonal per branch, length `n - 1`.
    pub upper: Vec<Vec<T>>,
    /// Coefficient of the junction unknown in each branch's first row.
    pub junction_col: Vec<T>,
    /// Right-hand side per branch.
    pub rhs: Vec<Vec<T>>,
    /// Junction-row coefficient of the junction unknown.
    pub junction_diag: T,
    /// Junction-row coefficient of each branch's first unknown.
    pub junction_cols: Vec<T>,
    pub junction_rhs: T,
}

/// Assemble the implicit-diffusion system for one step. `explicit` carries
/// the forward-Euler Hamiltonian update (the output of
/// [`interior_step`]); its interior values become the right-hand side.
pub fn assemble<T: Real>(
    grid: &Grid<T>,
    epsilon: T,
    dt: T,
    explicit: &GridFunction<T>,
    b: T,
) -> Result<ArrowheadSystem<T>> {
    if !explicit.matches(grid) {
        return Err(HjError::GridMismatch("explicit state does not match grid".into()));
    }
    if !(dt > T::zero()) || !(epsilon >= T::zero()) {
        return Err(HjError::InvalidInput(format!(
            "need dt > 0 and epsilon >= 0, got dt = {dt}, epsilon = {epsilon}"
        )));
    }
    let dx = grid.dx();
    let r = dt * epsilon / (dx * dx);
    let k = grid.branch_count();
    let mut sys = ArrowheadSystem {
        lower: Vec::with_capacity(k),
        diag: Vec::with_capacity(k),
        upper: Vec::with_capacity(k),
        junction_col: vec![-r; k],
        rhs: Vec::with_capacity(k),
        junction_diag: T::of_usize(k),
        junction_cols: vec![-T::one(); k],
        junction_rhs: b * dx,
    };
    for i in 0..k {
        let n = grid.counts()[i];
        let mut lower = vec![-r; n - 1];
        let mut diag = vec![T::one() + (r + r); n];
        let upper = vec![-r; n - 1];
        let mut rhs: Vec<T> = explicit.branches[i].clone();
        match grid.far_bc() {
            FarBoundary::FrozenDirichlet => {
                // Far value pinned to its (already frozen) explicit value.
                diag[n - 1] = T::one();
                lower[n - 2] = T::zero();
            }
            FarBoundary::ZeroSlopeExtrapolation => {
                // u_{n-1} - u_{n-2} = 0 at the new time.
                diag[n - 1] = T::one();
                lower[n - 2] = -T::one();
                rhs[n - 1] = T::zero();
            }
        }
        sys.lower.push(lower);
        sys.diag.push(diag);
        sys.upper.push(upper);
        sys.rhs.push(rhs);
    }
    Ok(sys)
}

/// Solve the arrowhead system exactly: Thomas sweeps per branch for
/// `y = A_i^{-1} rhs_i` and `g = A_i^{-1} (junction_col e_0)`, then the
/// scalar Schur complement for the junction value, then `u_i = y - z g`.
pub fn arrowhead_solve<T: Real>(sys: &ArrowheadSystem<T>) -> Result<GridFunction<T>> {
    let k = sys.diag.len();
    if k == 0 || sys.junction_cols.len() != k || sys.junction_col.len() != k {
        return Err(HjError::InvalidInput("malformed arrowhead system".into()));
    }

    // Tridiagonal solve; pivots must stay positive (diagonal dominance).
    let thomas = |lower: &[T], diag: &[T], upper: &[T], rhs: &[T]| -> Result<Vec<T>> {
        let n = diag.len();
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let mut pivot = diag[0];
        if !(pivot > T::zero()) {
            return Err(HjError::InvalidInput(format!("nonpositive pivot {pivot}")));
        }
        if n > 1 {
            c[0] = upper[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for j in 1..n {
            pivot = diag[j] - lower[j - 1] * c[j - 1];
            if !(pivot > T::zero()) {
                return Err(HjError::InvalidInput(format!("nonpositive pivot {pivot} at row {j}")));
            }
            if j + 1 < n {
                c[j] = upper[j] / pivot;
            }
            d[j] = (rhs[j] - lower[j - 1] * d[j - 1]) / pivot;
        }
        for j in (0..n - 1).rev() {
            let next = d[j + 1];
            d[j] = d[j] - c[j] * next;
        }
        Ok(d)
    };

    let mut ys = Vec::with_capacity(k);
    let mut gs = Vec::with_capacity(k);
    for i in 0..k {
        let n = sys.diag[i].len();
        ys.push(thomas(&sys.lower[i], &sys.diag[i], &sys.upper[i], &sys.rhs[i])?);
        let mut e0 = vec![T::zero(); n];
        e0[0] = sys.junction_col[i];
        gs.push(thomas(&sys.lower[i], &sys.diag[i], &sys.upper[i], &e0)?);
    }

    // Schur complement. The summation order (branch order, left fold) is part
    // of the eps = 0 bit-identity contract with the explicit junction update.
    let num_sum: T = (0..k).map(|i| sys.junction_cols[i] * ys[i][0]).sum();
    let den_sum: T = (0..k).map(|i| sys.junction_cols[i] * gs[i][0]).sum();
    let denominator = sys.junction_diag - den_sum;
    if !(denominator.abs() > T::zero()) {
        return Err(HjError::InvalidInput("singular junction pivot".into()));
    }
    let z = (sys.junction_rhs - num_sum) / denominator;

    let branches: Vec<Vec<T>> = ys
        .into_iter()
        .zip(gs)
        .map(|(y, g)| y.into_iter().zip(g).map(|(yv, gv)| yv - z * gv).collect())
        .collect();
    Ok(GridFunction { junction: z, branches })
}

/// Residual of the junction row for a candidate solution (diagnostic; the
/// solver keeps it at rounding level because the row is solved exactly).
pub fn junction_row_residual<T: Real>(sys: &ArrowheadSystem<T>, u: &GridFunction<T>) -> T {
    let coupling: T = (0..sys.junction_cols.len())
        .map(|i| sys.junction_cols[i] * u.branches[i][0])
        .sum();
    sys.junction_diag * u.junction + coupling - sys.junction_rhs
}

/// IMEX run to `t_final`: explicit Hamiltonian via the shared interior step,
/// implicit diffusion + exact Kirchhoff row via [`arrowhead_solve`].
pub fn viscous_solve<T: Real>(
    grid: &Grid<T>,
    hs: &[HamiltonianSpec<T>],
    b: T,
    u0: &GridFunction<T>,
    t_final: T,
    vcfg: &ViscousConfig<T>,
) -> Result<Trajectory<T>> {
    let plan = plan_time_stepping(grid, hs, u0, t_final, &vcfg.solve)?;
    viscous_solve_with_plan(grid, b, u0, t_final, vcfg, &plan)
}

/// [`viscous_solve`] with the time stepping fixed by the caller; see
/// [`crate::evolve::solve_with_plan`] for when that matters.
pub fn viscous_solve_with_plan<T: Real>(
    grid: &Grid<T>,
    b: T,
    u0: &GridFunction<T>,
    t_final: T,
    vcfg: &ViscousConfig<T>,
    plan: &TimePlan<T>,
) -> Result<Trajectory<T>> {
    if !(vcfg.epsilon >= T::zero()) || !vcfg.epsilon.is_finite() {
        return Err(HjError::InvalidInput(format!(
            "epsilon must be finite and >= 0, got {}",
            vcfg.epsilon
        )));
    }
    let fluxes = &plan.fluxes;
    let (dt, n_steps) = match vcfg.dt_override {
        None => (plan.dt, plan.n_steps),
        Some(dt_o) => {
            if !(dt_o > T::zero()) {
                return Err(HjError::InvalidInput(format!("dt override must be positive, got {dt_o}")));
            }
            let n = (t_final / dt_o).ceil().to_usize().unwrap_or(1).max(1);
            (t_final / T::of_usize(n), n)
        }
    };
    let stride = vcfg.solve.snapshot_stride;

    let mut times = Vec::with_capacity(n_steps / stride + 2);
    let mut snapshots = Vec::with_capacity(n_steps / stride + 2);
    times.push(T::zero());
    snapshots.push(u0.clone());

    let mut state = u0.clone();
    for step in 0..n_steps {
        let t = dt * T::of_usize(step);
        let explicit = interior_step(grid, &state, fluxes, dt, t, Orientation::Incoming)?;
        let sys = assemble(grid, vcfg.epsilon, dt, &explicit, b)?;
        let next = arrowhead_solve(&sys)?;
        if !next.all_finite() {
            return Err(HjError::NonFinite(format!(
                "viscous solution lost finiteness at step {} (t = {t})",
                step + 1
            )));
        }
        state = next;
        let done = step + 1 == n_steps;
        if (step + 1) % stride == 0 || done {
            times.push(dt * T::of_usize(step + 1));
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory { times, snapshots })
}

/// One row of a viscosity sweep: the final-time sup distance between the
/// `epsilon`-viscous run and the inviscid Kirchhoff run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub epsilon: T,
    pub dx: T,
    pub dt: T,
    pub t_final: T,
    pub distance: T,
}

/// Run the inviscid problem once and each listed viscosity on the same grid,
/// stepping, and data; `eps_list` must be positive and strictly decreasing.
pub fn viscosity_sweep<T: Real>(
    grid: &Grid<T>,
    hs: &[HamiltonianSpec<T>],
    b: T,
    u0: &GridFunction<T>,
    t_final: T,
    eps_list: &[T],
    cfg: &SolveConfig<T>,
) -> Result<Vec<SweepRow<T>>> {
    if eps_list.is_empty() {
        return Err(HjError::InvalidInput("empty epsilon list".into()));
    }
    for w in eps_list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(HjError::InvalidInput(format!(
                "epsilon list must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(eps_list[eps_list.len() - 1] > T::zero()) {
        return Err(HjError::InvalidInput("epsilons must be positive".into()));
    }
    let plan: TimePlan<T> = plan_time_stepping(grid, hs, u0, t_final, cfg)?;
    let inviscid = solve_with_plan(grid, &JunctionBC::kirchhoff(b), u0, cfg, &plan)?;
    let reference = inviscid.final_state();

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let vcfg = ViscousConfig { epsilon: eps, dt_override: None, solve: cfg.clone() };
        let traj = viscous_solve_with_plan(grid, b, u0, t_final, &vcfg, &plan)?;
        rows.push(SweepRow {
            epsilon: eps,
            dx: grid.dx(),
            dt: plan.dt,
            t_final,
            distance: sup_distance(traj.final_state(), reference)?,
        });
    }
    Ok(rows)
}
