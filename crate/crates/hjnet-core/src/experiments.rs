//! Experiment drivers and table output: comparison suites, whole-line
//! recovery against the Hopf-Lax oracle, viscosity sweeps, the
//! limiter/Kirchhoff equivalence study, and the lemma suites. Results land in
//! [`ResultTable`]s written as CSV (plus a JSON metadata sidecar echoing the
//! spec). Identical spec + seeds produce byte-identical CSV.

use crate::error::{HjError, Result};
use crate::evolve::{
    plan_time_stepping, reflect_trajectory, solve, solve_with_plan, JunctionBC, SolveConfig,
    TimePlan, Trajectory,
};
use crate::hamiltonians::{a_to_b, HamiltonianSpec};
use crate::initial::{random_interior_bump, sample_catalog, InitialData};
use crate::lemma::{
    adversarial_search, check_hypotheses, conclusion_holds, default_density,
    random_satisfying_instance, GeneratorParams,
};
use crate::network::{build_grid, sup_distance, FarBoundary, Grid, GridFunction, JunctionNetwork};
use crate::scalar::Real;
use crate::viscous::{viscosity_sweep, viscous_solve_with_plan, ViscousConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

/// Junction rule selector for experiment specs; `Viscous` is the Kirchhoff
/// rule at positive viscosity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcSpec<T> {
    Kirchhoff { b: T },
    FluxLimiter { a: T },
    Viscous { b: T, epsilon: T },
}

impl<T: Real> BcSpec<T> {
    pub fn label(&self) -> &'static str {
        match self {
            BcSpec::Kirchhoff { .. } => "kirchhoff",
            BcSpec::FluxLimiter { .. } => "fluxlimiter",
            BcSpec::Viscous { .. } => "viscous",
        }
    }
}

/// Shared experiment description; each `run_*` driver reads the fields it
/// needs and validates its own preconditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec<T> {
    pub lengths: Vec<T>,
    pub far_bc: FarBoundary,
    pub hs: Vec<HamiltonianSpec<T>>,
    pub bc: BcSpec<T>,
    pub u0: Vec<InitialData<T>>,
    pub t_final: T,
    /// Strictly decreasing list of grid spacings.
    pub dx_ladder: Vec<T>,
    pub seeds: Vec<u64>,
    pub solve: SolveConfig<T>,
    pub epsilons: Vec<T>,
    /// Trusted-region radius for whole-line error measurement; defaults to
    /// half the shortest branch.
    pub measure_radius: Option<T>,
}

impl<T: Real> ExperimentSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let k = self.lengths.len();
        if k == 0 || self.hs.len() != k || self.u0.len() != k {
            return Err(HjError::InvalidInput(format!(
                "{k} branches but {} Hamiltonians, {} initial entries",
                self.hs.len(),
                self.u0.len()
            )));
        }
        if !(self.t_final > T::zero()) {
            return Err(HjError::InvalidInput(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if self.dx_ladder.is_empty() {
            return Err(HjError::InvalidInput("empty dx ladder".into()));
        }
        for w in self.dx_ladder.windows(2) {
            if !(w[1] < w[0]) {
                return Err(HjError::InvalidInput(format!(
                    "dx ladder must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    fn grid(&self, dx: T) -> Result<Grid<T>> {
        let net = JunctionNetwork::new(self.lengths.clone(), self.far_bc)?;
        build_grid(&net, dx)
    }

    fn initial(&self, grid: &Grid<T>) -> Result<GridFunction<T>> {
        sample_catalog(grid, &self.u0)
    }

    fn run_bc(
        &self,
        grid: &Grid<T>,
        u0: &GridFunction<T>,
        bc: &BcSpec<T>,
    ) -> Result<Trajectory<T>> {
        let plan = self.plan(grid, u0)?;
        self.run_bc_with_plan(grid, u0, bc, &plan)
    }

    fn plan(&self, grid: &Grid<T>, u0: &GridFunction<T>) -> Result<TimePlan<T>> {
        plan_time_stepping(grid, &self.hs, u0, self.t_final, &self.solve)
    }

    fn run_bc_with_plan(
        &self,
        grid: &Grid<T>,
        u0: &GridFunction<T>,
        bc: &BcSpec<T>,
        plan: &TimePlan<T>,
    ) -> Result<Trajectory<T>> {
        match *bc {
            BcSpec::Kirchhoff { b } => {
                solve_with_plan(grid, &JunctionBC::kirchhoff(b), u0, &self.solve, plan)
            }
            BcSpec::FluxLimiter { a } => {
                let bc = JunctionBC::flux_limiter(a, &self.hs)?;
                solve_with_plan(grid, &bc, u0, &self.solve, plan)
            }
            BcSpec::Viscous { b, epsilon } => {
                let vcfg = ViscousConfig {
                    epsilon,
                    dt_override: None,
                    solve: self.solve.clone(),
                };
                viscous_solve_with_plan(grid, b, u0, self.t_final, &vcfg, plan)
            }
        }
    }
}

/// One table cell; reals are written with 17 significant digits so CSV
/// round-trips are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

/// Rectangular result table with metadata for the sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        ResultTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: vec![],
            meta: vec![],
        }
    }

    /// Arity mismatches are programming errors, not runtime conditions.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged table row");
        self.rows.push(row);
    }

    pub fn echo_spec<S: std::fmt::Debug>(&mut self, spec: &S) {
        self.meta.push(("spec".into(), format!("{spec:?}")));
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of a real column, in row order.
    pub fn real_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| HjError::InvalidInput(format!("no column {name}")))?;
        self.rows
            .iter()
            .map(|r| match &r[idx] {
                Cell::Real(v) => Ok(*v),
                Cell::Int(v) => Ok(*v as f64),
                Cell::Text(t) => Err(HjError::InvalidInput(format!(
                    "column {name} holds text {t:?}"
                ))),
            })
            .collect()
    }
}

fn escape_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Real(v) => format!("{v:.16e}"),
        Cell::Int(v) => v.to_string(),
        Cell::Text(t) => escape_csv(t),
    }
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(e) => format!("{}.tmp", e.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, bytes)
        .map_err(|e| HjError::Io(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| HjError::Io(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

/// Write the table as CSV (header row, 17-significant-digit reals) plus a
/// `<path>.meta.json` sidecar with the metadata entries. Both writes are
/// atomic (temp file + rename).
pub fn write_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(
        &table
            .columns
            .iter()
            .map(|c| escape_csv(c))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.iter().map(format_cell).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())?;

    let mut meta = String::from("{");
    for (i, (k, v)) in table.meta.iter().enumerate() {
        if i > 0 {
            meta.push(',');
        }
        let _ = write!(meta, "\n  \"{}\": \"{}\"", escape_json(k), escape_json(v));
    }
    meta.push_str("\n}\n");
    let sidecar = path.with_file_name(format!(
        "{}.meta.json",
        path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    ));
    atomic_write(&sidecar, meta.as_bytes())
}

/// Minimal CSV reader for round-trip checks: header + cells, quotes per
/// RFC 4180. Metadata sidecars are not read back.
pub fn read_csv(path: &Path) -> Result<ResultTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HjError::Io(format!("reading {}: {e}", path.display())))?;
    let parse_line = |line: &str| -> Vec<String> {
        let mut fields = vec![];
        let mut cur = String::new();
        let mut chars = line.chars().peekable();
        let mut quoted = false;
        while let Some(c) = chars.next() {
            if quoted {
                if c == '"' {
                    if chars.peek() == Some(&'"') {
                        chars.next();
                        cur.push('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    cur.push(c);
                }
            } else {
                match c {
                    '"' => quoted = true,
                    ',' => fields.push(std::mem::take(&mut cur)),
                    c => cur.push(c),
                }
            }
        }
        fields.push(cur);
        fields
    };
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| HjError::Io(format!("{}: empty file", path.display())))?;
    let mut table = ResultTable::new(parse_line(header));
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row = parse_line(line)
            .into_iter()
            .map(|f| {
                if !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
                    if let Ok(v) = f.parse::<i64>() {
                        return Cell::Int(v);
                    }
                }
                if let Ok(v) = f.parse::<f64>() {
                    if f.contains('e') || f.contains('.') {
                        return Cell::Real(v);
                    }
                }
                Cell::Text(f)
            })
            .collect();
        table.push_row(row);
    }
    Ok(table)
}

/// Hopf-Lax value `min_z [u0(z) + t L((y - z)/t)]` for a convex,
/// `(x,t)`-independent Hamiltonian, by scanning a z-grid of spacing `dz`
/// over the reachable window and polishing the best cell by golden-section.
/// `lip_u0` bounds the initial data's slopes (it sizes the window through the
/// velocity bound `|H'|` over those slopes, plus margin).
pub fn hopf_lax_value<T: Real>(
    h: &HamiltonianSpec<T>,
    u0: &dyn Fn(T) -> T,
    lip_u0: T,
    y: T,
    t: T,
    dz: T,
) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(HjError::InvalidInput(format!("t must be >= 0, got {t}")));
    }
    if t == T::zero() {
        return Ok(u0(y));
    }
    if !(dz > T::zero()) {
        return Err(HjError::InvalidInput(format!("dz must be positive, got {dz}")));
    }
    let slope_bound = lip_u0 + T::of(1.0);
    let v_max = h.lipschitz_p(-slope_bound, slope_bound) + T::of(1.0);
    let window = v_max * t + dz;
    let value_at = |z: T| -> Result<Option<T>> {
        Ok(h.legendre((y - z) / t)?.map(|l| u0(z) + t * l))
    };

    let n = (T::of(2.0) * window / dz).ceil().to_usize().unwrap_or(1).max(1);
    let mut best_z = y;
    let mut best = match value_at(y)? {
        Some(v) => v,
        None => T::infinity(),
    };
    for k in 0..=n {
        let z = y - window + T::of(2.0) * window * T::of(k as f64 / n as f64);
        if let Some(v) = value_at(z)? {
            if v < best {
                best = v;
                best_z = z;
            }
        }
    }
    if !best.is_finite() {
        return Err(HjError::SearchFailure(
            "Hopf-Lax scan found no finite value".into(),
        ));
    }

    // Golden-section polish inside the best cell (+- dz).
    let phi = T::of(0.618_033_988_749_894_9);
    let mut lo = best_z - dz;
    let mut hi = best_z + dz;
    let eval_or_inf = |z: T, value_best: T| -> Result<T> {
        Ok(match h.legendre((y - z) / t)? {
            Some(l) => u0(z) + t * l,
            None => value_best + T::of(1.0), // effectively +infinity
        })
    };
    let mut m1 = hi - phi * (hi - lo);
    let mut m2 = lo + phi * (hi - lo);
    let mut f1 = eval_or_inf(m1, best)?;
    let mut f2 = eval_or_inf(m2, best)?;
    for _ in 0..80 {
        if f1 <= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - phi * (hi - lo);
            f1 = eval_or_inf(m1, best)?;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + phi * (hi - lo);
            f2 = eval_or_inf(m2, best)?;
        }
    }
    Ok(best.min(f1).min(f2))
}

/// Ordered-pair comparison suite: for every seed and every ladder spacing,
/// solve `u0` and `v0 = u0 + random nonnegative bumps` under the spec's
/// junction rule and report the worst nodewise `u - v` gain over the
/// trajectory (expected `<= 1e-10`; exactly 0 for the degenerate pair).
pub fn run_comparison<T: Real>(spec: &ExperimentSpec<T>) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = ResultTable::new(vec!["seed", "dx", "bc", "violation"]);
    table.echo_spec(spec);
    for &dx in &spec.dx_ladder {
        let grid = spec.grid(dx)?;
        let u0 = spec.initial(&grid)?;
        for &seed in &spec.seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v0 = u0.clone();
            for (i, branch) in v0.branches.iter_mut().enumerate() {
                let bump = random_interior_bump::<T, _>(&mut rng, spec.lengths[i]);
                for (k, v) in branch.iter_mut().enumerate() {
                    *v = *v + bump.eval_at_distance(T::of_usize(k + 1) * dx);
                }
            }
            let violation = comparison_violation(spec, &grid, &u0, &v0)?;
            table.push_row(vec![
                Cell::Int(seed as i64),
                Cell::Real(dx.as_f64()),
                Cell::Text(spec.bc.label().into()),
                Cell::Real(violation.as_f64()),
            ]);
        }
    }
    Ok(table)
}

/// Worst over time and nodes of `(u - v)`, minus its initial value. Both runs
/// share one time plan (fixed by the steeper initial state): the discrete
/// comparison principle is a statement about one scheme applied twice, not
/// about two schemes with different dissipation.
pub fn comparison_violation<T: Real>(
    spec: &ExperimentSpec<T>,
    grid: &Grid<T>,
    u0: &GridFunction<T>,
    v0: &GridFunction<T>,
) -> Result<T> {
    let dx = grid.dx();
    let steeper =
        if v0.discrete_lipschitz(dx) >= u0.discrete_lipschitz(dx) { v0 } else { u0 };
    let plan = spec.plan(grid, steeper)?;
    let tu = spec.run_bc_with_plan(grid, u0, &spec.bc, &plan)?;
    let tv = spec.run_bc_with_plan(grid, v0, &spec.bc, &plan)?;
    let gap = |a: &GridFunction<T>, b: &GridFunction<T>| -> T {
        let mut worst = a.junction - b.junction;
        for (x, y) in a.branches.iter().zip(b.branches.iter()) {
            for (p, q) in x.iter().zip(y.iter()) {
                worst = worst.max(*p - *q);
            }
        }
        worst
    };
    let initial = gap(u0, v0);
    let mut worst = T::neg_infinity();
    for (a, b) in tu.snapshots.iter().zip(tv.snapshots.iter()) {
        worst = worst.max(gap(a, b));
    }
    Ok(worst - initial)
}

/// Whole-line recovery: a two-branch junction with `B = 0` and one even,
/// convex Hamiltonian on both branches discretizes `w_t + H(w_y) = 0` on the
/// line (branch 1 carries `y <= 0`, branch 2 carries `y >= 0`; the Kirchhoff
/// condition becomes continuity of `w_y` at 0). Evenness of `H` is required
/// because the two branch coordinates run in opposite directions; it is
/// checked here. Errors are measured against [`hopf_lax_value`] inside the
/// trusted radius only, keeping far-boundary truncation out of the ladder.
pub fn run_wholeline<T: Real>(spec: &ExperimentSpec<T>) -> Result<ResultTable> {
    spec.validate()?;
    if spec.lengths.len() != 2 || spec.lengths[0] != spec.lengths[1] {
        return Err(HjError::InvalidInput(
            "whole-line recovery needs two equal branches".into(),
        ));
    }
    if spec.u0[0] != spec.u0[1] {
        return Err(HjError::InvalidInput(
            "whole-line recovery needs identical initial entries".into(),
        ));
    }
    match spec.bc {
        BcSpec::Kirchhoff { b } if b == T::zero() => {}
        _ => {
            return Err(HjError::InvalidInput(
                "whole-line recovery needs Kirchhoff B = 0".into(),
            ))
        }
    }
    let h = spec.hs[0];
    if spec.hs[1] != h {
        return Err(HjError::InvalidInput(
            "whole-line recovery needs one Hamiltonian on both branches".into(),
        ));
    }
    if !h.is_convex_in_p() || h.is_time_dependent() {
        return Err(HjError::NotConvex(
            "whole-line oracle needs a convex, time-independent Hamiltonian".into(),
        ));
    }
    for k in 0..=200 {
        let p = T::of(-5.0 + 10.0 * k as f64 / 200.0);
        let gap = h.eval(p, T::zero(), T::zero()) - h.eval(-p, T::zero(), T::zero());
        if gap.abs() > T::of(1e-12) {
            return Err(HjError::InvalidInput(format!(
                "whole-line recovery needs an even Hamiltonian; H({p}) differs from H({}) by {gap}",
                -p
            )));
        }
    }

    let radius = spec
        .measure_radius
        .unwrap_or_else(|| spec.lengths[0] / T::of(2.0));
    let entry = spec.u0[0];
    let line_u0 = move |z: T| entry.eval_at_distance(z.abs());
    let lip = entry.lipschitz_bound();

    let mut table = ResultTable::new(vec!["dx", "linf_error"]);
    table.echo_spec(spec);
    for &dx in &spec.dx_ladder {
        let grid = spec.grid(dx)?;
        let u0 = spec.initial(&grid)?;
        let traj = spec.run_bc(&grid, &u0, &spec.bc)?;
        let end = traj.final_state();
        let dz = dx / T::of(10.0);
        let mut err = (end.junction
            - hopf_lax_value(&h, &line_u0, lip, T::zero(), spec.t_final, dz)?)
        .abs();
        for (i, branch) in end.branches.iter().enumerate() {
            // Branch 1 is the y <= 0 half-line, branch 2 the y >= 0 one.
            let sign = if i == 0 { -T::one() } else { T::one() };
            for (k, &v) in branch.iter().enumerate() {
                let r = T::of_usize(k + 1) * dx;
                if r > radius {
                    break;
                }
                let oracle = hopf_lax_value(&h, &line_u0, lip, sign * r, spec.t_final, dz)?;
                err = err.max((v - oracle).abs());
            }
        }
        table.push_row(vec![Cell::Real(dx.as_f64()), Cell::Real(err.as_f64())]);
    }
    Ok(table)
}

/// Limiter/Kirchhoff equivalence: solve the `A`-limiter problem in its own
/// (outgoing) orientation, reflect to the incoming picture, and compare at
/// the final time against the Kirchhoff run with reflected Hamiltonians and
/// `B = -sum_i p_i^A`. The reflection `u(x) = v(-x)` is index-preserving on
/// branch arrays, so the comparison is a plain sup distance.
pub fn run_equivalence<T: Real>(spec: &ExperimentSpec<T>) -> Result<ResultTable> {
    spec.validate()?;
    let a = match spec.bc {
        BcSpec::FluxLimiter { a } => a,
        _ => {
            return Err(HjError::InvalidInput(
                "equivalence experiment needs a flux-limiter bc".into(),
            ))
        }
    };
    let b = a_to_b(&spec.hs, a)?;
    let reflected: Vec<HamiltonianSpec<T>> = spec.hs.iter().map(|h| h.reflect()).collect();

    let mut table = ResultTable::new(vec!["dx", "b", "sup_distance"]);
    table.echo_spec(spec);
    for &dx in &spec.dx_ladder {
        let grid = spec.grid(dx)?;
        let u0 = spec.initial(&grid)?;
        let limiter_bc = JunctionBC::flux_limiter(a, &spec.hs)?;
        let limiter = solve(&grid, &spec.hs, &limiter_bc, &u0, spec.t_final, &spec.solve)?;
        let limiter_in_paper_coords = reflect_trajectory(&limiter);
        let kirchhoff = solve(
            &grid,
            &reflected,
            &JunctionBC::kirchhoff(b),
            &u0,
            spec.t_final,
            &spec.solve,
        )?;
        let d = sup_distance(
            limiter_in_paper_coords.final_state(),
            kirchhoff.final_state(),
        )?;
        table.push_row(vec![
            Cell::Real(dx.as_f64()),
            Cell::Real(b.as_f64()),
            Cell::Real(d.as_f64()),
        ]);
    }
    Ok(table)
}

/// Viscosity sweep across the dx ladder; one row per (epsilon, dx).
pub fn run_viscosity<T: Real>(spec: &ExperimentSpec<T>) -> Result<ResultTable> {
    spec.validate()?;
    let b = match spec.bc {
        BcSpec::Kirchhoff { b } => b,
        BcSpec::Viscous { b, .. } => b,
        BcSpec::FluxLimiter { .. } => {
            return Err(HjError::InvalidInput(
                "viscosity sweep needs a Kirchhoff-type bc".into(),
            ))
        }
    };
    if spec.epsilons.is_empty() {
        return Err(HjError::InvalidInput("no epsilons to sweep".into()));
    }
    let mut table = ResultTable::new(vec!["epsilon", "dx", "dt", "t_final", "sup_distance"]);
    table.echo_spec(spec);
    for &dx in &spec.dx_ladder {
        let grid = spec.grid(dx)?;
        let u0 = spec.initial(&grid)?;
        let rows = viscosity_sweep(
            &grid,
            &spec.hs,
            b,
            &u0,
            spec.t_final,
            &spec.epsilons,
            &spec.solve,
        )?;
        for r in rows {
            table.push_row(vec![
                Cell::Real(r.epsilon.as_f64()),
                Cell::Real(r.dx.as_f64()),
                Cell::Real(r.dt.as_f64()),
                Cell::Real(r.t_final.as_f64()),
                Cell::Real(r.distance.as_f64()),
            ]);
        }
    }
    Ok(table)
}

/// Randomized lemma suite: one row per (seed, K) with instance levels and
/// hypothesis margins.
pub fn run_lemma_suite(
    seeds: &[u64],
    ks: &[usize],
    params: &GeneratorParams,
) -> Result<ResultTable> {
    let mut table = ResultTable::new(vec![
        "seed",
        "k",
        "a",
        "b",
        "a_minus_b",
        "cond_i_margin",
        "cond_ii_worst",
        "cond_iii_worst",
        "conclusion",
    ]);
    table.echo_spec(&(seeds.len(), ks, params));
    for &k in ks {
        for &seed in seeds {
            let inst = random_satisfying_instance::<f64>(seed, k, params)?;
            let rep = check_hypotheses(&inst, default_density(k), 1e-9)?;
            if !rep.all_ok() {
                return Err(HjError::GeneratorFailure(format!(
                    "instance (seed {seed}, K {k}) failed re-verification"
                )));
            }
            table.push_row(vec![
                Cell::Int(seed as i64),
                Cell::Int(k as i64),
                Cell::Real(inst.a),
                Cell::Real(inst.b),
                Cell::Real(inst.a - inst.b),
                Cell::Real(rep.cond_i_margin),
                match &rep.cond_ii_worst {
                    Some((w, _)) => Cell::Real(*w),
                    None => Cell::Text("vacuous".into()),
                },
                match &rep.cond_iii_worst {
                    Some((w, _)) => Cell::Real(*w),
                    None => Cell::Text("vacuous".into()),
                },
                Cell::Int(conclusion_holds(&inst) as i64),
            ]);
        }
    }
    Ok(table)
}

/// Adversarial lemma search: a single row describing the best candidate.
pub fn run_lemma_adversarial(
    seed: u64,
    k: usize,
    budget: usize,
    params: &GeneratorParams,
) -> Result<ResultTable> {
    let out = adversarial_search::<f64>(seed, k, budget, params)?;
    let mut table = ResultTable::new(vec![
        "seed",
        "k",
        "budget",
        "best_a",
        "best_b",
        "gap",
        "cond_i_margin",
    ]);
    table.echo_spec(&(seed, k, budget, params));
    table.push_row(vec![
        Cell::Int(seed as i64),
        Cell::Int(k as i64),
        Cell::Int(budget as i64),
        Cell::Real(out.instance.a),
        Cell::Real(out.instance.b),
        Cell::Real(out.gap),
        Cell::Real(out.report.cond_i_margin),
    ]);
    Ok(table)
}

/// Flatten a trajectory for plotting: one row per (snapshot, node) with the
/// node's signed coordinate (`x_sign = -1` for the incoming picture, `+1`
/// for the outgoing one). The junction appears as branch 0, node 0.
pub fn trajectory_table<T: Real>(
    grid: &Grid<T>,
    traj: &Trajectory<T>,
    x_sign: T,
) -> ResultTable {
    let mut table = ResultTable::new(vec!["time", "branch", "node", "x", "u"]);
    let dx = grid.dx();
    for (t, snap) in traj.times.iter().zip(traj.snapshots.iter()) {
        table.push_row(vec![
            Cell::Real(t.as_f64()),
            Cell::Int(0),
            Cell::Int(0),
            Cell::Real(0.0),
            Cell::Real(snap.junction.as_f64()),
        ]);
        for (i, branch) in snap.branches.iter().enumerate() {
            for (k, &v) in branch.iter().enumerate() {
                table.push_row(vec![
                    Cell::Real(t.as_f64()),
                    Cell::Int(i as i64 + 1),
                    Cell::Int(k as i64 + 1),
                    Cell::Real((x_sign * T::of_usize(k + 1) * dx).as_f64()),
                    Cell::Real(v.as_f64()),
                ]);
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxes::FluxKind;

    type H = HamiltonianSpec<f64>;

    fn base_spec() -> ExperimentSpec<f64> {
        ExperimentSpec {
            lengths: vec![1.0, 1.0],
            far_bc: FarBoundary::FrozenDirichlet,
            hs: vec![H::half_square(), H::half_square()],
            bc: BcSpec::Kirchhoff { b: 0.0 },
            u0: vec![InitialData::Abs, InitialData::Abs],
            t_final: 0.25,
            dx_ladder: vec![0.05],
            seeds: vec![1, 2],
            solve: SolveConfig { snapshot_stride: 8, ..Default::default() },
            epsilons: vec![],
            measure_radius: None,
        }
    }

    #[test]
    fn csv_round_trips_and_is_deterministic() {
        let dir = std::env::temp_dir().join(format!("hjnet-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut table = ResultTable::new(vec!["name", "value", "count"]);
        table.push_row(vec![
            Cell::Text("plain".into()),
            Cell::Real(0.1 + 0.2),
            Cell::Int(-3),
        ]);
        table.push_row(vec![
            Cell::Text("quo\"te, comma".into()),
            Cell::Real(-1.25e-300),
            Cell::Int(0),
        ]);
        table.meta.push(("note".into(), "line\nbreak \"q\"".into()));
        let path = dir.join("t.csv");
        write_csv(&table, &path).unwrap();
        let again = read_csv(&path).unwrap();
        assert_eq!(again.columns, table.columns);
        assert_eq!(again.rows, table.rows);

        let first = std::fs::read(&path).unwrap();
        write_csv(&table, &path).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
        // Sidecar exists and is valid enough to contain the escaped note.
        let sidecar = std::fs::read_to_string(dir.join("t.csv.meta.json")).unwrap();
        assert!(sidecar.contains("line\\nbreak \\\"q\\\""));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn empty_and_tiny_tables() {
        let dir = std::env::temp_dir().join(format!("hjnet-csv2-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let table = ResultTable::new(vec!["only"]);
        let path = dir.join("empty.csv");
        write_csv(&table, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "only\n");

        let mut one = ResultTable::new(vec!["v"]);
        one.push_row(vec![Cell::Real(2.0)]);
        let path1 = dir.join("one.csv");
        write_csv(&one, &path1).unwrap();
        let text = std::fs::read_to_string(&path1).unwrap();
        assert_eq!(text.lines().count(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn hopf_lax_matches_closed_form() {
        // H = p^2/2, u0 = |y|: u = y^2/(2t) for |y| <= t, |y| - t/2 outside.
        let h = H::half_square();
        let u0 = |z: f64| z.abs();
        for (y, expect) in [(0.0, 0.0), (0.25, 0.0625), (1.0, 0.75), (-0.3, 0.09)] {
            let v = hopf_lax_value(&h, &u0, 1.0, y, 0.5, 1e-3).unwrap();
            assert!((v - expect).abs() <= 1e-6, "y = {y}: {v} vs {expect}");
        }
        // t = 0 returns the data.
        assert_eq!(hopf_lax_value(&h, &u0, 1.0, 0.7, 0.0, 1e-3).unwrap(), 0.7);
        // V-shape H = |p|: finite-speed transport, L = 0 on [-1,1], +inf out.
        let vh = H::v_shape(1.0, 0.0, 0.0).unwrap();
        let v = hopf_lax_value(&vh, &u0, 1.0, 0.0, 0.5, 1e-3).unwrap();
        // min over |z| <= 0.5 of |z| = 0 at z = 0... value 0 + t*L(0) = 0.
        assert!(v.abs() <= 1e-9);
    }

    #[test]
    fn comparison_suite_reports_tiny_violations() {
        let spec = base_spec();
        let table = run_comparison(&spec).unwrap();
        assert_eq!(table.rows.len(), 2);
        for v in table.real_column("violation").unwrap() {
            assert!(v <= 1e-10, "violation {v}");
        }
        // Degenerate pair: exactly zero.
        let grid = spec.grid(0.05).unwrap();
        let u0 = spec.initial(&grid).unwrap();
        let v = comparison_violation(&spec, &grid, &u0, &u0.clone()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn comparison_violation_appears_for_non_monotone_flux() {
        let mut spec = base_spec();
        spec.solve.alpha_override = Some(0.0); // central flux: not monotone
        spec.solve.flux = FluxKind::LaxFriedrichs;
        let table = run_comparison(&spec).unwrap();
        let worst = table
            .real_column("violation")
            .unwrap()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst > 1e-10, "expected a violation, worst {worst}");
    }

    #[test]
    fn wholeline_errors_decrease() {
        let mut spec = base_spec();
        spec.lengths = vec![2.0, 2.0];
        spec.t_final = 0.5;
        spec.dx_ladder = vec![1.0 / 25.0, 1.0 / 50.0];
        spec.solve.flux = FluxKind::Godunov;
        spec.solve.snapshot_stride = 1 << 30;
        spec.measure_radius = Some(1.0);
        let table = run_wholeline(&spec).unwrap();
        let errs = table.real_column("linf_error").unwrap();
        assert!(errs[1] < errs[0], "no decrease: {errs:?}");
        assert!(errs[1] < 0.1);

        // Zero data: exactly zero error (H(0) = 0 and the oracle is 0).
        spec.u0 = vec![InitialData::Zero, InitialData::Zero];
        spec.dx_ladder = vec![1.0 / 25.0];
        let table = run_wholeline(&spec).unwrap();
        assert_eq!(table.real_column("linf_error").unwrap()[0], 0.0);

        // Odd Hamiltonian rejected.
        spec.hs = vec![
            H::quadratic(1.0, 0.5, 0.0).unwrap(),
            H::quadratic(1.0, 0.5, 0.0).unwrap(),
        ];
        assert!(run_wholeline(&spec).is_err());
    }

    #[test]
    fn equivalence_distances_decrease() {
        let mut spec = base_spec();
        spec.bc = BcSpec::FluxLimiter { a: 2.0 };
        spec.u0 = vec![
            InitialData::bump(0.5, 0.5, 0.3).unwrap(),
            InitialData::bump(0.5, 0.5, 0.3).unwrap(),
        ];
        spec.dx_ladder = vec![1.0 / 20.0, 1.0 / 40.0];
        spec.t_final = 0.2;
        spec.solve.snapshot_stride = 1 << 30;
        let table = run_equivalence(&spec).unwrap();
        // B = -sum p_i^A = -2 * sqrt(2 * 2) = -4 for H = p^2/2, A = 2.
        let b = table.real_column("b").unwrap();
        assert!((b[0] + 4.0).abs() <= 1e-9, "B {b:?}");
        let d = table.real_column("sup_distance").unwrap();
        assert!(d[1] < d[0], "no decrease: {d:?}");
    }

    #[test]
    fn viscosity_table_has_ladder_rows() {
        let mut spec = base_spec();
        spec.epsilons = vec![0.2, 0.1];
        spec.dx_ladder = vec![0.05, 0.025];
        spec.solve.snapshot_stride = 1 << 30;
        let table = run_viscosity(&spec).unwrap();
        assert_eq!(table.rows.len(), 4);
        for d in table.real_column("sup_distance").unwrap() {
            assert!(d >= 0.0);
        }
    }

    #[test]
    fn lemma_tables_are_deterministic() {
        let params = GeneratorParams::default();
        let a = run_lemma_suite(&[1, 2, 3], &[1, 2], &params).unwrap();
        let b = run_lemma_suite(&[1, 2, 3], &[1, 2], &params).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 6);
        for c in a.real_column("conclusion").unwrap() {
            assert_eq!(c, 1.0);
        }
        let adv = run_lemma_adversarial(5, 2, 60, &params).unwrap();
        assert_eq!(adv.rows.len(), 1);
        let gap = adv.real_column("gap").unwrap()[0];
        assert!(gap <= 1e-6, "gap {gap}");
    }

    #[test]
    fn trajectory_table_shape() {
        let spec = base_spec();
        let grid = spec.grid(0.1).unwrap();
        let u0 = spec.initial(&grid).unwrap();
        let traj = spec.run_bc(&grid, &u0, &spec.bc).unwrap();
        let table = trajectory_table(&grid, &traj, -1.0);
        let per_snap = 1 + 2 * grid.counts()[0];
        assert_eq!(table.rows.len(), traj.len() * per_snap);
    }
}
