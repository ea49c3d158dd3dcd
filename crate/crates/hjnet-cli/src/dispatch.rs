//! Subcommand dispatch. Each subcommand reads one JSON config, runs its
//! experiment, and writes one CSV (plus a `.meta.json` sidecar) into `--out`.
//!
//! Exit codes are a contract, not a convention: 0 success, 1 numeric failure
//! (a solver aborted or a threshold was exceeded — the CSV report is still
//! written first), 2 config error (nothing is written), 3 I/O error. CI can
//! drive the whole suite off these codes alone.

use std::path::PathBuf;

use clap::{ArgAction, Parser, Subcommand};

use hjnet_core::evolve::{solve, JunctionBC};
use hjnet_core::experiments::{
    run_comparison, run_equivalence, run_lemma_adversarial, run_lemma_suite, run_viscosity,
    run_wholeline, trajectory_table, write_csv, BcSpec, ResultTable,
};
use hjnet_core::initial::sample_catalog;
use hjnet_core::lemma::GeneratorParams;
use hjnet_core::network::{build_grid, JunctionNetwork};
use hjnet_core::viscous::{viscous_solve, ViscousConfig};
use hjnet_core::HjError;

use crate::config::{parse_config, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hjnet",
    version,
    about = "Hamilton-Jacobi solvers and property experiments on star junctions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON experiment config (schema documented in the README).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for CSV outputs and their .meta.json sidecars.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Replace every seed list in the config with this single seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Reject unknown config keys (pass `--strict false` to tolerate them).
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set, value_name = "BOOL")]
    pub strict: bool,

    /// Suppress status lines; errors still go to stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// One explicit trajectory (kirchhoff or fluxlimiter bc) at the finest dx.
    Solve,
    /// One viscous trajectory (viscous bc) at the finest dx.
    Viscous,
    /// One flux-limiter trajectory at the finest dx, in outgoing coordinates.
    Fluxlimiter,
    /// Ordered-pair comparison sweep; fails if any violation exceeds tolerance.
    Compare,
    /// Whole-line recovery errors down the dx ladder.
    Wholeline,
    /// Flux-limiter vs Kirchhoff equivalence distances down the dx ladder.
    Equivalence,
    /// Vanishing-viscosity sweep; fails unless distances shrink with epsilon.
    Viscosity,
    /// Randomized lemma instances; fails if any gap exceeds tolerance.
    LemmaSuite,
    /// Adversarial lemma search; fails if the best gap exceeds tolerance.
    LemmaAdversarial,
}

/// What went wrong, grouped by exit code. `Numeric` means the run itself is
/// the diagnosis (solver abort or threshold breach); `Config` means nothing
/// ran; `Io` means the filesystem let us down.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numeric(_) => EXIT_NUMERIC,
            Failure::Io(_) => EXIT_IO,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<HjError> for Failure {
    fn from(e: HjError) -> Self {
        match e {
            HjError::Io(_) => Failure::Io(e.to_string()),
            // Mid-run aborts: the configuration was admissible, the numbers
            // were not.
            HjError::NonFinite(_)
            | HjError::CflViolation(_)
            | HjError::SearchFailure(_)
            | HjError::GeneratorFailure(_) => Failure::Numeric(e.to_string()),
            // Everything else is a precondition the config failed to meet.
            _ => Failure::Config(e.to_string()),
        }
    }
}

/// Entry point for `main`: parse args, run, report, and map to an exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text, cli.strict).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
        cfg.lemma.seeds = vec![seed];
    }

    match cli.command {
        Command::Solve => single_trajectory(cli, &cfg, Single::Solve),
        Command::Viscous => single_trajectory(cli, &cfg, Single::Viscous),
        Command::Fluxlimiter => single_trajectory(cli, &cfg, Single::FluxLimiter),
        Command::Compare => compare(cli, &cfg),
        Command::Wholeline => wholeline(cli, &cfg),
        Command::Equivalence => equivalence(cli, &cfg),
        Command::Viscosity => viscosity(cli, &cfg),
        Command::LemmaSuite => lemma_suite(cli, &cfg),
        Command::LemmaAdversarial => lemma_adversarial(cli, &cfg),
    }
}

fn status(cli: &Cli, msg: &str) {
    if !cli.quiet {
        println!("{msg}");
    }
}

/// All writes funnel through here: the out dir is created on first use, and
/// `write_csv` is atomic, so a failed run never leaves partial output.
fn write_table(cli: &Cli, table: &ResultTable, name: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| Failure::Io(format!("creating {}: {e}", cli.out.display())))?;
    let path = cli.out.join(name);
    write_csv(table, &path).map_err(Failure::from)?;
    status(cli, &format!("wrote {} ({} rows)", path.display(), table.rows.len()));
    Ok(path)
}

#[derive(Clone, Copy, PartialEq)]
enum Single {
    Solve,
    Viscous,
    FluxLimiter,
}

/// The three single-trajectory subcommands share everything but the junction
/// rule check and the output orientation. Ladder configs run at the finest
/// rung — a single trajectory wants resolution, not a convergence study.
fn single_trajectory(cli: &Cli, cfg: &RunConfig, which: Single) -> Result<(), Failure> {
    let spec = cfg.experiment_spec();
    let dx = *cfg.dx.last().expect("dx validated nonempty");
    let net = JunctionNetwork::new(spec.lengths.clone(), spec.far_bc).map_err(Failure::from)?;
    let grid = build_grid(&net, dx).map_err(Failure::from)?;
    let u0 = sample_catalog(&grid, &spec.u0).map_err(Failure::from)?;

    let (traj, x_sign, name) = match (which, &spec.bc) {
        (Single::Solve, BcSpec::Kirchhoff { b }) => {
            let bc = JunctionBC::kirchhoff(*b);
            let t = solve(&grid, &spec.hs, &bc, &u0, spec.t_final, &spec.solve)
                .map_err(Failure::from)?;
            (t, -1.0, "solve.csv")
        }
        (Single::Solve, BcSpec::FluxLimiter { a }) => {
            let bc = JunctionBC::flux_limiter(*a, &spec.hs).map_err(Failure::from)?;
            let t = solve(&grid, &spec.hs, &bc, &u0, spec.t_final, &spec.solve)
                .map_err(Failure::from)?;
            (t, 1.0, "solve.csv")
        }
        (Single::Solve, BcSpec::Viscous { .. }) => {
            return Err(Failure::Config(
                "solve needs bc.kind kirchhoff or fluxlimiter; use the viscous subcommand".into(),
            ))
        }
        (Single::Viscous, BcSpec::Viscous { b, epsilon }) => {
            let vcfg = ViscousConfig {
                epsilon: *epsilon,
                dt_override: None,
                solve: spec.solve.clone(),
            };
            let t = viscous_solve(&grid, &spec.hs, *b, &u0, spec.t_final, &vcfg)
                .map_err(Failure::from)?;
            (t, -1.0, "viscous.csv")
        }
        (Single::Viscous, _) => {
            return Err(Failure::Config("viscous needs bc.kind viscous".into()))
        }
        (Single::FluxLimiter, BcSpec::FluxLimiter { a }) => {
            let bc = JunctionBC::flux_limiter(*a, &spec.hs).map_err(Failure::from)?;
            let t = solve(&grid, &spec.hs, &bc, &u0, spec.t_final, &spec.solve)
                .map_err(Failure::from)?;
            (t, 1.0, "fluxlimiter.csv")
        }
        (Single::FluxLimiter, _) => {
            return Err(Failure::Config("fluxlimiter needs bc.kind fluxlimiter".into()))
        }
    };

    let mut table = trajectory_table(&grid, &traj, x_sign);
    table.echo_spec(&spec);
    write_table(cli, &table, name)?;
    Ok(())
}

fn compare(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.experiment_spec();
    let table = run_comparison(&spec).map_err(Failure::from)?;
    let path = write_table(cli, &table, "compare.csv")?;
    let worst = column_max(&table, "violation")?;
    let tol = cfg.tolerances.comparison;
    if worst > tol {
        return Err(Failure::Numeric(format!(
            "comparison violation {worst:.6e} exceeds tolerance {tol:.1e}; report in {}",
            path.display()
        )));
    }
    status(cli, &format!("worst violation {worst:.6e} within tolerance {tol:.1e}"));
    Ok(())
}

fn wholeline(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.experiment_spec();
    let table = run_wholeline(&spec).map_err(Failure::from)?;
    let path = write_table(cli, &table, "wholeline.csv")?;
    let errors = table.real_column("linf_error").map_err(Failure::from)?;
    let finest = *errors.last().expect("ladder nonempty");
    if let Some(tol) = cfg.tolerances.wholeline {
        if finest > tol {
            return Err(Failure::Numeric(format!(
                "whole-line error {finest:.6e} at the finest dx exceeds tolerance {tol:.1e}; report in {}",
                path.display()
            )));
        }
    }
    status(cli, &format!("finest-grid error {finest:.6e}"));
    Ok(())
}

fn equivalence(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.experiment_spec();
    let table = run_equivalence(&spec).map_err(Failure::from)?;
    let path = write_table(cli, &table, "equivalence.csv")?;
    let dists = table.real_column("sup_distance").map_err(Failure::from)?;
    let finest = *dists.last().expect("ladder nonempty");
    if let Some(tol) = cfg.tolerances.equivalence {
        if finest > tol {
            return Err(Failure::Numeric(format!(
                "equivalence distance {finest:.6e} at the finest dx exceeds tolerance {tol:.1e}; report in {}",
                path.display()
            )));
        }
    }
    status(cli, &format!("finest-grid distance {finest:.6e}"));
    Ok(())
}

fn viscosity(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.experiment_spec();
    let table = run_viscosity(&spec).map_err(Failure::from)?;
    let path = write_table(cli, &table, "viscosity.csv")?;
    // The qualitative claim under test: at fixed dx, shrinking epsilon moves
    // the viscous solution toward the inviscid one. Rows arrive grouped by
    // dx with epsilon decreasing inside each group.
    let eps = table.real_column("epsilon").map_err(Failure::from)?;
    let dxs = table.real_column("dx").map_err(Failure::from)?;
    let dists = table.real_column("sup_distance").map_err(Failure::from)?;
    for i in 1..dists.len() {
        if dxs[i] == dxs[i - 1] && !(dists[i] < dists[i - 1]) {
            return Err(Failure::Numeric(format!(
                "at dx = {}, distance did not decrease from epsilon {} ({:.6e}) to {} ({:.6e}); report in {}",
                dxs[i],
                eps[i - 1],
                dists[i - 1],
                eps[i],
                dists[i],
                path.display()
            )));
        }
    }
    status(cli, &format!("distances decrease with epsilon at every dx ({} rows)", dists.len()));
    Ok(())
}

fn lemma_suite(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let params = GeneratorParams::default();
    let table = run_lemma_suite(&cfg.lemma.seeds, &[cfg.lemma.k], &params).map_err(Failure::from)?;
    let path = write_table(cli, &table, "lemma_suite.csv")?;
    let worst = column_max(&table, "a_minus_b")?;
    let tol = cfg.tolerances.lemma;
    if worst > tol {
        return Err(Failure::Numeric(format!(
            "lemma gap a - b = {worst:.6e} exceeds tolerance {tol:.1e}; report in {}",
            path.display()
        )));
    }
    status(cli, &format!("worst a - b = {worst:.6e} within tolerance {tol:.1e}"));
    Ok(())
}

fn lemma_adversarial(cli: &Cli, cfg: &RunConfig) -> Result<(), Failure> {
    let params = GeneratorParams::default();
    let seed = *cfg.lemma.seeds.first().expect("lemma seeds validated nonempty");
    let table = run_lemma_adversarial(seed, cfg.lemma.k, cfg.lemma.budget, &params)
        .map_err(Failure::from)?;
    let path = write_table(cli, &table, "lemma_adversarial.csv")?;
    let gap = column_max(&table, "gap")?;
    let tol = cfg.tolerances.adversarial;
    if gap > tol {
        return Err(Failure::Numeric(format!(
            "adversarial search found a - b = {gap:.6e} above tolerance {tol:.1e}; report in {}",
            path.display()
        )));
    }
    status(cli, &format!("best adversarial gap {gap:.6e} within tolerance {tol:.1e}"));
    Ok(())
}

fn column_max(table: &ResultTable, name: &str) -> Result<f64, Failure> {
    let col = table.real_column(name).map_err(Failure::from)?;
    Ok(col.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
