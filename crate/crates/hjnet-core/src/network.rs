//! Star-network geometry and nodal data.
//!
//! A network is `K` branches of positive length glued at one junction point.
//! Branch coordinates follow the incoming convention: branch `i` occupies
//! `x in [-length_i, 0]` with the junction at `x = 0`, so the node at index
//! `j >= 1` sits at `x = -j * dx`. Grid functions store the (single, shared)
//! junction value separately from the per-branch interior arrays; continuity
//! at the junction is structural, not an equation to enforce.

use crate::error::{HjError, Result};
use crate::scalar::Real;

/// Tolerance for junction continuity of sampled initial data.
pub const JUNCTION_CONTINUITY_TOL: f64 = 1e-12;

/// Treatment of the far (non-junction) endpoint of each branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarBoundary {
    /// Hold the initial value at the last node for all time.
    FrozenDirichlet,
    /// Copy the neighbouring interior value after each step (zero slope).
    ZeroSlopeExtrapolation,
}

/// Star network: branch lengths plus the far-boundary rule.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionNetwork<T> {
    lengths: Vec<T>,
    far_bc: FarBoundary,
}

impl<T: Real> JunctionNetwork<T> {
    /// `lengths` must be nonempty and strictly positive.
    pub fn new(lengths: Vec<T>, far_bc: FarBoundary) -> Result<Self> {
        if lengths.is_empty() {
            return Err(HjError::InvalidInput("network needs at least one branch".into()));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !(l > T::zero()) || !l.is_finite() {
                return Err(HjError::InvalidInput(format!(
                    "branch {} has non-positive length {l}",
                    i + 1
                )));
            }
        }
        Ok(Self { lengths, far_bc })
    }

    pub fn branch_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn far_bc(&self) -> FarBoundary {
        self.far_bc
    }
}

/// Uniform grid over a network: common spacing `dx`, `n_i = round(length_i/dx)`
/// interior nodes per branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    network: JunctionNetwork<T>,
    dx: T,
    counts: Vec<usize>,
}

/// Build a grid. Requires `dx <= min_i length_i / 3` so every branch gets at
/// least three interior nodes (one-sided stencils plus a far-boundary node).
pub fn build_grid<T: Real>(network: &JunctionNetwork<T>, dx: T) -> Result<Grid<T>> {
    if !(dx > T::zero()) || !dx.is_finite() {
        return Err(HjError::InvalidInput(format!("dx must be positive, got {dx}")));
    }
    let min_len = network
        .lengths
        .iter()
        .cloned()
        .fold(T::infinity(), T::min);
    if dx > min_len / T::of(3.0) {
        return Err(HjError::InvalidInput(format!(
            "dx = {dx} exceeds min branch length / 3 = {}",
            min_len / T::of(3.0)
        )));
    }
    let counts: Vec<usize> = network
        .lengths
        .iter()
        .map(|&l| (l / dx).round().to_usize().unwrap_or(0))
        .collect();
    if let Some((i, &n)) = counts.iter().enumerate().find(|&(_, &n)| n < 3) {
        return Err(HjError::InvalidInput(format!(
            "branch {} resolves to only {n} nodes (need >= 3)",
            i + 1
        )));
    }
    Ok(Grid { network: network.clone(), dx, counts })
}

impl<T: Real> Grid<T> {
    pub fn network(&self) -> &JunctionNetwork<T> {
        &self.network
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn branch_count(&self) -> usize {
        self.counts.len()
    }

    /// Interior node counts per branch.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn far_bc(&self) -> FarBoundary {
        self.network.far_bc
    }

    /// Signed coordinate of node `j >= 1` on any branch (incoming convention).
    pub fn coordinate(&self, node: usize) -> T {
        -T::of_usize(node) * self.dx
    }

    /// Total number of stored values (junction + all interior nodes).
    pub fn node_total(&self) -> usize {
        1 + self.counts.iter().sum::<usize>()
    }

    /// A grid function constant everywhere.
    pub fn constant(&self, value: T) -> GridFunction<T> {
        GridFunction {
            junction: value,
            branches: self.counts.iter().map(|&n| vec![value; n]).collect(),
        }
    }
}

/// Nodal data on a [`Grid`]: one junction value plus per-branch arrays ordered
/// nearest-junction first. The junction value is shared by all branches.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub junction: T,
    pub branches: Vec<Vec<T>>,
}

impl<T: Real> GridFunction<T> {
    /// Shape check against a grid.
    pub fn matches(&self, grid: &Grid<T>) -> bool {
        self.branches.len() == grid.counts.len()
            && self
                .branches
                .iter()
                .zip(grid.counts.iter())
                .all(|(b, &n)| b.len() == n)
    }

    /// Shape check against another function.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.branches.len() == other.branches.len()
            && self
                .branches
                .iter()
                .zip(other.branches.iter())
                .all(|(a, b)| a.len() == b.len())
    }

    /// Values adjacent to the junction, one per branch.
    pub fn first_interior(&self) -> Vec<T> {
        self.branches.iter().map(|b| b[0]).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.junction.is_finite()
            && self.branches.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// Map every stored value (junction included).
    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        GridFunction {
            junction: f(self.junction),
            branches: self
                .branches
                .iter()
                .map(|b| b.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    /// Largest one-sided difference quotient magnitude between adjacent nodes,
    /// junction-to-first-node quotients included.
    pub fn discrete_lipschitz(&self, dx: T) -> T {
        let mut lip = T::zero();
        for b in &self.branches {
            let mut prev = self.junction;
            for &v in b {
                lip = lip.max(((v - prev) / dx).abs());
                prev = v;
            }
        }
        lip
    }
}

/// Sample per-branch initial data onto a grid. `data[i]` is evaluated at the
/// signed coordinates `-j*dx` of branch `i`; the branch values at `x = 0` must
/// agree across branches to within [`JUNCTION_CONTINUITY_TOL`] and the first
/// branch's value is stored at the junction.
pub fn sample_initial<T: Real, F: Fn(T) -> T>(grid: &Grid<T>, data: &[F]) -> Result<GridFunction<T>> {
    if data.len() != grid.branch_count() {
        return Err(HjError::InvalidInput(format!(
            "{} branch profiles supplied for {} branches",
            data.len(),
            grid.branch_count()
        )));
    }
    let at_junction = data[0](T::zero());
    let tol = T::of(JUNCTION_CONTINUITY_TOL);
    for (i, f) in data.iter().enumerate() {
        let v = f(T::zero());
        if (v - at_junction).abs() > tol {
            return Err(HjError::InvalidInput(format!(
                "initial data discontinuous at junction: branch 1 gives {at_junction}, branch {} gives {v}",
                i + 1
            )));
        }
    }
    let branches: Vec<Vec<T>> = data
        .iter()
        .zip(grid.counts.iter())
        .map(|(f, &n)| (1..=n).map(|j| f(grid.coordinate(j))).collect())
        .collect();
    let out = GridFunction { junction: at_junction, branches };
    if !out.all_finite() {
        return Err(HjError::NonFinite("sampled initial data".into()));
    }
    Ok(out)
}

/// Sup-norm distance between two functions on the same grid shape.
pub fn sup_distance<T: Real>(u: &GridFunction<T>, v: &GridFunction<T>) -> Result<T> {
    if !u.same_shape(v) {
        return Err(HjError::GridMismatch(
            "sup_distance requires identical branch shapes".into(),
        ));
    }
    let mut d = (u.junction - v.junction).abs();
    for (a, b) in u.branches.iter().zip(v.branches.iter()) {
        for (&x, &y) in a.iter().zip(b.iter()) {
            d = d.max((x - y).abs());
        }
    }
    Ok(d)
}
