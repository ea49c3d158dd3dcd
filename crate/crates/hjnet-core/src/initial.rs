//! Initial-data catalog. Entries are functions of the distance `r >= 0` from
//! the junction, so the same description works in both branch orientations
//! (node `j` sits at distance `j dx` either way).

use crate::error::{HjError, Result};
use crate::network::{sample_initial, Grid, GridFunction};
use crate::scalar::Real;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData<T> {
    Zero,
    Constant(T),
    /// `u0 = r`, i.e. `|x|` in junction coordinates.
    Abs,
    /// `u0 = slope * r`.
    Linear { slope: T },
    /// Compactly supported `C^1` bump
    /// `amplitude * cos^2(pi (r - center) / (2 width))` on
    /// `|r - center| < width`, zero outside.
    Bump { amplitude: T, center: T, width: T },
}

impl<T: Real> InitialData<T> {
    pub fn bump(amplitude: T, center: T, width: T) -> Result<Self> {
        if !(width > T::zero()) || !amplitude.is_finite() || !(center >= T::zero()) {
            return Err(HjError::InvalidInput(format!(
                "bad bump: amplitude {amplitude}, center {center}, width {width}"
            )));
        }
        Ok(InitialData::Bump { amplitude, center, width })
    }

    pub fn eval_at_distance(&self, r: T) -> T {
        match *self {
            InitialData::Zero => T::zero(),
            InitialData::Constant(c) => c,
            InitialData::Abs => r,
            InitialData::Linear { slope } => slope * r,
            InitialData::Bump { amplitude, center, width } => {
                let s = (r - center) / width;
                if s.abs() < T::one() {
                    let c = (T::of(std::f64::consts::FRAC_PI_2) * s).cos();
                    amplitude * c * c
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Lipschitz bound of the entry (in `r`, hence also in `x`).
    pub fn lipschitz_bound(&self) -> T {
        match *self {
            InitialData::Zero | InitialData::Constant(_) => T::zero(),
            InitialData::Abs => T::one(),
            InitialData::Linear { slope } => slope.abs(),
            InitialData::Bump { amplitude, width, .. } => {
                // |d/dr amplitude cos^2(pi s / 2)| = |amplitude| pi/(2 width) |sin(pi s)|
                amplitude.abs() * T::of(std::f64::consts::FRAC_PI_2) / width
            }
        }
    }
}

/// Sample one catalog entry per branch onto the grid. Junction continuity is
/// checked by the sampler, so e.g. differing constants are rejected.
pub fn sample_catalog<T: Real>(grid: &Grid<T>, data: &[InitialData<T>]) -> Result<GridFunction<T>> {
    if data.len() != grid.branch_count() {
        return Err(HjError::InvalidInput(format!(
            "{} initial entries for {} branches",
            data.len(),
            grid.branch_count()
        )));
    }
    let closures: Vec<Box<dyn Fn(T) -> T>> = data
        .iter()
        .map(|d| {
            let d = *d;
            Box::new(move |x: T| d.eval_at_distance(-x)) as Box<dyn Fn(T) -> T>
        })
        .collect();
    sample_initial(grid, &closures)
}

/// Random nonnegative bump vanishing at both the junction and the far end of
/// a branch of the given length; used to build ordered comparison pairs.
pub fn random_interior_bump<T: Real, R: Rng>(rng: &mut R, length: T) -> InitialData<T> {
    let l = length.as_f64();
    let width = l * rng.gen_range(0.1..0.25);
    let center = rng.gen_range(width..l - width);
    let amplitude = rng.gen_range(0.05..0.6);
    InitialData::Bump {
        amplitude: T::of(amplitude),
        center: T::of(center),
        width: T::of(width),
    }
}
