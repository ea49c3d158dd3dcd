//! Hamiltonian catalog and the convex flux-limiter algebra.
//!
//! Catalog entries are closed-form in `p` with optional additive time
//! modulation `H(p) + phi(t)`:
//!
//! * `Quadratic { a, b, c }`: `a (p - b)^2 + c`, `a > 0`, convex with
//!   minimizer `p^0 = b`;
//! * `VShape { a, b, c }`: `a |p - b| + c`, `a > 0`, convex with minimizer
//!   `p^0 = b`;
//! * `DoubleWell`: `|p^2 - 1|`, coercive but not convex (two minimizers),
//!   available to exercise the solvers outside the convex theory.
//!
//! For a convex entry `H` with unique minimizer `p^0` the monotone/antitone
//! split is
//!
//! ```text
//! H^-(p) = H(p)    for p <= p^0,    H^-(p) = H(p^0) otherwise   (nonincreasing)
//! H^+(p) = H(p^0)  for p <= p^0,    H^+(p) = H(p)   otherwise   (nondecreasing)
//! ```
//!
//! so `max(H^-, H^+) = H` and `min(H^-, H^+) = H(p^0)` pointwise. The
//! attainable limiter floor over a branch family is
//! `A_0 = max_i min_p H_i(p)`; for `A >= A_0` the slope `p^A_i` is the unique
//! solution of `H_i(p) = A` on the nondecreasing side `p >= p^0_i`, and the
//! Kirchhoff constant equivalent to the `A`-limiter is `B = -sum_i p^A_i`.
//! All of the limiter algebra requires `(p,.)`-only entries: time-modulated
//! entries are rejected.

use crate::error::{HjError, Result};
use crate::scalar::Real;

/// Absolute tolerance on `|H(p^A) - A|` delivered by [`p_a`] (for `f64`).
pub const P_A_VALUE_TOL: f64 = 1e-10;
/// Bracket-width target for [`argmin_convex`] (for `f64`).
pub const ARGMIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Base<T> {
    Quadratic { a: T, b: T, c: T },
    VShape { a: T, b: T, c: T },
    DoubleWell,
}

/// Additive time modulation `phi(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Modulation<T> {
    None,
    /// `amplitude * cos(angular_frequency * t)`
    Cosine { amplitude: T, angular_frequency: T },
}

/// A catalog Hamiltonian `H(p, x, t)`. Entries are `x`-independent; the `x`
/// argument of [`HamiltonianSpec::eval`] exists so solvers can treat all
/// Hamiltonians uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec<T> {
    base: Base<T>,
    modulation: Modulation<T>,
}

impl<T: Real> HamiltonianSpec<T> {
    /// `a (p - b)^2 + c` with `a > 0`.
    pub fn quadratic(a: T, b: T, c: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(HjError::InvalidInput(format!("quadratic needs a > 0, got {a}")));
        }
        Ok(Self { base: Base::Quadratic { a, b, c }, modulation: Modulation::None })
    }

    /// `a |p - b| + c` with `a > 0`.
    pub fn v_shape(a: T, b: T, c: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(HjError::InvalidInput(format!("v-shape needs a > 0, got {a}")));
        }
        Ok(Self { base: Base::VShape { a, b, c }, modulation: Modulation::None })
    }

    /// `|p^2 - 1|` (coercive, not convex).
    pub fn double_well() -> Self {
        Self { base: Base::DoubleWell, modulation: Modulation::None }
    }

    /// Standard quadratic `p^2 / 2`.
    pub fn half_square() -> Self {
        Self::quadratic(T::of(0.5), T::zero(), T::zero()).expect("a > 0")
    }

    /// Add `amplitude * cos(angular_frequency * t)` to the entry.
    pub fn with_cosine_modulation(mut self, amplitude: T, angular_frequency: T) -> Self {
        self.modulation = Modulation::Cosine { amplitude, angular_frequency };
        self
    }

    pub fn eval(&self, p: T, _x: T, t: T) -> T {
        let base = match self.base {
            Base::Quadratic { a, b, c } => a * (p - b) * (p - b) + c,
            Base::VShape { a, b, c } => a * (p - b).abs() + c,
            Base::DoubleWell => (p * p - T::one()).abs(),
        };
        base + match self.modulation {
            Modulation::None => T::zero(),
            Modulation::Cosine { amplitude, angular_frequency } => {
                amplitude * (angular_frequency * t).cos()
            }
        }
    }

    pub fn is_convex_in_p(&self) -> bool {
        !matches!(self.base, Base::DoubleWell)
    }

    pub fn is_time_dependent(&self) -> bool {
        !matches!(self.modulation, Modulation::None)
    }

    /// Unique minimizer in `p`, when one exists.
    pub fn argmin(&self) -> Option<T> {
        match self.base {
            Base::Quadratic { b, .. } | Base::VShape { b, .. } => Some(b),
            Base::DoubleWell => None,
        }
    }

    /// Minimum over `p` of the unmodulated part, when the minimizer is unique.
    pub fn min_value(&self) -> Option<T> {
        match self.base {
            Base::Quadratic { c, .. } | Base::VShape { c, .. } => Some(c),
            Base::DoubleWell => None,
        }
    }

    /// Bound on `|dH/dp|` over the slope interval `[lo, hi]`.
    pub fn lipschitz_p(&self, lo: T, hi: T) -> T {
        debug_assert!(lo <= hi);
        match self.base {
            Base::Quadratic { a, b, .. } => {
                let two = T::of(2.0);
                two * a * (lo - b).abs().max((hi - b).abs())
            }
            Base::VShape { a, .. } => a,
            Base::DoubleWell => T::of(2.0) * lo.abs().max(hi.abs()),
        }
    }

    /// Nondecreasing unbounded `w` with `H(p, x, t) >= w(|p|)` for all inputs.
    pub fn coercivity_witness(&self, s: T) -> T {
        let base = match self.base {
            Base::Quadratic { a, b, c } => {
                let d = (s - b.abs()).max(T::zero());
                a * d * d + c
            }
            Base::VShape { a, b, c } => a * (s - b.abs()).max(T::zero()) + c,
            Base::DoubleWell => (s * s - T::one()).max(T::zero()),
        };
        base - match self.modulation {
            Modulation::None => T::zero(),
            Modulation::Cosine { amplitude, .. } => amplitude.abs(),
        }
    }

    /// The reflected entry `H'(p, x, t) = H(-p, -x, t)`. Involutive.
    pub fn reflect(&self) -> Self {
        let base = match self.base {
            Base::Quadratic { a, b, c } => Base::Quadratic { a, b: -b, c },
            Base::VShape { a, b, c } => Base::VShape { a, b: -b, c },
            Base::DoubleWell => Base::DoubleWell,
        };
        Self { base, modulation: self.modulation }
    }

    /// Legendre transform `L(q) = sup_p (p q - H(p))` for convex,
    /// time-independent entries. `None` where `L` is `+infinity`.
    pub fn legendre(&self, q: T) -> Result<Option<T>> {
        self.require_time_independent("legendre transform")?;
        match self.base {
            Base::Quadratic { a, b, c } => {
                Ok(Some(q * q / (T::of(4.0) * a) + b * q - c))
            }
            Base::VShape { a, b, c } => {
                if q.abs() <= a {
                    Ok(Some(b * q - c))
                } else {
                    Ok(None)
                }
            }
            Base::DoubleWell => Err(HjError::NotConvex(
                "legendre transform needs a convex entry".into(),
            )),
        }
    }

    /// Spot-check of the advertised structure: finite evaluations, midpoint
    /// convexity when claimed, witness below the entry and nondecreasing.
    pub fn validate(&self) -> Result<()> {
        let ps: Vec<T> = (-8..=8).map(|k| T::of(k as f64 * 0.61)).collect();
        for &p in &ps {
            let v = self.eval(p, T::zero(), T::of(0.3));
            if !v.is_finite() {
                return Err(HjError::NonFinite(format!("eval at p = {p}")));
            }
            if self.eval(p, T::zero(), T::zero()) < self.coercivity_witness(p.abs()) - T::of(1e-12) {
                return Err(HjError::InvalidInput("coercivity witness exceeds entry".into()));
            }
        }
        if self.is_convex_in_p() {
            let half = T::of(0.5);
            for w in ps.windows(2) {
                let (p, q) = (w[0], w[1]);
                let mid = self.eval(half * (p + q), T::zero(), T::zero());
                let avg = half * (self.eval(p, T::zero(), T::zero()) + self.eval(q, T::zero(), T::zero()));
                if mid > avg + T::of(1e-10) {
                    return Err(HjError::NotConvex(format!("midpoint check failed at [{p}, {q}]")));
                }
            }
        }
        let mut prev = self.coercivity_witness(T::zero());
        for k in 1..40 {
            let w = self.coercivity_witness(T::of(k as f64));
            if w < prev - T::of(1e-12) {
                return Err(HjError::InvalidInput("coercivity witness not nondecreasing".into()));
            }
            prev = w;
        }
        Ok(())
    }

    fn require_time_independent(&self, what: &str) -> Result<()> {
        if self.is_time_dependent() {
            Err(HjError::TimeDependent(format!("{what} requires an unmodulated entry")))
        } else {
            Ok(())
        }
    }

    fn require_convex_with_argmin(&self, what: &str) -> Result<T> {
        self.require_time_independent(what)?;
        if !self.is_convex_in_p() {
            return Err(HjError::NotConvex(format!("{what} requires a convex entry")));
        }
        self.argmin().ok_or_else(|| {
            HjError::NotConvex(format!("{what} requires a unique minimizer"))
        })
    }
}

/// Monotone/antitone split of a convex, time-independent entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSplit<T> {
    h: HamiltonianSpec<T>,
    p0: T,
    floor: T,
}

impl<T: Real> FluxSplit<T> {
    /// Nonincreasing part `H^-`.
    pub fn minus(&self, p: T) -> T {
        if p <= self.p0 {
            self.h.eval(p, T::zero(), T::zero())
        } else {
            self.floor
        }
    }

    /// Nondecreasing part `H^+`.
    pub fn plus(&self, p: T) -> T {
        if p <= self.p0 {
            self.floor
        } else {
            self.h.eval(p, T::zero(), T::zero())
        }
    }

    /// Minimizer of the underlying entry.
    pub fn p0(&self) -> T {
        self.p0
    }

    /// Minimum value `H(p^0)`.
    pub fn floor(&self) -> T {
        self.floor
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec<T> {
        &self.h
    }
}

/// Split a convex, time-independent entry at its minimizer.
pub fn split_flux_limiter<T: Real>(h: &HamiltonianSpec<T>) -> Result<FluxSplit<T>> {
    let p0 = h.require_convex_with_argmin("flux-limiter split")?;
    let floor = h.eval(p0, T::zero(), T::zero());
    Ok(FluxSplit { h: *h, p0, floor })
}

/// Golden-section argmin of a convex entry over `[lo, hi]`. The minimum must
/// be interior: brackets on which coarse samples are monotone are rejected.
pub fn argmin_convex<T: Real>(h: &HamiltonianSpec<T>, lo: T, hi: T) -> Result<T> {
    h.require_time_independent("argmin_convex")?;
    if !(lo < hi) {
        return Err(HjError::InvalidInput(format!("empty bracket [{lo}, {hi}]")));
    }
    let at = |p: T| h.eval(p, T::zero(), T::zero());
    // Monotone coarse samples mean the minimum sits at an endpoint.
    let samples: Vec<T> = (0..=16)
        .map(|k| lo + (hi - lo) * T::of(k as f64 / 16.0))
        .collect();
    let values: Vec<T> = samples.iter().map(|&p| at(p)).collect();
    let nondecreasing = values.windows(2).all(|w| w[0] <= w[1]);
    let nonincreasing = values.windows(2).all(|w| w[0] >= w[1]);
    if nondecreasing || nonincreasing {
        return Err(HjError::SearchFailure(
            "bracket does not contain an interior minimum (monotone samples)".into(),
        ));
    }

    let inv_phi = T::of(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (at(x1), at(x2));
    let tol = T::of(ARGMIN_TOL) * T::of(0.5);
    for _ in 0..200 {
        if (b - a) <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = at(x2);
        }
    }
    Ok((a + b) * T::of(0.5))
}

/// Attainable limiter floor `A_0 = max_i min_p H_i(p)` of a branch family.
pub fn a_naught<T: Real>(hs: &[HamiltonianSpec<T>]) -> Result<T> {
    if hs.is_empty() {
        return Err(HjError::InvalidInput("empty Hamiltonian family".into()));
    }
    let mut a0 = T::neg_infinity();
    for h in hs {
        let p0 = h.require_convex_with_argmin("a_naught")?;
        a0 = a0.max(h.eval(p0, T::zero(), T::zero()));
    }
    Ok(a0)
}

/// Unique `p >= p^0` with `H(p) = A`, for `A >= H(p^0)`. Bisection after
/// geometric bracket growth; the result satisfies `|H(p) - A| <= 1e-10`
/// (double precision).
pub fn p_a<T: Real>(h: &HamiltonianSpec<T>, a: T) -> Result<T> {
    let p0 = h.require_convex_with_argmin("p_A")?;
    let at = |p: T| h.eval(p, T::zero(), T::zero());
    let floor = at(p0);
    let value_tol = T::of(P_A_VALUE_TOL).max(T::epsilon() * T::of(64.0) * (T::one() + a.abs()));
    if a < floor - value_tol {
        return Err(HjError::InvalidInput(format!(
            "level A = {a} below the minimum {floor}"
        )));
    }
    if a <= floor {
        return Ok(p0);
    }
    // Grow the upper bracket until H(hi) >= A; coercivity guarantees this halts.
    let mut step = T::one().max(p0.abs());
    let mut hi = p0 + step;
    let mut grow = 0;
    while at(hi) < a {
        step = step + step;
        hi = p0 + step;
        grow += 1;
        if grow > 200 {
            return Err(HjError::SearchFailure("p_A bracket growth exhausted".into()));
        }
    }
    let (mut lo_p, mut hi_p) = (p0, hi);
    for _ in 0..200 {
        let mid = (lo_p + hi_p) * T::of(0.5);
        if mid <= lo_p || mid >= hi_p {
            break; // interval at rounding resolution
        }
        if at(mid) < a {
            lo_p = mid;
        } else {
            hi_p = mid;
        }
    }
    // Pick whichever end evaluates closer to the level.
    let p = if (at(lo_p) - a).abs() <= (at(hi_p) - a).abs() { lo_p } else { hi_p };
    if (at(p) - a).abs() > value_tol {
        return Err(HjError::SearchFailure(format!(
            "p_A bisection stalled: |H(p) - A| = {}",
            (at(p) - a).abs()
        )));
    }
    Ok(p)
}

/// Kirchhoff constant equivalent to the `A`-limiter: `B = -sum_i p^A_i`.
pub fn a_to_b<T: Real>(hs: &[HamiltonianSpec<T>], a: T) -> Result<T> {
    let a0 = a_naught(hs)?;
    if a < a0 - T::of(P_A_VALUE_TOL) {
        return Err(HjError::LimiterBelowMinimum(format!("A = {a} < A_0 = {a0}")));
    }
    let mut sum = T::zero();
    for h in hs {
        sum = sum + p_a(h, a)?;
    }
    Ok(-sum)
}
