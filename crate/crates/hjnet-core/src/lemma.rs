//! Computational check of the junction comparison lemma: given continuous
//! coercive `H_1..H_K`, slope vectors `p >= q`, and levels `a`, `b` with
//!
//! (i)   `p_i >= q_i`, `a + H_i(p_i) <= 0 <= b + H_i(q_i)`,
//! (ii)  `min(sum p'_i, min_i(a + H_i(p'_i))) <= 0` for all `p' <= p`,
//! (iii) `max(sum q'_i, max_i(b + H_i(q'_i))) >= 0` for all `q' >= q`,
//!
//! the conclusion is `a <= b`. Conditions (ii)/(iii) quantify over unbounded
//! sets; checking is made finite by the following reduction, which this
//! module both uses and puts under test.
//!
//! A violation of (ii) is a tuple `p' <= p` with `sum p' > 0` *and* every
//! `a + H_i(p'_i) > 0`. From `sum p' > 0` and `p'_j <= p_j` for `j != i`,
//!
//! ```text
//!   p'_i > -sum_{j != i} p'_j >= -sum_{j != i} p_j,
//! ```
//!
//! so every violating tuple lies in the compact box
//! `prod_i (-sum_{j != i} p_j, p_i]`. When some factor is empty (equivalent
//! to `sum p <= 0`, which empties all of them), (ii) holds vacuously.
//! Dually, a violation of (iii) lies in `prod_i [q_i, -sum_{j != i} q_j)`.
//! Outside these boxes the conditions hold automatically, so dense sampling
//! of the closed box hull decides (ii)/(iii) up to sampling resolution —
//! the only approximation in the checker, calibrated by the wide-box
//! soundness test.

use crate::error::{HjError, Result};
use crate::hamiltonians::HamiltonianSpec;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default per-axis sampling density for small branch counts.
pub const DENSITY_SMALL_K: usize = 101;
/// Default per-axis sampling density for `K <= 6`.
pub const DENSITY_LARGE_K: usize = 21;

pub fn default_density(k: usize) -> usize {
    if k <= 3 {
        DENSITY_SMALL_K
    } else {
        DENSITY_LARGE_K
    }
}

/// One lemma instance. Hamiltonians are read as functions of `p` alone
/// (evaluated at `x = 0`, `t = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaInstance<T> {
    pub hs: Vec<HamiltonianSpec<T>>,
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub a: T,
    pub b: T,
}

impl<T: Real> LemmaInstance<T> {
    pub fn new(hs: Vec<HamiltonianSpec<T>>, p: Vec<T>, q: Vec<T>, a: T, b: T) -> Result<Self> {
        let k = hs.len();
        if k == 0 || p.len() != k || q.len() != k {
            return Err(HjError::InvalidInput(format!(
                "need K >= 1 matching lengths, got {k} Hamiltonians, {} p, {} q",
                p.len(),
                q.len()
            )));
        }
        if !(p.iter().all(|v| v.is_finite())
            && q.iter().all(|v| v.is_finite())
            && a.is_finite()
            && b.is_finite())
        {
            return Err(HjError::NonFinite("lemma instance".into()));
        }
        Ok(LemmaInstance { hs, p, q, a, b })
    }

    pub fn k(&self) -> usize {
        self.hs.len()
    }

    pub fn h_value(&self, i: usize, p: T) -> T {
        self.hs[i].eval(p, T::zero(), T::zero())
    }
}

/// A per-branch search interval; `lo >= hi` encodes the empty set (the
/// underlying intervals are half-open, `(lo, hi]` on the sub side and
/// `[lo, hi)` on the super side; sampling uses the closed hull, which is
/// sound because the excluded endpoint tuples satisfy the condition
/// automatically).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> BoxInterval<T> {
    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationBoxes<T> {
    /// Per-branch intervals `(-sum_{j != i} p_j, p_i]` for condition (ii).
    pub sub: Vec<BoxInterval<T>>,
    /// Per-branch intervals `[q_i, -sum_{j != i} q_j)` for condition (iii).
    pub sup: Vec<BoxInterval<T>>,
}

impl<T: Real> ViolationBoxes<T> {
    pub fn sub_is_empty(&self) -> bool {
        self.sub.iter().any(BoxInterval::is_empty)
    }

    pub fn sup_is_empty(&self) -> bool {
        self.sup.iter().any(BoxInterval::is_empty)
    }
}

/// Compact regions that contain every possible violation of (ii) / (iii);
/// derivation in the module docs.
pub fn violation_box<T: Real>(inst: &LemmaInstance<T>) -> ViolationBoxes<T> {
    let sum_p: T = inst.p.iter().cloned().sum();
    let sum_q: T = inst.q.iter().cloned().sum();
    let sub = inst
        .p
        .iter()
        .map(|&pi| BoxInterval { lo: -(sum_p - pi), hi: pi })
        .collect();
    let sup = inst
        .q
        .iter()
        .map(|&qi| BoxInterval { lo: qi, hi: -(sum_q - qi) })
        .collect();
    ViolationBoxes { sub, sup }
}

/// Outcome of checking (i)-(iii) on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport<T> {
    pub cond_i_ok: bool,
    /// Largest of `q_i - p_i`, `a + H_i(p_i)`, `-(b + H_i(q_i))`; condition
    /// (i) holds iff this is `<= tol`.
    pub cond_i_margin: T,
    pub cond_ii_ok: bool,
    /// Worst sampled `(value, tuple)` with `value = min(sum p', min_i(a +
    /// H_i(p'_i)))`; `None` when the box is empty (vacuous condition).
    pub cond_ii_worst: Option<(T, Vec<T>)>,
    pub cond_iii_ok: bool,
    pub cond_iii_worst: Option<(T, Vec<T>)>,
    pub boxes: ViolationBoxes<T>,
    pub density: usize,
    pub tol: T,
}

impl<T: Real> HypothesisReport<T> {
    pub fn all_ok(&self) -> bool {
        self.cond_i_ok && self.cond_ii_ok && self.cond_iii_ok
    }
}

/// Scan a product of closed intervals for the extremal value of the (ii) or
/// (iii) form. `maximize = true` returns the max of `min(sum, min_i f_i)`
/// (sub side); `false` the min of `max(sum, max_i f_i)` (super side).
/// Per-axis values are precomputed and the scan recurses with running
/// partial sums, so the cost is `O(density^K)` with tiny per-leaf work.
fn scan_box<T: Real>(
    points: &[Vec<T>],
    values: &[Vec<T>],
    maximize: bool,
) -> (T, Vec<T>) {
    let k = points.len();
    let mut idx = vec![0usize; k];
    let mut best_idx = vec![0usize; k];
    let mut best = if maximize { T::neg_infinity() } else { T::infinity() };

    fn rec<T: Real>(
        level: usize,
        sum: T,
        inner: T,
        points: &[Vec<T>],
        values: &[Vec<T>],
        maximize: bool,
        idx: &mut [usize],
        best: &mut T,
        best_idx: &mut [usize],
    ) {
        if level == points.len() {
            let v = if maximize { sum.min(inner) } else { sum.max(inner) };
            if (maximize && v > *best) || (!maximize && v < *best) {
                *best = v;
                best_idx.copy_from_slice(idx);
            }
            return;
        }
        for (j, (&pt, &val)) in points[level].iter().zip(values[level].iter()).enumerate() {
            idx[level] = j;
            let inner2 = if maximize { inner.min(val) } else { inner.max(val) };
            rec(level + 1, sum + pt, inner2, points, values, maximize, idx, best, best_idx);
        }
    }

    let start_inner = if maximize { T::infinity() } else { T::neg_infinity() };
    rec(
        0,
        T::zero(),
        start_inner,
        points,
        values,
        maximize,
        &mut idx,
        &mut best,
        &mut best_idx,
    );
    let tuple = best_idx
        .iter()
        .enumerate()
        .map(|(i, &j)| points[i][j])
        .collect();
    (best, tuple)
}

fn axis_points<T: Real>(lo: T, hi: T, density: usize) -> Vec<T> {
    if !(lo < hi) {
        return vec![lo];
    }
    (0..density)
        .map(|s| lo + (hi - lo) * T::of(s as f64 / (density - 1) as f64))
        .collect()
}

/// Check (i) directly and (ii)/(iii) by dense sampling of the violation
/// boxes. `density >= 11` points per axis.
pub fn check_hypotheses<T: Real>(
    inst: &LemmaInstance<T>,
    density: usize,
    tol: T,
) -> Result<HypothesisReport<T>> {
    if density < 11 {
        return Err(HjError::InvalidInput(format!("density {density} < 11")));
    }
    let k = inst.k();
    if (density as u128).pow(k as u32) > 200_000_000 {
        return Err(HjError::InvalidInput(format!(
            "density {density} with K = {k} is too large to scan"
        )));
    }

    let mut cond_i_margin = T::neg_infinity();
    for i in 0..k {
        cond_i_margin = cond_i_margin
            .max(inst.q[i] - inst.p[i])
            .max(inst.a + inst.h_value(i, inst.p[i]))
            .max(-(inst.b + inst.h_value(i, inst.q[i])));
    }
    let cond_i_ok = cond_i_margin <= tol;

    let boxes = violation_box(inst);

    let cond_ii_worst = if boxes.sub_is_empty() {
        None
    } else {
        let points: Vec<Vec<T>> = boxes
            .sub
            .iter()
            .map(|iv| axis_points(iv.lo, iv.hi, density))
            .collect();
        let values: Vec<Vec<T>> = points
            .iter()
            .enumerate()
            .map(|(i, pts)| pts.iter().map(|&p| inst.a + inst.h_value(i, p)).collect())
            .collect();
        Some(scan_box(&points, &values, true))
    };
    let cond_ii_ok = match &cond_ii_worst {
        None => true,
        Some((worst, _)) => *worst <= tol,
    };

    let cond_iii_worst = if boxes.sup_is_empty() {
        None
    } else {
        let points: Vec<Vec<T>> = boxes
            .sup
            .iter()
            .map(|iv| axis_points(iv.lo, iv.hi, density))
            .collect();
        let values: Vec<Vec<T>> = points
            .iter()
            .enumerate()
            .map(|(i, pts)| pts.iter().map(|&p| inst.b + inst.h_value(i, p)).collect())
            .collect();
        Some(scan_box(&points, &values, false))
    };
    let cond_iii_ok = match &cond_iii_worst {
        None => true,
        Some((worst, _)) => *worst >= -tol,
    };

    Ok(HypothesisReport {
        cond_i_ok,
        cond_i_margin,
        cond_ii_ok,
        cond_ii_worst,
        cond_iii_ok,
        cond_iii_worst,
        boxes,
        density,
        tol,
    })
}

/// The lemma's conclusion, read off literally.
pub fn conclusion_holds<T: Real>(inst: &LemmaInstance<T>) -> bool {
    inst.a <= inst.b
}

/// Parameter ranges for the random quadratic catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub curvature: (f64, f64),
    pub vertex: (f64, f64),
    pub offset: (f64, f64),
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams { curvature: (0.5, 2.0), vertex: (-1.0, 1.0), offset: (-1.0, 1.0) }
    }
}

const GENERATOR_REJECTION_CAP: usize = 1000;

fn draw_candidate<T: Real, R: Rng>(
    rng: &mut R,
    k: usize,
    params: &GeneratorParams,
) -> Result<LemmaInstance<T>> {
    let hs: Vec<HamiltonianSpec<T>> = (0..k)
        .map(|_| {
            HamiltonianSpec::quadratic(
                T::of(rng.gen_range(params.curvature.0..=params.curvature.1)),
                T::of(rng.gen_range(params.vertex.0..=params.vertex.1)),
                T::of(rng.gen_range(params.offset.0..=params.offset.1)),
            )
        })
        .collect::<Result<_>>()?;
    // Level a below every branch minimum, so each sublevel set is a proper
    // interval around the vertex.
    let max_c = hs
        .iter()
        .map(|h| h.min_value().expect("quadratic minimum"))
        .fold(T::neg_infinity(), T::max);
    let a = -(max_c + T::of(rng.gen_range(0.1..1.0)));
    // p_i on the decreasing side of {H_i <= -a}: reflect the right sublevel
    // boundary (found by the level-set solver) through the vertex.
    let p: Vec<T> = hs
        .iter()
        .map(|h| {
            let vertex = crate::hamiltonians::argmin_convex(h, T::of(-50.0), T::of(50.0))?;
            let right = crate::hamiltonians::p_a(h, -a)?;
            let halfwidth = right - vertex;
            Ok(vertex - halfwidth * T::of(rng.gen_range(0.0..=1.0)))
        })
        .collect::<Result<_>>()?;
    let q: Vec<T> = p.iter().map(|&pi| pi - T::of(rng.gen_range(0.0..1.0))).collect();
    let min_hq = (0..k)
        .map(|i| hs[i].eval(q[i], T::zero(), T::zero()))
        .fold(T::infinity(), T::min);
    let b = -min_hq + T::of(rng.gen_range(0.0..0.5));
    LemmaInstance::new(hs, p, q, a, b)
}

/// Draw a hypothesis-satisfying instance: random quadratics, level `a` below
/// every minimum, `p_i` on the decreasing side with `sum p <= 0` (making (ii)
/// vacuous), `q <= p`, and `b >= -min_i H_i(q_i)`. Every candidate is
/// re-verified with [`check_hypotheses`] and rejected on failure; errors
/// after 1000 rejections.
pub fn random_satisfying_instance<T: Real>(
    seed: u64,
    k: usize,
    params: &GeneratorParams,
) -> Result<LemmaInstance<T>> {
    if k == 0 {
        return Err(HjError::InvalidInput("K must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = T::of(1e-9);
    let density = default_density(k);
    for _ in 0..GENERATOR_REJECTION_CAP {
        let inst = draw_candidate::<T, _>(&mut rng, k, params)?;
        let sum_p: T = inst.p.iter().cloned().sum();
        if sum_p > T::zero() {
            continue;
        }
        if check_hypotheses(&inst, density, tol)?.all_ok() {
            return Ok(inst);
        }
    }
    Err(HjError::GeneratorFailure(format!(
        "no hypothesis-satisfying instance in {GENERATOR_REJECTION_CAP} draws (K = {k}, {params:?})"
    )))
}

/// Best falsification candidate found by [`adversarial_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T> {
    pub instance: LemmaInstance<T>,
    pub report: HypothesisReport<T>,
    /// `a - b` of the best hypothesis-satisfying candidate; the lemma says
    /// this can never exceed 0 (up to checker slack).
    pub gap: T,
}

/// Try to falsify the lemma: random restarts plus coordinate-wise hill
/// climbing on `(a, b, p, q)` maximizing `a - b` subject to
/// [`check_hypotheses`] passing at full density. `budget` counts hypothesis
/// checks. Returns the best candidate found (expected: gap `<= 0` always).
pub fn adversarial_search<T: Real>(
    seed: u64,
    k: usize,
    budget: usize,
    params: &GeneratorParams,
) -> Result<SearchOutcome<T>> {
    if budget == 0 {
        return Err(HjError::InvalidInput("budget must be >= 1".into()));
    }
    if k == 0 {
        return Err(HjError::InvalidInput("K must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = default_density(k);
    let tol = T::of(1e-9);
    let mut checks = 0usize;
    let mut best: Option<SearchOutcome<T>> = None;

    let consider = |inst: &LemmaInstance<T>,
                        checks: &mut usize,
                        best: &mut Option<SearchOutcome<T>>|
     -> Result<bool> {
        *checks += 1;
        let report = check_hypotheses(inst, density, tol)?;
        if !report.all_ok() {
            return Ok(false);
        }
        let gap = inst.a - inst.b;
        let improved = match best {
            None => true,
            Some(cur) => gap > cur.gap,
        };
        if improved {
            *best = Some(SearchOutcome { instance: inst.clone(), report, gap });
        }
        Ok(improved)
    };

    while checks < budget {
        // Restart from a fresh satisfying draw (counts one check).
        let inst = draw_candidate::<T, _>(&mut rng, k, params)?;
        checks += 1;
        let report = check_hypotheses(&inst, density, tol)?;
        let mut current = if report.all_ok() {
            let gap = inst.a - inst.b;
            let better = best.as_ref().map_or(true, |cur| gap > cur.gap);
            if better {
                best = Some(SearchOutcome { instance: inst.clone(), report, gap });
            }
            inst
        } else {
            continue;
        };

        // Hill climb: raise a, lower b, nudge p and q.
        let mut step = T::of(0.25);
        let mut stale = 0usize;
        while checks < budget && stale < 12 {
            let mut trial = current.clone();
            match rng.gen_range(0..4u8) {
                0 => trial.a = trial.a + step,
                1 => trial.b = trial.b - step,
                2 => {
                    let i = rng.gen_range(0..k);
                    let delta = step * T::of(rng.gen_range(-1.0..=1.0));
                    trial.p[i] = trial.p[i] + delta;
                }
                _ => {
                    let i = rng.gen_range(0..k);
                    let delta = step * T::of(rng.gen_range(-1.0..=1.0));
                    trial.q[i] = trial.q[i] + delta;
                }
            }
            let improved_now = trial.a - trial.b
                > best.as_ref().map_or(T::neg_infinity(), |cur| cur.gap);
            if consider(&trial, &mut checks, &mut best)? && improved_now {
                current = trial;
                stale = 0;
            } else {
                stale += 1;
                if stale % 4 == 0 {
                    step = step * T::of(0.5);
                }
            }
        }
    }

    best.ok_or_else(|| {
        HjError::SearchFailure(format!(
            "no hypothesis-satisfying candidate within budget {budget} (K = {k})"
        ))
    })
}
