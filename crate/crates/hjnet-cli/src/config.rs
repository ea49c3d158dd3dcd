//! Config parsing: JSON in, a fully validated [`RunConfig`] out, or a list of
//! errors each naming the offending key path. Strict mode (the default)
//! rejects unknown keys — a typo that silently falls back to a default is how
//! numeric experiments go wrong without anyone noticing.

use hjnet_core::evolve::SolveConfig;
use hjnet_core::experiments::{BcSpec, ExperimentSpec};
use hjnet_core::fluxes::FluxKind;
use hjnet_core::hamiltonians::{a_naught, HamiltonianSpec, P_A_VALUE_TOL};
use hjnet_core::initial::InitialData;
use hjnet_core::network::FarBoundary;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Not JSON at all.
    Syntax(String),
    /// Structurally JSON but invalid; every error carries its key path.
    Invalid(Vec<String>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Syntax(m) => write!(f, "config is not valid JSON: {m}"),
            ConfigError::Invalid(errs) => {
                writeln!(f, "config has {} error(s):", errs.len())?;
                for e in errs {
                    writeln!(f, "  {e}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianKind {
    Quadratic { a: f64, b: f64, c: f64 },
    VShape { a: f64, b: f64, c: f64 },
    HalfSquare,
    DoubleWell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianConfig {
    pub kind: HamiltonianKind,
    /// `amplitude * cos(angular_frequency * t)` added to the entry.
    pub modulation: Option<(f64, f64)>,
}

impl HamiltonianConfig {
    pub fn build(&self) -> HamiltonianSpec<f64> {
        let base = match self.kind {
            HamiltonianKind::Quadratic { a, b, c } => {
                HamiltonianSpec::quadratic(a, b, c).expect("validated at parse")
            }
            HamiltonianKind::VShape { a, b, c } => {
                HamiltonianSpec::v_shape(a, b, c).expect("validated at parse")
            }
            HamiltonianKind::HalfSquare => HamiltonianSpec::half_square(),
            HamiltonianKind::DoubleWell => HamiltonianSpec::double_well(),
        };
        match self.modulation {
            Some((amp, freq)) => base.with_cosine_modulation(amp, freq),
            None => base,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialConfig {
    Zero,
    Abs,
    Constant { value: f64 },
    Linear { slope: f64 },
    Bump { amplitude: f64, center: f64, width: f64 },
}

impl InitialConfig {
    pub fn build(&self) -> InitialData<f64> {
        match *self {
            InitialConfig::Zero => InitialData::Zero,
            InitialConfig::Abs => InitialData::Abs,
            InitialConfig::Constant { value } => InitialData::Constant(value),
            InitialConfig::Linear { slope } => InitialData::Linear { slope },
            InitialConfig::Bump { amplitude, center, width } => {
                InitialData::bump(amplitude, center, width).expect("validated at parse")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcConfig {
    Kirchhoff { b: f64 },
    FluxLimiter { a: f64 },
    Viscous { b: f64, epsilon: f64 },
}

impl BcConfig {
    pub fn build(&self) -> BcSpec<f64> {
        match *self {
            BcConfig::Kirchhoff { b } => BcSpec::Kirchhoff { b },
            BcConfig::FluxLimiter { a } => BcSpec::FluxLimiter { a },
            BcConfig::Viscous { b, epsilon } => BcSpec::Viscous { b, epsilon },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaConfig {
    pub k: usize,
    pub seeds: Vec<u64>,
    pub budget: usize,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { k: 2, seeds: (0..10).collect(), budget: 200 }
    }
}

/// Pass/fail thresholds the dispatch layer enforces; `None` means "report,
/// don't judge" where a defaultless judgment would be arbitrary.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub comparison: f64,
    pub lemma: f64,
    pub adversarial: f64,
    pub wholeline: Option<f64>,
    pub equivalence: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            comparison: 1e-10,
            lemma: 1e-9,
            adversarial: 1e-6,
            wholeline: None,
            equivalence: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lengths: Vec<f64>,
    pub far_bc: FarBoundary,
    pub hamiltonians: Vec<HamiltonianConfig>,
    pub bc: BcConfig,
    pub initial: Vec<InitialConfig>,
    pub t_final: f64,
    pub dx: Vec<f64>,
    pub flux: FluxKind,
    pub cfl: f64,
    pub snapshot_stride: usize,
    pub slope_margin: f64,
    pub alpha_override: Option<f64>,
    pub seeds: Vec<u64>,
    pub epsilons: Vec<f64>,
    pub measure_radius: Option<f64>,
    pub lemma: LemmaConfig,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn branch_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn solve_config(&self) -> SolveConfig<f64> {
        SolveConfig {
            flux: self.flux,
            cfl: self.cfl,
            snapshot_stride: self.snapshot_stride,
            slope_margin: self.slope_margin,
            alpha_override: self.alpha_override,
        }
    }

    /// The experiment spec the drivers consume. Single-entry `hamiltonians` /
    /// `initial` lists are broadcast across branches (checked at parse).
    pub fn experiment_spec(&self) -> ExperimentSpec<f64> {
        let k = self.branch_count();
        let broadcast = |n: usize| -> Vec<usize> {
            if n == 1 {
                vec![0; k]
            } else {
                (0..n).collect()
            }
        };
        let hs: Vec<_> =
            broadcast(self.hamiltonians.len()).iter().map(|&i| self.hamiltonians[i].build()).collect();
        let u0: Vec<_> =
            broadcast(self.initial.len()).iter().map(|&i| self.initial[i].build()).collect();
        ExperimentSpec {
            lengths: self.lengths.clone(),
            far_bc: self.far_bc,
            hs,
            bc: self.bc.build(),
            u0,
            t_final: self.t_final,
            dx_ladder: self.dx.clone(),
            seeds: self.seeds.clone(),
            solve: self.solve_config(),
            epsilons: self.epsilons.clone(),
            measure_radius: self.measure_radius,
        }
    }
}

/// Collects every problem instead of stopping at the first; paths are
/// dotted (`bc.B`) with `[i]` for list elements.
struct Walker {
    strict: bool,
    errors: Vec<String>,
}

impl Walker {
    fn err(&mut self, path: &str, msg: impl AsRef<str>) {
        self.errors.push(format!("{path}: {}", msg.as_ref()));
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        match v.as_object() {
            Some(m) => Some(m),
            None => {
                self.err(path, "expected an object");
                None
            }
        }
    }

    /// Flag unknown keys under `path` (strict mode only).
    fn check_keys(&mut self, map: &Map<String, Value>, path: &str, known: &[&str]) {
        if !self.strict {
            return;
        }
        for key in map.keys() {
            if !known.contains(&key.as_str()) {
                let full = join(path, key);
                self.err(&full, "unknown key");
            }
        }
    }

    fn f64_field(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> Option<f64> {
        let full = join(path, key);
        match map.get(key) {
            None => {
                self.err(&full, "missing required key");
                None
            }
            Some(v) => self.f64_value(v, &full),
        }
    }

    fn f64_value(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            Some(_) => {
                self.err(path, "must be finite");
                None
            }
            None => {
                self.err(path, "expected a number");
                None
            }
        }
    }

    fn f64_opt(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> Option<f64> {
        match map.get(key) {
            None | Some(Value::Null) => None,
            Some(v) => self.f64_value(v, &join(path, key)),
        }
    }

    fn usize_opt(
        &mut self,
        map: &Map<String, Value>,
        path: &str,
        key: &str,
        default: usize,
    ) -> usize {
        let full = join(path, key);
        match map.get(key) {
            None | Some(Value::Null) => default,
            Some(v) => match v.as_u64() {
                Some(x) => x as usize,
                None => {
                    self.err(&full, "expected a nonnegative integer");
                    default
                }
            },
        }
    }

    fn str_field<'v>(
        &mut self,
        map: &'v Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<&'v str> {
        let full = join(path, key);
        match map.get(key) {
            None => {
                self.err(&full, "missing required key");
                None
            }
            Some(v) => match v.as_str() {
                Some(s) => Some(s),
                None => {
                    self.err(&full, "expected a string");
                    None
                }
            },
        }
    }

    fn f64_list(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> Option<Vec<f64>> {
        let full = join(path, key);
        let arr = match map.get(key) {
            None => {
                self.err(&full, "missing required key");
                return None;
            }
            Some(v) => match v.as_array() {
                Some(a) => a,
                None => {
                    self.err(&full, "expected a list of numbers");
                    return None;
                }
            },
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, v) in arr.iter().enumerate() {
            out.push(self.f64_value(v, &format!("{full}[{i}]"))?);
        }
        Some(out)
    }

    fn u64_list_opt(
        &mut self,
        map: &Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<Vec<u64>> {
        let full = join(path, key);
        let arr = match map.get(key) {
            None | Some(Value::Null) => return None,
            Some(v) => match v.as_array() {
                Some(a) => a,
                None => {
                    self.err(&full, "expected a list of nonnegative integers");
                    return None;
                }
            },
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, v) in arr.iter().enumerate() {
            match v.as_u64() {
                Some(x) => out.push(x),
                None => {
                    self.err(&format!("{full}[{i}]"), "expected a nonnegative integer");
                    return None;
                }
            }
        }
        Some(out)
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

const TOP_KEYS: &[&str] = &[
    "network",
    "hamiltonians",
    "bc",
    "initial",
    "t_final",
    "dx",
    "flux",
    "cfl",
    "snapshot_stride",
    "slope_margin",
    "alpha_override",
    "seeds",
    "epsilons",
    "measure_radius",
    "lemma",
    "tolerances",
];

pub fn parse_config(text: &str, strict: bool) -> Result<RunConfig, ConfigError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut w = Walker { strict, errors: Vec::new() };

    let cfg = parse_root(&mut w, &root);
    match cfg {
        Some(cfg) if w.errors.is_empty() => Ok(cfg),
        _ => {
            if w.errors.is_empty() {
                w.errors.push("config invalid".into());
            }
            Err(ConfigError::Invalid(w.errors))
        }
    }
}

fn parse_root(w: &mut Walker, root: &Value) -> Option<RunConfig> {
    let map = w.object(root, "<root>")?;
    w.check_keys(map, "", TOP_KEYS);

    // network { lengths, far_bc }
    let (lengths, far_bc) = match map.get("network") {
        None => {
            w.err("network", "missing required key");
            (None, FarBoundary::FrozenDirichlet)
        }
        Some(v) => parse_network(w, v),
    };

    let hamiltonians = parse_hamiltonians(w, map.get("hamiltonians"));
    let bc = parse_bc(w, map.get("bc"));
    let initial = parse_initial(w, map.get("initial"));

    let t_final = w.f64_field(map, "", "t_final");
    if let Some(t) = t_final {
        if !(t > 0.0) {
            w.err("t_final", format!("must be positive, got {t}"));
        }
    }

    let dx = parse_dx(w, map);
    let flux = parse_flux(w, map);
    let cfl = match w.f64_opt(map, "", "cfl") {
        None => 0.45,
        Some(c) => {
            if !(c > 0.0 && c <= 1.0) {
                w.err("cfl", format!("cfl must lie in (0,1], got {c}"));
            }
            c
        }
    };
    let snapshot_stride = w.usize_opt(map, "", "snapshot_stride", 1);
    if snapshot_stride == 0 {
        w.err("snapshot_stride", "must be >= 1");
    }
    let slope_margin = w.f64_opt(map, "", "slope_margin").unwrap_or(2.0);
    if !(slope_margin >= 0.0) {
        w.err("slope_margin", format!("must be >= 0, got {slope_margin}"));
    }
    let alpha_override = w.f64_opt(map, "", "alpha_override");
    if let Some(a) = alpha_override {
        if !(a >= 0.0) {
            w.err("alpha_override", format!("must be >= 0, got {a}"));
        }
    }
    let seeds = w.u64_list_opt(map, "", "seeds").unwrap_or_else(|| vec![0]);
    if seeds.is_empty() {
        w.err("seeds", "must not be empty");
    }
    let epsilons = match map.get("epsilons") {
        None | Some(Value::Null) => Vec::new(),
        Some(_) => {
            let eps = w.f64_list(map, "", "epsilons").unwrap_or_default();
            for (i, pair) in eps.windows(2).enumerate() {
                if !(pair[1] < pair[0]) {
                    w.err(
                        &format!("epsilons[{}]", i + 1),
                        "epsilons must be strictly decreasing",
                    );
                }
            }
            if let Some(&last) = eps.last() {
                if !(last > 0.0) {
                    w.err("epsilons", "must be positive");
                }
            }
            eps
        }
    };
    let measure_radius = w.f64_opt(map, "", "measure_radius");
    if let Some(r) = measure_radius {
        if !(r > 0.0) {
            w.err("measure_radius", format!("must be positive, got {r}"));
        }
    }
    let lemma = parse_lemma(w, map.get("lemma"));
    let tolerances = parse_tolerances(w, map.get("tolerances"));

    // Cross-field checks, only when the pieces parsed.
    let lengths = lengths?;
    let k = lengths.len();
    let hamiltonians = hamiltonians?;
    let initial = initial?;
    if hamiltonians.len() != 1 && hamiltonians.len() != k {
        w.err("hamiltonians", format!("expected 1 or {k} entries, got {}", hamiltonians.len()));
    }
    if initial.len() != 1 && initial.len() != k {
        w.err("initial", format!("expected 1 or {k} entries, got {}", initial.len()));
    }
    let bc = bc?;
    if let BcConfig::FluxLimiter { a } = bc {
        // A >= A_0 is checkable now when every entry is concrete and eligible.
        let hs: Vec<_> = hamiltonians.iter().map(|h| h.build()).collect();
        match a_naught(&hs) {
            Ok(a0) => {
                if a < a0 - P_A_VALUE_TOL {
                    w.err("bc.A", format!("must be >= the limiter floor {a0:.12}, got {a}"));
                }
            }
            Err(e) => w.err("bc", format!("fluxlimiter needs convex entries: {e}")),
        }
    }

    Some(RunConfig {
        lengths,
        far_bc,
        hamiltonians,
        bc,
        initial,
        t_final: t_final?,
        dx: dx?,
        flux,
        cfl,
        snapshot_stride,
        slope_margin,
        alpha_override,
        seeds,
        epsilons,
        measure_radius,
        lemma,
        tolerances,
    })
}

fn parse_network(w: &mut Walker, v: &Value) -> (Option<Vec<f64>>, FarBoundary) {
    let mut far = FarBoundary::FrozenDirichlet;
    let Some(map) = w.object(v, "network") else { return (None, far) };
    w.check_keys(map, "network", &["lengths", "far_bc"]);
    let lengths = w.f64_list(map, "network", "lengths").and_then(|ls| {
        if ls.is_empty() {
            w.err("network.lengths", "must not be empty");
            return None;
        }
        for (i, &l) in ls.iter().enumerate() {
            if !(l > 0.0) {
                w.err(&format!("network.lengths[{i}]"), format!("must be positive, got {l}"));
                return None;
            }
        }
        Some(ls)
    });
    if let Some(s) = map.get("far_bc") {
        match s.as_str() {
            Some("frozen") => far = FarBoundary::FrozenDirichlet,
            Some("zero_slope") => far = FarBoundary::ZeroSlopeExtrapolation,
            Some(other) => {
                w.err("network.far_bc", format!("expected \"frozen\" or \"zero_slope\", got \"{other}\""))
            }
            None => w.err("network.far_bc", "expected a string"),
        }
    }
    (lengths, far)
}

fn parse_hamiltonians(w: &mut Walker, v: Option<&Value>) -> Option<Vec<HamiltonianConfig>> {
    let Some(v) = v else {
        w.err("hamiltonians", "missing required key");
        return None;
    };
    let Some(arr) = v.as_array() else {
        w.err("hamiltonians", "expected a list");
        return None;
    };
    if arr.is_empty() {
        w.err("hamiltonians", "must not be empty");
        return None;
    }
    let mut out = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        out.push(parse_hamiltonian(w, item, &format!("hamiltonians[{i}]"))?);
    }
    Some(out)
}

fn parse_hamiltonian(w: &mut Walker, v: &Value, path: &str) -> Option<HamiltonianConfig> {
    let map = w.object(v, path)?;
    let kind = w.str_field(map, path, "kind")?;
    let kind = match kind {
        "quadratic" | "v_shape" => {
            w.check_keys(map, path, &["kind", "a", "b", "c", "modulation"]);
            let a = w.f64_field(map, path, "a")?;
            let b = w.f64_field(map, path, "b")?;
            let c = w.f64_field(map, path, "c")?;
            if !(a > 0.0) {
                w.err(&join(path, "a"), format!("must be positive, got {a}"));
                return None;
            }
            if kind == "quadratic" {
                HamiltonianKind::Quadratic { a, b, c }
            } else {
                HamiltonianKind::VShape { a, b, c }
            }
        }
        "half_square" => {
            w.check_keys(map, path, &["kind", "modulation"]);
            HamiltonianKind::HalfSquare
        }
        "double_well" => {
            w.check_keys(map, path, &["kind", "modulation"]);
            HamiltonianKind::DoubleWell
        }
        other => {
            w.err(
                &join(path, "kind"),
                format!("unknown Hamiltonian \"{other}\" (quadratic, v_shape, half_square, double_well)"),
            );
            return None;
        }
    };
    let modulation = match map.get("modulation") {
        None | Some(Value::Null) => None,
        Some(m) => {
            let mpath = join(path, "modulation");
            let mm = w.object(m, &mpath)?;
            w.check_keys(mm, &mpath, &["amplitude", "angular_frequency"]);
            let amp = w.f64_field(mm, &mpath, "amplitude")?;
            let freq = w.f64_field(mm, &mpath, "angular_frequency")?;
            Some((amp, freq))
        }
    };
    Some(HamiltonianConfig { kind, modulation })
}

fn parse_bc(w: &mut Walker, v: Option<&Value>) -> Option<BcConfig> {
    let Some(v) = v else {
        w.err("bc", "missing required key");
        return None;
    };
    let map = w.object(v, "bc")?;
    let kind = w.str_field(map, "bc", "kind")?;
    match kind {
        "kirchhoff" => {
            w.check_keys(map, "bc", &["kind", "B"]);
            Some(BcConfig::Kirchhoff { b: w.f64_field(map, "bc", "B")? })
        }
        "fluxlimiter" => {
            w.check_keys(map, "bc", &["kind", "A"]);
            Some(BcConfig::FluxLimiter { a: w.f64_field(map, "bc", "A")? })
        }
        "viscous" => {
            w.check_keys(map, "bc", &["kind", "B", "epsilon"]);
            let b = w.f64_field(map, "bc", "B")?;
            let epsilon = w.f64_field(map, "bc", "epsilon")?;
            if !(epsilon >= 0.0) {
                w.err("bc.epsilon", format!("must be >= 0, got {epsilon}"));
                return None;
            }
            Some(BcConfig::Viscous { b, epsilon })
        }
        other => {
            w.err(
                "bc.kind",
                format!("unknown junction rule \"{other}\" (kirchhoff, fluxlimiter, viscous)"),
            );
            None
        }
    }
}

fn parse_initial(w: &mut Walker, v: Option<&Value>) -> Option<Vec<InitialConfig>> {
    let Some(v) = v else {
        w.err("initial", "missing required key");
        return None;
    };
    let Some(arr) = v.as_array() else {
        w.err("initial", "expected a list");
        return None;
    };
    if arr.is_empty() {
        w.err("initial", "must not be empty");
        return None;
    }
    let mut out = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        let path = format!("initial[{i}]");
        let map = w.object(item, &path)?;
        let kind = w.str_field(map, &path, "kind")?;
        let parsed = match kind {
            "zero" => {
                w.check_keys(map, &path, &["kind"]);
                InitialConfig::Zero
            }
            "abs" => {
                w.check_keys(map, &path, &["kind"]);
                InitialConfig::Abs
            }
            "constant" => {
                w.check_keys(map, &path, &["kind", "value"]);
                InitialConfig::Constant { value: w.f64_field(map, &path, "value")? }
            }
            "linear" => {
                w.check_keys(map, &path, &["kind", "slope"]);
                InitialConfig::Linear { slope: w.f64_field(map, &path, "slope")? }
            }
            "bump" => {
                w.check_keys(map, &path, &["kind", "amplitude", "center", "width"]);
                let amplitude = w.f64_field(map, &path, "amplitude")?;
                let center = w.f64_field(map, &path, "center")?;
                let width = w.f64_field(map, &path, "width")?;
                if !(width > 0.0) {
                    w.err(&join(&path, "width"), format!("must be positive, got {width}"));
                    return None;
                }
                InitialConfig::Bump { amplitude, center, width }
            }
            other => {
                w.err(
                    &join(&path, "kind"),
                    format!("unknown initial datum \"{other}\" (zero, abs, constant, linear, bump)"),
                );
                return None;
            }
        };
        out.push(parsed);
    }
    Some(out)
}

fn parse_dx(w: &mut Walker, map: &Map<String, Value>) -> Option<Vec<f64>> {
    let dx = match map.get("dx") {
        None => {
            w.err("dx", "missing required key");
            return None;
        }
        // A bare number reads as a one-rung ladder.
        Some(Value::Number(_)) => vec![w.f64_value(map.get("dx").unwrap(), "dx")?],
        Some(_) => w.f64_list(map, "", "dx")?,
    };
    if dx.is_empty() {
        w.err("dx", "must not be empty");
        return None;
    }
    for (i, &d) in dx.iter().enumerate() {
        if !(d > 0.0) {
            w.err(&format!("dx[{i}]"), format!("must be positive, got {d}"));
            return None;
        }
    }
    for (i, pair) in dx.windows(2).enumerate() {
        if !(pair[1] < pair[0]) {
            w.err(&format!("dx[{}]", i + 1), "ladder must be strictly decreasing");
            return None;
        }
    }
    Some(dx)
}

fn parse_flux(w: &mut Walker, map: &Map<String, Value>) -> FluxKind {
    match map.get("flux") {
        None | Some(Value::Null) => FluxKind::LaxFriedrichs,
        Some(v) => match v.as_str() {
            Some("lax_friedrichs") => FluxKind::LaxFriedrichs,
            Some("godunov") => FluxKind::Godunov,
            Some(other) => {
                w.err("flux", format!("expected \"lax_friedrichs\" or \"godunov\", got \"{other}\""));
                FluxKind::LaxFriedrichs
            }
            None => {
                w.err("flux", "expected a string");
                FluxKind::LaxFriedrichs
            }
        },
    }
}

fn parse_lemma(w: &mut Walker, v: Option<&Value>) -> LemmaConfig {
    let mut out = LemmaConfig::default();
    let Some(v) = v else { return out };
    let Some(map) = w.object(v, "lemma") else { return out };
    w.check_keys(map, "lemma", &["k", "seeds", "budget"]);
    out.k = w.usize_opt(map, "lemma", "k", out.k);
    if out.k == 0 {
        w.err("lemma.k", "must be >= 1");
    }
    if let Some(seeds) = w.u64_list_opt(map, "lemma", "seeds") {
        if seeds.is_empty() {
            w.err("lemma.seeds", "must not be empty");
        } else {
            out.seeds = seeds;
        }
    }
    out.budget = w.usize_opt(map, "lemma", "budget", out.budget);
    if out.budget == 0 {
        w.err("lemma.budget", "must be >= 1");
    }
    out
}

fn parse_tolerances(w: &mut Walker, v: Option<&Value>) -> Tolerances {
    let mut out = Tolerances::default();
    let Some(v) = v else { return out };
    let Some(map) = w.object(v, "tolerances") else { return out };
    w.check_keys(
        map,
        "tolerances",
        &["comparison", "lemma", "adversarial", "wholeline", "equivalence"],
    );
    if let Some(x) = w.f64_opt(map, "tolerances", "comparison") {
        out.comparison = x;
    }
    if let Some(x) = w.f64_opt(map, "tolerances", "lemma") {
        out.lemma = x;
    }
    if let Some(x) = w.f64_opt(map, "tolerances", "adversarial") {
        out.adversarial = x;
    }
    out.wholeline = w.f64_opt(map, "tolerances", "wholeline");
    out.equivalence = w.f64_opt(map, "tolerances", "equivalence");
    for (key, val) in
        [("comparison", Some(out.comparison)), ("lemma", Some(out.lemma)), ("adversarial", Some(out.adversarial)), ("wholeline", out.wholeline), ("equivalence", out.equivalence)]
    {
        if let Some(t) = val {
            if !(t >= 0.0) {
                w.err(&format!("tolerances.{key}"), format!("must be >= 0, got {t}"));
            }
        }
    }
    out
}

/// Canonical JSON for a config; `parse_config(serialize(c)) == c`.
pub fn serialize_config(cfg: &RunConfig) -> String {
    use serde_json::json;
    let far = match cfg.far_bc {
        FarBoundary::FrozenDirichlet => "frozen",
        FarBoundary::ZeroSlopeExtrapolation => "zero_slope",
    };
    let hs: Vec<Value> = cfg
        .hamiltonians
        .iter()
        .map(|h| {
            let mut m = match h.kind {
                HamiltonianKind::Quadratic { a, b, c } => {
                    json!({"kind": "quadratic", "a": a, "b": b, "c": c})
                }
                HamiltonianKind::VShape { a, b, c } => {
                    json!({"kind": "v_shape", "a": a, "b": b, "c": c})
                }
                HamiltonianKind::HalfSquare => json!({"kind": "half_square"}),
                HamiltonianKind::DoubleWell => json!({"kind": "double_well"}),
            };
            if let Some((amp, freq)) = h.modulation {
                m["modulation"] = json!({"amplitude": amp, "angular_frequency": freq});
            }
            m
        })
        .collect();
    let bc = match cfg.bc {
        BcConfig::Kirchhoff { b } => json!({"kind": "kirchhoff", "B": b}),
        BcConfig::FluxLimiter { a } => json!({"kind": "fluxlimiter", "A": a}),
        BcConfig::Viscous { b, epsilon } => {
            json!({"kind": "viscous", "B": b, "epsilon": epsilon})
        }
    };
    let initial: Vec<Value> = cfg
        .initial
        .iter()
        .map(|u| match *u {
            InitialConfig::Zero => json!({"kind": "zero"}),
            InitialConfig::Abs => json!({"kind": "abs"}),
            InitialConfig::Constant { value } => json!({"kind": "constant", "value": value}),
            InitialConfig::Linear { slope } => json!({"kind": "linear", "slope": slope}),
            InitialConfig::Bump { amplitude, center, width } => {
                json!({"kind": "bump", "amplitude": amplitude, "center": center, "width": width})
            }
        })
        .collect();
    let flux = match cfg.flux {
        FluxKind::LaxFriedrichs => "lax_friedrichs",
        FluxKind::Godunov => "godunov",
    };
    let doc = json!({
        "network": {"lengths": cfg.lengths, "far_bc": far},
        "hamiltonians": hs,
        "bc": bc,
        "initial": initial,
        "t_final": cfg.t_final,
        "dx": cfg.dx,
        "flux": flux,
        "cfl": cfg.cfl,
        "snapshot_stride": cfg.snapshot_stride,
        "slope_margin": cfg.slope_margin,
        "alpha_override": cfg.alpha_override,
        "seeds": cfg.seeds,
        "epsilons": cfg.epsilons,
        "measure_radius": cfg.measure_radius,
        "lemma": {"k": cfg.lemma.k, "seeds": cfg.lemma.seeds, "budget": cfg.lemma.budget},
        "tolerances": {
            "comparison": cfg.tolerances.comparison,
            "lemma": cfg.tolerances.lemma,
            "adversarial": cfg.tolerances.adversarial,
            "wholeline": cfg.tolerances.wholeline,
            "equivalence": cfg.tolerances.equivalence,
        },
    });
    serde_json::to_string_pretty(&doc).expect("static shape")
}
