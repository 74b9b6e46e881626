//! Run configuration, read from TOML with the tables `[problem]`, `[grid]`,
//! `[basis]`, `[method]`, `[filter]`, `[limiter]`, `[newton]`, `[output]` and
//! `[reference]`.
//!
//! ```toml
//! [problem]
//! name = "sod_1d"
//!
//! [basis]
//! elements = 3
//! degree = 4
//!
//! [method]
//! name = "me_hsg"
//! ```
//!
//! Every key is optional; presets fill the problem, grid and reference defaults.
//! Unknown tables and keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::basis::{QuadratureKind, QuadratureSpec};
use crate::error::{Error, Result};
use crate::euler::{GasModel, State1, State2};
use crate::fv::NumericalFlux;
use crate::ipm::NewtonConfig;
use crate::reference::UncertainRiemann;
use crate::sg::{FilterConfig, FilterKind, LimiterConfig};
use crate::stats::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hsg,
    Fhsg,
    Ipm,
    MeHsg,
    MeFhsg,
    MeIpm,
    Collocation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hsg => "hsg",
            Method::Fhsg => "fhsg",
            Method::Ipm => "ipm",
            Method::MeHsg => "me_hsg",
            Method::MeFhsg => "me_fhsg",
            Method::MeIpm => "me_ipm",
            Method::Collocation => "collocation",
        }
    }

    pub fn is_filtered(self) -> bool {
        matches!(self, Method::Fhsg | Method::MeFhsg)
    }

    pub fn is_ipm(self) -> bool {
        matches!(self, Method::Ipm | Method::MeIpm)
    }

    /// Classical variants use a single element.
    pub fn single_element(self) -> bool {
        matches!(self, Method::Hsg | Method::Fhsg | Method::Ipm)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "hsg" => Method::Hsg,
            "fhsg" => Method::Fhsg,
            "ipm" => Method::Ipm,
            "me_hsg" => Method::MeHsg,
            "me_fhsg" => Method::MeFhsg,
            "me_ipm" => Method::MeIpm,
            "collocation" => Method::Collocation,
            other => return Err(Error::invalid(format!("unknown method `{other}`"))),
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// 1D initial data beyond the Sod preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile1d {
    Riemann(UncertainRiemann),
    /// `ρ = ρ0 + a sin(2π(x - σξ))` with constant velocity and pressure.
    Sine {
        rho0: f64,
        amplitude: f64,
        velocity: f64,
        pressure: f64,
        sigma: f64,
        xi_lo: f64,
        xi_hi: f64,
        model: GasModel,
    },
}

/// Four constant quadrants meeting at `(x0 + σξ, y0 + σξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Riemann2d {
    pub ne: State2,
    pub nw: State2,
    pub sw: State2,
    pub se: State2,
    pub x0: f64,
    pub y0: f64,
    pub sigma: f64,
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub model: GasModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    Sod1d(UncertainRiemann),
    Custom1d(Profile1d),
    Riemann2d(Riemann2d),
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Sod1d(_) => "sod_1d",
            Problem::Custom1d(_) => "custom_1d",
            Problem::Riemann2d(_) => "riemann_2d",
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            Problem::Riemann2d(_) => 2,
            _ => 1,
        }
    }

    pub fn model(&self) -> GasModel {
        match self {
            Problem::Sod1d(p) | Problem::Custom1d(Profile1d::Riemann(p)) => p.model,
            Problem::Custom1d(Profile1d::Sine { model, .. }) => *model,
            Problem::Riemann2d(p) => p.model,
        }
    }

    pub fn xi_range(&self) -> (f64, f64) {
        match self {
            Problem::Sod1d(p) | Problem::Custom1d(Profile1d::Riemann(p)) => (p.xi_lo, p.xi_hi),
            Problem::Custom1d(Profile1d::Sine { xi_lo, xi_hi, .. }) => (*xi_lo, *xi_hi),
            Problem::Riemann2d(p) => (p.xi_lo, p.xi_hi),
        }
    }

    /// The uncertain Riemann problem behind a 1D jump profile, if any.
    pub fn riemann_1d(&self) -> Option<&UncertainRiemann> {
        match self {
            Problem::Sod1d(p) | Problem::Custom1d(Profile1d::Riemann(p)) => Some(p),
            _ => None,
        }
    }

    pub fn initial_1d(&self, x: f64, xi: f64) -> State1 {
        match self {
            Problem::Sod1d(p) | Problem::Custom1d(Profile1d::Riemann(p)) => p.initial_state(x, xi),
            Problem::Custom1d(Profile1d::Sine {
                rho0,
                amplitude,
                velocity,
                pressure,
                sigma,
                model,
                ..
            }) => {
                let rho = rho0 + amplitude * (2.0 * std::f64::consts::PI * (x - sigma * xi)).sin();
                State1::from_primitive(rho, &[*velocity], *pressure, model)
            }
            Problem::Riemann2d(_) => panic!("initial_1d called on a 2D problem"),
        }
    }

    pub fn initial_2d(&self, x: f64, y: f64, xi: f64) -> State2 {
        match self {
            Problem::Riemann2d(p) => {
                let east = x >= p.x0 + p.sigma * xi;
                let north = y >= p.y0 + p.sigma * xi;
                match (east, north) {
                    (true, true) => p.ne,
                    (false, true) => p.nw,
                    (false, false) => p.sw,
                    (true, false) => p.se,
                }
            }
            _ => panic!("initial_2d called on a 1D problem"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Transmissive,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub boundary: BoundaryKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub elements: usize,
    pub degree: usize,
    pub quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceKind {
    None,
    /// Exact Riemann solution integrated piecewise in ξ.
    Exact { nodes_per_piece: usize, subcells: usize },
    Collocation { nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    pub kind: ReferenceKind,
    pub window: Option<Window>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub statistics: String,
    pub report: String,
    pub errors: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            statistics: "statistics.csv".into(),
            report: "report.txt".into(),
            errors: "errors.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub t_end: f64,
    pub grid: GridSpec,
    pub basis: BasisSpec,
    pub method: Method,
    pub flux: NumericalFlux,
    pub cfl: f64,
    /// Gauss nodes for the collocation method.
    pub collocation_nodes: usize,
    /// IPM only: rebuild the moments from the duals before each update.
    pub variable_map: bool,
    pub limiter: LimiterConfig,
    pub filter: FilterConfig,
    pub newton: NewtonConfig,
    pub output: OutputSpec,
    pub reference: ReferenceSpec,
    pub seed: u64,
}

impl RunConfig {
    /// Sod shock tube with an uncertain interface: `x ∈ [0, 1]`, `T = 0.14`,
    /// `x0 = 0.5`, `σ = 0.05`, `γ = 1.4`, states `(1, 0, 2.5)` and `(0.125, 0, 0.25)`.
    pub fn sod_1d() -> Self {
        Self {
            problem: Problem::Sod1d(UncertainRiemann::sod()),
            t_end: 0.14,
            grid: GridSpec {
                nx: 400,
                ny: 1,
                x: (0.0, 1.0),
                y: (0.0, 1.0),
                boundary: BoundaryKind::Transmissive,
            },
            basis: BasisSpec {
                elements: 3,
                degree: 4,
                quadrature: QuadratureSpec::default_for_degree(4),
            },
            method: Method::MeHsg,
            flux: NumericalFlux::Hll,
            cfl: 0.9,
            collocation_nodes: 100,
            variable_map: false,
            limiter: LimiterConfig::default(),
            filter: FilterConfig::none(),
            newton: NewtonConfig::default(),
            output: OutputSpec::default(),
            reference: ReferenceSpec {
                kind: ReferenceKind::Exact {
                    nodes_per_piece: 100,
                    subcells: 1,
                },
                window: None,
            },
            seed: 0,
        }
    }

    /// Smooth periodic density wave, the custom 1D default.
    pub fn custom_1d() -> Self {
        Self {
            problem: Problem::Custom1d(Profile1d::Sine {
                rho0: 1.0,
                amplitude: 0.2,
                velocity: 1.0,
                pressure: 1.0,
                sigma: 0.1,
                xi_lo: -1.0,
                xi_hi: 1.0,
                model: GasModel::default(),
            }),
            t_end: 0.1,
            grid: GridSpec {
                nx: 100,
                boundary: BoundaryKind::Periodic,
                ..Self::sod_1d().grid
            },
            reference: ReferenceSpec {
                kind: ReferenceKind::None,
                window: None,
            },
            ..Self::sod_1d()
        }
    }

    /// Four-quadrant Riemann problem on the unit square.
    pub fn riemann_2d() -> Self {
        let model = GasModel::default();
        let st = |rho: f64, vx: f64, vy: f64, p: f64| State2::from_primitive(rho, &[vx, vy], p, &model);
        Self {
            problem: Problem::Riemann2d(Riemann2d {
                ne: st(1.5, 0.0, 0.0, 1.5),
                nw: st(0.5323, 1.206, 0.0, 0.3),
                sw: st(0.138, 1.206, 1.206, 0.029),
                se: st(0.5323, 0.0, 1.206, 0.3),
                x0: 0.8,
                y0: 0.8,
                sigma: 0.05,
                xi_lo: -1.0,
                xi_hi: 1.0,
                model,
            }),
            t_end: 0.2,
            grid: GridSpec {
                nx: 50,
                ny: 50,
                x: (0.0, 1.0),
                y: (0.0, 1.0),
                boundary: BoundaryKind::Transmissive,
            },
            reference: ReferenceSpec {
                kind: ReferenceKind::None,
                window: None,
            },
            ..Self::sod_1d()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| {
            Err(Error::ConfigValidation {
                field: field.into(),
                message,
            })
        };
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("problem.t_end", format!("{} must be a finite number >= 0", self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("method.cfl", format!("{} must lie in (0, 1]", self.cfl));
        }
        if self.grid.nx == 0 || (self.problem.dims() == 2 && self.grid.ny == 0) {
            return bad("grid.cells", "at least one cell per direction".into());
        }
        if !(self.grid.x.0 < self.grid.x.1) || (self.problem.dims() == 2 && !(self.grid.y.0 < self.grid.y.1)) {
            return bad("grid", "domain bounds must satisfy lo < hi".into());
        }
        if self.basis.elements == 0 {
            return bad("basis.elements", "must be >= 1".into());
        }
        if self.method.single_element() && self.basis.elements != 1 {
            return bad(
                "basis.elements",
                format!("method {} uses a single element, got {}", self.method, self.basis.elements),
            );
        }
        if self.method == Method::Collocation && self.collocation_nodes == 0 {
            return bad("method.collocation_nodes", "must be >= 1".into());
        }
        if self.method.is_filtered() && self.filter.kind == FilterKind::None {
            return bad("filter", format!("method {} needs a filter kind other than none", self.method));
        }
        self.filter.validate().or_else(|e| bad("filter", e.to_string()))?;
        self.newton.validate().or_else(|e| bad("newton", e.to_string()))?;
        if !(self.limiter.epsilon > 0.0 && self.limiter.epsilon < 1.0) {
            return bad("limiter.epsilon", format!("{} must lie in (0, 1)", self.limiter.epsilon));
        }
        let (lo, hi) = self.problem.xi_range();
        if !(lo < hi) {
            return bad("problem.xi_range", "lower bound must be below upper bound".into());
        }
        match self.reference.kind {
            ReferenceKind::Exact {
                nodes_per_piece,
                subcells,
            } => {
                if self.problem.riemann_1d().is_none() {
                    return bad("reference.kind", "exact references exist only for 1D Riemann data".into());
                }
                if self.grid.boundary != BoundaryKind::Transmissive {
                    return bad("reference.kind", "exact references need transmissive boundaries".into());
                }
                if nodes_per_piece == 0 || subcells == 0 {
                    return bad("reference", "nodes and subcells must be >= 1".into());
                }
            }
            ReferenceKind::Collocation { nodes: 0 } => {
                return bad("reference.nodes", "must be >= 1".into());
            }
            _ => {}
        }
        Ok(())
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        parse_config(&text)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    problem: Option<RawProblem>,
    grid: Option<RawGrid>,
    basis: Option<RawBasis>,
    method: Option<RawMethod>,
    filter: Option<RawFilter>,
    limiter: Option<RawLimiter>,
    newton: Option<RawNewton>,
    output: Option<RawOutput>,
    reference: Option<RawReference>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: Option<String>,
    t_end: Option<f64>,
    seed: Option<u64>,
    gamma: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    sigma: Option<f64>,
    xi_range: Option<[f64; 2]>,
    left: Option<[f64; 3]>,
    right: Option<[f64; 3]>,
    ne: Option<[f64; 4]>,
    nw: Option<[f64; 4]>,
    sw: Option<[f64; 4]>,
    se: Option<[f64; 4]>,
    profile: Option<String>,
    rho0: Option<f64>,
    amplitude: Option<f64>,
    velocity: Option<f64>,
    pressure: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    cells: Option<usize>,
    nx: Option<usize>,
    ny: Option<usize>,
    x_range: Option<[f64; 2]>,
    y_range: Option<[f64; 2]>,
    boundary: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    elements: Option<usize>,
    degree: Option<usize>,
    quadrature: Option<String>,
    points: Option<usize>,
    level: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMethod {
    name: Option<String>,
    flux: Option<String>,
    cfl: Option<f64>,
    collocation_nodes: Option<usize>,
    variable_map: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    kind: Option<String>,
    strength: Option<f64>,
    order: Option<u32>,
    dt_scaled: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimiter {
    enabled: Option<bool>,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNewton {
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    max_halvings: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<PathBuf>,
    statistics: Option<String>,
    report: Option<String>,
    errors: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReference {
    kind: Option<String>,
    nodes: Option<usize>,
    subcells: Option<usize>,
    window_x: Option<[f64; 2]>,
    window_y: Option<[f64; 2]>,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::ConfigValidation {
        field: field.into(),
        message: message.into(),
    }
}

fn parse_field<T: FromStr<Err = Error>>(field: &str, value: &str) -> Result<T> {
    value.parse().map_err(|e: Error| invalid(field, e.to_string()))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn state1(v: [f64; 3]) -> State1 {
    State1::new_1d(v[0], v[1], v[2])
}

fn state2(v: [f64; 4]) -> State2 {
    State2::new_2d(v[0], v[1], v[2], v[3])
}

/// Parses and validates a TOML configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::ConfigParse {
            line,
            message: e.message().to_string(),
        }
    })?;
    let problem = raw.problem.unwrap_or_default();

    let mut cfg = match problem.name.as_deref().unwrap_or("sod_1d") {
        "sod_1d" => RunConfig::sod_1d(),
        "custom_1d" => RunConfig::custom_1d(),
        "riemann_2d" => RunConfig::riemann_2d(),
        other => {
            return Err(invalid(
                "problem.name",
                format!("unknown problem `{other}` (sod_1d, custom_1d, riemann_2d)"),
            ))
        }
    };

    // [problem]
    set(&mut cfg.t_end, problem.t_end);
    set(&mut cfg.seed, problem.seed);
    let model = match problem.gamma {
        Some(g) => GasModel::new(g).map_err(|e| invalid("problem.gamma", e.to_string()))?,
        None => cfg.problem.model(),
    };
    let xi_range = problem.xi_range.map(|[a, b]| (a, b));
    let is_2d = cfg.problem.dims() == 2;
    let mut profile_is_sine = false;
    match &mut cfg.problem {
        Problem::Sod1d(p) => apply_riemann(&problem, p, model, xi_range)?,
        Problem::Custom1d(profile) => match problem.profile.as_deref().unwrap_or("sine") {
            "riemann" => {
                let mut p = UncertainRiemann::sod();
                apply_riemann(&problem, &mut p, model, xi_range)?;
                *profile = Profile1d::Riemann(p);
                cfg.grid.boundary = BoundaryKind::Transmissive;
            }
            "sine" => {
                profile_is_sine = true;
                if let Profile1d::Sine {
                    rho0,
                    amplitude,
                    velocity,
                    pressure,
                    sigma,
                    xi_lo,
                    xi_hi,
                    model: m,
                } = profile
                {
                    *m = model;
                    set(rho0, problem.rho0);
                    set(amplitude, problem.amplitude);
                    set(velocity, problem.velocity);
                    set(pressure, problem.pressure);
                    set(sigma, problem.sigma);
                    if let Some((a, b)) = xi_range {
                        (*xi_lo, *xi_hi) = (a, b);
                    }
                    if !(*rho0 - amplitude.abs() > 0.0 && *pressure > 0.0) {
                        return Err(invalid("problem", "sine profile must keep density and pressure positive"));
                    }
                }
            }
            other => return Err(invalid("problem.profile", format!("unknown profile `{other}` (sine, riemann)"))),
        },
        Problem::Riemann2d(p) => {
            p.model = model;
            for (slot, v) in [
                (&mut p.ne, problem.ne),
                (&mut p.nw, problem.nw),
                (&mut p.sw, problem.sw),
                (&mut p.se, problem.se),
            ] {
                set(slot, v.map(state2));
            }
            set(&mut p.x0, problem.x0);
            set(&mut p.y0, problem.y0);
            set(&mut p.sigma, problem.sigma);
            if let Some((a, b)) = xi_range {
                (p.xi_lo, p.xi_hi) = (a, b);
            }
            for (key, u) in [("ne", p.ne), ("nw", p.nw), ("sw", p.sw), ("se", p.se)] {
                if !model.is_admissible(&u) {
                    return Err(invalid(&format!("problem.{key}"), format!("state {:?} is not admissible", u.0)));
                }
            }
        }
    }
    let unused = |key: &str, present: bool| -> Result<()> {
        if present {
            Err(invalid(&format!("problem.{key}"), format!("not used by problem {}", cfg.problem.name())))
        } else {
            Ok(())
        }
    };
    unused("profile", problem.profile.is_some() && !matches!(cfg.problem, Problem::Custom1d(_)))?;
    unused("y0", problem.y0.is_some() && !is_2d)?;
    for (key, v) in [("ne", problem.ne), ("nw", problem.nw), ("sw", problem.sw), ("se", problem.se)] {
        unused(key, v.is_some() && !is_2d)?;
    }
    unused("left", problem.left.is_some() && (is_2d || profile_is_sine))?;
    unused("right", problem.right.is_some() && (is_2d || profile_is_sine))?;
    unused("x0", problem.x0.is_some() && profile_is_sine)?;
    for (key, v) in [
        ("rho0", problem.rho0),
        ("amplitude", problem.amplitude),
        ("velocity", problem.velocity),
        ("pressure", problem.pressure),
    ] {
        unused(key, v.is_some() && !profile_is_sine)?;
    }

    // [grid]
    let grid = raw.grid.unwrap_or_default();
    if let Some(n) = grid.cells {
        cfg.grid.nx = n;
        if is_2d {
            cfg.grid.ny = n;
        }
    }
    set(&mut cfg.grid.nx, grid.nx);
    if grid.ny.is_some() && !is_2d {
        return Err(invalid("grid.ny", "1D problems have no y-direction"));
    }
    set(&mut cfg.grid.ny, grid.ny);
    set(&mut cfg.grid.x, grid.x_range.map(|[a, b]| (a, b)));
    set(&mut cfg.grid.y, grid.y_range.map(|[a, b]| (a, b)));
    if let Some(b) = grid.boundary {
        cfg.grid.boundary = match b.to_ascii_lowercase().as_str() {
            "transmissive" | "outflow" => BoundaryKind::Transmissive,
            "periodic" => BoundaryKind::Periodic,
            other => return Err(invalid("grid.boundary", format!("unknown boundary `{other}` (transmissive, periodic)"))),
        };
    }

    // [method]
    let method = raw.method.unwrap_or_default();
    if let Some(m) = &method.name {
        cfg.method = parse_field("method.name", m)?;
    }
    if let Some(f) = &method.flux {
        cfg.flux = parse_field("method.flux", f)?;
    }
    set(&mut cfg.cfl, method.cfl);
    set(&mut cfg.collocation_nodes, method.collocation_nodes);
    set(&mut cfg.variable_map, method.variable_map);

    // [basis]
    let basis = raw.basis.unwrap_or_default();
    cfg.basis.elements = match basis.elements {
        Some(e) => e,
        None if cfg.method.single_element() => 1,
        None => cfg.basis.elements,
    };
    set(&mut cfg.basis.degree, basis.degree);
    let kind = match &basis.quadrature {
        Some(k) => parse_field("basis.quadrature", k)?,
        None => QuadratureKind::GaussLegendre,
    };
    cfg.basis.quadrature = match (kind, basis.points, basis.level) {
        (QuadratureKind::GaussLegendre, p, None) => QuadratureSpec::gauss(p.unwrap_or(2 * (cfg.basis.degree + 1))),
        (QuadratureKind::ClenshawCurtis, None, Some(l)) => QuadratureSpec {
            kind: QuadratureKind::ClenshawCurtis,
            count_or_level: l,
        },
        (QuadratureKind::ClenshawCurtis, None, None) => {
            return Err(invalid("basis.level", "Clenshaw-Curtis quadrature needs a level"))
        }
        _ => return Err(invalid("basis", "use `points` with gauss and `level` with cc")),
    };

    // [filter]
    match (raw.filter, cfg.method.is_filtered()) {
        (Some(f), true) => {
            cfg.filter = FilterConfig::default();
            if let Some(k) = &f.kind {
                cfg.filter.kind = parse_field("filter.kind", k)?;
            }
            set(&mut cfg.filter.strength, f.strength);
            set(&mut cfg.filter.order, f.order);
            set(&mut cfg.filter.dt_scaled, f.dt_scaled);
        }
        (Some(_), false) => return Err(invalid("filter", format!("method {} does not use a filter", cfg.method))),
        (None, true) => return Err(invalid("filter", format!("method {} requires a [filter] section", cfg.method))),
        (None, false) => {}
    }

    // [limiter], [newton]
    let limiter = raw.limiter.unwrap_or_default();
    set(&mut cfg.limiter.enabled, limiter.enabled);
    set(&mut cfg.limiter.epsilon, limiter.epsilon);
    let newton = raw.newton.unwrap_or_default();
    set(&mut cfg.newton.tolerance, newton.tolerance);
    set(&mut cfg.newton.max_iterations, newton.max_iterations);
    set(&mut cfg.newton.max_halvings, newton.max_halvings);

    // [output]
    let output = raw.output.unwrap_or_default();
    set(&mut cfg.output.directory, output.directory);
    set(&mut cfg.output.statistics, output.statistics);
    set(&mut cfg.output.report, output.report);
    set(&mut cfg.output.errors, output.errors);

    // [reference]
    let reference = raw.reference.unwrap_or_default();
    if let Some(kind) = &reference.kind {
        cfg.reference.kind = match kind.to_ascii_lowercase().as_str() {
            "none" => ReferenceKind::None,
            "exact" => ReferenceKind::Exact {
                nodes_per_piece: 100,
                subcells: 1,
            },
            "collocation" => ReferenceKind::Collocation { nodes: 100 },
            other => {
                return Err(invalid(
                    "reference.kind",
                    format!("unknown reference `{other}` (none, exact, collocation)"),
                ))
            }
        };
    }
    match &mut cfg.reference.kind {
        ReferenceKind::Exact {
            nodes_per_piece,
            subcells,
        } => {
            set(nodes_per_piece, reference.nodes);
            set(subcells, reference.subcells);
        }
        ReferenceKind::Collocation { nodes } => {
            set(nodes, reference.nodes);
            if reference.subcells.is_some() {
                return Err(invalid("reference.subcells", "only used by exact references"));
            }
        }
        ReferenceKind::None => {
            if reference.nodes.is_some() || reference.subcells.is_some() {
                return Err(invalid("reference", "nodes/subcells given without a reference kind"));
            }
        }
    }
    if reference.window_x.is_some() || reference.window_y.is_some() {
        cfg.reference.window = Some(Window {
            x: reference.window_x.map_or(cfg.grid.x, |[a, b]| (a, b)),
            y: reference.window_y.map(|[a, b]| (a, b)),
        });
    }

    cfg.validate()?;
    Ok(cfg)
}

fn apply_riemann(raw: &RawProblem, p: &mut UncertainRiemann, model: GasModel, xi_range: Option<(f64, f64)>) -> Result<()> {
    p.model = model;
    set(&mut p.left, raw.left.map(state1));
    set(&mut p.right, raw.right.map(state1));
    set(&mut p.x0, raw.x0);
    set(&mut p.sigma, raw.sigma);
    if let Some((a, b)) = xi_range {
        (p.xi_lo, p.xi_hi) = (a, b);
    }
    for (field, u) in [("problem.left", p.left), ("problem.right", p.right)] {
        if !model.is_admissible(&u) {
            return Err(invalid(field, format!("state {:?} is not admissible", u.0)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_sod_preset() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::sod_1d());
        let Problem::Sod1d(p) = cfg.problem else { panic!() };
        assert_eq!(p.left, State1::new_1d(1.0, 0.0, 2.5));
        assert_eq!(p.right, State1::new_1d(0.125, 0.0, 0.25));
        assert_eq!((p.x0, p.sigma, p.model.gamma), (0.5, 0.05, 1.4));
        assert_eq!((cfg.t_end, cfg.grid.x), (0.14, (0.0, 1.0)));
        assert_eq!((cfg.cfl, cfg.limiter.epsilon, cfg.newton.tolerance), (0.9, 1e-10, 1e-7));
    }

    #[test]
    fn full_document() {
        let text = r#"
            # comment
            [problem]
            name = "sod_1d"
            t_end = 0.1
            [grid]
            cells = 200
            [basis]
            elements = 2
            degree = 3
            quadrature = "cc"
            level = 4
            [method]
            name = "me_fhsg"
            cfl = 0.5 # trailing comment
            flux = "lax_friedrichs"
            [filter]
            kind = "l2"
            strength = 0.5
            [output]
            directory = "out/run1"
            [reference]
            kind = "exact"
            nodes = 40
            subcells = 5
            window_x = [0.6, 0.9]
        "#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.t_end, 0.1);
        assert_eq!(cfg.grid.nx, 200);
        assert_eq!(cfg.basis.elements, 2);
        assert_eq!(cfg.basis.quadrature.kind, QuadratureKind::ClenshawCurtis);
        assert_eq!(cfg.basis.quadrature.node_count(), 17);
        assert_eq!(cfg.method, Method::MeFhsg);
        assert_eq!(cfg.flux, NumericalFlux::LaxFriedrichs);
        assert_eq!(cfg.filter.kind, FilterKind::L2);
        assert_eq!(cfg.filter.strength, 0.5);
        assert_eq!(cfg.output.directory, PathBuf::from("out/run1"));
        assert_eq!(
            cfg.reference.kind,
            ReferenceKind::Exact {
                nodes_per_piece: 40,
                subcells: 5
            }
        );
        assert_eq!(cfg.reference.window.unwrap().x, (0.6, 0.9));
    }

    #[test]
    fn filtered_method_requires_filter_section() {
        let err = parse_config("[method]\nname = \"me_fhsg\"\n").unwrap_err();
        assert!(matches!(err, Error::ConfigValidation { ref field, .. } if field == "filter"), "{err}");
        let err = parse_config("[method]\nname = \"me_hsg\"\n[filter]\nkind = \"l2\"\n").unwrap_err();
        assert!(matches!(err, Error::ConfigValidation { .. }), "{err}");
    }

    #[test]
    fn cfl_above_one_is_rejected() {
        let err = parse_config("[method]\ncfl = 1.5\n").unwrap_err();
        assert!(matches!(err, Error::ConfigValidation { ref field, .. } if field == "method.cfl"), "{err}");
    }

    #[test]
    fn parse_errors_report_lines() {
        let err = parse_config("[grid]\ncells = 10\ncelss = 20\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 3, ref message } if message.contains("celss")), "{err}");
        let err = parse_config("[gird]\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 1, .. }), "{err}");
        let err = parse_config("[grid]\ncells = \"ten\"\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 2, .. }), "{err}");
        let err = parse_config("[method]\nname = \"sg\"\n").unwrap_err();
        assert!(matches!(err, Error::ConfigValidation { ref field, .. } if field == "method.name"), "{err}");
    }

    #[test]
    fn classical_methods_use_one_element() {
        let cfg = parse_config("[method]\nname = \"ipm\"\n").unwrap();
        assert_eq!(cfg.basis.elements, 1);
        assert!(parse_config("[method]\nname = \"hsg\"\n[basis]\nelements = 3\n").is_err());
    }

    #[test]
    fn other_problems() {
        let cfg = parse_config("[problem]\nname = \"riemann_2d\"\nx0 = 0.5\n[grid]\ncells = 20\n").unwrap();
        assert_eq!(cfg.problem.dims(), 2);
        assert_eq!((cfg.grid.nx, cfg.grid.ny), (20, 20));
        let cfg = parse_config("[problem]\nname = \"custom_1d\"\namplitude = 0.1\n").unwrap();
        assert_eq!(cfg.grid.boundary, BoundaryKind::Periodic);
        let cfg = parse_config(
            "[problem]\nname = \"custom_1d\"\nprofile = \"riemann\"\nleft = [1, 0, 2.5]\nright = [0.5, 0, 1]\n",
        )
        .unwrap();
        assert_eq!(cfg.problem.riemann_1d().unwrap().right, State1::new_1d(0.5, 0.0, 1.0));
        assert!(parse_config("[problem]\nright = [1, 5, 0.1]\n").is_err());
        assert!(parse_config("[problem]\namplitude = 0.1\n").is_err());
    }
}
