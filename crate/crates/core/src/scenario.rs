//! Benchmark scenarios: flat key=value configuration, presets with the
//! published parameters, and the batch runner that produces timeseries.csv,
//! summary.json, and counters.csv.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::diagnostics::{mesh_volume, mode_amplitude, polygon_area, spline_area, TimeSeries};
use crate::grid::{GridGeometry, StaggeredField, Subgrid};
use crate::kernels::Kernel;
use crate::stepper::{Method, SimState, StepCounters};
use crate::structures::{
    make_ellipse, make_icosphere, make_perturbed_circle, parametric_stiffness, sample_closed,
    spring_force, surface_tension_force_2d, surface_tension_force_3d, ClosedCurve, TriMesh,
};
use crate::{Error, Result};

/// Named benchmark setups, plus a free-form `custom` scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// 2D elastic membrane under surface tension (convergence study).
    SurfaceTension2d,
    /// Pressurized circular membrane at equilibrium (spurious-flow and
    /// area-conservation study).
    QuasiStaticCircle,
    /// 2D membrane with periodically modulated stiffness (parametric
    /// resonance).
    ParametricMembrane,
    /// 3D spherical membrane under surface tension.
    Sphere3d,
    /// Free-form: circle with configurable spring stiffness.
    Custom,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "surface_tension_2d" => Ok(Self::SurfaceTension2d),
            "quasi_static_circle" => Ok(Self::QuasiStaticCircle),
            "parametric_membrane" => Ok(Self::ParametricMembrane),
            "sphere_3d" => Ok(Self::Sphere3d),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Config(format!("unknown scenario '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SurfaceTension2d => "surface_tension_2d",
            Self::QuasiStaticCircle => "quasi_static_circle",
            Self::ParametricMembrane => "parametric_membrane",
            Self::Sphere3d => "sphere_3d",
            Self::Custom => "custom",
        }
    }
}

/// Initial fluid velocity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialFlow {
    Zero,
    /// `u = (0, sin(4 pi x), 0)`, the dynamic 3D test flow.
    ShearY,
}

/// Complete description of one run. Lengths that scale with the mesh
/// (`dt`, `h_s`) are kept as expressions ("h/4") and resolved against the
/// actual meshwidth.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub dim: usize,
    pub n: usize,
    pub l: f64,
    pub rho: f64,
    pub mu: f64,
    pub method: Method,
    pub kernel: String,
    pub gamma: f64,
    pub kappa: f64,
    pub k_c: f64,
    pub tau: f64,
    pub omega0: f64,
    pub p: usize,
    pub eps0: f64,
    pub r: f64,
    pub level: Option<usize>,
    pub h_s: Option<String>,
    pub m: Option<usize>,
    pub dt: String,
    pub t_end: f64,
    pub tracer_multiplier: usize,
    pub initial_flow: InitialFlow,
    pub output_dir: Option<PathBuf>,
    pub sample_every: usize,
}

impl ScenarioConfig {
    /// Published parameters for each named scenario.
    pub fn preset(scenario: Scenario) -> Self {
        let base = Self {
            scenario,
            dim: 2,
            n: 64,
            l: 1.0,
            rho: 1.0,
            mu: 0.1,
            method: Method::Dfib,
            kernel: "bspline6".to_string(),
            gamma: 1.0,
            kappa: 1.0,
            k_c: 10.0,
            tau: 0.4,
            omega0: 10.0,
            p: 2,
            eps0: 0.05,
            r: 0.25,
            level: None,
            h_s: None,
            m: None,
            dt: "h/4".to_string(),
            t_end: 1.0,
            tracer_multiplier: 0,
            initial_flow: InitialFlow::Zero,
            output_dir: None,
            sample_every: 1,
        };
        match scenario {
            Scenario::SurfaceTension2d => Self {
                n: 64,
                l: 5.0,
                mu: 0.1,
                gamma: 1.0,
                dt: "h/2".to_string(),
                t_end: 20.0,
                ..base
            },
            Scenario::QuasiStaticCircle => Self {
                n: 128,
                l: 1.0,
                mu: 0.1,
                kappa: 1.0,
                r: 0.25,
                h_s: Some("h/2".to_string()),
                dt: "h/4".to_string(),
                t_end: 1.0,
                tracer_multiplier: 20,
                ..base
            },
            Scenario::ParametricMembrane => Self {
                n: 128,
                l: 5.0,
                mu: 0.15,
                r: 1.0,
                k_c: 10.0,
                tau: 0.4,
                omega0: 10.0,
                p: 2,
                eps0: 0.05,
                h_s: Some("h/2".to_string()),
                dt: "h/10".to_string(),
                t_end: 10.0,
                tracer_multiplier: 4,
                ..base
            },
            Scenario::Sphere3d => Self {
                dim: 3,
                n: 128,
                l: 1.0,
                mu: 0.05,
                gamma: 1.0,
                r: 0.1,
                h_s: Some("h/2".to_string()),
                dt: "h/4".to_string(),
                t_end: 0.5,
                initial_flow: InitialFlow::ShearY,
                ..base
            },
            Scenario::Custom => Self { kappa: 0.0, ..base },
        }
    }

    /// Parse a key=value config file ('#' comments, blank lines ignored).
    /// The `scenario` key selects the preset; every other key overrides it.
    pub fn from_str(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string(), lineno + 1));
        }
        let scenario = pairs
            .iter()
            .find(|(k, _, _)| k == "scenario")
            .map(|(_, v, _)| Scenario::parse(v))
            .transpose()?
            .unwrap_or(Scenario::Custom);
        let mut config = Self::preset(scenario);
        for (key, value, lineno) in &pairs {
            config
                .set(key, value)
                .map_err(|e| Error::Config(format!("line {lineno}, key '{key}': {e}")))?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Apply one key=value override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse '{value}'")))
        }
        match key {
            "scenario" => self.scenario = Scenario::parse(value)?,
            "dim" => self.dim = num(value)?,
            "n" => self.n = num(value)?,
            "l" => self.l = num(value)?,
            "rho" => self.rho = num(value)?,
            "mu" => self.mu = num(value)?,
            "method" => {
                self.method = match value {
                    "dfib" => Method::Dfib,
                    "ibmac" => Method::Ibmac,
                    other => return Err(Error::Config(format!("unknown method '{other}'"))),
                }
            }
            "kernel" => self.kernel = value.to_string(),
            "gamma" => self.gamma = num(value)?,
            "kappa" => self.kappa = num(value)?,
            "k_c" => self.k_c = num(value)?,
            "tau" => self.tau = num(value)?,
            "omega0" => self.omega0 = num(value)?,
            "p" => self.p = num(value)?,
            "eps0" => self.eps0 = num(value)?,
            "r" => self.r = num(value)?,
            "level" => self.level = Some(num(value)?),
            "h_s" => self.h_s = Some(value.to_string()),
            "m" => self.m = Some(num(value)?),
            "dt" => self.dt = value.to_string(),
            "t_end" => self.t_end = num(value)?,
            "tracer_multiplier" => self.tracer_multiplier = num(value)?,
            "initial_flow" => {
                self.initial_flow = match value {
                    "zero" => InitialFlow::Zero,
                    "shear_y" => InitialFlow::ShearY,
                    other => return Err(Error::Config(format!("unknown initial_flow '{other}'"))),
                }
            }
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "sample_every" => self.sample_every = num(value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn dt_value(&self) -> Result<f64> {
        parse_length(&self.dt, self.h())
    }

    pub fn h_s_value(&self) -> Result<Option<f64>> {
        self.h_s
            .as_deref()
            .map(|s| parse_length(s, self.h()))
            .transpose()
    }

    /// The resolved configuration in the same key=value format.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("scenario", self.scenario.name().to_string());
        kv("dim", self.dim.to_string());
        kv("n", self.n.to_string());
        kv("l", format!("{}", self.l));
        kv("rho", format!("{}", self.rho));
        kv("mu", format!("{}", self.mu));
        kv("method", self.method.name().to_string());
        kv("kernel", self.kernel.clone());
        match self.scenario {
            Scenario::SurfaceTension2d | Scenario::Sphere3d => kv("gamma", format!("{}", self.gamma)),
            Scenario::QuasiStaticCircle | Scenario::Custom => kv("kappa", format!("{}", self.kappa)),
            Scenario::ParametricMembrane => {
                kv("k_c", format!("{}", self.k_c));
                kv("tau", format!("{}", self.tau));
                kv("omega0", format!("{}", self.omega0));
                kv("p", self.p.to_string());
                kv("eps0", format!("{}", self.eps0));
            }
        }
        if self.scenario != Scenario::SurfaceTension2d {
            kv("r", format!("{}", self.r));
        }
        if let Some(level) = self.level {
            kv("level", level.to_string());
        }
        if let Some(h_s) = &self.h_s {
            kv("h_s", h_s.clone());
        }
        if let Some(m) = self.m {
            kv("m", m.to_string());
        }
        kv("dt", self.dt.clone());
        kv("t_end", format!("{}", self.t_end));
        kv("tracer_multiplier", self.tracer_multiplier.to_string());
        kv(
            "initial_flow",
            match self.initial_flow {
                InitialFlow::Zero => "zero".to_string(),
                InitialFlow::ShearY => "shear_y".to_string(),
            },
        );
        kv("sample_every", self.sample_every.to_string());
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::Config(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if self.scenario == Scenario::Sphere3d && self.dim != 3 {
            return Err(Error::Config("sphere_3d requires dim = 3".to_string()));
        }
        if self.scenario != Scenario::Sphere3d && self.dim != 2 {
            return Err(Error::Config(format!(
                "{} requires dim = 2",
                self.scenario.name()
            )));
        }
        if self.n < 4 {
            return Err(Error::Config(format!("n must be >= 4, got {}", self.n)));
        }
        if !(self.l > 0.0) || !(self.rho > 0.0) || !(self.mu > 0.0) {
            return Err(Error::Config("l, rho, mu must be positive".to_string()));
        }
        let dt = self.dt_value()?;
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if self.t_end < 0.0 {
            return Err(Error::Config("t_end must be nonnegative".to_string()));
        }
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be >= 1".to_string()));
        }
        Kernel::by_name(&self.kernel)
            .ok_or_else(|| Error::Config(format!("unknown kernel '{}'", self.kernel)))?;
        Ok(())
    }
}

/// Parse a length that may reference the meshwidth: "h", "h/4", "2h",
/// "2h/5", or a plain number.
pub fn parse_length(expr: &str, h: f64) -> Result<f64> {
    let s = expr.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim(),
            d.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad length '{expr}'")))?,
        ),
        None => (s, 1.0),
    };
    let coeff = match num.strip_suffix('h') {
        Some("") => 1.0,
        Some(c) => c
            .trim_end_matches('*')
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad length '{expr}'")))?,
        None => return Err(Error::Config(format!("bad length '{expr}'"))),
    };
    Ok(coeff * h / den)
}

/// Everything produced by one run, for both the CLI and the test harness.
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub timeseries: TimeSeries,
    pub summary: serde_json::Value,
    pub markers: Vec<[f64; 3]>,
    pub tracers: Vec<[f64; 3]>,
    pub u: StaggeredField,
    pub totals: StepCounters,
    pub per_step: StepCounters,
    pub steps: usize,
}

enum Structure {
    Curve {
        shape: Box<dyn Fn(f64) -> [f64; 3]>,
        curve: ClosedCurve,
        true_area: f64,
    },
    Mesh(TriMesh),
}

fn build_structure(config: &ScenarioConfig) -> Result<Structure> {
    let l = config.l;
    let center = [l / 2.0, l / 2.0, if config.dim == 3 { l / 2.0 } else { 0.0 }];
    match config.scenario {
        Scenario::SurfaceTension2d => {
            let (a, b) = (5.0 * l / 28.0, 7.0 * l / 20.0);
            let m = resolve_marker_count(config, ellipse_perimeter(a, b))?
                .unwrap_or((std::f64::consts::PI * config.n as f64).ceil() as usize);
            let shape = move |s: f64| [center[0] + a * s.cos(), center[1] + b * s.sin(), 0.0];
            Ok(Structure::Curve {
                curve: make_ellipse(center, a, b, m)?,
                shape: Box::new(shape),
                true_area: std::f64::consts::PI * a * b,
            })
        }
        Scenario::QuasiStaticCircle | Scenario::Custom => {
            let r = config.r;
            let m = resolve_marker_count(config, 2.0 * std::f64::consts::PI * r)?
                .unwrap_or((2.0 * std::f64::consts::PI * r / (config.h() / 2.0)).round() as usize);
            let shape = move |s: f64| [center[0] + r * s.cos(), center[1] + r * s.sin(), 0.0];
            Ok(Structure::Curve {
                curve: make_ellipse(center, r, r, m)?,
                shape: Box::new(shape),
                true_area: std::f64::consts::PI * r * r,
            })
        }
        Scenario::ParametricMembrane => {
            let (r, eps0, p) = (config.r, config.eps0, config.p);
            // Perimeter of the perturbed circle, by dense polygonal sampling.
            let probe = sample_closed(
                |s| perturbed_point(center, r, eps0, p, s),
                8192,
            );
            let mut perim = 0.0;
            for k in 0..probe.len() {
                let (a, b) = (probe[k], probe[(k + 1) % probe.len()]);
                perim += ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            }
            let m = resolve_marker_count(config, perim)?
                .unwrap_or((perim / (config.h() / 2.0)).round() as usize);
            let shape = move |s: f64| perturbed_point(center, r, eps0, p, s);
            // Exact area of r(s) = R(1 + eps cos(p s)).
            let true_area = std::f64::consts::PI * r * r * (1.0 + eps0 * eps0 / 2.0);
            Ok(Structure::Curve {
                curve: make_perturbed_circle(center, r, eps0, p, m)?,
                shape: Box::new(shape),
                true_area,
            })
        }
        Scenario::Sphere3d => {
            let level = match config.level {
                Some(level) => level,
                None => {
                    let target = config.h_s_value()?.unwrap_or(config.h() / 2.0);
                    best_icosphere_level(config.r, target)
                }
            };
            Ok(Structure::Mesh(make_icosphere(center, config.r, level)))
        }
    }
}

fn perturbed_point(center: [f64; 3], r: f64, eps0: f64, p: usize, s: f64) -> [f64; 3] {
    let rs = r * (1.0 + eps0 * (p as f64 * s).cos());
    [center[0] + rs * s.cos(), center[1] + rs * s.sin(), 0.0]
}

fn resolve_marker_count(config: &ScenarioConfig, perimeter: f64) -> Result<Option<usize>> {
    if let Some(m) = config.m {
        return Ok(Some(m));
    }
    if let Some(h_s) = config.h_s_value()? {
        return Ok(Some((perimeter / h_s).round().max(3.0) as usize));
    }
    Ok(None)
}

fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    // Dense polygonal approximation; only used to pick a marker count.
    let n = 8192;
    let mut perim = 0.0;
    let mut prev = [a, 0.0];
    for k in 1..=n {
        let s = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let cur = [a * s.cos(), b * s.sin()];
        perim += ((cur[0] - prev[0]).powi(2) + (cur[1] - prev[1]).powi(2)).sqrt();
        prev = cur;
    }
    perim
}

fn best_icosphere_level(r: f64, target_edge: f64) -> usize {
    // Icosahedron edge length for unit circumradius.
    let base_edge = 4.0 / (10.0 + 2.0 * 5.0_f64.sqrt()).sqrt();
    (0..=8)
        .min_by(|&a, &b| {
            let ea = (base_edge * r / 2.0_f64.powi(a as i32) - target_edge).abs();
            let eb = (base_edge * r / 2.0_f64.powi(b as i32) - target_edge).abs();
            ea.partial_cmp(&eb).unwrap()
        })
        .unwrap_or(5)
}

/// Execute one scenario: build the structure and initial flow, bootstrap,
/// step to t_end sampling diagnostics, and (if an output directory is
/// configured) write timeseries.csv, summary.json, and counters.csv.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let geom = GridGeometry::new(config.dim, config.n, config.l)?;
    let kernel = Kernel::by_name(&config.kernel)
        .ok_or_else(|| Error::Config(format!("unknown kernel '{}'", config.kernel)))?;
    let dt = config.dt_value()?;
    let structure = build_structure(config)?;

    let (markers, force, shape_info): (_, crate::stepper::ForceFn, _) = match &structure {
        Structure::Curve {
            curve,
            shape,
            true_area,
        } => {
            let markers = curve.markers.clone();
            let l = config.l;
            let force: crate::stepper::ForceFn = match config.scenario {
                Scenario::SurfaceTension2d => {
                    let gamma = config.gamma;
                    Box::new(move |positions: &[[f64; 3]], _t: f64| {
                        let curve = ClosedCurve::new(positions.to_vec())?;
                        let ds = 2.0 * std::f64::consts::PI / positions.len() as f64;
                        let mut f = surface_tension_force_2d(&curve, gamma, l)?;
                        for v in f.iter_mut() {
                            v[0] /= ds;
                            v[1] /= ds;
                        }
                        Ok(f)
                    })
                }
                Scenario::ParametricMembrane => {
                    let (k_c, tau, omega0) = (config.k_c, config.tau, config.omega0);
                    Box::new(move |positions: &[[f64; 3]], t: f64| {
                        let curve = ClosedCurve::new(positions.to_vec())?;
                        Ok(spring_force(&curve, parametric_stiffness(k_c, tau, omega0, t)))
                    })
                }
                _ => {
                    let kappa = config.kappa;
                    Box::new(move |positions: &[[f64; 3]], _t: f64| {
                        let curve = ClosedCurve::new(positions.to_vec())?;
                        Ok(spring_force(&curve, kappa))
                    })
                }
            };
            (markers, force, Some((shape, *true_area)))
        }
        Structure::Mesh(mesh) => {
            let markers = mesh.markers.clone();
            let triangles = mesh.triangles.clone();
            let gamma = config.gamma;
            let level = mesh.level;
            let force: crate::stepper::ForceFn = Box::new(move |positions: &[[f64; 3]], _t: f64| {
                let mesh = TriMesh {
                    markers: crate::coupling::MarkerSet {
                        positions: positions.to_vec(),
                        weights: vec![1.0; positions.len()],
                    },
                    triangles: triangles.clone(),
                    level,
                };
                surface_tension_force_3d(&mesh, gamma)
            });
            (markers, force, None)
        }
    };

    let mut sim = SimState::new(
        geom,
        config.method,
        kernel,
        config.rho,
        config.mu,
        dt,
        markers,
        force,
    );

    if config.tracer_multiplier > 0 {
        if let Some((shape, _)) = &shape_info {
            sim.tracers = sample_closed(shape, sim.markers.len() * config.tracer_multiplier);
        }
    }

    if config.initial_flow == InitialFlow::ShearY {
        sim.u = StaggeredField::from_fn(geom, Subgrid::Face, |comp, x| {
            if comp == 1 {
                (4.0 * std::f64::consts::PI * x[0]).sin()
            } else {
                0.0
            }
        });
    }

    let center = [
        config.l / 2.0,
        config.l / 2.0,
        if config.dim == 3 { config.l / 2.0 } else { 0.0 },
    ];
    let mesh_topology = match &structure {
        Structure::Mesh(mesh) => Some((mesh.triangles.clone(), mesh.level)),
        _ => None,
    };
    let make_mesh = |positions: &[[f64; 3]]| {
        let (triangles, level) = mesh_topology.as_ref().unwrap();
        TriMesh {
            markers: crate::coupling::MarkerSet {
                positions: positions.to_vec(),
                weights: vec![1.0; positions.len()],
            },
            triangles: triangles.clone(),
            level: *level,
        }
    };

    let mut ts = if config.dim == 2 {
        TimeSeries::new(&[
            "area_error",
            "area_error_spline",
            "tracer_area_error",
            "max_velocity",
            "mode_amplitude",
        ])
    } else {
        TimeSeries::new(&["volume_error", "max_velocity"])
    };

    let area0_polygon;
    let area0_spline;
    let volume0;
    let true_area = shape_info.as_ref().map(|(_, a)| *a).unwrap_or(0.0);
    match &structure {
        Structure::Curve { .. } => {
            area0_polygon = polygon_area(&sim.markers.positions);
            area0_spline = spline_area(&sim.markers.positions)?;
            volume0 = 0.0;
        }
        Structure::Mesh(_) => {
            area0_polygon = 0.0;
            area0_spline = 0.0;
            volume0 = mesh_volume(&make_mesh(&sim.markers.positions));
        }
    }

    let sample = |sim: &SimState, ts: &mut TimeSeries| -> Result<()> {
        if config.dim == 2 {
            let ap = polygon_area(&sim.markers.positions);
            let asp = spline_area(&sim.markers.positions)?;
            let tracer_err = if sim.tracers.is_empty() {
                0.0
            } else {
                (spline_area(&sim.tracers)? - true_area).abs() / true_area
            };
            let amp = mode_amplitude(&sim.markers.positions, center, config.p);
            ts.push(
                sim.t,
                &[
                    (ap - area0_polygon).abs() / area0_polygon,
                    (asp - area0_spline).abs() / area0_spline,
                    tracer_err,
                    sim.u.linf(),
                    amp,
                ],
            );
        } else {
            let v = mesh_volume(&make_mesh(&sim.markers.positions));
            ts.push(sim.t, &[(v - volume0).abs() / volume0, sim.u.linf()]);
        }
        Ok(())
    };

    let nsteps = (config.t_end / dt).round() as usize;
    sample(&sim, &mut ts)?;
    let mut after_first = StepCounters::default();
    for step in 0..nsteps {
        sim.step()?;
        if step == 0 {
            after_first = sim.counters();
        }
        if (step + 1) % config.sample_every == 0 || step + 1 == nsteps {
            sample(&sim, &mut ts)?;
        }
    }

    let totals = sim.counters();
    let per_step = if nsteps > 1 {
        StepCounters {
            scalar_poisson_solves: (totals.scalar_poisson_solves - after_first.scalar_poisson_solves)
                / (nsteps - 1),
            scalar_transfers: (totals.scalar_transfers - after_first.scalar_transfers)
                / (nsteps - 1),
        }
    } else {
        totals
    };

    let wall_time = start.elapsed().as_secs_f64();
    let final_error = if config.dim == 2 {
        ts.last("area_error").unwrap_or(0.0)
    } else {
        ts.last("volume_error").unwrap_or(0.0)
    };
    let summary = serde_json::json!({
        "scenario": config.scenario.name(),
        "method": config.method.name(),
        "kernel": config.kernel,
        "dim": config.dim,
        "n": config.n,
        "dt": dt,
        "t_end": config.t_end,
        "steps": nsteps,
        "markers": sim.markers.len(),
        "tracers": sim.tracers.len(),
        "final_area_error": if config.dim == 2 { final_error } else { 0.0 },
        "final_volume_error": if config.dim == 3 { final_error } else { 0.0 },
        "final_tracer_area_error": ts.last("tracer_area_error").unwrap_or(0.0),
        "max_spurious_velocity": ts.max("max_velocity").unwrap_or(0.0),
        "wall_time_seconds": wall_time,
        "scalar_poisson_solves_total": totals.scalar_poisson_solves,
        "scalar_transfers_total": totals.scalar_transfers,
        "scalar_poisson_solves_per_step": per_step.scalar_poisson_solves,
        "scalar_transfers_per_step": per_step.scalar_transfers,
    });

    let out = RunOutput {
        config: config.clone(),
        timeseries: ts,
        summary,
        markers: sim.markers.positions.clone(),
        tracers: sim.tracers.clone(),
        u: sim.u.clone(),
        totals,
        per_step,
        steps: nsteps,
    };
    if let Some(dir) = &config.output_dir {
        write_outputs(dir, &out)?;
    }
    Ok(out)
}

fn write_outputs(dir: &Path, out: &RunOutput) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Config(format!("cannot write outputs: {e}"));
    std::fs::create_dir_all(dir).map_err(io_err)?;
    std::fs::write(dir.join("timeseries.csv"), out.timeseries.to_csv()).map_err(io_err)?;
    std::fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&out.summary).unwrap(),
    )
    .map_err(io_err)?;
    let counters = format!(
        "method,dim,steps,scalar_poisson_solves_total,scalar_transfers_total,\
         scalar_poisson_solves_per_step,scalar_transfers_per_step\n\
         {},{},{},{},{},{},{}\n",
        out.config.method.name(),
        out.config.dim,
        out.steps,
        out.totals.scalar_poisson_solves,
        out.totals.scalar_transfers,
        out.per_step.scalar_poisson_solves,
        out.per_step.scalar_transfers,
    );
    std::fs::write(dir.join("counters.csv"), counters).map_err(io_err)?;
    Ok(())
}

/// Run the scenario once per method and write a side-by-side CSV of the
/// primary error channel and the velocity magnitude.
pub fn compare(config: &ScenarioConfig) -> Result<(RunOutput, RunOutput)> {
    let mut dfib_config = config.clone();
    dfib_config.method = Method::Dfib;
    let mut ibmac_config = config.clone();
    ibmac_config.method = Method::Ibmac;
    if let Some(dir) = &config.output_dir {
        dfib_config.output_dir = Some(dir.join("dfib"));
        ibmac_config.output_dir = Some(dir.join("ibmac"));
    }
    let a = run(&dfib_config)?;
    let b = run(&ibmac_config)?;
    if let Some(dir) = &config.output_dir {
        let err_col = if config.dim == 2 { "area_error" } else { "volume_error" };
        let idx = a
            .timeseries
            .columns
            .iter()
            .position(|c| c == err_col)
            .unwrap();
        let vidx = a
            .timeseries
            .columns
            .iter()
            .position(|c| c == "max_velocity")
            .unwrap();
        let mut csv = format!("t,{err_col}_dfib,{err_col}_ibmac,max_velocity_dfib,max_velocity_ibmac\n");
        for (ra, rb) in a.timeseries.rows.iter().zip(&b.timeseries.rows) {
            let _ = writeln!(
                csv,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                ra[0], ra[idx], rb[idx], ra[vidx], rb[vidx]
            );
        }
        std::fs::write(dir.join("compare.csv"), csv)
            .map_err(|e| Error::Config(format!("cannot write compare.csv: {e}")))?;
    }
    Ok((a, b))
}
