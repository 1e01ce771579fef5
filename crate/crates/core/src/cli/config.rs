//! Run configuration: INI-style sections, defaults, validation and the
//! manifest echo.
//!
//! Sections and keys (defaults in parentheses):
//!
//! - `[geometry]` `kind` (required: `sphere`, `cone_capped`, `spindle`),
//!   `radius` (1), `c` (1), `c2` (1), `L` (2), `M` (128), `q` (0.85), `K` (8)
//! - `[dynamics]` `dt` (1e-3), `S` (2), `adaptive_S` (true), `T_max` (1000),
//!   `eq_tol` (1e-8), `seed` (0), `u0` (`random` or `zero`), `amplitude`
//!   (0.5), `snapshot_stride` (100), `field_stride` (0)
//! - `[norms]` `gamma` (-0.75), `pairs` (`0:-0.75, 1:-0.75`)
//! - `[experiment]` `cutoff` (0 = automatic), `convention` (`solution`),
//!   `count` (8), `mode` (1), `window` (`auto` or `a,b`), `source`
//!   (`probe`, `random` or a snapshot path), `exponent` (0.5), `radii`
//!   (`1, 10`), `seeds` (4), `level` (`auto`), `tail_fraction` (0.5),
//!   `sample_stride` (10)
//! - `[run]` (manifest only) `command`, `version`, `timestamp`, `seed`,
//!   `allow_out_of_window`, `warnings`
//! - `[summary]` (manifest only) ignored on input.
//!
//! `c` and `c2` are kept as text so that fractions such as `1/3` stay exact.

use std::fmt::Write as _;
use std::path::Path;

use ini::Ini;
use thiserror::Error;

use crate::exact::{from_f64, parse_rational};
use crate::geometry::{BoundarySpectrum, ConeOpening, ProfileKind, RadialMesh, SurfaceProfile};
use crate::indicial::{ch_gamma_window, ExponentConvention, GammaWindow};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {reason}")]
    Read { path: String, reason: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key {section}.{key}")]
    UnknownKey { section: String, key: String },
    #[error("missing required key {0}")]
    Missing(&'static str),
    #[error("{field}: cannot parse {value:?} ({reason})")]
    Parse {
        field: String,
        value: String,
        reason: String,
    },
    #[error("{field} = {value}: {reason}")]
    Invalid {
        field: String,
        value: String,
        reason: String,
    },
    #[error("{field} = {gamma} lies outside the CH gamma window {window}; pass --allow-out-of-window to override")]
    OutOfWindow {
        field: String,
        gamma: f64,
        window: String,
    },
    #[error("override {0:?} must look like section.key=value")]
    Override(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub kind: ProfileKind,
    pub radius: f64,
    pub c: String,
    pub c2: String,
    pub length: f64,
    pub cells: usize,
    pub q: f64,
    pub modes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    Random,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub dt: f64,
    pub stab: f64,
    pub adaptive_stab: bool,
    pub t_max: f64,
    pub eq_tol: f64,
    pub seed: u64,
    pub u0: InitialData,
    pub amplitude: f64,
    pub snapshot_stride: usize,
    pub field_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormsConfig {
    /// Working weight: diagnostics, indicial report, attractor proxy.
    pub gamma: f64,
    pub pairs: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSource {
    Probe,
    Random,
    Snapshot(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub cutoff: usize,
    pub convention: ExponentConvention,
    pub count: usize,
    pub mode: usize,
    pub window: Option<(f64, f64)>,
    pub source: FieldSource,
    pub exponent: f64,
    pub radii: Vec<f64>,
    pub seeds: usize,
    pub level: Option<f64>,
    pub tail_fraction: f64,
    pub sample_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub dynamics: DynamicsConfig,
    pub norms: NormsConfig,
    pub experiment: ExperimentConfig,
    pub allow_out_of_window: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig {
                kind: ProfileKind::Sphere,
                radius: 1.0,
                c: "1".into(),
                c2: "1".into(),
                length: 2.0,
                cells: 128,
                q: 0.85,
                modes: 8,
            },
            dynamics: DynamicsConfig {
                dt: 1e-3,
                stab: 2.0,
                adaptive_stab: true,
                t_max: 1e3,
                eq_tol: 1e-8,
                seed: 0,
                u0: InitialData::Random,
                amplitude: 0.5,
                snapshot_stride: 100,
                field_stride: 0,
            },
            norms: NormsConfig {
                gamma: -0.75,
                pairs: vec![(0, -0.75), (1, -0.75)],
            },
            experiment: ExperimentConfig {
                cutoff: 0,
                convention: ExponentConvention::Solution,
                count: 8,
                mode: 1,
                window: None,
                source: FieldSource::Probe,
                exponent: 0.5,
                radii: vec![1.0, 10.0],
                seeds: 4,
                level: None,
                tail_fraction: 0.5,
                sample_stride: 10,
            },
            allow_out_of_window: false,
        }
    }
}

fn parse_err(field: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Parse {
        field: field.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn invalid(field: &str, value: impl ToString, reason: &str) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn num<T: std::str::FromStr>(field: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| parse_err(field, v, e))
}

fn flag(field: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(field, v, "expected true or false")),
    }
}

fn list_f64(field: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| num::<f64>(field, t))
        .collect()
}

fn auto_or<T>(v: &str, f: impl FnOnce(&str) -> Result<T, ConfigError>) -> Result<Option<T>, ConfigError> {
    if v.trim() == "auto" {
        Ok(None)
    } else {
        f(v).map(Some)
    }
}

/// `{:.16e}`: 17 significant digits, exact round trip.
fn f(x: f64) -> String {
    format!("{:.16e}", x)
}

impl RunConfig {
    /// Applies one `key = value` in `section`.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let field = format!("{section}.{key}");
        let field = field.as_str();
        let v = value.trim();
        let unknown = || ConfigError::UnknownKey {
            section: section.to_string(),
            key: key.to_string(),
        };
        match section {
            "geometry" => {
                let g = &mut self.geometry;
                match key {
                    "kind" => g.kind = v.parse().map_err(|e| parse_err(field, v, e))?,
                    "radius" => g.radius = num(field, v)?,
                    "c" => g.c = v.to_string(),
                    "c2" => g.c2 = v.to_string(),
                    "L" => g.length = num(field, v)?,
                    "M" => g.cells = num(field, v)?,
                    "q" => g.q = num(field, v)?,
                    "K" => g.modes = num(field, v)?,
                    _ => return Err(unknown()),
                }
            }
            "dynamics" => {
                let d = &mut self.dynamics;
                match key {
                    "dt" => d.dt = num(field, v)?,
                    "S" => d.stab = num(field, v)?,
                    "adaptive_S" => d.adaptive_stab = flag(field, v)?,
                    "T_max" => d.t_max = num(field, v)?,
                    "eq_tol" => d.eq_tol = num(field, v)?,
                    "seed" => d.seed = num(field, v)?,
                    "u0" => {
                        d.u0 = match v {
                            "random" => InitialData::Random,
                            "zero" => InitialData::Zero,
                            _ => return Err(parse_err(field, v, "expected random or zero")),
                        }
                    }
                    "amplitude" => d.amplitude = num(field, v)?,
                    "snapshot_stride" => d.snapshot_stride = num(field, v)?,
                    "field_stride" => d.field_stride = num(field, v)?,
                    _ => return Err(unknown()),
                }
            }
            "norms" => match key {
                "gamma" => self.norms.gamma = num(field, v)?,
                "pairs" => {
                    self.norms.pairs = v
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(|t| {
                            let (s, g) = t
                                .split_once(':')
                                .ok_or_else(|| parse_err(field, t, "expected s:gamma"))?;
                            Ok((num(field, s)?, num(field, g)?))
                        })
                        .collect::<Result<_, ConfigError>>()?;
                }
                _ => return Err(unknown()),
            },
            "experiment" => {
                let e = &mut self.experiment;
                match key {
                    "cutoff" => e.cutoff = num(field, v)?,
                    "convention" => {
                        e.convention = match v {
                            "solution" => ExponentConvention::Solution,
                            "reciprocal" => ExponentConvention::Reciprocal,
                            _ => return Err(parse_err(field, v, "expected solution or reciprocal")),
                        }
                    }
                    "count" => e.count = num(field, v)?,
                    "mode" => e.mode = num(field, v)?,
                    "window" => {
                        e.window = auto_or(v, |t| {
                            let ab = list_f64(field, t)?;
                            match ab[..] {
                                [a, b] => Ok((a, b)),
                                _ => Err(parse_err(field, t, "expected two numbers a,b")),
                            }
                        })?
                    }
                    "source" => {
                        e.source = match v {
                            "probe" => FieldSource::Probe,
                            "random" => FieldSource::Random,
                            path => FieldSource::Snapshot(path.to_string()),
                        }
                    }
                    "exponent" => e.exponent = num(field, v)?,
                    "radii" => e.radii = list_f64(field, v)?,
                    "seeds" => e.seeds = num(field, v)?,
                    "level" => e.level = auto_or(v, |t| num(field, t))?,
                    "tail_fraction" => e.tail_fraction = num(field, v)?,
                    "sample_stride" => e.sample_stride = num(field, v)?,
                    _ => return Err(unknown()),
                }
            }
            "run" => match key {
                "allow_out_of_window" => self.allow_out_of_window = flag(field, v)?,
                "command" | "version" | "timestamp" | "seed" | "warnings" => {}
                _ => return Err(unknown()),
            },
            "summary" => {}
            other => return Err(ConfigError::UnknownSection(other.to_string())),
        }
        Ok(())
    }

    /// Parses INI text over the defaults. `geometry.kind` is required.
    pub fn from_ini_str(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| ConfigError::Read {
            path: "<config>".into(),
            reason: e.to_string(),
        })?;
        let mut cfg = Self::default();
        let mut has_kind = false;
        for (section, props) in &ini {
            let Some(section) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(ConfigError::UnknownKey {
                        section: String::new(),
                        key: key.to_string(),
                    });
                }
                continue;
            };
            for (key, value) in props.iter() {
                has_kind |= section == "geometry" && key == "kind";
                cfg.set(section, key, value)?;
            }
        }
        if !has_kind {
            return Err(ConfigError::Missing("geometry.kind"));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_ini_str(&text)
    }

    /// Applies `section.key=value`.
    pub fn apply_override(&mut self, text: &str) -> Result<(), ConfigError> {
        let (lhs, value) = text
            .split_once('=')
            .ok_or_else(|| ConfigError::Override(text.to_string()))?;
        let (section, key) = lhs
            .trim()
            .split_once('.')
            .ok_or_else(|| ConfigError::Override(text.to_string()))?;
        self.set(section, key, value)
    }

    pub fn opening(&self) -> Result<ConeOpening, ConfigError> {
        ConeOpening::parse(&self.geometry.c).map_err(|e| invalid("geometry.c", &self.geometry.c, &e.to_string()))
    }

    pub fn profile(&self) -> Result<SurfaceProfile, ConfigError> {
        let g = &self.geometry;
        let as_invalid = |field: &str, e: crate::geometry::GeometryError| invalid(field, "", &e.to_string());
        match g.kind {
            ProfileKind::Sphere => SurfaceProfile::build(ProfileKind::Sphere, &[g.radius])
                .map_err(|e| as_invalid("geometry.radius", e)),
            ProfileKind::ConeCapped => {
                SurfaceProfile::build_exact(g.kind, Some(self.opening()?), None, g.length)
                    .map_err(|e| as_invalid("geometry", e))
            }
            ProfileKind::Spindle => {
                let c2 = ConeOpening::parse(&g.c2).map_err(|e| invalid("geometry.c2", &g.c2, &e.to_string()))?;
                SurfaceProfile::build_exact(g.kind, Some(self.opening()?), Some(c2), g.length)
                    .map_err(|e| as_invalid("geometry", e))
            }
        }
    }

    pub fn mesh(&self) -> Result<RadialMesh, ConfigError> {
        RadialMesh::build(&self.profile()?, self.geometry.cells, self.geometry.q)
            .map_err(|e| invalid("geometry.M", self.geometry.cells, &e.to_string()))
    }

    /// The CH window of the tip at `s = 0` (`n = 1`).
    pub fn ch_window(&self) -> Result<GammaWindow, ConfigError> {
        let profile = self.profile()?;
        let spectrum = BoundarySpectrum::of_profile(&profile, 1);
        let lambda1 = spectrum.mode_value(1).cloned().expect("mode 1 within cutoff");
        ch_gamma_window(1, &lambda1).map_err(|e| invalid("geometry.c", &self.geometry.c, &e.to_string()))
    }

    /// Checks every invariant; returns warnings for tolerated out-of-window
    /// weights.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let g = &self.geometry;
        let d = &self.dynamics;
        let e = &self.experiment;
        let positive = |field: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, x, "must be positive and finite"))
            }
        };
        if g.cells < 2 {
            return Err(invalid("geometry.M", g.cells, "need at least 2 cells"));
        }
        if g.modes == 0 {
            return Err(invalid("geometry.K", g.modes, "must be positive"));
        }
        if !(g.q > 0.0 && g.q <= 1.0) {
            return Err(invalid("geometry.q", g.q, "grading ratio must lie in (0, 1]"));
        }
        positive("dynamics.dt", d.dt)?;
        positive("dynamics.eq_tol", d.eq_tol)?;
        positive("dynamics.amplitude", d.amplitude)?;
        if !(d.stab >= 0.0 && d.stab.is_finite()) {
            return Err(invalid("dynamics.S", d.stab, "must be nonnegative"));
        }
        if !(d.t_max >= 0.0 && d.t_max.is_finite()) {
            return Err(invalid("dynamics.T_max", d.t_max, "must be nonnegative and finite"));
        }
        if d.snapshot_stride == 0 {
            return Err(invalid("dynamics.snapshot_stride", 0, "must be at least 1"));
        }
        if e.count == 0 {
            return Err(invalid("experiment.count", 0, "must be positive"));
        }
        if e.seeds < 2 {
            return Err(invalid("experiment.seeds", e.seeds, "need at least 2 members per radius"));
        }
        if e.radii.is_empty() || e.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(invalid("experiment.radii", format!("{:?}", e.radii), "radii must be positive"));
        }
        if !(e.tail_fraction > 0.0 && e.tail_fraction <= 1.0) {
            return Err(invalid("experiment.tail_fraction", e.tail_fraction, "must lie in (0, 1]"));
        }
        if e.sample_stride == 0 {
            return Err(invalid("experiment.sample_stride", 0, "must be at least 1"));
        }
        if e.mode > g.modes {
            return Err(invalid("experiment.mode", e.mode, "exceeds geometry.K"));
        }
        if let Some(level) = e.level {
            positive("experiment.level", level)?;
        }
        self.mesh()?;

        let window = self.ch_window()?;
        let (lo, hi) = window.to_f64();
        let shown = format!("({}, {})", lo, hi);
        let mut warnings = Vec::new();
        let mut gammas = vec![("norms.gamma".to_string(), self.norms.gamma)];
        gammas.extend(
            self.norms
                .pairs
                .iter()
                .map(|(s, g)| (format!("norms.pairs[{s}]"), *g)),
        );
        for (field, gamma) in gammas {
            let exact = from_f64(gamma).ok_or_else(|| invalid(&field, gamma, "must be finite"))?;
            if !window.contains(&exact) {
                if self.allow_out_of_window {
                    warnings.push(format!("{field} = {gamma} outside CH gamma window {shown}"));
                } else {
                    return Err(ConfigError::OutOfWindow {
                        field,
                        gamma,
                        window: shown,
                    });
                }
            }
        }
        if parse_rational(&g.c).is_none() {
            return Err(invalid("geometry.c", &g.c, "not a number"));
        }
        Ok(warnings)
    }

    /// Sections `[geometry]` … `[experiment]` with every key, in fixed order.
    pub fn to_ini_sections(&self) -> String {
        let g = &self.geometry;
        let d = &self.dynamics;
        let e = &self.experiment;
        let mut s = String::new();
        let _ = writeln!(s, "[geometry]");
        let _ = writeln!(s, "kind = {}", g.kind.name());
        let _ = writeln!(s, "radius = {}", f(g.radius));
        let _ = writeln!(s, "c = {}", g.c);
        let _ = writeln!(s, "c2 = {}", g.c2);
        let _ = writeln!(s, "L = {}", f(g.length));
        let _ = writeln!(s, "M = {}", g.cells);
        let _ = writeln!(s, "q = {}", f(g.q));
        let _ = writeln!(s, "K = {}", g.modes);
        let _ = writeln!(s, "\n[dynamics]");
        let _ = writeln!(s, "dt = {}", f(d.dt));
        let _ = writeln!(s, "S = {}", f(d.stab));
        let _ = writeln!(s, "adaptive_S = {}", d.adaptive_stab);
        let _ = writeln!(s, "T_max = {}", f(d.t_max));
        let _ = writeln!(s, "eq_tol = {}", f(d.eq_tol));
        let _ = writeln!(s, "seed = {}", d.seed);
        let _ = writeln!(
            s,
            "u0 = {}",
            match d.u0 {
                InitialData::Random => "random",
                InitialData::Zero => "zero",
            }
        );
        let _ = writeln!(s, "amplitude = {}", f(d.amplitude));
        let _ = writeln!(s, "snapshot_stride = {}", d.snapshot_stride);
        let _ = writeln!(s, "field_stride = {}", d.field_stride);
        let _ = writeln!(s, "\n[norms]");
        let _ = writeln!(s, "gamma = {}", f(self.norms.gamma));
        let pairs: Vec<String> = self.norms.pairs.iter().map(|(k, g)| format!("{k}:{}", f(*g))).collect();
        let _ = writeln!(s, "pairs = {}", pairs.join(", "));
        let _ = writeln!(s, "\n[experiment]");
        let _ = writeln!(s, "cutoff = {}", e.cutoff);
        let _ = writeln!(
            s,
            "convention = {}",
            match e.convention {
                ExponentConvention::Solution => "solution",
                ExponentConvention::Reciprocal => "reciprocal",
            }
        );
        let _ = writeln!(s, "count = {}", e.count);
        let _ = writeln!(s, "mode = {}", e.mode);
        let _ = writeln!(
            s,
            "window = {}",
            e.window.map_or("auto".to_string(), |(a, b)| format!("{}, {}", f(a), f(b)))
        );
        let _ = writeln!(
            s,
            "source = {}",
            match &e.source {
                FieldSource::Probe => "probe",
                FieldSource::Random => "random",
                FieldSource::Snapshot(p) => p.as_str(),
            }
        );
        let _ = writeln!(s, "exponent = {}", f(e.exponent));
        let radii: Vec<String> = e.radii.iter().map(|r| f(*r)).collect();
        let _ = writeln!(s, "radii = {}", radii.join(", "));
        let _ = writeln!(s, "seeds = {}", e.seeds);
        let _ = writeln!(s, "level = {}", e.level.map_or("auto".to_string(), f));
        let _ = writeln!(s, "tail_fraction = {}", f(e.tail_fraction));
        let _ = writeln!(s, "sample_stride = {}", e.sample_stride);
        s
    }
}

/// The `[run]` header of a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInfo {
    pub command: String,
    pub version: String,
    pub timestamp: String,
    pub warnings: Vec<String>,
}

/// Full manifest text: `[run]` then the configuration.
pub fn manifest_text(cfg: &RunConfig, info: &RunInfo) -> String {
    let mut s = String::from("# conekit run manifest\n[run]\n");
    let _ = writeln!(s, "command = {}", info.command);
    let _ = writeln!(s, "version = {}", info.version);
    let _ = writeln!(s, "timestamp = {}", info.timestamp);
    let _ = writeln!(s, "seed = {}", cfg.dynamics.seed);
    let _ = writeln!(s, "allow_out_of_window = {}", cfg.allow_out_of_window);
    let _ = writeln!(s, "warnings = {}", info.warnings.join(" | "));
    s.push('\n');
    s.push_str(&cfg.to_ini_sections());
    s
}
