//! Model conic surfaces, their radial meshes and tip spectra.

mod mesh;
mod profile;
mod spectrum;

use thiserror::Error;

pub use mesh::{RadialMesh, DEFAULT_MIN_WIDTH_RATIO};
pub use profile::{ConeOpening, ProfileKind, SurfaceProfile, TipEnd};
pub use spectrum::{BoundaryEigenvalue, BoundarySpectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unknown profile kind `{0}` (expected sphere, cone_capped or spindle)")]
    UnknownKind(String),
    #[error("{kind} takes {expected} parameters, got {got}")]
    ParameterCount {
        kind: ProfileKind,
        expected: usize,
        got: usize,
    },
    #[error("parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
    #[error("radius vanishes in the interior near s = {s}")]
    VanishingRadius { s: f64 },
    #[error("profile does not close at s = L")]
    OpenSurface,
    #[error("mesh needs at least 4 cells, got {0}")]
    TooFewCells(usize),
    #[error("smallest cell width {width:e} underflows (limit 1e-14 L)")]
    CellUnderflow { width: f64 },
}
