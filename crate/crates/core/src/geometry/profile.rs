//! Surfaces of revolution with a conical tip at `s = 0`.
//!
//! A profile is the radius function `f(s)` of the rotation surface
//! `dx² + f(s)² dθ²`, parameterised by arclength `s ∈ [0, L]`. Near the tip
//! `f(s) = c·s`, which is the collar metric `dx² + x²(c² dθ²)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use super::GeometryError;
use crate::exact::parse_rational;

/// The named closed forms a profile can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// Round sphere of radius `R`: `f(s) = R sin(s/R)`, smooth at both poles.
    Sphere,
    /// Cone of opening `c` blended into a flat cap that closes smoothly at `s = L`.
    ConeCapped,
    /// Two conic tips of openings `c` and `c₂`.
    Spindle,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Sphere => "sphere",
            ProfileKind::ConeCapped => "cone_capped",
            ProfileKind::Spindle => "spindle",
        }
    }

    /// Names of the parameters, in the order `build` expects them.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ProfileKind::Sphere => &["radius"],
            ProfileKind::ConeCapped => &["c", "L"],
            ProfileKind::Spindle => &["c", "c2", "L"],
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sphere" => Ok(ProfileKind::Sphere),
            "cone_capped" => Ok(ProfileKind::ConeCapped),
            "spindle" => Ok(ProfileKind::Spindle),
            other => Err(GeometryError::UnknownKind(other.to_string())),
        }
    }
}

/// What closes the surface at `s = L`.
#[derive(Debug, Clone, PartialEq)]
pub enum TipEnd {
    /// A second conical point with the given opening.
    Conic(f64),
    /// A smooth pole, `|f'(L)| = 1`.
    SmoothPole,
}

/// Cone opening `c = f'(0⁺)` kept both as a float and as an exact rational.
///
/// Decimal text such as `0.3` or fractions such as `1/3` are exact rationals,
/// so every opening read from configuration carries its exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeOpening {
    value: f64,
    exact: BigRational,
}

impl ConeOpening {
    pub fn from_f64(value: f64) -> Result<Self, GeometryError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(GeometryError::InvalidParameter {
                name: "c",
                value,
                reason: "cone opening must be positive",
            });
        }
        let exact = BigRational::from_f64(value).expect("finite float is rational");
        Ok(Self { value, exact })
    }

    pub fn from_rational(exact: BigRational) -> Result<Self, GeometryError> {
        let value = crate::exact::to_f64(&exact);
        if exact <= BigRational::zero() || !value.is_finite() {
            return Err(GeometryError::InvalidParameter {
                name: "c",
                value,
                reason: "cone opening must be positive",
            });
        }
        Ok(Self { value, exact })
    }

    /// Parses `0.5`, `1/3`, `2.5e-1`.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let exact = parse_rational(text).ok_or_else(|| GeometryError::Parse(text.to_string()))?;
        Self::from_rational(exact)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

/// A closed surface of revolution with a conical tip at `s = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceProfile {
    kind: ProfileKind,
    params: Vec<f64>,
    length: f64,
    opening: ConeOpening,
    far_opening: Option<ConeOpening>,
    tip_end: TipEnd,
}

/// Quintic smoothstep on `[0, 1]`; C² with vanishing first and second
/// derivatives at both ends.
fn smootherstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        let v = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        let dv = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (v, dv)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

impl SurfaceProfile {
    /// Builds a profile from its kind and float parameters
    /// (`sphere: [radius]`, `cone_capped: [c, L]`, `spindle: [c, c2, L]`).
    pub fn build(kind: ProfileKind, params: &[f64]) -> Result<Self, GeometryError> {
        let expected = kind.parameter_names().len();
        if params.len() != expected {
            return Err(GeometryError::ParameterCount {
                kind,
                expected,
                got: params.len(),
            });
        }
        match kind {
            ProfileKind::Sphere => {
                check_positive("radius", params[0])?;
                Self::assemble(kind, params.to_vec(), ConeOpening::from_f64(1.0)?, None)
            }
            ProfileKind::ConeCapped => {
                check_positive("c", params[0])?;
                check_positive("L", params[1])?;
                Self::assemble(kind, params.to_vec(), ConeOpening::from_f64(params[0])?, None)
            }
            ProfileKind::Spindle => {
                check_positive("c", params[0])?;
                check_positive("c2", params[1])?;
                check_positive("L", params[2])?;
                Self::assemble(
                    kind,
                    params.to_vec(),
                    ConeOpening::from_f64(params[0])?,
                    Some(ConeOpening::from_f64(params[1])?),
                )
            }
        }
    }

    /// Like [`SurfaceProfile::build`] but with exactly known tip openings
    /// (used when the openings come from decimal or fractional text).
    pub fn build_exact(
        kind: ProfileKind,
        opening: Option<ConeOpening>,
        far_opening: Option<ConeOpening>,
        length_or_radius: f64,
    ) -> Result<Self, GeometryError> {
        match kind {
            ProfileKind::Sphere => Self::build(kind, &[length_or_radius]),
            ProfileKind::ConeCapped => {
                let c = opening.ok_or(GeometryError::MissingParameter("c"))?;
                check_positive("L", length_or_radius)?;
                Self::assemble(kind, vec![c.value(), length_or_radius], c, None)
            }
            ProfileKind::Spindle => {
                let c = opening.ok_or(GeometryError::MissingParameter("c"))?;
                let c2 = far_opening.ok_or(GeometryError::MissingParameter("c2"))?;
                check_positive("L", length_or_radius)?;
                Self::assemble(
                    kind,
                    vec![c.value(), c2.value(), length_or_radius],
                    c,
                    Some(c2),
                )
            }
        }
    }

    fn assemble(
        kind: ProfileKind,
        params: Vec<f64>,
        opening: ConeOpening,
        far_opening: Option<ConeOpening>,
    ) -> Result<Self, GeometryError> {
        let length = match kind {
            ProfileKind::Sphere => PI * params[0],
            ProfileKind::ConeCapped => params[1],
            ProfileKind::Spindle => params[2],
        };
        let tip_end = match &far_opening {
            Some(c2) => TipEnd::Conic(c2.value()),
            None => TipEnd::SmoothPole,
        };
        let profile = Self {
            kind,
            params,
            length,
            opening,
            far_opening,
            tip_end,
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let samples = 4096;
        for i in 1..samples {
            let s = self.length * i as f64 / samples as f64;
            let f = self.radius(s);
            if !(f.is_finite() && f > 0.0) {
                return Err(GeometryError::VanishingRadius { s });
            }
        }
        if self.radius(self.length).abs() > 1e-12 * self.length {
            return Err(GeometryError::OpenSurface);
        }
        if let TipEnd::SmoothPole = self.tip_end {
            let slope = self.radius_derivative(self.length).abs();
            if (slope - 1.0).abs() > 1e-12 {
                return Err(GeometryError::VanishingRadius { s: self.length });
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Total arclength `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Cone opening at the tip `s = 0`.
    pub fn opening(&self) -> &ConeOpening {
        &self.opening
    }

    /// Opening of the second tip, when the far end is conic.
    pub fn far_opening(&self) -> Option<&ConeOpening> {
        self.far_opening.as_ref()
    }

    pub fn tip_end(&self) -> &TipEnd {
        &self.tip_end
    }

    /// Radius function `f(s)`.
    pub fn radius(&self, s: f64) -> f64 {
        self.radius_and_derivative(s).0
    }

    /// `f'(s)`.
    pub fn radius_derivative(&self, s: f64) -> f64 {
        self.radius_and_derivative(s).1
    }

    pub fn radius_and_derivative(&self, s: f64) -> (f64, f64) {
        let l = self.length;
        match self.kind {
            ProfileKind::Sphere => {
                let r = self.params[0];
                (r * (s / r).sin(), (s / r).cos())
            }
            ProfileKind::ConeCapped => {
                let c = self.opening.value();
                let (b, db) = smootherstep((s - l / 3.0) / (l / 3.0));
                let db = db * 3.0 / l;
                let cone = c * s;
                let cap = l - s;
                ((1.0 - b) * cone + b * cap, -db * cone + (1.0 - b) * c + db * cap - b)
            }
            ProfileKind::Spindle => {
                let c = self.opening.value();
                let c2 = self.far_opening.as_ref().map(|o| o.value()).unwrap_or(c);
                let (b, db) = smootherstep((s - l / 3.0) / (l / 3.0));
                let db = db * 3.0 / l;
                let near = c * s;
                let far = c2 * (l - s);
                ((1.0 - b) * near + b * far, -db * near + (1.0 - b) * c + db * far - b * c2)
            }
        }
    }

    /// Analytic surface area `2π ∫₀ᴸ f(s) ds`.
    ///
    /// The blended profiles are piecewise polynomial of degree ≤ 6, so a
    /// 5-point Gauss rule on each piece is exact.
    pub fn area(&self) -> f64 {
        match self.kind {
            ProfileKind::Sphere => {
                let r = self.params[0];
                4.0 * PI * r * r
            }
            _ => {
                let l = self.length;
                let pieces = [(0.0, l / 3.0), (l / 3.0, 2.0 * l / 3.0), (2.0 * l / 3.0, l)];
                2.0 * PI
                    * pieces
                        .iter()
                        .map(|&(a, b)| gauss5(|s| self.radius(s), a, b))
                        .sum::<f64>()
            }
        }
    }

    /// Width of the region near the tip where `f(s) = c·s` exactly.
    pub fn exact_cone_extent(&self) -> f64 {
        match self.kind {
            ProfileKind::Sphere => 0.0,
            _ => self.length / 3.0,
        }
    }

    /// Parameter list as decimal text with 17 significant digits.
    pub fn serialize_params(&self) -> String {
        self.params
            .iter()
            .map(|p| format!("{:.16e}", p))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    X.iter()
        .zip(W.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}
