//! Exact exponent bookkeeping at a conical tip: admissible weight windows,
//! indicial roots of `Δ` and `Δ²`, asymptotic-space membership, the
//! minimal-domain criterion and the interpolation exclusion set.
//!
//! Cross-section eigenvalues are exact rationals, so every root has the form
//! `a ± √d` with rational `a, d` and is carried as a [`Surd`]. Comparisons
//! against window endpoints are exact; nothing here rounds.
//!
//! Roots are stored as exponents `q` of model solutions `x^{+q}`. Reports
//! can translate to the opposite sign convention (`x^{−ρ}`) through
//! [`ExponentConvention`].

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{int, rat, Rational, Surd};
use crate::geometry::{BoundarySpectrum, ConeOpening};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndicialError {
    #[error("window formulas need n ∈ {{1, 2}}, got n = {0}")]
    Dimension(usize),
    #[error("cross-section dimension must be at least 1")]
    ZeroDimension,
    #[error("λ₁ = {0} must be nonpositive")]
    PositiveEigenvalue(Rational),
}

/// Which operator a root belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Laplacian,
    Bilaplacian,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Laplacian => "laplacian",
            Self::Bilaplacian => "bilaplacian",
        })
    }
}

/// How an exponent is printed: as `q` in `x^{+q}` or as `ρ` in `x^{−ρ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentConvention {
    #[default]
    Solution,
    Reciprocal,
}

impl ExponentConvention {
    pub fn express(&self, q: &Surd) -> Surd {
        match self {
            Self::Solution => q.clone(),
            Self::Reciprocal => q.neg(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Solution => "x^{+q}",
            Self::Reciprocal => "x^{-rho}",
        }
    }
}

/// An open interval `(lower, upper)` of admissible weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaWindow {
    pub lower: Surd,
    pub upper: Surd,
    pub nonempty: bool,
}

impl GammaWindow {
    fn new(lower: Surd, upper: Surd) -> Self {
        let nonempty = lower < upper;
        Self {
            lower,
            upper,
            nonempty,
        }
    }

    /// `lower < γ < upper`, exactly.
    pub fn contains(&self, gamma: &Rational) -> bool {
        self.lower.cmp_rational(gamma) == Ordering::Less
            && self.upper.cmp_rational(gamma) == Ordering::Greater
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.lower.to_f64(), self.upper.to_f64())
    }
}

impl fmt::Display for GammaWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)?;
        if !self.nonempty {
            write!(f, " [empty]")?;
        }
        Ok(())
    }
}

fn check_window_args(n: usize, lambda1: &Rational) -> Result<(), IndicialError> {
    if !(1..=2).contains(&n) {
        return Err(IndicialError::Dimension(n));
    }
    if lambda1.is_positive() {
        return Err(IndicialError::PositiveEigenvalue(lambda1.clone()));
    }
    Ok(())
}

/// Weights for which the Cahn–Hilliard semiflow is set up:
/// `((d−4)/2, min{−1 + √(((d−2)/2)² − λ₁), (d−4)/4})`, `d = n + 1`.
pub fn ch_gamma_window(n: usize, lambda1: &Rational) -> Result<GammaWindow, IndicialError> {
    check_window_args(n, lambda1)?;
    let d = n as i64 + 1;
    let half = rat(d - 2, 2);
    let lower = Surd::rational(rat(d - 4, 2));
    let branch = Surd::new(int(-1), int(1), &half * &half - lambda1);
    let upper = branch.min(Surd::rational(rat(d - 4, 4)));
    Ok(GammaWindow::new(lower, upper))
}

/// Weights for which the Laplacian has the closed extension used here:
/// `((n−3)/2, min{−1 + √(((n−1)/2)² − λ₁), (n+1)/2})`.
pub fn laplacian_gamma_window(n: usize, lambda1: &Rational) -> Result<GammaWindow, IndicialError> {
    check_window_args(n, lambda1)?;
    let n = n as i64;
    let half = rat(n - 1, 2);
    let lower = Surd::rational(rat(n - 3, 2));
    let branch = Surd::new(int(-1), int(1), &half * &half - lambda1);
    let upper = branch.min(Surd::rational(rat(n + 1, 2)));
    Ok(GammaWindow::new(lower, upper))
}

/// An indicial root together with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicialRoot {
    pub operator: Operator,
    /// Angular mode of the cross-section eigenvalue.
    pub mode: usize,
    /// Exponent `q` of the model solution `x^{+q}`.
    pub value: Surd,
    /// Multiplicity of `value` as a root of this mode's indicial polynomial.
    pub multiplicity: usize,
    /// Highest power `k` of `ln x` accompanying `x^q`: multiplicity − 1.
    pub log_power_max: usize,
    /// Multiplicity of the cross-section eigenvalue (number of angular
    /// profiles carried by this root).
    pub angular_multiplicity: usize,
}

/// `q^± = −(n−1)/2 ± √(((n−1)/2)² − λ)`.
fn laplacian_pair(n: usize, lambda: &Rational) -> (Surd, Surd) {
    let half = rat(n as i64 - 1, 2);
    let radicand = &half * &half - lambda;
    let plus = Surd::new(-half.clone(), int(1), radicand.clone());
    let minus = Surd::new(-half, int(-1), radicand);
    (plus, minus)
}

/// Collapses a list of roots into distinct values with multiplicities,
/// sorted ascending.
fn merge(values: Vec<Surd>) -> Vec<(Surd, usize)> {
    let mut sorted = values;
    sorted.sort();
    let mut out: Vec<(Surd, usize)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, m)) if *last == v => *m += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

fn check_dimension(n: usize) -> Result<(), IndicialError> {
    if n == 0 {
        Err(IndicialError::ZeroDimension)
    } else {
        Ok(())
    }
}

/// Roots of `z² + (n−1) z + λ_j` per mode, ascending within each mode.
pub fn laplacian_indicial_roots(
    n: usize,
    spectrum: &BoundarySpectrum,
) -> Result<Vec<IndicialRoot>, IndicialError> {
    check_dimension(n)?;
    let mut out = Vec::new();
    for e in spectrum.entries() {
        let (plus, minus) = laplacian_pair(n, &e.value);
        for (value, multiplicity) in merge(vec![minus, plus]) {
            out.push(IndicialRoot {
                operator: Operator::Laplacian,
                mode: e.mode,
                value,
                multiplicity,
                log_power_max: multiplicity - 1,
                angular_multiplicity: e.multiplicity,
            });
        }
    }
    Ok(out)
}

/// Roots of `p_j(z) · p_j(z − 2)` per mode, where `p_j` is the Laplacian
/// indicial polynomial; coincidences within a mode raise the log power.
pub fn bilaplacian_indicial_roots(
    n: usize,
    spectrum: &BoundarySpectrum,
) -> Result<Vec<IndicialRoot>, IndicialError> {
    check_dimension(n)?;
    let two = int(2);
    let mut out = Vec::new();
    for e in spectrum.entries() {
        let (plus, minus) = laplacian_pair(n, &e.value);
        let all = vec![
            minus.clone(),
            plus.clone(),
            minus.add_rational(&two),
            plus.add_rational(&two),
        ];
        for (value, multiplicity) in merge(all) {
            out.push(IndicialRoot {
                operator: Operator::Bilaplacian,
                mode: e.mode,
                value,
                multiplicity,
                log_power_max: multiplicity - 1,
                angular_multiplicity: e.multiplicity,
            });
        }
    }
    Ok(out)
}

/// The half-open exponent window `[(n−7)/2 − γ, (n−3)/2 − γ)` and the
/// bilaplacian roots falling in it.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSpace {
    pub gamma: Rational,
    pub lower: Rational,
    pub upper: Rational,
    pub members: Vec<IndicialRoot>,
}

impl AsymptoticSpace {
    /// Half-open membership test `lower ≤ q < upper`.
    pub fn window_contains(&self, q: &Surd) -> bool {
        q.cmp_rational(&self.lower) != Ordering::Less
            && q.cmp_rational(&self.upper) == Ordering::Less
    }

    /// Distinct member exponents, ascending.
    pub fn distinct_values(&self) -> Vec<Surd> {
        merge(self.members.iter().map(|r| r.value.clone()).collect())
            .into_iter()
            .map(|(v, _)| v)
            .collect()
    }

    /// Dimension of the asymptotic space: each root contributes its angular
    /// profiles times `1 + log_power_max` logarithmic terms.
    pub fn dimension(&self) -> usize {
        self.members
            .iter()
            .map(|r| r.angular_multiplicity * r.multiplicity)
            .sum()
    }
}

/// `[(n−7)/2 − γ, (n−3)/2 − γ)`.
pub fn asymptotic_window(n: usize, gamma: &Rational) -> (Rational, Rational) {
    let n = n as i64;
    (rat(n - 7, 2) - gamma, rat(n - 3, 2) - gamma)
}

pub fn asymptotic_space(
    n: usize,
    spectrum: &BoundarySpectrum,
    gamma: &Rational,
) -> Result<AsymptoticSpace, IndicialError> {
    let (lower, upper) = asymptotic_window(n, gamma);
    let mut space = AsymptoticSpace {
        gamma: gamma.clone(),
        lower,
        upper,
        members: Vec::new(),
    };
    let roots = bilaplacian_indicial_roots(n, spectrum)?;
    space.members = roots
        .into_iter()
        .filter(|r| space.window_contains(&r.value))
        .collect();
    Ok(space)
}

/// Smallest mode cutoff beyond which no bilaplacian root of the circle of
/// opening `c` can fall into the asymptotic window at `γ`.
///
/// Every root satisfies `|q| ≥ k/c − (n−1) − 2`, and the window lies within
/// `|z| ≤ max(|lower|, |upper|)`.
pub fn sufficient_cutoff(n: usize, opening: &ConeOpening, gamma: &Rational) -> usize {
    let (lower, upper) = asymptotic_window(n, gamma);
    let reach = lower.abs().max(upper.abs()) + int(n as i64 + 1);
    // k/c > reach  ⇔  k > reach · c
    let bound = (reach * opening.exact()).floor();
    let k: i64 = num_traits::ToPrimitive::to_i64(&bound.to_integer()).unwrap_or(0);
    (k.max(0) as usize) + 1
}

/// Whether `{γ+1, γ+3}` avoids `{±√(((d−2)/2)² − λ_j)}`, `d = n + 1`; if not,
/// the offending values.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalDomainCheck {
    pub holds: bool,
    pub offending: Vec<(usize, Rational)>,
}

pub fn minimal_domain_check(
    n: usize,
    spectrum: &BoundarySpectrum,
    gamma: &Rational,
) -> Result<MinimalDomainCheck, IndicialError> {
    check_dimension(n)?;
    let half = rat(n as i64 - 1, 2);
    let probes = [gamma + int(1), gamma + int(3)];
    let mut offending = Vec::new();
    for e in spectrum.entries() {
        let root = Surd::sqrt(&half * &half - &e.value);
        for p in &probes {
            if root.cmp_rational(p) == Ordering::Equal || root.neg().cmp_rational(p) == Ordering::Equal {
                offending.push((e.mode, p.clone()));
            }
        }
    }
    Ok(MinimalDomainCheck {
        holds: offending.is_empty(),
        offending,
    })
}

/// `{(1−γ)/2 ± ½√(((n−1)/2)² − λ_j)} ∩ (0, 1)`, distinct and ascending: the
/// interpolation parameters at which the complex interpolation space picks
/// up an extra asymptotic term.
pub fn interpolation_exclusions(
    n: usize,
    spectrum: &BoundarySpectrum,
    gamma: &Rational,
) -> Result<Vec<Surd>, IndicialError> {
    check_dimension(n)?;
    let half = rat(n as i64 - 1, 2);
    let centre = (int(1) - gamma) / int(2);
    let mut values = Vec::new();
    for e in spectrum.entries() {
        let radicand = &half * &half - &e.value;
        for sign in [-1, 1] {
            let a = Surd::new(centre.clone(), rat(sign, 2), radicand.clone());
            if a.cmp_rational(&Rational::zero()) == Ordering::Greater
                && a.cmp_rational(&int(1)) == Ordering::Less
            {
                values.push(a);
            }
        }
    }
    Ok(merge(values).into_iter().map(|(v, _)| v).collect())
}

/// Everything the `indicial` command reports for one configuration.
#[derive(Debug, Clone)]
pub struct IndicialReport {
    pub n: usize,
    pub gamma: Rational,
    pub convention: ExponentConvention,
    pub ch_window: GammaWindow,
    pub laplacian_window: GammaWindow,
    pub laplacian_roots: Vec<IndicialRoot>,
    pub bilaplacian_roots: Vec<IndicialRoot>,
    pub asymptotic: AsymptoticSpace,
    pub minimal_domain: MinimalDomainCheck,
    pub exclusions: Vec<Surd>,
}

impl IndicialReport {
    /// Builds the report; `λ₁` is the greatest nonzero eigenvalue of the
    /// spectrum (or `0` if the spectrum holds constants only).
    pub fn build(
        n: usize,
        spectrum: &BoundarySpectrum,
        gamma: &Rational,
        convention: ExponentConvention,
    ) -> Result<Self, IndicialError> {
        let lambda1 = spectrum
            .greatest_nonzero()
            .cloned()
            .unwrap_or_else(Rational::zero);
        Ok(Self {
            n,
            gamma: gamma.clone(),
            convention,
            ch_window: ch_gamma_window(n, &lambda1)?,
            laplacian_window: laplacian_gamma_window(n, &lambda1)?,
            laplacian_roots: laplacian_indicial_roots(n, spectrum)?,
            bilaplacian_roots: bilaplacian_indicial_roots(n, spectrum)?,
            asymptotic: asymptotic_space(n, spectrum, gamma)?,
            minimal_domain: minimal_domain_check(n, spectrum, gamma)?,
            exclusions: interpolation_exclusions(n, spectrum, gamma)?,
        })
    }

    pub const CSV_HEADER: &'static str = "operator,mode,root,root_value,log_power,in_window";

    /// One CSV row per root: operator, mode, exact root, float value, log
    /// power, and membership in the asymptotic window. Laplacian rows are
    /// tested against the same window for reference.
    pub fn csv_rows(&self) -> Vec<String> {
        self.laplacian_roots
            .iter()
            .chain(&self.bilaplacian_roots)
            .map(|r| {
                let shown = self.convention.express(&r.value);
                format!(
                    "{},{},{},{:.16e},{},{}",
                    r.operator,
                    r.mode,
                    shown,
                    shown.to_f64(),
                    r.log_power_max,
                    self.asymptotic.window_contains(&r.value)
                )
            })
            .collect()
    }
}

impl fmt::Display for IndicialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, gamma = {}, roots as {}", self.n, self.gamma, self.convention.label())?;
        writeln!(f, "CH gamma window:        {}", self.ch_window)?;
        writeln!(f, "Laplacian gamma window: {}", self.laplacian_window)?;
        writeln!(
            f,
            "asymptotic window:      [{}, {})",
            self.asymptotic.lower, self.asymptotic.upper
        )?;
        writeln!(f, "{:<12} {:>5} {:>24} {:>9} {:>9}", "operator", "mode", "root", "log_power", "in_window")?;
        for r in self.laplacian_roots.iter().chain(&self.bilaplacian_roots) {
            writeln!(
                f,
                "{:<12} {:>5} {:>24} {:>9} {:>9}",
                r.operator.to_string(),
                r.mode,
                self.convention.express(&r.value).to_string(),
                r.log_power_max,
                self.asymptotic.window_contains(&r.value)
            )?;
        }
        write!(f, "minimal domain criterion: {}", self.minimal_domain.holds)?;
        for (mode, value) in &self.minimal_domain.offending {
            write!(f, " [mode {mode} hits {value}]")?;
        }
        writeln!(f)?;
        let ex: Vec<String> = self.exclusions.iter().map(|e| e.to_string()).collect();
        writeln!(f, "interpolation exclusions: {{{}}}", ex.join(", "))
    }
}
