//! Exact arithmetic on rationals and real quadratic surds `a + b√d`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `3`, `-0.75`, `2.5e-3`, `1/3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{}{}", whole, frac);
    let mut value = Rational::from_integer(all.parse::<BigInt>().ok()?);
    let scale = exponent as i64 - frac.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        for _ in 0..scale {
            value *= &ten;
        }
    } else {
        for _ in 0..(-scale) {
            value /= &ten;
        }
    }
    Some(if negative { -value } else { value })
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Sign of `p + q√c` for rationals `p, q` and `c ≥ 0`.
fn sign_one(p: &Rational, q: &Rational, c: &Rational) -> Ordering {
    let sp = p.cmp(&Rational::zero());
    let sq = if c.is_zero() {
        Ordering::Equal
    } else {
        q.cmp(&Rational::zero())
    };
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // opposite signs: compare p² with q²c
    let lhs = p * p;
    let rhs = q * q * c;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `α + β√A + γ√B`.
fn sign_two(
    alpha: &Rational,
    beta: &Rational,
    a: &Rational,
    gamma: &Rational,
    b: &Rational,
) -> Ordering {
    let zero = Rational::zero();
    // sign of the surd part X = β√A + γ√B
    let sx_a = if a.is_zero() { Ordering::Equal } else { beta.cmp(&zero) };
    let sx_b = if b.is_zero() { Ordering::Equal } else { gamma.cmp(&zero) };
    let sx = match (sx_a, sx_b) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (s1, s2) if s1 == s2 => s1,
        (s1, s2) => match (beta * beta * a).cmp(&(gamma * gamma * b)) {
            Ordering::Greater => s1,
            Ordering::Less => s2,
            Ordering::Equal => Ordering::Equal,
        },
    };
    let sa = alpha.cmp(&zero);
    if sx == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sx {
        return sx;
    }
    // opposite signs: compare α² with X² = β²A + γ²B + 2βγ√(AB)
    let p = beta * beta * a + gamma * gamma * b - alpha * alpha;
    let q = int(2) * beta * gamma;
    let c = a * b;
    match sign_one(&p, &q, &c) {
        Ordering::Greater => sx,
        Ordering::Less => sa,
        Ordering::Equal => Ordering::Equal,
    }
}

/// A real number `a + b√d` with rational `a, b` and rational `d ≥ 0`.
///
/// `d` is kept non-square: perfect-square radicands are folded into `a`.
#[derive(Debug, Clone)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: Rational,
}

impl Surd {
    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            d: Rational::zero(),
        }
    }

    /// `a + b√d`; panics if `d < 0`.
    pub fn new(a: Rational, b: Rational, d: Rational) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        if b.is_zero() || d.is_zero() {
            return Self::rational(a);
        }
        if let Some(root) = rational_sqrt(&d) {
            return Self::rational(a + b * root);
        }
        Self { a, b, d }
    }

    /// `√d`.
    pub fn sqrt(d: Rational) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_coefficient(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &Rational {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * to_f64(&self.d).sqrt()
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        Self {
            a: &self.a + r,
            b: self.b.clone(),
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.a * r, &self.b * r, self.d.clone())
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    /// Exact comparison with another surd (radicands may differ).
    pub fn cmp_surd(&self, other: &Surd) -> Ordering {
        let alpha = &self.a - &other.a;
        let gamma = -other.b.clone();
        sign_two(&alpha, &self.b, &self.d, &gamma, &other.d)
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        sign_one(&(&self.a - r), &self.b, &self.d)
    }

    /// Exact `min`.
    pub fn min(self, other: Surd) -> Surd {
        if self.cmp_surd(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_surd(other) == Ordering::Equal
    }
}

impl Eq for Surd {}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_surd(other)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}
