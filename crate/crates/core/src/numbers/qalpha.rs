use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::NumberError;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `n/d`. Panics if `d == 0`.
pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` (optional sign, surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational, NumberError> {
    let s = s.trim();
    let bad = || NumberError::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = num.strip_prefix('+').unwrap_or(num);
    let n = BigInt::from_str(num).map_err(|_| bad())?;
    let d = BigInt::from_str(den).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn canonical_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn pretty_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact element `p + qα` of ℚ + ℚα.
///
/// The derived `Ord` is the coefficient-lexicographic order on `(p, q)`. It
/// exists so values can key ordered maps; it is not the order of the real
/// numbers. Use [`AlphaWitness::compare`](super::AlphaWitness::compare) for that.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QAlpha {
    p: Rational,
    q: Rational,
}

impl QAlpha {
    pub fn new(p: Rational, q: Rational) -> Self {
        Self { p, q }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The formal irrational α itself.
    pub fn alpha() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(Rational::from_integer(n.into()), Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::new(r, Rational::zero())
    }

    /// `n + mα` for integers `n`, `m`.
    pub fn lattice(n: i64, m: i64) -> Self {
        Self::new(Rational::from_integer(n.into()), Rational::from_integer(m.into()))
    }

    /// Rational part `p`.
    pub fn rational_part(&self) -> &Rational {
        &self.p
    }

    /// α-coefficient `q`.
    pub fn alpha_part(&self) -> &Rational {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// True when both coefficients are integers, i.e. the value lies in ℤ + αℤ.
    pub fn is_lattice_point(&self) -> bool {
        self.p.is_integer() && self.q.is_integer()
    }

    /// `r · self`.
    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.p * r, &self.q * r)
    }

    /// Representative of `self + ℤ` whose rational part lies in `[0, 1)`.
    ///
    /// Two values differ by an integer iff their reductions are equal.
    pub fn reduce_mod_one(&self) -> Self {
        let floor = self.p.floor();
        Self::new(&self.p - floor, self.q.clone())
    }

    /// Canonical text form `"p/q1+α*r/q2"`, denominators always written.
    pub fn to_canonical(&self) -> String {
        format!("{}+α*{}", canonical_rational(&self.p), canonical_rational(&self.q))
    }

    /// Short human form, e.g. `1+α`, `2-3α`, `1/2α`, `0`.
    pub fn pretty(&self) -> String {
        let alpha_term = |q: &Rational| -> String {
            if q.is_one() {
                "α".to_string()
            } else if (-q).is_one() {
                "-α".to_string()
            } else {
                format!("{}α", pretty_rational(q))
            }
        };
        match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => "0".to_string(),
            (false, true) => pretty_rational(&self.p),
            (true, false) => alpha_term(&self.q),
            (false, false) => {
                let a = alpha_term(&self.q.abs());
                let sign = if self.q.is_negative() { '-' } else { '+' };
                format!("{}{}{}", pretty_rational(&self.p), sign, a)
            }
        }
    }

    /// Integer coordinates `(n, m)` when `self = n + mα` with `n, m ∈ ℤ`.
    pub fn lattice_coords(&self) -> Option<(BigInt, BigInt)> {
        self.is_lattice_point()
            .then(|| (self.p.to_integer(), self.q.to_integer()))
    }
}

impl fmt::Display for QAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

/// Splits `s` into signed top-level terms. A sign directly after `*` or `/`
/// belongs to the factor that follows, not to a new term.
fn split_terms(s: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut prev: Option<char> = None;
    for c in s.chars() {
        if (c == '+' || c == '-') && !current.trim().is_empty() && !matches!(prev, Some('*' | '/')) {
            terms.push(std::mem::take(&mut current));
        }
        current.push(c);
        prev = Some(c);
    }
    if !current.trim().is_empty() {
        terms.push(current);
    }
    terms
}

impl FromStr for QAlpha {
    type Err = NumberError;

    /// Accepts the canonical form plus the usual shorthands: `3`, `1/2`, `α`,
    /// `2-3α`, `1+α*2/3`, `-α/2`. `alpha` and `a` are aliases for `α`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let cleaned = cleaned.replace("alpha", "α").replace('a', "α");
        if cleaned.is_empty() {
            return Err(NumberError::Parse("empty ℚ+ℚα literal".into()));
        }
        let mut out = QAlpha::zero();
        for term in split_terms(&cleaned) {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-Rational::one(), rest.to_string()),
                None => (Rational::one(), term.strip_prefix('+').unwrap_or(&term).to_string()),
            };
            if body.contains('α') {
                if body.matches('α').count() != 1 {
                    return Err(NumberError::Parse(format!("repeated α in term {term:?}")));
                }
                // Forms: α, α*c, c*α, cα, α/d, c*α/d.
                let (before, after) = body.split_once('α').expect("contains α");
                let before = before.trim_end_matches('*');
                let mut coeff = if before.is_empty() {
                    Rational::one()
                } else if before == "-" {
                    -Rational::one()
                } else {
                    parse_rational(before)?
                };
                if let Some(rest) = after.strip_prefix('*') {
                    coeff *= parse_rational(rest)?;
                } else if let Some(rest) = after.strip_prefix('/') {
                    coeff /= parse_rational(rest)?;
                } else if !after.is_empty() {
                    return Err(NumberError::Parse(format!("unexpected {after:?} after α")));
                }
                out.q += sign * coeff;
            } else {
                out.p += sign * parse_rational(&body)?;
            }
        }
        Ok(out)
    }
}

impl Serialize for QAlpha {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_canonical())
    }
}

impl<'de> Deserialize<'de> for QAlpha {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

impl Add<&QAlpha> for &QAlpha {
    type Output = QAlpha;
    fn add(self, rhs: &QAlpha) -> QAlpha {
        QAlpha::new(&self.p + &rhs.p, &self.q + &rhs.q)
    }
}

impl Sub<&QAlpha> for &QAlpha {
    type Output = QAlpha;
    fn sub(self, rhs: &QAlpha) -> QAlpha {
        QAlpha::new(&self.p - &rhs.p, &self.q - &rhs.q)
    }
}

impl Add for QAlpha {
    type Output = QAlpha;
    fn add(self, rhs: QAlpha) -> QAlpha {
        &self + &rhs
    }
}

impl Sub for QAlpha {
    type Output = QAlpha;
    fn sub(self, rhs: QAlpha) -> QAlpha {
        &self - &rhs
    }
}

impl Neg for &QAlpha {
    type Output = QAlpha;
    fn neg(self) -> QAlpha {
        QAlpha::new(-&self.p, -&self.q)
    }
}

impl Neg for QAlpha {
    type Output = QAlpha;
    fn neg(self) -> QAlpha {
        -&self
    }
}

/// Greatest common divisor helper reused by the enumeration code.
pub(crate) fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}
