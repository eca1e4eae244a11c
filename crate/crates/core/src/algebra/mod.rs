//! Counting-measure convolution *-algebras of structure groupoids.
//!
//! For a groupoid `ℝ ⋊ Γ` an arrow is `(x, γ)` with source `x`, and a
//! compactly supported function is a finitely supported family `(f_γ)` of
//! functions of the source point. The groupoid formula
//! `f*g(γ) = Σ_{β ∈ G^{src γ}} f(β·γ) g(β⁻¹)` then reads
//! `(f*g)_{a∘b}(x) += f_a(b·x) g_b(x)`, and `f*(γ) = conj f(γ⁻¹)` reads
//! `(f*)_{a⁻¹}(x) = conj f_a(a⁻¹·x)`.
//!
//! Two coefficient models are supported: piecewise polynomials on ℝ
//! ([`Shape::Line`]) and trigonometric polynomials on ℝ/ℤ ([`Shape::Circle`],
//! used for S¹ with rotations `z ↦ e^{2πiτ}z` written additively).

mod corpus;
mod matrix;
mod piecewise;
mod poly;
mod rotation;
mod trig;

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numbers::{AffineElement, AlphaWitness, GroupPresentation, Membership, NumberError, QAlpha};

pub use corpus::{axiom_suite, random_element, random_up_element, AxiomReport, CheckResult, CorpusKind};
pub use matrix::{
    determine_order, matrix_representation, star, up_key, ComplexMatrix, MultiplicationOrder, OrderEvidence, LOCKED_ORDER,
};
pub use piecewise::PiecewisePoly;
pub use rotation::{rotation_relation, ModeCheck, RotationReport};
pub use trig::{turns, TrigPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("mixed-coefficient-kind: expected {expected} coefficients, found {found}")]
    MixedCoefficientKind { expected: &'static str, found: &'static str },
    #[error("unsupported-groupoid-shape: {0}")]
    UnsupportedGroupoidShape(String),
    #[error("support-escapes-U_p: key {key} is not a multiple of 1/{p}")]
    SupportEscapes { key: String, p: u32 },
    #[error("key-not-in-group: {0}")]
    KeyNotInGroup(String),
    #[error("malformed coefficient: {0}")]
    Malformed(String),
    #[error(transparent)]
    Number(#[from] NumberError),
}

/// Object space of the groupoid: the line ℝ or the circle ℝ/ℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Line,
    Circle,
}

impl Shape {
    fn coeff_kind(self) -> &'static str {
        match self {
            Shape::Line => "poly",
            Shape::Circle => "trig",
        }
    }
}

/// Coefficient function attached to one group element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coeff {
    Poly(PiecewisePoly),
    Trig(TrigPoly),
}

impl Coeff {
    pub fn kind(&self) -> &'static str {
        match self {
            Coeff::Poly(_) => "poly",
            Coeff::Trig(_) => "trig",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Poly(p) => p.is_zero(),
            Coeff::Trig(t) => t.is_zero(),
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPoly> {
        match self {
            Coeff::Trig(t) => Some(t),
            Coeff::Poly(_) => None,
        }
    }

    pub fn as_poly(&self) -> Option<&PiecewisePoly> {
        match self {
            Coeff::Poly(p) => Some(p),
            Coeff::Trig(_) => None,
        }
    }

    /// Value at a point of ℝ (line) or ℝ/ℤ in turns (circle).
    pub fn eval(&self, x: f64, w: &AlphaWitness) -> Complex64 {
        match self {
            Coeff::Poly(p) => p.eval(x, w),
            Coeff::Trig(t) => t.eval(x),
        }
    }

    fn conj(&self) -> Coeff {
        match self {
            Coeff::Poly(p) => Coeff::Poly(p.conj()),
            Coeff::Trig(t) => Coeff::Trig(t.conj()),
        }
    }

    fn scale(&self, c: Complex64) -> Coeff {
        match self {
            Coeff::Poly(p) => Coeff::Poly(p.scale(c)),
            Coeff::Trig(t) => Coeff::Trig(t.scale(c)),
        }
    }

    fn add(&self, other: &Coeff, w: &AlphaWitness) -> Result<Coeff, AlgebraError> {
        Ok(match (self, other) {
            (Coeff::Poly(a), Coeff::Poly(b)) => Coeff::Poly(a.add(b, w)?),
            (Coeff::Trig(a), Coeff::Trig(b)) => Coeff::Trig(a.add(b)),
            _ => return Err(AlgebraError::MixedCoefficientKind { expected: self.kind(), found: other.kind() }),
        })
    }

    fn mul(&self, other: &Coeff, w: &AlphaWitness) -> Result<Coeff, AlgebraError> {
        Ok(match (self, other) {
            (Coeff::Poly(a), Coeff::Poly(b)) => Coeff::Poly(a.mul(b, w)?),
            (Coeff::Trig(a), Coeff::Trig(b)) => Coeff::Trig(a.mul(b)),
            _ => return Err(AlgebraError::MixedCoefficientKind { expected: self.kind(), found: other.kind() }),
        })
    }

    fn sup_norm(&self, w: &AlphaWitness) -> f64 {
        match self {
            Coeff::Poly(p) => p.sup_norm(w),
            Coeff::Trig(t) => t.sup_norm(),
        }
    }

    fn sup_distance(&self, other: &Coeff, w: &AlphaWitness) -> Result<f64, AlgebraError> {
        match (self, other) {
            (Coeff::Poly(a), Coeff::Poly(b)) => a.sup_distance(b, w),
            (Coeff::Trig(a), Coeff::Trig(b)) => Ok(a.sup_distance(b)),
            _ => Err(AlgebraError::MixedCoefficientKind { expected: self.kind(), found: other.kind() }),
        }
    }
}

/// Finitely supported family `(f_γ)`. Keys are canonical group elements
/// (translations reduced mod 1 on the circle); zero coefficients are pruned.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlgebraElement {
    support: BTreeMap<AffineElement, Coeff>,
}

#[derive(Serialize, Deserialize)]
struct ElementEntry {
    group: AffineElement,
    coeff: Coeff,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    support: Vec<ElementEntry>,
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementJson {
            support: self
                .support
                .iter()
                .map(|(k, c)| ElementEntry { group: k.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    /// Reads the raw entries; pass the result through [`Algebra::adopt`] to
    /// canonicalize keys and check them against the algebra.
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ElementJson::deserialize(deserializer)?;
        Ok(AlgebraElement { support: raw.support.into_iter().map(|e| (e.group, e.coeff)).collect() })
    }
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn support(&self) -> &BTreeMap<AffineElement, Coeff> {
        &self.support
    }

    pub fn keys(&self) -> BTreeSet<AffineElement> {
        self.support.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, key: &AffineElement) -> Option<&Coeff> {
        self.support.get(key)
    }

    /// Coefficient at the one-dimensional translation by `amount`.
    pub fn at(&self, amount: &QAlpha) -> Option<&Coeff> {
        self.support.get(&AffineElement::translate1(amount.clone()))
    }
}

/// A convolution algebra: object shape, structure group, and the α witness
/// used to order breakpoints and evaluate rotations.
#[derive(Clone, Debug)]
pub struct Algebra {
    shape: Shape,
    group: GroupPresentation,
    witness: AlphaWitness,
}

/// Membership bound used when adopting keys into an algebra.
const KEY_CHECK_BOUND: u32 = 64;

impl Algebra {
    pub fn new(shape: Shape, group: GroupPresentation, witness: AlphaWitness) -> Result<Self, AlgebraError> {
        if group.dimension() != 1 {
            return Err(AlgebraError::UnsupportedGroupoidShape(format!(
                "only one-dimensional groups, got dimension {}",
                group.dimension()
            )));
        }
        if shape == Shape::Circle && !group.is_translation_group() {
            return Err(AlgebraError::UnsupportedGroupoidShape("circle algebras need rotation keys".into()));
        }
        Ok(Self { shape, group, witness })
    }

    /// The algebra 𝔄 of ℝ/ℚ: `ℝ ⋊ ℚ` with piecewise-polynomial coefficients.
    pub fn rational_line() -> Self {
        Self::new(Shape::Line, GroupPresentation::rationals(1), AlphaWitness::golden()).expect("valid")
    }

    /// The algebra 𝔖 of the ℚ-circle: rational rotations of ℝ/ℤ.
    pub fn rational_circle() -> Self {
        Self::new(Shape::Circle, GroupPresentation::rationals(1), AlphaWitness::golden()).expect("valid")
    }

    /// The irrational rotation algebra: rotations by `ℤ + αℤ` of ℝ/ℤ.
    pub fn alpha_circle() -> Self {
        Self::new(Shape::Circle, GroupPresentation::z_plus_alpha_z(), AlphaWitness::golden()).expect("valid")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn group(&self) -> &GroupPresentation {
        &self.group
    }

    pub fn witness(&self) -> &AlphaWitness {
        &self.witness
    }

    fn canonical_key(&self, g: &AffineElement) -> Result<AffineElement, AlgebraError> {
        match self.shape {
            Shape::Line => Ok(g.clone()),
            Shape::Circle => match g.translation_amount1() {
                Some(t) => Ok(AffineElement::translate1(t.reduce_mod_one())),
                None => Err(AlgebraError::UnsupportedGroupoidShape(format!("{} is not a rotation", g.pretty()))),
            },
        }
    }

    fn check_kind(&self, c: &Coeff) -> Result<(), AlgebraError> {
        let expected = self.shape.coeff_kind();
        if c.kind() != expected {
            return Err(AlgebraError::MixedCoefficientKind { expected, found: c.kind() });
        }
        Ok(())
    }

    /// Builds an element, summing repeated keys and dropping zero entries.
    pub fn element(&self, entries: impl IntoIterator<Item = (AffineElement, Coeff)>) -> Result<AlgebraElement, AlgebraError> {
        let mut support: BTreeMap<AffineElement, Coeff> = BTreeMap::new();
        for (g, c) in entries {
            self.check_kind(&c)?;
            let key = self.canonical_key(&g)?;
            if self.group.contains(&key, KEY_CHECK_BOUND) == Membership::NotMember {
                return Err(AlgebraError::KeyNotInGroup(key.pretty()));
            }
            self.accumulate(&mut support, key, c)?;
        }
        Ok(AlgebraElement { support })
    }

    /// Canonicalizes and validates an element read from JSON.
    pub fn adopt(&self, raw: AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.element(raw.support)
    }

    /// Element supported at the translation by `amount`.
    pub fn single(&self, amount: &str, c: Coeff) -> Result<AlgebraElement, AlgebraError> {
        let t: QAlpha = amount.parse()?;
        self.element([(AffineElement::translate1(t), c)])
    }

    fn accumulate(
        &self,
        support: &mut BTreeMap<AffineElement, Coeff>,
        key: AffineElement,
        c: Coeff,
    ) -> Result<(), AlgebraError> {
        let merged = match support.remove(&key) {
            Some(prev) => prev.add(&c, &self.witness)?,
            None => c,
        };
        if !merged.is_zero() {
            support.insert(key, merged);
        }
        Ok(())
    }

    fn check_element(&self, f: &AlgebraElement) -> Result<(), AlgebraError> {
        f.support.values().try_for_each(|c| self.check_kind(c))
    }

    /// `x ↦ c(g·x)`.
    fn pullback(&self, c: &Coeff, g: &AffineElement) -> Result<Coeff, AlgebraError> {
        Ok(match c {
            Coeff::Poly(p) => Coeff::Poly(p.pullback(g, &self.witness)?),
            Coeff::Trig(t) => {
                let amount = g.translation_amount1().ok_or_else(|| {
                    AlgebraError::UnsupportedGroupoidShape(format!("{} is not a rotation", g.pretty()))
                })?;
                Coeff::Trig(t.rotate(turns(amount, &self.witness)))
            }
        })
    }

    /// `(f*g)_{a∘b}(x) = Σ f_a(b·x) g_b(x)`, straight from the groupoid formula.
    pub fn convolve_general(&self, f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_element(f)?;
        self.check_element(g)?;
        let mut out = BTreeMap::new();
        for (a, fa) in &f.support {
            for (b, gb) in &g.support {
                let key = self.canonical_key(&a.compose(b)?)?;
                let term = self.pullback(fa, b)?.mul(gb, &self.witness)?;
                self.accumulate(&mut out, key, term)?;
            }
        }
        Ok(AlgebraElement { support: out })
    }

    /// `(f*g)_r(x) = Σ_s f_{r−s}(x+s) g_s(x)`, indexed by output key.
    /// Needs translation keys.
    pub fn convolve_closed_form(
        &self,
        f: &AlgebraElement,
        g: &AlgebraElement,
    ) -> Result<AlgebraElement, AlgebraError> {
        self.check_element(f)?;
        self.check_element(g)?;
        let amounts = |e: &AlgebraElement| -> Result<BTreeMap<QAlpha, Coeff>, AlgebraError> {
            e.support
                .iter()
                .map(|(k, c)| match k.translation_amount1() {
                    Some(t) => Ok((t.clone(), c.clone())),
                    None => Err(AlgebraError::UnsupportedGroupoidShape(format!(
                        "closed form needs translation keys, found {}",
                        k.pretty()
                    ))),
                })
                .collect()
        };
        let (fs, gs) = (amounts(f)?, amounts(g)?);
        let canon = |t: QAlpha| match self.shape {
            Shape::Line => t,
            Shape::Circle => t.reduce_mod_one(),
        };
        let outputs: BTreeSet<QAlpha> = fs.keys().flat_map(|r| gs.keys().map(move |s| canon(r + s))).collect();
        let mut out = BTreeMap::new();
        for r in outputs {
            let mut total: Option<Coeff> = None;
            for (s, g_s) in &gs {
                let Some(f_rs) = fs.get(&canon(&r - s)) else { continue };
                let shifted = self.pullback(f_rs, &AffineElement::translate1(s.clone()))?;
                let term = shifted.mul(g_s, &self.witness)?;
                total = Some(match total {
                    Some(t) => t.add(&term, &self.witness)?,
                    None => term,
                });
            }
            if let Some(t) = total.filter(|t| !t.is_zero()) {
                out.insert(AffineElement::translate1(r), t);
            }
        }
        Ok(AlgebraElement { support: out })
    }

    /// `(f*)_{a⁻¹}(x) = conj f_a(a⁻¹·x)`.
    pub fn involute(&self, f: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_element(f)?;
        let mut out = BTreeMap::new();
        for (a, fa) in &f.support {
            let inv = a.inverse();
            let c = self.pullback(fa, &inv)?.conj();
            self.accumulate(&mut out, self.canonical_key(&inv)?, c)?;
        }
        Ok(AlgebraElement { support: out })
    }

    pub fn add(&self, f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        let mut out = f.support.clone();
        for (k, c) in &g.support {
            self.accumulate(&mut out, k.clone(), c.clone())?;
        }
        Ok(AlgebraElement { support: out })
    }

    pub fn scale(&self, f: &AlgebraElement, c: Complex64) -> AlgebraElement {
        AlgebraElement {
            support: f.support.iter().map(|(k, v)| (k.clone(), v.scale(c))).filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Largest coefficient sup-distance over the union of supports.
    pub fn distance(&self, f: &AlgebraElement, g: &AlgebraElement) -> Result<f64, AlgebraError> {
        let mut worst: f64 = 0.0;
        for k in f.keys().union(&g.keys()) {
            let d = match (f.support.get(k), g.support.get(k)) {
                (Some(a), Some(b)) => a.sup_distance(b, &self.witness)?,
                (Some(a), None) | (None, Some(a)) => a.sup_norm(&self.witness),
                (None, None) => 0.0,
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }
}
