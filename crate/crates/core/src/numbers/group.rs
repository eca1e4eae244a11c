use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::qalpha::gcd_i64;
use super::{AffineElement, NumberError, QAlpha, Rational};

/// Largest bound accepted by [`GroupPresentation::enumerate`] by default.
pub const DEFAULT_BOUND_CAP: u32 = 512;

/// Hard caps on enumeration requests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_bound: u32,
    pub max_elements: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self { max_bound: DEFAULT_BOUND_CAP, max_elements: 2_000_000 }
    }
}

/// The four presentations of a countable Γ ⊂ Aff(ℝⁿ) the crate understands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    /// `{ t_{Σ kᵢ gᵢ} : kᵢ ∈ ℤ }` for translation vectors `gᵢ`.
    TranslationLattice { generators: Vec<Vec<QAlpha>> },
    /// All rational translations ℚⁿ.
    RationalTranslations,
    /// An explicit finite group, closed under composition and inverse.
    FiniteMatrixGroup { elements: Vec<AffineElement> },
    /// The group generated by finitely many affine elements.
    GeneratedGroup { generators: Vec<AffineElement> },
}

/// A countable subgroup Γ of Aff(ℝⁿ), with deterministic bounded enumeration.
///
/// Enumeration order: elements are listed by increasing "size" (max index,
/// height, or word length) and lexicographically on their indices within a
/// size. For translation lattices the size is `max |kᵢ|`; for ℚⁿ it is the
/// max height `max(|p|, q)` of the components; for generated groups it is
/// word length. Finite groups are listed in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct GroupPresentation {
    dimension: usize,
    kind: GroupKind,
}

#[derive(Serialize, Deserialize)]
struct RawGroup {
    dimension: usize,
    #[serde(flatten)]
    kind: GroupKind,
}

impl TryFrom<RawGroup> for GroupPresentation {
    type Error = NumberError;
    fn try_from(raw: RawGroup) -> Result<Self, Self::Error> {
        GroupPresentation::new(raw.dimension, raw.kind)
    }
}

impl From<GroupPresentation> for RawGroup {
    fn from(g: GroupPresentation) -> Self {
        RawGroup { dimension: g.dimension, kind: g.kind }
    }
}

/// Outcome of a bounded orbit search `γ·x = y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitSearch {
    /// `γ` with `γ·x = y`, found within the bound.
    Found(AffineElement),
    /// Certified: no element of Γ maps `x` to `y`.
    Absent,
    /// Nothing found within the bound; the question stays open.
    Inconclusive,
}

impl OrbitSearch {
    pub fn witness(self) -> Option<AffineElement> {
        match self {
            OrbitSearch::Found(g) => Some(g),
            _ => None,
        }
    }
}

/// Bounded membership answer for `g ∈ Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Member,
    NotMember,
    Unknown,
}

fn rational_height(r: &Rational) -> BigInt {
    let n = r.numer().abs();
    let d = r.denom().clone();
    if n > d { n } else { d }
}

/// Reduced rationals `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`, in
/// (height, denominator, |p|, sign) order.
fn rationals_by_height(bound: u32) -> Vec<Rational> {
    let b = bound as i64;
    let mut items: Vec<(i64, i64, i64, bool, Rational)> = Vec::new();
    if bound == 0 {
        return items.into_iter().map(|t| t.4).collect();
    }
    items.push((1, 1, 0, false, Rational::zero()));
    for q in 1..=b {
        for p in 1..=b {
            if gcd_i64(p, q) != 1 {
                continue;
            }
            let h = p.max(q);
            let r = Rational::new(p.into(), q.into());
            items.push((h, q, p, false, r.clone()));
            items.push((h, q, p, true, -r));
        }
    }
    items.sort_by_key(|a| (a.0, a.1, a.2, a.3));
    items.into_iter().map(|t| t.4).collect()
}

/// Odometer over index tuples in `[0, len)^n`, ordered by (max key, tuple).
fn ordered_tuples(n: usize, len: usize, key: impl Fn(usize) -> i64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    let mut idx = vec![0usize; n];
    loop {
        out.push(idx.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                let mut keyed: Vec<(i64, Vec<usize>)> =
                    out.into_iter().map(|t| (t.iter().map(|&i| key(i)).max().unwrap_or(0), t)).collect();
                keyed.sort();
                return keyed.into_iter().map(|(_, t)| t).collect();
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < len {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Solves `Σ kᵢ gᵢ = d` over ℚ, viewing each (ℚ+ℚα)ⁿ vector as a ℚ²ⁿ vector.
/// Returns `Err(())` if inconsistent, `Ok(None)` if the generators are
/// ℚ-dependent, `Ok(Some(k))` for the unique solution.
#[allow(clippy::result_unit_err)]
fn solve_lattice(generators: &[Vec<QAlpha>], d: &[QAlpha]) -> Result<Option<Vec<Rational>>, ()> {
    let m = generators.len();
    let rows = 2 * d.len();
    let coord = |v: &[QAlpha], r: usize| -> Rational {
        let n = v.len();
        if r < n { v[r].rational_part().clone() } else { v[r - n].alpha_part().clone() }
    };
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = generators.iter().map(|g| coord(g, r)).collect();
            row.push(coord(d, r));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let pv = a[row][col].clone();
        for j in col..=m {
            a[row][j] = &a[row][j] / &pv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=m {
                    let v = &a[row][j] * &f;
                    a[r][j] -= v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if (row..rows).any(|r| !a[r][m].is_zero()) {
        return Err(());
    }
    if pivots.len() < m {
        return Ok(None);
    }
    Ok(Some((0..m).map(|i| a[i][m].clone()).collect()))
}

impl GroupPresentation {
    /// Validates the presentation. Finite groups are checked for closure
    /// under composition and inverse and for containing the identity.
    pub fn new(dimension: usize, kind: GroupKind) -> Result<Self, NumberError> {
        let check = |found: usize| {
            if found == dimension {
                Ok(())
            } else {
                Err(NumberError::DimensionMismatch { expected: dimension, found })
            }
        };
        match &kind {
            GroupKind::TranslationLattice { generators } => {
                for g in generators {
                    check(g.len())?;
                }
            }
            GroupKind::RationalTranslations => {}
            GroupKind::GeneratedGroup { generators } => {
                for g in generators {
                    check(g.dim())?;
                }
            }
            GroupKind::FiniteMatrixGroup { elements } => {
                for g in elements {
                    check(g.dim())?;
                }
                let set: HashSet<&AffineElement> = elements.iter().collect();
                if set.len() != elements.len() {
                    return Err(NumberError::NotClosed("duplicate elements".into()));
                }
                if !set.contains(&AffineElement::identity(dimension)) {
                    return Err(NumberError::NotClosed("identity missing".into()));
                }
                for g in elements {
                    if !set.contains(&g.inverse()) {
                        return Err(NumberError::NotClosed(format!("inverse of {} missing", g.pretty())));
                    }
                    for h in elements {
                        let gh = g.compose(h)?;
                        if !set.contains(&gh) {
                            return Err(NumberError::NotClosed(format!(
                                "{} ∘ {} = {} missing",
                                g.pretty(),
                                h.pretty(),
                                gh.pretty()
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self { dimension, kind })
    }

    /// ℤ + αℤ acting on ℝ by translations.
    pub fn z_plus_alpha_z() -> Self {
        Self::translation_lattice(vec![vec![QAlpha::one()], vec![QAlpha::alpha()]])
            .expect("valid lattice")
    }

    /// `{t_v : v ∈ ℤ-span of generators}`; dimension taken from the generators.
    pub fn translation_lattice(generators: Vec<Vec<QAlpha>>) -> Result<Self, NumberError> {
        let dim = generators.first().map_or(1, Vec::len);
        Self::new(dim, GroupKind::TranslationLattice { generators })
    }

    pub fn rationals(dimension: usize) -> Self {
        Self { dimension, kind: GroupKind::RationalTranslations }
    }

    /// `{±1}` acting on ℝ by `x ↦ ±x`.
    pub fn reflection() -> Self {
        let minus = AffineElement::affine1(-Rational::one(), QAlpha::zero()).expect("invertible");
        Self::new(1, GroupKind::FiniteMatrixGroup { elements: vec![AffineElement::identity(1), minus] })
            .expect("{±1} is a group")
    }

    pub fn trivial(dimension: usize) -> Self {
        Self {
            dimension,
            kind: GroupKind::FiniteMatrixGroup { elements: vec![AffineElement::identity(dimension)] },
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::FiniteMatrixGroup { .. })
    }

    /// True when every element is a translation.
    pub fn is_translation_group(&self) -> bool {
        match &self.kind {
            GroupKind::TranslationLattice { .. } | GroupKind::RationalTranslations => true,
            GroupKind::FiniteMatrixGroup { elements } => elements.iter().all(AffineElement::is_translation),
            GroupKind::GeneratedGroup { generators } => generators.iter().all(AffineElement::is_translation),
        }
    }

    pub fn enumerate(&self, bound: u32) -> Result<Vec<AffineElement>, NumberError> {
        self.enumerate_with(bound, EnumerationLimits::default())
    }

    /// Deterministic, duplicate-free list of the elements of size ≤ `bound`.
    pub fn enumerate_with(
        &self,
        bound: u32,
        limits: EnumerationLimits,
    ) -> Result<Vec<AffineElement>, NumberError> {
        Ok(self.enumerate_inner(bound, limits)?.0)
    }

    /// Like [`enumerate_with`](Self::enumerate_with), plus a flag that is
    /// true when the list is the whole group.
    pub fn enumerate_complete(
        &self,
        bound: u32,
        limits: EnumerationLimits,
    ) -> Result<(Vec<AffineElement>, bool), NumberError> {
        self.enumerate_inner(bound, limits)
    }

    fn enumerate_inner(
        &self,
        bound: u32,
        limits: EnumerationLimits,
    ) -> Result<(Vec<AffineElement>, bool), NumberError> {
        if bound > limits.max_bound {
            return Err(NumberError::UnboundedRequest {
                bound: bound.into(),
                cap: limits.max_bound.into(),
            });
        }
        let too_many = |count: f64| -> Result<(), NumberError> {
            if count > limits.max_elements as f64 {
                Err(NumberError::UnboundedRequest { bound: bound.into(), cap: limits.max_bound.into() })
            } else {
                Ok(())
            }
        };
        let n = self.dimension;
        match &self.kind {
            GroupKind::FiniteMatrixGroup { elements } => Ok((elements.clone(), true)),
            GroupKind::TranslationLattice { generators } => {
                let g = generators.len();
                let side = 2 * bound as usize + 1;
                too_many((side as f64).powi(g as i32))?;
                let b = bound as i64;
                let tuples = ordered_tuples(g, side, |i| (i as i64 - b).abs());
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for t in tuples {
                    let mut v = vec![QAlpha::zero(); n];
                    for (gen, &i) in generators.iter().zip(&t) {
                        let k = Rational::from_integer((i as i64 - b).into());
                        for (vi, gi) in v.iter_mut().zip(gen) {
                            *vi = &*vi + &gi.scale(&k);
                        }
                    }
                    if seen.insert(v.clone()) {
                        out.push(AffineElement::translation(v));
                    }
                }
                Ok((out, g == 0))
            }
            GroupKind::RationalTranslations => {
                let comps = rationals_by_height(bound);
                too_many((comps.len() as f64).powi(n as i32))?;
                let heights: Vec<i64> =
                    comps.iter().map(|r| rational_height(r).to_i64().unwrap_or(i64::MAX)).collect();
                let tuples = ordered_tuples(n, comps.len(), |i| heights[i]);
                let out = tuples
                    .into_iter()
                    .map(|t| {
                        AffineElement::translation(
                            t.iter().map(|&i| QAlpha::from_rational(comps[i].clone())).collect(),
                        )
                    })
                    .collect();
                Ok((out, false))
            }
            GroupKind::GeneratedGroup { generators } => {
                let mut symmetric: Vec<AffineElement> = Vec::new();
                for g in generators.iter().cloned().chain(generators.iter().map(AffineElement::inverse)) {
                    if !symmetric.contains(&g) {
                        symmetric.push(g);
                    }
                }
                let id = AffineElement::identity(n);
                let mut seen: HashSet<AffineElement> = HashSet::from([id.clone()]);
                let mut out = vec![id.clone()];
                let mut frontier = vec![id];
                let mut saturated = false;
                for _ in 0..bound {
                    let mut next = Vec::new();
                    for e in &frontier {
                        for s in &symmetric {
                            let w = s.compose(e)?;
                            if seen.insert(w.clone()) {
                                next.push(w.clone());
                                out.push(w);
                            }
                        }
                    }
                    too_many(out.len() as f64)?;
                    if next.is_empty() {
                        saturated = true;
                        break;
                    }
                    frontier = next;
                }
                Ok((out, saturated))
            }
        }
    }

    /// Bounded membership test.
    pub fn contains(&self, g: &AffineElement, bound: u32) -> Membership {
        if g.dim() != self.dimension {
            return Membership::NotMember;
        }
        match &self.kind {
            GroupKind::TranslationLattice { generators } => {
                if !g.is_translation() {
                    return Membership::NotMember;
                }
                match solve_lattice(generators, g.translation_part()) {
                    Err(()) => Membership::NotMember,
                    Ok(Some(k)) => {
                        if !k.iter().all(Rational::is_integer) {
                            Membership::NotMember
                        } else if k.iter().all(|ki| ki.abs() <= Rational::from_integer(bound.into())) {
                            Membership::Member
                        } else {
                            Membership::Unknown
                        }
                    }
                    Ok(None) => self.contains_by_enumeration(g, bound),
                }
            }
            GroupKind::RationalTranslations => {
                if !g.is_translation() || !g.translation_part().iter().all(QAlpha::is_rational) {
                    return Membership::NotMember;
                }
                let limit = BigInt::from(bound);
                if g.translation_part().iter().all(|x| rational_height(x.rational_part()) <= limit) {
                    Membership::Member
                } else {
                    Membership::Unknown
                }
            }
            _ => self.contains_by_enumeration(g, bound),
        }
    }

    fn contains_by_enumeration(&self, g: &AffineElement, bound: u32) -> Membership {
        match self.enumerate_inner(bound, EnumerationLimits::default()) {
            Ok((elements, complete)) => {
                if elements.contains(g) {
                    Membership::Member
                } else if complete {
                    Membership::NotMember
                } else {
                    Membership::Unknown
                }
            }
            Err(_) => Membership::Unknown,
        }
    }

    /// Searches for `γ ∈ Γ` with `γ·x = y` among elements of size ≤ `bound`.
    ///
    /// For translation lattices with ℚ-independent generators and for ℚⁿ the
    /// answer is computed by solving for the translation, so an impossible
    /// difference is certified `Absent` at any bound.
    pub fn orbit_search(&self, x: &[QAlpha], y: &[QAlpha], bound: u32) -> Result<OrbitSearch, NumberError> {
        for v in [x, y] {
            if v.len() != self.dimension {
                return Err(NumberError::DimensionMismatch { expected: self.dimension, found: v.len() });
            }
        }
        match &self.kind {
            GroupKind::TranslationLattice { .. } | GroupKind::RationalTranslations => {
                let d: Vec<QAlpha> = y.iter().zip(x).map(|(a, b)| a - b).collect();
                let t = AffineElement::translation(d);
                Ok(match self.contains(&t, bound) {
                    Membership::Member => OrbitSearch::Found(t),
                    Membership::NotMember => OrbitSearch::Absent,
                    Membership::Unknown => OrbitSearch::Inconclusive,
                })
            }
            _ => {
                let (elements, complete) = self.enumerate_inner(bound, EnumerationLimits::default())?;
                for g in elements {
                    if g.apply(x)? == y {
                        return Ok(OrbitSearch::Found(g));
                    }
                }
                Ok(if complete { OrbitSearch::Absent } else { OrbitSearch::Inconclusive })
            }
        }
    }

    /// `Some(γ)` with `γ·x = y` if one is found within `bound`. `None` means
    /// "not found within bound" (or a dimension mismatch), not nonexistence.
    pub fn orbit_witness(&self, x: &[QAlpha], y: &[QAlpha], bound: u32) -> Option<AffineElement> {
        self.orbit_search(x, y, bound).ok().and_then(OrbitSearch::witness)
    }

    /// True when the group is ℤ + αℤ in dimension one, up to generator order
    /// and sign.
    pub fn is_integer_alpha_lattice(&self) -> bool {
        match &self.kind {
            GroupKind::TranslationLattice { generators } if self.dimension == 1 && generators.len() == 2 => {
                let mut found_one = false;
                let mut found_alpha = false;
                for g in generators {
                    let v = &g[0];
                    found_one |= v.is_rational() && v.rational_part().abs().is_one();
                    found_alpha |= v.rational_part().is_zero() && v.alpha_part().abs().is_one();
                }
                found_one && found_alpha
            }
            _ => false,
        }
    }
}
