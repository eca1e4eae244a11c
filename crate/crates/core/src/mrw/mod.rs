//! Equivalence bimodules between the structure groupoids of two atlases of
//! one quasifold.
//!
//! An element of `Z` is the germ at `r` of an affine `f` from a chart of `A`
//! to a chart of `A'` with `F' ∘ f = F`. `G` acts on the left by precomposing,
//! `G'` on the right by postcomposing. Seeds are the declared linking maps;
//! every element is a `G'`-word after a seed after a `G`-word.

mod axioms;
mod circle;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{t_alpha, Atlas, AtlasError, Chart, Domain, PointEquality, StructureGroupoid, Transition};
use crate::groupoid::{Arrow, ChartId, GroupoidError, NebulaPoint};
use crate::numbers::{rational, AffineElement, GroupPresentation, NumberError, QAlpha};

pub use axioms::{check_axioms, AxiomCheck, MrwReport};
pub use circle::{functor_check, phi_arrow, phi_object, CircleArrow, FunctorReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MrwError {
    #[error("incompatible-seed: {0}")]
    IncompatibleSeed(String),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Number(#[from] NumberError),
}

/// Germ of an ev-compatible affine map from the nebula of `A` to that of `A'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinkingGerm {
    src: NebulaPoint,
    map: AffineElement,
    dst_chart: ChartId,
}

impl LinkingGerm {
    pub fn new(src: NebulaPoint, map: AffineElement, dst_chart: ChartId) -> Result<Self, MrwError> {
        if map.dim() != src.dim() {
            return Err(NumberError::DimensionMismatch { expected: map.dim(), found: src.dim() }.into());
        }
        Ok(Self { src, map, dst_chart })
    }

    pub fn src(&self) -> &NebulaPoint {
        &self.src
    }

    pub fn map(&self) -> &AffineElement {
        &self.map
    }

    pub fn dst_chart(&self) -> &ChartId {
        &self.dst_chart
    }

    /// `class(germ(f)_r) = f(r)`, a point of the nebula of `A'`.
    pub fn class(&self) -> NebulaPoint {
        let coords = self.map.apply(&self.src.coords).expect("dimensions checked at construction");
        NebulaPoint::new(self.dst_chart.clone(), coords)
    }

    /// The same germ read backwards, an element of `Z⁻¹` (from `A'` to `A`).
    pub fn invert(&self) -> LinkingGerm {
        LinkingGerm { src: self.class(), map: self.map.inverse(), dst_chart: self.src.chart.clone() }
    }

    pub fn pretty(&self) -> String {
        format!("⟨{}, {}⟩ → {}", self.src.pretty(), self.map.pretty(), self.dst_chart)
    }
}

/// `g · z`, first `g` then `z`. Needs `trg(g) = src(z)`.
pub fn left_act(g: &Arrow, z: &LinkingGerm) -> Result<LinkingGerm, MrwError> {
    let t = g.trg();
    if t != z.src {
        return Err(GroupoidError::NotComposable { target: t.pretty(), source_point: z.src.pretty() }.into());
    }
    Ok(LinkingGerm { src: g.src().clone(), map: z.map.compose(g.map())?, dst_chart: z.dst_chart.clone() })
}

/// `z · g'`, first `z` then `g'`. Needs `src(g') = class(z)`.
pub fn right_act(z: &LinkingGerm, g: &Arrow) -> Result<LinkingGerm, MrwError> {
    let c = z.class();
    if &c != g.src() {
        return Err(GroupoidError::NotComposable { target: c.pretty(), source_point: g.src().pretty() }.into());
    }
    Ok(LinkingGerm { src: z.src.clone(), map: g.map().compose(&z.map)?, dst_chart: g.dst_chart().clone() })
}

pub fn class_map(z: &LinkingGerm) -> NebulaPoint {
    z.class()
}

/// Answer to "is `z'` in the `G`-orbit of `z`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientWitness {
    /// `g` with `z' = g · z`.
    Related(Arrow),
    /// Certified: left translates keep the class, and the classes differ.
    ClassesDiffer,
}

/// Outcome of [`BiAtlas::surjectivity_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Probe {
    Found(LinkingGerm),
    Inconclusive,
}

#[derive(Serialize, Deserialize)]
struct RawBiAtlas {
    left: Atlas,
    right: Atlas,
    links: Vec<Transition>,
}

/// Two atlases and the linking seeds between them.
#[derive(Clone, Debug)]
pub struct BiAtlas {
    left: StructureGroupoid,
    right: StructureGroupoid,
    links: Vec<Transition>,
    /// `A ⊔ A'` with the seeds as transitions, used to compare points across
    /// the two sides. Charts are suffixed with [`LEFT_TAG`] and [`RIGHT_TAG`].
    union: StructureGroupoid,
}

const LEFT_TAG: &str = "@A";
const RIGHT_TAG: &str = "@A'";

fn tagged(p: &NebulaPoint, tag: &str) -> NebulaPoint {
    NebulaPoint::new(ChartId::new(format!("{}{tag}", p.chart)), p.coords.clone())
}

impl Serialize for BiAtlas {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawBiAtlas { left: self.left.atlas().clone(), right: self.right.atlas().clone(), links: self.links.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiAtlas {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawBiAtlas::deserialize(d)?;
        BiAtlas::new(raw.left, raw.right, raw.links).map_err(serde::de::Error::custom)
    }
}

impl BiAtlas {
    /// Checks that every seed joins a chart of `A` to a chart of `A'` and
    /// passes the transition spot-check of `A ⊔ A'`.
    pub fn new(left: Atlas, right: Atlas, links: Vec<Transition>) -> Result<Self, MrwError> {
        if links.is_empty() {
            return Err(MrwError::IncompatibleSeed("a bi-atlas needs at least one linking seed".into()));
        }
        for l in &links {
            left.chart(&l.src_chart)?;
            right.chart(&l.dst_chart)?;
        }
        let tag = |c: &ChartId, t: &str| format!("{c}{t}");
        let cross = links
            .iter()
            .map(|l| Transition::new(&tag(&l.src_chart, LEFT_TAG), &tag(&l.dst_chart, RIGHT_TAG), l.map.clone()))
            .collect();
        let union = left.renamed(LEFT_TAG).disjoint_union(&right.renamed(RIGHT_TAG), cross)?;
        let union = StructureGroupoid::build(union).map_err(|e| match e {
            AtlasError::InconsistentTransition(d) => MrwError::IncompatibleSeed(d),
            other => other.into(),
        })?;
        Ok(Self { left: StructureGroupoid::build(left)?, right: StructureGroupoid::build(right)?, links, union })
    }

    pub fn left(&self) -> &StructureGroupoid {
        &self.left
    }

    pub fn right(&self) -> &StructureGroupoid {
        &self.right
    }

    pub fn links(&self) -> &[Transition] {
        &self.links
    }

    /// `Z⁻¹`: sides swapped, seeds inverted.
    pub fn inverse(&self) -> Result<BiAtlas, MrwError> {
        let links = self
            .links
            .iter()
            .map(|l| Transition { src_chart: l.dst_chart.clone(), dst_chart: l.src_chart.clone(), map: l.map.inverse() })
            .collect();
        BiAtlas::new(self.right.atlas().clone(), self.left.atlas().clone(), links)
    }

    /// The seed `l` at `r`, if `r` and `l(r)` lie in the chart domains.
    pub fn seed_at(&self, l: &Transition, r: &[QAlpha]) -> Result<Option<LinkingGerm>, MrwError> {
        let src = NebulaPoint::new(l.src_chart.clone(), r.to_vec());
        let z = LinkingGerm::new(src, l.map.clone(), l.dst_chart.clone())?;
        if self.left.validate_point(&z.src).is_err() || self.right.validate_point(&z.class()).is_err() {
            return Ok(None);
        }
        Ok(Some(z))
    }

    /// Three-valued `ev_A(src z) = ev_{A'}(class z)`.
    pub fn is_compatible(&self, z: &LinkingGerm, bound: u32) -> Result<PointEquality, MrwError> {
        self.same_point(&z.src, &z.class(), bound)
    }

    /// Three-valued `ev_A(r) = ev_{A'}(r')` for `r` in the nebula of `A` and
    /// `r'` in that of `A'`.
    pub fn same_point(&self, r: &NebulaPoint, r2: &NebulaPoint, bound: u32) -> Result<PointEquality, MrwError> {
        let a = self.union.evaluate(&tagged(r, LEFT_TAG))?;
        let b = self.union.evaluate(&tagged(r2, RIGHT_TAG))?;
        Ok(self.union.compare(&a, &b, bound)?)
    }

    /// `g` with `z' = g · z` when the classes agree. The map is forced:
    /// `z.map⁻¹ ∘ z'.map`, an arrow `src z' → src z`.
    pub fn quotient_witness(&self, z: &LinkingGerm, z2: &LinkingGerm) -> Result<QuotientWitness, MrwError> {
        if z.class() != z2.class() {
            return Ok(QuotientWitness::ClassesDiffer);
        }
        let map = z.map.inverse().compose(&z2.map)?;
        Ok(QuotientWitness::Related(Arrow::new(z2.src.clone(), map, z.src.chart.clone())?))
    }

    /// `g'` with `z' = z · g'` when the sources agree.
    pub fn right_quotient_witness(&self, z: &LinkingGerm, z2: &LinkingGerm) -> Result<Option<Arrow>, MrwError> {
        if z.src != z2.src {
            return Ok(None);
        }
        let map = z2.map.compose(&z.map.inverse())?;
        Ok(Some(Arrow::new(z.class(), map, z2.dst_chart.clone())?))
    }

    /// Some `z` with `class(z) = p`: a seed hitting `p` directly, or a seed
    /// hitting a point joined to `p` by an arrow of `G'` within `bound`.
    pub fn surjectivity_probe(&self, p: &NebulaPoint, bound: u32) -> Result<Probe, MrwError> {
        self.right.validate_point(p)?;
        let mut arrows = vec![Arrow::unit(p.clone())];
        for b in 1..=bound {
            if let Some(z) = self.seed_hitting(&arrows)? {
                return Ok(Probe::Found(z));
            }
            arrows = self.right.arrows_from(p, b)?.arrows;
        }
        Ok(self.seed_hitting(&arrows)?.map_or(Probe::Inconclusive, Probe::Found))
    }

    /// First `z · a⁻¹` with `z` a seed landing on `trg(a)`.
    fn seed_hitting(&self, arrows: &[Arrow]) -> Result<Option<LinkingGerm>, MrwError> {
        for a in arrows {
            let y = a.trg();
            for l in self.links.iter().filter(|l| l.dst_chart == y.chart) {
                let r = l.map.inverse().apply(&y.coords)?;
                if let Some(z) = self.seed_at(l, &r)? {
                    return Ok(Some(right_act(&z, &a.invert())?));
                }
            }
        }
        Ok(None)
    }

    /// Some `z` with `src(z) = r`: the first seed defined at `r`.
    pub fn source_probe(&self, r: &NebulaPoint) -> Result<Probe, MrwError> {
        self.left.validate_point(r)?;
        for l in self.links.iter().filter(|l| l.src_chart == r.chart) {
            if let Some(z) = self.seed_at(l, &r.coords)? {
                return Ok(Probe::Found(z));
            }
        }
        Ok(Probe::Inconclusive)
    }
}

/// `T_α` with chart `x ↦ class(x)` against the chart `x ↦ class(2x)`, whose
/// group is `½(ℤ + αℤ)`, linked by `x ↦ x/2`.
pub fn two_scale() -> BiAtlas {
    let half = rational(1, 2);
    let gens = vec![vec![QAlpha::from_rational(half.clone())], vec![QAlpha::alpha().scale(&half)]];
    let group = GroupPresentation::translation_lattice(gens).expect("independent generators");
    let right = Atlas::new(vec![Chart::new("class", group, Domain::Whole)], vec![]).expect("valid atlas");
    let seed = Transition::new("class", "class", AffineElement::affine1(half, QAlpha::zero()).expect("invertible"));
    BiAtlas::new(t_alpha(), right, vec![seed]).expect("compatible seed")
}

/// `T_α` against `T_α ⊔ T_α`, each copy linked by the identity.
pub fn duplicated() -> BiAtlas {
    let right = t_alpha().duplicated();
    let links = right
        .charts()
        .iter()
        .map(|c| Transition::new("class", c.id.as_str(), AffineElement::identity(1)))
        .collect();
    BiAtlas::new(t_alpha(), right, links).expect("compatible seeds")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QAlpha {
        s.parse().unwrap()
    }

    fn pt(x: &str) -> NebulaPoint {
        NebulaPoint::on("class", q(x))
    }

    fn t(x: &str) -> AffineElement {
        AffineElement::translate1(q(x))
    }

    fn halve() -> AffineElement {
        AffineElement::affine1(rational(1, 2), QAlpha::zero()).unwrap()
    }

    #[test]
    fn left_action_example() {
        let z = LinkingGerm::new(pt("1+α"), halve(), "class".into()).unwrap();
        let g = Arrow::new(pt("0"), t("1+α"), "class".into()).unwrap();
        let gz = left_act(&g, &z).unwrap();
        assert_eq!(gz.src(), &pt("0"));
        assert_eq!(gz.map(), &AffineElement::affine1(rational(1, 2), q("1/2+1/2α")).unwrap());
        assert_eq!(gz.class(), z.class());
        assert!(left_act(&Arrow::unit(pt("0")), &z).is_err());
        assert_eq!(left_act(&Arrow::unit(pt("1+α")), &z).unwrap(), z);
    }

    #[test]
    fn right_action_example() {
        let z = LinkingGerm::new(pt("0"), halve(), "class".into()).unwrap();
        let g = Arrow::new(pt("0"), t("1/2+1/2α"), "class".into()).unwrap();
        let zg = right_act(&z, &g).unwrap();
        assert_eq!(zg.map(), &AffineElement::affine1(rational(1, 2), q("1/2+1/2α")).unwrap());
        assert_eq!(zg.class(), g.trg());
        assert_eq!(right_act(&z, &Arrow::unit(pt("0"))).unwrap(), z);
    }

    #[test]
    fn probes() {
        let bi = two_scale();
        let Probe::Found(z) = bi.surjectivity_probe(&pt("1/2+1/2α"), 1).unwrap() else { panic!() };
        assert_eq!(z.src(), &pt("1+α"));
        assert_eq!(z.map(), &halve());
        let Probe::Found(z) = bi.surjectivity_probe(&pt("0"), 1).unwrap() else { panic!() };
        assert_eq!((z.src(), z.map()), (&pt("0"), &halve()));
        let dup = duplicated();
        let p = NebulaPoint::on("class.1", q("α"));
        let Probe::Found(z) = dup.surjectivity_probe(&p, 1).unwrap() else { panic!() };
        assert!(z.map().is_identity());
        assert_eq!(z.class(), p);
    }

    #[test]
    fn quotient_witness_recovers_arrow() {
        let bi = two_scale();
        let z = LinkingGerm::new(pt("1/3"), halve(), "class".into()).unwrap();
        let g0 = Arrow::new(pt("1/3-2+α"), t("2-α"), "class".into()).unwrap();
        let z2 = left_act(&g0, &z).unwrap();
        assert_eq!(bi.quotient_witness(&z, &z2).unwrap(), QuotientWitness::Related(g0));
        let other = LinkingGerm::new(pt("α/3"), halve(), "class".into()).unwrap();
        assert_eq!(bi.quotient_witness(&z, &other).unwrap(), QuotientWitness::ClassesDiffer);
        assert_eq!(bi.is_compatible(&z, 4).unwrap(), PointEquality::Equal(
            Arrow::new(NebulaPoint::on("class@A", q("1/3")), halve(), "class@A'".into()).unwrap()
        ));
    }

    #[test]
    fn bad_seed_rejected() {
        let right = t_alpha();
        let seed = Transition::new("class", "class", AffineElement::affine1(rational(1, 2), QAlpha::zero()).unwrap());
        let err = BiAtlas::new(t_alpha(), right, vec![seed]).unwrap_err();
        assert!(err.to_string().starts_with("incompatible-seed"), "{err}");
    }

    #[test]
    fn inverse_bimodule() {
        let bi = two_scale();
        let inv = bi.inverse().unwrap();
        let z = LinkingGerm::new(pt("α"), halve(), "class".into()).unwrap();
        let zi = z.invert();
        assert!(inv.is_compatible(&zi, 4).unwrap().is_equal());
        let g = Arrow::new(pt("α-1"), t("1"), "class".into()).unwrap();
        let lhs = left_act(&g, &z).unwrap().invert();
        let rhs = right_act(&zi, &g.invert()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_round_trip() {
        let bi = two_scale();
        let text = serde_json::to_string(&bi).unwrap();
        let back: BiAtlas = serde_json::from_str(&text).unwrap();
        assert_eq!(back.links(), bi.links());
    }
}
