//! Quasifold atlases as data, and the structure groupoid they generate.
//!
//! A chart is `ℝⁿ/Γ ⊇ U → X`; only its strict lift `F = f ∘ class` matters
//! here, and that is described by Γ, the domain `U` (whole space or a box of
//! open intervals) and a label. Transitions are affine chart changes, declared
//! to satisfy `F_dst ∘ map = F_src` on the overlap.

mod catalog;
mod structure;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupoid::{ChartId, GroupoidError, NebulaPoint};
use crate::numbers::{AffineElement, AlphaWitness, GroupKind, GroupPresentation, NumberError, QAlpha};

pub use catalog::{reflection_orbifold, rationals_line, t_alpha};
pub use structure::{
    ArrowSearch, AssemblyReport, ChartBlock, Connection, GroupoidOptions, PointEquality, QuasifoldPoint,
    StructureGroupoid,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("empty-atlas: at least one chart is required")]
    Empty,
    #[error("duplicate-chart: {0}")]
    DuplicateChart(String),
    #[error("unknown-chart: {0}")]
    UnknownChart(String),
    #[error("unsaturated-domain: chart {chart}: {detail}")]
    UnsaturatedDomain { chart: String, detail: String },
    #[error("inconsistent-transition: {0}")]
    InconsistentTransition(String),
    #[error("point-outside-domain: {0}")]
    PointOutsideDomain(String),
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

/// Open interval; a missing endpoint is infinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(default)]
    pub lo: Option<QAlpha>,
    #[serde(default)]
    pub hi: Option<QAlpha>,
}

impl Interval {
    pub fn new(lo: Option<QAlpha>, hi: Option<QAlpha>) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: &QAlpha, w: &AlphaWitness) -> Result<bool, NumberError> {
        use std::cmp::Ordering::Less;
        if let Some(lo) = &self.lo {
            if w.compare(lo, x)? != Less {
                return Ok(false);
            }
        }
        if let Some(hi) = &self.hi {
            if w.compare(x, hi)? != Less {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A few exact interior points, used to spot-check transitions.
    fn samples(&self) -> Vec<QAlpha> {
        let q = |s: &str| s.parse::<QAlpha>().expect("literal");
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => {
                let width = hi - lo;
                (1..=5).map(|j| lo + &width.scale(&crate::numbers::rational(j, 6))).collect()
            }
            (Some(lo), None) => ["1/3", "1", "5/2", "α", "4+α/3"].iter().map(|s| lo + &q(s)).collect(),
            (None, Some(hi)) => ["1/3", "1", "5/2", "α", "4+α/3"].iter().map(|s| hi - &q(s)).collect(),
            (None, None) => whole_samples(),
        }
    }
}

fn whole_samples() -> Vec<QAlpha> {
    ["0", "1/2", "α/3", "1+α/5", "-2/7+α", "-3/2"].iter().map(|s| s.parse().expect("literal")).collect()
}

/// Chart domain `U ⊆ ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Whole,
    Box(Vec<Interval>),
}

impl Domain {
    pub fn contains(&self, x: &[QAlpha], w: &AlphaWitness) -> Result<bool, NumberError> {
        match self {
            Domain::Whole => Ok(true),
            Domain::Box(ivs) => {
                if ivs.len() != x.len() {
                    return Err(NumberError::DimensionMismatch { expected: ivs.len(), found: x.len() });
                }
                for (iv, xi) in ivs.iter().zip(x) {
                    if !iv.contains(xi, w)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// A handful of exact sample points inside the domain.
    pub fn samples(&self, dim: usize) -> Vec<Vec<QAlpha>> {
        let per_coord: Vec<Vec<QAlpha>> = match self {
            Domain::Whole => vec![whole_samples(); dim],
            Domain::Box(ivs) => ivs.iter().map(Interval::samples).collect(),
        };
        let len = per_coord.iter().map(Vec::len).min().unwrap_or(0);
        (0..len).map(|k| per_coord.iter().enumerate().map(|(i, c)| c[(k + i) % len].clone()).collect()).collect()
    }
}

fn default_domain() -> Domain {
    Domain::Whole
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub id: ChartId,
    #[serde(default)]
    pub label: String,
    pub group: GroupPresentation,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

impl Chart {
    pub fn new(id: &str, group: GroupPresentation, domain: Domain) -> Self {
        Self { id: ChartId::new(id), label: format!("f_{id} ∘ class"), group, domain }
    }

    pub fn dim(&self) -> usize {
        self.group.dimension()
    }

    /// Checks that every generator of Γ maps the domain box onto itself.
    fn check_saturated(&self) -> Result<(), AtlasError> {
        let ivs = match &self.domain {
            Domain::Whole => return Ok(()),
            Domain::Box(ivs) => ivs,
        };
        let fail = |detail: String| AtlasError::UnsaturatedDomain { chart: self.id.to_string(), detail };
        if ivs.len() != self.dim() {
            return Err(fail(format!("box has {} sides, group dimension is {}", ivs.len(), self.dim())));
        }
        let gens: Vec<AffineElement> = match self.group.kind() {
            GroupKind::TranslationLattice { generators } => {
                generators.iter().cloned().map(AffineElement::translation).collect()
            }
            GroupKind::RationalTranslations => {
                return Err(fail("ℚⁿ moves every bounded box".into()));
            }
            GroupKind::FiniteMatrixGroup { elements } => elements.clone(),
            GroupKind::GeneratedGroup { generators } => generators.clone(),
        };
        for g in &gens {
            if !preserves_box(g, ivs) {
                return Err(fail(format!("{} does not preserve the box", g.pretty())));
            }
        }
        Ok(())
    }
}

/// Exact check that `g(box) = box`, for `g` with a monomial linear part.
fn preserves_box(g: &AffineElement, ivs: &[Interval]) -> bool {
    use num_traits::{Signed, Zero};
    for (i, row) in g.linear().iter().enumerate() {
        let nonzero: Vec<usize> = (0..row.len()).filter(|&j| !row[j].is_zero()).collect();
        let [j] = nonzero[..] else { return false };
        let a = &row[j];
        let b = &g.translation_part()[i];
        let image = |e: &Option<QAlpha>| e.as_ref().map(|x| &x.scale(a) + b);
        let (lo, hi) = if a.is_positive() {
            (image(&ivs[j].lo), image(&ivs[j].hi))
        } else {
            (image(&ivs[j].hi), image(&ivs[j].lo))
        };
        if lo != ivs[i].lo || hi != ivs[i].hi {
            return false;
        }
    }
    true
}

/// Chart change `src_chart → dst_chart`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub src_chart: ChartId,
    pub dst_chart: ChartId,
    pub map: AffineElement,
}

impl Transition {
    pub fn new(src: &str, dst: &str, map: AffineElement) -> Self {
        Self { src_chart: ChartId::new(src), dst_chart: ChartId::new(dst), map }
    }
}

/// A finite atlas. Identity transitions are implicit (they are the units of
/// the groupoid) and need not be listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAtlas", into = "RawAtlas")]
pub struct Atlas {
    charts: Vec<Chart>,
    transitions: Vec<Transition>,
}

#[derive(Serialize, Deserialize)]
struct RawAtlas {
    charts: Vec<Chart>,
    #[serde(default)]
    transitions: Vec<Transition>,
}

impl TryFrom<RawAtlas> for Atlas {
    type Error = AtlasError;
    fn try_from(raw: RawAtlas) -> Result<Self, Self::Error> {
        Atlas::new(raw.charts, raw.transitions)
    }
}

impl From<Atlas> for RawAtlas {
    fn from(a: Atlas) -> Self {
        RawAtlas { charts: a.charts, transitions: a.transitions }
    }
}

impl Atlas {
    pub fn new(charts: Vec<Chart>, transitions: Vec<Transition>) -> Result<Self, AtlasError> {
        let first = charts.first().ok_or(AtlasError::Empty)?;
        let n = first.dim();
        let mut ids = HashSet::new();
        for c in &charts {
            if !ids.insert(c.id.clone()) {
                return Err(AtlasError::DuplicateChart(c.id.to_string()));
            }
            if c.dim() != n {
                return Err(NumberError::DimensionMismatch { expected: n, found: c.dim() }.into());
            }
            c.check_saturated()?;
        }
        for t in &transitions {
            for id in [&t.src_chart, &t.dst_chart] {
                if !ids.contains(id) {
                    return Err(AtlasError::UnknownChart(id.to_string()));
                }
            }
            if t.map.dim() != n {
                return Err(NumberError::DimensionMismatch { expected: n, found: t.map.dim() }.into());
            }
        }
        Ok(Self { charts, transitions })
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn dim(&self) -> usize {
        self.charts[0].dim()
    }

    pub fn chart(&self, id: &ChartId) -> Result<&Chart, AtlasError> {
        self.charts.iter().find(|c| &c.id == id).ok_or_else(|| AtlasError::UnknownChart(id.to_string()))
    }

    /// Same atlas with every chart id suffixed.
    pub fn renamed(&self, suffix: &str) -> Atlas {
        let re = |id: &ChartId| ChartId::new(format!("{id}{suffix}"));
        Atlas {
            charts: self.charts.iter().map(|c| Chart { id: re(&c.id), ..c.clone() }).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition { src_chart: re(&t.src_chart), dst_chart: re(&t.dst_chart), map: t.map.clone() })
                .collect(),
        }
    }

    /// `A ⊔ B` with extra cross transitions. Chart ids must not collide.
    pub fn disjoint_union(&self, other: &Atlas, links: Vec<Transition>) -> Result<Atlas, AtlasError> {
        let charts = self.charts.iter().chain(&other.charts).cloned().collect();
        let transitions = self.transitions.iter().chain(&other.transitions).cloned().chain(links).collect();
        Atlas::new(charts, transitions)
    }

    /// `A ⊔ A` joined by identity transitions between corresponding charts.
    /// Copies are suffixed `.0` and `.1`.
    pub fn duplicated(&self) -> Atlas {
        let (a, b) = (self.renamed(".0"), self.renamed(".1"));
        let links = self
            .charts
            .iter()
            .map(|c| {
                Transition::new(&format!("{}.0", c.id), &format!("{}.1", c.id), AffineElement::identity(c.dim()))
            })
            .collect();
        a.disjoint_union(&b, links).expect("suffixed copies cannot collide")
    }

    pub fn point(&self, chart: &str, coords: Vec<QAlpha>) -> NebulaPoint {
        NebulaPoint::new(chart, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QAlpha {
        s.parse().unwrap()
    }

    #[test]
    fn interval_membership() {
        let w = AlphaWitness::golden();
        let iv = Interval::new(Some(q("0")), Some(q("1")));
        assert!(iv.contains(&q("α"), &w).unwrap());
        assert!(!iv.contains(&q("1"), &w).unwrap());
        assert!(!iv.contains(&q("1+α"), &w).unwrap());
        let ray = Interval::new(Some(q("1/2")), None);
        assert!(ray.contains(&q("100"), &w).unwrap());
    }

    #[test]
    fn samples_are_inside() {
        let w = AlphaWitness::golden();
        let d = Domain::Box(vec![Interval::new(Some(q("-2")), Some(q("2"))), Interval::new(Some(q("1/2")), None)]);
        let pts = d.samples(2);
        assert_eq!(pts.len(), 5);
        for p in pts {
            assert!(d.contains(&p, &w).unwrap());
        }
    }

    #[test]
    fn reflection_saturates_symmetric_box() {
        let chart = Chart::new(
            "cone",
            GroupPresentation::reflection(),
            Domain::Box(vec![Interval::new(Some(q("-2")), Some(q("2")))]),
        );
        assert!(chart.check_saturated().is_ok());
        let bad = Chart::new(
            "cone",
            GroupPresentation::reflection(),
            Domain::Box(vec![Interval::new(Some(q("-1")), Some(q("2")))]),
        );
        assert!(matches!(bad.check_saturated(), Err(AtlasError::UnsaturatedDomain { .. })));
    }

    #[test]
    fn translation_group_needs_whole_domain() {
        let chart = Chart::new(
            "c",
            GroupPresentation::z_plus_alpha_z(),
            Domain::Box(vec![Interval::new(Some(q("0")), Some(q("1")))]),
        );
        assert!(Atlas::new(vec![chart], vec![]).is_err());
    }

    #[test]
    fn validation_errors() {
        assert_eq!(Atlas::new(vec![], vec![]), Err(AtlasError::Empty));
        let c = Chart::new("c", GroupPresentation::z_plus_alpha_z(), Domain::Whole);
        assert!(matches!(Atlas::new(vec![c.clone(), c.clone()], vec![]), Err(AtlasError::DuplicateChart(_))));
        let t = Transition::new("c", "nowhere", AffineElement::identity(1));
        assert!(matches!(Atlas::new(vec![c], vec![t]), Err(AtlasError::UnknownChart(_))));
    }

    #[test]
    fn json_round_trip() {
        let atlas = reflection_orbifold();
        let text = serde_json::to_string_pretty(&atlas).unwrap();
        let back: Atlas = serde_json::from_str(&text).unwrap();
        assert_eq!(back, atlas);
        let dup = t_alpha().duplicated();
        assert_eq!(dup.charts().len(), 2);
        assert_eq!(dup.transitions().len(), 1);
    }

    #[test]
    fn parses_hand_written_file() {
        let text = r#"{
          "charts": [
            {"id": "line", "group": {"dimension": 1, "kind": "translation_lattice",
                                     "generators": [["1"], ["α"]]}, "domain": "whole"}
          ]
        }"#;
        let atlas: Atlas = serde_json::from_str(text).unwrap();
        assert!(atlas.charts()[0].group.is_integer_alpha_lattice());
        assert_eq!(atlas.dim(), 1);
    }
}
