use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::{Atlas, AtlasError, Domain};
use crate::groupoid::{Arrow, ChartId, NebulaPoint};
use crate::numbers::{AffineElement, AlphaWitness, EnumerationLimits, OrbitSearch, QAlpha};

#[derive(Clone, Debug)]
pub struct GroupoidOptions {
    pub witness: AlphaWitness,
    pub limits: EnumerationLimits,
    /// Orbit-search bound used when spot-checking transitions.
    pub check_bound: u32,
}

impl Default for GroupoidOptions {
    fn default() -> Self {
        Self { witness: AlphaWitness::golden(), limits: EnumerationLimits::default(), check_bound: 16 }
    }
}

/// Structure groupoid of an atlas. Arrows are generated lazily: a word of
/// length `k` is a chain of `k` steps, each a non-identity element of the
/// current chart's group (enumerated at the same bound) or a declared
/// transition, used forwards or backwards. A step is allowed only when the
/// image lies in the domain of the chart it lands in.
#[derive(Clone, Debug)]
pub struct StructureGroupoid {
    atlas: Atlas,
    options: GroupoidOptions,
}

/// Arrows found from one source point.
#[derive(Clone, Debug)]
pub struct ArrowSearch {
    /// Breadth-first order, unit first, no duplicates.
    pub arrows: Vec<Arrow>,
    /// True when the list is every arrow out of the source, not just those
    /// within the bound. Only possible when all groups met are finite.
    pub exhaustive: bool,
}

/// Opaque handle for `ev(F, r)`; compare with [`StructureGroupoid::compare`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuasifoldPoint(NebulaPoint);

impl QuasifoldPoint {
    pub fn representative(&self) -> &NebulaPoint {
        &self.0
    }
}

/// Bounded answer to `ev(v) = ev(w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointEquality {
    /// Equal, with a connecting arrow `v → w`.
    Equal(Arrow),
    /// Certified different.
    NotEqual,
    /// No arrow within the bound and no certificate either.
    Inconclusive,
}

impl PointEquality {
    pub fn is_equal(&self) -> bool {
        matches!(self, PointEquality::Equal(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartBlock {
    pub chart: ChartId,
    /// First point of `ev⁻¹(x)` met in this chart.
    pub entry: NebulaPoint,
    /// Bounded part of `ev⁻¹(x) ∩ dom(F)`.
    pub objects: Vec<NebulaPoint>,
    /// Bounded part of `G_x^F`: `(o, γ)` for each object `o` and enumerated `γ`.
    pub arrows: Vec<Arrow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Connection {
    pub from_chart: ChartId,
    pub to_chart: ChartId,
    pub arrow: Arrow,
}

/// `G_x = G_x^{F_1} − G_x^{F_2} − ⋯` truncated at a bound.
#[derive(Clone, Debug, Serialize)]
pub struct AssemblyReport {
    pub point: NebulaPoint,
    pub bound: u32,
    pub blocks: Vec<ChartBlock>,
    pub connections: Vec<Connection>,
    pub isotropy: Vec<Arrow>,
}

/// Generators available at each chart for a given bound.
struct Moves {
    groups: HashMap<ChartId, (Vec<AffineElement>, bool)>,
    links: HashMap<ChartId, Vec<(AffineElement, ChartId)>>,
}

impl Moves {
    fn steps<'a>(&'a self, c: &'a ChartId, with_group: bool) -> Vec<(&'a AffineElement, &'a ChartId)> {
        let mut out = Vec::new();
        if with_group {
            if let Some((els, _)) = self.groups.get(c) {
                out.extend(els.iter().filter(|g| !g.is_identity()).map(|g| (g, c)));
            }
        }
        if let Some(ls) = self.links.get(c) {
            out.extend(ls.iter().map(|(m, d)| (m, d)));
        }
        out
    }

    fn complete(&self, c: &ChartId) -> bool {
        self.groups.get(c).is_some_and(|(_, done)| *done)
    }
}

impl StructureGroupoid {
    pub fn build(atlas: Atlas) -> Result<Self, AtlasError> {
        Self::build_with(atlas, GroupoidOptions::default())
    }

    /// Wraps the atlas and spot-checks every transition: all images of a
    /// sample point under words of length ≤ 2 that land in one chart must lie
    /// in one orbit of that chart's group.
    pub fn build_with(atlas: Atlas, options: GroupoidOptions) -> Result<Self, AtlasError> {
        let g = Self { atlas, options };
        g.check_transitions()?;
        Ok(g)
    }

    pub fn atlas(&self) -> &Atlas {
        &self.atlas
    }

    pub fn witness(&self) -> &AlphaWitness {
        &self.options.witness
    }

    pub fn options(&self) -> &GroupoidOptions {
        &self.options
    }

    fn domain(&self, c: &ChartId) -> Result<&Domain, AtlasError> {
        Ok(&self.atlas.chart(c)?.domain)
    }

    fn in_domain(&self, c: &ChartId, x: &[QAlpha]) -> Result<bool, AtlasError> {
        Ok(self.domain(c)?.contains(x, &self.options.witness)?)
    }

    /// Checks that the point names a chart, has the right dimension, and lies
    /// in the chart's domain.
    pub fn validate_point(&self, p: &NebulaPoint) -> Result<(), AtlasError> {
        let chart = self.atlas.chart(&p.chart)?;
        if p.dim() != chart.dim() {
            return Err(crate::numbers::NumberError::DimensionMismatch { expected: chart.dim(), found: p.dim() }.into());
        }
        if !self.in_domain(&p.chart, &p.coords)? {
            return Err(AtlasError::PointOutsideDomain(p.pretty()));
        }
        Ok(())
    }

    fn moves(&self, bound: u32) -> Result<Moves, AtlasError> {
        let mut groups = HashMap::new();
        for c in self.atlas.charts() {
            groups.insert(c.id.clone(), c.group.enumerate_complete(bound, self.options.limits)?);
        }
        let mut links: HashMap<ChartId, Vec<(AffineElement, ChartId)>> = HashMap::new();
        for t in self.atlas.transitions() {
            links.entry(t.src_chart.clone()).or_default().push((t.map.clone(), t.dst_chart.clone()));
        }
        for t in self.atlas.transitions() {
            links.entry(t.dst_chart.clone()).or_default().push((t.map.inverse(), t.src_chart.clone()));
        }
        Ok(Moves { groups, links })
    }

    /// Every generated arrow out of `v` of word length ≤ `bound`.
    pub fn arrows_from(&self, v: &NebulaPoint, bound: u32) -> Result<ArrowSearch, AtlasError> {
        self.validate_point(v)?;
        let moves = self.moves(bound)?;
        let unit = Arrow::unit(v.clone());
        let mut seen: HashSet<(ChartId, AffineElement)> = HashSet::new();
        seen.insert((v.chart.clone(), unit.map().clone()));
        let mut visited: HashSet<ChartId> = HashSet::from([v.chart.clone()]);
        let mut arrows = vec![unit.clone()];
        let mut frontier = vec![unit];
        let mut closed = false;
        for _ in 0..bound {
            let mut next = Vec::new();
            for a in &frontier {
                let t = a.trg();
                for (g, dst) in moves.steps(&t.chart, true) {
                    let image = g.apply(&t.coords)?;
                    if !self.in_domain(dst, &image)? {
                        continue;
                    }
                    let map = g.compose(a.map())?;
                    if seen.insert((dst.clone(), map.clone())) {
                        visited.insert(dst.clone());
                        let b = Arrow::new(v.clone(), map, dst.clone())?;
                        arrows.push(b.clone());
                        next.push(b);
                    }
                }
            }
            if next.is_empty() {
                closed = true;
                break;
            }
            frontier = next;
        }
        let exhaustive = closed && visited.iter().all(|c| moves.complete(c));
        Ok(ArrowSearch { arrows, exhaustive })
    }

    /// `G^v`: generated arrows with target `v`, word length ≤ `bound`.
    pub fn fiber_over(&self, v: &NebulaPoint, bound: u32) -> Result<Vec<Arrow>, AtlasError> {
        Ok(self.arrows_from(v, bound)?.arrows.iter().map(Arrow::invert).collect())
    }

    /// Generated arrows `v → w` of word length ≤ `bound`.
    pub fn arrows_between(&self, v: &NebulaPoint, w: &NebulaPoint, bound: u32) -> Result<Vec<Arrow>, AtlasError> {
        self.validate_point(w)?;
        Ok(self.arrows_from(v, bound)?.arrows.into_iter().filter(|a| &a.trg() == w).collect())
    }

    pub fn evaluate(&self, p: &NebulaPoint) -> Result<QuasifoldPoint, AtlasError> {
        self.validate_point(p)?;
        Ok(QuasifoldPoint(p.clone()))
    }

    /// Composite map of some transition path `from → to`, domains ignored.
    fn transition_path(&self, from: &ChartId, to: &ChartId, moves: &Moves) -> Option<AffineElement> {
        let mut best: HashMap<ChartId, AffineElement> = HashMap::new();
        best.insert(from.clone(), AffineElement::identity(self.atlas.dim()));
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(c) = queue.pop_front() {
            if &c == to {
                return best.remove(&c);
            }
            let here = best[&c].clone();
            for (m, d) in moves.steps(&c, false) {
                if !best.contains_key(d) {
                    best.insert(d.clone(), m.compose(&here).expect("atlas dimensions agree"));
                    queue.push_back(d.clone());
                }
            }
        }
        None
    }

    /// Three-valued `ev(a) = ev(b)`.
    ///
    /// `NotEqual` is certified when the arrow search out of `a` is exhaustive,
    /// when no chain of transitions joins the two charts, or when every domain
    /// is the whole space and the exact orbit test in `b`'s chart fails after
    /// transporting `a` along a transition path.
    pub fn compare(&self, a: &QuasifoldPoint, b: &QuasifoldPoint, bound: u32) -> Result<PointEquality, AtlasError> {
        let (v, w) = (&a.0, &b.0);
        if v == w {
            return Ok(PointEquality::Equal(Arrow::unit(v.clone())));
        }
        let group_w = &self.atlas.chart(&w.chart)?.group;
        if v.chart == w.chart {
            if let OrbitSearch::Found(g) = group_w.orbit_search(&v.coords, &w.coords, bound)? {
                return Ok(PointEquality::Equal(Arrow::new(v.clone(), g, w.chart.clone())?));
            }
        }
        let moves = self.moves(0)?;
        let Some(path) = self.transition_path(&v.chart, &w.chart, &moves) else {
            return Ok(PointEquality::NotEqual);
        };
        if self.atlas.charts().iter().all(|c| c.domain == Domain::Whole) {
            let image = path.apply(&v.coords)?;
            return Ok(match group_w.orbit_search(&image, &w.coords, bound)? {
                OrbitSearch::Found(g) => PointEquality::Equal(Arrow::new(v.clone(), g.compose(&path)?, w.chart.clone())?),
                OrbitSearch::Absent => PointEquality::NotEqual,
                OrbitSearch::Inconclusive => PointEquality::Inconclusive,
            });
        }
        let search = self.arrows_from(v, bound)?;
        if let Some(x) = search.arrows.iter().find(|x| &x.trg() == w) {
            return Ok(PointEquality::Equal(x.clone()));
        }
        Ok(if search.exhaustive { PointEquality::NotEqual } else { PointEquality::Inconclusive })
    }

    /// Whether both ends of `arrow` evaluate to the same quasifold point.
    pub fn is_ev_absorbed(&self, arrow: &Arrow, bound: u32) -> Result<PointEquality, AtlasError> {
        let (s, t) = (self.evaluate(arrow.src())?, self.evaluate(&arrow.trg())?);
        self.compare(&s, &t, bound)
    }

    pub fn isotropy_and_assembly(&self, x: &QuasifoldPoint, bound: u32) -> Result<AssemblyReport, AtlasError> {
        let v = &x.0;
        let search = self.arrows_from(v, bound)?;
        let entries: Vec<Arrow> = self
            .atlas
            .charts()
            .iter()
            .filter_map(|c| {
                if c.id == v.chart {
                    Some(Arrow::unit(v.clone()))
                } else {
                    search.arrows.iter().find(|a| a.dst_chart() == &c.id).cloned()
                }
            })
            .collect();
        let mut blocks = Vec::new();
        for e in &entries {
            let entry = e.trg();
            let chart = self.atlas.chart(&entry.chart)?;
            let elements = chart.group.enumerate_with(bound, self.options.limits)?;
            let mut objects = Vec::new();
            let mut seen = HashSet::new();
            for g in &elements {
                let p = NebulaPoint::new(chart.id.clone(), g.apply(&entry.coords)?);
                if self.in_domain(&chart.id, &p.coords)? && seen.insert(p.clone()) {
                    objects.push(p);
                }
            }
            let mut arrows = Vec::new();
            for o in &objects {
                for g in &elements {
                    if self.in_domain(&chart.id, &g.apply(&o.coords)?)? {
                        arrows.push(Arrow::new(o.clone(), g.clone(), chart.id.clone())?);
                    }
                }
            }
            blocks.push(ChartBlock { chart: chart.id.clone(), entry, objects, arrows });
        }
        let mut connections = Vec::new();
        for pair in entries.windows(2) {
            let arrow = pair[0].invert().compose(&pair[1])?;
            connections.push(Connection {
                from_chart: pair[0].dst_chart().clone(),
                to_chart: pair[1].dst_chart().clone(),
                arrow,
            });
        }
        let isotropy = search.arrows.into_iter().filter(|a| &a.trg() == v).collect();
        Ok(AssemblyReport { point: v.clone(), bound, blocks, connections, isotropy })
    }

    fn check_transitions(&self) -> Result<(), AtlasError> {
        if self.atlas.transitions().is_empty() {
            return Ok(());
        }
        let moves = self.moves(1)?;
        let inside = |c: &ChartId, x: &[QAlpha]| self.in_domain(c, x).unwrap_or(false);
        for chart in self.atlas.charts() {
            for r in chart.domain.samples(chart.dim()) {
                let start = NebulaPoint::new(chart.id.clone(), r);
                let mut layer = vec![start.clone()];
                for (g, c) in moves.steps(&chart.id, true) {
                    let img = g.apply(&start.coords)?;
                    if inside(c, &img) {
                        layer.push(NebulaPoint::new(c.clone(), img));
                    }
                }
                let mut images = layer.clone();
                for _ in 0..2 {
                    let mut next = Vec::new();
                    for p in &layer {
                        for (m, d) in moves.steps(&p.chart, false) {
                            let img = m.apply(&p.coords)?;
                            if inside(d, &img) {
                                next.push(NebulaPoint::new(d.clone(), img));
                            }
                        }
                    }
                    images.extend(next.iter().cloned());
                    layer = next;
                }
                for target in self.atlas.charts() {
                    let here: Vec<&NebulaPoint> = images.iter().filter(|p| p.chart == target.id).collect();
                    let Some(first) = here.first() else { continue };
                    for p in &here[1..] {
                        if target.group.orbit_search(&first.coords, &p.coords, self.options.check_bound)?
                            == OrbitSearch::Absent
                        {
                            return Err(AtlasError::InconsistentTransition(format!(
                                "{} and {} are images of {} in different orbits",
                                first.pretty(),
                                p.pretty(),
                                start.pretty()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
