//! Exact checks of the bimodule axioms on bounded words.

use std::collections::HashSet;

use serde::Serialize;

use super::{left_act, right_act, BiAtlas, LinkingGerm, MrwError, Probe, QuotientWitness};
use crate::atlas::{PointEquality, StructureGroupoid};
use crate::groupoid::{Arrow, NebulaPoint};

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub instances: usize,
    pub passed: bool,
    /// First failing instance, if any.
    pub counterexample: Option<String>,
}

impl AxiomCheck {
    fn new(name: &str) -> Self {
        Self { name: name.into(), instances: 0, passed: true, counterexample: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(detail());
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MrwReport {
    pub word_length: u32,
    pub elements: usize,
    pub checks: Vec<AxiomCheck>,
}

impl MrwReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Arrows out of `v` that are words of at most `len` one-step arrows.
pub(crate) fn words_from(g: &StructureGroupoid, v: &NebulaPoint, len: u32) -> Result<Vec<Arrow>, MrwError> {
    let mut all = vec![Arrow::unit(v.clone())];
    let mut seen: HashSet<Arrow> = all.iter().cloned().collect();
    let mut frontier = all.clone();
    for _ in 0..len {
        let mut next = Vec::new();
        for a in &frontier {
            for step in g.arrows_from(&a.trg(), 1)?.arrows.into_iter().filter(|s| !s.is_unit()) {
                let b = a.compose(&step)?;
                if seen.insert(b.clone()) {
                    next.push(b);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(all)
}

fn words_into(g: &StructureGroupoid, v: &NebulaPoint, len: u32) -> Result<Vec<Arrow>, MrwError> {
    Ok(words_from(g, v, len)?.iter().map(Arrow::invert).collect())
}

fn absorbed(g: &StructureGroupoid, a: &Arrow, bound: u32) -> Result<bool, MrwError> {
    Ok(matches!(g.is_ev_absorbed(a, bound)?, PointEquality::Equal(_)))
}

/// Seeds at the sample points of their source charts.
fn seeds(bi: &BiAtlas) -> Result<Vec<LinkingGerm>, MrwError> {
    let mut base = Vec::new();
    for l in bi.links() {
        let chart = bi.left().atlas().chart(&l.src_chart)?;
        for r in chart.domain.samples(chart.dim()) {
            if let Some(z) = bi.seed_at(l, &r)? {
                base.push(z);
            }
        }
    }
    Ok(base)
}

/// Seeds moved by one step on either side.
fn elements(base: &[LinkingGerm], bi: &BiAtlas) -> Result<Vec<LinkingGerm>, MrwError> {
    let mut out = base.to_vec();
    let mut seen: HashSet<LinkingGerm> = out.iter().cloned().collect();
    for z in base {
        for g in words_into(bi.left(), z.src(), 1)? {
            let gz = left_act(&g, z)?;
            if seen.insert(gz.clone()) {
                out.push(gz);
            }
        }
        for g in words_from(bi.right(), &z.class(), 1)? {
            let zg = right_act(z, &g)?;
            if seen.insert(zg.clone()) {
                out.push(zg);
            }
        }
    }
    Ok(out)
}

/// Units, associativity, commuting actions, freeness, both class-map
/// bijections, ev-compatibility, and the inverse bimodule. The action axioms
/// run over all words of length ≤ `word_length` acting on the seeds at the
/// chart sample points; the class-map checks run over those seeds moved by
/// one step on either side.
pub fn check_axioms(bi: &BiAtlas, word_length: u32, bound: u32) -> Result<MrwReport, MrwError> {
    let base = seeds(bi)?;
    let zs = elements(&base, bi)?;
    let mut left_unit = AxiomCheck::new("left action: unit");
    let mut left_assoc = AxiomCheck::new("left action: (g1 g2) z = g1 (g2 z)");
    let mut right_unit = AxiomCheck::new("right action: unit");
    let mut right_assoc = AxiomCheck::new("right action: z (g1 g2) = (z g1) g2");
    let mut commute = AxiomCheck::new("actions commute: (g z) g' = g (z g')");
    let mut left_free = AxiomCheck::new("left action free");
    let mut right_free = AxiomCheck::new("right action free");
    let mut class_inv = AxiomCheck::new("class(g z) = class(z), class(z g') = trg(g')");
    let mut left_inj = AxiomCheck::new("Z/G -> Obj(G') injective");
    let mut left_surj = AxiomCheck::new("Z/G -> Obj(G') surjective");
    let mut right_inj = AxiomCheck::new("Z/G' -> Obj(G) injective");
    let mut right_surj = AxiomCheck::new("Z/G' -> Obj(G) surjective");
    let mut compatible = AxiomCheck::new("ev(src z) = ev'(class z)");
    let mut inverse = AxiomCheck::new("inverse bimodule: (g z)^-1 = z^-1 g^-1");
    let inv = bi.inverse()?;

    let split = word_length / 2;
    for z in &base {
        let src = z.src().clone();
        let cls = z.class();

        let into = words_into(bi.left(), &src, word_length)?;
        let out = words_from(bi.right(), &cls, word_length)?;
        for g2 in words_into(bi.left(), &src, word_length - split)? {
            for g1 in words_into(bi.left(), g2.src(), split)? {
                let a = left_act(&g1.compose(&g2)?, z)?;
                let b = left_act(&g1, &left_act(&g2, z)?)?;
                left_assoc.record(a == b, || format!("{} {} {}", g1.pretty(), g2.pretty(), z.pretty()));
            }
        }
        for g1 in words_from(bi.right(), &cls, word_length - split)? {
            for g2 in words_from(bi.right(), &g1.trg(), split)? {
                let a = right_act(z, &g1.compose(&g2)?)?;
                let b = right_act(&right_act(z, &g1)?, &g2)?;
                right_assoc.record(a == b, || format!("{} {} {}", z.pretty(), g1.pretty(), g2.pretty()));
            }
        }
        for g in &into {
            let gz = left_act(g, z)?;
            class_inv.record(gz.class() == cls, || gz.pretty());
            left_free.record(gz != *z || g.is_unit(), || g.pretty());
            for h in &out {
                let a = right_act(&gz, h)?;
                let b = left_act(g, &right_act(z, h)?)?;
                commute.record(a == b, || format!("{} {} {}", g.pretty(), z.pretty(), h.pretty()));
            }
            let lhs = gz.invert();
            let rhs = right_act(&z.invert(), &g.invert())?;
            inverse.record(lhs == rhs, || format!("{} {}", g.pretty(), z.pretty()));
        }
        for h in &out {
            let zh = right_act(z, h)?;
            class_inv.record(zh.class() == h.trg(), || zh.pretty());
            right_free.record(zh != *z || h.is_unit(), || h.pretty());
        }
    }
    for z in &zs {
        left_unit.record(left_act(&Arrow::unit(z.src().clone()), z)? == *z, || z.pretty());
        right_unit.record(right_act(z, &Arrow::unit(z.class()))? == *z, || z.pretty());
        compatible.record(matches!(bi.is_compatible(z, bound)?, PointEquality::Equal(_)), || z.pretty());
        inverse.record(matches!(inv.is_compatible(&z.invert(), bound)?, PointEquality::Equal(_)), || z.pretty());
    }

    for (i, z) in zs.iter().enumerate() {
        for z2 in &zs[i + 1..] {
            if z.class() == z2.class() {
                let ok = match bi.quotient_witness(z, z2)? {
                    QuotientWitness::Related(g) => left_act(&g, z)? == *z2 && absorbed(bi.left(), &g, bound)?,
                    QuotientWitness::ClassesDiffer => false,
                };
                left_inj.record(ok, || format!("{} ~ {}", z.pretty(), z2.pretty()));
            }
            if z.src() == z2.src() {
                let ok = match bi.right_quotient_witness(z, z2)? {
                    Some(h) => right_act(z, &h)? == *z2 && absorbed(bi.right(), &h, bound)?,
                    None => false,
                };
                right_inj.record(ok, || format!("{} ~ {}", z.pretty(), z2.pretty()));
            }
        }
    }

    let mut targets: Vec<NebulaPoint> = Vec::new();
    for c in bi.right().atlas().charts() {
        targets.extend(c.domain.samples(c.dim()).into_iter().map(|x| NebulaPoint::new(c.id.clone(), x)));
    }
    targets.extend(zs.iter().map(LinkingGerm::class));
    for p in &targets {
        let ok = matches!(bi.surjectivity_probe(p, bound)?, Probe::Found(z) if z.class() == *p);
        left_surj.record(ok, || p.pretty());
    }
    let mut sources: Vec<NebulaPoint> = Vec::new();
    for c in bi.left().atlas().charts() {
        sources.extend(c.domain.samples(c.dim()).into_iter().map(|x| NebulaPoint::new(c.id.clone(), x)));
    }
    sources.extend(zs.iter().map(|z| z.src().clone()));
    for r in &sources {
        let ok = matches!(bi.source_probe(r)?, Probe::Found(z) if z.src() == r);
        right_surj.record(ok, || r.pretty());
    }

    Ok(MrwReport {
        word_length,
        elements: zs.len(),
        checks: vec![
            left_unit,
            left_assoc,
            right_unit,
            right_assoc,
            commute,
            left_free,
            right_free,
            class_inv,
            left_inj,
            left_surj,
            right_inj,
            right_surj,
            compatible,
            inverse,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrw::{duplicated, two_scale};

    #[test]
    fn word_counts() {
        let bi = two_scale();
        let v = NebulaPoint::on("class", crate::numbers::QAlpha::zero());
        assert_eq!(words_from(bi.left(), &v, 1).unwrap().len(), 9);
        assert_eq!(words_from(bi.left(), &v, 2).unwrap().len(), 25);
    }

    #[test]
    fn both_biatlases_pass() {
        for bi in [two_scale(), duplicated()] {
            let r = check_axioms(&bi, 2, 4).unwrap();
            for c in &r.checks {
                assert!(c.passed && c.instances > 0, "{c:?}");
            }
        }
    }
}
