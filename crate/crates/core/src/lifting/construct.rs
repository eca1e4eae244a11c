use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::LiftError;
use crate::atlas::{Atlas, PointEquality, Transition};
use crate::groupoid::NebulaPoint;
use crate::mrw::{BiAtlas, LinkingGerm};
use crate::numbers::{rational, AffineElement, OrbitSearch, QAlpha};

/// A lift `f̃ = γ' ∘ f̃₀` with `f̃(r) = r'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lift {
    pub src: NebulaPoint,
    pub dst: NebulaPoint,
    /// The seed lift `f̃₀`.
    pub seed: AffineElement,
    /// `γ'`, moving `f̃₀(r)` to `r'` inside `A'`.
    pub adjustment: AffineElement,
    pub lift: AffineElement,
}

impl Lift {
    /// The germ of the lift at `x`, a point of the source chart.
    pub fn germ_at(&self, x: &[QAlpha]) -> Result<LinkingGerm, LiftError> {
        Ok(LinkingGerm::new(NebulaPoint::new(self.src.chart.clone(), x.to_vec()), self.lift.clone(), self.dst.chart.clone())?)
    }
}

/// The identity of the quasifold of `atlas`, seeded by the identity on each chart.
pub fn identity_biatlas(atlas: &Atlas) -> Result<BiAtlas, LiftError> {
    let links =
        atlas.charts().iter().map(|c| Transition::new(c.id.as_str(), c.id.as_str(), AffineElement::identity(c.dim()))).collect();
    Ok(BiAtlas::new(atlas.clone(), atlas.clone(), links)?)
}

/// A lift of the map described by the seeds of `bi`, sending `r` to `r'`.
///
/// `ev_A(r) = ev_{A'}(r')` is checked first; a certified difference is
/// `fibers-incompatible`. Then each seed `f̃₀` defined at `r` is tried in
/// declaration order: `γ'` comes from the orbit search of the target chart
/// group, or from the arrows of `G'` when `f̃₀(r)` lands in another chart.
pub fn lift_diffeo(bi: &BiAtlas, r: &NebulaPoint, r_prime: &NebulaPoint, bound: u32) -> Result<Lift, LiftError> {
    bi.left().validate_point(r).map_err(crate::mrw::MrwError::from)?;
    bi.right().validate_point(r_prime).map_err(crate::mrw::MrwError::from)?;
    if bi.same_point(r, r_prime, bound)? == PointEquality::NotEqual {
        return Err(LiftError::FibersIncompatible(format!("{} and {} lie over different points", r.pretty(), r_prime.pretty())));
    }
    for l in bi.links().iter().filter(|l| l.src_chart == r.chart) {
        let Some(z) = bi.seed_at(l, &r.coords)? else { continue };
        let y = z.class();
        let adjustment = if y.chart == r_prime.chart {
            let group = &bi.right().atlas().chart(&y.chart).map_err(crate::mrw::MrwError::from)?.group;
            match group.orbit_search(&y.coords, &r_prime.coords, bound)? {
                OrbitSearch::Found(g) => Some(g),
                _ => None,
            }
        } else {
            None
        };
        let adjustment = match adjustment {
            Some(g) => Some(g),
            None => bi
                .right()
                .arrows_between(&y, r_prime, bound)
                .map_err(crate::mrw::MrwError::from)?
                .first()
                .map(|a| a.map().clone()),
        };
        if let Some(g) = adjustment {
            let lift = g.compose(z.map())?;
            debug_assert_eq!(lift.apply(&r.coords)?, r_prime.coords);
            return Ok(Lift { src: r.clone(), dst: r_prime.clone(), seed: z.map().clone(), adjustment: g, lift });
        }
    }
    Err(LiftError::InconclusiveAtBound(format!("no lift {} ↦ {} found at bound {bound}", r.pretty(), r_prime.pretty())))
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityCheck {
    pub points: usize,
    /// Points where the germ leaves a chart domain.
    pub skipped: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl CompatibilityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.skipped < self.points
    }
}

/// `ev_A(x) = ev_{A'}(f̃(x))` at each `x` where both sides are in the chart domains.
pub fn lift_is_compatible(bi: &BiAtlas, lift: &Lift, points: &[Vec<QAlpha>], bound: u32) -> Result<CompatibilityCheck, LiftError> {
    let mut out = CompatibilityCheck { points: points.len(), skipped: 0, failures: 0, counterexample: None };
    for x in points {
        let z = lift.germ_at(x)?;
        if bi.left().validate_point(z.src()).is_err() || bi.right().validate_point(&z.class()).is_err() {
            out.skipped += 1;
            continue;
        }
        if !bi.is_compatible(&z, bound)?.is_equal() {
            out.failures += 1;
            out.counterexample.get_or_insert_with(|| z.pretty());
        }
    }
    Ok(out)
}

/// Random exact point of ℚ + ℚα.
pub fn random_point(rng: &mut impl Rng, dim: usize) -> Vec<QAlpha> {
    (0..dim)
        .map(|_| {
            QAlpha::new(
                rational(rng.gen_range(-60..=60), rng.gen_range(1..=12)),
                rational(rng.gen_range(-8..=8), rng.gen_range(1..=6)),
            )
        })
        .collect()
}

/// `count` pairs `(r, r')` over the same point: `r` random, `r' = γ'·f̃₀(r)`
/// for a seed `f̃₀` and a random `γ'` of size ≤ 3 in the target chart group.
pub fn fiber_pairs(bi: &BiAtlas, count: usize, seed: u64) -> Result<Vec<(NebulaPoint, NebulaPoint)>, LiftError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 100 * count + 100 {
            return Err(LiftError::InvalidMap("could not place random points inside the chart domains".into()));
        }
        let l = bi.links().choose(&mut rng).expect("a bi-atlas has seeds");
        let dim = l.map.dim();
        let Some(z) = bi.seed_at(l, &random_point(&mut rng, dim))? else { continue };
        let group = &bi.right().atlas().chart(&l.dst_chart).map_err(crate::mrw::MrwError::from)?.group;
        let gamma = group.enumerate(3)?.choose(&mut rng).cloned().expect("groups contain the identity");
        let target = NebulaPoint::new(l.dst_chart.clone(), gamma.apply(&z.class().coords)?);
        if bi.right().validate_point(&target).is_ok() {
            out.push((z.src().clone(), target));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{reflection_orbifold, t_alpha};
    use crate::mrw::two_scale;

    fn pt(x: &str) -> NebulaPoint {
        NebulaPoint::on("class", x.parse().unwrap())
    }

    #[test]
    fn identity_of_t_alpha() {
        let bi = identity_biatlas(&t_alpha()).unwrap();
        let l = lift_diffeo(&bi, &pt("0"), &pt("1+α"), 4).unwrap();
        assert_eq!(l.lift, AffineElement::translate1("1+α".parse().unwrap()));
    }

    #[test]
    fn two_scale_half_shift() {
        let bi = two_scale();
        let l = lift_diffeo(&bi, &pt("0"), &pt("1/2"), 4).unwrap();
        assert_eq!(l.adjustment, AffineElement::translate1("1/2".parse().unwrap()));
        assert_eq!(l.lift, AffineElement::affine1(rational(1, 2), "1/2".parse().unwrap()).unwrap());
    }

    #[test]
    fn wrong_fiber_is_certified() {
        let bi = two_scale();
        let err = lift_diffeo(&bi, &pt("0"), &pt("1/3"), 4).unwrap_err();
        assert!(err.to_string().starts_with("fibers-incompatible"), "{err}");
        let id = identity_biatlas(&t_alpha()).unwrap();
        assert!(matches!(lift_diffeo(&id, &pt("0"), &pt("α/2"), 4), Err(LiftError::FibersIncompatible(_))));
    }

    #[test]
    fn far_target_is_inconclusive() {
        let bi = identity_biatlas(&t_alpha()).unwrap();
        assert!(matches!(lift_diffeo(&bi, &pt("0"), &pt("40+α"), 4), Err(LiftError::InconclusiveAtBound(_))));
        assert!(lift_diffeo(&bi, &pt("0"), &pt("40+α"), 40).is_ok());
    }

    #[test]
    fn orbifold_lift_across_charts() {
        let bi = identity_biatlas(&reflection_orbifold()).unwrap();
        let r = NebulaPoint::on("cone", "-3/2".parse().unwrap());
        let r2 = NebulaPoint::on("arm", "3/2".parse().unwrap());
        let l = lift_diffeo(&bi, &r, &r2, 3).unwrap();
        assert_eq!(l.lift.apply(&r.coords).unwrap(), r2.coords);
    }

    #[test]
    fn random_lifts_are_compatible() {
        for bi in [two_scale(), identity_biatlas(&t_alpha()).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for (r, r2) in fiber_pairs(&bi, 10, 8).unwrap() {
                let l = lift_diffeo(&bi, &r, &r2, 6).unwrap();
                assert_eq!(l.lift.apply(&r.coords).unwrap(), r2.coords);
                let pts: Vec<_> = (0..20).map(|_| random_point(&mut rng, 1)).collect();
                let c = lift_is_compatible(&bi, &l, &pts, 4).unwrap();
                assert!(c.passed(), "{c:?}");
            }
        }
    }
}
