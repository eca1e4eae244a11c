//! The functor Φ from `G_α = ℝ ⋊ (ℤ + αℤ)` to the circle groupoid `S¹ ⋊ ℤ`,
//! with `S¹` modeled as ℝ/ℤ and `m ∈ ℤ` rotating by `mα`.
//!
//! `Φ(x) = x mod 1` on objects (the exponential `e^{2πix}` read in turns) and
//! `Φ(x, t_{n+αm}) = (x mod 1, m)` on arrows: the integer part `n` is
//! absorbed by the circle.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::MrwError;
use crate::groupoid::{Arrow, GroupoidError, NebulaPoint};
use crate::numbers::{rational, AffineElement, QAlpha};

/// Arrow `(z, m)` of `S¹ ⋊ ℤ`: source `z ∈ ℝ/ℤ`, target `z + mα`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CircleArrow {
    pub src: QAlpha,
    #[serde(serialize_with = "as_text")]
    pub m: BigInt,
}

fn as_text<S: serde::Serializer>(m: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(m)
}

impl CircleArrow {
    pub fn new(src: &QAlpha, m: BigInt) -> Self {
        Self { src: src.reduce_mod_one(), m }
    }

    pub fn unit(z: &QAlpha) -> Self {
        Self::new(z, BigInt::zero())
    }

    pub fn trg(&self) -> QAlpha {
        (&self.src + &QAlpha::new(rational(0, 1), self.m.clone().into())).reduce_mod_one()
    }

    pub fn compose(&self, next: &CircleArrow) -> Result<CircleArrow, MrwError> {
        let t = self.trg();
        if t != next.src {
            return Err(GroupoidError::NotComposable { target: t.pretty(), source_point: next.src.pretty() }.into());
        }
        Ok(CircleArrow { src: self.src.clone(), m: &self.m + &next.m })
    }

    pub fn invert(&self) -> CircleArrow {
        CircleArrow { src: self.trg(), m: -&self.m }
    }
}

pub fn phi_object(p: &NebulaPoint) -> QAlpha {
    p.coords[0].reduce_mod_one()
}

/// `Φ(x, t_{n+αm}) = (x mod 1, m)`; the map must be a lattice translation.
pub fn phi_arrow(a: &Arrow) -> Result<CircleArrow, MrwError> {
    let (_, m) = a
        .map()
        .translation_amount1()
        .and_then(QAlpha::lattice_coords)
        .ok_or_else(|| MrwError::IncompatibleSeed(format!("{} is not in ℤ + αℤ", a.map().pretty())))?;
    Ok(CircleArrow::new(&a.src().coords[0], m))
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorReport {
    pub pairs: usize,
    pub seed: u64,
    /// `Φ(a·b) = Φ(a)·Φ(b)`.
    pub composition_failures: usize,
    /// `Φ(src a) = src Φ(a)`, `Φ(trg a) = trg Φ(a)`.
    pub endpoint_failures: usize,
    /// `Φ(unit) = unit`, `Φ(a⁻¹) = Φ(a)⁻¹`.
    pub unit_inverse_failures: usize,
    pub counterexample: Option<String>,
}

impl FunctorReport {
    pub fn passed(&self) -> bool {
        self.composition_failures == 0 && self.endpoint_failures == 0 && self.unit_inverse_failures == 0
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> QAlpha {
    let d = rng.gen_range(1..=12);
    QAlpha::new(rational(rng.gen_range(-40..=40), d), rational(rng.gen_range(-6..=6), rng.gen_range(1..=5)))
}

fn random_shift(rng: &mut ChaCha8Rng) -> AffineElement {
    AffineElement::translate1(QAlpha::lattice(rng.gen_range(-50..=50), rng.gen_range(-50..=50)))
}

/// Checks functoriality of Φ on `pairs` random composable pairs of `G_α`.
pub fn functor_check(pairs: usize, seed: u64) -> Result<FunctorReport, MrwError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FunctorReport {
        pairs,
        seed,
        composition_failures: 0,
        endpoint_failures: 0,
        unit_inverse_failures: 0,
        counterexample: None,
    };
    for _ in 0..pairs {
        let x = NebulaPoint::on("class", random_point(&mut rng));
        let a = Arrow::new(x, random_shift(&mut rng), "class".into())?;
        let b = Arrow::new(a.trg(), random_shift(&mut rng), "class".into())?;
        let (pa, pb) = (phi_arrow(&a)?, phi_arrow(&b)?);
        let composed = phi_arrow(&a.compose(&b)?)?;
        let note = |r: &mut FunctorReport| {
            if r.counterexample.is_none() {
                r.counterexample = Some(format!("{} · {}", a.pretty(), b.pretty()));
            }
        };
        if pa.compose(&pb).ok().as_ref() != Some(&composed) {
            report.composition_failures += 1;
            note(&mut report);
        }
        if phi_object(a.src()) != pa.src || phi_object(&a.trg()) != pa.trg() {
            report.endpoint_failures += 1;
            note(&mut report);
        }
        if phi_arrow(&Arrow::unit(a.src().clone()))? != CircleArrow::unit(&pa.src)
            || phi_arrow(&a.invert())? != pa.invert()
        {
            report.unit_inverse_failures += 1;
            note(&mut report);
        }
    }
    Ok(report)
}
