//! Arrows of a structure groupoid as germs of affine maps.
//!
//! A germ of an ev-absorbed local diffeomorphism is locally the action of a
//! structure-group element or a chart change, both affine. Affine maps that
//! agree on an open set agree everywhere, so an arrow is stored as its source
//! point, the whole affine map, and the chart it lands in.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numbers::{AffineElement, NumberError, QAlpha};

/// Identifier of a chart (equivalently, of a member of the strict generating
/// family).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChartId(String);

impl ChartId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ChartId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// A point `(F, r)` of the nebula: chart plus exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NebulaPoint {
    pub chart: ChartId,
    pub coords: Vec<QAlpha>,
}

impl NebulaPoint {
    pub fn new(chart: impl Into<ChartId>, coords: Vec<QAlpha>) -> Self {
        Self { chart: chart.into(), coords }
    }

    /// One-dimensional point.
    pub fn on(chart: impl Into<ChartId>, x: QAlpha) -> Self {
        Self::new(chart, vec![x])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn pretty(&self) -> String {
        let coords: Vec<String> = self.coords.iter().map(QAlpha::pretty).collect();
        format!("{}:({})", self.chart, coords.join(", "))
    }
}

impl From<ChartId> for String {
    fn from(c: ChartId) -> Self {
        c.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("not-composable: target {target} differs from source {source_point}")]
    NotComposable { target: String, source_point: String },
    #[error(transparent)]
    Number(#[from] NumberError),
}

/// Germ `germ(φ)_r` of an affine map φ at a nebula point, landing in `dst_chart`.
///
/// Two arrows are equal iff source point, map, and target chart are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    src: NebulaPoint,
    map: AffineElement,
    dst_chart: ChartId,
}

impl Arrow {
    pub fn new(src: NebulaPoint, map: AffineElement, dst_chart: ChartId) -> Result<Self, GroupoidError> {
        if map.dim() != src.dim() {
            return Err(NumberError::DimensionMismatch { expected: map.dim(), found: src.dim() }.into());
        }
        Ok(Self { src, map, dst_chart })
    }

    /// The identity germ at `point`.
    pub fn unit(point: NebulaPoint) -> Self {
        let map = AffineElement::identity(point.dim());
        let dst_chart = point.chart.clone();
        Self { src: point, map, dst_chart }
    }

    pub fn src(&self) -> &NebulaPoint {
        &self.src
    }

    /// `(dst_chart, map(src))`.
    pub fn trg(&self) -> NebulaPoint {
        let coords = self.map.apply(&self.src.coords).expect("dimensions checked at construction");
        NebulaPoint { chart: self.dst_chart.clone(), coords }
    }

    pub fn map(&self) -> &AffineElement {
        &self.map
    }

    pub fn dst_chart(&self) -> &ChartId {
        &self.dst_chart
    }

    pub fn is_unit(&self) -> bool {
        self.map.is_identity() && self.dst_chart == self.src.chart
    }

    /// `self · next`: first `self`, then `next`. Requires `trg(self) = src(next)`.
    pub fn compose(&self, next: &Arrow) -> Result<Arrow, GroupoidError> {
        let t = self.trg();
        if t != next.src {
            return Err(GroupoidError::NotComposable { target: t.pretty(), source_point: next.src.pretty() });
        }
        Ok(Arrow { src: self.src.clone(), map: next.map.compose(&self.map)?, dst_chart: next.dst_chart.clone() })
    }

    /// Swaps source and target and inverts the map.
    pub fn invert(&self) -> Arrow {
        Arrow { src: self.trg(), map: self.map.inverse(), dst_chart: self.src.chart.clone() }
    }

    pub fn pretty(&self) -> String {
        format!("({}, {}) → {}", self.src.pretty(), self.map.pretty(), self.dst_chart)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{rational, GroupPresentation};
    use proptest::prelude::*;

    fn q(s: &str) -> QAlpha {
        s.parse().unwrap()
    }

    fn arrow(x: &str, shift: &str) -> Arrow {
        Arrow::new(NebulaPoint::on("c", q(x)), AffineElement::translate1(q(shift)), "c".into()).unwrap()
    }

    #[test]
    fn source_and_target() {
        let a = arrow("0", "1+α");
        assert_eq!(a.src().coords, vec![q("0")]);
        assert_eq!(a.trg().coords, vec![q("1+α")]);
        let u = Arrow::unit(NebulaPoint::on("c", q("3/7")));
        assert_eq!(u.trg(), *u.src());
    }

    #[test]
    fn translation_composition() {
        let a = arrow("0", "1+α");
        let b = arrow("1+α", "2+3α");
        assert_eq!(a.compose(&b).unwrap(), arrow("0", "3+4α"));
        let u = Arrow::unit(a.trg());
        assert_eq!(a.compose(&u).unwrap(), a);
    }

    #[test]
    fn mismatched_composition() {
        let err = arrow("0", "1").compose(&arrow("5", "1")).unwrap_err();
        assert!(matches!(err, GroupoidError::NotComposable { .. }));
        assert!(err.to_string().starts_with("not-composable"));
    }

    #[test]
    fn inversion() {
        let a = arrow("1/2", "2-α");
        assert_eq!(a.invert(), arrow("5/2-α", "-2+α"));
        assert!(a.compose(&a.invert()).unwrap().is_unit());
        assert_eq!(a.invert().invert(), a);
        let u = Arrow::unit(NebulaPoint::on("c", q("α")));
        assert_eq!(u.invert(), u);
    }

    #[test]
    fn json_shape() {
        let a = arrow("0", "1");
        let v: serde_json::Value = serde_json::to_value(&a).unwrap();
        assert_eq!(v["src"]["chart"], "c");
        assert_eq!(v["dst_chart"], "c");
        assert!(v["map"]["A"].is_array());
        let back: Arrow = serde_json::from_value(v).unwrap();
        assert_eq!(back, a);
    }

    fn lattice_elements() -> Vec<AffineElement> {
        GroupPresentation::z_plus_alpha_z().enumerate(2).unwrap()
    }

    fn small_affine() -> impl Strategy<Value = AffineElement> {
        (prop_oneof![Just(1i64), Just(-1), Just(2), Just(-3)], -4i64..5, -3i64..4, 1i64..4).prop_map(
            |(a, p, m, d)| {
                AffineElement::affine1(rational(a, 1), QAlpha::new(rational(p, d), rational(m, 1))).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn associativity_on_chains(i in 0usize..25, j in 0usize..25, k in 0usize..25, x in -5i64..5) {
            let els = lattice_elements();
            let a = Arrow::new(NebulaPoint::on("c", QAlpha::from_int(x)), els[i].clone(), "c".into()).unwrap();
            let b = Arrow::new(a.trg(), els[j].clone(), "c".into()).unwrap();
            let c = Arrow::new(b.trg(), els[k].clone(), "c".into()).unwrap();
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn unit_and_inverse_laws(g in small_affine(), x in -5i64..5, m in -2i64..3) {
            let p = NebulaPoint::on("c", QAlpha::lattice(x, m));
            let a = Arrow::new(p.clone(), g, "d".into()).unwrap();
            prop_assert_eq!(Arrow::unit(p.clone()).compose(&a).unwrap(), a.clone());
            prop_assert_eq!(a.compose(&Arrow::unit(a.trg())).unwrap(), a.clone());
            prop_assert_eq!(a.compose(&a.invert()).unwrap(), Arrow::unit(p));
            prop_assert!(a.invert().compose(&a).unwrap().is_unit());
        }

        // Affine rigidity in dimension one: two maps agreeing at two distinct
        // points are the same map, hence the same germ.
        #[test]
        fn germ_identification(g in small_affine(), h in small_affine(), x in -5i64..5, y in -5i64..5) {
            prop_assume!(x != y);
            let (px, py) = (vec![QAlpha::from_int(x)], vec![QAlpha::lattice(y, 1)]);
            let agree = g.apply(&px).unwrap() == h.apply(&px).unwrap()
                && g.apply(&py).unwrap() == h.apply(&py).unwrap();
            prop_assert_eq!(agree, g == h);
        }
    }
}
