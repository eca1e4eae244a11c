use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::numbers::{AlphaWitness, QAlpha};

/// Fractional part of `x` in `[0, 1)`, computed from the exact rational
/// approximation of α before rounding to `f64`.
pub fn turns(x: &QAlpha, w: &AlphaWitness) -> f64 {
    let v = x.rational_part() + x.alpha_part() * w.approx();
    (&v - v.floor()).to_f64().unwrap_or(f64::NAN)
}

/// Trigonometric polynomial `z ↦ Σ c_k e^{2πikz}` on ℝ/ℤ.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(k, c_k)` pairs; repeated modes add up, zeros are dropped.
    pub fn from_modes(modes: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in modes {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::pruned(coeffs)
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::from_modes([(k, c)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    fn pruned(mut coeffs: BTreeMap<i64, Complex64>) -> Self {
        coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|k|` with a nonzero coefficient.
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// Value at `z ∈ ℝ/ℤ`, `z` in turns.
    pub fn eval(&self, z: f64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c * Complex64::cis(TAU * (*k as f64) * z)).sum()
    }

    /// `z ↦ f(z + t)`, `t` in turns: `c_k ↦ c_k e^{2πikt}`.
    pub fn rotate(&self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        Self::pruned(self.coeffs.iter().map(|(k, c)| (*k, c * Complex64::cis(TAU * (*k as f64) * t))).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(*k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::pruned(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::pruned(self.coeffs.iter().map(|(k, c)| (*k, c * s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (j, a) in &self.coeffs {
            for (k, b) in &other.coeffs {
                *coeffs.entry(j + k).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
        Self::pruned(coeffs)
    }

    /// Pointwise complex conjugate: `c_k ↦ conj(c_{−k})`.
    pub fn conj(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.conj())).collect() }
    }

    /// `Σ |c_k − d_k|`, an upper bound for the sup distance.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.add(&other.scale(Complex64::new(-1.0, 0.0))).sup_norm()
    }

    /// `Σ |c_k|`, an upper bound for the sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rotation_matches_evaluation() {
        let f = TrigPoly::from_modes([(1, c(1.0, 0.5)), (-2, c(0.0, 2.0)), (0, c(3.0, 0.0))]);
        let g = f.rotate(0.3);
        for z in [0.0, 0.17, 0.5, 0.93] {
            assert!((g.eval(z) - f.eval(z + 0.3)).norm() < 1e-12);
        }
        assert_eq!(f.rotate(0.0), f);
    }

    #[test]
    fn product_and_conjugate() {
        let f = TrigPoly::from_modes([(1, c(1.0, 0.5)), (-1, c(0.2, 0.0))]);
        let g = TrigPoly::from_modes([(2, c(0.0, 1.0)), (0, c(1.0, -1.0))]);
        let z = 0.41;
        assert!((f.mul(&g).eval(z) - f.eval(z) * g.eval(z)).norm() < 1e-12);
        assert!((f.conj().eval(z) - f.eval(z).conj()).norm() < 1e-12);
        assert_eq!(f.conj().conj(), f);
    }

    #[test]
    fn pruning() {
        let f = TrigPoly::monomial(3, c(1.0, 0.0));
        assert!(f.add(&f.scale(c(-1.0, 0.0))).is_zero());
        assert_eq!(TrigPoly::from_modes([(1, c(0.0, 0.0))]), TrigPoly::zero());
    }

    #[test]
    fn turns_are_fractional_parts() {
        let w = AlphaWitness::golden();
        assert_eq!(turns(&"7/4".parse().unwrap(), &w), 0.75);
        let t = turns(&"-α".parse().unwrap(), &w);
        assert!((t - (1.0 - w.alpha_f64())).abs() < 1e-15);
    }
}
