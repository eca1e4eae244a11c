use nalgebra::DMatrix;
use num_complex::Complex64;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::corpus::random_up_element;
use super::{Algebra, AlgebraElement, AlgebraError, Shape};
use crate::numbers::{rational, AffineElement, QAlpha};

pub type ComplexMatrix = DMatrix<Complex64>;

/// How `M` intertwines convolution with matrix multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicationOrder {
    /// `M(f*g) = M(f)·M(g)`.
    Direct,
    /// `M(f*g) = M(g)·M(f)`.
    Reversed,
}

/// Order found by [`determine_order`] with rows indexed by σ and columns by
/// τ. Regression constant: the `locked_order_matches_oracle` test recomputes it.
pub const LOCKED_ORDER: MultiplicationOrder = MultiplicationOrder::Reversed;

/// `f ★ g`, the product with `M(f ★ g) = M(f)·M(g)` under [`LOCKED_ORDER`].
pub fn star(alg: &Algebra, f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    match LOCKED_ORDER {
        MultiplicationOrder::Direct => alg.convolve_general(f, g),
        MultiplicationOrder::Reversed => alg.convolve_general(g, f),
    }
}

/// Index `k` with key `= k/p (mod 1)`, or `support-escapes-U_p`.
fn up_index(key: &AffineElement, p: u32) -> Result<usize, AlgebraError> {
    let escape = || AlgebraError::SupportEscapes { key: key.pretty(), p };
    let t = key.translation_amount1().filter(|t| t.is_rational()).ok_or_else(escape)?;
    let k = t.rational_part() * rational(i64::from(p), 1);
    if !k.is_integer() {
        return Err(escape());
    }
    k.to_integer().mod_floor(&BigInt::from(p)).to_usize().ok_or_else(escape)
}

/// `M(z)[σ][τ] = f_{τ−σ}(z + σ)` for σ, τ in `U_p = {0, 1/p, …, (p−1)/p}`,
/// with `z` in turns. `f` must live in a circle algebra with support in `U_p`.
pub fn matrix_representation(
    alg: &Algebra,
    f: &AlgebraElement,
    p: u32,
    z: f64,
) -> Result<ComplexMatrix, AlgebraError> {
    if alg.shape() != Shape::Circle {
        return Err(AlgebraError::UnsupportedGroupoidShape("matrix representation needs a circle algebra".into()));
    }
    if p == 0 {
        return Err(AlgebraError::Malformed("p must be positive".into()));
    }
    let n = p as usize;
    let mut coeffs = vec![None; n];
    for (key, c) in f.support() {
        let k = up_index(key, p)?;
        coeffs[k] = Some(c);
    }
    let w = alg.witness();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let k = (j + n - i) % n;
        coeffs[k].map_or(Complex64::zero(), |c| c.eval(z + i as f64 / p as f64, w))
    }))
}

fn max_entry(m: &ComplexMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderEvidence {
    pub p: u32,
    pub pairs: usize,
    pub samples: usize,
    /// Worst `‖M(f*g) − M(f)M(g)‖∞`.
    pub direct_error: f64,
    /// Worst `‖M(f*g) − M(g)M(f)‖∞`.
    pub reversed_error: f64,
    /// Order with the small error; `None` when both or neither hold.
    pub order: Option<MultiplicationOrder>,
}

/// Decides the multiplication order from `pairs` random `U_p`-supported
/// pairs, each checked at `samples` random points.
pub fn determine_order(p: u32, pairs: usize, samples: usize, seed: u64, tol: f64) -> Result<OrderEvidence, AlgebraError> {
    let alg = Algebra::rational_circle();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut direct, mut reversed) = (0.0f64, 0.0f64);
    for _ in 0..pairs {
        let f = random_up_element(&alg, p, &mut rng)?;
        let g = random_up_element(&alg, p, &mut rng)?;
        let fg = alg.convolve_general(&f, &g)?;
        for _ in 0..samples {
            let z: f64 = rng.gen_range(0.0..1.0);
            let m = matrix_representation(&alg, &fg, p, z)?;
            let (mf, mg) = (matrix_representation(&alg, &f, p, z)?, matrix_representation(&alg, &g, p, z)?);
            direct = direct.max(max_entry(&(&m - &mf * &mg)));
            reversed = reversed.max(max_entry(&(&m - &mg * &mf)));
        }
    }
    let order = match (direct < tol, reversed < tol) {
        (true, false) => Some(MultiplicationOrder::Direct),
        (false, true) => Some(MultiplicationOrder::Reversed),
        _ => None,
    };
    Ok(OrderEvidence { p, pairs, samples, direct_error: direct, reversed_error: reversed, order })
}

/// `f` at key `k/p` as a translation.
pub fn up_key(k: i64, p: u32) -> AffineElement {
    AffineElement::translate1(QAlpha::from_rational(rational(k, i64::from(p))).reduce_mod_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Coeff, TrigPoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn locked_order_matches_oracle() {
        for p in [2, 3, 4] {
            let ev = determine_order(p, 10, 5, 11, 1e-9).unwrap();
            assert_eq!(ev.order, Some(LOCKED_ORDER), "{ev:?}");
        }
    }

    #[test]
    fn two_by_two_layout() {
        let alg = Algebra::rational_circle();
        let a = TrigPoly::from_modes([(1, c(1.0, 0.0)), (0, c(0.5, 0.0))]);
        let b = TrigPoly::from_modes([(2, c(0.0, 1.0))]);
        let f = alg.element([(up_key(0, 2), Coeff::Trig(a.clone())), (up_key(1, 2), Coeff::Trig(b.clone()))]).unwrap();
        let z = 0.13;
        let m = matrix_representation(&alg, &f, 2, z).unwrap();
        assert!((m[(0, 0)] - a.eval(z)).norm() < 1e-15);
        assert!((m[(0, 1)] - b.eval(z)).norm() < 1e-15);
        assert!((m[(1, 0)] - b.eval(z + 0.5)).norm() < 1e-15);
        assert!((m[(1, 1)] - a.eval(z + 0.5)).norm() < 1e-15);
    }

    #[test]
    fn escapes_rejected() {
        let alg = Algebra::rational_circle();
        let f = alg.single("1/3", Coeff::Trig(TrigPoly::constant(c(1.0, 0.0)))).unwrap();
        let err = matrix_representation(&alg, &f, 4, 0.0).unwrap_err();
        assert!(err.to_string().starts_with("support-escapes-U_p"));
        assert!(matrix_representation(&alg, &f, 6, 0.0).is_ok());
    }

    #[test]
    fn p_one_is_pointwise_product() {
        let alg = Algebra::rational_circle();
        let a = TrigPoly::from_modes([(1, c(1.0, 2.0)), (-3, c(0.5, 0.0))]);
        let b = TrigPoly::from_modes([(2, c(0.0, 1.0)), (0, c(-1.0, 0.25))]);
        let f = alg.single("0", Coeff::Trig(a.clone())).unwrap();
        let g = alg.single("0", Coeff::Trig(b.clone())).unwrap();
        let fg = star(&alg, &f, &g).unwrap();
        assert_eq!(fg.at(&QAlpha::zero()).unwrap(), &Coeff::Trig(b.mul(&a)));
    }
}
