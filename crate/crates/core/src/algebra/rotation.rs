use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{Algebra, AlgebraElement, AlgebraError, Coeff, Shape, TrigPoly};
use crate::numbers::{AffineElement, AlphaWitness, GroupPresentation, QAlpha};

/// One Fourier mode of the relation `V*U = λ·U*V` with `U = δ₀ ⊗ e_k`.
#[derive(Clone, Debug, Serialize)]
pub struct ModeCheck {
    pub mode: i64,
    /// Coefficient of `e_k` in `(U*V)_θ`.
    pub uv: Complex64,
    /// Coefficient of `e_k` in `(V*U)_θ`.
    pub vu: Complex64,
    pub lambda: Complex64,
    /// `e^{−2πikθ}`.
    pub expected: Complex64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationReport {
    /// Rotation amount θ of `V`, exact.
    pub theta: String,
    pub theta_value: f64,
    /// Support of `U*V` and of `V*U` (both `{θ}`).
    pub uv_support: Vec<String>,
    pub vu_support: Vec<String>,
    /// λ for the first mode.
    pub lambda: Complex64,
    /// `e^{−2πiθ}`, the phase under this crate's convolution convention.
    pub expected: Complex64,
    pub error: f64,
    /// λ recomputed with θ replaced by −θ; equals `e^{2πiθ}`, the phase
    /// written as `VU = e^{2πiθ} UV` in the other common convention.
    pub mirrored_lambda: Complex64,
    pub mirrored_error: f64,
    pub modes: Vec<ModeCheck>,
    /// For rational θ = a/q in lowest terms: `|λ^q − 1|`.
    pub root_of_unity_error: Option<f64>,
    pub max_error: f64,
}

fn circle_for(theta: &QAlpha, w: &AlphaWitness) -> Result<Algebra, AlgebraError> {
    let group = if theta.is_rational() {
        GroupPresentation::rationals(1)
    } else {
        GroupPresentation::translation_lattice(vec![vec![QAlpha::one()], vec![theta.clone()]])?
    };
    Algebra::new(Shape::Circle, group, w.clone())
}

struct Products {
    uv: AlgebraElement,
    vu: AlgebraElement,
    modes: Vec<ModeCheck>,
}

fn products(theta: &QAlpha, degree: u32, w: &AlphaWitness) -> Result<Products, AlgebraError> {
    let alg = circle_for(theta, w)?;
    let one = Complex64::new(1.0, 0.0);
    let v = alg.element([(AffineElement::translate1(theta.clone()), Coeff::Trig(TrigPoly::constant(one)))])?;
    let key = AffineElement::translate1(theta.reduce_mod_one());
    let t = super::turns(theta, w);
    let mut modes = Vec::new();
    let mut first = None;
    for k in 1..=i64::from(degree.max(1)) {
        let u = alg.element([(AffineElement::identity(1), Coeff::Trig(TrigPoly::monomial(k, one)))])?;
        let uv = alg.convolve_general(&u, &v)?;
        let vu = alg.convolve_general(&v, &u)?;
        let coeff = |e: &AlgebraElement| {
            e.get(&key).and_then(Coeff::as_trig).and_then(|p| p.coeffs().get(&k).copied()).unwrap_or_default()
        };
        let (a, b) = (coeff(&uv), coeff(&vu));
        let lambda = b / a;
        let expected = Complex64::cis(-TAU * k as f64 * t);
        modes.push(ModeCheck { mode: k, uv: a, vu: b, lambda, expected, error: (lambda - expected).norm() });
        if first.is_none() {
            first = Some((uv, vu));
        }
    }
    let (uv, vu) = first.expect("at least one mode");
    Ok(Products { uv, vu, modes })
}

fn support(e: &AlgebraElement) -> Vec<String> {
    e.keys().iter().map(|k| k.translation_amount1().map_or_else(|| k.pretty(), QAlpha::pretty)).collect()
}

/// Builds `U = δ₀ ⊗ e_k` (k = 1..=degree) and `V = δ_θ ⊗ 1` in the rotation
/// algebra of ℝ/ℤ by `ℤ + θℤ`, multiplies both ways with the general
/// convolution, and reads off λ with `V*U = λ·U*V`.
pub fn rotation_relation(theta: &QAlpha, degree: u32, w: &AlphaWitness) -> Result<RotationReport, AlgebraError> {
    if theta.is_zero() {
        return Err(AlgebraError::UnsupportedGroupoidShape("rotation by 0 is the identity".into()));
    }
    let main = products(theta, degree, w)?;
    let mirrored = products(&(-theta), 1, w)?;
    let m0 = &main.modes[0];
    let mirrored_lambda = mirrored.modes[0].lambda;
    let mirrored_error = (mirrored_lambda - Complex64::cis(TAU * w.eval(theta))).norm();
    let root_of_unity_error = theta.is_rational().then(|| {
        let q = theta.rational_part().denom();
        let q: i32 = num_traits::ToPrimitive::to_i32(q).unwrap_or(i32::MAX);
        (m0.lambda.powi(q) - Complex64::new(1.0, 0.0)).norm()
    });
    let max_error = main
        .modes
        .iter()
        .map(|m| m.error)
        .chain([mirrored_error])
        .fold(0.0, f64::max);
    Ok(RotationReport {
        theta: theta.pretty(),
        theta_value: w.eval(theta),
        uv_support: support(&main.uv),
        vu_support: support(&main.vu),
        lambda: m0.lambda,
        expected: m0.expected,
        error: m0.error,
        mirrored_lambda,
        mirrored_error,
        root_of_unity_error,
        max_error,
        modes: main.modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_phase() {
        let w = AlphaWitness::golden();
        let r = rotation_relation(&QAlpha::alpha(), 4, &w).unwrap();
        assert_eq!(r.uv_support, vec!["α".to_string()]);
        assert_eq!(r.vu_support, r.uv_support);
        assert!(r.error < 1e-12);
        assert!(r.max_error < 1e-12);
        let expected = Complex64::cis(-TAU * w.alpha_f64());
        assert!((r.lambda - expected).norm() < 1e-12);
        assert!((r.mirrored_lambda - expected.conj()).norm() < 1e-12);
        // U*V carries the phase, V*U is plain e₁.
        assert!((r.modes[0].vu - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((r.modes[0].uv - expected.conj()).norm() < 1e-12);
    }

    #[test]
    fn rational_theta_gives_roots_of_unity() {
        let w = AlphaWitness::golden();
        for s in ["1/3", "2/5", "-3/7"] {
            let r = rotation_relation(&s.parse().unwrap(), 2, &w).unwrap();
            assert!(r.root_of_unity_error.unwrap() < 1e-12, "{s}");
            assert!(r.max_error < 1e-12);
        }
    }

    #[test]
    fn zero_rejected() {
        assert!(rotation_relation(&QAlpha::zero(), 1, &AlphaWitness::golden()).is_err());
    }
}
