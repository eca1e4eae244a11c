//! The smooth map `f: ℂ → ℂ` that descends to `ℂ/Γ`, `Γ = {e^{2πiαk}}`, but
//! has no local equivariant lift:
//!
//! ```text
//! f(z) = 0                      r > 1 or r = 0
//!        e^{−1/r} ρ_n(r) r      1/(n+1) < r ≤ 1/n, n even
//!        e^{−1/r} ρ_n(r) z      1/(n+1) < r ≤ 1/n, n odd
//! ```
//!
//! with `ρ_n(r) = exp(−1/((r − 1/(n+1))(1/n − r)))` inside the annulus and 0
//! outside. `f(τz) = h(τ) f(z)` with `h = 1` on even annuli and `h = τ` on odd
//! ones.
//!
//! `e^{−1/r} ρ_n` underflows double precision from `n = 4` on, so values are
//! carried as `exp(log_scale) · direction` and the parity rule is checked on
//! that form, relative to the largest `|f|` on the annulus. Pointwise relative
//! errors are reported too; near the rims they blow up, because rounding in
//! `|τz|` is amplified by the flat bump.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// `exp(log_scale) · direction`; `log_scale = −∞` is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlatValue {
    pub log_scale: f64,
    pub direction: Complex64,
}

impl FlatValue {
    const ZERO: FlatValue = FlatValue { log_scale: f64::NEG_INFINITY, direction: Complex64::new(0.0, 0.0) };

    pub fn value(&self) -> Complex64 {
        self.direction * self.log_scale.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == f64::NEG_INFINITY || self.direction == Complex64::new(0.0, 0.0)
    }
}

fn annulus(r: f64) -> Option<u32> {
    if !(r > 0.0 && r <= 1.0) {
        return None;
    }
    Some((1.0 / r).floor() as u32)
}

fn log_bump(n: u32, r: f64) -> f64 {
    let (a, b) = (1.0 / f64::from(n + 1), 1.0 / f64::from(n));
    if r <= a || r >= b {
        return f64::NEG_INFINITY;
    }
    -1.0 / ((r - a) * (b - r))
}

/// `ρ_n(r)`.
pub fn flat_bump(n: u32, r: f64) -> f64 {
    log_bump(n, r).exp()
}

/// `f(z)` in scaled form.
pub fn flip_value(z: Complex64) -> FlatValue {
    let r = z.norm();
    let Some(n) = annulus(r) else { return FlatValue::ZERO };
    let log_scale = -1.0 / r + log_bump(n, r);
    if log_scale == f64::NEG_INFINITY {
        return FlatValue::ZERO;
    }
    let direction = if n % 2 == 0 { Complex64::new(r, 0.0) } else { z };
    FlatValue { log_scale, direction }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusCheck {
    pub n: u32,
    /// `"trivial"` (`h = 1`) or `"identity"` (`h = τ`).
    pub homomorphism: &'static str,
    pub samples: usize,
    /// Worst `|f(τz) − h(τ)f(z)| / sup |f|` over the annulus, from the scaled form.
    pub max_error: f64,
    /// Worst `|f(τz) − h(τ)f(z)| / |f(z)|`.
    pub max_pointwise_relative_error: f64,
    /// Worst `|f(τz) − h(τ)f(z)|` in plain double precision.
    pub max_absolute_error: f64,
    /// Largest `log₁₀ |f|` on the annulus.
    pub peak_log10: f64,
    /// The plain double value is 0 at the middle of the annulus.
    pub underflows: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlipReport {
    pub seed: u64,
    pub tol: f64,
    pub annuli: Vec<AnnulusCheck>,
    /// `f = 0` for `|z| > 1` and at 0.
    pub vanishes_outside: bool,
}

impl FlipReport {
    pub fn passed(&self) -> bool {
        self.vanishes_outside && self.annuli.iter().all(|a| a.passed)
    }
}

/// Checks `f(τz) = h(τ)f(z)` at `samples` random `(τ, z)` on each annulus
/// `n = 1, …, n_max`, with `τ` uniform on U(1).
pub fn nonliftable_demo(n_max: u32, samples: usize, tol: f64, seed: u64) -> FlipReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut annuli = Vec::new();
    for n in 1..=n_max {
        let (a, b) = (1.0 / f64::from(n + 1), 1.0 / f64::from(n));
        let odd = n % 2 == 1;
        let peak = (1..1000)
            .map(|k| {
                let v = flip_value(Complex64::new(a + (b - a) * f64::from(k) / 1000.0, 0.0));
                v.log_scale + v.direction.norm().ln()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut err, mut rel, mut abs) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let r = a + (b - a) * rng.gen_range(1e-6..1.0 - 1e-6);
            let z = Complex64::from_polar(r, rng.gen_range(0.0..TAU));
            let tau = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
            let h = if odd { tau } else { Complex64::new(1.0, 0.0) };
            let (fz, ftz) = (flip_value(z), flip_value(tau * z));
            let expected = h * fz.direction;
            let got = ftz.direction * (ftz.log_scale - fz.log_scale).exp();
            rel = rel.max((got - expected).norm() / fz.direction.norm());
            err = err.max((got - expected).norm() * (fz.log_scale - peak).exp());
            abs = abs.max((ftz.value() - h * fz.value()).norm());
        }
        let mid = flip_value(Complex64::new((a + b) / 2.0, 0.0));
        annuli.push(AnnulusCheck {
            n,
            homomorphism: if odd { "identity" } else { "trivial" },
            samples,
            max_error: err,
            max_pointwise_relative_error: rel,
            max_absolute_error: abs,
            peak_log10: peak / std::f64::consts::LN_10,
            underflows: mid.value().norm() == 0.0,
            passed: err <= tol && abs <= tol,
        });
    }
    let vanishes_outside = [Complex64::new(0.0, 0.0), Complex64::new(1.5, 0.2), Complex64::new(0.0, -7.0)]
        .iter()
        .all(|&z| flip_value(z).is_zero());
    FlipReport { seed, tol, annuli, vanishes_outside }
}
