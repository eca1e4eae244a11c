//! Dense complex polynomials as coefficient vectors, lowest degree first.

use num_complex::Complex64;

pub(crate) type Poly = Vec<Complex64>;

pub(crate) fn eval(p: &[Complex64], u: f64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c)
}

pub(crate) fn add(p: &[Complex64], q: &[Complex64]) -> Poly {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or_default() + q.get(i).copied().unwrap_or_default())
        .collect()
}

pub(crate) fn scale(p: &[Complex64], s: Complex64) -> Poly {
    p.iter().map(|c| c * s).collect()
}

pub(crate) fn mul(p: &[Complex64], q: &[Complex64]) -> Poly {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Coefficients of `v ↦ p(h + a·v)`.
pub(crate) fn compose_linear(p: &[Complex64], h: f64, a: f64) -> Poly {
    // Horner in the polynomial ring: ((c_d)(h + a v) + c_{d-1})(h + a v) + ...
    let mut out: Poly = Vec::new();
    for c in p.iter().rev() {
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i] += o * h;
            next[i + 1] += o * a;
        }
        next[0] += c;
        out = next;
    }
    out
}

/// Upper bound for `sup |p(u)|` over `u ∈ [0, width]`, from the Taylor
/// expansion at the midpoint.
pub(crate) fn sup_bound(p: &[Complex64], width: f64) -> f64 {
    let half = width / 2.0;
    let mut power = 1.0;
    let mut total = 0.0;
    for c in compose_linear(p, half, 1.0) {
        total += c.norm() * power;
        power *= half;
    }
    total
}

pub(crate) fn is_zero(p: &[Complex64]) -> bool {
    p.iter().all(|c| c.re == 0.0 && c.im == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = vec![c(1.0), c(-2.0), c(0.5), c(3.0)];
        let shifted = compose_linear(&p, 0.75, 1.0);
        for v in [0.0, 0.1, 0.4, 1.3] {
            assert!((eval(&shifted, v) - eval(&p, 0.75 + v)).norm() < 1e-12);
        }
        let flipped = compose_linear(&p, 0.2, -2.0);
        assert!((eval(&flipped, 0.3) - eval(&p, 0.2 - 0.6)).norm() < 1e-12);
    }

    #[test]
    fn product_degree_adds() {
        let p = vec![c(1.0), c(1.0)];
        let q = vec![c(0.0), c(2.0), c(1.0)];
        assert_eq!(mul(&p, &q).len(), 4);
        assert!((eval(&mul(&p, &q), 0.7) - eval(&p, 0.7) * eval(&q, 0.7)).norm() < 1e-12);
    }
}
