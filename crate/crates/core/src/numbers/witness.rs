use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{parse_rational, NumberError, QAlpha, Rational};

/// Golden-ratio conjugate (√5 − 1)/2 to 50 decimal digits.
pub const GOLDEN_CONJUGATE_DIGITS: &str = "0.61803398874989484820458683436563811772030917980576";

/// Numeric stand-in for the formal irrational α.
///
/// Holds a decimal approximation `â` with `|α − â| ≤ 10^-digits`. The witness
/// is only ever used to order values and to evaluate them numerically;
/// equality of ℚ + ℚα values never consults it.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaWitness {
    text: String,
    approx: Rational,
    digits: usize,
    error: Rational,
    margin: Rational,
    value: f64,
}

fn pow10_inv(k: usize) -> Rational {
    Rational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), k))
}

impl AlphaWitness {
    /// Builds a witness from a decimal expansion such as `"0.6180339887"`.
    ///
    /// The digit count is the number of fractional digits supplied. The
    /// safety margin defaults to `10^-(digits - 10)` (at least `10^-1`).
    pub fn from_decimal(text: &str) -> Result<Self, NumberError> {
        let text = text.trim();
        let digits = text.split_once('.').map_or(0, |(_, frac)| frac.len());
        let margin_digits = digits.saturating_sub(10).max(1);
        Self::with_margin(text, pow10_inv(margin_digits))
    }

    /// Builds a witness with an explicit safety margin. The witness precision
    /// `10^-digits` must be strictly below the margin.
    pub fn with_margin(text: &str, margin: Rational) -> Result<Self, NumberError> {
        let text = text.trim();
        let (int_part, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.chars().any(|c| !c.is_ascii_digit()) {
            return Err(NumberError::Parse(format!("invalid decimal witness {text:?}")));
        }
        let digits = frac.len();
        let negative = int_part.trim_start().starts_with('-');
        let int_val = parse_rational(if int_part.is_empty() || int_part == "-" { "0" } else { int_part })?;
        let frac_val = if frac.is_empty() {
            Rational::zero()
        } else {
            parse_rational(frac)? * pow10_inv(digits)
        };
        let approx = if negative { int_val - frac_val } else { int_val + frac_val };
        let error = pow10_inv(digits);
        if error >= margin {
            return Err(NumberError::WitnessTooCoarse { digits });
        }
        let value = approx.to_f64().unwrap_or(f64::NAN);
        Ok(Self { text: text.to_string(), approx, digits, error, margin, value })
    }

    /// The golden-ratio conjugate at 50 digits.
    pub fn golden() -> Self {
        Self::from_decimal(GOLDEN_CONJUGATE_DIGITS).expect("built-in witness is valid")
    }

    /// Returns a copy with a different safety margin.
    pub fn margin(mut self, margin: Rational) -> Result<Self, NumberError> {
        if self.error >= margin {
            return Err(NumberError::WitnessTooCoarse { digits: self.digits });
        }
        self.margin = margin;
        Ok(self)
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Double-precision value of α.
    pub fn alpha_f64(&self) -> f64 {
        self.value
    }

    /// Exact rational approximation of α.
    pub fn approx(&self) -> &Rational {
        &self.approx
    }

    /// Double-precision value of `x`.
    pub fn eval(&self, x: &QAlpha) -> f64 {
        let p = x.rational_part().to_f64().unwrap_or(f64::NAN);
        let q = x.alpha_part().to_f64().unwrap_or(f64::NAN);
        p + q * self.value
    }

    pub fn eval_vec(&self, xs: &[QAlpha]) -> Vec<f64> {
        xs.iter().map(|x| self.eval(x)).collect()
    }

    /// Orders `x` and `y` as real numbers.
    ///
    /// Equal coefficients give `Equal` without touching the witness. A
    /// difference with no α-part is ordered exactly. Otherwise the rigorous
    /// interval `d.p + d.q·â ± |d.q|·10^-digits` must clear the safety margin,
    /// or the comparison refuses with `PrecisionInsufficient`.
    pub fn compare(&self, x: &QAlpha, y: &QAlpha) -> Result<Ordering, NumberError> {
        let d = x - y;
        if d.is_zero() {
            return Ok(Ordering::Equal);
        }
        if d.is_rational() {
            return Ok(d.rational_part().cmp(&Rational::zero()));
        }
        let value = d.rational_part() + d.alpha_part() * &self.approx;
        let slack = d.alpha_part().abs() * &self.error + &self.margin;
        if value.abs() <= slack {
            return Err(NumberError::PrecisionInsufficient);
        }
        Ok(value.cmp(&Rational::zero()))
    }

    /// `lo < x < hi` as real numbers.
    pub fn strictly_between(&self, lo: &QAlpha, x: &QAlpha, hi: &QAlpha) -> Result<bool, NumberError> {
        Ok(self.compare(lo, x)? == Ordering::Less && self.compare(x, hi)? == Ordering::Less)
    }
}

impl Default for AlphaWitness {
    fn default() -> Self {
        Self::golden()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QAlpha {
        s.parse().unwrap()
    }

    #[test]
    fn equal_coefficients_short_circuit() {
        let w = AlphaWitness::golden();
        assert_eq!(w.compare(&q("1"), &q("1")).unwrap(), Ordering::Equal);
        assert_eq!(w.compare(&q("2+α"), &q("2+α")).unwrap(), Ordering::Equal);
    }

    #[test]
    fn alpha_below_one() {
        let w = AlphaWitness::golden();
        assert_eq!(w.compare(&q("α"), &q("1")).unwrap(), Ordering::Less);
    }

    #[test]
    fn two_minus_three_alpha_is_positive() {
        // 2 - 3·0.6180339887498948482... = 0.14589803375031545538...
        let w = AlphaWitness::golden();
        assert_eq!(w.compare(&q("2-3α"), &q("0")).unwrap(), Ordering::Greater);
    }

    #[test]
    fn refuses_inside_margin() {
        // With 10 digits and margin 1e-5, 0.6180339887 - α is below the margin.
        let w = AlphaWitness::with_margin("0.6180339887", pow10_inv(5)).unwrap();
        let near = q("6180339887/10000000000-α");
        assert_eq!(w.compare(&near, &q("0")), Err(NumberError::PrecisionInsufficient));
        // Far from zero the same witness answers.
        assert_eq!(w.compare(&q("1-α"), &q("0")).unwrap(), Ordering::Greater);
    }

    #[test]
    fn coarse_witness_rejected() {
        assert!(matches!(
            AlphaWitness::with_margin("0.6", pow10_inv(3)),
            Err(NumberError::WitnessTooCoarse { .. })
        ));
    }

    #[test]
    fn golden_value() {
        let w = AlphaWitness::golden();
        assert_eq!(w.digits(), 50);
        assert!((w.alpha_f64() - 0.618_033_988_749_894_9).abs() < 1e-15);
    }
}
