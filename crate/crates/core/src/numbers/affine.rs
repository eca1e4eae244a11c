use std::fmt;

use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_rational, NumberError, QAlpha, Rational};

/// Exact affine map `X ↦ AX + b` with `A` rational invertible and `b ∈ (ℚ+ℚα)ⁿ`.
///
/// Composition follows the block-matrix embedding `[[A, b], [0, 1]]`, so
/// `(A, b) ∘ (A', b') = (AA', Ab' + b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElement {
    linear: Vec<Vec<Rational>>,
    translation: Vec<QAlpha>,
}

fn check_dim(expected: usize, found: usize) -> Result<(), NumberError> {
    if expected == found {
        Ok(())
    } else {
        Err(NumberError::DimensionMismatch { expected, found })
    }
}

fn identity_matrix(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn mat_apply(a: &[Vec<Rational>], x: &[QAlpha]) -> Vec<QAlpha> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(QAlpha::zero(), |acc, (r, xi)| &acc + &xi.scale(r)))
        .collect()
}

/// Gauss-Jordan inverse over ℚ; `None` when singular.
fn mat_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut inv = identity_matrix(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in 0..n {
                    let mj = &m[col][j] * &factor;
                    let ij = &inv[col][j] * &factor;
                    m[r][j] -= mj;
                    inv[r][j] -= ij;
                }
            }
        }
    }
    Some(inv)
}

fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let factor = &m[r][col] / &m[col][col];
                for j in col..n {
                    let v = &m[col][j] * &factor;
                    m[r][j] -= v;
                }
            }
        }
    }
    det
}

impl AffineElement {
    /// Validates shapes and invertibility of the linear part.
    pub fn new(linear: Vec<Vec<Rational>>, translation: Vec<QAlpha>) -> Result<Self, NumberError> {
        let n = translation.len();
        check_dim(n, linear.len())?;
        for row in &linear {
            check_dim(n, row.len())?;
        }
        if determinant(&linear).is_zero() {
            return Err(NumberError::Singular);
        }
        Ok(Self { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self { linear: identity_matrix(n), translation: vec![QAlpha::zero(); n] }
    }

    /// Pure translation `t_b`.
    pub fn translation(b: Vec<QAlpha>) -> Self {
        Self { linear: identity_matrix(b.len()), translation: b }
    }

    /// One-dimensional translation `x ↦ x + b`.
    pub fn translate1(b: QAlpha) -> Self {
        Self::translation(vec![b])
    }

    /// One-dimensional map `x ↦ a·x + b`.
    pub fn affine1(a: Rational, b: QAlpha) -> Result<Self, NumberError> {
        Self::new(vec![vec![a]], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &[Vec<Rational>] {
        &self.linear
    }

    pub fn translation_part(&self) -> &[QAlpha] {
        &self.translation
    }

    pub fn det(&self) -> Rational {
        determinant(&self.linear)
    }

    pub fn is_identity(&self) -> bool {
        self.is_translation() && self.translation.iter().all(QAlpha::is_zero)
    }

    /// True when `A = I`.
    pub fn is_translation(&self) -> bool {
        self.linear == identity_matrix(self.dim())
    }

    /// The translation amount of a one-dimensional translation.
    pub fn translation_amount1(&self) -> Option<&QAlpha> {
        (self.dim() == 1 && self.is_translation()).then(|| &self.translation[0])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineElement) -> Result<AffineElement, NumberError> {
        check_dim(self.dim(), other.dim())?;
        let linear = mat_mul(&self.linear, &other.linear);
        let translation = mat_apply(&self.linear, &other.translation)
            .iter()
            .zip(&self.translation)
            .map(|(x, b)| x + b)
            .collect();
        Ok(AffineElement { linear, translation })
    }

    /// `(A⁻¹, −A⁻¹b)`.
    pub fn inverse(&self) -> AffineElement {
        let inv = mat_inverse(&self.linear).expect("linear part is invertible by construction");
        let translation = mat_apply(&inv, &self.translation).iter().map(|x| -x).collect();
        AffineElement { linear: inv, translation }
    }

    /// `AX + b`.
    pub fn apply(&self, x: &[QAlpha]) -> Result<Vec<QAlpha>, NumberError> {
        check_dim(self.dim(), x.len())?;
        Ok(mat_apply(&self.linear, x).iter().zip(&self.translation).map(|(y, b)| y + b).collect())
    }

    /// Short form for tables: `t_{1+α}` for translations, `x ↦ 1/2x+1/2` in 1-D.
    pub fn pretty(&self) -> String {
        if self.is_translation() {
            let parts: Vec<String> = self.translation.iter().map(QAlpha::pretty).collect();
            return format!("t_{{{}}}", parts.join(","));
        }
        if self.dim() == 1 {
            let a = &self.linear[0][0];
            let a_txt = if a.denom().is_one() { a.numer().to_string() } else { format!("{a}") };
            let b = &self.translation[0];
            return if b.is_zero() {
                format!("x ↦ {a_txt}x")
            } else {
                format!("x ↦ {a_txt}x+{}", b.pretty())
            };
        }
        format!("{self}")
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let json = serde_json::to_string(self).map_err(|_| fmt::Error)?;
        f.write_str(&json)
    }
}

#[derive(Serialize, Deserialize)]
struct AffineJson {
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    b: Vec<QAlpha>,
}

impl Serialize for AffineElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AffineJson {
            a: self
                .linear
                .iter()
                .map(|row| row.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect())
                .collect(),
            b: self.translation.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AffineElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = AffineJson::deserialize(deserializer)?;
        let linear = raw
            .a
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(de::Error::custom)?;
        AffineElement::new(linear, raw.b).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rational;

    fn q(s: &str) -> QAlpha {
        s.parse().unwrap()
    }

    fn t(s: &str) -> AffineElement {
        AffineElement::translate1(q(s))
    }

    #[test]
    fn identity_is_neutral() {
        let g = AffineElement::affine1(rational(2, 3), q("1+α")).unwrap();
        let id = AffineElement::identity(1);
        assert_eq!(id.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&id).unwrap(), g);
    }

    #[test]
    fn translations_add() {
        assert_eq!(t("1+α").compose(&t("2-α")).unwrap(), t("3"));
    }

    #[test]
    fn invert_scaling() {
        let g = AffineElement::affine1(rational(2, 1), q("1")).unwrap();
        let inv = AffineElement::affine1(rational(1, 2), q("-1/2")).unwrap();
        assert_eq!(g.inverse(), inv);
    }

    #[test]
    fn composition_order_matches_block_matrices() {
        // (2, 1) ∘ (1, α): x ↦ 2(x + α) + 1 = 2x + 2α + 1
        let g = AffineElement::affine1(rational(2, 1), q("1")).unwrap();
        let h = t("α");
        let gh = g.compose(&h).unwrap();
        assert_eq!(gh, AffineElement::affine1(rational(2, 1), q("1+2α")).unwrap());
        assert_eq!(gh.apply(&[q("0")]).unwrap(), vec![q("1+2α")]);
    }

    #[test]
    fn dimension_mismatch() {
        let g = AffineElement::identity(2);
        assert_eq!(
            g.apply(&[q("1")]),
            Err(NumberError::DimensionMismatch { expected: 2, found: 1 })
        );
        assert!(g.compose(&AffineElement::identity(1)).is_err());
    }

    #[test]
    fn singular_rejected() {
        let zero = vec![vec![Rational::zero()]];
        assert_eq!(AffineElement::new(zero, vec![q("0")]), Err(NumberError::Singular));
    }

    #[test]
    fn two_dimensional_inverse() {
        let a = vec![vec![rational(1, 1), rational(2, 1)], vec![rational(3, 1), rational(4, 1)]];
        let g = AffineElement::new(a, vec![q("α"), q("1/2")]).unwrap();
        assert_eq!(g.det(), rational(-2, 1));
        assert!(g.compose(&g.inverse()).unwrap().is_identity());
        assert!(g.inverse().compose(&g).unwrap().is_identity());
    }

    #[test]
    fn json_round_trip() {
        let g = AffineElement::affine1(rational(-1, 2), q("1/3+α")).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"A":[["-1/2"]],"b":["1/3+α*1/1"]}"#);
        let back: AffineElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}
