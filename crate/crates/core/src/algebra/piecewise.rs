use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::poly::{self, Poly};
use super::AlgebraError;
use crate::numbers::{AffineElement, AlphaWitness, NumberError, QAlpha};

/// Interior breakpoint jumps above this (relative) size are rejected.
const CONTINUITY_TOL: f64 = 1e-8;

/// Compactly supported piecewise polynomial `ℝ → ℂ`.
///
/// Piece `i` lives on `[bᵢ, bᵢ₊₁)` and is stored as a polynomial in the
/// local variable `u = x − bᵢ`, so translating by a ℚ + ℚα amount only moves
/// the breakpoints. The function is zero outside `[b₀, b_last)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise")]
pub struct PiecewisePoly {
    breakpoints: Vec<QAlpha>,
    pieces: Vec<Poly>,
}

#[derive(Deserialize)]
struct RawPiecewise {
    breakpoints: Vec<QAlpha>,
    pieces: Vec<Poly>,
}

impl TryFrom<RawPiecewise> for PiecewisePoly {
    type Error = AlgebraError;
    fn try_from(raw: RawPiecewise) -> Result<Self, Self::Error> {
        PiecewisePoly::new(raw.breakpoints, raw.pieces, &AlphaWitness::golden())
    }
}

fn width(a: &QAlpha, b: &QAlpha, w: &AlphaWitness) -> f64 {
    w.eval(&(b - a))
}

/// Sorted union of two increasing breakpoint lists.
fn merge(a: &[QAlpha], b: &[QAlpha], w: &AlphaWitness) -> Result<Vec<QAlpha>, NumberError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if i == a.len() {
            Ordering::Greater
        } else if j == b.len() {
            Ordering::Less
        } else {
            w.compare(&a[i], &b[j])?
        };
        match next {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), pieces: Vec::new() }
    }

    /// Validates increasing breakpoints, one piece per gap, and continuity at
    /// interior breakpoints.
    pub fn new(breakpoints: Vec<QAlpha>, pieces: Vec<Poly>, w: &AlphaWitness) -> Result<Self, AlgebraError> {
        if pieces.is_empty() && breakpoints.len() <= 1 {
            return Ok(Self::zero());
        }
        if breakpoints.len() != pieces.len() + 1 {
            return Err(AlgebraError::Malformed(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                pieces.len()
            )));
        }
        for pair in breakpoints.windows(2) {
            if w.compare(&pair[0], &pair[1])? != Ordering::Less {
                return Err(AlgebraError::Malformed(format!(
                    "breakpoints not increasing at {}",
                    pair[1].pretty()
                )));
            }
        }
        let f = Self { breakpoints, pieces };
        let widths = f.widths(w);
        for i in 1..f.pieces.len() {
            let left = poly::eval(&f.pieces[i - 1], widths[i - 1]);
            let right = poly::eval(&f.pieces[i], 0.0);
            if (left - right).norm() > CONTINUITY_TOL * (1.0 + left.norm()) {
                return Err(AlgebraError::Malformed(format!(
                    "jump of {:.3e} at breakpoint {}",
                    (left - right).norm(),
                    f.breakpoints[i].pretty()
                )));
            }
        }
        Ok(f)
    }

    /// The constant `c` on `[lo, hi)`.
    pub fn constant(lo: QAlpha, hi: QAlpha, c: Complex64, w: &AlphaWitness) -> Result<Self, AlgebraError> {
        Self::new(vec![lo, hi], vec![vec![c]], w)
    }

    pub fn breakpoints(&self) -> &[QAlpha] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Complex64>] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| poly::is_zero(p))
    }

    /// Highest stored degree over all pieces.
    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    fn widths(&self, w: &AlphaWitness) -> Vec<f64> {
        self.breakpoints.windows(2).map(|p| width(&p[0], &p[1], w)).collect()
    }

    pub fn eval(&self, x: f64, w: &AlphaWitness) -> Complex64 {
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = (w.eval(&self.breakpoints[i]), w.eval(&self.breakpoints[i + 1]));
            if lo <= x && x < hi {
                return poly::eval(p, x - lo);
            }
        }
        Complex64::new(0.0, 0.0)
    }

    /// `x ↦ f(x + s)`. Exact: only breakpoints move.
    pub fn translate(&self, s: &QAlpha) -> Self {
        Self { breakpoints: self.breakpoints.iter().map(|b| b - s).collect(), pieces: self.pieces.clone() }
    }

    /// `x ↦ f(g(x))` for a one-dimensional affine `g`.
    pub fn pullback(&self, g: &AffineElement, w: &AlphaWitness) -> Result<Self, AlgebraError> {
        if g.dim() != 1 {
            return Err(NumberError::DimensionMismatch { expected: 1, found: g.dim() }.into());
        }
        if let Some(s) = g.translation_amount1() {
            return Ok(self.translate(s));
        }
        let a = &g.linear()[0][0];
        let b = &g.translation_part()[0];
        let inv_a = a.recip();
        let a_f = a.to_f64().unwrap_or(f64::NAN);
        let moved: Vec<QAlpha> = self.breakpoints.iter().map(|x| (x - b).scale(&inv_a)).collect();
        if a.is_positive() {
            let pieces = self.pieces.iter().map(|p| poly::compose_linear(p, 0.0, a_f)).collect();
            return Ok(Self { breakpoints: moved, pieces });
        }
        let widths = self.widths(w);
        let pieces =
            self.pieces.iter().zip(&widths).rev().map(|(p, h)| poly::compose_linear(p, *h, a_f)).collect();
        let breakpoints = moved.into_iter().rev().collect();
        Ok(Self { breakpoints, pieces })
    }

    pub fn conj(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.iter().map(Complex64::conj).collect()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { breakpoints: self.breakpoints.clone(), pieces: self.pieces.iter().map(|p| poly::scale(p, c)).collect() }
    }

    /// Local polynomial of `self` on each cell of an increasing grid that
    /// refines its breakpoints; `None` on cells outside the support.
    fn restrict(&self, grid: &[QAlpha], w: &AlphaWitness) -> Result<Vec<Option<Poly>>, NumberError> {
        let mut out = Vec::with_capacity(grid.len().saturating_sub(1));
        let mut i = 0;
        for cell in grid.windows(2) {
            let left = &cell[0];
            while i < self.pieces.len() && w.compare(&self.breakpoints[i + 1], left)? != Ordering::Greater {
                i += 1;
            }
            if i == self.pieces.len() || w.compare(left, &self.breakpoints[i])? == Ordering::Less {
                out.push(None);
                continue;
            }
            let p = &self.pieces[i];
            out.push(Some(if left == &self.breakpoints[i] {
                p.clone()
            } else {
                poly::compose_linear(p, width(&self.breakpoints[i], left, w), 1.0)
            }));
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self, w: &AlphaWitness) -> Result<Self, AlgebraError> {
        if self.pieces.is_empty() {
            return Ok(other.clone());
        }
        if other.pieces.is_empty() {
            return Ok(self.clone());
        }
        let grid = merge(&self.breakpoints, &other.breakpoints, w)?;
        let (a, b) = (self.restrict(&grid, w)?, other.restrict(&grid, w)?);
        let pieces = a
            .into_iter()
            .zip(b)
            .map(|(p, q)| match (p, q) {
                (Some(p), Some(q)) => poly::add(&p, &q),
                (Some(p), None) | (None, Some(p)) => p,
                (None, None) => Vec::new(),
            })
            .collect();
        Ok(Self { breakpoints: grid, pieces })
    }

    pub fn mul(&self, other: &Self, w: &AlphaWitness) -> Result<Self, AlgebraError> {
        if self.pieces.is_empty() || other.pieces.is_empty() {
            return Ok(Self::zero());
        }
        let lo = match w.compare(&self.breakpoints[0], &other.breakpoints[0])? {
            Ordering::Less => &other.breakpoints[0],
            _ => &self.breakpoints[0],
        };
        let (sl, ol) = (self.breakpoints.last().expect("nonempty"), other.breakpoints.last().expect("nonempty"));
        let hi = match w.compare(sl, ol)? {
            Ordering::Less => sl,
            _ => ol,
        };
        if w.compare(lo, hi)? != Ordering::Less {
            return Ok(Self::zero());
        }
        let mut grid = Vec::new();
        for b in merge(&self.breakpoints, &other.breakpoints, w)? {
            if w.compare(lo, &b)? != Ordering::Greater && w.compare(&b, hi)? != Ordering::Greater {
                grid.push(b);
            }
        }
        let (a, b) = (self.restrict(&grid, w)?, other.restrict(&grid, w)?);
        let pieces = a
            .into_iter()
            .zip(b)
            .map(|(p, q)| match (p, q) {
                (Some(p), Some(q)) => poly::mul(&p, &q),
                _ => Vec::new(),
            })
            .collect();
        Ok(Self { breakpoints: grid, pieces })
    }

    /// Rigorous upper bound on `sup |self − other|`.
    pub fn sup_distance(&self, other: &Self, w: &AlphaWitness) -> Result<f64, AlgebraError> {
        let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)), w)?;
        let widths = diff.widths(w);
        Ok(diff.pieces.iter().zip(widths).map(|(p, h)| poly::sup_bound(p, h)).fold(0.0, f64::max))
    }

    /// Rigorous upper bound on `sup |self|`.
    pub fn sup_norm(&self, w: &AlphaWitness) -> f64 {
        self.pieces.iter().zip(self.widths(w)).map(|(p, h)| poly::sup_bound(p, h)).fold(0.0, f64::max)
    }
}
