use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{LiftError, SampledMap, Samples};
use crate::numbers::{rational, AffineElement, AlphaWitness, GroupPresentation, QAlpha, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchStatus {
    Matched,
    NoMatchAtBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleMatch {
    pub index: usize,
    pub status: MatchStatus,
    /// Every enumerated element matching the sample, in enumeration order.
    /// More than one only at points fixed by some `γ⁻¹γ'`.
    pub matches: Vec<AffineElement>,
    /// `|F(r) − γ·r|∞` for the assigned `γ`; zero for exact samples.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Piece {
    pub gamma: AffineElement,
    pub samples: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AffinePieceReport {
    pub exact: bool,
    pub bound: u32,
    pub tol: f64,
    pub enumerated: usize,
    /// Ordered by the enumeration position of `γ`.
    pub pieces: Vec<Piece>,
    pub unmatched: Vec<usize>,
    pub coverage: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub per_sample: Vec<SampleMatch>,
}

/// `(A, b)` in double precision.
pub(crate) fn numeric_affine(g: &AffineElement, w: &AlphaWitness) -> (Vec<Vec<f64>>, Vec<f64>) {
    let a = g.linear().iter().map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    (a, w.eval_vec(g.translation_part()))
}

pub(crate) fn apply_numeric(ab: &(Vec<Vec<f64>>, Vec<f64>), x: &[f64]) -> Vec<f64> {
    ab.0.iter().zip(&ab.1).map(|(row, b)| row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() + b).collect()
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Assigns each sample to the first `γ ∈ Γ` (enumeration order, size ≤
/// `bound`) with `F(r) = γ·r`: exactly for exact samples, within `tol` in the
/// sup norm for numeric ones.
pub fn detect_pieces(
    f: &SampledMap,
    group: &GroupPresentation,
    bound: u32,
    tol: f64,
    w: &AlphaWitness,
) -> Result<AffinePieceReport, LiftError> {
    if group.dimension() != f.dim() {
        return Err(crate::numbers::NumberError::DimensionMismatch { expected: f.dim(), found: group.dimension() }.into());
    }
    if !(tol >= 0.0) {
        return Err(LiftError::InvalidMap("tolerance must be non-negative".into()));
    }
    let elements = group.enumerate(bound)?;
    let mut per_sample = Vec::with_capacity(f.len());
    match f.samples() {
        Samples::Exact { points, values } => {
            for (i, (p, v)) in points.iter().zip(values).enumerate() {
                let mut matches = Vec::new();
                for g in &elements {
                    if g.apply(p)? == *v {
                        matches.push(g.clone());
                    }
                }
                per_sample.push(sample_match(i, matches, Some(0.0)));
            }
        }
        Samples::Numeric { points, values } => {
            let numeric: Vec<_> = elements.iter().map(|g| numeric_affine(g, w)).collect();
            for (i, (p, v)) in points.iter().zip(values).enumerate() {
                let mut matches = Vec::new();
                let mut residual = None;
                for (g, ab) in elements.iter().zip(&numeric) {
                    let e = sup_diff(&apply_numeric(ab, p), v);
                    if e <= tol {
                        residual.get_or_insert(e);
                        matches.push(g.clone());
                    }
                }
                per_sample.push(sample_match(i, matches, residual));
            }
        }
    }

    let position: BTreeMap<&AffineElement, usize> = elements.iter().enumerate().map(|(k, g)| (g, k)).collect();
    let mut by_position: BTreeMap<usize, Piece> = BTreeMap::new();
    let mut unmatched = Vec::new();
    let mut residuals = Vec::new();
    for s in &per_sample {
        match s.matches.first() {
            Some(g) => {
                by_position
                    .entry(position[g])
                    .or_insert_with(|| Piece { gamma: g.clone(), samples: Vec::new() })
                    .samples
                    .push(s.index);
                residuals.extend(s.residual);
            }
            None => unmatched.push(s.index),
        }
    }
    let n = per_sample.len();
    let matched = n - unmatched.len();
    Ok(AffinePieceReport {
        exact: f.samples().is_exact(),
        bound,
        tol: if f.samples().is_exact() { 0.0 } else { tol },
        enumerated: elements.len(),
        pieces: by_position.into_values().collect(),
        unmatched,
        coverage: if n == 0 { 0.0 } else { matched as f64 / n as f64 },
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        mean_residual: if residuals.is_empty() { 0.0 } else { residuals.iter().sum::<f64>() / residuals.len() as f64 },
        per_sample,
    })
}

fn sample_match(index: usize, matches: Vec<AffineElement>, residual: Option<f64>) -> SampleMatch {
    let status = if matches.is_empty() { MatchStatus::NoMatchAtBound } else { MatchStatus::Matched };
    SampleMatch { index, status, residual: if matches.is_empty() { None } else { residual }, matches }
}

/// Index of the piece owning `t ∈ [0, 1]` when `[0, 1]` is cut into `k` equal
/// parts; cut points go to the left piece.
fn owner(t: &Rational, k: usize) -> usize {
    let scaled = t * rational(k as i64, 1);
    let c = scaled.ceil().to_integer().to_usize().unwrap_or(0);
    c.saturating_sub(1).min(k - 1)
}

/// Exact samples of the map equal to `pieces[j]` on the `j`-th of `k` equal
/// slices of `[lo, hi]`, at `samples` random rational points.
pub fn stitched_exact(
    pieces: &[AffineElement],
    lo: &Rational,
    hi: &Rational,
    samples: usize,
    seed: u64,
    w: &AlphaWitness,
) -> Result<SampledMap, LiftError> {
    check_pieces(pieces, lo, hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = hi - lo;
    let mut points = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let t = rational(rng.gen_range(0..=960), 960);
        let x = vec![QAlpha::from_rational(lo + &width * &t)];
        values.push(pieces[owner(&t, pieces.len())].apply(&x)?);
        points.push(x);
    }
    let center = ((lo + hi) / rational(2, 1)).to_f64().unwrap_or(0.0);
    SampledMap::exact(vec![center], (&width / rational(2, 1)).to_f64().unwrap_or(0.0), points, values, w)
}

/// Numeric version of [`stitched_exact`] at uniform random points, keeping
/// the map as evaluator.
pub fn stitched_numeric(
    pieces: &[AffineElement],
    lo: f64,
    hi: f64,
    samples: usize,
    seed: u64,
    w: &AlphaWitness,
) -> Result<SampledMap, LiftError> {
    if pieces.is_empty() || pieces.iter().any(|g| g.dim() != 1) || !(lo < hi) {
        return Err(LiftError::InvalidMap("stitching needs 1-dimensional pieces on a nonempty interval".into()));
    }
    let numeric: Vec<_> = pieces.iter().map(|g| numeric_affine(g, w)).collect();
    let k = pieces.len();
    let eval = move |x: &[f64]| {
        let t = (x[0] - lo) / (hi - lo);
        let j = ((t * k as f64).ceil() as isize - 1).clamp(0, k as isize - 1) as usize;
        apply_numeric(&numeric[j], x)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..samples).map(|_| vec![rng.gen_range(lo..=hi)]).collect();
    SampledMap::from_fn(vec![(lo + hi) / 2.0], (hi - lo) / 2.0, points, Arc::new(eval))
}

fn check_pieces(pieces: &[AffineElement], lo: &Rational, hi: &Rational) -> Result<(), LiftError> {
    if pieces.is_empty() || pieces.iter().any(|g| g.dim() != 1) || lo >= hi {
        return Err(LiftError::InvalidMap("stitching needs 1-dimensional pieces on a nonempty interval".into()));
    }
    Ok(())
}
