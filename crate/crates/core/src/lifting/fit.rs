use nalgebra::DMatrix;
use serde::Serialize;

use super::{LiftError, SampledMap};
use crate::numbers::AlphaWitness;

/// Finite-difference step, `2⁻¹³ ≈ 1.2e-4`. Stencil centers are snapped to
/// multiples of it so that `x ± h` is exact in binary.
pub const FD_STEP: f64 = 1.0 / 8192.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitTolerances {
    pub residual: f64,
    pub second_derivative: f64,
}

impl Default for FitTolerances {
    fn default() -> Self {
        Self { residual: 1e-9, second_derivative: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureMethod {
    /// Central differences through the map's evaluator.
    FiniteDifference,
    /// Quadratic least-squares fit of the samples.
    QuadraticFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineFit {
    pub samples: usize,
    /// Row-major `A`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// `max |F(r) − (Ar + b)|∞` over the samples.
    pub max_residual: f64,
    /// Largest entry of the estimated `D²F`.
    pub second_derivative: f64,
    pub method: CurvatureMethod,
    pub tolerances: FitTolerances,
    pub accepted: bool,
}

impl AffineFit {
    pub fn affine(&self) -> Option<(&[Vec<f64>], &[f64])> {
        self.accepted.then_some((&self.a, &self.b))
    }
}

fn degenerate(msg: impl Into<String>) -> LiftError {
    LiftError::DegenerateSamples(msg.into())
}

/// Least squares `X C ≈ Y`, refusing rank-deficient designs.
fn least_squares(x: DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>, LiftError> {
    let svd = x.svd(true, true);
    let (hi, lo) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    if !(hi > 0.0) || lo / hi < 1e-10 {
        return Err(degenerate("sample points are not in general position"));
    }
    svd.solve(y, 0.0).map_err(degenerate)
}

/// Fits `F(r) ≈ Ar + b` and accepts iff the residual and the second
/// derivative are both below tolerance.
pub fn reconstruct_affine(f: &SampledMap, tol: FitTolerances, w: &AlphaWitness) -> Result<AffineFit, LiftError> {
    let n = f.dim();
    let needed = (n + 1) * (n + 2) / 2;
    if f.len() < needed {
        return Err(degenerate(format!("{} samples, {needed} needed in dimension {n}", f.len())));
    }
    let (points, values) = f.numeric_samples(w);
    let m = points.len();
    let x = DMatrix::from_fn(m, n + 1, |i, j| if j < n { points[i][j] } else { 1.0 });
    let y = DMatrix::from_fn(m, n, |i, j| values[i][j]);
    let c = least_squares(x, &y)?;
    let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| c[(j, i)]).collect()).collect();
    let b: Vec<f64> = (0..n).map(|i| c[(n, i)]).collect();
    let max_residual = points
        .iter()
        .zip(&values)
        .flat_map(|(p, v)| {
            (0..n).map(|i| (v[i] - b[i] - (0..n).map(|j| a[i][j] * p[j]).sum::<f64>()).abs()).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);
    let (second_derivative, method) = match f.evaluator() {
        Some(eval) => (finite_difference_hessian(&points, |p| eval(p)), CurvatureMethod::FiniteDifference),
        None => (quadratic_hessian(&points, &values)?, CurvatureMethod::QuadraticFit),
    };
    let accepted = max_residual < tol.residual && second_derivative < tol.second_derivative;
    Ok(AffineFit { samples: m, a, b, max_residual, second_derivative, method, tolerances: tol, accepted })
}

/// Largest `|∂ᵢ∂ⱼ F_k|` from central differences with step [`FD_STEP`] at the
/// snapped sample points.
pub(crate) fn finite_difference_hessian(points: &[Vec<f64>], eval: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let h = FD_STEP;
    let mut worst = 0.0f64;
    for p in points {
        let x: Vec<f64> = p.iter().map(|v| (v / h).round() * h).collect();
        let at = |di: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(i, s) in di {
                y[i] += s * h;
            }
            eval(&y)
        };
        let fx = eval(&x);
        let n = x.len();
        for i in 0..n {
            let (fp, fm) = (at(&[(i, 1.0)]), at(&[(i, -1.0)]));
            for k in 0..fx.len() {
                worst = worst.max(((fp[k] - 2.0 * fx[k] + fm[k]) / (h * h)).abs());
            }
            for j in i + 1..n {
                let pp = at(&[(i, 1.0), (j, 1.0)]);
                let pm = at(&[(i, 1.0), (j, -1.0)]);
                let mp = at(&[(i, -1.0), (j, 1.0)]);
                let mm = at(&[(i, -1.0), (j, -1.0)]);
                for k in 0..fx.len() {
                    worst = worst.max(((pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h)).abs());
                }
            }
        }
    }
    worst
}

/// Largest Hessian entry of the least-squares quadratic through the samples.
fn quadratic_hessian(points: &[Vec<f64>], values: &[Vec<f64>]) -> Result<f64, LiftError> {
    let n = points[0].len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let cols = 1 + n + pairs.len();
    let x = DMatrix::from_fn(points.len(), cols, |r, c| {
        let p = &points[r];
        match c {
            0 => 1.0,
            c if c <= n => p[c - 1],
            c => {
                let (i, j) = pairs[c - 1 - n];
                p[i] * p[j]
            }
        }
    });
    let y = DMatrix::from_fn(values.len(), n, |r, k| values[r][k]);
    let c = least_squares(x, &y)?;
    let mut worst = 0.0f64;
    for (q, &(i, j)) in pairs.iter().enumerate() {
        let factor = if i == j { 2.0 } else { 1.0 };
        for k in 0..n {
            worst = worst.max((factor * c[(1 + n + q, k)]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lifting::{detect_pieces, stitched_numeric};
    use crate::numbers::{AffineElement, GroupPresentation};

    fn line(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![-1.0 + 2.0 * i as f64 / (n - 1) as f64]).collect()
    }

    #[test]
    fn affine_map_is_recovered() {
        let f = SampledMap::from_fn(vec![0.0], 1.0, line(50), Arc::new(|x: &[f64]| vec![3.0 * x[0] - 1.0])).unwrap();
        let fit = reconstruct_affine(&f, FitTolerances::default(), &AlphaWitness::golden()).unwrap();
        assert!(fit.accepted, "{fit:?}");
        assert!((fit.a[0][0] - 3.0).abs() < 1e-12 && (fit.b[0] + 1.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        assert!(fit.second_derivative < 1e-8);
    }

    #[test]
    fn square_is_rejected() {
        let f = SampledMap::from_fn(vec![0.0], 1.0, line(50), Arc::new(|x: &[f64]| vec![x[0] * x[0]])).unwrap();
        let fit = reconstruct_affine(&f, FitTolerances::default(), &AlphaWitness::golden()).unwrap();
        assert!(fit.affine().is_none());
        assert!((fit.second_derivative - 2.0).abs() < 1e-6);
    }

    #[test]
    fn too_few_or_collinear_samples() {
        let w = AlphaWitness::golden();
        let f = SampledMap::numeric(vec![0.0], 1.0, vec![vec![0.0], vec![0.5]], vec![vec![0.0], vec![0.5]]).unwrap();
        assert!(reconstruct_affine(&f, FitTolerances::default(), &w).unwrap_err().to_string().starts_with("degenerate"));
        let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * 0.1, i as f64 * 0.1]).collect();
        let vals = pts.clone();
        let f = SampledMap::numeric(vec![0.0, 0.0], 2.0, pts, vals).unwrap();
        assert!(matches!(reconstruct_affine(&f, FitTolerances::default(), &w), Err(LiftError::DegenerateSamples(_))));
    }

    #[test]
    fn planar_map_with_quadratic_fallback() {
        let pts: Vec<Vec<f64>> =
            (0..30).map(|i| vec![(i as f64 * 0.37).sin() * 0.7, (i as f64 * 0.91).cos() * 0.7]).collect();
        let vals = pts.iter().map(|p| vec![2.0 * p[0] - p[1] + 0.5, p[0] + 3.0 * p[1]]).collect();
        let f = SampledMap::numeric(vec![0.0, 0.0], 1.0, pts, vals).unwrap();
        let fit = reconstruct_affine(&f, FitTolerances::default(), &AlphaWitness::golden()).unwrap();
        assert!(fit.accepted, "{fit:?}");
        assert_eq!(fit.method, CurvatureMethod::QuadraticFit);
        assert!((fit.a[0][1] + 1.0).abs() < 1e-9 && (fit.a[1][1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejection_is_monotone_in_tolerance() {
        let f = SampledMap::from_fn(vec![0.0], 1.0, line(40), Arc::new(|x: &[f64]| vec![x[0] + 1e-7 * x[0] * x[0]]))
            .unwrap();
        let w = AlphaWitness::golden();
        let mut seen_accept = false;
        for t in [1e-12, 1e-9, 1e-7, 1e-6, 1e-3] {
            let fit = reconstruct_affine(&f, FitTolerances { residual: t, second_derivative: t }, &w).unwrap();
            assert!(!seen_accept || fit.accepted);
            seen_accept |= fit.accepted;
        }
        assert!(seen_accept);
    }

    #[test]
    fn stitched_map_needs_pieces() {
        let w = AlphaWitness::golden();
        let pieces = [AffineElement::translate1("1".parse().unwrap()), AffineElement::translate1("α".parse().unwrap())];
        let f = stitched_numeric(&pieces, -1.0, 1.0, 200, 2, &w).unwrap();
        assert!(!reconstruct_affine(&f, FitTolerances::default(), &w).unwrap().accepted);
        let report = detect_pieces(&f, &GroupPresentation::z_plus_alpha_z(), 2, 1e-9, &w).unwrap();
        assert_eq!(report.pieces.len(), 2);
        for p in &report.pieces {
            let shift = w.eval(&p.gamma.translation_part()[0]);
            let fit = reconstruct_affine(&f.restrict(&p.samples), FitTolerances::default(), &w).unwrap();
            assert!(fit.accepted, "{fit:?}");
            assert!((fit.a[0][0] - 1.0).abs() < 1e-6 && (fit.b[0] - shift).abs() < 1e-6);
        }
    }
}
