//! Local liftings of maps between quasifolds.
//!
//! A lifting of the identity of `ℝⁿ/Γ` is locally a single group element;
//! [`detect_pieces`] finds the pieces `Δ_γ = {r : F(r) = γ·r}` on a sampled map
//! and [`reconstruct_affine`] fits one affine map with a second-derivative
//! test. [`lift_diffeo`] builds lifts with prescribed endpoints, and
//! [`nonliftable_demo`] evaluates a smooth map of `ℂ/Γ` with no equivariant
//! lift.

mod construct;
mod detect;
mod fit;
mod flip;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::mrw::MrwError;
use crate::numbers::{AlphaWitness, NumberError, QAlpha};

pub use construct::{
    fiber_pairs, identity_biatlas, lift_diffeo, lift_is_compatible, random_point, CompatibilityCheck, Lift,
};
pub use detect::{detect_pieces, stitched_exact, stitched_numeric, AffinePieceReport, MatchStatus, Piece, SampleMatch};
pub use fit::{reconstruct_affine, AffineFit, CurvatureMethod, FitTolerances, FD_STEP};
pub use flip::{flat_bump, flip_value, nonliftable_demo, AnnulusCheck, FlatValue, FlipReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("degenerate-sample-configuration: {0}")]
    DegenerateSamples(String),
    #[error("fibers-incompatible: {0}")]
    FibersIncompatible(String),
    #[error("inconclusive-at-bound: {0}")]
    InconclusiveAtBound(String),
    #[error("invalid-sampled-map: {0}")]
    InvalidMap(String),
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    Mrw(#[from] MrwError),
}

/// Evaluation callback used to refine a numeric map.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Sample points and values, all exact or all numeric.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Samples {
    Exact { points: Vec<Vec<QAlpha>>, values: Vec<Vec<QAlpha>> },
    Numeric { points: Vec<Vec<f64>>, values: Vec<Vec<f64>> },
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Exact { points, .. } => points.len(),
            Samples::Numeric { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Samples::Exact { .. })
    }
}

/// A map `F` on the ball `B(center, radius) ⊂ ℝⁿ`, known at finitely many points.
#[derive(Clone, Serialize)]
pub struct SampledMap {
    center: Vec<f64>,
    radius: f64,
    samples: Samples,
    #[serde(skip)]
    evaluator: Option<Evaluator>,
}

impl fmt::Debug for SampledMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledMap")
            .field("center", &self.center)
            .field("radius", &self.radius)
            .field("samples", &self.samples)
            .field("evaluator", &self.evaluator.is_some())
            .finish()
    }
}

fn norm_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl SampledMap {
    /// Exact samples; points must lie in the closed ball, checked through `w`.
    pub fn exact(
        center: Vec<f64>,
        radius: f64,
        points: Vec<Vec<QAlpha>>,
        values: Vec<Vec<QAlpha>>,
        w: &AlphaWitness,
    ) -> Result<Self, LiftError> {
        let numeric: Vec<Vec<f64>> = points.iter().map(|p| w.eval_vec(p)).collect();
        Self::check(&center, radius, &numeric, &values.iter().map(Vec::len).collect::<Vec<_>>())?;
        Ok(Self { center, radius, samples: Samples::Exact { points, values }, evaluator: None })
    }

    pub fn numeric(center: Vec<f64>, radius: f64, points: Vec<Vec<f64>>, values: Vec<Vec<f64>>) -> Result<Self, LiftError> {
        Self::check(&center, radius, &points, &values.iter().map(Vec::len).collect::<Vec<_>>())?;
        Ok(Self { center, radius, samples: Samples::Numeric { points, values }, evaluator: None })
    }

    /// Numeric samples of `f` at `points`, keeping `f` for refinement.
    pub fn from_fn(center: Vec<f64>, radius: f64, points: Vec<Vec<f64>>, f: Evaluator) -> Result<Self, LiftError> {
        let values = points.iter().map(|p| f(p)).collect();
        let mut m = Self::numeric(center, radius, points, values)?;
        m.evaluator = Some(f);
        Ok(m)
    }

    fn check(
        center: &[f64],
        radius: f64,
        points: &[Vec<f64>],
        value_dims: &[usize],
    ) -> Result<(), LiftError> {
        let n = center.len();
        if n == 0 || !(radius > 0.0) {
            return Err(LiftError::InvalidMap("the ball needs a positive radius and dimension".into()));
        }
        if points.len() != value_dims.len() {
            return Err(LiftError::InvalidMap("points and values differ in number".into()));
        }
        for (i, (p, d)) in points.iter().zip(value_dims.iter().copied()).enumerate() {
            if p.len() != n || d != n {
                return Err(NumberError::DimensionMismatch { expected: n, found: p.len().min(d) }.into());
            }
            if norm_dist(p, center) > radius * (1.0 + 1e-12) {
                return Err(LiftError::InvalidMap(format!("sample {i} lies outside the ball")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn evaluator(&self) -> Option<&Evaluator> {
        self.evaluator.as_ref()
    }

    /// Numeric points and values; exact samples are evaluated with `w`.
    pub fn numeric_samples(&self, w: &AlphaWitness) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        match &self.samples {
            Samples::Numeric { points, values } => (points.clone(), values.clone()),
            Samples::Exact { points, values } => (
                points.iter().map(|p| w.eval_vec(p)).collect(),
                values.iter().map(|v| w.eval_vec(v)).collect(),
            ),
        }
    }

    /// The samples at `indices`. The evaluator is dropped: it describes the
    /// whole map, and its stencils could reach across piece boundaries.
    pub fn restrict(&self, indices: &[usize]) -> SampledMap {
        let samples = match &self.samples {
            Samples::Exact { points, values } => Samples::Exact {
                points: indices.iter().map(|&i| points[i].clone()).collect(),
                values: indices.iter().map(|&i| values[i].clone()).collect(),
            },
            Samples::Numeric { points, values } => Samples::Numeric {
                points: indices.iter().map(|&i| points[i].clone()).collect(),
                values: indices.iter().map(|&i| values[i].clone()).collect(),
            },
        };
        SampledMap { center: self.center.clone(), radius: self.radius, samples, evaluator: None }
    }
}
