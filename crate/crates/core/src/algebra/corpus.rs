//! Random elements and the *-algebra axiom suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Algebra, AlgebraElement, AlgebraError, Coeff, PiecewisePoly, TrigPoly};
use crate::numbers::{rational, AffineElement, QAlpha};

/// Largest support size drawn.
pub const MAX_SUPPORT: usize = 5;
/// Largest coefficient degree drawn (polynomial degree or Fourier mode).
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    /// `ℝ ⋊ ℚ` with piecewise polynomials.
    RationalLine,
    /// ℝ/ℤ by rational rotations, trigonometric polynomials.
    RationalCircle,
    /// ℝ/ℤ by `ℤ + αℤ`.
    AlphaCircle,
}

impl CorpusKind {
    pub const ALL: [CorpusKind; 3] = [CorpusKind::RationalLine, CorpusKind::RationalCircle, CorpusKind::AlphaCircle];

    pub fn algebra(self) -> Algebra {
        match self {
            CorpusKind::RationalLine => Algebra::rational_line(),
            CorpusKind::RationalCircle => Algebra::rational_circle(),
            CorpusKind::AlphaCircle => Algebra::alpha_circle(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CorpusKind::RationalLine => "rational-line",
            CorpusKind::RationalCircle => "rational-circle",
            CorpusKind::AlphaCircle => "alpha-circle",
        }
    }
}

fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn key(kind: CorpusKind, rng: &mut ChaCha8Rng) -> QAlpha {
    match kind {
        CorpusKind::RationalLine => {
            let q = rng.gen_range(1..=4);
            QAlpha::from_rational(rational(rng.gen_range(-q..=q), q))
        }
        CorpusKind::RationalCircle => {
            let q = rng.gen_range(1..=6);
            QAlpha::from_rational(rational(rng.gen_range(0..q), q))
        }
        CorpusKind::AlphaCircle => QAlpha::lattice(0, rng.gen_range(-3..=3)),
    }
}

/// Continuous piecewise polynomial with 1–3 pieces of width ≤ 1/2 starting
/// at a multiple of 1/8 (shifted by α/8 half the time).
fn random_piecewise(alg: &Algebra, rng: &mut ChaCha8Rng) -> Result<PiecewisePoly, AlgebraError> {
    let w = alg.witness();
    let shift = if rng.gen_bool(0.5) { QAlpha::new(rational(0, 1), rational(1, 8)) } else { QAlpha::zero() };
    let mut at = &QAlpha::from_rational(rational(rng.gen_range(-8..=8), 8)) + &shift;
    let mut breakpoints = vec![at.clone()];
    let mut pieces: Vec<Vec<Complex64>> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let len = QAlpha::from_rational(rational(rng.gen_range(1..=4), 8));
        let degree = rng.gen_range(0..=MAX_DEGREE);
        let mut p: Vec<Complex64> = (0..=degree).map(|_| complex(rng)).collect();
        if let Some(prev) = pieces.last() {
            let h = w.eval(&(&at - &breakpoints[breakpoints.len() - 2]));
            p[0] = super::poly::eval(prev, h);
        }
        pieces.push(p);
        at = &at + &len;
        breakpoints.push(at.clone());
    }
    PiecewisePoly::new(breakpoints, pieces, w)
}

fn random_trig(rng: &mut ChaCha8Rng) -> TrigPoly {
    let d = MAX_DEGREE as i64;
    TrigPoly::from_modes((0..rng.gen_range(1..=4)).map(|_| (rng.gen_range(-d..=d), complex(rng))))
}

fn random_coeff(kind: CorpusKind, alg: &Algebra, rng: &mut ChaCha8Rng) -> Result<Coeff, AlgebraError> {
    Ok(match kind {
        CorpusKind::RationalLine => Coeff::Poly(random_piecewise(alg, rng)?),
        _ => Coeff::Trig(random_trig(rng)),
    })
}

/// Random element with 1–5 support points and coefficient degree ≤ 8.
pub fn random_element(kind: CorpusKind, rng: &mut ChaCha8Rng) -> Result<AlgebraElement, AlgebraError> {
    let alg = kind.algebra();
    random_in(kind, &alg, rng)
}

fn random_in(kind: CorpusKind, alg: &Algebra, rng: &mut ChaCha8Rng) -> Result<AlgebraElement, AlgebraError> {
    let n = rng.gen_range(1..=MAX_SUPPORT);
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        entries.push((AffineElement::translate1(key(kind, rng)), random_coeff(kind, alg, rng)?));
    }
    alg.element(entries)
}

/// Random element of the rational circle algebra supported in `U_p`.
pub fn random_up_element(alg: &Algebra, p: u32, rng: &mut ChaCha8Rng) -> Result<AlgebraElement, AlgebraError> {
    let n = rng.gen_range(1..=(p as usize).min(MAX_SUPPORT));
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.gen_range(0..p as i64);
        let t = QAlpha::from_rational(rational(k, p as i64));
        entries.push((AffineElement::translate1(t), Coeff::Trig(random_trig(rng))));
    }
    alg.element(entries)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    /// Trial indices that failed (at most ten are kept).
    pub failing_trials: Vec<usize>,
}

impl CheckResult {
    fn new(name: &str, tol: f64) -> Self {
        Self { name: name.into(), trials: 0, worst: 0.0, tol, passed: true, failing_trials: Vec::new() }
    }

    fn record(&mut self, trial: usize, err: f64) {
        self.trials += 1;
        if err.is_nan() || err > self.worst {
            self.worst = if err.is_nan() { f64::INFINITY } else { err };
        }
        if !(err <= self.tol) {
            self.passed = false;
            if self.failing_trials.len() < 10 {
                self.failing_trials.push(trial);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub corpus: CorpusKind,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Tolerance of the closed-form versus general comparison.
pub const CLOSED_FORM_TOL: f64 = 1e-12;
/// Tolerance of the *-algebra axioms.
pub const AXIOM_TOL: f64 = 1e-9;

/// Runs the closed-form comparison and the *-algebra axioms on `trials`
/// random triples `(f, g, h)` and a random scalar λ.
pub fn axiom_suite(kind: CorpusKind, trials: usize, seed: u64) -> Result<AxiomReport, AlgebraError> {
    let alg = kind.algebra();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut closed = CheckResult::new("closed-form = general", CLOSED_FORM_TOL);
    let mut assoc = CheckResult::new("associativity", AXIOM_TOL);
    let mut anti = CheckResult::new("(f*g)* = g* * f*", AXIOM_TOL);
    let mut invol = CheckResult::new("(f*)* = f", AXIOM_TOL);
    let mut bilin = CheckResult::new("bilinearity", AXIOM_TOL);
    let mut conj = CheckResult::new("(λf)* = conj(λ) f*", AXIOM_TOL);
    for t in 0..trials {
        let f = random_in(kind, &alg, &mut rng)?;
        let g = random_in(kind, &alg, &mut rng)?;
        let h = random_in(kind, &alg, &mut rng)?;
        let lambda = complex(&mut rng);

        let fg = alg.convolve_general(&f, &g)?;
        let fg_closed = alg.convolve_closed_form(&f, &g)?;
        let err = if fg.keys() == fg_closed.keys() { alg.distance(&fg, &fg_closed)? } else { f64::INFINITY };
        closed.record(t, err);

        let left = alg.convolve_closed_form(&fg, &h)?;
        let right = alg.convolve_closed_form(&f, &alg.convolve_closed_form(&g, &h)?)?;
        assoc.record(t, alg.distance(&left, &right)?);

        let (fs, gs) = (alg.involute(&f)?, alg.involute(&g)?);
        anti.record(t, alg.distance(&alg.involute(&fg)?, &alg.convolve_closed_form(&gs, &fs)?)?);

        invol.record(t, alg.distance(&alg.involute(&fs)?, &f)?);

        let mixed = alg.convolve_closed_form(&f, &alg.add(&g, &alg.scale(&h, lambda))?)?;
        let split = alg.add(&fg, &alg.scale(&alg.convolve_closed_form(&f, &h)?, lambda))?;
        let mixed_left = alg.convolve_closed_form(&alg.add(&f, &alg.scale(&h, lambda))?, &g)?;
        let split_left = alg.add(&fg, &alg.scale(&alg.convolve_closed_form(&h, &g)?, lambda))?;
        bilin.record(t, alg.distance(&mixed, &split)?.max(alg.distance(&mixed_left, &split_left)?));

        conj.record(t, alg.distance(&alg.involute(&alg.scale(&f, lambda))?, &alg.scale(&fs, lambda.conj()))?);
    }
    Ok(AxiomReport {
        corpus: kind,
        trials,
        seed,
        checks: vec![closed, assoc, anti, invol, bilin, conj],
    })
}
