use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use quasifold_core::algebra::{
    axiom_suite, determine_order, matrix_representation, random_up_element, rotation_relation, star, Algebra,
    AlgebraElement, ComplexMatrix, CorpusKind, MultiplicationOrder, LOCKED_ORDER,
};
use quasifold_core::atlas::PointEquality;
use quasifold_core::groupoid::NebulaPoint;
use quasifold_core::lifting::{
    detect_pieces, fiber_pairs, lift_diffeo, lift_is_compatible, nonliftable_demo, random_point, reconstruct_affine,
    stitched_exact, stitched_numeric, FitTolerances, LiftError, SampledMap,
};
use quasifold_core::mrw::{check_axioms, functor_check, BiAtlas};
use quasifold_core::numbers::{parse_rational, AffineElement, AlphaWitness, Membership, QAlpha, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::Config;
use crate::inputs;
use crate::report::{Check, Report, Status, Table};
use crate::CliError;

/// Arrows checked for ev-absorption in `groupoid`.
const ABSORPTION_SAMPLE: usize = 200;

fn status_of(eq: &PointEquality) -> Status {
    match eq {
        PointEquality::Equal(_) => Status::Pass,
        PointEquality::Inconclusive => Status::Inconclusive,
        PointEquality::NotEqual => Status::Fail,
    }
}

#[derive(Debug, Args)]
pub struct GroupoidArgs {
    /// `t-alpha`, `rationals`, `reflection`, or an atlas JSON file.
    #[arg(long, default_value = "t-alpha")]
    pub atlas: String,
    /// Chart of the point; the first chart when omitted.
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub point: String,
}

pub fn groupoid(a: &GroupoidArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    let g = inputs::groupoid(&a.atlas, cfg)?;
    let chart = a.chart.clone().unwrap_or_else(|| g.atlas().charts()[0].id.to_string());
    let x = g.evaluate(&inputs::point(&chart, &a.point)?)?;
    let bound = cfg.bounds.group;
    let report = g.isotropy_and_assembly(&x, bound)?;

    let arrows: Vec<_> = report.blocks.iter().flat_map(|b| &b.arrows).chain(&report.isotropy).collect();
    let mut worst = Status::Pass;
    let mut counterexample = None;
    let checked = arrows.len().min(ABSORPTION_SAMPLE);
    for arrow in arrows.iter().take(checked) {
        let s = status_of(&g.is_ev_absorbed(arrow, bound)?);
        if s > worst {
            worst = s;
            counterexample = Some(arrow.pretty());
        }
    }
    out.push(
        Check::new("arrows are ev-absorbed", worst)
            .detail(format!("{checked} of {} arrows", arrows.len()))
            .counterexample(counterexample),
    );
    let entries_ok = report.blocks.iter().try_fold(Status::Pass, |acc, b| {
        Ok::<_, CliError>(acc.max(status_of(&g.compare(&x, &g.evaluate(&b.entry)?, bound)?)))
    })?;
    out.push(Check::new("chart entries lie over the point", entries_ok).detail(format!("{} charts", report.blocks.len())));

    out.table = Some(Table {
        headers: ["chart", "entry", "objects", "arrows"].map(String::from).to_vec(),
        rows: report
            .blocks
            .iter()
            .map(|b| vec![b.chart.to_string(), b.entry.pretty(), b.objects.len().to_string(), b.arrows.len().to_string()])
            .collect(),
    });
    out.set_data(&report)
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Corpus {
    RationalLine,
    RationalCircle,
    AlphaCircle,
    All,
}

impl Corpus {
    fn kinds(self) -> Vec<CorpusKind> {
        match self {
            Corpus::RationalLine => vec![CorpusKind::RationalLine],
            Corpus::RationalCircle => vec![CorpusKind::RationalCircle],
            Corpus::AlphaCircle => vec![CorpusKind::AlphaCircle],
            Corpus::All => CorpusKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum AlgebraCommand {
    /// Closed form against the general product, and the *-algebra axioms.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        corpus: Corpus,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

fn axiom_checks(kinds: &[CorpusKind], trials: usize, cfg: &Config, out: &mut Report) -> Result<Vec<serde_json::Value>, CliError> {
    let mut data = Vec::new();
    for &kind in kinds {
        let r = axiom_suite(kind, trials, cfg.seed)?;
        for c in &r.checks {
            let tol = cfg.tol_or(c.tol);
            let mut check = Check::new(format!("{}: {}", kind.name(), c.name), Status::of(c.worst <= tol));
            check.value = Some(c.worst);
            check.tol = Some(tol);
            out.push(check.detail(format!("{} trials", c.trials)).counterexample(
                (!c.failing_trials.is_empty()).then(|| json!({ "failing_trials": c.failing_trials })),
            ));
        }
        data.push(serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?);
    }
    Ok(data)
}

pub fn algebra(a: &AlgebraCommand, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    let AlgebraCommand::Check { corpus, trials } = a;
    if *trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let data = axiom_checks(&corpus.kinds(), *trials, cfg, out)?;
    out.set_data(data)
}

#[derive(Debug, Args)]
pub struct RotationArgs {
    /// Rotation amount of V, in ℚ + ℚα.
    #[arg(long, default_value = "α", allow_hyphen_values = true)]
    pub theta: String,
    /// Top Fourier mode of the probe coefficients.
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    /// Composable pairs for the functor check; 0 skips it.
    #[arg(long, default_value_t = 500)]
    pub functor_pairs: usize,
}

pub fn rotation(a: &RotationArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    let theta: QAlpha = a.theta.parse().map_err(|e| CliError::Usage(format!("--theta: {e}")))?;
    let tol = cfg.tol_or(cfg.tolerances.phase);
    let r = rotation_relation(&theta, a.degree, &cfg.witness()?)?;
    out.push(Check::below("λ = exp(-2πiθ)", r.error, tol));
    out.push(Check::below("mirrored λ = exp(2πiθ)", r.mirrored_error, tol));
    out.push(Check::below("every mode", r.max_error, tol).detail(format!("{} modes", r.modes.len())));
    if let Some(e) = r.root_of_unity_error {
        out.push(Check::below("λ^q = 1", e, tol));
    }
    let functor = if a.functor_pairs > 0 {
        let f = functor_check(a.functor_pairs, cfg.seed)?;
        out.push(
            Check::new("Φ is a functor", Status::of(f.passed()))
                .detail(format!("{} pairs", f.pairs))
                .counterexample(&f.counterexample),
        );
        Some(f)
    } else {
        None
    };
    out.set_data(json!({ "rotation": r, "functor": functor }))
}

#[derive(Debug, Args)]
pub struct ReprArgs {
    /// Size of U_p = {0, 1/p, …, (p−1)/p}.
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    /// Evaluation point, in turns.
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub z: f64,
    /// Element JSON; a random U_p-supported element when omitted.
    #[arg(long)]
    pub element: Option<PathBuf>,
    /// Random pairs used to settle the multiplication order.
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
}

fn matrix_json(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn repr(a: &ReprArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    if a.p == 0 {
        return Err(CliError::Usage("--p must be positive".into()));
    }
    let tol = cfg.tol_or(cfg.tolerances.coefficient);
    let alg = Algebra::rational_circle();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f = match &a.element {
        Some(path) => alg.adopt(inputs::read_json::<AlgebraElement>(path)?)?,
        None => random_up_element(&alg, a.p, &mut rng)?,
    };
    let g = random_up_element(&alg, a.p, &mut rng)?;
    let m = matrix_representation(&alg, &f, a.p, a.z)?;
    let (mg, mfg) = (matrix_representation(&alg, &g, a.p, a.z)?, matrix_representation(&alg, &star(&alg, &f, &g)?, a.p, a.z)?);
    let err = (&mfg - &m * &mg).iter().map(|c: &Complex64| c.norm()).fold(0.0, f64::max);
    out.push(Check::below("M(f★g) = M(f)M(g)", err, tol));

    let evidence = determine_order(a.p, a.pairs, 4, cfg.seed, tol)?;
    let order_status = match evidence.order {
        Some(o) if o == LOCKED_ORDER => Status::Pass,
        Some(_) => Status::Fail,
        // p = 1 is commutative, so both orders hold.
        None if evidence.direct_error < tol && evidence.reversed_error < tol => Status::Pass,
        None => Status::Fail,
    };
    out.push(
        Check::new("multiplication order", order_status)
            .detail(format!("direct {:.2e}, reversed {:.2e}", evidence.direct_error, evidence.reversed_error)),
    );
    out.set_data(json!({ "p": a.p, "z": a.z, "element": f, "matrix": matrix_json(&m), "order": evidence }))
}

#[derive(Debug, Args)]
pub struct RqArgs {
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,6")]
    pub p: Vec<u32>,
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
}

pub fn rq_algebra(a: &RqArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    if a.trials == 0 || a.p.contains(&0) {
        return Err(CliError::Usage("--trials and every --p must be positive".into()));
    }
    let axioms = axiom_checks(&[CorpusKind::RationalLine, CorpusKind::RationalCircle], a.trials, cfg, out)?;
    let tol = cfg.tol_or(cfg.tolerances.coefficient);
    let alg = Algebra::rational_circle();
    let mut orders = Vec::new();
    let mut rows = Vec::new();
    for &p in &a.p {
        let e = determine_order(p, a.pairs, 4, cfg.seed, tol)?;
        let locked = match LOCKED_ORDER {
            MultiplicationOrder::Direct => e.direct_error,
            MultiplicationOrder::Reversed => e.reversed_error,
        };
        out.push(Check::below(format!("p={p}: M is multiplicative for ★"), locked, tol));
        rows.push(vec![p.to_string(), format!("{:.2e}", e.direct_error), format!("{:.2e}", e.reversed_error)]);
        orders.push(e);
    }
    // M(U) for the unit rotation by 1/p, a permutation-times-phase matrix.
    let witness: Vec<_> = a
        .p
        .iter()
        .map(|&p| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ u64::from(p));
            let f = random_up_element(&alg, p, &mut rng)?;
            Ok::<_, CliError>(json!({ "p": p, "element": f, "matrix": matrix_json(&matrix_representation(&alg, &f, p, 0.25)?) }))
        })
        .collect::<Result<_, _>>()?;
    out.table = Some(Table { headers: ["p", "direct", "reversed"].map(String::from).to_vec(), rows });
    out.set_data(json!({ "axioms": axioms, "orders": orders, "matrices": witness }))
}

#[derive(Debug, Args)]
pub struct MoritaArgs {
    /// `two-scale`, `duplicated`, `identity`, or a bi-atlas JSON file.
    #[arg(long, default_value = "two-scale")]
    pub biatlas: String,
    #[arg(long)]
    pub word_length: Option<u32>,
}

pub fn morita(a: &MoritaArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    let bi = inputs::biatlas(&a.biatlas)?;
    let wl = a.word_length.unwrap_or(cfg.bounds.word_length);
    if wl == 0 {
        return Err(CliError::Usage("--word-length must be positive".into()));
    }
    let r = check_axioms(&bi, wl, cfg.bounds.fiber)?;
    for c in &r.checks {
        let status = match (c.passed, c.instances) {
            (false, _) => Status::Fail,
            (true, 0) => Status::Inconclusive,
            (true, _) => Status::Pass,
        };
        out.push(Check::new(&c.name, status).detail(format!("{} instances", c.instances)).counterexample(&c.counterexample));
    }
    out.set_data(&r)
}

#[derive(Debug, Subcommand)]
pub enum LiftCommand {
    /// Split a sampled map into pieces γ·x with γ in a group.
    Detect(DetectArgs),
    /// Least-squares affine fit with a curvature check.
    Fit(FitArgs),
    /// Lift r ↦ r' through a bi-atlas and check compatibility.
    Construct(ConstructArgs),
    /// The flip z ↦ z̄ on the flat-bump quasifold, checked annulus by annulus.
    Flipdemo(FlipArgs),
}

pub fn lift(a: &LiftCommand, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    match a {
        LiftCommand::Detect(a) => detect(a, cfg, out),
        LiftCommand::Fit(a) => fit(a, cfg, out),
        LiftCommand::Construct(a) => construct(a, cfg, out),
        LiftCommand::Flipdemo(a) => flipdemo(a, cfg, out),
    }
}

#[derive(Debug, Args)]
pub struct StitchArgs {
    /// Translations of the pieces, left to right, separated by `;`.
    #[arg(long, default_value = "1;α", allow_hyphen_values = true)]
    pub stitch: String,
    #[arg(long, default_value = "-2", allow_hyphen_values = true)]
    pub lo: String,
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    pub hi: String,
    #[arg(long, default_value_t = 120)]
    pub samples: usize,
}

impl StitchArgs {
    fn pieces(&self) -> Result<Vec<AffineElement>, CliError> {
        self.stitch.split(';').map(inputs::translation).collect()
    }

    fn range(&self) -> Result<(Rational, Rational), CliError> {
        let p = |s: &str| parse_rational(s).map_err(|e| CliError::Usage(format!("interval end `{s}`: {e}")));
        Ok((p(&self.lo)?, p(&self.hi)?))
    }
}

fn to_f64(r: &Rational, w: &AlphaWitness) -> f64 {
    w.eval(&QAlpha::from_rational(r.clone()))
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub stitch: StitchArgs,
    /// `lattice` (ℤ + αℤ) or `rationals`.
    #[arg(long, default_value = "lattice")]
    pub group: String,
    /// Use floating-point samples instead of exact ones.
    #[arg(long)]
    pub numeric: bool,
    /// Uniform noise added to numeric values (implies --numeric).
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

pub fn detect(a: &DetectArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    let w = cfg.witness()?;
    let pieces = a.stitch.pieces()?;
    let (lo, hi) = a.stitch.range()?;
    let group = inputs::group(&a.group)?;
    let numeric = a.numeric || a.noise > 0.0;
    let map = if numeric {
        let m = stitched_numeric(&pieces, to_f64(&lo, &w), to_f64(&hi, &w), a.stitch.samples, cfg.seed, &w)?;
        if a.noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
            let (points, values) = m.numeric_samples(&w);
            let noisy = values.into_iter().map(|v| v.into_iter().map(|y| y + rng.gen_range(-a.noise..=a.noise)).collect()).collect();
            SampledMap::numeric(m.center().to_vec(), m.radius(), points, noisy)?
        } else {
            m
        }
    } else {
        stitched_exact(&pieces, &lo, &hi, a.stitch.samples, cfg.seed, &w)?
    };
    let tol = if numeric { cfg.tol_or(cfg.tolerances.coefficient) } else { 0.0 };
    let r = detect_pieces(&map, &group, cfg.bounds.fiber, tol, &w)?;

    let coverage = if r.unmatched.is_empty() { Status::Pass } else { Status::Inconclusive };
    out.push(
        Check::new("every sample matches a group element", coverage)
            .detail(format!("coverage {:.3}, {} unmatched at bound {}", r.coverage, r.unmatched.len(), r.bound))
            .counterexample(r.unmatched.first().map(|i| json!({ "sample": i }))),
    );
    let found: Vec<_> = r.pieces.iter().map(|p| p.gamma.clone()).collect();
    let expected: Vec<_> = pieces.iter().filter(|g| group.contains(g, cfg.bounds.fiber) == Membership::Member).cloned().collect();
    let mut check = Check::new("recovered pieces", Status::of(found.iter().all(|g| pieces.contains(g))))
        .detail(format!("{} found, {} expected", found.len(), expected.len()));
    if numeric {
        check.value = Some(r.max_residual);
        check.tol = Some(tol);
    }
    out.push(check);

    out.table = Some(Table {
        headers: ["piece", "gamma", "samples"].map(String::from).to_vec(),
        rows: r.pieces.iter().enumerate().map(|(i, p)| vec![i.to_string(), p.gamma.pretty(), p.samples.len().to_string()]).collect(),
    });
    out.set_data(&r)
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Fit x ↦ A·x + B, given as `A,B`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["square", "stitch"])]
    pub affine: Option<String>,
    /// Fit x ↦ x² (expected to be rejected).
    #[arg(long, conflicts_with = "stitch")]
    pub square: bool,
    /// Translations of stitched pieces; each detected piece is fitted alone.
    #[arg(long, allow_hyphen_values = true)]
    pub stitch: Option<String>,
    #[arg(long, default_value = "lattice")]
    pub group: String,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
}

pub fn fit(a: &FitArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    if !(a.lo < a.hi) {
        return Err(CliError::Usage("--lo must be below --hi".into()));
    }
    let w = cfg.witness()?;
    let tol = FitTolerances {
        residual: cfg.tol_or(cfg.tolerances.residual),
        second_derivative: cfg.tolerances.second_derivative,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Vec<f64>> = (0..a.samples).map(|_| vec![rng.gen_range(a.lo..=a.hi)]).collect();
    let (center, radius) = (vec![(a.lo + a.hi) / 2.0], (a.hi - a.lo) / 2.0);

    let maps: Vec<(String, SampledMap)> = if let Some(text) = &a.stitch {
        let pieces: Vec<_> = text.split(';').map(inputs::translation).collect::<Result<_, _>>()?;
        let map = stitched_numeric(&pieces, a.lo, a.hi, a.samples, cfg.seed, &w)?;
        let group = inputs::group(&a.group)?;
        let r = detect_pieces(&map, &group, cfg.bounds.fiber, cfg.tol_or(cfg.tolerances.coefficient), &w)?;
        if !r.unmatched.is_empty() {
            out.push(Check::new("pieces detected", Status::Inconclusive).detail(format!("{} unmatched", r.unmatched.len())));
        }
        r.pieces.iter().map(|p| (p.gamma.pretty(), map.restrict(&p.samples))).collect()
    } else if a.square {
        let map = SampledMap::from_fn(center, radius, points, std::sync::Arc::new(|x: &[f64]| vec![x[0] * x[0]]))?;
        vec![("x²".into(), map)]
    } else {
        let text = a.affine.as_deref().unwrap_or("1,0");
        let (sa, sb) = text.split_once(',').ok_or_else(|| CliError::Usage("--affine expects `A,B`".into()))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("--affine `{s}`: {e}")));
        let (ca, cb) = (num(sa)?, num(sb)?);
        let map = SampledMap::from_fn(center, radius, points, std::sync::Arc::new(move |x: &[f64]| vec![ca * x[0] + cb]))?;
        let sign = if cb < 0.0 { '-' } else { '+' };
        vec![(format!("{ca}·x {sign} {}", cb.abs()), map)]
    };

    let mut fits = Vec::new();
    let mut rows = Vec::new();
    for (label, map) in &maps {
        let f = reconstruct_affine(map, tol, &w)?;
        out.push(Check::below(format!("{label}: residual"), f.max_residual, tol.residual));
        out.push(Check::below(format!("{label}: second derivative"), f.second_derivative, tol.second_derivative));
        let (a0, b0) = (f.a[0][0], f.b[0]);
        rows.push(vec![label.clone(), format!("{a0:.12}"), format!("{b0:.12}"), if f.accepted { "affine" } else { "rejected" }.into()]);
        fits.push(json!({ "map": label, "fit": f }));
    }
    out.table = Some(Table { headers: ["map", "A", "b", "verdict"].map(String::from).to_vec(), rows });
    out.set_data(fits)
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// `two-scale`, `duplicated`, `identity`, or a bi-atlas JSON file.
    #[arg(long, default_value = "two-scale")]
    pub biatlas: String,
    /// Source point, as `chart:coords` or bare coords in the first seed's chart.
    #[arg(long, allow_hyphen_values = true, requires = "r_prime")]
    pub r: Option<String>,
    /// Target point, as `chart:coords` or bare coords in the first seed's target chart.
    #[arg(long, allow_hyphen_values = true, requires = "r")]
    pub r_prime: Option<String>,
    /// Random pairs over a common point (used when --r is absent).
    #[arg(long, default_value_t = 5, conflicts_with = "r")]
    pub random: usize,
    /// Points at which each lift is checked for compatibility.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
}

fn located(text: &str, default_chart: &str) -> Result<NebulaPoint, CliError> {
    match text.split_once(':') {
        Some((chart, coords)) => inputs::point(chart, coords),
        None => inputs::point(default_chart, text),
    }
}

fn pairs(a: &ConstructArgs, bi: &BiAtlas, cfg: &Config) -> Result<Vec<(NebulaPoint, NebulaPoint)>, CliError> {
    match (&a.r, &a.r_prime) {
        (Some(r), Some(r2)) => {
            let l = &bi.links()[0];
            Ok(vec![(located(r, l.src_chart.as_str())?, located(r2, l.dst_chart.as_str())?)])
        }
        _ => Ok(fiber_pairs(bi, a.random, cfg.seed)?),
    }
}

pub fn construct(a: &ConstructArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    let bi = inputs::biatlas(&a.biatlas)?;
    let bound = cfg.bounds.fiber;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lifts = Vec::new();
    for (i, (r, r2)) in pairs(a, &bi, cfg)?.into_iter().enumerate() {
        let name = format!("lift {i}: {} ↦ {}", r.pretty(), r2.pretty());
        match lift_diffeo(&bi, &r, &r2, bound) {
            Ok(lift) => {
                let hits = lift.lift.apply(&r.coords)? == r2.coords;
                out.push(Check::new(format!("{name}: sends r to r'"), Status::of(hits)).detail(lift.lift.pretty()));
                let dim = r.coords.len();
                let points: Vec<_> = (0..a.points).map(|_| random_point(&mut rng, dim)).collect();
                let c = lift_is_compatible(&bi, &lift, &points, bound)?;
                let status = if !c.passed() {
                    Status::Fail
                } else if c.skipped == c.points {
                    Status::Inconclusive
                } else {
                    Status::Pass
                };
                out.push(
                    Check::new(format!("{name}: compatible"), status)
                        .detail(format!("{} points, {} outside the domains", c.points, c.skipped))
                        .counterexample(&c.counterexample),
                );
                lifts.push(json!({ "lift": lift, "compatibility": c }));
            }
            Err(e @ LiftError::FibersIncompatible(_)) => {
                out.push(Check::new(name, Status::Fail).detail(e.to_string()));
                lifts.push(json!({ "src": r, "dst": r2, "error": e.to_string() }));
            }
            Err(e @ LiftError::InconclusiveAtBound(_)) => {
                out.push(Check::new(name, Status::Inconclusive).detail(e.to_string()));
                lifts.push(json!({ "src": r, "dst": r2, "error": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.set_data(json!({ "bound": bound, "lifts": lifts }))
}

#[derive(Debug, Args)]
pub struct FlipArgs {
    /// Annuli 1..=n-max are checked.
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,
    /// Sample points per annulus.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

pub fn flipdemo(a: &FlipArgs, cfg: &Config, out: &mut Report) -> Result<(), CliError> {
    if a.n_max == 0 || a.samples == 0 {
        return Err(CliError::Usage("--n-max and --samples must be positive".into()));
    }
    let tol = cfg.tol_or(1e-10);
    let r = nonliftable_demo(a.n_max, a.samples, tol, cfg.seed);
    for c in &r.annuli {
        out.push(
            Check::below(format!("annulus {}: flip agrees with the {} lift", c.n, c.homomorphism), c.max_error, tol)
                .detail(format!("peak 10^{:.1}{}", c.peak_log10, if c.underflows { ", below f64 range" } else { "" })),
        );
    }
    out.push(Check::new("vanishes off the annuli", Status::of(r.vanishes_outside)));
    out.table = Some(Table {
        headers: ["n", "homomorphism", "max error", "peak log10"].map(String::from).to_vec(),
        rows: r
            .annuli
            .iter()
            .map(|c| vec![c.n.to_string(), c.homomorphism.into(), format!("{:.2e}", c.max_error), format!("{:.1}", c.peak_log10)])
            .collect(),
    });
    out.set_data(&r)
}
