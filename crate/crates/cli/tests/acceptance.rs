//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! on any failure. Run with `cargo test -p quasifold-cli --test acceptance`.

use std::collections::HashSet;
use std::time::Instant;

use quasifold_core::algebra::{
    axiom_suite, determine_order, random_up_element, rotation_relation, star, Algebra, CorpusKind, MultiplicationOrder,
    LOCKED_ORDER,
};
use quasifold_core::atlas::{reflection_orbifold, t_alpha, PointEquality, StructureGroupoid};
use quasifold_core::groupoid::{Arrow, NebulaPoint};
use quasifold_core::lifting::{
    detect_pieces, fiber_pairs, identity_biatlas, lift_diffeo, lift_is_compatible, nonliftable_demo, random_point,
    reconstruct_affine, stitched_exact, stitched_numeric, FitTolerances,
};
use quasifold_core::mrw::{check_axioms, duplicated, functor_check, two_scale};
use quasifold_core::numbers::{rational, AffineElement, AlphaWitness, GroupPresentation, QAlpha};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn t(n: i64, m: i64) -> AffineElement {
    AffineElement::translate1(QAlpha::lattice(n, m))
}

fn ts(s: &str) -> AffineElement {
    AffineElement::translate1(s.parse().unwrap())
}

fn q(s: &str) -> QAlpha {
    s.parse().unwrap()
}

fn composition_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for i in 0..1000 {
        let x = QAlpha::new(
            rational(rng.gen_range(-99..=99), rng.gen_range(1..=30)),
            rational(rng.gen_range(-9..=9), rng.gen_range(1..=7)),
        );
        let (n, m) = (rng.gen_range(-50..=50), rng.gen_range(-50..=50));
        let (n2, m2) = (rng.gen_range(-50..=50), rng.gen_range(-50..=50));
        let a = Arrow::new(NebulaPoint::on("class", x.clone()), t(n, m), "class".into()).map_err(|e| e.to_string())?;
        let b = Arrow::new(NebulaPoint::on("class", &x + &QAlpha::lattice(n, m)), t(n2, m2), "class".into())
            .map_err(|e| e.to_string())?;
        let want = Arrow::new(NebulaPoint::on("class", x), t(n + n2, m + m2), "class".into()).map_err(|e| e.to_string())?;
        let got = a.compose(&b).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("instance {i}: {} != {}", got.pretty(), want.pretty()))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2} s"))?;
    Ok(format!("1000 instances in {:.0} ms", secs * 1e3))
}

fn example_set() -> Outcome {
    let mut sizes = Vec::new();
    for bound in 1..=3u32 {
        let (out, err, code) = quasifold_cli::run(["quasifold", "groupoid", "--atlas", "t-alpha", "--point", "0", "--bound", &bound.to_string()]);
        ensure(code == 0, || format!("bound {bound}: exit {code}: {err}"))?;
        let report: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let arrows: Vec<Arrow> =
            serde_json::from_value(report["data"]["blocks"][0]["arrows"].clone()).map_err(|e| e.to_string())?;
        let got: HashSet<Arrow> = arrows.into_iter().collect();
        let b = i64::from(bound);
        let mut brute = HashSet::new();
        for n in -b..=b {
            for m in -b..=b {
                for n2 in -b..=b {
                    for m2 in -b..=b {
                        brute.insert(Arrow::new(NebulaPoint::on("class", QAlpha::lattice(n, m)), t(n2, m2), "class".into()).unwrap());
                    }
                }
            }
        }
        ensure(got == brute, || format!("bound {bound}: {} arrows, brute force {}", got.len(), brute.len()))?;
        sizes.push(got.len().to_string());
    }
    Ok(format!("bounds 1..3: {} arrows, equal to brute force", sizes.join("/")))
}

fn convolution_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for kind in CorpusKind::ALL {
        let r = axiom_suite(kind, 200, 7).map_err(|e| e.to_string())?;
        let c = &r.checks[0];
        ensure(c.passed && c.trials == 200 && c.tol <= 1e-12, || format!("{}: {} worst {:e}", kind.name(), c.name, c.worst))?;
        worst = worst.max(c.worst);
    }
    Ok(format!("3 algebras × 200 trials, worst {worst:.1e} < 1e-12"))
}

fn star_axioms() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for kind in CorpusKind::ALL {
        let r = axiom_suite(kind, 200, 11).map_err(|e| e.to_string())?;
        for c in &r.checks[1..] {
            ensure(c.passed && c.tol <= 1e-9, || format!("{}: {} worst {:e}", kind.name(), c.name, c.worst))?;
            worst = worst.max(c.worst);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("worst {worst:.1e} < 1e-9 in {secs:.1} s"))
}

fn rotation() -> Outcome {
    let r = rotation_relation(&QAlpha::alpha(), 4, &AlphaWitness::golden()).map_err(|e| e.to_string())?;
    ensure(r.error < 1e-12 && r.max_error < 1e-12, || format!("|λ − e^(−2πiα)| = {:e}", r.max_error))?;
    ensure(r.mirrored_error < 1e-12, || format!("mirrored phase off by {:e}", r.mirrored_error))?;
    Ok(format!("|λ − e^(−2πiα)| = {:.1e}, mirrored {:.1e}", r.max_error, r.mirrored_error))
}

fn matrix_representation() -> Outcome {
    let mut worst = 0.0f64;
    for p in [1, 2, 3, 4, 6] {
        let ev = determine_order(p, 50, 20, 2024, 1e-9).map_err(|e| e.to_string())?;
        let locked = match LOCKED_ORDER {
            MultiplicationOrder::Direct => ev.direct_error,
            MultiplicationOrder::Reversed => ev.reversed_error,
        };
        ensure(locked < 1e-9, || format!("p = {p}: error {locked:e}"))?;
        ensure(p == 1 || ev.order == Some(LOCKED_ORDER), || format!("p = {p}: oracle says {:?}", ev.order))?;
        worst = worst.max(locked);
    }
    let alg = Algebra::rational_circle();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..50 {
        let f = random_up_element(&alg, 1, &mut rng).map_err(|e| e.to_string())?;
        let g = random_up_element(&alg, 1, &mut rng).map_err(|e| e.to_string())?;
        let fg = star(&alg, &f, &g).map_err(|e| e.to_string())?;
        let (a, b) = (f.at(&QAlpha::zero()), g.at(&QAlpha::zero()));
        let pointwise = match (a.and_then(|c| c.as_trig()), b.and_then(|c| c.as_trig())) {
            (Some(a), Some(b)) => a.mul(b),
            _ => continue,
        };
        let got = fg.at(&QAlpha::zero()).and_then(|c| c.as_trig()).cloned().unwrap_or_default();
        ensure(got == pointwise, || format!("p = 1, pair {i}: not the pointwise product"))?;
    }
    Ok(format!("p ∈ {{1,2,3,4,6}}, order {LOCKED_ORDER:?}, worst {worst:.1e}; p = 1 pointwise exactly"))
}

fn t_alpha_cases(rng: &mut ChaCha8Rng, bound: i64) -> Vec<(NebulaPoint, NebulaPoint, bool)> {
    let mut out = Vec::new();
    for _ in 0..100 {
        let x = QAlpha::new(rational(rng.gen_range(-40..=40), rng.gen_range(1..=9)), rational(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        let v = NebulaPoint::on("class", x.clone());
        let shifted = &x + &QAlpha::lattice(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        out.push((v.clone(), NebulaPoint::on("class", shifted.clone()), true));
        let off = [q("1/2"), q("α/3"), q("1/7+α"), q("-2/5α")][rng.gen_range(0..4)].clone();
        out.push((v, NebulaPoint::on("class", &shifted + &off), false));
    }
    out
}

fn orbifold_cases() -> Vec<(NebulaPoint, NebulaPoint, bool)> {
    let mut out = Vec::new();
    for s in ["0", "1/3", "-5/4", "3/2", "-1", "17/10"] {
        let x = q(s);
        let neg = -&x;
        out.push((NebulaPoint::on("cone", x.clone()), NebulaPoint::on("cone", neg.clone()), true));
        out.push((NebulaPoint::on("cone", x.clone()), NebulaPoint::on("cone", &x + &q("1/9")), false));
        if *x.rational_part() > rational(1, 2) || *x.rational_part() < rational(-1, 2) {
            let abs = if *x.rational_part() > rational(0, 1) { x.clone() } else { neg.clone() };
            out.push((NebulaPoint::on("cone", x.clone()), NebulaPoint::on("arm", abs.clone()), true));
            out.push((NebulaPoint::on("arm", abs), NebulaPoint::on("cone", neg), true));
            out.push((NebulaPoint::on("cone", x.clone()), NebulaPoint::on("arm", q("17/3")), false));
        }
    }
    for (a, b) in [("7", "7"), ("9/8", "1"), ("3", "4")] {
        out.push((NebulaPoint::on("arm", q(a)), NebulaPoint::on("arm", q(b)), a == b));
    }
    out
}

fn morphology() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let bound = 2;
    let groupoids = [
        (StructureGroupoid::build(t_alpha()).unwrap(), t_alpha_cases(&mut rng, 2)),
        (StructureGroupoid::build(reflection_orbifold()).unwrap(), orbifold_cases()),
    ];
    let mut total = 0;
    for (g, cases) in &groupoids {
        for (v, w, connected) in cases {
            let arrows = g.arrows_between(v, w, bound).map_err(|e| e.to_string())?;
            let eq = g
                .compare(&g.evaluate(v).map_err(|e| e.to_string())?, &g.evaluate(w).map_err(|e| e.to_string())?, bound)
                .map_err(|e| e.to_string())?;
            ensure(arrows.is_empty() != *connected && eq.is_equal() == *connected, || {
                format!("{} → {}: {} arrows, {:?}", v.pretty(), w.pretty(), arrows.len(), eq)
            })?;
            ensure(!matches!(eq, PointEquality::Equal(_)) || *connected, || "false positive".into())?;
            total += 1;
        }
    }
    Ok(format!("{total} pairs on T_α and ℝ/{{±1}}, no false positives or negatives"))
}

fn mrw_axioms() -> Outcome {
    let mut instances = 0;
    for (name, bi) in [("duplicated", duplicated()), ("two-scale", two_scale())] {
        let r = check_axioms(&bi, 3, 4).map_err(|e| e.to_string())?;
        for c in &r.checks {
            ensure(c.passed && c.instances > 0, || format!("{name}: {} ({:?})", c.name, c.counterexample))?;
            instances += c.instances;
        }
    }
    Ok(format!("2 bi-atlases, word length 3, {instances} instances"))
}

fn detection() -> Outcome {
    let w = AlphaWitness::golden();
    let lattice = [ts("1"), ts("α"), ts("-2+α"), ts("3-2α")];
    let rationals = [ts("1/2"), ts("-1/3"), ts("2"), ts("3/4")];
    let err = |e: quasifold_core::lifting::LiftError| e.to_string();
    for (name, group, pieces) in
        [("ℤ+αℤ", GroupPresentation::z_plus_alpha_z(), lattice), ("ℚ", GroupPresentation::rationals(1), rationals)]
    {
        for k in 1..=4 {
            let exact = stitched_exact(&pieces[..k], &rational(-2, 1), &rational(2, 1), 120, k as u64, &w).map_err(err)?;
            let r = detect_pieces(&exact, &group, 4, 0.0, &w).map_err(err)?;
            ensure(r.coverage == 1.0 && r.pieces.len() == k, || format!("{name}, k = {k}, exact: coverage {}", r.coverage))?;
            let numeric = stitched_numeric(&pieces[..k], -2.0, 2.0, 120, k as u64, &w).map_err(err)?;
            let r = detect_pieces(&numeric, &group, 4, 1e-9, &w).map_err(err)?;
            ensure(r.coverage == 1.0 && r.pieces.len() == k, || format!("{name}, k = {k}, numeric: coverage {}", r.coverage))?;
        }
    }
    let single = stitched_numeric(&[ts("2+3α")], -1.0, 1.0, 60, 2, &w).map_err(err)?;
    let fit = reconstruct_affine(&single, FitTolerances::default(), &w).map_err(err)?;
    ensure(fit.accepted && fit.max_residual < 1e-9 && fit.second_derivative < 1e-6, || format!("{fit:?}"))?;
    let control = stitched_exact(&[ts("α/2")], &rational(-1, 1), &rational(1, 1), 50, 1, &w).map_err(err)?;
    let r = detect_pieces(&control, &GroupPresentation::z_plus_alpha_z(), 5, 0.0, &w).map_err(err)?;
    ensure(r.coverage == 0.0, || format!("control coverage {}", r.coverage))?;
    Ok(format!(
        "k ≤ 4 on ℤ+αℤ and ℚ at full coverage; fit residual {:.1e}, D² {:.1e}; control coverage 0",
        fit.max_residual, fit.second_derivative
    ))
}

fn prescribed_lifts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let err = |e: quasifold_core::lifting::LiftError| e.to_string();
    let mut pairs = 0;
    for (name, bi) in [("two-scale", two_scale()), ("identity", identity_biatlas(&t_alpha()).map_err(err)?)] {
        for (r, r2) in fiber_pairs(&bi, 25, 3).map_err(err)? {
            let lift = lift_diffeo(&bi, &r, &r2, 6).map_err(err)?;
            let hit = lift.lift.apply(&r.coords).map_err(|e| e.to_string())?;
            ensure(hit == r2.coords, || format!("{name}: lift misses {}", r2.pretty()))?;
            let points: Vec<_> = (0..100).map(|_| random_point(&mut rng, 1)).collect();
            let c = lift_is_compatible(&bi, &lift, &points, 4).map_err(err)?;
            ensure(c.passed() && c.skipped == 0, || format!("{name}: {c:?}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, f̃(r) = r' exactly, compatible at 100 points each"))
}

fn flip() -> Outcome {
    let r = nonliftable_demo(6, 100, 1e-10, 21);
    let worst = r.annuli.iter().map(|a| a.max_error).fold(0.0, f64::max);
    ensure(r.passed(), || format!("{r:?}"))?;
    Ok(format!("n = 1..6, worst {worst:.1e} < 1e-10"))
}

fn functor() -> Outcome {
    let r = functor_check(500, 12).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{r:?}"))?;
    Ok("500 composable pairs, exact".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("composition law of translation arrows", composition_law),
        ("T_α isotropy set at 0 equals brute force", example_set),
        ("closed-form convolution equals general", convolution_consistency),
        ("*-algebra axioms", star_axioms),
        ("rotation relation phase", rotation),
        ("matrix representation is multiplicative", matrix_representation),
        ("arrows exist iff points agree", morphology),
        ("equivalence bimodule axioms", mrw_axioms),
        ("affine piece detection", detection),
        ("prescribed lifts", prescribed_lifts),
        ("flip demo parity rule", flip),
        ("Φ is a functor", functor),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} ({ms} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail} ({ms} ms)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
