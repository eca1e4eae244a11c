use quasifold_core::atlas::t_alpha;
use quasifold_core::lifting::{
    detect_pieces, fiber_pairs, identity_biatlas, lift_diffeo, lift_is_compatible, nonliftable_demo, random_point,
    reconstruct_affine, stitched_exact, stitched_numeric, FitTolerances,
};
use quasifold_core::mrw::{check_axioms, duplicated, functor_check, two_scale};
use quasifold_core::numbers::{rational, AffineElement, AlphaWitness, GroupPresentation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn t(s: &str) -> AffineElement {
    AffineElement::translate1(s.parse().unwrap())
}

#[test]
fn bimodule_axioms_at_word_length_three() {
    for bi in [duplicated(), two_scale()] {
        let r = check_axioms(&bi, 3, 4).unwrap();
        for c in &r.checks {
            assert!(c.passed && c.instances > 0, "{c:?}");
        }
    }
}

#[test]
fn phi_is_a_functor() {
    assert!(functor_check(500, 12).unwrap().passed());
}

#[test]
fn stitched_maps_are_recovered() {
    let w = AlphaWitness::golden();
    let lattice = [t("1"), t("α"), t("-2+α"), t("3-2α")];
    let rationals = [t("1/2"), t("-1/3"), t("2"), t("3/4")];
    for (group, pieces) in [(GroupPresentation::z_plus_alpha_z(), lattice), (GroupPresentation::rationals(1), rationals)] {
        for k in 1..=4 {
            let f = stitched_exact(&pieces[..k], &rational(-2, 1), &rational(2, 1), 120, k as u64, &w).unwrap();
            let r = detect_pieces(&f, &group, 4, 0.0, &w).unwrap();
            assert_eq!(r.coverage, 1.0);
            assert_eq!(r.pieces.len(), k);
            let numeric = stitched_numeric(&pieces[..k], -2.0, 2.0, 120, k as u64, &w).unwrap();
            let r = detect_pieces(&numeric, &group, 4, 1e-9, &w).unwrap();
            assert_eq!(r.pieces.len(), k);
            assert_eq!(r.coverage, 1.0);
        }
    }
    let control = stitched_exact(&[t("α/2")], &rational(-1, 1), &rational(1, 1), 50, 1, &w).unwrap();
    assert_eq!(detect_pieces(&control, &GroupPresentation::z_plus_alpha_z(), 5, 0.0, &w).unwrap().coverage, 0.0);
    let single = stitched_numeric(&[t("2+3α")], -1.0, 1.0, 60, 2, &w).unwrap();
    let fit = reconstruct_affine(&single, FitTolerances::default(), &w).unwrap();
    assert!(fit.accepted && fit.max_residual < 1e-9 && fit.second_derivative < 1e-6, "{fit:?}");
}

#[test]
fn prescribed_lifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for bi in [two_scale(), identity_biatlas(&t_alpha()).unwrap()] {
        for (r, r2) in fiber_pairs(&bi, 25, 3).unwrap() {
            let lift = lift_diffeo(&bi, &r, &r2, 6).unwrap();
            assert_eq!(lift.lift.apply(&r.coords).unwrap(), r2.coords);
            let points: Vec<_> = (0..100).map(|_| random_point(&mut rng, 1)).collect();
            let c = lift_is_compatible(&bi, &lift, &points, 4).unwrap();
            assert!(c.passed() && c.skipped == 0, "{c:?}");
        }
    }
}

#[test]
fn flip_demo() {
    let r = nonliftable_demo(6, 100, 1e-10, 21);
    assert!(r.passed(), "{r:?}");
}
