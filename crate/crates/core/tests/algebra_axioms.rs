use quasifold_core::algebra::{axiom_suite, determine_order, CorpusKind, LOCKED_ORDER};

#[test]
fn axioms_hold_on_every_corpus() {
    for kind in CorpusKind::ALL {
        let report = axiom_suite(kind, 200, 7).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {} worst {:e}", kind.name(), c.name, c.worst);
            assert_eq!(c.trials, 200);
        }
    }
}

#[test]
fn report_is_deterministic() {
    let a = serde_json::to_string(&axiom_suite(CorpusKind::RationalLine, 20, 5).unwrap()).unwrap();
    let b = serde_json::to_string(&axiom_suite(CorpusKind::RationalLine, 20, 5).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn matrix_order_is_locked() {
    for p in [1, 2, 3, 4, 6] {
        let ev = determine_order(p, 50, 20, 2024, 1e-9).unwrap();
        if p == 1 {
            // Commutative: both orders hold.
            assert!(ev.direct_error < 1e-9 && ev.reversed_error < 1e-9);
        } else {
            assert_eq!(ev.order, Some(LOCKED_ORDER), "p = {p}: {ev:?}");
        }
    }
}
