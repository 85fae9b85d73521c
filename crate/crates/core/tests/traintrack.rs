use gbs::collapse::{collapse_to_irreducible, recheck_certificate, CollapseOutcome, Reason};
use gbs::samples;

#[test]
fn samples_verify() {
    for p in [1, 2, 3] {
        for name in samples::NAMES {
            let f = samples::by_name(name, p).unwrap();
            f.verify_train_track().unwrap_or_else(|e| panic!("{name} p={p}: {e}"));
            let a = f.transition_matrix();
            assert_eq!(f.power(2).transition_matrix(), a.mul(&a), "{name}");
        }
    }
}

#[test]
fn collapse_outcomes() {
    for p in [2, 3] {
        let f = samples::fib(p);
        assert!(matches!(collapse_to_irreducible(&f).unwrap(), CollapseOutcome::Primitive { .. }));
        match collapse_to_irreducible(&samples::collapsible_fib2(p)).unwrap() {
            CollapseOutcome::Primitive { map, steps } => {
                assert_eq!(steps.len(), 1);
                assert_eq!(map.transition_matrix(), samples::fib2(p).transition_matrix());
            }
            o => panic!("{o:?}"),
        }
        for (name, want) in [("perm", "pf"), ("subdivided_perm", "pf"), ("essential", "ess")] {
            let f = samples::by_name(name, p).unwrap();
            match collapse_to_irreducible(&f).unwrap() {
                CollapseOutcome::Reducible(c) => {
                    match (&c.reason, want) {
                        (Reason::PfOne { .. }, "pf") | (Reason::InvariantEssential { .. }, "ess") => {}
                        r => panic!("{name}: {r:?}"),
                    }
                    recheck_certificate(&f, &c).unwrap();
                }
                o => panic!("{name}: {o:?}"),
            }
        }
    }
}
