//! Word problem, action and tightness invariants of the Bass-Serre cover.

mod oracles;

use gbs::cover::{Cover, IsometryKind};
use gbs::samples;
use gbs::traintrack::{random_loop, random_point};
use gbs::word::{is_trivial, reduce_word};
use oracles::{britton_trivial, to_word, Tok};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tok() -> impl Strategy<Value = Tok> {
    prop_oneof![(-6i64..=6).prop_map(Tok::A), prop_oneof![Just(1i8), Just(-1i8)].prop_map(Tok::T)]
}

fn graphs() -> Vec<(&'static str, Cover)> {
    vec![
        ("bs23", Cover::new(samples::bs(2, 3))),
        ("bs24", Cover::new(samples::bs(2, 4))),
        ("trib2", Cover::new(samples::trib(2).graph().clone())),
        ("interior2", Cover::new(samples::interior(2).graph().clone())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn word_problem_matches_rewriting((p, q) in prop_oneof![Just((2i64, 3i64)), Just((2, 4)), Just((3, 3))],
                                      toks in prop::collection::vec(tok(), 0..10),
                                      seed: u64) {
        let g = samples::bs(p, q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = to_word(&g, &toks);
        prop_assert_eq!(is_trivial(&g, &w).unwrap(), britton_trivial(p, q, &toks, &mut rng));
        prop_assert!(is_trivial(&g, &w.concat(&w.inverse())).unwrap());
        prop_assert!(is_trivial(&g, &reduce_word(&g, &w).concat(&w.inverse())).unwrap());
    }

    #[test]
    fn action_laws(which in 0usize..4, seed: u64) {
        let (name, c) = &graphs()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_loop(c, &mut rng, 4, 4);
        let b = random_loop(c, &mut rng, 4, 4);
        let x = random_point(c, &mut rng, 4);
        let y = random_point(c, &mut rng, 4);
        let ab = c.act_point(&a.concat(&b), &x);
        prop_assert!(c.point_eq(&ab, &c.act_point(&a, &c.act_point(&b, &x))), "{}", name);
        prop_assert_eq!(c.dist(&x, &y), c.dist(&c.act_point(&a, &x), &c.act_point(&a, &y)));
        prop_assert!(c.point_eq(&c.act_point(&a.inverse(), &c.act_point(&a, &x)), &x));
        prop_assert_eq!(c.vertex_of(&c.act_point(&a, &x)), c.vertex_of(&x));
    }

    #[test]
    fn geodesics_are_tight(which in 0usize..4, seed: u64) {
        let (_, c) = &graphs()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_point(c, &mut rng, 5);
        let y = random_point(c, &mut rng, 5);
        let gd = c.geodesic(&x, &y);
        prop_assert!(c.is_tight(&gd));
        prop_assert_eq!(gd.len(), c.dist(&x, &y));
        prop_assert!(c.point_eq(&c.path_end(&gd), &y));
        prop_assert_eq!(c.dist(&y, &x), gd.len());
        // detour through z, then tighten back to the geodesic
        let z = random_point(c, &mut rng, 5);
        let detour = c.concat_paths(&c.geodesic(&x, &z), &c.geodesic(&z, &y));
        let t = c.tighten(&detour);
        prop_assert!(c.is_tight(&t));
        prop_assert_eq!(t.len(), gd.len());
        prop_assert!(c.point_eq(&c.path_end(&t), &y));
        prop_assert!(c.dist(&x, &y) <= c.dist(&x, &z) + c.dist(&z, &y));
    }

    #[test]
    fn translation_length_is_a_conjugacy_invariant(which in 0usize..4, seed: u64) {
        let (_, c) = &graphs()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_loop(c, &mut rng, 5, 4);
        let h = random_loop(c, &mut rng, 3, 3);
        let t = c.translation_length(&g);
        let conj = c.translation_length(&h.concat(&g).concat(&h.inverse()));
        prop_assert_eq!(t.kind, conj.kind);
        prop_assert_eq!(t.length, conj.length);
        prop_assert_eq!(c.translation_length(&g.inverse()).length, t.length);
        if t.kind == IsometryKind::Loxodromic {
            prop_assert_eq!(c.translation_length_oracle(&g), t.length);
        }
    }
}
