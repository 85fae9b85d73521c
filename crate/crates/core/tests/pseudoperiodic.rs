use gbs::cover::{Cover, CoverPath};
use gbs::graph::GraphBuilder;
use gbs::nielsen::{EdgePinp, PinpOptions};
use gbs::pseudoperiodic::*;
use gbs::samples;
use gbs::word::{Germ, Word};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run(name: &str, p: i64) -> AtoroidalRun {
    decide_pseudo_atoroidal(&samples::by_name(name, p).unwrap(), &PinpOptions::default(), 20).unwrap()
}

#[test]
fn verdicts() {
    assert!(run("trib", 1).verdict.atoroidal);
    assert!(run("trib", 2).verdict.atoroidal);
    assert_eq!(run("trib", 2).verdict.classes.len(), 0);
    // automorphisms of F2 fix the commutator class
    for name in ["fib", "fib2", "interior"] {
        assert!(!run(name, 1).verdict.atoroidal, "{name}");
    }
}

#[test]
fn two_pinps_share_endpoints() {
    let r = run("interior", 1);
    assert_eq!(r.classes.len(), 2);
    for k in &r.classes {
        assert_eq!(k.ey_reps.len(), 2);
        assert_eq!(k.rounds, 2);
    }
}

/// Serre's test agrees with translation lengths of all generators and all
/// ordered products of two.
fn serre_agrees(c: &Cover, gens: &[Word]) {
    let mut direct = true;
    for a in gens {
        direct &= c.translation_length_oracle(a) == 0;
        for b in gens {
            direct &= c.translation_length_oracle(&a.concat(b)) == 0;
        }
    }
    assert_eq!(is_elliptic_subgroup(c, gens) == Ellipticity::Elliptic, direct);
}

#[test]
fn generators_preserve_the_class() {
    for (name, p) in [("fib", 1), ("fib", 2), ("interior", 1), ("interior", 2), ("fib2", 3)] {
        let r = run(name, p);
        let c = &r.map.cover;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in &r.classes {
            serre_agrees(c, &k.generators);
            for g in &k.generators {
                for y in &k.vy_reps {
                    let gy = c.act_point(g, y);
                    assert!(reconnect(&r.map, &r.pinps, k, &gy, 5000).is_some(), "{name} p={p}");
                }
            }
            // random products move the seed endpoint inside the class
            let x0 = &r.pinps[k.seed].path.start;
            for _ in 0..10 {
                let mut w = Word::empty(c.base());
                for _ in 0..rng.gen_range(1..=3) {
                    let g = &k.generators[rng.gen_range(0..k.generators.len())];
                    w = w.concat(&if rng.gen_bool(0.5) { g.clone() } else { g.inverse() });
                }
                let y = c.act_point(&w, x0);
                assert!(reconnect(&r.map, &r.pinps, k, &y, 5000).is_some(), "{name} p={p}");
            }
        }
    }
}

#[test]
fn witnesses_have_bounded_orbits() {
    for (name, p) in [("fib", 1), ("fib2", 2), ("interior", 2)] {
        let r = run(name, p);
        let c = &r.map.cover;
        let k = r.pinps.iter().fold(1usize, |a, e| a.lcm(&e.period));
        let fk = r.map.power(k);
        for e in &r.ellipticity {
            let Ellipticity::Loxodromic { witness, length, .. } = e else { continue };
            let mut w = witness.clone();
            for _ in 0..6 {
                w = fk.phi(&w);
                assert_eq!(c.translation_length_oracle(&w), *length, "{name} p={p}");
            }
        }
    }
}

#[test]
fn serre_examples() {
    let g = samples::bs(2, 3);
    let c = Cover::new(g.clone());
    let a = Word::power(0, 1);
    let t = Word::parse(&g, 0, "t").unwrap();
    assert_eq!(is_elliptic_subgroup(&c, &[a.clone()]), Ellipticity::Elliptic);
    match is_elliptic_subgroup(&c, &[t.clone()]) {
        Ellipticity::Loxodromic { witness, length, .. } => {
            assert_eq!(witness, t);
            assert_eq!(length, 1);
        }
        e => panic!("{e:?}"),
    }
    // a fixes only x0 and t a t⁻¹ only t·x0: the product translates by 2
    let b = t.concat(&a).concat(&t.inverse());
    match is_elliptic_subgroup(&c, &[a.clone(), b.clone()]) {
        Ellipticity::Loxodromic { factors, length, .. } => {
            assert_eq!(factors, vec![0, 1]);
            assert_eq!(length, 2);
        }
        e => panic!("{e:?}"),
    }
    serre_agrees(&c, &[a.clone(), b]);
    serre_agrees(&c, &[a.clone(), a.pow(2)]);
}

#[test]
fn isolated_path_class() {
    // u carries a BS(2,3) loop; the edge e has labels 1 at both ends, so it
    // has a single translate at each endpoint
    let mut b = GraphBuilder::new();
    let u = b.vertex("u");
    let w = b.vertex("w");
    b.edge("t", "T", u, u, 2, 3);
    b.edge("e", "E", u, w, 1, 1);
    let g = b.build_unguarded(u).unwrap();
    let f = gbs::samples::build_map(
        &g,
        &gbs::samples::MapText {
            vertices: &[("u", "u", 1), ("w", "w", 1)],
            edges: &[("t", "t"), ("e", "e")],
            base: "",
            inverse: None,
        },
    );
    let c = &f.cover;
    let e = g.edge_by_name("e").unwrap();
    let path = CoverPath { start: c.root(), germs: vec![Germ::new(0, e)] };
    let pinps = vec![EdgePinp { path: path.clone(), pivot: 0, period: 1, twist: Word::empty(c.base()) }];
    let k = compute_nielsen_class(&f, &pinps, 0, 10).unwrap();
    assert_eq!(k.rounds, 1);
    assert_eq!(k.ey_reps, vec![path.clone()]);
    assert_eq!(k.vy_reps.len(), 2);
    assert_eq!(k.generators, vec![c.path_stabilizer(&path)]);
    assert_eq!(is_elliptic_subgroup(c, &k.generators), Ellipticity::Elliptic);
    assert_eq!(compute_nielsen_class(&f, &pinps, 3, 10).err(), Some(ClassError::UnknownSeed(3)));
}
