//! Small graphs and train track maps used by tests, benches and fixtures.

use crate::graph::{GraphBuilder, GraphOfGroups};
use crate::traintrack::TrainTrackMap;
use crate::word::Word;
use num_bigint::BigInt;
use std::collections::HashMap;

/// `BS(p,q)`: one vertex `a` with a loop `t` (reverse `T`).
pub fn bs(p: i64, q: i64) -> GraphOfGroups {
    let mut b = GraphBuilder::new();
    let a = b.vertex("a");
    b.edge("t", "T", a, a, p, q);
    b.build(a).expect("BS(p,q) with |p|,|q| > 1 is not solvable")
}

/// One vertex `v` with loops labelled `(p,p)`; loop `x` has reverse `X`.
pub fn rose(loops: &[&str], p: i64) -> GraphOfGroups {
    let mut b = GraphBuilder::new();
    let v = b.vertex("v");
    for x in loops {
        b.edge(*x, &x.to_uppercase(), v, v, p, p);
    }
    b.build(v).expect("rose is not solvable")
}

/// Map data in the text word syntax.
pub struct MapText<'a> {
    /// `(vertex, image vertex, exponent)`
    pub vertices: &'a [(&'a str, &'a str, i64)],
    /// `(positive edge, image path)`
    pub edges: &'a [(&'a str, &'a str)],
    pub base: &'a str,
    /// `(generator name, image loop)` under the inverse automorphism.
    pub inverse: Option<&'a [(&'a str, &'a str)]>,
}

pub fn build_map(g: &GraphOfGroups, t: &MapText) -> TrainTrackMap {
    let n = g.num_vertices();
    let mut vertex_map = vec![usize::MAX; n];
    let mut vertex_exp = vec![BigInt::from(0); n];
    for (v, fv, m) in t.vertices {
        let v = g.vertex_by_name(v).expect("unknown vertex");
        vertex_map[v] = g.vertex_by_name(fv).expect("unknown vertex");
        vertex_exp[v] = BigInt::from(*m);
    }
    assert!(vertex_map.iter().all(|&v| v != usize::MAX), "every vertex needs an image");
    let mut images = vec![None; g.num_orbits()];
    for (e, text) in t.edges {
        let e = g.edge_by_name(e).expect("unknown edge");
        assert_eq!(e % 2, 0, "images are given on positive edges");
        images[e / 2] = Some(Word::parse(g, vertex_map[g.origin(e)], text).expect("bad edge image"));
    }
    let images = images.into_iter().map(|w| w.expect("every edge needs an image")).collect();
    let base = Word::parse(g, g.base(), t.base).expect("bad base word");
    let inverse = t.inverse.map(|inv| {
        let c = crate::cover::Cover::new(g.clone());
        let mut out = HashMap::new();
        for x in crate::traintrack::generators(&c) {
            let name = crate::traintrack::generator_name(g, x);
            let (_, text) = inv.iter().find(|(n, _)| *n == name).expect("missing inverse image");
            out.insert(x, Word::parse(g, g.base(), text).expect("bad inverse image"));
        }
        out
    });
    TrainTrackMap::from_psi(g.clone(), vertex_map, vertex_exp, images, base, inverse).expect("sample map is valid")
}

fn rose_map(loops: &[&str], p: i64, edges: &[(&str, &str)], inverse: &[(&str, &str)]) -> TrainTrackMap {
    let g = rose(loops, p);
    let mut inv: Vec<(&str, &str)> = vec![("v", "v^1")];
    inv.extend_from_slice(inverse);
    build_map(&g, &MapText { vertices: &[("v", "v", 1)], edges, base: "", inverse: Some(&inv) })
}

/// `s → st, t → s`.
pub fn fib(p: i64) -> TrainTrackMap {
    rose_map(&["s", "t"], p, &[("s", "s t"), ("t", "s")], &[("s", "t"), ("t", "T s")])
}

/// Square of [`fib`]: `s → sts, t → st`.
pub fn fib2(p: i64) -> TrainTrackMap {
    rose_map(&["s", "t"], p, &[("s", "s t s"), ("t", "s t")], &[("s", "T s"), ("t", "S t t")])
}

/// `s → sst, t → st`: its pINPs end inside edges.
pub fn interior(p: i64) -> TrainTrackMap {
    rose_map(&["s", "t"], p, &[("s", "s s t"), ("t", "s t")], &[("s", "s T"), ("t", "t S t")])
}

/// `x → y, y → z, z → xy`.
pub fn trib(p: i64) -> TrainTrackMap {
    rose_map(&["x", "y", "z"], p, &[("x", "y"), ("y", "z"), ("z", "x y")], &[("x", "z X"), ("y", "x"), ("z", "y")])
}

/// `s ↔ t`: an isometry with a permutation transition matrix.
pub fn perm(p: i64) -> TrainTrackMap {
    rose_map(&["s", "t"], p, &[("s", "t"), ("t", "s")], &[("s", "t"), ("t", "s")])
}

/// `x → xy, y → x, z → z`: the loop `z` spans an invariant subgraph that
/// cannot be collapsed.
pub fn essential(p: i64) -> TrainTrackMap {
    rose_map(
        &["x", "y", "z"],
        p,
        &[("x", "x y"), ("y", "x"), ("z", "z")],
        &[("x", "y"), ("y", "Y x"), ("z", "z")],
    )
}

fn two_vertex(p: i64, loops: bool) -> GraphOfGroups {
    let mut b = GraphBuilder::new();
    let v = b.vertex("v");
    let w = b.vertex("w");
    b.edge("s1", "S1", v, w, p, 1);
    b.edge("s2", "S2", w, v, 1, p);
    if loops {
        b.edge("t", "T", v, v, p, p);
    }
    b.build(v).expect("not solvable")
}

/// [`fib2`] with `s` subdivided as `s1 s2`; `s1` is fixed, so `{s1}` is an
/// invariant collapsible subgraph and collapsing it gives back [`fib2`].
pub fn collapsible_fib2(p: i64) -> TrainTrackMap {
    let g = two_vertex(p, true);
    build_map(
        &g,
        &MapText {
            vertices: &[("v", "v", 1), ("w", "w", 1)],
            edges: &[("s1", "s1"), ("s2", "s2 t s1 s2"), ("t", "s1 s2 t")],
            base: "",
            inverse: None,
        },
    )
}

/// [`perm`] with both loops subdivided; `{s1, t1}` is invariant and
/// collapsible, and the quotient is [`perm`].
pub fn subdivided_perm(p: i64) -> TrainTrackMap {
    let mut b = GraphBuilder::new();
    let v = b.vertex("v");
    let us = b.vertex("us");
    let ut = b.vertex("ut");
    b.edge("s1", "S1", v, us, p, 1);
    b.edge("s2", "S2", us, v, 1, p);
    b.edge("t1", "T1", v, ut, p, 1);
    b.edge("t2", "T2", ut, v, 1, p);
    let g = b.build(v).expect("not solvable");
    build_map(
        &g,
        &MapText {
            vertices: &[("v", "v", 1), ("us", "ut", 1), ("ut", "us", 1)],
            edges: &[("s1", "t1"), ("s2", "t2"), ("t1", "s1"), ("t2", "s2")],
            base: "",
            inverse: None,
        },
    )
}

/// Named samples, for fixtures and the command line.
pub fn by_name(name: &str, p: i64) -> Option<TrainTrackMap> {
    Some(match name {
        "fib" => fib(p),
        "fib2" => fib2(p),
        "trib" => trib(p),
        "perm" => perm(p),
        "essential" => essential(p),
        "interior" => interior(p),
        "collapsible_fib2" => collapsible_fib2(p),
        "subdivided_perm" => subdivided_perm(p),
        _ => return None,
    })
}

pub const NAMES: [&str; 8] = ["fib", "fib2", "trib", "interior", "perm", "essential", "collapsible_fib2", "subdivided_perm"];

/// Samples written to `fixtures/` as JSON documents.
pub const FIXTURES: &[(&str, i64)] = &[
    ("trib", 1),
    ("trib", 2),
    ("fib", 1),
    ("fib2", 2),
    ("interior", 1),
    ("perm", 2),
    ("essential", 2),
    ("collapsible_fib2", 2),
    ("subdivided_perm", 2),
];
