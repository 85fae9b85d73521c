//! Lazy navigation of the Bass-Serre tree.
//!
//! A tree vertex is stored as the germ sequence of the geodesic from the
//! base lift `x₀`; this is the normal form of any word reaching it with the
//! terminal power dropped. Paths are a start point plus germs written in the
//! coordinates of the start point's canonical word.

use crate::graph::{rev, Edge, GraphOfGroups, Vertex};
use crate::word::{germ_word, normalize, reduce_word, Germ, NormalForm, Normalizer, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub germs: Vec<Germ>,
}

impl Point {
    pub fn root() -> Self {
        Point { germs: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.germs.len()
    }
}

/// An oriented tree edge: the germ leaving `from`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverEdge {
    pub from: Point,
    pub germ: Germ,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverPath {
    pub start: Point,
    pub germs: Vec<Germ>,
}

impl CoverPath {
    pub fn trivial(p: Point) -> Self {
        CoverPath { start: p, germs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.germs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.germs.is_empty()
    }
}

/// Unoriented turn class at a vertex: the germs `(0, e1)` and `(d, e2)`,
/// with `e1 ≤ e2` and `d` reduced modulo `gcd(|λ(e1)|, |λ(e2)|)`
/// (or to `min(d, L - d)` when `e1 = e2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TurnClass {
    pub vertex: Vertex,
    pub e1: Edge,
    pub e2: Edge,
    pub d: i64,
}

impl TurnClass {
    pub fn is_degenerate(&self) -> bool {
        self.e1 == self.e2 && self.d == 0
    }
}

/// Rotation data of a path based at a vertex representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub vertex: Vertex,
    pub germs: Vec<Germ>,
    /// `germs = nf(a^shift · original)`.
    pub shift: BigInt,
    /// `a^period` is the least positive power fixing the path.
    pub period: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryKind {
    Elliptic,
    Loxodromic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub length: usize,
    pub kind: IsometryKind,
    /// A fixed point for elliptic elements.
    pub fixed_point: Option<Point>,
    /// A fundamental domain `[w, gw]` on the axis for loxodromic elements.
    pub axis: Option<CoverPath>,
}

pub fn turn_class(g: &GraphOfGroups, v: Vertex, x: Germ, y: Germ) -> TurnClass {
    debug_assert_eq!(g.origin(x.edge), v);
    debug_assert_eq!(g.origin(y.edge), v);
    let (x, y) = if x.edge <= y.edge { (x, y) } else { (y, x) };
    if x.edge == y.edge {
        let l = g.width(x.edge);
        let d = (y.idx - x.idx).rem_euclid(l);
        TurnClass { vertex: v, e1: x.edge, e2: y.edge, d: d.min(l - d) }
    } else {
        let m = g.width(x.edge).gcd(&g.width(y.edge));
        TurnClass { vertex: v, e1: x.edge, e2: y.edge, d: (y.idx - x.idx).rem_euclid(m) }
    }
}

/// Every turn class at `v`, in a fixed order.
pub fn turn_classes_at(g: &GraphOfGroups, v: Vertex) -> Vec<TurnClass> {
    let out: Vec<Edge> = g.out_edges(v).collect();
    let mut res = Vec::new();
    for (a, &e1) in out.iter().enumerate() {
        for &e2 in &out[a..] {
            if e1 == e2 {
                let l = g.width(e1);
                for d in 0..=l / 2 {
                    res.push(TurnClass { vertex: v, e1, e2, d });
                }
            } else {
                let m = g.width(e1).gcd(&g.width(e2));
                for d in 0..m {
                    res.push(TurnClass { vertex: v, e1, e2, d });
                }
            }
        }
    }
    res
}

/// The graph together with a spanning tree marking: `x_v` is the lift of
/// `v` reached by the tree path `γ_v` from the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub graph: GraphOfGroups,
    tree_words: Vec<Word>,
    tree_points: Vec<Point>,
}

impl Cover {
    pub fn new(graph: GraphOfGroups) -> Self {
        let n = graph.num_vertices();
        let mut tree_words: Vec<Option<Word>> = vec![None; n];
        tree_words[graph.base()] = Some(Word::empty(graph.base()));
        let mut queue = VecDeque::from([graph.base()]);
        while let Some(v) = queue.pop_front() {
            for e in graph.out_edges(v) {
                let w = graph.terminus(e);
                if tree_words[w].is_none() {
                    let mut p = tree_words[v].clone().unwrap();
                    p.push_edge(&graph, e);
                    tree_words[w] = Some(p);
                    queue.push_back(w);
                }
            }
        }
        let tree_words: Vec<Word> = tree_words.into_iter().map(|w| w.expect("connected graph")).collect();
        let tree_points = tree_words.iter().map(|w| Point { germs: normalize(&graph, w).germs }).collect();
        Cover { graph, tree_words, tree_points }
    }

    pub fn g(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn base(&self) -> Vertex {
        self.graph.base()
    }

    /// Tree path `γ_v` from the base vertex to `v`.
    pub fn tree_word(&self, v: Vertex) -> &Word {
        &self.tree_words[v]
    }

    /// Whether `e` lies in the marking's spanning tree (either orientation).
    pub fn is_tree_edge(&self, e: Edge) -> bool {
        let g = &self.graph;
        let t = g.terminus(e);
        let o = g.origin(e);
        let on = |w: &Word, e: Edge| w.edges().last() == Some(&e);
        (on(&self.tree_words[t], e) && self.tree_words[t].len() == self.tree_words[o].len() + 1)
            || (on(&self.tree_words[o], rev(e)) && self.tree_words[o].len() == self.tree_words[t].len() + 1)
    }

    /// Representative lift `x_v`.
    pub fn vertex_rep(&self, v: Vertex) -> &Point {
        &self.tree_points[v]
    }

    pub fn root(&self) -> Point {
        Point::root()
    }

    pub fn vertex_of(&self, p: &Point) -> Vertex {
        p.germs.last().map_or(self.base(), |x| self.graph.terminus(x.edge))
    }

    /// Canonical word reaching `p` (terminal power zero).
    pub fn word_of(&self, p: &Point) -> Word {
        germ_word(&self.graph, self.base(), &p.germs, &BigInt::zero())
    }

    /// Endpoint of a word starting at the base vertex, with the terminal
    /// vertex-group power left over.
    pub fn locate(&self, w: &Word) -> (Point, BigInt) {
        assert_eq!(w.start(), self.base(), "word must start at the base vertex");
        let nf = normalize(&self.graph, w);
        (Point { germs: nf.germs }, nf.carry)
    }

    pub fn point(&self, w: &Word) -> Point {
        self.locate(w).0
    }

    /// Equality of the endpoints of two words from the base, decided by the
    /// word problem: same terminal vertex and `γ⁻¹γ'` reduces to a power.
    pub fn words_reach_same_point(&self, w1: &Word, w2: &Word) -> bool {
        if w1.end() != w2.end() {
            return false;
        }
        let r = reduce_word(&self.graph, &w1.inverse().concat(w2));
        r.len() == 0
    }

    pub fn point_eq(&self, x: &Point, y: &Point) -> bool {
        x == y
    }

    pub fn act_point(&self, h: &Word, p: &Point) -> Point {
        self.point(&h.concat(&self.word_of(p)))
    }

    pub fn act_edge(&self, h: &Word, e: &CoverEdge) -> CoverEdge {
        let p = self.act_path(h, &CoverPath { start: e.from.clone(), germs: vec![e.germ] });
        CoverEdge { from: p.start, germ: p.germs[0] }
    }

    pub fn act_path(&self, h: &Word, p: &CoverPath) -> CoverPath {
        let (start, carry) = self.locate(&h.concat(&self.word_of(&p.start)));
        let mut n = Normalizer::new(self.vertex_of(&start));
        n.push_power(&carry);
        n.push_germs(&self.graph, &p.germs);
        CoverPath { start, germs: n.finish().germs }
    }

    /// Path given by a prefix word from the base and a relative word.
    pub fn anchored(&self, prefix: &Word, rel: &Word) -> CoverPath {
        let (start, carry) = self.locate(prefix);
        let mut n = Normalizer::new(self.vertex_of(&start));
        n.push_power(&carry);
        n.push_word(&self.graph, rel);
        CoverPath { start, germs: n.finish().germs }
    }

    pub fn path_end(&self, p: &CoverPath) -> Point {
        let mut n = Normalizer::resume(
            NormalForm { start: self.base(), germs: p.start.germs.clone(), carry: BigInt::zero() },
            &self.graph,
        );
        n.push_germs(&self.graph, &p.germs);
        Point { germs: n.finish().germs }
    }

    /// Vertices visited by a path, endpoints included.
    pub fn path_points(&self, p: &CoverPath) -> Vec<Point> {
        let mut n = Normalizer::resume(
            NormalForm { start: self.base(), germs: p.start.germs.clone(), carry: BigInt::zero() },
            &self.graph,
        );
        let mut out = vec![p.start.clone()];
        for x in &p.germs {
            n.push_power(&BigInt::from(x.idx));
            n.push_edge(&self.graph, x.edge);
            let nf = n.clone().finish();
            out.push(Point { germs: nf.germs });
        }
        out
    }

    /// Quotient vertices along a path.
    pub fn path_vertices(&self, p: &CoverPath) -> Vec<Vertex> {
        let mut v = vec![self.vertex_of(&p.start)];
        v.extend(p.germs.iter().map(|x| self.graph.terminus(x.edge)));
        v
    }

    pub fn is_tight(&self, p: &CoverPath) -> bool {
        is_tight_germs(&p.germs)
    }

    pub fn tighten(&self, p: &CoverPath) -> CoverPath {
        let mut n = Normalizer::new(self.vertex_of(&p.start));
        n.push_germs(&self.graph, &p.germs);
        CoverPath { start: p.start.clone(), germs: n.finish().germs }
    }

    pub fn dist(&self, x: &Point, y: &Point) -> usize {
        let c = common_prefix(&x.germs, &y.germs);
        x.depth() + y.depth() - 2 * c
    }

    /// The geodesic from `x` to `y`.
    pub fn geodesic(&self, x: &Point, y: &Point) -> CoverPath {
        let w = self.word_of(x).inverse().concat(&self.word_of(y));
        let nf = normalize(&self.graph, &w);
        CoverPath { start: x.clone(), germs: nf.germs }
    }

    pub fn reverse_path(&self, p: &CoverPath) -> CoverPath {
        let t = self.tighten(p);
        self.geodesic(&self.path_end(&t), &t.start)
    }

    /// Subpath between vertex positions `i ≤ j`.
    pub fn subpath(&self, p: &CoverPath, i: usize, j: usize) -> CoverPath {
        assert!(i <= j && j <= p.germs.len());
        let mut n = Normalizer::resume(
            NormalForm { start: self.base(), germs: p.start.germs.clone(), carry: BigInt::zero() },
            &self.graph,
        );
        n.push_germs(&self.graph, &p.germs[..i]);
        let nf = n.finish();
        let mut m = Normalizer::new(nf.end(&self.graph));
        m.push_power(&nf.carry);
        m.push_germs(&self.graph, &p.germs[i..j]);
        CoverPath { start: Point { germs: nf.germs }, germs: m.finish().germs }
    }

    /// Leftover power `c` with `γ_S·w_p = γ_E·a^c` for a path from `S` to `E`.
    pub fn end_carry(&self, p: &CoverPath) -> BigInt {
        let mut n = Normalizer::resume(
            NormalForm { start: self.base(), germs: p.start.germs.clone(), carry: BigInt::zero() },
            &self.graph,
        );
        n.push_germs(&self.graph, &p.germs);
        n.finish().carry
    }

    /// Tightened concatenation of `p` with a path starting at its endpoint.
    pub fn concat_paths(&self, p: &CoverPath, q: &CoverPath) -> CoverPath {
        debug_assert_eq!(self.path_end(p), q.start);
        let c = self.end_carry(p);
        let mut n = Normalizer::new(self.vertex_of(&p.start));
        n.push_germs(&self.graph, &p.germs);
        n.push_power(&-c);
        n.push_germs(&self.graph, &q.germs);
        CoverPath { start: p.start.clone(), germs: n.finish().germs }
    }

    /// All tight edge paths of length `n` from `x`.
    pub fn edge_paths_from(&self, x: &Point, n: usize) -> Vec<CoverPath> {
        let v = self.vertex_of(x);
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.extend_paths(v, n, &mut cur, &mut out, &|_, _| true);
        out.into_iter().map(|germs| CoverPath { start: x.clone(), germs }).collect()
    }

    /// Depth-first enumeration of tight germ sequences of length `n` from a
    /// vertex of type `v`; `allow(prev, next)` filters consecutive germs.
    pub fn extend_paths(
        &self,
        v: Vertex,
        n: usize,
        cur: &mut Vec<Germ>,
        out: &mut Vec<Vec<Germ>>,
        allow: &dyn Fn(Option<&Germ>, &Germ) -> bool,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let here = cur.last().map_or(v, |x| self.graph.terminus(x.edge));
        for e in self.graph.out_edges(here) {
            for i in 0..self.graph.width(e) {
                let next = Germ::new(i, e);
                if let Some(prev) = cur.last() {
                    if i == 0 && e == rev(prev.edge) {
                        continue;
                    }
                }
                if !allow(cur.last(), &next) {
                    continue;
                }
                cur.push(next);
                self.extend_paths(v, n, cur, out, allow);
                cur.pop();
            }
        }
    }

    /// Some `h` with `h·x = y`, namely `γ_y γ_x⁻¹`.
    pub fn same_orbit(&self, x: &Point, y: &Point) -> Option<Word> {
        if self.vertex_of(x) != self.vertex_of(y) {
            return None;
        }
        Some(self.word_of(y).concat(&self.word_of(x).inverse()))
    }

    /// Generator `γ_x a γ_x⁻¹` of the stabilizer of `x`.
    pub fn point_stabilizer(&self, x: &Point) -> Word {
        let w = self.word_of(x);
        w.concat(&Word::power(self.vertex_of(x), 1)).concat(&w.inverse())
    }

    /// Some `h` with `h·x = y` and `h·x' = y'`, by sweeping the stabilizer of
    /// `x` over the finite orbit of `x'`.
    pub fn pair_same_orbit(&self, x: &Point, xp: &Point, y: &Point, yp: &Point) -> Option<Word> {
        let g0 = self.same_orbit(x, y)?;
        if self.dist(x, xp) != self.dist(y, yp) {
            return None;
        }
        let a = self.point_stabilizer(x);
        let mut h = g0.clone();
        let mut cur = xp.clone();
        loop {
            if self.act_point(&g0, &cur) == *yp {
                return Some(h);
            }
            cur = self.act_point(&a, &cur);
            h = h.concat(&a);
            if cur == *xp {
                return None;
            }
        }
    }

    /// Canonical rotation of a path based at its start: the lexicographically
    /// least germ sequence among `nf(a^j · w)`.
    pub fn canonical_rotation(&self, start_vertex: Vertex, germs: &[Germ]) -> Canonical {
        canonical_rotation(&self.graph, start_vertex, germs)
    }

    /// Orbit key `(vertex, germs)` of a tight path and an element `h` with
    /// `h·p` equal to the representative path at `x_v`.
    pub fn orbit_normalize(&self, p: &CoverPath) -> (Canonical, Word) {
        let v = self.vertex_of(&p.start);
        let c = canonical_rotation(&self.graph, v, &p.germs);
        let gv = self.tree_word(v);
        let h = gv.concat(&Word::power(v, c.shift.clone())).concat(&self.word_of(&p.start).inverse());
        (c, h)
    }

    /// The representative of the orbit of `p`: same relative germs after
    /// rotation, based at `x_v`.
    pub fn orbit_rep(&self, p: &CoverPath) -> CoverPath {
        let v = self.vertex_of(&p.start);
        let c = canonical_rotation(&self.graph, v, &p.germs);
        CoverPath { start: self.vertex_rep(v).clone(), germs: c.germs }
    }

    /// Some `h` with `h·p = q`, if the paths are in one orbit.
    pub fn align_paths(&self, p: &CoverPath, q: &CoverPath) -> Option<Word> {
        let (cp, hp) = self.orbit_normalize(p);
        let (cq, hq) = self.orbit_normalize(q);
        if cp.vertex != cq.vertex || cp.germs != cq.germs {
            return None;
        }
        Some(hq.inverse().concat(&hp))
    }

    /// Generator of the pointwise stabilizer of a tight path.
    pub fn path_stabilizer(&self, p: &CoverPath) -> Word {
        let v = self.vertex_of(&p.start);
        let c = canonical_rotation(&self.graph, v, &p.germs);
        let w = self.word_of(&p.start);
        w.concat(&Word::power(v, c.period)).concat(&w.inverse())
    }

    /// Turn at interior vertex `k` (1-based, between germs `k-1` and `k`).
    pub fn turn_at(&self, germs: &[Germ], k: usize) -> TurnClass {
        let prev = germs[k - 1];
        let next = germs[k];
        let v = self.graph.terminus(prev.edge);
        turn_class(&self.graph, v, Germ::new(0, rev(prev.edge)), next)
    }

    pub fn translation_length(&self, h: &Word) -> Translation {
        assert!(h.is_loop() && h.start() == self.base());
        let gx = self.point(h);
        let g2x = self.point(&h.concat(h));
        let d1 = gx.depth();
        let d2 = g2x.depth();
        // overlap of [gx, x] with [gx, g²x]
        let overlap = (2 * d1 - d2.min(2 * d1)) / 2;
        if d2 <= d1 {
            debug_assert_eq!(d1 % 2, 0);
            let mid = Point { germs: gx.germs[..d1 / 2].to_vec() };
            return Translation { length: 0, kind: IsometryKind::Elliptic, fixed_point: Some(mid), axis: None };
        }
        let w = Point { germs: gx.germs[..overlap].to_vec() };
        let gw = self.act_point(h, &w);
        let axis = self.geodesic(&w, &gw);
        debug_assert_eq!(axis.len(), d2 - d1);
        Translation { length: d2 - d1, kind: IsometryKind::Loxodromic, fixed_point: None, axis: Some(axis) }
    }

    /// Translation length from displacements: `max(0, d(x,g²x) - d(x,gx))`.
    pub fn translation_length_oracle(&self, h: &Word) -> usize {
        let d1 = self.point(h).depth();
        let d2 = self.point(&h.concat(h)).depth();
        d2.saturating_sub(d1)
    }
}

pub fn is_tight_germs(germs: &[Germ]) -> bool {
    germs.windows(2).all(|w| !(w[1].idx == 0 && w[1].edge == rev(w[0].edge)))
}

pub fn common_prefix(a: &[Germ], b: &[Germ]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    // a and m coprime, m ≥ 1
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(m).extended_gcd(m);
    e.x.mod_floor(m)
}

/// See [`Cover::canonical_rotation`]. The germs must form a tight path.
pub fn canonical_rotation(g: &GraphOfGroups, v: Vertex, germs: &[Germ]) -> Canonical {
    let mut out = Vec::with_capacity(germs.len());
    // shifting the input by `step·s` moves the exponent in front of the
    // current germ by `delta·s`
    let mut shift = BigInt::zero();
    let mut step = BigInt::one();
    let mut delta = BigInt::one();
    let mut carry = BigInt::zero();
    let mut here = v;
    for x in germs {
        debug_assert_eq!(g.origin(x.edge), here);
        let l = g.label(x.edge);
        let lw = BigInt::from(l.abs());
        let cur = BigInt::from(x.idx) + &carry;
        let gg = delta.abs().gcd(&lw);
        let target = cur.mod_floor(&gg);
        let m = &lw / &gg;
        // solve delta·s ≡ target - cur (mod lw)
        let rhs = (&target - &cur) / &gg;
        let s = (rhs * mod_inverse(&(&delta / &gg), &m)).mod_floor(&m);
        let cur = cur + &delta * &s;
        shift += &step * &s;
        let (q, r) = cur.div_mod_floor(&lw);
        debug_assert_eq!(r, target);
        let q = if l < 0 { -q } else { q };
        out.push(Germ::new(r.to_i64().unwrap(), x.edge));
        carry = q * g.label(rev(x.edge));
        // only multiples of m keep this germ fixed
        delta = &delta * &m * g.label(rev(x.edge)) / l;
        step *= &m;
        here = g.terminus(x.edge);
    }
    Canonical { vertex: v, germs: out, shift, period: step }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn bs(p: i64, q: i64) -> Cover {
        let mut b = GraphBuilder::new();
        let v = b.vertex("v");
        b.edge("t", "T", v, v, p, q);
        Cover::new(b.build(0).unwrap())
    }

    #[test]
    fn bs23_local_counts() {
        let c = bs(2, 3);
        let x = c.root();
        assert_eq!(c.edge_paths_from(&x, 0).len(), 1);
        assert_eq!(c.edge_paths_from(&x, 1).len(), 5);
        assert_eq!(c.edge_paths_from(&x, 2).len(), 20);
    }

    #[test]
    fn rotation_matches_brute_force() {
        let c = bs(2, 3);
        for p in c.edge_paths_from(&c.root(), 3) {
            let can = c.canonical_rotation(0, &p.germs);
            let mut best: Option<Vec<Germ>> = None;
            for j in -40i64..40 {
                let rel = germ_word(&c.graph, 0, &p.germs, &BigInt::zero());
                let w = Word::power(0, j).concat(&rel);
                let nf = normalize(&c.graph, &w);
                if best.as_ref().map_or(true, |b| nf.germs < *b) {
                    best = Some(nf.germs.clone());
                }
                if BigInt::from(j) == can.shift {
                    assert_eq!(nf.germs, can.germs);
                }
            }
            assert_eq!(Some(can.germs), best);
        }
    }
}
