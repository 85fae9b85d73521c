//! Words in the Bass group: reduction, the normal form, the word problem,
//! the modulus and edge subdivision.
//!
//! A word `a^{k0} t_{e1} a^{k1} … t_{en} a^{kn}` is stored as its exponent
//! list (length `n + 1`) and edge list (length `n`). The defining relation
//! is `a_{o(e)}^{λ(e)} = t_e a_{t(e)}^{λ(ē)} t_e⁻¹`, with `t_ē = t_e⁻¹`.

use crate::graph::{rev, Edge, GraphBuilder, GraphOfGroups, Vertex};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {index} does not continue the path")]
    Malformed { index: usize },
    #[error("word is not a loop")]
    NotALoop,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("word ends at `{found}`, expected `{expected}`")]
    WrongEndpoint { expected: String, found: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    start: Vertex,
    end: Vertex,
    exps: Vec<BigInt>,
    edges: Vec<Edge>,
}

impl Word {
    pub fn empty(v: Vertex) -> Self {
        Word { start: v, end: v, exps: vec![BigInt::zero()], edges: Vec::new() }
    }

    pub fn power(v: Vertex, k: impl Into<BigInt>) -> Self {
        Word { start: v, end: v, exps: vec![k.into()], edges: Vec::new() }
    }

    pub fn letter(g: &GraphOfGroups, e: Edge) -> Self {
        let mut w = Word::empty(g.origin(e));
        w.push_edge(g, e);
        w
    }

    pub fn from_parts(
        g: &GraphOfGroups,
        start: Vertex,
        exps: Vec<BigInt>,
        edges: Vec<Edge>,
    ) -> Result<Self, WordError> {
        if exps.len() != edges.len() + 1 {
            return Err(WordError::Malformed { index: exps.len().min(edges.len()) });
        }
        let mut v = start;
        for (i, &e) in edges.iter().enumerate() {
            if e >= g.num_edges() || g.origin(e) != v {
                return Err(WordError::Malformed { index: i });
            }
            v = g.terminus(e);
        }
        Ok(Word { start, end: v, exps, edges })
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn end(&self) -> Vertex {
        self.end
    }

    /// Number of edge letters.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.exps[0].is_zero()
    }

    pub fn exps(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }

    pub fn push_power(&mut self, k: &BigInt) {
        *self.exps.last_mut().unwrap() += k;
    }

    pub fn push_edge(&mut self, g: &GraphOfGroups, e: Edge) {
        assert_eq!(g.origin(e), self.end, "edge letter does not continue the word");
        self.edges.push(e);
        self.exps.push(BigInt::zero());
        self.end = g.terminus(e);
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn append(&mut self, other: &Word) {
        assert_eq!(self.end, other.start, "words are not composable");
        *self.exps.last_mut().unwrap() += &other.exps[0];
        self.exps.extend(other.exps[1..].iter().cloned());
        self.edges.extend_from_slice(&other.edges);
        self.end = other.end;
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.append(other);
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            start: self.end,
            end: self.start,
            exps: self.exps.iter().rev().map(|k| -k).collect(),
            edges: self.edges.iter().rev().map(|&e| rev(e)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Word {
        assert!(self.is_loop());
        let mut w = Word::empty(self.start);
        for _ in 0..n {
            w.append(self);
        }
        w
    }

    pub fn from_letters(
        g: &GraphOfGroups,
        default_start: Vertex,
        letters: &[Letter],
    ) -> Result<Word, WordError> {
        let start = match letters.first() {
            None => default_start,
            Some(Letter::Vertex { vertex, .. }) => {
                g.vertex_by_name(vertex).ok_or_else(|| WordError::UnknownVertex(vertex.clone()))?
            }
            Some(Letter::Edge { edge }) => {
                g.origin(g.edge_by_name(edge).ok_or_else(|| WordError::UnknownEdge(edge.clone()))?)
            }
        };
        let mut w = Word::empty(start);
        for (i, l) in letters.iter().enumerate() {
            match l {
                Letter::Vertex { vertex, exp } => {
                    let v = g.vertex_by_name(vertex).ok_or_else(|| WordError::UnknownVertex(vertex.clone()))?;
                    if v != w.end {
                        return Err(WordError::Malformed { index: i });
                    }
                    w.push_power(&exp.0);
                }
                Letter::Edge { edge } => {
                    let e = g.edge_by_name(edge).ok_or_else(|| WordError::UnknownEdge(edge.clone()))?;
                    if g.origin(e) != w.end {
                        return Err(WordError::Malformed { index: i });
                    }
                    w.push_edge(g, e);
                }
            }
        }
        Ok(w)
    }

    /// Parses whitespace separated tokens: `name^k` is a vertex power and a
    /// bare name is an edge.
    pub fn parse(g: &GraphOfGroups, default_start: Vertex, text: &str) -> Result<Word, WordError> {
        Word::from_letters(g, default_start, &parse_letters(text)?)
    }

    pub fn to_letters(&self, g: &GraphOfGroups) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut v = self.start;
        for i in 0..=self.edges.len() {
            if !self.exps[i].is_zero() {
                out.push(Letter::Vertex { vertex: g.vertex_name(v).to_string(), exp: Exp(self.exps[i].clone()) });
            }
            if i < self.edges.len() {
                let e = self.edges[i];
                out.push(Letter::Edge { edge: g.edge_name(e).to_string() });
                v = g.terminus(e);
            }
        }
        out
    }

    pub fn display<'a>(&'a self, g: &'a GraphOfGroups) -> WordDisplay<'a> {
        WordDisplay { w: self, g }
    }
}

pub struct WordDisplay<'a> {
    w: &'a Word,
    g: &'a GraphOfGroups,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut v = self.w.start;
        for i in 0..=self.w.edges.len() {
            let k = &self.w.exps[i];
            if !k.is_zero() {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}^{}", self.g.vertex_name(v), k)?;
                first = false;
            }
            if i < self.w.edges.len() {
                if !first {
                    write!(f, " ")?;
                }
                let e = self.w.edges[i];
                write!(f, "{}", self.g.edge_name(e))?;
                v = self.g.terminus(e);
                first = false;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Arbitrary precision exponent; serialized as a JSON integer when it fits
/// in 64 bits and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exp(pub BigInt);

impl Serialize for Exp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(k) => s.serialize_i64(k),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Exp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            I(i64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::I(k) => Ok(Exp(BigInt::from(k))),
            Repr::S(s) => s.parse::<BigInt>().map(Exp).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Letter {
    Vertex { vertex: String, exp: Exp },
    Edge { edge: String },
}

pub fn parse_letters(text: &str) -> Result<Vec<Letter>, WordError> {
    text.split_whitespace()
        .enumerate()
        .map(|(index, tok)| match tok.split_once('^') {
            Some((v, k)) => k
                .parse::<BigInt>()
                .map(|k| Letter::Vertex { vertex: v.to_string(), exp: Exp(k) })
                .map_err(|_| WordError::Malformed { index }),
            None => Ok(Letter::Edge { edge: tok.to_string() }),
        })
        .collect()
}

/// A coset representative `a^idx t_e` with `0 ≤ idx < |λ(e)|`: one edge of
/// the tree leaving a vertex, in the coordinates of a chosen word for that
/// vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Germ {
    pub idx: i64,
    pub edge: Edge,
}

impl Germ {
    pub fn new(idx: i64, edge: Edge) -> Self {
        Germ { idx, edge }
    }
}

/// Unique normal form of a path word: a germ sequence without backtracking
/// followed by a terminal vertex-group power.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub start: Vertex,
    pub germs: Vec<Germ>,
    pub carry: BigInt,
}

impl NormalForm {
    pub fn end(&self, g: &GraphOfGroups) -> Vertex {
        self.germs.last().map_or(self.start, |x| g.terminus(x.edge))
    }

    pub fn to_word(&self, g: &GraphOfGroups) -> Word {
        germ_word(g, self.start, &self.germs, &self.carry)
    }
}

/// Word `a^{i1} t_{e1} … a^{in} t_{en} a^{carry}`.
pub fn germ_word(g: &GraphOfGroups, start: Vertex, germs: &[Germ], carry: &BigInt) -> Word {
    let mut w = Word::empty(start);
    for x in germs {
        w.push_power(&BigInt::from(x.idx));
        w.push_edge(g, x.edge);
    }
    w.push_power(carry);
    w
}

/// Streaming left-to-right normalizer.
#[derive(Clone, Debug)]
pub struct Normalizer {
    start: Vertex,
    vertex: Vertex,
    germs: Vec<Germ>,
    carry: BigInt,
}

impl Normalizer {
    pub fn new(start: Vertex) -> Self {
        Normalizer { start, vertex: start, germs: Vec::new(), carry: BigInt::zero() }
    }

    /// Starts from an existing normal form.
    pub fn resume(nf: NormalForm, g: &GraphOfGroups) -> Self {
        let vertex = nf.end(g);
        Normalizer { start: nf.start, vertex, germs: nf.germs, carry: nf.carry }
    }

    pub fn vertex(&self) -> Vertex {
        self.vertex
    }

    pub fn len(&self) -> usize {
        self.germs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.germs.is_empty()
    }

    pub fn push_power(&mut self, k: &BigInt) {
        self.carry += k;
    }

    pub fn push_edge(&mut self, g: &GraphOfGroups, e: Edge) {
        debug_assert_eq!(g.origin(e), self.vertex);
        let l = g.label(e);
        let (q, r) = self.carry.div_mod_floor(&BigInt::from(l.abs()));
        let q = if l < 0 { -q } else { q };
        if r.is_zero() {
            if let Some(top) = self.germs.last() {
                if top.edge == rev(e) {
                    // t_d a^{q λ(d̄)} t_d⁻¹ = a^{q λ(d)}
                    let top = self.germs.pop().unwrap();
                    self.carry = BigInt::from(top.idx) + q * g.label(top.edge);
                    self.vertex = g.origin(top.edge);
                    return;
                }
            }
        }
        self.germs.push(Germ { idx: r.to_i64().unwrap(), edge: e });
        self.carry = q * g.label(rev(e));
        self.vertex = g.terminus(e);
    }

    pub fn push_word(&mut self, g: &GraphOfGroups, w: &Word) {
        debug_assert_eq!(w.start, self.vertex);
        self.push_power(&w.exps[0]);
        for (i, &e) in w.edges.iter().enumerate() {
            self.push_edge(g, e);
            self.push_power(&w.exps[i + 1]);
        }
    }

    pub fn push_germs(&mut self, g: &GraphOfGroups, germs: &[Germ]) {
        for x in germs {
            self.push_power(&BigInt::from(x.idx));
            self.push_edge(g, x.edge);
        }
    }

    pub fn finish(self) -> NormalForm {
        NormalForm { start: self.start, germs: self.germs, carry: self.carry }
    }
}

pub fn normalize(g: &GraphOfGroups, w: &Word) -> NormalForm {
    let mut n = Normalizer::new(w.start);
    n.push_word(g, w);
    n.finish()
}

/// Britton reduction: pinches `t_d a^{mλ(d̄)} t_d̄ → a^{mλ(d)}`, innermost
/// first. The result has no pinchable subword.
pub fn reduce_word(g: &GraphOfGroups, w: &Word) -> Word {
    let mut exps: Vec<BigInt> = vec![w.exps[0].clone()];
    let mut edges: Vec<Edge> = Vec::new();
    for (k, &e) in w.edges.iter().enumerate() {
        if let Some(&d) = edges.last() {
            let c = exps.last().unwrap();
            if d == rev(e) && c.is_multiple_of(&BigInt::from(g.label(e))) {
                let c = exps.pop().unwrap();
                edges.pop();
                let m = c / g.label(e);
                let top = exps.last_mut().unwrap();
                *top += m * g.label(d);
                *top += &w.exps[k + 1];
                continue;
            }
        }
        edges.push(e);
        exps.push(w.exps[k + 1].clone());
    }
    Word { start: w.start, end: w.end, exps, edges }
}

/// Word problem for loops.
pub fn is_trivial(g: &GraphOfGroups, w: &Word) -> Result<bool, WordError> {
    if !w.is_loop() {
        return Err(WordError::NotALoop);
    }
    let r = reduce_word(g, w);
    Ok(r.edges.is_empty() && r.exps[0].is_zero())
}

/// Reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    pub num: BigInt,
    pub den: BigInt,
}

impl Modulus {
    pub fn one() -> Self {
        Modulus { num: BigInt::one(), den: BigInt::one() }
    }

    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!num.is_zero() && !den.is_zero());
        let d = num.gcd(&den);
        let (mut n, mut m) = (num / &d, den / &d);
        if m.is_negative() {
            n = -n;
            m = -m;
        }
        Modulus { num: n, den: m }
    }

    pub fn mul(&self, other: &Modulus) -> Modulus {
        Modulus::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Product of `λ(e)/λ(ē)` over the edge letters of a loop.
pub fn modulus(g: &GraphOfGroups, w: &Word) -> Result<Modulus, WordError> {
    if !w.is_loop() {
        return Err(WordError::NotALoop);
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for &e in &w.edges {
        num *= g.label(e);
        den *= g.label(rev(e));
    }
    Ok(Modulus::new(num, den))
}

/// Maps words of one marked graph to another: `a_v^k ↦ a_{vm(v)}^{mult(v) k}`
/// and `t_e ↦` a product of edge letters (possibly empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewriter {
    pub vertex_map: Vec<Vertex>,
    pub vertex_mult: Vec<BigInt>,
    pub edge_map: Vec<Vec<Edge>>,
}

impl Rewriter {
    pub fn identity(g: &GraphOfGroups) -> Self {
        Rewriter {
            vertex_map: (0..g.num_vertices()).collect(),
            vertex_mult: vec![BigInt::one(); g.num_vertices()],
            edge_map: (0..g.num_edges()).map(|e| vec![e]).collect(),
        }
    }

    /// Rewrites a word of `source` into `target`.
    pub fn apply(&self, source: &GraphOfGroups, target: &GraphOfGroups, w: &Word) -> Word {
        let mut out = Word::empty(self.vertex_map[w.start]);
        let mut v = w.start;
        for i in 0..=w.edges.len() {
            out.push_power(&(&w.exps[i] * &self.vertex_mult[v]));
            if i < w.edges.len() {
                let e = w.edges[i];
                for &d in &self.edge_map[e] {
                    out.push_edge(target, d);
                }
                v = source.terminus(e);
            }
        }
        out
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Rewriter) -> Rewriter {
        Rewriter {
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            vertex_mult: self
                .vertex_map
                .iter()
                .zip(&self.vertex_mult)
                .map(|(&v, k)| k * &next.vertex_mult[v])
                .collect(),
            edge_map: self
                .edge_map
                .iter()
                .map(|ds| ds.iter().flat_map(|&d| next.edge_map[d].iter().copied()).collect())
                .collect(),
        }
    }
}

/// Subdivides `e` into `pieces` edges. Labels: the first piece carries
/// `(λ(e), 1)`, middle pieces `(1, 1)`, the last `(1, λ(ē))`.
pub fn subdivide_edge_into(
    g: &GraphOfGroups,
    e: Edge,
    pieces: usize,
) -> Result<(GraphOfGroups, Rewriter), WordError> {
    if e >= g.num_edges() {
        return Err(WordError::UnknownEdge(e.to_string()));
    }
    assert!(pieces >= 1);
    let mut b = GraphBuilder::new();
    for v in 0..g.num_vertices() {
        b.vertex(g.vertex_name(v));
    }
    let fresh: Vec<Vertex> =
        (1..pieces).map(|j| b.vertex(format!("{}@{}", g.edge_name(e), j))).collect();
    let mut edge_map: Vec<Vec<Edge>> = vec![Vec::new(); g.num_edges()];
    for k in 0..g.num_orbits() {
        let p = 2 * k;
        if p == e & !1 {
            let (o, t) = (g.origin(e), g.terminus(e));
            let mut stops = vec![o];
            stops.extend(fresh.iter().copied());
            stops.push(t);
            let mut fwd = Vec::new();
            for j in 0..pieces {
                let l = if j == 0 { g.label(e) } else { 1 };
                let rl = if j + 1 == pieces { g.label(rev(e)) } else { 1 };
                let name = if pieces == 1 { g.edge_name(e).to_string() } else { format!("{}.{}", g.edge_name(e), j) };
                let rname = if pieces == 1 {
                    g.edge_name(rev(e)).to_string()
                } else {
                    format!("{}.{}", g.edge_name(rev(e)), j)
                };
                fwd.push(b.edge(name, rname, stops[j], stops[j + 1], l, rl));
            }
            edge_map[rev(e)] = fwd.iter().rev().map(|&d| rev(d)).collect();
            edge_map[e] = fwd;
        } else {
            let d = b.edge(g.edge_name(p), g.edge_name(p + 1), g.origin(p), g.terminus(p), g.label(p), g.label(p + 1));
            edge_map[p] = vec![d];
            edge_map[p + 1] = vec![rev(d)];
        }
    }
    let ng = b.build_unguarded(g.base()).expect("subdivision keeps the graph valid");
    let rw = Rewriter {
        vertex_map: (0..g.num_vertices()).collect(),
        vertex_mult: vec![BigInt::one(); g.num_vertices()],
        edge_map,
    };
    Ok((ng, rw))
}

pub fn subdivide_edge(g: &GraphOfGroups, e: Edge) -> Result<(GraphOfGroups, Rewriter), WordError> {
    subdivide_edge_into(g, e, 2)
}
