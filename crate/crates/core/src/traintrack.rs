//! Train track maps on the Bass-Serre tree.
//!
//! A map is stored as a morphism `Ψ` of path words: `Ψ(a_v) = a_{f(v)}^{m_v}`
//! and `Ψ(t_e) = ω_e`, plus the word `W₀` reaching the image of the base
//! lift. Then `f(γ·x₀) = W₀Ψ(γ)·x₀` and `φ(g) = W₀Ψ(g)W₀⁻¹`.

use crate::cover::{turn_class, turn_classes_at, Cover, CoverPath, Point, TurnClass};
use crate::graph::{rev, Edge, GraphOfGroups, GraphSpec, Vertex, SCHEMA_VERSION};
use crate::matrix::Matrix;
use crate::word::{normalize, reduce_word, Germ, Letter, NormalForm, Normalizer, Word, WordError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Marking generators: `A_v = γ_v a_v γ_v⁻¹` and, for positive edges off
/// the spanning tree, `T_e = γ_{o(e)} t_e γ_{t(e)}⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Vertex(Vertex),
    Edge(Edge),
}

pub fn generators(c: &Cover) -> Vec<Generator> {
    let g = c.g();
    let mut out: Vec<Generator> = (0..g.num_vertices()).map(Generator::Vertex).collect();
    for k in 0..g.num_orbits() {
        if !c.is_tree_edge(2 * k) {
            out.push(Generator::Edge(2 * k));
        }
    }
    out
}

pub fn generator_word(c: &Cover, x: Generator) -> Word {
    let g = c.g();
    match x {
        Generator::Vertex(v) => {
            let gv = c.tree_word(v);
            gv.concat(&Word::power(v, 1)).concat(&gv.inverse())
        }
        Generator::Edge(e) => c
            .tree_word(g.origin(e))
            .concat(&Word::letter(g, e))
            .concat(&c.tree_word(g.terminus(e)).inverse()),
    }
}

pub fn generator_name(g: &GraphOfGroups, x: Generator) -> String {
    match x {
        Generator::Vertex(v) => g.vertex_name(v).to_string(),
        Generator::Edge(e) => g.edge_name(e).to_string(),
    }
}

/// Writes a loop at the base as a product of generator powers.
pub fn decompose(c: &Cover, w: &Word) -> Vec<(Generator, BigInt)> {
    assert!(w.is_loop() && w.start() == c.base());
    let g = c.g();
    let mut out = Vec::new();
    let mut v = w.start();
    for i in 0..=w.len() {
        let k = &w.exps()[i];
        if !k.is_zero() {
            out.push((Generator::Vertex(v), k.clone()));
        }
        if i < w.len() {
            let e = w.edges()[i];
            if !c.is_tree_edge(e) {
                if e % 2 == 0 {
                    out.push((Generator::Edge(e), BigInt::from(1)));
                } else {
                    out.push((Generator::Edge(rev(e)), BigInt::from(-1)));
                }
            }
            v = g.terminus(e);
        }
    }
    out
}

/// `w^k` for a loop, by repeated squaring on normal forms.
pub fn word_pow(g: &GraphOfGroups, w: &Word, k: &BigInt) -> Word {
    let mut base = if k.is_negative() { w.inverse() } else { w.clone() };
    let mut e = k.abs();
    let mut acc = Word::empty(w.start());
    let two = BigInt::from(2);
    while !e.is_zero() {
        if (&e % &two) == BigInt::from(1) {
            acc = normalize(g, &acc.concat(&base)).to_word(g);
        }
        e /= &two;
        if !e.is_zero() {
            base = normalize(g, &base.concat(&base)).to_word(g);
        }
    }
    acc
}

/// Substitutes generator images into a loop.
pub fn substitute(c: &Cover, images: &HashMap<Generator, Word>, w: &Word) -> Word {
    let mut out = Word::empty(c.base());
    for (x, k) in decompose(c, w) {
        out = out.concat(&word_pow(c.g(), &images[&x], &k));
    }
    normalize(c.g(), &out).to_word(c.g())
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GeneratorImages {
    #[serde(default)]
    pub vertices: BTreeMap<String, Vec<Letter>>,
    #[serde(default)]
    pub edges: BTreeMap<String, Vec<Letter>>,
}

/// Input description of a train track representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub schema_version: u32,
    pub phi: GeneratorImages,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_inverse: Option<GeneratorImages>,
    /// Word from the base vertex reaching the image of `x_v`.
    pub vertex_images: BTreeMap<String, Vec<Letter>>,
    /// Image of the edge `(x_{o(e)}, t_e)` as letters relative to the image
    /// word of its origin.
    #[serde(default)]
    pub edge_images: BTreeMap<String, Vec<Letter>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u32),
    #[error("{context}: {source}")]
    Word { context: String, source: WordError },
    #[error("missing image for generator `{0}`")]
    MissingGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("missing image for vertex `{0}`")]
    MissingVertexImage(String),
    #[error("image of `{0}` is not a loop at the base vertex")]
    NotALoop(String),
    #[error("image word of vertex `{0}` does not start at the base vertex")]
    BadVertexImage(String),
    #[error("phi does not send the stabilizer of the lift of `{0}` into the stabilizer of its image")]
    NotEquivariant(String),
    #[error("edge relation fails for `{0}`")]
    RelationFails(String),
    #[error("declared image of `{0}` differs from the image forced by phi")]
    EdgeImageMismatch(String),
    #[error("phi and phi_inverse are not mutually inverse on `{0}`")]
    NotAutomorphism(String),
}

fn word_err(context: impl Into<String>) -> impl FnOnce(WordError) -> MapError {
    let context = context.into();
    move |source| MapError::Word { context, source }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrackMap {
    pub cover: Cover,
    pub vertex_map: Vec<Vertex>,
    pub vertex_exp: Vec<BigInt>,
    /// `ω_e` for every oriented edge, in normal form.
    pub edge_words: Vec<Word>,
    pub base_word: Word,
    /// Images of the marking generators under `φ⁻¹`, when known.
    pub phi_inverse: Option<HashMap<Generator, Word>>,
    /// Edges whose declared image was not tight.
    pub declared_untight: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    EmptyImage { edge: String },
    Backtracking { edge: String },
    IllegalTurn { edge: String, position: usize, turn: TurnClass },
    NotEquivariant { sample: usize },
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Counterexample::EmptyImage { edge } => write!(f, "image of `{edge}` is a point"),
            Counterexample::Backtracking { edge } => write!(f, "image of `{edge}` backtracks"),
            Counterexample::IllegalTurn { edge, position, turn } => {
                write!(f, "image of `{edge}` crosses illegal turn {turn:?} at position {position}")
            }
            Counterexample::NotEquivariant { sample } => write!(f, "equivariance fails on sample {sample}"),
        }
    }
}

/// Induced turn map on orbit classes with legality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnTable {
    pub classes: Vec<TurnClass>,
    pub index: HashMap<TurnClass, usize>,
    pub image: Vec<usize>,
    pub legal: Vec<bool>,
}

impl TurnTable {
    pub fn is_legal(&self, t: &TurnClass) -> bool {
        self.legal[self.index[t]]
    }
}

impl TrainTrackMap {
    pub fn graph(&self) -> &GraphOfGroups {
        self.cover.g()
    }

    pub fn from_spec(graph: GraphOfGroups, spec: &MapSpec) -> Result<Self, MapError> {
        if spec.schema_version != SCHEMA_VERSION {
            return Err(MapError::SchemaVersion(spec.schema_version));
        }
        let cover = Cover::new(graph);
        let g = cover.g().clone();
        let base = g.base();
        let gens = generators(&cover);
        let mut w_v = Vec::new();
        for v in 0..g.num_vertices() {
            let name = g.vertex_name(v);
            let letters = spec.vertex_images.get(name).ok_or_else(|| MapError::MissingVertexImage(name.into()))?;
            let w = Word::from_letters(&g, base, letters).map_err(word_err(format!("vertex image `{name}`")))?;
            if w.start() != base {
                return Err(MapError::BadVertexImage(name.into()));
            }
            w_v.push(w);
        }
        let phi = parse_images(&cover, &gens, &spec.phi, "phi")?;
        let mut vertex_map = Vec::new();
        let mut vertex_exp = Vec::new();
        for v in 0..g.num_vertices() {
            let conj = w_v[v].inverse().concat(&phi[&Generator::Vertex(v)]).concat(&w_v[v]);
            let nf = normalize(&g, &conj);
            if !nf.germs.is_empty() || nf.carry.is_zero() {
                return Err(MapError::NotEquivariant(g.vertex_name(v).into()));
            }
            vertex_map.push(w_v[v].end());
            vertex_exp.push(nf.carry);
        }
        let mut edge_words = vec![Word::empty(0); g.num_edges()];
        for k in 0..g.num_orbits() {
            let e = 2 * k;
            let (o, t) = (g.origin(e), g.terminus(e));
            let te = phi.get(&Generator::Edge(e)).cloned().unwrap_or_else(|| Word::empty(base));
            let om = normalize(&g, &w_v[o].inverse().concat(&te).concat(&w_v[t])).to_word(&g);
            edge_words[e + 1] = normalize(&g, &om.inverse()).to_word(&g);
            edge_words[e] = om;
        }
        let mut map = TrainTrackMap {
            cover,
            vertex_map,
            vertex_exp,
            edge_words,
            base_word: w_v[base].clone(),
            phi_inverse: None,
            declared_untight: Vec::new(),
        };
        for e in 0..g.num_edges() {
            let (o, t) = (g.origin(e), g.terminus(e));
            let lhs = Word::power(map.vertex_map[o], &map.vertex_exp[o] * g.label(e)).concat(&map.edge_words[e]);
            let rhs = map.edge_words[e].concat(&Word::power(map.vertex_map[t], &map.vertex_exp[t] * g.label(rev(e))));
            let r = reduce_word(&g, &lhs.concat(&rhs.inverse()));
            if r.len() != 0 || !r.exps()[0].is_zero() {
                return Err(MapError::RelationFails(g.edge_name(e).into()));
            }
        }
        for (name, letters) in &spec.edge_images {
            let e = g.edge_by_name(name).ok_or_else(|| MapError::Word {
                context: "edge image".into(),
                source: WordError::UnknownEdge(name.clone()),
            })?;
            let o = g.origin(e);
            let img = map.image_vertex_word(o);
            let rel = Word::from_letters(&g, map.vertex_map[o], letters).map_err(word_err(format!("edge image `{name}`")))?;
            if rel.start() != map.vertex_map[o] {
                return Err(MapError::EdgeImageMismatch(name.clone()));
            }
            if reduce_word(&g, &rel).len() != rel.len() {
                map.declared_untight.push(e);
            }
            let declared = map.cover.anchored(&img, &rel);
            let forced = map.cover.anchored(&img, &map.edge_words[e]);
            if declared != forced {
                return Err(MapError::EdgeImageMismatch(name.clone()));
            }
        }
        if let Some(inv) = &spec.phi_inverse {
            let inv = parse_images(&map.cover, &gens, inv, "phi_inverse")?;
            for &x in &gens {
                let gx = generator_word(&map.cover, x);
                let there = map.phi(&substitute(&map.cover, &inv, &gx));
                let back = substitute(&map.cover, &inv, &map.phi(&gx));
                for w in [there, back] {
                    if !crate::word::is_trivial(&g, &w.concat(&gx.inverse())).unwrap() {
                        return Err(MapError::NotAutomorphism(generator_name(&g, x)));
                    }
                }
            }
            map.phi_inverse = Some(inv);
        }
        Ok(map)
    }

    /// Builds a map from `Ψ` data (images of positive edges only) and
    /// re-validates it through its serialized form.
    pub fn from_psi(
        graph: GraphOfGroups,
        vertex_map: Vec<Vertex>,
        vertex_exp: Vec<BigInt>,
        positive_images: Vec<Word>,
        base_word: Word,
        phi_inverse: Option<HashMap<Generator, Word>>,
    ) -> Result<Self, MapError> {
        let g = graph.clone();
        let mut edge_words = Vec::new();
        for w in &positive_images {
            let w = normalize(&g, w).to_word(&g);
            edge_words.push(w.clone());
            edge_words.push(normalize(&g, &w.inverse()).to_word(&g));
        }
        let draft = TrainTrackMap {
            cover: Cover::new(graph.clone()),
            vertex_map,
            vertex_exp,
            edge_words,
            base_word: normalize(&g, &base_word).to_word(&g),
            phi_inverse,
            declared_untight: Vec::new(),
        };
        TrainTrackMap::from_spec(graph, &draft.to_spec())
    }

    pub fn to_spec(&self) -> MapSpec {
        let g = self.graph();
        let c = &self.cover;
        let gens = generators(c);
        let images = |f: &dyn Fn(&Word) -> Word| {
            let mut out = GeneratorImages::default();
            for &x in &gens {
                let w = f(&generator_word(c, x)).to_letters(g);
                match x {
                    Generator::Vertex(v) => out.vertices.insert(g.vertex_name(v).into(), w),
                    Generator::Edge(e) => out.edges.insert(g.edge_name(e).into(), w),
                };
            }
            out
        };
        let phi = images(&|w| self.phi(w));
        let phi_inverse = self.phi_inverse.as_ref().map(|inv| images(&|w| substitute(c, inv, w)));
        let mut vertex_images = BTreeMap::new();
        for v in 0..g.num_vertices() {
            vertex_images.insert(g.vertex_name(v).to_string(), self.image_vertex_word(v).to_letters(g));
        }
        let mut edge_images = BTreeMap::new();
        for k in 0..g.num_orbits() {
            edge_images.insert(g.edge_name(2 * k).to_string(), self.edge_words[2 * k].to_letters(g));
        }
        MapSpec { schema_version: SCHEMA_VERSION, phi, phi_inverse, vertex_images, edge_images }
    }

    /// Word reaching `f(x_v)`, in normal form.
    pub fn image_vertex_word(&self, v: Vertex) -> Word {
        let w = self.base_word.concat(&self.psi(self.cover.tree_word(v)));
        normalize(self.graph(), &w).to_word(self.graph())
    }

    /// `Ψ` on path words.
    pub fn psi(&self, w: &Word) -> Word {
        let g = self.graph();
        let mut out = Word::empty(self.vertex_map[w.start()]);
        let mut v = w.start();
        for i in 0..=w.len() {
            out.push_power(&(&w.exps()[i] * &self.vertex_exp[v]));
            if i < w.len() {
                let e = w.edges()[i];
                out.append(&self.edge_words[e]);
                v = g.terminus(e);
            }
        }
        out
    }

    /// Normal form of `Ψ` applied to a germ word from a vertex of type `v`.
    pub fn psi_germs(&self, v: Vertex, germs: &[Germ]) -> NormalForm {
        let g = self.graph();
        let mut n = Normalizer::new(self.vertex_map[v]);
        let mut here = v;
        for x in germs {
            n.push_power(&(BigInt::from(x.idx) * &self.vertex_exp[here]));
            n.push_word(g, &self.edge_words[x.edge]);
            here = g.terminus(x.edge);
        }
        n.finish()
    }

    /// The automorphism on loops at the base.
    pub fn phi(&self, w: &Word) -> Word {
        let x = self.base_word.concat(&self.psi(w)).concat(&self.base_word.inverse());
        normalize(self.graph(), &x).to_word(self.graph())
    }

    pub fn image_point(&self, p: &Point) -> Point {
        let w = self.base_word.concat(&self.psi(&self.cover.word_of(p)));
        self.cover.point(&w)
    }

    /// Tightened image of a path.
    pub fn image_path(&self, p: &CoverPath) -> CoverPath {
        let g = self.graph();
        let (start, carry) = self.cover.locate(&self.base_word.concat(&self.psi(&self.cover.word_of(&p.start))));
        let mut n = Normalizer::new(self.vertex_map[self.cover.vertex_of(&p.start)]);
        n.push_power(&carry);
        let mut here = self.cover.vertex_of(&p.start);
        for x in &p.germs {
            n.push_power(&(BigInt::from(x.idx) * &self.vertex_exp[here]));
            n.push_word(g, &self.edge_words[x.edge]);
            here = g.terminus(x.edge);
        }
        CoverPath { start, germs: n.finish().germs }
    }

    /// Derivative on germs in local coordinates: `(i, e)` at a vertex of type
    /// `v` goes to the first germ of `a^{m_v i} ω_e`.
    pub fn df(&self, v: Vertex, x: Germ) -> Germ {
        let g = self.graph();
        debug_assert_eq!(g.origin(x.edge), v);
        let om = &self.edge_words[x.edge];
        let first = om.edges()[0];
        let idx = (&self.vertex_exp[v] * x.idx + &om.exps()[0]).mod_floor(&BigInt::from(g.width(first)));
        Germ::new(idx.to_i64().unwrap(), first)
    }

    pub fn turn_image(&self, t: &TurnClass) -> TurnClass {
        let a = self.df(t.vertex, Germ::new(0, t.e1));
        let b = self.df(t.vertex, Germ::new(t.d, t.e2));
        turn_class(self.graph(), self.vertex_map[t.vertex], a, b)
    }

    pub fn turn_table(&self) -> TurnTable {
        let g = self.graph();
        let classes: Vec<TurnClass> = (0..g.num_vertices()).flat_map(|v| turn_classes_at(g, v)).collect();
        let index: HashMap<TurnClass, usize> = classes.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let image: Vec<usize> = classes.iter().map(|t| index[&self.turn_image(t)]).collect();
        // 0 unknown, 1 on stack, 2 legal, 3 illegal
        let mut state = vec![0u8; classes.len()];
        for s in 0..classes.len() {
            let mut path = Vec::new();
            let mut c = s;
            let verdict = loop {
                match state[c] {
                    2 => break true,
                    3 => break false,
                    1 => break true,
                    _ => {}
                }
                if classes[c].is_degenerate() {
                    state[c] = 3;
                    break false;
                }
                state[c] = 1;
                path.push(c);
                c = image[c];
            };
            for p in path {
                state[p] = if verdict { 2 } else { 3 };
            }
        }
        let legal = state.iter().map(|&s| s == 2).collect();
        TurnTable { classes, index, image, legal }
    }

    pub fn transition_matrix(&self) -> Matrix {
        let g = self.graph();
        let n = g.num_orbits();
        let mut m = Matrix::zeros(n);
        for j in 0..n {
            for &e in self.edge_words[2 * j].edges() {
                let i = e / 2;
                m.set(i, j, m.get(i, j) + 1);
            }
        }
        m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TrainTrackMap) -> TrainTrackMap {
        assert_eq!(self.graph(), other.graph());
        let g = self.graph();
        let vertex_map = other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect();
        let vertex_exp =
            other.vertex_map.iter().zip(&other.vertex_exp).map(|(&v, m)| m * &self.vertex_exp[v]).collect();
        let edge_words = other.edge_words.iter().map(|w| normalize(g, &self.psi(w)).to_word(g)).collect();
        let base_word = normalize(g, &self.base_word.concat(&self.psi(&other.base_word))).to_word(g);
        TrainTrackMap {
            cover: self.cover.clone(),
            vertex_map,
            vertex_exp,
            edge_words,
            base_word,
            phi_inverse: None,
            declared_untight: Vec::new(),
        }
    }

    pub fn power(&self, k: usize) -> TrainTrackMap {
        assert!(k >= 1);
        let mut m = self.clone();
        m.phi_inverse = None;
        for _ in 1..k {
            m = self.compose(&m);
        }
        m
    }

    /// Interior turns of a germ path from a vertex of type `v`, with positions.
    pub fn illegal_turns(&self, table: &TurnTable, germs: &[Germ]) -> Vec<(usize, TurnClass)> {
        (1..germs.len())
            .map(|k| (k, self.cover.turn_at(germs, k)))
            .filter(|(_, t)| !table.is_legal(t))
            .collect()
    }

    pub fn is_legal_path(&self, table: &TurnTable, germs: &[Germ]) -> bool {
        self.illegal_turns(table, germs).is_empty()
    }

    pub fn verify_train_track(&self) -> Result<(), Counterexample> {
        let g = self.graph();
        if let Some(&e) = self.declared_untight.first() {
            return Err(Counterexample::Backtracking { edge: g.edge_name(e).into() });
        }
        for k in 0..g.num_orbits() {
            if self.edge_words[2 * k].len() == 0 {
                return Err(Counterexample::EmptyImage { edge: g.edge_name(2 * k).into() });
            }
        }
        let table = self.turn_table();
        for k in 0..g.num_orbits() {
            let e = 2 * k;
            let w = &self.edge_words[e];
            let germs = normalize(g, w).germs;
            if let Some((position, turn)) = self.illegal_turns(&table, &germs).first() {
                return Err(Counterexample::IllegalTurn { edge: g.edge_name(e).into(), position: *position, turn: *turn });
            }
        }
        self.check_equivariance(24, 0x5eed)
    }

    /// Checks `f(h·x) = φ(h)·f(x)` on seeded random samples.
    pub fn check_equivariance(&self, samples: usize, seed: u64) -> Result<(), Counterexample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in 0..samples {
            let h = random_loop(&self.cover, &mut rng, 4, 3);
            let x = random_point(&self.cover, &mut rng, 3);
            let lhs = self.image_point(&self.cover.act_point(&h, &x));
            let rhs = self.cover.act_point(&self.phi(&h), &self.image_point(&x));
            if lhs != rhs {
                return Err(Counterexample::NotEquivariant { sample: s });
            }
        }
        Ok(())
    }
}

fn parse_images(
    c: &Cover,
    gens: &[Generator],
    imgs: &GeneratorImages,
    what: &str,
) -> Result<HashMap<Generator, Word>, MapError> {
    let g = c.g();
    let mut out = HashMap::new();
    for name in imgs.vertices.keys() {
        if g.vertex_by_name(name).is_none() {
            return Err(MapError::UnknownGenerator(name.clone()));
        }
    }
    for name in imgs.edges.keys() {
        match g.edge_by_name(name) {
            Some(e) if gens.contains(&Generator::Edge(e)) => {}
            _ => return Err(MapError::UnknownGenerator(name.clone())),
        }
    }
    for &x in gens {
        let name = generator_name(g, x);
        let letters = match x {
            Generator::Vertex(_) => imgs.vertices.get(&name),
            Generator::Edge(_) => imgs.edges.get(&name),
        }
        .ok_or_else(|| MapError::MissingGenerator(name.clone()))?;
        let w = Word::from_letters(g, c.base(), letters).map_err(word_err(format!("{what} image of `{name}`")))?;
        if !w.is_loop() || w.start() != c.base() {
            return Err(MapError::NotALoop(name));
        }
        out.insert(x, w);
    }
    Ok(out)
}

/// Random loop at the base: a random path of at most `len` letters closed up
/// through the spanning tree.
pub fn random_loop(c: &Cover, rng: &mut impl Rng, len: usize, max_exp: i64) -> Word {
    let g = c.g();
    let mut w = Word::power(c.base(), rng.gen_range(-max_exp..=max_exp));
    let n = rng.gen_range(0..=len);
    for _ in 0..n {
        let out: Vec<Edge> = g.out_edges(w.end()).collect();
        let e = out[rng.gen_range(0..out.len())];
        w.push_edge(g, e);
        w.push_power(&BigInt::from(rng.gen_range(-max_exp..=max_exp)));
    }
    let back = c.tree_word(w.end()).inverse();
    w.concat(&back)
}

pub fn random_point(c: &Cover, rng: &mut impl Rng, depth: usize) -> Point {
    let w = random_loop(c, rng, depth, 3);
    // drop the closing tree path so the endpoint varies over vertex types
    let mut p = c.point(&w);
    let cut = rng.gen_range(0..=p.germs.len());
    p.germs.truncate(cut);
    p
}

/// Graph plus map, as stored in certificates and fixture files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDocument {
    pub graph: GraphSpec,
    pub map: MapSpec,
}

impl MapDocument {
    pub fn of(f: &TrainTrackMap) -> Self {
        MapDocument { graph: f.graph().to_spec(), map: f.to_spec() }
    }
}
