//! Whitehead graphs of the stable lamination and the full irreducibility
//! decision.
//!
//! The turns taken by leaves are the turns of the iterates `f^m(e)`. After
//! `n + 1` steps, with `A(f)^n > 0`, every turn inside an edge image has
//! shown up; later turns are images of earlier ones under `Df`, so the set
//! is closed under `Df` and grows until one round adds nothing.

use crate::cover::{turn_class, turn_classes_at, CoverPath, TurnClass};
use crate::graph::{Edge, GraphOfGroups, Vertex};
use crate::traintrack::{Counterexample, TrainTrackMap};
use crate::word::Germ;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LaminationError {
    #[error("not a train track map: {0}")]
    NotTrainTrack(Counterexample),
    #[error("transition matrix is not primitive")]
    NotPrimitive,
    #[error("turn set did not stabilize within the cap of {0} rounds")]
    CapExceeded(usize),
    #[error("no leaf crosses vertex `{0}`")]
    EmptyGraph(String),
    #[error("the automorphism is not known to be pseudo-atoroidal")]
    NotAtoroidal,
    #[error("unknown vertex `{0}` in the index sets")]
    UnknownVertex(String),
}

/// Turns taken by the lamination, with the round data of the computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnSet {
    pub turns: BTreeSet<TurnClass>,
    /// `n` with `A(f)^n > 0`.
    pub n: usize,
    /// Number of nondegenerate turn orbits.
    pub k: usize,
    /// `Df` rounds until the set stopped growing.
    pub rounds: usize,
    /// Seed edge.
    pub seed: Edge,
}

fn turns_of(f: &TrainTrackMap, p: &CoverPath) -> Vec<TurnClass> {
    (1..p.len()).map(|k| f.cover.turn_at(&p.germs, k)).collect()
}

/// Turns of the leaves, from the iterates of `seed`. Stops on the first
/// round adding no turn orbit, and fails past `n + 1 + K` iterations.
pub fn lamination_turns(f: &TrainTrackMap, seed: Edge) -> Result<TurnSet, LaminationError> {
    let g = f.graph();
    let n = f.transition_matrix().primitivity_exponent().ok_or(LaminationError::NotPrimitive)?;
    let k = (0..g.num_vertices()).flat_map(|v| turn_classes_at(g, v)).filter(|t| !t.is_degenerate()).count();
    let c = &f.cover;
    let mut path = CoverPath { start: c.vertex_rep(g.origin(seed)).clone(), germs: vec![Germ::new(0, seed)] };
    for _ in 0..=n {
        path = f.image_path(&path);
    }
    let mut turns: BTreeSet<TurnClass> = turns_of(f, &path).into_iter().collect();
    for round in 0..=k {
        let next: BTreeSet<TurnClass> = turns.iter().map(|t| f.turn_image(t)).filter(|t| !turns.contains(t)).collect();
        if next.is_empty() {
            return Ok(TurnSet { turns, n, k, rounds: round, seed });
        }
        turns.extend(next);
    }
    Err(LaminationError::CapExceeded(n + 1 + k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadGraph {
    pub vertex: Vertex,
    /// Germs at the vertex representative; the generator of `G_v` adds one
    /// to the index modulo the edge width.
    pub nodes: Vec<Germ>,
    /// Pairs of node indices, `i < j`.
    pub links: BTreeSet<(usize, usize)>,
}

impl WhiteheadGraph {
    pub fn node(&self, x: Germ) -> usize {
        self.nodes.iter().position(|&y| y == x).expect("germ at this vertex")
    }

    /// The generator's action on nodes.
    pub fn rotate(&self, g: &GraphOfGroups, i: usize) -> usize {
        let x = self.nodes[i];
        self.node(Germ::new((x.idx + 1).rem_euclid(g.width(x.edge)), x.edge))
    }

    /// Connected components as sorted node lists, in order of least node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.links {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.nodes.len() {
            let r = find(&mut parent, i);
            comps.entry(r).or_default().push(i);
        }
        comps.into_values().collect()
    }
}

/// Node pairs in the `G_v`-orbit of a turn class.
pub fn turn_links(g: &GraphOfGroups, t: &TurnClass) -> Vec<(Germ, Germ)> {
    let (w1, w2) = (g.width(t.e1), g.width(t.e2));
    let mut out = BTreeSet::new();
    for k in 0..w1.lcm(&w2) {
        let x = Germ::new(k.rem_euclid(w1), t.e1);
        let y = Germ::new((t.d + k).rem_euclid(w2), t.e2);
        if x != y {
            out.insert((x.min(y), x.max(y)));
        }
    }
    debug_assert!(out.iter().all(|&(x, y)| turn_class(g, t.vertex, x, y) == *t));
    out.into_iter().collect()
}

/// One graph per vertex of the quotient, from the given turn set.
pub fn assemble(g: &GraphOfGroups, turns: &BTreeSet<TurnClass>) -> Vec<WhiteheadGraph> {
    (0..g.num_vertices())
        .map(|v| {
            let nodes: Vec<Germ> =
                g.out_edges(v).flat_map(|e| (0..g.width(e)).map(move |i| Germ::new(i, e))).collect();
            let mut w = WhiteheadGraph { vertex: v, nodes, links: BTreeSet::new() };
            for t in turns.iter().filter(|t| t.vertex == v) {
                for (x, y) in turn_links(g, t) {
                    let (a, b) = (w.node(x), w.node(y));
                    w.links.insert((a.min(b), a.max(b)));
                }
            }
            w
        })
        .collect()
}

/// Whitehead graphs of the stable lamination, seeded at the first edge.
pub fn whitehead_graphs(f: &TrainTrackMap) -> Result<(TurnSet, Vec<WhiteheadGraph>), LaminationError> {
    f.verify_train_track().map_err(LaminationError::NotTrainTrack)?;
    let ts = lamination_turns(f, 0)?;
    let graphs = assemble(f.graph(), &ts.turns);
    Ok((ts, graphs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermName {
    pub edge: String,
    pub index: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentWitness {
    pub germs: Vec<GermName>,
    /// `[G_v : stab(C)]`.
    pub index: usize,
    pub in_family: bool,
    /// The element of `I_v` dividing the index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor: Option<u64>,
}

/// Components with their stabilizer indices. `G_v` permutes components
/// through its action on germs; the index of a stabilizer is the length of
/// the component's orbit. `None` for `iv` means every subgroup is allowed.
pub fn component_analysis(
    g: &GraphOfGroups,
    w: &WhiteheadGraph,
    iv: Option<&[u64]>,
) -> Result<Vec<ComponentWitness>, LaminationError> {
    if w.links.is_empty() {
        return Err(LaminationError::EmptyGraph(g.vertex_name(w.vertex).to_string()));
    }
    let comps = w.components();
    let mut owner = vec![0; w.nodes.len()];
    for (ci, comp) in comps.iter().enumerate() {
        for &i in comp {
            owner[i] = ci;
        }
    }
    let perm: Vec<usize> = comps.iter().map(|comp| owner[w.rotate(g, comp[0])]).collect();
    let iv = iv.unwrap_or(&[1]);
    Ok(comps
        .iter()
        .enumerate()
        .map(|(ci, comp)| {
            let mut index = 1;
            let mut cur = perm[ci];
            while cur != ci {
                cur = perm[cur];
                index += 1;
            }
            let divisor = iv.iter().copied().find(|&i| i > 0 && (index as u64) % i == 0);
            ComponentWitness {
                germs: comp
                    .iter()
                    .map(|&i| GermName { edge: g.edge_name(w.nodes[i].edge).to_string(), index: w.nodes[i].idx })
                    .collect(),
                index,
                in_family: divisor.is_some(),
                divisor,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexReport {
    pub vertex: String,
    pub connected: bool,
    pub components: Vec<ComponentWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IrreducibilityVerdict {
    FullyIrreducible { vertices: Vec<VertexReport> },
    /// A disconnected Whitehead graph with a component stabilizer in the
    /// family.
    Reducible { vertex: String, components: Vec<ComponentWitness>, vertices: Vec<VertexReport> },
}

/// Index sets per vertex name; absent vertices allow every subgroup.
pub type Family = BTreeMap<String, Vec<u64>>;

/// Full irreducibility from the Whitehead graphs. Needs a primitive train
/// track map and either a pseudo-atoroidal verdict or `assume_atoroidal`.
pub fn decide_fully_irreducible(
    f: &TrainTrackMap,
    family: Option<&Family>,
    atoroidal: bool,
    assume_atoroidal: bool,
) -> Result<(TurnSet, IrreducibilityVerdict), LaminationError> {
    if !atoroidal && !assume_atoroidal {
        return Err(LaminationError::NotAtoroidal);
    }
    let g = f.graph();
    if let Some(fam) = family {
        if let Some(name) = fam.keys().find(|n| g.vertex_by_name(n).is_none()) {
            return Err(LaminationError::UnknownVertex(name.clone()));
        }
    }
    let (ts, graphs) = whitehead_graphs(f)?;
    let mut vertices = Vec::new();
    let mut found = None;
    for w in &graphs {
        let name = g.vertex_name(w.vertex).to_string();
        let iv = family.and_then(|fam| fam.get(&name)).map(|v| v.as_slice());
        let comps = component_analysis(g, w, iv)?;
        let connected = comps.len() == 1;
        if !connected && found.is_none() && comps.iter().any(|c| c.in_family) {
            found = Some((name.clone(), comps.clone()));
        }
        vertices.push(VertexReport { vertex: name, connected, components: comps });
    }
    let verdict = match found {
        Some((vertex, components)) => IrreducibilityVerdict::Reducible { vertex, components, vertices },
        None => IrreducibilityVerdict::FullyIrreducible { vertices },
    };
    Ok((ts, verdict))
}
