//! Collapsing invariant forests until the transition matrix is primitive,
//! or producing a certificate of reducibility.

use crate::graph::{rev, Edge, GraphBuilder, GraphOfGroups, Vertex};
use crate::traintrack::{generator_word, generators, substitute, Counterexample, MapDocument, TrainTrackMap};
use crate::word::{normalize, Letter, Rewriter, Word};
use crate::cover::{Cover, IsometryKind};
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CollapseError {
    #[error("edge `{0}` maps into the collapsed forest")]
    DegenerateImage(String),
    #[error("collapsed map is not a train track: {0}")]
    NotTrainTrack(Counterexample),
}

/// Result of peeling a set of edge orbits: each peeled edge is oriented
/// towards the leaf it removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peeling {
    pub order: Vec<Edge>,
    pub rest: Vec<usize>,
}

/// Repeatedly deletes an edge having a valence-one endpoint whose label at
/// that endpoint is ±1. The subgraph is collapsible when nothing remains.
pub fn peel(g: &GraphOfGroups, orbits: &[usize]) -> Peeling {
    let mut rest: Vec<usize> = orbits.to_vec();
    rest.sort_unstable();
    rest.dedup();
    let mut order = Vec::new();
    loop {
        let mut valence = vec![0usize; g.num_vertices()];
        for &k in &rest {
            valence[g.origin(2 * k)] += 1;
            valence[g.terminus(2 * k)] += 1;
        }
        let pick = rest.iter().enumerate().find_map(|(i, &k)| {
            let e = 2 * k;
            if g.origin(e) == g.terminus(e) {
                return None;
            }
            if valence[g.terminus(e)] == 1 && g.width(rev(e)) == 1 {
                Some((i, e))
            } else if valence[g.origin(e)] == 1 && g.width(e) == 1 {
                Some((i, rev(e)))
            } else {
                None
            }
        });
        match pick {
            Some((i, c)) => {
                rest.remove(i);
                order.push(c);
            }
            None => return Peeling { order, rest },
        }
    }
}

pub fn is_collapsible(g: &GraphOfGroups, orbits: &[usize]) -> bool {
    peel(g, orbits).rest.is_empty()
}

/// Collapse of a forest: the quotient graph and the rewriters in both
/// directions.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub graph: GraphOfGroups,
    pub forward: Rewriter,
    pub backward: Rewriter,
    /// Forest path from the root of each old vertex's tree to it.
    pub paths: Vec<Vec<Edge>>,
}

impl Collapse {
    pub fn path_word(&self, g: &GraphOfGroups, w: Vertex) -> Word {
        let mut out = Word::empty(self.backward.vertex_map[self.forward.vertex_map[w]]);
        for &c in &self.paths[w] {
            out.push_edge(g, c);
        }
        out
    }
}

/// Collapses a collapsible set of edge orbits.
pub fn collapse_graph(g: &GraphOfGroups, orbits: &[usize]) -> Collapse {
    let p = peel(g, orbits);
    assert!(p.rest.is_empty(), "subgraph is not collapsible");
    let n = g.num_vertices();
    let mut parent: Vec<Option<Edge>> = vec![None; n];
    for &c in &p.order {
        parent[g.terminus(c)] = Some(c);
    }
    // κ_w and the forest path δ_w from the root, resolved recursively
    fn resolve(g: &GraphOfGroups, parent: &[Option<Edge>], w: Vertex, memo: &mut Vec<Option<(Vertex, BigInt, Vec<Edge>)>>) {
        if memo[w].is_some() {
            return;
        }
        let val = match parent[w] {
            None => (w, BigInt::one(), Vec::new()),
            Some(c) => {
                let p = g.origin(c);
                resolve(g, parent, p, memo);
                let (root, kp, dp) = memo[p].clone().unwrap();
                let mut d = dp;
                d.push(c);
                (root, kp * g.label(rev(c)) * g.label(c), d)
            }
        };
        memo[w] = Some(val);
    }
    let mut memo = vec![None; n];
    for w in 0..n {
        resolve(g, &parent, w, &mut memo);
    }
    let info: Vec<(Vertex, BigInt, Vec<Edge>)> = memo.into_iter().map(|m| m.unwrap()).collect();
    let roots: Vec<Vertex> = (0..n).filter(|&w| parent[w].is_none()).collect();
    let mut new_index = vec![usize::MAX; n];
    let mut b = GraphBuilder::new();
    for &r in &roots {
        new_index[r] = b.vertex(g.vertex_name(r));
    }
    let collapsed: std::collections::BTreeSet<usize> = orbits.iter().copied().collect();
    let mut edge_map: Vec<Vec<Edge>> = vec![Vec::new(); g.num_edges()];
    let mut back_edges: Vec<Vec<Edge>> = Vec::new();
    for k in 0..g.num_orbits() {
        if collapsed.contains(&k) {
            continue;
        }
        let d = 2 * k;
        let (o, t) = (g.origin(d), g.terminus(d));
        let l = &info[o].1 * g.label(d);
        let rl = &info[t].1 * g.label(rev(d));
        let nd = b.edge(
            g.edge_name(d),
            g.edge_name(rev(d)),
            new_index[info[o].0],
            new_index[info[t].0],
            i64::try_from(l).expect("label overflow"),
            i64::try_from(rl).expect("label overflow"),
        );
        edge_map[d] = vec![nd];
        edge_map[rev(d)] = vec![rev(nd)];
        let mut fwd = info[o].2.clone();
        fwd.push(d);
        fwd.extend(info[t].2.iter().rev().map(|&c| rev(c)));
        let bwd: Vec<Edge> = fwd.iter().rev().map(|&c| rev(c)).collect();
        back_edges.push(fwd);
        back_edges.push(bwd);
    }
    let base = new_index[info[g.base()].0];
    let graph = b.build_unguarded(base).expect("collapse keeps the graph connected");
    let forward = Rewriter {
        vertex_map: (0..n).map(|w| new_index[info[w].0]).collect(),
        vertex_mult: info.iter().map(|x| x.1.clone()).collect(),
        edge_map,
    };
    let backward = Rewriter {
        vertex_map: roots.clone(),
        vertex_mult: vec![BigInt::one(); roots.len()],
        edge_map: back_edges,
    };
    let paths = info.into_iter().map(|x| x.2).collect();
    Collapse { graph, forward, backward, paths }
}

/// Induces `R Ψ R⁻¹` on the collapsed graph, where `R` kills the forest.
pub fn collapse_map(f: &TrainTrackMap, orbits: &[usize]) -> Result<TrainTrackMap, CollapseError> {
    let g = f.graph();
    let col = collapse_graph(g, orbits);
    let ng = &col.graph;
    let r = &col.forward;
    let nv = ng.num_vertices();
    // R Ψ(δ_w): a vertex group element at the root over f(w)
    let shift: Vec<Word> = (0..g.num_vertices())
        .map(|w| normalize(ng, &r.apply(g, ng, &f.psi(&col.path_word(g, w)))).to_word(ng))
        .collect();
    let mut vertex_map = vec![0; nv];
    let mut vertex_exp = vec![BigInt::one(); nv];
    for (u_new, &u) in col.backward.vertex_map.iter().enumerate() {
        let fu = f.vertex_map[u];
        vertex_map[u_new] = r.vertex_map[fu];
        vertex_exp[u_new] = &f.vertex_exp[u] * &r.vertex_mult[fu];
    }
    let mut edge_words = vec![Word::empty(0); ng.num_edges()];
    for e in 0..g.num_edges() {
        if let [d] = r.edge_map[e][..] {
            let (o, t) = (g.origin(e), g.terminus(e));
            let img = shift[o].concat(&r.apply(g, ng, &f.edge_words[e])).concat(&shift[t].inverse());
            let w = normalize(ng, &img).to_word(ng);
            if w.len() == 0 {
                return Err(CollapseError::DegenerateImage(g.edge_name(e).into()));
            }
            edge_words[d] = w;
        }
    }
    let v0 = g.base();
    let delta = col.path_word(g, v0);
    let base_word = normalize(ng, &r.apply(g, ng, &delta.concat(&f.base_word)).concat(&shift[v0].inverse())).to_word(ng);
    let cover = Cover::new(ng.clone());
    let mut out = TrainTrackMap {
        cover,
        vertex_map,
        vertex_exp,
        edge_words,
        base_word,
        phi_inverse: None,
        declared_untight: Vec::new(),
    };
    if let Some(inv) = &f.phi_inverse {
        let mut imgs = HashMap::new();
        for x in generators(&out.cover) {
            let gx = generator_word(&out.cover, x);
            let old = delta.inverse().concat(&col.backward.apply(ng, g, &gx)).concat(&delta);
            let img = substitute(&f.cover, inv, &normalize(g, &old).to_word(g));
            let img = delta.concat(&img).concat(&delta.inverse());
            imgs.insert(x, normalize(ng, &r.apply(g, ng, &img)).to_word(ng));
        }
        out.phi_inverse = Some(imgs);
    }
    out.verify_train_track().map_err(CollapseError::NotTrainTrack)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseStep {
    /// Names of the collapsed edges (one orientation each).
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reason {
    /// A proper invariant subgraph that cannot be collapsed, with a
    /// loxodromic element whose axis stays in its preimage.
    InvariantEssential { edges: Vec<String>, witness: Vec<Letter> },
    /// Irreducible permutation matrix.
    PfOne { permutation: Vec<usize> },
    /// Irreducible with period > 1; the classes are permuted cyclically.
    NotPrimitive { period: usize, classes: Vec<Vec<String>> },
    SingleEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibilityCertificate {
    pub steps: Vec<CollapseStep>,
    pub reason: Reason,
    pub map: MapDocument,
}

#[derive(Clone, Debug)]
pub enum CollapseOutcome {
    Primitive { map: TrainTrackMap, steps: Vec<CollapseStep> },
    Reducible(ReducibilityCertificate),
}

fn orbit_names(g: &GraphOfGroups, orbits: &[usize]) -> Vec<String> {
    orbits.iter().map(|&k| g.edge_name(2 * k).to_string()).collect()
}

/// Loxodromic element preserving the lift of a non-collapsible subgraph:
/// a cycle, or `a_{u0} P a_{un} P⁻¹` along a path between two leaves that
/// cannot be peeled.
pub fn essential_witness(c: &Cover, orbits: &[usize]) -> Word {
    let g = c.g();
    let rest = peel(g, orbits).rest;
    assert!(!rest.is_empty());
    let mut adj: Vec<Vec<Edge>> = vec![Vec::new(); g.num_vertices()];
    for &k in &rest {
        adj[g.origin(2 * k)].push(2 * k);
        adj[g.terminus(2 * k)].push(2 * k + 1);
    }
    let local = if let Some(cycle) = find_cycle(g, &adj) {
        let mut w = Word::empty(g.origin(cycle[0]));
        for e in cycle {
            w.push_edge(g, e);
        }
        w
    } else {
        let leaves: Vec<Vertex> = (0..g.num_vertices()).filter(|&v| adj[v].len() == 1).collect();
        let u0 = leaves[0];
        let path = tree_path(g, &adj, u0, |v| v != u0 && adj[v].len() == 1);
        let mut p = Word::empty(u0);
        for &e in &path {
            p.push_edge(g, e);
        }
        let un = p.end();
        Word::power(u0, 1).concat(&p).concat(&Word::power(un, 1)).concat(&p.inverse())
    };
    let gv = c.tree_word(local.start());
    normalize(g, &gv.concat(&local).concat(&gv.inverse())).to_word(g)
}

fn find_cycle(g: &GraphOfGroups, adj: &[Vec<Edge>]) -> Option<Vec<Edge>> {
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    let mut via: Vec<Option<Edge>> = vec![None; n];
    for s in 0..n {
        if seen[s] || adj[s].is_empty() {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &e in &adj[v] {
                if via[v].map_or(false, |p| rev(p) == e) {
                    continue;
                }
                let w = g.terminus(e);
                if seen[w] {
                    // close the cycle through the common ancestor
                    let up = |mut x: Vertex| {
                        let mut p = vec![x];
                        while let Some(c) = via[x] {
                            x = g.origin(c);
                            p.push(x);
                        }
                        p
                    };
                    let pv = up(v);
                    let pw = up(w);
                    let anc = *pv.iter().find(|x| pw.contains(x))?;
                    let mut down_v = Vec::new();
                    let mut x = v;
                    while x != anc {
                        let c = via[x].unwrap();
                        down_v.push(c);
                        x = g.origin(c);
                    }
                    down_v.reverse();
                    let mut cyc = down_v;
                    cyc.push(e);
                    let mut x = w;
                    while x != anc {
                        let c = via[x].unwrap();
                        cyc.push(rev(c));
                        x = g.origin(c);
                    }
                    return Some(cyc);
                }
                seen[w] = true;
                via[w] = Some(e);
                stack.push(w);
            }
        }
    }
    None
}

fn tree_path(g: &GraphOfGroups, adj: &[Vec<Edge>], from: Vertex, goal: impl Fn(Vertex) -> bool) -> Vec<Edge> {
    let mut via: Vec<Option<Edge>> = vec![None; g.num_vertices()];
    let mut seen = vec![false; g.num_vertices()];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = Vec::new();
            let mut x = v;
            while let Some(c) = via[x] {
                path.push(c);
                x = g.origin(c);
            }
            path.reverse();
            return path;
        }
        for &e in &adj[v] {
            let w = g.terminus(e);
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    panic!("no second leaf in a tree component");
}

/// Collapses invariant forests while the matrix is reducible, then decides
/// between a primitive representative and a reducibility certificate.
pub fn collapse_to_irreducible(f: &TrainTrackMap) -> Result<CollapseOutcome, CollapseError> {
    let mut cur = f.clone();
    let mut steps = Vec::new();
    loop {
        let g = cur.graph().clone();
        let a = cur.transition_matrix();
        let n = g.num_orbits();
        if n <= 1 {
            return Ok(CollapseOutcome::Reducible(ReducibilityCertificate {
                steps,
                reason: Reason::SingleEdge,
                map: MapDocument::of(&cur),
            }));
        }
        if a.is_irreducible() {
            if a.is_permutation() {
                let permutation = (0..n).map(|j| (0..n).find(|&i| a.get(i, j) == 1).unwrap()).collect();
                return Ok(CollapseOutcome::Reducible(ReducibilityCertificate {
                    steps,
                    reason: Reason::PfOne { permutation },
                    map: MapDocument::of(&cur),
                }));
            }
            let (period, level) = a.period();
            if period > 1 {
                let classes = (0..period)
                    .map(|c| orbit_names(&g, &(0..n).filter(|&i| level[i] == c).collect::<Vec<_>>()))
                    .collect();
                return Ok(CollapseOutcome::Reducible(ReducibilityCertificate {
                    steps,
                    reason: Reason::NotPrimitive { period, classes },
                    map: MapDocument::of(&cur),
                }));
            }
            return Ok(CollapseOutcome::Primitive { map: cur, steps });
        }
        let mut sets: Vec<Vec<usize>> = (0..n).map(|j| a.closure(j)).filter(|c| c.len() < n).collect();
        sets.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        sets.dedup();
        if let Some(j) = sets.iter().find(|j| !is_collapsible(&g, j)) {
            let witness = essential_witness(&cur.cover, j).to_letters(&g);
            return Ok(CollapseOutcome::Reducible(ReducibilityCertificate {
                steps,
                reason: Reason::InvariantEssential { edges: orbit_names(&g, j), witness },
                map: MapDocument::of(&cur),
            }));
        }
        let j = sets[0].clone();
        cur = collapse_map(&cur, &j)?;
        steps.push(CollapseStep { edges: orbit_names(&g, &j) });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RecheckError {
    #[error("step {0}: unknown edge `{1}`")]
    UnknownEdge(usize, String),
    #[error("step {0}: collapsed set is not invariant")]
    NotInvariant(usize),
    #[error("step {0}: collapsed set is not collapsible")]
    NotCollapsible(usize),
    #[error("step {0}: {1}")]
    Collapse(usize, CollapseError),
    #[error("replayed map differs from the certificate")]
    MapMismatch,
    #[error("certificate map does not re-validate: {0}")]
    Invalid(String),
    #[error("reason does not hold: {0}")]
    Reason(String),
}

fn resolve_orbits(g: &GraphOfGroups, names: &[String], step: usize) -> Result<Vec<usize>, RecheckError> {
    names
        .iter()
        .map(|n| g.edge_by_name(n).map(|e| e / 2).ok_or_else(|| RecheckError::UnknownEdge(step, n.clone())))
        .collect()
}

fn is_invariant(f: &TrainTrackMap, orbits: &[usize]) -> bool {
    let a = f.transition_matrix();
    orbits.iter().all(|&j| (0..a.n).all(|i| a.get(i, j) == 0 || orbits.contains(&i)))
}

/// Replays the certificate from the original map and re-validates every
/// claim with independent checks.
pub fn recheck_certificate(f: &TrainTrackMap, cert: &ReducibilityCertificate) -> Result<(), RecheckError> {
    let mut cur = f.clone();
    for (i, s) in cert.steps.iter().enumerate() {
        let j = resolve_orbits(cur.graph(), &s.edges, i)?;
        if !is_invariant(&cur, &j) {
            return Err(RecheckError::NotInvariant(i));
        }
        if !is_collapsible(cur.graph(), &j) {
            return Err(RecheckError::NotCollapsible(i));
        }
        cur = collapse_map(&cur, &j).map_err(|e| RecheckError::Collapse(i, e))?;
    }
    if MapDocument::of(&cur) != cert.map {
        return Err(RecheckError::MapMismatch);
    }
    let g = crate::graph::validate_graph(&cert.map.graph).map_err(|d| RecheckError::Invalid(format!("{d:?}")))?;
    let m = TrainTrackMap::from_spec(g, &cert.map.map).map_err(|e| RecheckError::Invalid(e.to_string()))?;
    m.verify_train_track().map_err(|e| RecheckError::Invalid(e.to_string()))?;
    let a = m.transition_matrix();
    let g = m.graph();
    match &cert.reason {
        Reason::SingleEdge => {
            if g.num_orbits() != 1 {
                return Err(RecheckError::Reason("graph has more than one edge".into()));
            }
        }
        Reason::PfOne { permutation } => {
            if !a.is_irreducible() || !a.is_permutation() {
                return Err(RecheckError::Reason("matrix is not an irreducible permutation".into()));
            }
            if permutation.iter().enumerate().any(|(j, &i)| a.get(i, j) != 1) {
                return Err(RecheckError::Reason("permutation does not match".into()));
            }
        }
        Reason::NotPrimitive { period, classes } => {
            if !a.is_irreducible() || a.period().0 != *period || *period < 2 {
                return Err(RecheckError::Reason("period does not match".into()));
            }
            let cls: Vec<Vec<usize>> =
                classes.iter().enumerate().map(|(c, names)| resolve_orbits(g, names, c)).collect::<Result<_, _>>()?;
            for (c, members) in cls.iter().enumerate() {
                let next = &cls[(c + 1) % cls.len()];
                for &j in members {
                    if (0..a.n).any(|i| a.get(i, j) > 0 && !next.contains(&i)) {
                        return Err(RecheckError::Reason("classes are not permuted cyclically".into()));
                    }
                }
            }
        }
        Reason::InvariantEssential { edges, witness } => {
            let j = resolve_orbits(g, edges, 0)?;
            if j.len() >= g.num_orbits() || !is_invariant(&m, &j) {
                return Err(RecheckError::Reason("subgraph is not a proper invariant set".into()));
            }
            let w = Word::from_letters(g, g.base(), witness).map_err(|e| RecheckError::Reason(e.to_string()))?;
            let t = m.cover.translation_length(&w);
            if t.kind != IsometryKind::Loxodromic {
                return Err(RecheckError::Reason("witness is elliptic".into()));
            }
            let axis = t.axis.unwrap();
            if axis.germs.iter().any(|x| !j.contains(&(x.edge / 2))) {
                return Err(RecheckError::Reason("witness axis leaves the subgraph".into()));
            }
        }
    }
    Ok(())
}
