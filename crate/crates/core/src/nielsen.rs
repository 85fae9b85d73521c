//! Periodic indivisible Nielsen paths.
//!
//! pINPs are found through their hulls: edge paths with one illegal turn
//! that reappear inside a translate of some iterate. Endpoints inside an
//! edge are kept symbolic. A marker on the edge orbit `e` with address `j`
//! is the point `x` with `f^K(x)` on the `j`-th edge of `f^K(e)`, where `K`
//! is a common period; distinct markers on one edge have distinct addresses
//! and the addresses order them along the edge.

use crate::cover::{common_prefix, turn_class, turn_classes_at, Cover, CoverPath};
use crate::graph::{rev, GraphOfGroups, Vertex};
use crate::traintrack::{TrainTrackMap, TurnTable};
use crate::word::{normalize, subdivide_edge_into, Germ, Letter, Rewriter, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NielsenError {
    #[error("no stable length bound up to max_l = {0}")]
    BoundExhausted(usize),
    #[error("classification did not settle within {0} iterations")]
    ClassifyBound(usize),
    #[error("path needs exactly one illegal turn between nonempty legal branches")]
    Malformed,
    #[error("inconsistent pINP data: {0}")]
    Inconsistent(String),
}

/// Orbit key of an oriented tight path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathKey {
    pub vertex: Vertex,
    pub germs: Vec<Germ>,
}

pub fn path_key(c: &Cover, p: &CoverPath) -> PathKey {
    let can = c.canonical_rotation(c.vertex_of(&p.start), &p.germs);
    PathKey { vertex: can.vertex, germs: can.germs }
}

/// Key of the unoriented path: the smaller key of the two orientations.
pub fn unoriented_key(c: &Cover, p: &CoverPath) -> PathKey {
    path_key(c, p).min(path_key(c, &c.reverse_path(p)))
}

/// Edge path `α·β` with one illegal turn after `pivot` edges, such that
/// `path ⊂ twist·[f^period(path)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoPinp {
    pub path: CoverPath,
    pub pivot: usize,
    pub period: usize,
    pub twist: Word,
}

/// Behaviour of the iterates `[f^n(α·β)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    /// Legal after `n` steps, neither branch image containing the other.
    Legal { n: usize },
    /// One branch image contains the other after `n` steps.
    Folds { n: usize },
    /// The path contains a pseudo-pINP.
    Contains { pinp: PseudoPinp },
    /// The path does not, but `[f^n(α·β)]` contains one of this period.
    Eventually { n: usize, period: usize },
}

impl Case {
    pub fn number(&self) -> usize {
        match self {
            Case::Legal { .. } => 1,
            Case::Folds { .. } => 2,
            Case::Contains { .. } => 3,
            Case::Eventually { .. } => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinpOptions {
    pub start_l: usize,
    pub max_l: usize,
    /// Iteration cap for a single classification.
    pub max_iter: usize,
    pub parallel: bool,
}

impl Default for PinpOptions {
    fn default() -> Self {
        PinpOptions { start_l: 1, max_l: 6, max_iter: 16, parallel: crate::PARALLEL_DEFAULT }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub l: usize,
    pub candidates: usize,
    /// Paths per case, cases 1 to 4.
    pub cases: [usize; 4],
}

#[derive(Clone, Debug)]
pub struct PinpSearch {
    /// Minimal pseudo-pINPs, one per orbit, based at vertex representatives.
    pub hosts: Vec<PseudoPinp>,
    pub final_l: usize,
    pub rounds: Vec<Round>,
}

/// Search context: the map, its turn table and a cache of periods.
pub struct Nielsen<'a> {
    pub f: &'a TrainTrackMap,
    pub table: TurnTable,
    periods: Mutex<HashMap<PathKey, (usize, Option<usize>)>>,
}

impl<'a> Nielsen<'a> {
    pub fn new(f: &'a TrainTrackMap) -> Self {
        Nielsen { f, table: f.turn_table(), periods: Mutex::new(HashMap::new()) }
    }

    fn c(&self) -> &Cover {
        &self.f.cover
    }

    fn g(&self) -> &GraphOfGroups {
        self.f.graph()
    }

    pub fn illegal_positions(&self, p: &CoverPath) -> Vec<usize> {
        self.f.illegal_turns(&self.table, &p.germs).into_iter().map(|(k, _)| k).collect()
    }

    fn single_illegal(&self, p: &CoverPath) -> Option<usize> {
        let ill = self.illegal_positions(p);
        match ill[..] {
            [q] => Some(q),
            _ => None,
        }
    }

    /// Smallest `m ≤ max_p` with `η ⊂ g[f^m(η)]`, and that `g`. Only the
    /// window lining up the illegal turns can contain `η`.
    pub fn pseudo_period(&self, eta: &CoverPath, pivot: usize, max_p: usize) -> Option<(usize, Word)> {
        let c = self.c();
        let key = path_key(c, eta);
        if let Some(&(bound, res)) = self.periods.lock().unwrap().get(&key) {
            match res {
                None if bound >= max_p => return None,
                Some(p) if p > max_p => return None,
                _ => {}
            }
        }
        let mut q = eta.clone();
        let mut found = None;
        for m in 1..=max_p {
            q = self.f.image_path(&q);
            let Some(qpos) = self.single_illegal(&q) else { break };
            if qpos >= pivot && qpos - pivot + eta.len() <= q.len() {
                let w = c.subpath(&q, qpos - pivot, qpos - pivot + eta.len());
                if path_key(c, &w) == key {
                    found = Some((m, c.align_paths(&w, eta).expect("same key")));
                    break;
                }
            }
        }
        self.periods.lock().unwrap().insert(key, (max_p, found.as_ref().map(|x| x.0)));
        found
    }

    /// Pseudo-pINPs through the illegal turn of `p` with period at most
    /// `max_p`: the least period, then the shortest path.
    pub fn best_inside(&self, p: &CoverPath, pivot: usize, max_p: usize) -> Option<PseudoPinp> {
        let c = self.c();
        let mut best: Option<(usize, usize, PathKey, PseudoPinp)> = None;
        for i in 1..=pivot {
            for j in 1..=p.len() - pivot {
                let eta = c.subpath(p, pivot - i, pivot + j);
                if let Some((period, twist)) = self.pseudo_period(&eta, i, max_p) {
                    let rank = (period, eta.len(), path_key(c, &eta));
                    if best.as_ref().map_or(true, |b| (b.0, b.1, &b.2) > (rank.0, rank.1, &rank.2)) {
                        best = Some((rank.0, rank.1, rank.2, PseudoPinp { path: eta, pivot: i, period, twist }));
                    }
                }
            }
        }
        best.map(|b| b.3)
    }

    /// Decides which of the four behaviours the iterates of `α·β` follow.
    pub fn classify(&self, gamma: &CoverPath, pivot: usize, max_iter: usize) -> Result<Case, NielsenError> {
        let c = self.c();
        let g = self.g();
        if pivot == 0 || pivot >= gamma.len() || self.illegal_positions(gamma) != [pivot] {
            return Err(NielsenError::Malformed);
        }
        let mut a = c.reverse_path(&c.subpath(gamma, 0, pivot));
        let mut b = c.subpath(gamma, pivot, gamma.len());
        for n in 0..=max_iter {
            if n > 0 {
                a = self.f.image_path(&a);
                b = self.f.image_path(&b);
            }
            debug_assert_eq!(a.start, b.start);
            let k = common_prefix(&a.germs, &b.germs);
            if k == a.len() || k == b.len() {
                return Ok(Case::Folds { n });
            }
            let v = if k == 0 { c.vertex_of(&a.start) } else { g.terminus(a.germs[k - 1].edge) };
            if self.table.is_legal(&turn_class(g, v, a.germs[k], b.germs[k])) {
                return Ok(Case::Legal { n });
            }
            let left = c.reverse_path(&c.subpath(&a, k, a.len()));
            let right = c.subpath(&b, k, b.len());
            let img = c.concat_paths(&left, &right);
            if let Some(p) = self.best_inside(&img, a.len() - k, n + 1) {
                return Ok(match self.best_inside(gamma, pivot, p.period) {
                    Some(pinp) => Case::Contains { pinp },
                    None => Case::Eventually { n, period: p.period },
                });
            }
        }
        Err(NielsenError::ClassifyBound(max_iter))
    }

    /// Legal germ sequences of length exactly `max_len` starting with `first`.
    pub fn legal_branches(&self, first: Germ, max_len: usize) -> Vec<Vec<Germ>> {
        let g = self.g();
        let mut out = Vec::new();
        let mut cur = vec![first];
        self.grow(g, &mut cur, max_len, &mut out);
        out
    }

    fn grow(&self, g: &GraphOfGroups, cur: &mut Vec<Germ>, max_len: usize, out: &mut Vec<Vec<Germ>>) {
        if cur.len() == max_len {
            out.push(cur.clone());
            return;
        }
        let prev = *cur.last().unwrap();
        let v = g.terminus(prev.edge);
        for e in g.out_edges(v) {
            for i in 0..g.width(e) {
                let next = Germ::new(i, e);
                if !self.table.is_legal(&turn_class(g, v, Germ::new(0, rev(prev.edge)), next)) {
                    continue;
                }
                cur.push(next);
                self.grow(g, cur, max_len, out);
                cur.pop();
            }
        }
    }

    /// Orbit representatives of `α·β` with legal branches of length `l`
    /// and an illegal turn between them, keyed without orientation. Shorter
    /// branches always extend legally, and short ones can fold forever.
    pub fn candidates(&self, l: usize) -> BTreeMap<PathKey, (CoverPath, usize)> {
        let c = self.c();
        let g = self.g();
        let mut out = BTreeMap::new();
        for v in 0..g.num_vertices() {
            let x = c.vertex_rep(v).clone();
            for t in turn_classes_at(g, v) {
                if t.is_degenerate() || self.table.is_legal(&t) {
                    continue;
                }
                let left = self.legal_branches(Germ::new(0, t.e1), l);
                let right = self.legal_branches(Germ::new(t.d, t.e2), l);
                for a in &left {
                    let abar = c.reverse_path(&CoverPath { start: x.clone(), germs: a.clone() });
                    for b in &right {
                        let gamma = c.concat_paths(&abar, &CoverPath { start: x.clone(), germs: b.clone() });
                        out.entry(unoriented_key(c, &gamma)).or_insert((gamma, a.len()));
                    }
                }
            }
        }
        out
    }

    /// Puts a pseudo-pINP in orbit-representative form with the smaller
    /// orientation, recomputing its twist.
    pub fn canonical(&self, p: &PseudoPinp) -> PseudoPinp {
        let c = self.c();
        let r = c.reverse_path(&p.path);
        let (path, pivot) = if path_key(c, &r) < path_key(c, &p.path) {
            (r, p.path.len() - p.pivot)
        } else {
            (p.path.clone(), p.pivot)
        };
        let path = c.orbit_rep(&path);
        let (period, twist) = self.pseudo_period(&path, pivot, p.period).expect("still a pseudo-pINP");
        PseudoPinp { path, pivot, period, twist }
    }
}

/// Finds one minimal pseudo-pINP per orbit, raising the branch length
/// bound while some candidate folds.
pub fn find_all_pinps(f: &TrainTrackMap, opts: &PinpOptions) -> Result<PinpSearch, NielsenError> {
    let nl = Nielsen::new(f);
    let mut memo: HashMap<PathKey, Case> = HashMap::new();
    let mut rounds = Vec::new();
    for l in opts.start_l.max(1)..=opts.max_l {
        let cands = nl.candidates(l);
        let todo: Vec<(&PathKey, &(CoverPath, usize))> = cands.iter().filter(|(k, _)| !memo.contains_key(*k)).collect();
        let results = crate::par_map(&todo, opts.parallel, |(_, (p, pivot))| nl.classify(p, *pivot, opts.max_iter));
        for ((k, _), r) in todo.iter().zip(results) {
            memo.insert((*k).clone(), r?);
        }
        let mut cases = [0usize; 4];
        for k in cands.keys() {
            cases[memo[k].number() - 1] += 1;
        }
        rounds.push(Round { l, candidates: cands.len(), cases });
        if cases[1] > 0 {
            continue;
        }
        let mut hosts: BTreeMap<PathKey, PseudoPinp> = BTreeMap::new();
        for k in cands.keys() {
            if let Case::Contains { pinp } = &memo[k] {
                let h = nl.canonical(pinp);
                hosts.entry(path_key(&f.cover, &h.path)).or_insert(h);
            }
        }
        return Ok(PinpSearch { hosts: hosts.into_values().collect(), final_l: l, rounds });
    }
    Err(NielsenError::BoundExhausted(opts.max_l))
}

/// Where a pINP ends inside its hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Endpoint {
    /// The end vertex of the hull.
    Vertex,
    /// Interior of the end edge of the hull, on edge orbit `orbit`.
    Marker { orbit: usize, address: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pinp {
    pub host: PseudoPinp,
    pub start: Endpoint,
    pub end: Endpoint,
}

#[derive(Clone, Debug)]
pub struct PinpSet {
    pub pinps: Vec<Pinp>,
    /// Common period `K` used for the marker addresses.
    pub common_period: usize,
}

/// Endpoint of the pINP inside `host` on the side of its first edge, for
/// `F = f^K`.
fn endpoint(nl: &Nielsen, big: &TrainTrackMap, host: &CoverPath, pivot: usize) -> Result<Endpoint, NielsenError> {
    let c = nl.c();
    let q = big.image_path(host);
    let qpos = nl.single_illegal(&q).ok_or_else(|| NielsenError::Inconsistent("iterate lost its illegal turn".into()))?;
    if qpos < pivot || qpos - pivot + host.len() > q.len() {
        return Err(NielsenError::Inconsistent("hull not contained in its iterate".into()));
    }
    let o = qpos - pivot;
    let w = c.subpath(&q, o, o + host.len());
    if path_key(c, &w) != path_key(c, host) {
        return Err(NielsenError::Inconsistent("hull not contained in its iterate".into()));
    }
    if o == 0 {
        return Ok(Endpoint::Vertex);
    }
    let e = host.germs[0].edge;
    let len = big.edge_words[e].len();
    if o >= len {
        return Err(NielsenError::Inconsistent("hull is not minimal".into()));
    }
    let address = if e % 2 == 0 { o } else { len - 1 - o };
    Ok(Endpoint::Marker { orbit: e / 2, address })
}

/// Symbolic endpoints of the pINP in each hull.
pub fn extract_pinps(f: &TrainTrackMap, hosts: &[PseudoPinp]) -> Result<PinpSet, NielsenError> {
    let nl = Nielsen::new(f);
    let k = hosts.iter().fold(1usize, |acc, h| acc.lcm(&h.period));
    let big = f.power(k);
    let mut pinps = Vec::new();
    for h in hosts {
        let c = &f.cover;
        let start = endpoint(&nl, &big, &h.path, h.pivot)?;
        let end = endpoint(&nl, &big, &c.reverse_path(&h.path), h.path.len() - h.pivot)?;
        pinps.push(Pinp { host: h.clone(), start, end });
    }
    Ok(PinpSet { pinps, common_period: k })
}

/// Single-host form of [`extract_pinps`].
pub fn extract_pinp(f: &TrainTrackMap, host: &PseudoPinp) -> Result<Pinp, NielsenError> {
    Ok(extract_pinps(f, std::slice::from_ref(host))?.pinps.remove(0))
}

/// A pINP that is an edge path: `path = twist·[f^period(path)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePinp {
    pub path: CoverPath,
    pub pivot: usize,
    pub period: usize,
    pub twist: Word,
}

#[derive(Clone, Debug)]
pub struct Subdivided {
    pub map: TrainTrackMap,
    /// Old path words to new ones.
    pub rewriter: Rewriter,
    pub pinps: Vec<EdgePinp>,
}

struct Oriented {
    path: CoverPath,
    pivot: usize,
    start: Endpoint,
}

/// Finds the hull of `[f(η)]` among the oriented hulls: index and offset.
fn image_hull(nl: &Nielsen, hulls: &[Oriented], h: &Oriented) -> Result<(usize, usize), NielsenError> {
    let c = nl.c();
    let q = nl.f.image_path(&h.path);
    let qpos = nl.single_illegal(&q).ok_or_else(|| NielsenError::Inconsistent("image lost its illegal turn".into()))?;
    let mut found = None;
    for (i, x) in hulls.iter().enumerate() {
        if qpos < x.pivot || qpos - x.pivot + x.path.len() > q.len() {
            continue;
        }
        let o = qpos - x.pivot;
        if path_key(c, &c.subpath(&q, o, o + x.path.len())) == path_key(c, &x.path) {
            if found.is_some() {
                return Err(NielsenError::Inconsistent("image matches two hulls".into()));
            }
            found = Some((i, o));
        }
    }
    found.ok_or_else(|| NielsenError::Inconsistent("image of a pINP is not a listed pINP".into()))
}

/// Subdivides at every interior pINP endpoint and extends the map to the
/// new vertices; the pINPs become edge paths.
pub fn subdivide_at_pinps(f: &TrainTrackMap, set: &PinpSet) -> Result<Subdivided, NielsenError> {
    let nl = Nielsen::new(f);
    let c = &f.cover;
    let g = f.graph();
    let mut hulls = Vec::new();
    for p in &set.pinps {
        hulls.push(Oriented { path: p.host.path.clone(), pivot: p.host.pivot, start: p.start });
        let r = c.reverse_path(&p.host.path);
        hulls.push(Oriented { pivot: r.len() - p.host.pivot, path: r, start: p.end });
    }
    // markers per orbit, ordered by address
    let mut markers: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for h in &hulls {
        if let Endpoint::Marker { orbit, address } = h.start {
            markers.entry(orbit).or_default().insert(address);
        }
    }
    let ordinal = |orbit: usize, address: usize| markers[&orbit].iter().position(|&a| a == address).unwrap();
    let count = |orbit: usize| markers.get(&orbit).map_or(0, |m| m.len());
    // image of each marker: (occurrence in ω_{e_orbit}, target orbit, target ordinal)
    let mut image: BTreeMap<(usize, usize), (usize, usize, usize)> = BTreeMap::new();
    for h in &hulls {
        let Endpoint::Marker { orbit, address } = h.start else { continue };
        let (j, o) = image_hull(&nl, &hulls, h)?;
        let Endpoint::Marker { orbit: k2, address: a2 } = hulls[j].start else {
            return Err(NielsenError::Inconsistent("interior endpoint maps to a vertex".into()));
        };
        let e = h.path.germs[0].edge;
        let len = f.edge_words[e].len();
        if o >= len {
            return Err(NielsenError::Inconsistent("image endpoint outside the edge image".into()));
        }
        let occ = if e % 2 == 0 { o } else { len - 1 - o };
        if f.edge_words[2 * orbit].edges()[occ] / 2 != k2 {
            return Err(NielsenError::Inconsistent("image endpoint on the wrong edge".into()));
        }
        let val = (occ, k2, ordinal(k2, a2));
        let key = (orbit, ordinal(orbit, address));
        if let Some(old) = image.insert(key, val) {
            if old != val {
                return Err(NielsenError::Inconsistent("marker has two images".into()));
            }
        }
    }
    // subdivide the graph
    let mut ng = g.clone();
    let mut s = Rewriter::identity(g);
    for (&orbit, m) in &markers {
        let e = ng.edge_by_name(g.edge_name(2 * orbit)).unwrap();
        let (next, rw) = subdivide_edge_into(&ng, e, m.len() + 1).expect("edge exists");
        s = s.then(&rw);
        ng = next;
    }
    let marker_vertex = |orbit: usize, r: usize| ng.vertex_by_name(&format!("{}@{}", g.edge_name(2 * orbit), r + 1)).unwrap();
    let mut vertex_map = vec![0; ng.num_vertices()];
    let mut vertex_exp = vec![BigInt::from(0); ng.num_vertices()];
    for v in 0..g.num_vertices() {
        vertex_map[v] = f.vertex_map[v];
        vertex_exp[v] = f.vertex_exp[v].clone();
    }
    let mut images: HashMap<String, Word> = HashMap::new();
    for k in 0..g.num_orbits() {
        let e = 2 * k;
        let om = &f.edge_words[e];
        let full = s.apply(g, &ng, om);
        let m = count(k);
        if m == 0 {
            images.insert(g.edge_name(e).to_string(), full);
            continue;
        }
        // cut positions in the new edge sequence
        let mut before = vec![0usize; om.len() + 1];
        for (i, &d) in om.edges().iter().enumerate() {
            before[i + 1] = before[i] + s.edge_map[d].len();
        }
        let mut cuts = Vec::new();
        for r in 0..m {
            let (occ, k2, r2) = image[&(k, r)];
            let d = om.edges()[occ];
            let m2 = count(k2);
            cuts.push(before[occ] + if d % 2 == 0 { r2 + 1 } else { m2 - r2 });
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NielsenError::Inconsistent("endpoint markers out of order".into()));
        }
        let slice = |a: usize, b: usize| {
            let mut exps = full.exps()[a..=b].to_vec();
            if a > 0 {
                exps[0] = BigInt::from(0);
            }
            let start = if a == 0 { full.start() } else { ng.terminus(full.edges()[a - 1]) };
            Word::from_parts(&ng, start, exps, full.edges()[a..b].to_vec()).expect("slice of a path")
        };
        let mut bounds = vec![0];
        bounds.extend(cuts.iter().copied());
        bounds.push(full.len());
        for r in 0..=m {
            images.insert(format!("{}.{}", g.edge_name(e), r), slice(bounds[r], bounds[r + 1]));
        }
        for r in 0..m {
            let u = marker_vertex(k, r);
            let prefix = slice(0, cuts[r]);
            let (_, k2, r2) = image[&(k, r)];
            if prefix.end() != marker_vertex(k2, r2) {
                return Err(NielsenError::Inconsistent("marker image vertex mismatch".into()));
            }
            let o = g.origin(e);
            let conj = prefix
                .inverse()
                .concat(&Word::power(f.vertex_map[o], &f.vertex_exp[o] * g.label(e)))
                .concat(&prefix);
            let nf = normalize(&ng, &conj);
            if !nf.germs.is_empty() {
                return Err(NielsenError::Inconsistent("edge group does not fix the image marker".into()));
            }
            vertex_map[u] = prefix.end();
            vertex_exp[u] = nf.carry;
        }
    }
    let positive: Vec<Word> = (0..ng.num_orbits()).map(|k| images.remove(ng.edge_name(2 * k)).expect("image for every edge")).collect();
    let base = s.apply(g, &ng, &f.base_word);
    let map = TrainTrackMap::from_psi(ng.clone(), vertex_map, vertex_exp, positive, base, None)
        .map_err(|e| NielsenError::Inconsistent(format!("subdivided map: {e}")))?;
    map.verify_train_track().map_err(|e| NielsenError::Inconsistent(format!("subdivided map: {e}")))?;
    // the pINPs as edge paths
    let nc = &map.cover;
    let locate = |prefix: &Word, germ: Germ, end: Endpoint| -> Word {
        let mut w = prefix.clone();
        match end {
            Endpoint::Vertex => {
                w.push_power(&BigInt::from(germ.idx));
                w.push_edge(g, germ.edge);
                s.apply(g, &ng, &w)
            }
            Endpoint::Marker { orbit, address } => {
                w.push_power(&BigInt::from(germ.idx));
                let mut nw = s.apply(g, &ng, &w);
                let r = ordinal(orbit, address);
                let cnt = if germ.edge % 2 == 0 { r + 1 } else { count(orbit) - r };
                for &d in &s.edge_map[germ.edge][..cnt] {
                    nw.push_edge(&ng, d);
                }
                nw
            }
        }
    };
    let mut pinps = Vec::new();
    for p in &set.pinps {
        let h = &p.host.path;
        let pts = c.path_points(h);
        let n = h.len();
        // start: walk into the first edge from its far end, reversed
        let start_word = match p.start {
            Endpoint::Vertex => s.apply(g, &ng, &c.word_of(&h.start)),
            Endpoint::Marker { .. } => {
                let r = c.reverse_path(&c.subpath(h, 0, 1));
                let w = c.word_of(&r.start);
                locate(&w, r.germs[0], p.start)
            }
        };
        let end_word = match p.end {
            Endpoint::Vertex => s.apply(g, &ng, &c.word_of(&pts[n])),
            Endpoint::Marker { .. } => locate(&c.word_of(&pts[n - 1]), h.germs[n - 1], p.end),
        };
        let a = nc.point(&start_word);
        let b = nc.point(&end_word);
        let path = nc.geodesic(&a, &b);
        let nln = Nielsen::new(&map);
        let pivot = nln
            .single_illegal(&path)
            .ok_or_else(|| NielsenError::Inconsistent("subdivided pINP lost its illegal turn".into()))?;
        let mut q = path.clone();
        for _ in 0..p.host.period {
            q = map.image_path(&q);
        }
        let twist = nc
            .align_paths(&q, &path)
            .ok_or_else(|| NielsenError::Inconsistent("subdivided path is not a Nielsen path".into()))?;
        pinps.push(EdgePinp { path, pivot, period: p.host.period, twist });
    }
    Ok(Subdivided { map, rewriter: s, pinps })
}

/// Debug form of a pINP: letters of its path from its start point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinpDump {
    pub path: Vec<Letter>,
    pub pivot: usize,
    pub period: usize,
    pub twist: Vec<Letter>,
}

pub fn dump(c: &Cover, path: &CoverPath, pivot: usize, period: usize, twist: &Word) -> PinpDump {
    let g = c.g();
    let w = crate::word::germ_word(g, c.vertex_of(&path.start), &path.germs, &BigInt::from(0));
    PinpDump { path: w.to_letters(g), pivot, period, twist: twist.to_letters(g) }
}

/// Orbit of `[f(η)]` among `list`, by unoriented key.
pub fn image_index(f: &TrainTrackMap, list: &[EdgePinp], eta: &CoverPath) -> Option<usize> {
    let c = &f.cover;
    let k = unoriented_key(c, &f.image_path(eta));
    list.iter().position(|p| unoriented_key(c, &p.path) == k)
}
