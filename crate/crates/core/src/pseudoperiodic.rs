//! Nielsen classes and the pseudo-atoroidal decision.
//!
//! The class of a pINP `η` is the set `VY(η)` of points joined to an
//! endpoint of `η` by concatenations of pINPs; `EY(η)` is the set of pINPs
//! between its points. Both are saturated breadth first until no new pINP
//! orbit shows up, and the stabilizer of the class is generated by the
//! elements moving the extra pINPs onto the chosen representatives.

use crate::cover::{Cover, CoverPath, IsometryKind, Point};
use crate::nielsen::{
    dump, extract_pinps, find_all_pinps, subdivide_at_pinps, unoriented_key, EdgePinp, NielsenError, PathKey,
    PinpDump, PinpOptions,
};
use crate::traintrack::{Counterexample, TrainTrackMap};
use crate::word::{Letter, Word};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("seed {0} is not in the pINP list")]
    UnknownSeed(usize),
    #[error("saturation did not stabilize within {0} rounds")]
    RoundsExhausted(usize),
    #[error("not a train track map: {0}")]
    NotTrainTrack(Counterexample),
    #[error(transparent)]
    Nielsen(#[from] NielsenError),
}

/// Unoriented form of a path: the smaller orientation.
pub fn unoriented(c: &Cover, p: &CoverPath) -> CoverPath {
    let r = c.reverse_path(p);
    if r < *p {
        r
    } else {
        p.clone()
    }
}

#[derive(Clone, Debug)]
pub struct NielsenClass {
    /// Index of the seed in the pINP list.
    pub seed: usize,
    /// One point per orbit of `VY(η)`.
    pub vy_reps: Vec<Point>,
    /// One pINP per orbit of `EY(η)`, the seed first.
    pub ey_reps: Vec<CoverPath>,
    pub generators: Vec<Word>,
    /// Saturation rounds until the orbit set stopped growing.
    pub rounds: usize,
}

/// Saturation state: known pINPs of the class and their endpoints.
struct Saturation<'a> {
    c: &'a Cover,
    /// Oriented pINP orbit representatives, both orientations.
    oriented: Vec<CoverPath>,
    /// Discovery order of unoriented pINPs.
    edges: Vec<CoverPath>,
    seen: HashSet<CoverPath>,
    points: HashSet<Point>,
}

impl<'a> Saturation<'a> {
    fn new(c: &'a Cover, pinps: &[EdgePinp]) -> Self {
        let mut oriented = Vec::new();
        for p in pinps {
            oriented.push(p.path.clone());
            oriented.push(c.reverse_path(&p.path));
        }
        Saturation { c, oriented, edges: Vec::new(), seen: HashSet::new(), points: HashSet::new() }
    }

    /// pINPs with an endpoint at `x`, leaving `x`.
    fn at(&self, x: &Point) -> Vec<CoverPath> {
        let c = self.c;
        let s = c.point_stabilizer(x);
        let mut out = Vec::new();
        for r in &self.oriented {
            let Some(h) = c.same_orbit(&r.start, x) else { continue };
            let first = c.act_path(&h, r);
            let mut cur = first.clone();
            loop {
                out.push(cur.clone());
                cur = c.act_path(&s, &cur);
                if cur == first {
                    break;
                }
            }
        }
        out
    }

    fn add(&mut self, p: CoverPath) -> Option<Point> {
        let u = unoriented(self.c, &p);
        if !self.seen.insert(u.clone()) {
            return None;
        }
        self.edges.push(u);
        let end = self.c.path_end(&p);
        self.points.insert(p.start.clone());
        self.points.insert(end.clone()).then_some(end)
    }
}

fn orbit_set(c: &Cover, list: &[CoverPath]) -> BTreeSet<PathKey> {
    list.iter().map(|p| unoriented_key(c, p)).collect()
}

/// Some `g` with `g·p = q` as unoriented paths.
fn align_unoriented(c: &Cover, p: &CoverPath, q: &CoverPath) -> Option<Word> {
    c.align_paths(p, q).or_else(|| c.align_paths(&c.reverse_path(p), q))
}

/// Saturates the class of `pinps[seed]`. `pinps` must list every pINP
/// orbit of a map whose pINPs end at vertices.
pub fn compute_nielsen_class(
    f: &TrainTrackMap,
    pinps: &[EdgePinp],
    seed: usize,
    max_rounds: usize,
) -> Result<NielsenClass, ClassError> {
    let c = &f.cover;
    let eta = &pinps.get(seed).ok_or(ClassError::UnknownSeed(seed))?.path;
    let mut sat = Saturation::new(c, pinps);
    let mut frontier = vec![eta.start.clone(), c.path_end(eta)];
    sat.add(eta.clone());
    let mut prev = orbit_set(c, &sat.edges);
    for round in 1..=max_rounds {
        let mut next = Vec::new();
        for x in &frontier {
            for p in sat.at(x) {
                if let Some(y) = sat.add(p) {
                    next.push(y);
                }
            }
        }
        let cur = orbit_set(c, &sat.edges);
        if cur == prev {
            return Ok(finish(c, eta, seed, &sat.edges, round));
        }
        prev = cur;
        frontier = next;
    }
    Err(ClassError::RoundsExhausted(max_rounds))
}

fn finish(c: &Cover, eta: &CoverPath, seed: usize, edges: &[CoverPath], rounds: usize) -> NielsenClass {
    // first of each orbit in discovery order; the seed comes first
    let mut reps: BTreeMap<PathKey, usize> = BTreeMap::new();
    let mut ey_reps = Vec::new();
    for p in edges {
        reps.entry(unoriented_key(c, p)).or_insert_with(|| {
            ey_reps.push(p.clone());
            ey_reps.len() - 1
        });
    }
    let mut generators = vec![c.path_stabilizer(eta)];
    if let Some(flip) = c.align_paths(&c.reverse_path(eta), eta) {
        generators.push(flip);
    }
    for p in edges {
        let r = &ey_reps[reps[&unoriented_key(c, p)]];
        if p == r {
            continue;
        }
        generators.push(align_unoriented(c, p, r).expect("same orbit"));
    }
    let mut vy: BTreeMap<usize, Point> = BTreeMap::new();
    for p in edges {
        for x in [p.start.clone(), c.path_end(p)] {
            vy.entry(c.vertex_of(&x)).or_insert(x);
        }
    }
    NielsenClass { seed, vy_reps: vy.into_values().collect(), ey_reps, generators, rounds }
}

/// Searches for a concatenation of pINPs from an endpoint of the seed to
/// `target`, expanding points nearest to the target first. Returns the
/// pINPs of the chain.
pub fn reconnect(
    f: &TrainTrackMap,
    pinps: &[EdgePinp],
    class: &NielsenClass,
    target: &Point,
    budget: usize,
) -> Option<Vec<CoverPath>> {
    let c = &f.cover;
    let sat = Saturation::new(c, pinps);
    let eta = &class.ey_reps[0];
    let mut parent: HashMap<Point, Option<(Point, CoverPath)>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for x in [eta.start.clone(), c.path_end(eta)] {
        parent.insert(x.clone(), None);
        heap.push(Reverse((c.dist(&x, target), x)));
    }
    let mut expanded = 0;
    while let Some(Reverse((_, x))) = heap.pop() {
        if x == *target {
            let mut chain = Vec::new();
            let mut cur = x;
            while let Some(Some((prev, p))) = parent.get(&cur) {
                chain.push(p.clone());
                cur = prev.clone();
            }
            chain.reverse();
            return Some(chain);
        }
        expanded += 1;
        if expanded > budget {
            return None;
        }
        for p in sat.at(&x) {
            let y = c.path_end(&p);
            if !parent.contains_key(&y) {
                parent.insert(y.clone(), Some((x.clone(), p)));
                heap.push(Reverse((c.dist(&y, target), y)));
            }
        }
    }
    None
}

/// Outcome of the ellipticity test on a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ellipticity {
    Elliptic,
    /// A generator or a product of two generators acting loxodromically.
    Loxodromic { witness: Word, factors: Vec<usize>, length: usize },
}

/// Serre's criterion: the group is elliptic iff every generator and every
/// product of two generators is.
pub fn is_elliptic_subgroup(c: &Cover, gens: &[Word]) -> Ellipticity {
    let lox = |w: &Word| {
        let t = c.translation_length(w);
        (t.kind == IsometryKind::Loxodromic).then_some(t.length)
    };
    for (i, s) in gens.iter().enumerate() {
        if let Some(length) = lox(s) {
            return Ellipticity::Loxodromic { witness: s.clone(), factors: vec![i], length };
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let w = gens[i].concat(&gens[j]);
            if let Some(length) = lox(&w) {
                return Ellipticity::Loxodromic { witness: w, factors: vec![i, j], length };
            }
        }
    }
    Ellipticity::Elliptic
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub seed: PinpDump,
    pub generators: Vec<Vec<Letter>>,
    pub elliptic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Letter>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_length: Option<usize>,
    pub vy_orbits: usize,
    pub ey_orbits: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtoroidalVerdict {
    pub atoroidal: bool,
    /// pINP orbits, after subdividing at their endpoints.
    pub pinp_count: usize,
    pub classes: Vec<ClassReport>,
}

/// Everything computed on the way to the verdict.
pub struct AtoroidalRun {
    pub verdict: AtoroidalVerdict,
    pub map: TrainTrackMap,
    pub pinps: Vec<EdgePinp>,
    pub classes: Vec<NielsenClass>,
    pub ellipticity: Vec<Ellipticity>,
    pub final_l: usize,
}

/// Finds the pINPs, makes them edge paths, and tests the stabilizer of
/// every Nielsen class for ellipticity.
pub fn decide_pseudo_atoroidal(f: &TrainTrackMap, opts: &PinpOptions, max_rounds: usize) -> Result<AtoroidalRun, ClassError> {
    f.verify_train_track().map_err(ClassError::NotTrainTrack)?;
    let search = find_all_pinps(f, opts)?;
    let set = extract_pinps(f, &search.hosts)?;
    let sd = subdivide_at_pinps(f, &set)?;
    let map = sd.map;
    let pinps = sd.pinps;
    let idx: Vec<usize> = (0..pinps.len()).collect();
    let classes = crate::par_map(&idx, opts.parallel, |&i| compute_nielsen_class(&map, &pinps, i, max_rounds))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let c = &map.cover;
    let g = map.graph();
    let ellipticity: Vec<Ellipticity> = classes.iter().map(|k| is_elliptic_subgroup(c, &k.generators)).collect();
    let reports = classes
        .iter()
        .zip(&ellipticity)
        .map(|(k, e)| {
            let p = &pinps[k.seed];
            let (witness, witness_length) = match e {
                Ellipticity::Elliptic => (None, None),
                Ellipticity::Loxodromic { witness, length, .. } => (Some(witness.to_letters(g)), Some(*length)),
            };
            ClassReport {
                seed: dump(c, &p.path, p.pivot, p.period, &p.twist),
                generators: k.generators.iter().map(|w| w.to_letters(g)).collect(),
                elliptic: witness.is_none(),
                witness,
                witness_length,
                vy_orbits: k.vy_reps.len(),
                ey_orbits: k.ey_reps.len(),
                rounds: k.rounds,
            }
        })
        .collect::<Vec<_>>();
    let verdict = AtoroidalVerdict {
        atoroidal: reports.iter().all(|r| r.elliptic),
        pinp_count: pinps.len(),
        classes: reports,
    };
    Ok(AtoroidalRun { verdict, map, pinps, classes, ellipticity, final_l: search.final_l })
}
