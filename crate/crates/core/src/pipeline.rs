//! Staged decision pipeline with a deterministic, versioned report.
//!
//! Stages run in order: validate, verify, collapse, atoroidal, whitehead.
//! Each verdict carries the data needed to check it again; `recheck`
//! replays those checks with the slower oracles.

use crate::collapse::{collapse_to_irreducible, recheck_certificate, CollapseOutcome, CollapseStep, ReducibilityCertificate};
use crate::cover::{CoverPath, IsometryKind};
use crate::graph::{validate_graph, Diagnostics, GraphOfGroups, GraphSpec};
use crate::lamination::{
    assemble, decide_fully_irreducible, lamination_turns, Family, IrreducibilityVerdict, LaminationError, VertexReport,
    WhiteheadGraph,
};
use crate::nielsen::{NielsenError, PinpOptions};
use crate::pseudoperiodic::{decide_pseudo_atoroidal, AtoroidalVerdict, ClassError};
use crate::traintrack::{MapDocument, MapSpec, TrainTrackMap};
use crate::word::{germ_word, Letter, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Validate,
    Atoroidal,
    Iwip,
    All,
}

/// Index sets `I_v` of the family of allowed subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub schema_version: u32,
    pub index_sets: Family,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub graph: GraphSpec,
    pub map: MapSpec,
    pub family: Option<FamilySpec>,
    pub mode: Mode,
    pub max_l: usize,
    pub max_rounds: usize,
    pub recheck: bool,
    /// Run the Whitehead stage without a pseudo-atoroidal verdict.
    pub assume_atoroidal: bool,
    pub parallel: bool,
}

impl JobSpec {
    pub fn new(graph: GraphSpec, map: MapSpec, mode: Mode) -> Self {
        JobSpec {
            graph,
            map,
            family: None,
            mode,
            max_l: 6,
            max_rounds: 16,
            recheck: false,
            assume_atoroidal: false,
            parallel: crate::PARALLEL_DEFAULT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validate,
    Verify,
    Collapse,
    Atoroidal,
    Whitehead,
    Recheck,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::Verify => "verify",
            Stage::Collapse => "collapse",
            Stage::Atoroidal => "atoroidal",
            Stage::Whitehead => "whitehead",
            Stage::Recheck => "recheck",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Reducible,
    Skipped,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Input,
    Precondition,
    BoundExhausted,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input | ErrorKind::Precondition => 2,
            ErrorKind::BoundExhausted => 3,
            ErrorKind::Internal => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: Stage,
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_l: usize,
    pub max_rounds: usize,
    pub assume_atoroidal: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub atoroidal: Option<bool>,
    pub fully_irreducible: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainTrackSection {
    pub vertices: usize,
    pub edge_orbits: usize,
    pub transition_matrix: Vec<Vec<u64>>,
    pub illegal_turns: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseSection {
    pub steps: Vec<CollapseStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ReducibilityCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtoroidalSection {
    #[serde(flatten)]
    pub verdict: AtoroidalVerdict,
    pub final_l: usize,
    /// The map after subdividing at pINP endpoints, when that changed it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subdivided: Option<MapDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhiteheadSection {
    pub seed: String,
    pub primitivity_exponent: usize,
    pub turn_orbits: usize,
    pub lamination_turns: usize,
    pub rounds: usize,
    #[serde(flatten)]
    pub verdict: IrreducibilityVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub stage: Stage,
    pub claim: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub mode: Mode,
    pub bounds: Bounds,
    pub stages: Vec<StageRecord>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_track: Option<TrainTrackSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse: Option<CollapseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoroidal: Option<AtoroidalSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub whitehead: Option<WhiteheadSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recheck: Option<Vec<Check>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<StageError>,
    /// Wall clock per stage, the only nondeterministic field.
    pub timing_ms: BTreeMap<String, u64>,
}

impl Report {
    fn new(job: &JobSpec) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: Tool { name: "gbs".into(), version: env!("CARGO_PKG_VERSION").into() },
            mode: job.mode,
            bounds: Bounds { max_l: job.max_l, max_rounds: job.max_rounds, assume_atoroidal: job.assume_atoroidal },
            stages: Vec::new(),
            verdict: Verdict::default(),
            train_track: None,
            collapse: None,
            atoroidal: None,
            whitehead: None,
            recheck: None,
            error: None,
            timing_ms: BTreeMap::new(),
        }
    }

    /// 0 when decided, 2 on input or precondition errors, 3 when a search
    /// bound ran out, 1 when a recheck failed.
    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return e.kind.exit_code();
        }
        if self.recheck.as_ref().is_some_and(|cs| cs.iter().any(|c| !c.ok)) {
            return 1;
        }
        0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing field emptied.
    pub fn to_json_untimed(&self) -> String {
        let mut r = self.clone();
        r.timing_ms.clear();
        r.to_json()
    }

    fn push(&mut self, stage: Stage, status: Status, note: Option<String>) {
        self.stages.push(StageRecord { stage, status, note });
    }

    fn fail(&mut self, stage: Stage, kind: ErrorKind, message: String, details: Option<serde_json::Value>) {
        self.push(stage, Status::Failed, None);
        self.error = Some(StageError { stage, kind, message, details });
    }

    fn skip(&mut self, stage: Stage, why: &str) {
        self.push(stage, Status::Skipped, Some(why.into()));
    }
}

fn timed<T>(report: &mut Report, stage: Stage, body: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = body();
    *report.timing_ms.entry(stage.name().into()).or_default() += t.elapsed().as_millis() as u64;
    out
}

fn nielsen_kind(e: &NielsenError) -> ErrorKind {
    match e {
        NielsenError::BoundExhausted(_) | NielsenError::ClassifyBound(_) => ErrorKind::BoundExhausted,
        NielsenError::Malformed | NielsenError::Inconsistent(_) => ErrorKind::Internal,
    }
}

fn class_kind(e: &ClassError) -> ErrorKind {
    match e {
        ClassError::RoundsExhausted(_) => ErrorKind::BoundExhausted,
        ClassError::NotTrainTrack(_) => ErrorKind::Precondition,
        ClassError::UnknownSeed(_) => ErrorKind::Internal,
        ClassError::Nielsen(n) => nielsen_kind(n),
    }
}

fn lamination_kind(e: &LaminationError) -> ErrorKind {
    match e {
        LaminationError::CapExceeded(_) => ErrorKind::BoundExhausted,
        LaminationError::UnknownVertex(_) => ErrorKind::Input,
        LaminationError::EmptyGraph(_) => ErrorKind::Internal,
        _ => ErrorKind::Precondition,
    }
}

/// Builds the map from the job's documents.
pub fn load(job: &JobSpec) -> Result<TrainTrackMap, StageError> {
    let g = validate_graph(&job.graph).map_err(|d: Diagnostics| StageError {
        stage: Stage::Validate,
        kind: ErrorKind::Input,
        message: d.to_string(),
        details: serde_json::to_value(&d.0).ok(),
    })?;
    TrainTrackMap::from_spec(g, &job.map).map_err(|e| StageError {
        stage: Stage::Validate,
        kind: ErrorKind::Input,
        message: e.to_string(),
        details: None,
    })
}

pub fn run(job: &JobSpec) -> Report {
    let mut report = Report::new(job);
    let input = match timed(&mut report, Stage::Validate, || load(job)) {
        Ok(f) => f,
        Err(e) => {
            report.push(Stage::Validate, Status::Failed, None);
            report.error = Some(e);
            return report;
        }
    };
    if let Some(fam) = &job.family {
        if fam.schema_version != SCHEMA_VERSION {
            let msg = format!("unsupported family schema_version {}", fam.schema_version);
            report.fail(Stage::Validate, ErrorKind::Input, msg, None);
            return report;
        }
    }
    report.push(Stage::Validate, Status::Ok, None);

    let verified = timed(&mut report, Stage::Verify, || input.verify_train_track());
    let g = input.graph();
    let a = input.transition_matrix();
    let table = input.turn_table();
    report.train_track = Some(TrainTrackSection {
        vertices: g.num_vertices(),
        edge_orbits: g.num_orbits(),
        transition_matrix: a.rows(),
        illegal_turns: table.legal.iter().filter(|&&l| !l).count(),
    });
    if let Err(ce) = verified {
        report.fail(
            Stage::Verify,
            ErrorKind::Precondition,
            format!("not a train track map: {ce}"),
            serde_json::to_value(&ce).ok(),
        );
        return report;
    }
    report.push(Stage::Verify, Status::Ok, None);
    if job.mode == Mode::Validate {
        finish(job, &input, &mut report);
        return report;
    }

    let outcome = timed(&mut report, Stage::Collapse, || collapse_to_irreducible(&input));
    let f = match outcome {
        Err(e) => {
            report.fail(Stage::Collapse, ErrorKind::Internal, e.to_string(), None);
            return report;
        }
        Ok(CollapseOutcome::Reducible(cert)) => {
            report.collapse = Some(CollapseSection { steps: cert.steps.clone(), certificate: Some(cert) });
            report.push(Stage::Collapse, Status::Reducible, None);
            report.verdict.fully_irreducible = Some(false);
            report.skip(Stage::Atoroidal, "reducible at the collapse stage");
            report.skip(Stage::Whitehead, "reducible at the collapse stage");
            finish(job, &input, &mut report);
            return report;
        }
        Ok(CollapseOutcome::Primitive { map, steps }) => {
            let note = (!steps.is_empty()).then(|| format!("{} invariant forest(s) collapsed", steps.len()));
            report.collapse = Some(CollapseSection { steps, certificate: None });
            report.push(Stage::Collapse, Status::Ok, note);
            map
        }
    };

    let run_atoroidal = match job.mode {
        Mode::Atoroidal | Mode::All => true,
        Mode::Iwip => !job.assume_atoroidal,
        Mode::Validate => unreachable!(),
    };
    let mut atoroidal = false;
    if run_atoroidal {
        let opts = PinpOptions { max_l: job.max_l, parallel: job.parallel, ..PinpOptions::default() };
        let res = timed(&mut report, Stage::Atoroidal, || decide_pseudo_atoroidal(&f, &opts, job.max_rounds));
        match res {
            Err(e) => {
                report.fail(Stage::Atoroidal, class_kind(&e), e.to_string(), None);
                return report;
            }
            Ok(run) => {
                atoroidal = run.verdict.atoroidal;
                report.verdict.atoroidal = Some(atoroidal);
                let subdivided = (run.verdict.pinp_count > 0).then(|| MapDocument::of(&run.map));
                report.atoroidal = Some(AtoroidalSection { verdict: run.verdict, final_l: run.final_l, subdivided });
                report.push(Stage::Atoroidal, Status::Ok, None);
            }
        }
    } else {
        report.skip(Stage::Atoroidal, "assumed pseudo-atoroidal");
    }

    if job.mode == Mode::Atoroidal {
        report.skip(Stage::Whitehead, "not requested");
    } else if !atoroidal && !job.assume_atoroidal {
        report.skip(Stage::Whitehead, "not pseudo-atoroidal");
    } else {
        let family = job.family.as_ref().map(|x| &x.index_sets);
        let res = timed(&mut report, Stage::Whitehead, || {
            decide_fully_irreducible(&f, family, atoroidal, job.assume_atoroidal)
        });
        match res {
            Err(e) => {
                report.fail(Stage::Whitehead, lamination_kind(&e), e.to_string(), None);
                return report;
            }
            Ok((ts, verdict)) => {
                let reducible = matches!(verdict, IrreducibilityVerdict::Reducible { .. });
                report.verdict.fully_irreducible = Some(!reducible);
                report.whitehead = Some(WhiteheadSection {
                    seed: f.graph().edge_name(ts.seed).into(),
                    primitivity_exponent: ts.n,
                    turn_orbits: ts.k,
                    lamination_turns: ts.turns.len(),
                    rounds: ts.rounds,
                    verdict,
                });
                report.push(Stage::Whitehead, if reducible { Status::Reducible } else { Status::Ok }, None);
            }
        }
    }
    finish(job, &input, &mut report);
    report
}

fn finish(job: &JobSpec, input: &TrainTrackMap, report: &mut Report) {
    if job.recheck {
        let t = Instant::now();
        let checks = recheck(job, input, report);
        report.timing_ms.insert(Stage::Recheck.name().into(), t.elapsed().as_millis() as u64);
        let ok = checks.iter().all(|c| c.ok);
        report.push(Stage::Recheck, if ok { Status::Ok } else { Status::Failed }, None);
        report.recheck = Some(checks);
    }
}

fn check(stage: Stage, claim: impl Into<String>, res: Result<(), String>) -> Check {
    let ok = res.is_ok();
    Check { stage, claim: claim.into(), ok, detail: res.err() }
}

/// Path of a dumped pINP, started at the representative of its vertex.
fn path_of(f: &TrainTrackMap, letters: &[Letter]) -> Result<CoverPath, String> {
    let c = &f.cover;
    let w = Word::from_letters(f.graph(), c.base(), letters).map_err(|e| e.to_string())?;
    let v = w.start();
    let path = c.anchored(c.tree_word(v), &w);
    if germ_word(f.graph(), v, &path.germs, &BigInt::from(0)) != w {
        return Err("dumped path is not in normal form".into());
    }
    Ok(path)
}

fn letters(f: &TrainTrackMap, l: &[Letter]) -> Result<Word, String> {
    Word::from_letters(f.graph(), f.cover.base(), l).map_err(|e| e.to_string())
}

/// Re-verifies every witness in the report with independent checks.
pub fn recheck(job: &JobSpec, input: &TrainTrackMap, report: &Report) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(check(Stage::Verify, "equivariance on fresh samples", {
        input.check_equivariance(64, 0xc0ffee).map_err(|e| e.to_string())
    }));
    out.push(check(Stage::Verify, "A(f∘f) = A(f)²", {
        let a = input.transition_matrix();
        if input.power(2).transition_matrix() == a.mul(&a) {
            Ok(())
        } else {
            Err("matrices differ".into())
        }
    }));

    let mut primitive = input.clone();
    if let Some(col) = &report.collapse {
        if let Some(cert) = &col.certificate {
            out.push(check(Stage::Collapse, "reducibility certificate", {
                recheck_certificate(input, cert).map_err(|e| e.to_string())
            }));
        } else {
            let replay = collapse_to_irreducible(input);
            out.push(check(Stage::Collapse, "collapse steps replay to a primitive map", match &replay {
                Ok(CollapseOutcome::Primitive { map, steps }) if steps == &col.steps => {
                    primitive = map.clone();
                    if map.transition_matrix().is_primitive_by_powers() {
                        Ok(())
                    } else {
                        Err("matrix fails the powering test".into())
                    }
                }
                Ok(_) => Err("replay differs".into()),
                Err(e) => Err(e.to_string()),
            }));
        }
    }

    if let Some(at) = &report.atoroidal {
        let f = match &at.subdivided {
            None => Ok(primitive.clone()),
            Some(doc) => validate_graph(&doc.graph)
                .map_err(|d| d.to_string())
                .and_then(|g| TrainTrackMap::from_spec(g, &doc.map).map_err(|e| e.to_string()))
                .and_then(|m| m.verify_train_track().map(|_| m).map_err(|e| e.to_string())),
        };
        match f {
            Err(e) => out.push(check(Stage::Atoroidal, "subdivided map re-validates", Err(e))),
            Ok(f) => recheck_atoroidal(&f, at, &mut out),
        }
    }

    if let Some(wh) = &report.whitehead {
        recheck_whitehead(job, &primitive, wh, &mut out);
    }
    out
}

fn recheck_atoroidal(f: &TrainTrackMap, at: &AtoroidalSection, out: &mut Vec<Check>) {
    let c = &f.cover;
    let k = at.verdict.classes.iter().fold(1usize, |a, r| a.lcm(&r.seed.period));
    let fk = f.power(k);
    for (i, r) in at.verdict.classes.iter().enumerate() {
        out.push(check(Stage::Atoroidal, format!("class {i}: seed is a periodic Nielsen path"), {
            path_of(f, &r.seed.path).and_then(|eta| {
                let mut img = eta.clone();
                for _ in 0..r.seed.period {
                    img = f.image_path(&img);
                }
                match c.align_paths(&eta, &img) {
                    Some(h) if c.act_path(&h, &eta) == img => Ok(()),
                    _ => Err("f^p(η) is not a translate of η".into()),
                }
            })
        }));
        out.push(check(Stage::Atoroidal, format!("class {i}: ellipticity by translation lengths"), {
            r.generators.iter().map(|l| letters(f, l)).collect::<Result<Vec<_>, _>>().and_then(|gens| {
                let mut lox = false;
                for (a, x) in gens.iter().enumerate() {
                    lox |= c.translation_length_oracle(x) > 0;
                    for y in &gens[a + 1..] {
                        lox |= c.translation_length_oracle(&x.concat(y)) > 0;
                    }
                }
                if lox == r.elliptic {
                    Err(format!("oracle says elliptic = {}", !lox))
                } else {
                    Ok(())
                }
            })
        }));
        if let (Some(w), Some(len)) = (&r.witness, r.witness_length) {
            out.push(check(Stage::Atoroidal, format!("class {i}: witness has a bounded φ-orbit"), {
                letters(f, w).and_then(|mut w| {
                    for n in 0..4 {
                        let t = c.translation_length_oracle(&w);
                        if t != len || c.translation_length(&w).kind != IsometryKind::Loxodromic {
                            return Err(format!("‖φ^{}(w)‖ = {t}, expected {len}", n * k));
                        }
                        w = fk.phi(&w);
                    }
                    Ok(())
                })
            }));
        }
    }
}

fn recheck_whitehead(job: &JobSpec, f: &TrainTrackMap, wh: &WhiteheadSection, out: &mut Vec<Check>) {
    let g = f.graph();
    let base = match g.edge_by_name(&wh.seed).map(|e| lamination_turns(f, e)) {
        Some(Ok(ts)) => ts,
        _ => {
            out.push(check(Stage::Whitehead, "turn set recomputes", Err("seed edge failed".into())));
            return;
        }
    };
    out.push(check(Stage::Whitehead, "turn set is closed under Df", {
        match base.turns.iter().find(|t| !base.turns.contains(&f.turn_image(t))) {
            None => Ok(()),
            Some(t) => Err(format!("{t:?}")),
        }
    }));
    out.push(check(Stage::Whitehead, "turn set is independent of the seed edge", {
        let mut bad = None;
        for e in 0..g.num_edges() {
            match lamination_turns(f, e) {
                Ok(ts) if ts.turns == base.turns => {}
                _ => bad = bad.or(Some(g.edge_name(e).to_string())),
            }
        }
        bad.map_or(Ok(()), |e| Err(format!("seed `{e}` differs")))
    }));
    // Components and indices from germ sets, without the union-find.
    let graphs = assemble(g, &base.turns);
    let vertices = match &wh.verdict {
        IrreducibilityVerdict::FullyIrreducible { vertices } => vertices,
        IrreducibilityVerdict::Reducible { vertices, .. } => vertices,
    };
    let family = job.family.as_ref().map(|x| &x.index_sets);
    for (w, vr) in graphs.iter().zip(vertices) {
        out.push(check(Stage::Whitehead, format!("components at `{}`", vr.vertex), {
            let iv = family.and_then(|fam| fam.get(&vr.vertex)).map(|v| v.as_slice()).unwrap_or(&[1]);
            compare_components(w, g, &germ_components(w), vr, iv)
        }));
    }
}

fn germ_components(w: &WhiteheadGraph) -> Vec<BTreeSet<usize>> {
    let mut comps: Vec<BTreeSet<usize>> = Vec::new();
    let mut seen = vec![false; w.nodes.len()];
    for s in 0..w.nodes.len() {
        if seen[s] {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &(a, b) in &w.links {
                let y = if a == x { b } else if b == x { a } else { continue };
                if !seen[y] {
                    seen[y] = true;
                    comp.insert(y);
                    stack.push(y);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

fn compare_components(
    w: &WhiteheadGraph,
    g: &GraphOfGroups,
    comps: &[BTreeSet<usize>],
    vr: &VertexReport,
    iv: &[u64],
) -> Result<(), String> {
    if comps.len() != vr.components.len() || vr.connected != (comps.len() == 1) {
        return Err(format!("{} components recomputed, {} reported", comps.len(), vr.components.len()));
    }
    for (comp, cw) in comps.iter().zip(&vr.components) {
        let names: BTreeSet<(String, i64)> =
            comp.iter().map(|&i| (g.edge_name(w.nodes[i].edge).to_string(), w.nodes[i].idx)).collect();
        let reported: BTreeSet<(String, i64)> = cw.germs.iter().map(|x| (x.edge.clone(), x.index)).collect();
        if names != reported {
            return Err("reported germs do not form a component".into());
        }
        let mut cur = comp.clone();
        let mut index = 0;
        loop {
            cur = cur.iter().map(|&i| w.rotate(g, i)).collect();
            index += 1;
            if &cur == comp {
                break;
            }
        }
        if index != cw.index {
            return Err(format!("index {index} recomputed, {} reported", cw.index));
        }
        if iv.iter().any(|&i| i > 0 && index as u64 % i == 0) != cw.in_family {
            return Err("family membership differs".into());
        }
    }
    Ok(())
}

/// Human-readable summary of a report.
pub fn explain(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "gbs {} report (schema {}), mode {:?}", r.tool.version, r.schema_version, r.mode);
    for st in &r.stages {
        let note = st.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
        let _ = writeln!(s, "  {:<10} {:?}{note}", st.stage.name(), st.status);
    }
    if let Some(tt) = &r.train_track {
        let _ = writeln!(
            s,
            "train track: {} vertex orbit(s), {} edge orbit(s), {} illegal turn class(es), A(f) = {:?}",
            tt.vertices, tt.edge_orbits, tt.illegal_turns, tt.transition_matrix
        );
    }
    if let Some(col) = &r.collapse {
        for step in &col.steps {
            let _ = writeln!(s, "collapsed invariant forest: {}", step.edges.join(", "));
        }
        if let Some(cert) = &col.certificate {
            use crate::collapse::Reason;
            let why = match &cert.reason {
                Reason::InvariantEssential { edges, .. } => {
                    format!("invariant subgraph {{{}}} carries a loxodromic element", edges.join(", "))
                }
                Reason::PfOne { permutation } => {
                    format!("transition matrix is the permutation {permutation:?}, so f is an isometry")
                }
                Reason::NotPrimitive { period, classes } => {
                    let cl: Vec<String> = classes.iter().map(|c| format!("{{{}}}", c.join(", "))).collect();
                    format!("transition matrix has period {period}; classes {}", cl.join(" "))
                }
                Reason::SingleEdge => "a single edge orbit remains after collapsing".into(),
            };
            let _ = writeln!(s, "reducible: {why}");
        }
    }
    if let Some(at) = &r.atoroidal {
        if at.verdict.pinp_count == 0 {
            let _ = writeln!(s, "pseudo-atoroidal: no pINPs (search stable at L = {})", at.final_l);
        } else {
            let _ = writeln!(s, "{} pINP orbit(s), {} Nielsen class(es):", at.verdict.pinp_count, at.verdict.classes.len());
            for (i, c) in at.verdict.classes.iter().enumerate() {
                let verdict = if c.elliptic {
                    format!("stabilizer elliptic ({} generator(s) and their pairwise products fix points)", c.generators.len())
                } else {
                    format!("stabilizer loxodromic, witness of translation length {}", c.witness_length.unwrap_or(0))
                };
                let _ = writeln!(s, "  class {i}: period {}, {} EY orbit(s); {verdict}", c.seed.period, c.ey_orbits);
            }
            let _ = writeln!(s, "pseudo-atoroidal: {}", at.verdict.atoroidal);
        }
    }
    if let Some(wh) = &r.whitehead {
        let vertices = match &wh.verdict {
            IrreducibilityVerdict::FullyIrreducible { vertices } => vertices,
            IrreducibilityVerdict::Reducible { vertices, .. } => vertices,
        };
        for v in vertices {
            let idx: Vec<String> = v.components.iter().map(|c| c.index.to_string()).collect();
            let _ = writeln!(
                s,
                "Whitehead graph at `{}`: {}, component indices [{}]",
                v.vertex,
                if v.connected { "connected" } else { "disconnected" },
                idx.join(", ")
            );
        }
        match &wh.verdict {
            IrreducibilityVerdict::FullyIrreducible { .. } => {
                let _ = writeln!(s, "fully irreducible: no component stabilizer lies in the family");
            }
            IrreducibilityVerdict::Reducible { vertex, components, .. } => {
                let c = components.iter().find(|c| c.in_family).unwrap_or(&components[0]);
                let germs: Vec<String> = c.germs.iter().map(|x| format!("{}#{}", x.edge, x.index)).collect();
                let _ = writeln!(
                    s,
                    "reducible: at `{vertex}` the component {{{}}} has index {} divisible by {}",
                    germs.join(", "),
                    c.index,
                    c.divisor.unwrap_or(1)
                );
            }
        }
    }
    if let Some(checks) = &r.recheck {
        let bad = checks.iter().filter(|c| !c.ok).count();
        let _ = writeln!(s, "recheck: {} claim(s), {bad} failed", checks.len());
        for c in checks.iter().filter(|c| !c.ok) {
            let _ = writeln!(s, "  FAILED {}: {}", c.claim, c.detail.as_deref().unwrap_or(""));
        }
    }
    if let Some(e) = &r.error {
        let _ = writeln!(s, "error at {} ({:?}): {}", e.stage.name(), e.kind, e.message);
    }
    s
}
