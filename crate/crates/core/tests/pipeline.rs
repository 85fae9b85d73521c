use gbs::graph::GraphSpec;
use gbs::pipeline::*;
use gbs::samples;
use gbs::traintrack::MapSpec;
use std::path::Path;

fn fixture<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

fn job(stem: &str, mode: Mode) -> JobSpec {
    let g: GraphSpec = fixture(&format!("{stem}.graph.json"));
    let m: MapSpec = fixture(&format!("{stem}.map.json"));
    let mut j = JobSpec::new(g, m, mode);
    j.recheck = true;
    j
}

fn stage_status(r: &Report, s: Stage) -> Option<Status> {
    r.stages.iter().rev().find(|x| x.stage == s).map(|x| x.status.clone())
}

fn assert_rechecked(r: &Report) {
    let checks = r.recheck.as_ref().expect("recheck ran");
    for c in checks {
        assert!(c.ok, "{}: {:?}", c.claim, c.detail);
    }
}

#[test]
fn fixtures_match_samples() {
    for (name, p) in samples::FIXTURES {
        let f = samples::by_name(name, *p).unwrap();
        let stem = format!("{name}_p{p}");
        assert_eq!(fixture::<GraphSpec>(&format!("{stem}.graph.json")), f.graph().to_spec(), "{stem}");
        assert_eq!(fixture::<MapSpec>(&format!("{stem}.map.json")), f.to_spec(), "{stem}");
    }
}

#[test]
fn validate_mode() {
    let r = run(&job("trib_p1", Mode::Validate));
    assert_eq!(r.exit_code(), 0);
    assert_eq!(stage_status(&r, Stage::Verify), Some(Status::Ok));
    assert!(r.collapse.is_none());
    assert_rechecked(&r);
    let tt = r.train_track.unwrap();
    assert_eq!(tt.transition_matrix, vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]]);
}

#[test]
fn atoroidal_and_fully_irreducible() {
    let r = run(&job("trib_p1", Mode::All));
    assert_eq!(r.exit_code(), 0, "{}", explain(&r));
    assert_eq!(r.verdict, Verdict { atoroidal: Some(true), fully_irreducible: Some(true) });
    assert_eq!(r.atoroidal.as_ref().unwrap().verdict.pinp_count, 0);
    assert_rechecked(&r);
    let text = explain(&r);
    assert!(text.contains("no pINPs"));
    assert!(text.contains("Whitehead graph at `v`: connected"));
}

#[test]
fn not_atoroidal_skips_whitehead() {
    for stem in ["fib_p1", "interior_p1"] {
        let r = run(&job(stem, Mode::All));
        assert_eq!(r.exit_code(), 0, "{}", explain(&r));
        assert_eq!(r.verdict, Verdict { atoroidal: Some(false), fully_irreducible: None });
        assert_eq!(stage_status(&r, Stage::Whitehead), Some(Status::Skipped));
        let at = r.atoroidal.as_ref().unwrap();
        assert!(at.subdivided.is_some() || stem == "fib_p1");
        assert!(at.verdict.classes.iter().any(|c| !c.elliptic && c.witness.is_some()));
        assert_rechecked(&r);
    }
}

#[test]
fn collapse_stage_certificates() {
    for stem in ["perm_p2", "essential_p2", "subdivided_perm_p2"] {
        let r = run(&job(stem, Mode::All));
        assert_eq!(r.exit_code(), 0, "{stem}: {}", explain(&r));
        assert_eq!(r.verdict.fully_irreducible, Some(false), "{stem}");
        assert_eq!(stage_status(&r, Stage::Collapse), Some(Status::Reducible));
        assert!(r.collapse.as_ref().unwrap().certificate.is_some());
        assert_rechecked(&r);
        assert!(explain(&r).contains("reducible: "));
    }
}

#[test]
fn collapsible_forest_then_continue() {
    let r = run(&job("collapsible_fib2_p2", Mode::All));
    assert_eq!(r.exit_code(), 0, "{}", explain(&r));
    let col = r.collapse.as_ref().unwrap();
    assert_eq!(col.steps.len(), 1);
    assert!(col.certificate.is_none());
    assert_eq!(r.verdict.atoroidal, Some(false));
    assert_rechecked(&r);
}

#[test]
fn width_two_family_controls_the_verdict() {
    let mut j = job("trib_p2", Mode::Iwip);
    j.assume_atoroidal = true;
    let r = run(&j);
    assert_eq!(r.verdict.fully_irreducible, Some(false), "{}", explain(&r));
    assert_eq!(stage_status(&r, Stage::Atoroidal), Some(Status::Skipped));
    assert_rechecked(&r);
    assert!(explain(&r).contains("has index 2 divisible by 1"));

    j.family = Some(fixture("restricted_v3.family.json"));
    let r = run(&j);
    assert_eq!(r.verdict.fully_irreducible, Some(true));
    assert_rechecked(&r);
}

#[test]
fn deterministic_json() {
    for stem in ["trib_p1", "interior_p1", "perm_p2"] {
        let a = run(&job(stem, Mode::All)).to_json_untimed();
        let b = run(&job(stem, Mode::All)).to_json_untimed();
        assert_eq!(a, b, "{stem}");
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema_version"], 1);
    }
}

#[test]
fn input_errors_exit_two() {
    let mut j = job("trib_p1", Mode::All);
    j.graph.schema_version = 9;
    let r = run(&j);
    assert_eq!(r.exit_code(), 2);
    assert_eq!(r.error.as_ref().unwrap().stage, Stage::Validate);

    let mut j = job("trib_p1", Mode::All);
    j.map.phi.edges.remove("x");
    assert_eq!(run(&j).exit_code(), 2);

    // Index sets naming a vertex the graph does not have.
    let mut j = job("trib_p1", Mode::All);
    j.family = Some(FamilySpec { schema_version: 1, index_sets: [("w".to_string(), vec![1])].into() });
    j.assume_atoroidal = true;
    let r = run(&j);
    assert_eq!(r.exit_code(), 2);
    assert_eq!(r.error.as_ref().unwrap().stage, Stage::Whitehead);
}

#[test]
fn bound_exhaustion_exits_three() {
    let mut j = job("fib_p1", Mode::Atoroidal);
    j.max_l = 2;
    let r = run(&j);
    assert_eq!(r.exit_code(), 3, "{}", explain(&r));
    assert_eq!(r.error.as_ref().unwrap().stage, Stage::Atoroidal);
}

#[test]
fn solvable_graphs_are_refused() {
    let g = samples::rose(&["s"], 2);
    let mut spec = g.to_spec();
    spec.edges.iter_mut().for_each(|e| e.label = 1);
    let m = job("trib_p1", Mode::Validate).map;
    let r = run(&JobSpec::new(spec, m, Mode::Validate));
    assert_eq!(r.exit_code(), 2);
    assert!(r.error.unwrap().message.contains("solvable"));
}
