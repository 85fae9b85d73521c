//! Acceptance run: one line per criterion, non-zero exit on any failure.
//!
//! `cargo test -p gbs-core --test acceptance`

mod oracles;

use gbs::cover::{Cover, IsometryKind};
use gbs::lamination::{assemble, lamination_turns};
use gbs::matrix::Matrix;
use gbs::nielsen::{extract_pinps, find_all_pinps, image_index, subdivide_at_pinps, unoriented_key, PinpOptions};
use gbs::pipeline::{run, JobSpec, Mode, Status};
use gbs::pseudoperiodic::{decide_pseudo_atoroidal, is_elliptic_subgroup, reconnect, Ellipticity};
use gbs::samples;
use gbs::traintrack::{random_loop, random_point, TrainTrackMap};
use gbs::word::{is_trivial, Germ, Word};
use oracles::{britton_trivial, primitive_by_powers, random_tokens, spectral_radius_upper, to_word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn word_problem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut trivial = 0;
    let mut total = 0;
    for (p, q) in [(2, 3), (2, 4)] {
        let g = samples::bs(p, q);
        for _ in 0..10_000 {
            let toks = random_tokens(&mut rng, 8, 6);
            let expect = britton_trivial(p, q, &toks, &mut rng);
            let got = is_trivial(&g, &to_word(&g, &toks)).unwrap();
            ensure!(got == expect, "BS({p},{q}) {toks:?}: got {got}, oracle {expect}");
            trivial += expect as usize;
            total += 1;
        }
        // relators and their conjugates, padded to at most 8 letters
        for _ in 0..1_000 {
            use oracles::Tok::*;
            let m = rng.gen_range(-2..=2i64);
            let k = rng.gen_range(-6..=6i64);
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            let (from, to) = if s > 0 { (q, p) } else { (p, q) };
            let toks = [A(k), T(s), A(m * from), T(-s), A(-m * to), A(-k)];
            let expect = britton_trivial(p, q, &toks, &mut rng);
            ensure!(expect, "oracle rejects a relator");
            ensure!(is_trivial(&g, &to_word(&g, &toks)).unwrap(), "relator {toks:?} not trivial");
            trivial += 1;
            total += 1;
        }
    }
    Ok(format!("{total} loops agree ({trivial} trivial)"))
}

fn degree_law() -> Outcome {
    let graphs = [
        samples::bs(2, 3),
        samples::bs(2, 4),
        samples::rose(&["s", "t"], 3),
        samples::subdivided_perm(2).graph().clone(),
        samples::essential(2).graph().clone(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in graphs {
        let c = Cover::new(g.clone());
        for _ in 0..100 {
            let x = random_point(&c, &mut rng, 4);
            let v = c.vertex_of(&x);
            let expect: i64 = g.out_edges(v).map(|e| g.width(e)).sum();
            let ends: BTreeSet<_> = c.edge_paths_from(&x, 1).iter().map(|p| c.path_end(p)).collect();
            ensure!(ends.len() as i64 == expect, "degree {} at a lift of {}, expected {expect}", ends.len(), g.vertex_name(v));
            ensure!(ends.iter().all(|y| c.dist(&x, y) == 1), "neighbour at distance ≠ 1");
        }
    }
    let c = Cover::new(samples::bs(2, 3));
    ensure!(c.edge_paths_from(&c.root(), 1).len() == 5, "BS(2,3) degree is not 5");
    Ok("5 graphs × 100 points".into())
}

fn translation_lengths() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = Cover::new(samples::bs(2, 3));
    let mut lox = Vec::new();
    while lox.len() < 200 {
        let g = random_loop(&c, &mut rng, 5, 4);
        let t = c.translation_length(&g);
        if t.kind == IsometryKind::Loxodromic {
            ensure!(c.translation_length_oracle(&g) == t.length, "oracle disagrees on ‖g‖");
            let t2 = c.translation_length(&g.concat(&g));
            ensure!(t2.length == 2 * t.length, "‖g²‖ = {} but ‖g‖ = {}", t2.length, t.length);
            lox.push((g, t));
        }
    }
    // Disjoint axes: bridge length from the characteristic sets.
    let on_axis = |g: &Word, len: usize, z: &gbs::cover::Point| c.dist(z, &c.act_point(g, z)) == len;
    let mut pairs = 0;
    let mut tries = 0;
    while pairs < 50 {
        tries += 1;
        ensure!(tries < 20_000, "only {pairs} disjoint pairs found");
        let (a, ta) = &lox[rng.gen_range(0..lox.len())];
        let (b0, _) = &lox[rng.gen_range(0..lox.len())];
        let h = random_loop(&c, &mut rng, 4, 3);
        let b = h.concat(b0).concat(&h.inverse());
        let tb = c.translation_length(&b);
        let xa = ta.axis.as_ref().unwrap().start.clone();
        let xb = tb.axis.as_ref().unwrap().start.clone();
        let pts = c.path_points(&c.geodesic(&xa, &xb));
        let n = pts.len() - 1;
        let ka = pts.iter().take_while(|z| on_axis(a, ta.length, z)).count() - 1;
        let kb = pts.iter().rev().take_while(|z| on_axis(&b, tb.length, z)).count() - 1;
        if ka + kb >= n {
            continue;
        }
        let d = n - ka - kb;
        let ab = a.concat(&b);
        let want = ta.length + tb.length + 2 * d;
        ensure!(c.translation_length(&ab).length == want, "‖ab‖ ≠ ‖a‖+‖b‖+2d ({want})");
        ensure!(c.translation_length_oracle(&ab) == want, "oracle ‖ab‖ ≠ {want}");
        pairs += 1;
    }
    Ok(format!("200 loxodromics, 50 disjoint-axis pairs ({tries} tries)"))
}

fn verified_maps() -> Vec<(String, TrainTrackMap)> {
    let mut out = Vec::new();
    for name in samples::NAMES {
        for p in 1..=3 {
            let f = samples::by_name(name, p).unwrap();
            if f.verify_train_track().is_ok() {
                out.push((format!("{name} p={p}"), f));
            }
        }
    }
    out
}

fn train_track_algebra() -> Outcome {
    let maps = verified_maps();
    ensure!(maps.len() >= 16, "only {} verified maps", maps.len());
    for (name, f) in &maps {
        let a = f.transition_matrix();
        ensure!(f.compose(f).transition_matrix() == a.mul(&a), "{name}: A(f∘f) ≠ A(f)²");
        let t1 = f.turn_table();
        let t2 = f.power(2).turn_table();
        for (i, t) in t1.classes.iter().enumerate() {
            // legal iff the forward orbit never degenerates
            let mut s = *t;
            let mut legal = true;
            for _ in 0..=t1.classes.len() {
                if s.is_degenerate() {
                    legal = false;
                    break;
                }
                s = f.turn_image(&s);
            }
            ensure!(t1.legal[i] == legal, "{name}: legality of {t:?}");
            ensure!(!legal || t1.is_legal(&f.turn_image(t)), "{name}: Df of legal {t:?} is illegal");
            ensure!(t2.is_legal(t) == legal, "{name}: f and f² disagree on {t:?}");
        }
    }
    Ok(format!("{} maps", maps.len()))
}

fn matrix_decisions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut count = 0;
    let mut irreducible = 0;
    for n in 1..=4usize {
        for support in 0u32..1 << (n * n) {
            let rows: Vec<Vec<u64>> = (0..n)
                .map(|i| {
                    (0..n).map(|j| if support >> (i * n + j) & 1 == 1 { rng.gen_range(1..=2) } else { 0 }).collect()
                })
                .collect();
            let m = Matrix::from_rows(&rows);
            ensure!(m.is_primitive() == primitive_by_powers(&rows), "is_primitive on {rows:?}");
            count += 1;
            if let Ok(one) = m.pf_is_one() {
                irreducible += 1;
                let rho = spectral_radius_upper(&rows, 400);
                let perm = rows.iter().all(|r| r.iter().filter(|&&x| x > 0).count() == 1 && r.iter().all(|&x| x <= 1))
                    && (0..n).all(|j| rows.iter().filter(|r| r[j] > 0).count() == 1);
                ensure!(one == perm, "pf_is_one vs permutation on {rows:?}");
                ensure!(one == ((rho - 1.0).abs() < 0.1), "pf_is_one = {one} but ρ ≤ {rho:.4} on {rows:?}");
            }
        }
    }
    Ok(format!("{count} matrices, {irreducible} irreducible"))
}

fn pinp_suite() -> Outcome {
    let mut lines = Vec::new();
    for (name, p, expect) in [("trib", 1, 0), ("fib2", 1, 1), ("fib", 1, 1), ("interior", 1, 2), ("interior", 2, 2)] {
        let f = samples::by_name(name, p).unwrap();
        let opts = PinpOptions::default();
        let s = find_all_pinps(&f, &opts).map_err(|e| format!("{name}: {e}"))?;
        let set = extract_pinps(&f, &s.hosts).map_err(|e| format!("{name}: {e}"))?;
        ensure!(set.pinps.len() == expect, "{name} p={p}: {} pINP orbits, expected {expect}", set.pinps.len());
        let sd = subdivide_at_pinps(&f, &set).map_err(|e| format!("{name}: {e}"))?;
        let (m, c) = (&sd.map, &sd.map.cover);
        for q in &sd.pinps {
            // (a) [f^p(η)] = g·η by cover arithmetic
            let mut img = q.path.clone();
            for _ in 0..q.period {
                img = m.image_path(&img);
            }
            let h = c.align_paths(&q.path, &img).ok_or(format!("{name}: f^p(η) not a translate"))?;
            ensure!(c.act_path(&h, &q.path) == img, "{name}: aligning element fails");
            ensure!(c.act_path(&q.twist, &img) == q.path, "{name}: stored twist fails");
            // (b) closed under f up to orbit
            ensure!(image_index(m, &sd.pinps, &q.path).is_some(), "{name}: f(η) not listed");
        }
        // (c) the same orbit set with max_L + 2
        let l = s.final_l + 2;
        let big = find_all_pinps(&f, &PinpOptions { start_l: l, max_l: l, ..opts }).map_err(|e| format!("{name}: {e}"))?;
        let key = |hs: &[gbs::nielsen::PseudoPinp]| hs.iter().map(|h| unoriented_key(&f.cover, &h.path)).collect::<BTreeSet<_>>();
        ensure!(key(&s.hosts) == key(&big.hosts), "{name} p={p}: orbit set changes at L = {l}");
        lines.push(format!("{name}/{p}:{expect}@L{}", s.final_l));
    }
    Ok(lines.join(" "))
}

fn nielsen_classes() -> Outcome {
    let mut checked = 0;
    for (name, p) in [("fib", 1), ("fib", 2), ("fib2", 1), ("interior", 1), ("interior", 2)] {
        let f = samples::by_name(name, p).unwrap();
        let r = decide_pseudo_atoroidal(&f, &PinpOptions::default(), 20).map_err(|e| format!("{name}: {e}"))?;
        let c = &r.map.cover;
        for k in &r.classes {
            for g in &k.generators {
                for y in &k.vy_reps {
                    for h in [g.clone(), g.inverse()] {
                        let hy = c.act_point(&h, y);
                        ensure!(reconnect(&r.map, &r.pinps, k, &hy, 5000).is_some(), "{name} p={p}: g·y left VY");
                        checked += 1;
                    }
                }
            }
            let mut direct = true;
            for a in &k.generators {
                for b in &k.generators {
                    direct &= c.translation_length_oracle(a) == 0 && c.translation_length_oracle(&a.concat(b)) == 0;
                }
            }
            let serre = is_elliptic_subgroup(c, &k.generators) == Ellipticity::Elliptic;
            ensure!(serre == direct, "{name} p={p}: Serre {serre}, direct {direct}");
        }
    }
    Ok(format!("{checked} generator moves stay in VY"))
}

fn whitehead_stability() -> Outcome {
    let mut lines = 0;
    for (name, p) in [("trib", 1), ("trib", 2), ("fib", 1), ("fib", 2), ("fib", 3), ("interior", 1), ("interior", 2)] {
        let f = samples::by_name(name, p).unwrap();
        let g = f.graph();
        let base = lamination_turns(&f, 0).map_err(|e| format!("{name}: {e}"))?;
        ensure!(base.rounds <= base.k, "{name} p={p}: past the n+1+K cap");
        ensure!(
            base.turns.iter().all(|t| base.turns.contains(&f.turn_image(t))),
            "{name} p={p}: one more round adds turns"
        );
        let mut path = gbs::cover::CoverPath { start: f.cover.vertex_rep(g.origin(0)).clone(), germs: vec![Germ::new(0, 0)] };
        for _ in 0..base.n + 1 + base.rounds + 2 {
            path = f.image_path(&path);
        }
        let late: BTreeSet<_> = (1..path.len()).map(|k| f.cover.turn_at(&path.germs, k)).collect();
        ensure!(late.is_subset(&base.turns), "{name} p={p}: two extra rounds add turns");
        let graphs = assemble(g, &base.turns);
        for e in 1..g.num_edges() {
            let other = lamination_turns(&f, e).map_err(|e| format!("{name}: {e}"))?;
            ensure!(other.turns == base.turns, "{name} p={p}: seed {} differs", g.edge_name(e));
            ensure!(assemble(g, &other.turns) == graphs, "{name} p={p}: graphs differ");
        }
        for w in &graphs {
            for &(a, b) in &w.links {
                let (x, y) = (w.rotate(g, a), w.rotate(g, b));
                ensure!(w.links.contains(&(x.min(y), x.max(y))), "{name} p={p}: not G_v-invariant");
            }
            lines += w.links.len();
        }
    }
    Ok(format!("7 maps, {lines} links"))
}

fn job(name: &str, p: i64, mode: Mode) -> JobSpec {
    let f = samples::by_name(name, p).unwrap();
    let mut j = JobSpec::new(f.graph().to_spec(), f.to_spec(), mode);
    j.recheck = true;
    j
}

fn negative_controls() -> Outcome {
    let mut out = Vec::new();
    for (name, reason) in [("subdivided_perm", "pf_one"), ("perm", "pf_one")] {
        let r = run(&job(name, 2, Mode::All));
        ensure!(r.exit_code() == 0, "{name}: exit {}", r.exit_code());
        ensure!(r.verdict.fully_irreducible == Some(false), "{name}: not reducible");
        let stage = r.stages.iter().find(|s| s.stage == gbs::pipeline::Stage::Collapse).unwrap();
        ensure!(stage.status == Status::Reducible, "{name}: collapse stage did not decide");
        let col = r.collapse.as_ref().unwrap();
        let cert = col.certificate.as_ref().ok_or(format!("{name}: no certificate"))?;
        let json = serde_json::to_value(&cert.reason).unwrap();
        ensure!(json["kind"] == reason, "{name}: reason {}", json["kind"]);
        let checks = r.recheck.as_ref().unwrap();
        ensure!(checks.iter().all(|c| c.ok), "{name}: recheck failed");
        out.push(format!("{name}: {} collapse step(s), {} checks", col.steps.len(), checks.len()));
    }
    Ok(out.join("; "))
}

fn determinism() -> Outcome {
    let mut n = 0;
    for (name, p) in samples::FIXTURES {
        let j = job(name, *p, Mode::All);
        let a = run(&j).to_json_untimed();
        let b = run(&j).to_json_untimed();
        ensure!(a == b, "{name} p={p}: reports differ");
        let mut k = j.clone();
        k.parallel = !k.parallel;
        ensure!(run(&k).to_json_untimed() == a, "{name} p={p}: parallel and sequential differ");
        n += 1;
    }
    Ok(format!("{n} jobs byte-identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("word problem vs rewriting oracle", word_problem),
        ("cover degree law", degree_law),
        ("translation length laws", translation_lengths),
        ("train track algebra", train_track_algebra),
        ("matrix decisions", matrix_decisions),
        ("pINP suite", pinp_suite),
        ("Nielsen classes", nielsen_classes),
        ("Whitehead stability", whitehead_stability),
        ("negative controls", negative_controls),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::var("GBS_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    std::panic::set_hook(Box::new(|_| {}));
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name:<34} {secs:>6.1}s  {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name:<34} {secs:>6.1}s  {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
