//! Slow reference implementations used as oracles by the tests.

#![allow(dead_code)]

use gbs::graph::GraphOfGroups;
use gbs::word::Word;
use num_bigint::BigInt;
use rand::Rng;

/// Letter of a word in `BS(p,q) = ⟨a, t | t a^q t⁻¹ = a^p⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tok {
    A(i64),
    T(i8),
}

/// Word problem by rewriting: merge powers of `a`, then pinch a randomly
/// chosen `t a^{mq} t⁻¹` or `t⁻¹ a^{mp} t` until none is left. Britton's
/// lemma makes the answer independent of the order.
pub fn britton_trivial(p: i64, q: i64, word: &[Tok], rng: &mut impl Rng) -> bool {
    let mut w: Vec<Tok> = word.to_vec();
    loop {
        let mut merged: Vec<Tok> = Vec::new();
        for &x in &w {
            match (merged.last_mut(), x) {
                (Some(Tok::A(k)), Tok::A(j)) => *k += j,
                _ => merged.push(x),
            }
            if merged.last() == Some(&Tok::A(0)) {
                merged.pop();
            }
        }
        w = merged;
        // (position, length, replacement exponent)
        let mut sites = Vec::new();
        for i in 0..w.len() {
            let Tok::T(s) = w[i] else { continue };
            let (k, j) = match w.get(i + 1) {
                Some(&Tok::A(k)) => (k, i + 2),
                _ => (0, i + 1),
            };
            if w.get(j) != Some(&Tok::T(-s)) {
                continue;
            }
            let (from, to) = if s > 0 { (q, p) } else { (p, q) };
            if k % from == 0 {
                sites.push((i, j - i + 1, k / from * to));
            }
        }
        if sites.is_empty() {
            return w.is_empty();
        }
        let (i, len, k) = sites[rng.gen_range(0..sites.len())];
        w.splice(i..i + len, [Tok::A(k)]);
    }
}

/// The same word in the library's representation, on `samples::bs(p, q)`.
pub fn to_word(g: &GraphOfGroups, word: &[Tok]) -> Word {
    let t = g.edge_by_name("t").unwrap();
    let tb = g.edge_by_name("T").unwrap();
    let mut exps = vec![BigInt::from(0)];
    let mut edges = Vec::new();
    for &x in word {
        match x {
            Tok::A(k) => *exps.last_mut().unwrap() += k,
            Tok::T(s) => {
                edges.push(if s > 0 { t } else { tb });
                exps.push(BigInt::from(0));
            }
        }
    }
    Word::from_parts(g, 0, exps, edges).unwrap()
}

pub fn random_tokens(rng: &mut impl Rng, max_len: usize, max_exp: i64) -> Vec<Tok> {
    let n = rng.gen_range(0..=max_len);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Tok::A(rng.gen_range(-max_exp..=max_exp))
            } else {
                Tok::T(if rng.gen_bool(0.5) { 1 } else { -1 })
            }
        })
        .collect()
}

/// Primitivity by boolean powers up to the Wielandt bound `(n-1)² + 1`.
pub fn primitive_by_powers(rows: &[Vec<u64>]) -> bool {
    let n = rows.len();
    if n == 0 {
        return false;
    }
    let s: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut p = s.clone();
    for _ in 1..(n - 1) * (n - 1) + 1 {
        p = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && s[k][j])).collect()).collect();
    }
    p.iter().all(|r| r.iter().all(|&x| x))
}

/// Spectral radius estimate `‖A^k‖^{1/k}` in the max row sum norm, with
/// rescaling; never below the true radius.
pub fn spectral_radius_upper(rows: &[Vec<u64>], k: usize) -> f64 {
    let n = rows.len();
    let a: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let mut p = a.clone();
    let mut log = 0.0;
    for _ in 1..k {
        p = (0..n).map(|i| (0..n).map(|j| (0..n).map(|m| p[i][m] * a[m][j]).sum()).collect()).collect();
        let norm: f64 = p.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        log += norm.ln();
        p.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x /= norm));
    }
    let norm: f64 = p.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    ((log + norm.ln()) / k as f64).exp()
}
