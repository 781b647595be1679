//! Brute-force reference scorer, written independently of the engine:
//! plain index loops, every cosine computed from scratch in f64.

#![allow(dead_code)]

use analogy_core::{Algorithm, ConstraintMode, EmbeddingSet};

pub fn cos(u: &[f32], v: &[f32]) -> f64 {
    let mut uv = 0.0f64;
    let mut uu = 0.0f64;
    let mut vv = 0.0f64;
    for i in 0..u.len() {
        let x = u[i] as f64;
        let y = v[i] as f64;
        uv += x * y;
        uu += x * x;
        vv += y * y;
    }
    uv / (uu.sqrt() * vv.sqrt())
}

/// Direction-pair score; `None` when the pair is rejected (too far apart
/// or identical).
pub fn pair(a: &[f32], c: &[f32], b: &[f32], d: &[f32], delta: f64) -> Option<f64> {
    let n = a.len();
    let mut ac = vec![0.0f64; n];
    let mut bd = vec![0.0f64; n];
    for i in 0..n {
        ac[i] = a[i] as f64 - c[i] as f64;
        bd[i] = b[i] as f64 - d[i] as f64;
    }
    let bd_len = bd.iter().map(|x| x * x).sum::<f64>().sqrt();
    if bd_len == 0.0 || bd_len > delta {
        return None;
    }
    let ac_len = ac.iter().map(|x| x * x).sum::<f64>().sqrt();
    if ac_len == 0.0 {
        return Some(0.0);
    }
    let dot: f64 = (0..n).map(|i| ac[i] * bd[i]).sum();
    Some(dot / (ac_len * bd_len))
}

pub fn score(algorithm: Algorithm, a: &[f32], b: &[f32], c: &[f32], d: &[f32]) -> f64 {
    match algorithm {
        Algorithm::CosAdd => cos(d, c) - cos(d, a) + cos(d, b),
        Algorithm::CosMul { epsilon, shifted } => {
            let (ca, cb, cc) = (cos(d, a), cos(d, b), cos(d, c));
            if shifted {
                ((1.0 + cc) / 2.0) * ((1.0 + cb) / 2.0) / ((1.0 + ca) / 2.0 + epsilon)
            } else {
                cc * cb / (ca + epsilon)
            }
        }
        Algorithm::BolukbasiDir { delta } => pair(a, c, b, d, delta).unwrap_or(0.0),
    }
}

/// Every candidate with its score, best first; ties go to the lower index.
pub fn ranking(
    set: &EmbeddingSet,
    admitted: &[usize],
    (a, b, c): (usize, usize, usize),
    algorithm: Algorithm,
    mode: ConstraintMode,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for &d in admitted {
        if mode == ConstraintMode::ExcludeInputs && (d == a || d == b || d == c) {
            continue;
        }
        let s = score(algorithm, set.vector(a), set.vector(b), set.vector(c), set.vector(d));
        out.push((d, s));
    }
    out.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
    out
}

/// All admitted ordered pairs `(b, d)`, `b != d`, that pass the threshold,
/// best first.
pub fn pairs(set: &EmbeddingSet, admitted: &[usize], a: usize, c: usize, delta: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for &b in admitted {
        for &d in admitted {
            if b == d {
                continue;
            }
            if let Some(s) = pair(set.vector(a), set.vector(c), set.vector(b), set.vector(d), delta) {
                out.push((b, d, s));
            }
        }
    }
    out.sort_by(|x, y| {
        y.2.partial_cmp(&x.2)
            .unwrap()
            .then(x.0.cmp(&y.0))
            .then(x.1.cmp(&y.1))
    });
    out
}
