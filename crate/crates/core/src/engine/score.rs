//! Cosine-based analogy scores.
//!
//! Everything accumulates in `f64`, whatever the storage width of the inputs.

use crate::error::{Error, Result};

/// Element types the scoring functions accept.
pub trait Component: Copy + Send + Sync {
    fn widen(self) -> f64;
}

impl Component for f32 {
    #[inline(always)]
    fn widen(self) -> f64 {
        f64::from(self)
    }
}

impl Component for f64 {
    #[inline(always)]
    fn widen(self) -> f64 {
        self
    }
}

pub fn dot<T: Component>(u: &[T], v: &[T]) -> f64 {
    u.iter().zip(v).map(|(&x, &y)| x.widen() * y.widen()).sum()
}

pub fn norm<T: Component>(u: &[T]) -> f64 {
    u.iter().map(|&x| x.widen() * x.widen()).sum::<f64>().sqrt()
}

pub fn euclidean_distance<T: Component>(u: &[T], v: &[T]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(&x, &y)| {
            let d = x.widen() - y.widen();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn cosine<T: Component>(u: &[T], v: &[T]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimMismatch(u.len(), v.len()));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Maps a cosine from `[-1, 1]` into `[0, 1]`.
#[inline]
pub fn shifted(cos: f64) -> f64 {
    (1.0 + cos) / 2.0
}

/// Additive analogy score: `cos(d,c) - cos(d,a) + cos(d,b)`.
pub fn score_cosadd<T: Component>(a: &[T], b: &[T], c: &[T], d: &[T]) -> Result<f64> {
    Ok(cosine(d, c)? - cosine(d, a)? + cosine(d, b)?)
}

/// Multiplicative analogy score on shifted cosines:
/// `s(d,c) * s(d,b) / (s(d,a) + epsilon)` with `s = (1 + cos) / 2`.
pub fn score_cosmul<T: Component>(a: &[T], b: &[T], c: &[T], d: &[T], epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let (da, db, dc) = (cosine(d, a)?, cosine(d, b)?, cosine(d, c)?);
    Ok(shifted(dc) * shifted(db) / (shifted(da) + epsilon))
}

/// Multiplicative score on raw cosines, as the formula is usually printed.
/// Can be negative or unbounded when `cos(d,a)` approaches `-epsilon`.
pub fn score_cosmul_raw<T: Component>(a: &[T], b: &[T], c: &[T], d: &[T], epsilon: f64) -> Result<f64> {
    let (da, db, dc) = (cosine(d, a)?, cosine(d, b)?, cosine(d, c)?);
    Ok(dc * db / (da + epsilon))
}

/// Direction-pair score: `cos(a - c, b - d)` when `||b - d|| <= delta`,
/// otherwise 0. A zero difference vector on either side scores 0.
pub fn score_bolukbasi<T: Component>(a: &[T], c: &[T], b: &[T], d: &[T], delta: f64) -> Result<f64> {
    if a.len() != c.len() || b.len() != d.len() || a.len() != b.len() {
        return Err(Error::DimMismatch(a.len(), b.len()));
    }
    let direction = Direction::new(a, c);
    Ok(direction.score(b, d, delta).value())
}

/// Outcome of the direction-pair kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairScore {
    /// `||b - d|| <= delta` and `b != d`.
    Within(f64),
    /// Too far apart, or an identical pair.
    Rejected,
}

impl PairScore {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            PairScore::Within(s) => s,
            PairScore::Rejected => 0.0,
        }
    }
}

/// The fixed `a - c` side of the direction-pair score, widened once.
///
/// Pair search and fixed-`b` solving both go through [`Direction::score`],
/// which makes their scores bit-identical.
#[derive(Clone, Debug)]
pub struct Direction {
    diff: Vec<f64>,
    norm: f64,
}

impl Direction {
    pub fn new<T: Component>(a: &[T], c: &[T]) -> Self {
        let diff: Vec<f64> = a.iter().zip(c).map(|(&x, &y)| x.widen() - y.widen()).collect();
        let norm = norm(&diff);
        Direction { diff, norm }
    }

    #[inline]
    pub fn score<T: Component>(&self, b: &[T], d: &[T], delta: f64) -> PairScore {
        let mut dist2 = 0.0;
        for (&x, &y) in b.iter().zip(d) {
            let e = x.widen() - y.widen();
            dist2 += e * e;
        }
        if dist2 == 0.0 {
            return PairScore::Rejected;
        }
        let dist = dist2.sqrt();
        if dist > delta {
            return PairScore::Rejected;
        }
        if self.norm == 0.0 {
            return PairScore::Within(0.0);
        }
        let mut dot = 0.0;
        for ((&x, &y), &w) in b.iter().zip(d).zip(&self.diff) {
            dot += w * (x.widen() - y.widen());
        }
        PairScore::Within((dot / (self.norm * dist)).clamp(-1.0, 1.0))
    }
}
