//! Analogy scoring and ranking.
//!
//! A query `a : b :: c : ?` is answered by scoring every candidate `d`
//! admitted by a [`VocabView`] and ranking by score, ties going to the more
//! frequent word. Query words only need to exist in the view's base set; the
//! view restricts answers, not inputs.

mod pairs;
pub mod score;
mod topk;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::{Cutoff, EmbeddingSet, ShapeRules, VocabView};

pub use pairs::{pair_search, PairResult};
pub use score::{cosine, score_bolukbasi, score_cosadd, score_cosmul, score_cosmul_raw};
pub use topk::{RankKey, TopK};

use score::Direction;
use topk::sanitize;

pub const DEFAULT_EPSILON: f64 = 0.001;
pub const DEFAULT_DELTA: f64 = 1.0;
pub const DEFAULT_TOP_N: usize = 10;

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    /// `cos(d,c) - cos(d,a) + cos(d,b)`
    CosAdd,
    /// `cos(d,c) cos(d,b) / (cos(d,a) + epsilon)`, on cosines shifted into
    /// `[0, 1]` unless `shifted` is off.
    CosMul {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_true")]
        shifted: bool,
    },
    /// `cos(a - c, b - d)`, zeroed when `||b - d|| > delta`.
    #[serde(rename = "bolukbasi")]
    BolukbasiDir {
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

impl Algorithm {
    pub fn cosmul() -> Self {
        Algorithm::CosMul {
            epsilon: DEFAULT_EPSILON,
            shifted: true,
        }
    }

    pub fn bolukbasi(delta: f64) -> Self {
        Algorithm::BolukbasiDir { delta }
    }

    /// The three algorithms with default parameters.
    pub fn all() -> [Algorithm; 3] {
        [Algorithm::CosAdd, Algorithm::cosmul(), Algorithm::bolukbasi(DEFAULT_DELTA)]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::CosAdd => "cosadd",
            Algorithm::CosMul { .. } => "cosmul",
            Algorithm::BolukbasiDir { .. } => "bolukbasi",
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            Algorithm::BolukbasiDir { delta } => Some(*delta),
            _ => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            Algorithm::CosMul { epsilon, .. } => Some(*epsilon),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Algorithm::CosMul { epsilon, .. } if !(epsilon > 0.0 && epsilon.is_finite()) => Err(
                Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")),
            ),
            Algorithm::BolukbasiDir { delta } if !(delta > 0.0) || delta.is_nan() => Err(
                Error::InvalidParameter(format!("delta must be positive, got {delta}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::CosAdd => f.write_str("cosadd"),
            Algorithm::CosMul { epsilon, shifted: true } => write!(f, "cosmul(eps={epsilon})"),
            Algorithm::CosMul { epsilon, shifted: false } => write!(f, "cosmul-raw(eps={epsilon})"),
            Algorithm::BolukbasiDir { delta } => write!(f, "bolukbasi(delta={delta})"),
        }
    }
}

/// Parses an algorithm name with default parameters.
impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cosadd" | "3cosadd" => Ok(Algorithm::CosAdd),
            "cosmul" | "3cosmul" => Ok(Algorithm::cosmul()),
            "cosmul-raw" => Ok(Algorithm::CosMul {
                epsilon: DEFAULT_EPSILON,
                shifted: false,
            }),
            "bolukbasi" => Ok(Algorithm::bolukbasi(DEFAULT_DELTA)),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?} (expected cosadd, cosmul or bolukbasi)"
            ))),
        }
    }
}

/// Whether the query words themselves may be returned.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintMode {
    /// Never return `a`, `b` or `c`, as word2vec and gensim do.
    #[default]
    #[serde(rename = "constrained", alias = "exclude-inputs")]
    ExcludeInputs,
    #[serde(rename = "unconstrained")]
    Unconstrained,
}

impl ConstraintMode {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintMode::ExcludeInputs => "constrained",
            ConstraintMode::Unconstrained => "unconstrained",
        }
    }
}

impl fmt::Display for ConstraintMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constrained" | "exclude-inputs" => Ok(ConstraintMode::ExcludeInputs),
            "unconstrained" => Ok(ConstraintMode::Unconstrained),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode {other:?} (expected constrained or unconstrained)"
            ))),
        }
    }
}

/// `a : b :: c : ?` plus everything needed to answer it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyQuery {
    pub a: String,
    pub b: String,
    pub c: String,
    pub algorithm: Algorithm,
    pub mode: ConstraintMode,
    pub top_n: usize,
}

impl AnalogyQuery {
    pub fn new(a: impl Into<String>, b: impl Into<String>, c: impl Into<String>) -> Self {
        AnalogyQuery {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            algorithm: Algorithm::CosAdd,
            mode: ConstraintMode::ExcludeInputs,
            top_n: DEFAULT_TOP_N,
        }
    }

    pub fn algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn mode(mut self, mode: ConstraintMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn top_n(mut self, top_n: usize) -> Self {
        self.top_n = top_n;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub token: String,
    /// Base-vocabulary index, i.e. 0-based frequency rank.
    pub index: usize,
    pub score: f64,
    /// 1-based position in the ranking.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query: AnalogyQuery,
    pub cutoff: Cutoff,
    pub rules: ShapeRules,
    pub candidates: Vec<ScoredCandidate>,
    /// Size of the candidate set that was scored.
    pub evaluated_count: usize,
}

impl RankedList {
    pub fn top(&self) -> Option<&ScoredCandidate> {
        self.candidates.first()
    }

    /// 1-based rank of `token` within this list.
    pub fn position(&self, token: &str) -> Option<usize> {
        self.candidates.iter().find(|c| c.token == token).map(|c| c.rank)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.token.as_str())
    }
}

#[derive(Clone, Copy, Debug)]
enum CosKind {
    Add,
    Mul { epsilon: f64, shifted: bool },
}

enum Scorer<'a> {
    Cos {
        kind: CosKind,
        a: &'a [f32],
        b: &'a [f32],
        c: &'a [f32],
        norms: [f64; 3],
    },
    Dir {
        direction: Direction,
        b: &'a [f32],
        delta: f64,
    },
}

impl Scorer<'_> {
    #[inline]
    fn score(&self, d: &[f32]) -> f64 {
        match self {
            Scorer::Cos { kind, a, b, c, norms } => {
                let (mut da, mut db, mut dc, mut dd) = (0.0, 0.0, 0.0, 0.0);
                for (((&x, &ya), &yb), &yc) in d.iter().zip(*a).zip(*b).zip(*c) {
                    let x = f64::from(x);
                    da += x * f64::from(ya);
                    db += x * f64::from(yb);
                    dc += x * f64::from(yc);
                    dd += x * x;
                }
                let nd = dd.sqrt();
                let cos_a = (da / (nd * norms[0])).clamp(-1.0, 1.0);
                let cos_b = (db / (nd * norms[1])).clamp(-1.0, 1.0);
                let cos_c = (dc / (nd * norms[2])).clamp(-1.0, 1.0);
                match *kind {
                    CosKind::Add => cos_c - cos_a + cos_b,
                    CosKind::Mul { epsilon, shifted: true } => {
                        score::shifted(cos_c) * score::shifted(cos_b)
                            / (score::shifted(cos_a) + epsilon)
                    }
                    CosKind::Mul { epsilon, shifted: false } => cos_c * cos_b / (cos_a + epsilon),
                }
            }
            Scorer::Dir { direction, b, delta } => direction.score(b, d, *delta).value(),
        }
    }
}

/// A query resolved against a set and ready to score candidates.
struct Prepared<'a> {
    set: &'a EmbeddingSet,
    inputs: [usize; 3],
    exclude_inputs: bool,
    scorer: Scorer<'a>,
}

impl<'a> Prepared<'a> {
    fn new(set: &'a EmbeddingSet, query: &AnalogyQuery) -> Result<Self> {
        query.algorithm.validate()?;
        let resolve = |t: &str| set.index_of(t).ok_or_else(|| Error::UnknownToken(t.to_owned()));
        let inputs = [resolve(&query.a)?, resolve(&query.b)?, resolve(&query.c)?];
        let [a, b, c] = inputs.map(|i| set.vector(i));
        let scorer = match query.algorithm {
            Algorithm::CosAdd | Algorithm::CosMul { .. } => {
                let norms = [score::norm(a), score::norm(b), score::norm(c)];
                if norms.contains(&0.0) {
                    return Err(Error::ZeroNorm);
                }
                let kind = match query.algorithm {
                    Algorithm::CosMul { epsilon, shifted } => CosKind::Mul { epsilon, shifted },
                    _ => CosKind::Add,
                };
                Scorer::Cos { kind, a, b, c, norms }
            }
            Algorithm::BolukbasiDir { delta } => Scorer::Dir {
                direction: Direction::new(a, c),
                b,
                delta,
            },
        };
        Ok(Prepared {
            set,
            inputs,
            exclude_inputs: query.mode == ConstraintMode::ExcludeInputs,
            scorer,
        })
    }

    #[inline]
    fn is_candidate(&self, index: usize) -> bool {
        !(self.exclude_inputs && self.inputs.contains(&index))
    }

    #[inline]
    fn key(&self, index: usize) -> RankKey {
        RankKey {
            score: sanitize(self.scorer.score(self.set.vector(index))),
            index,
        }
    }

    fn list(&self, view: &VocabView<'_>, query: AnalogyQuery, keys: Vec<RankKey>, evaluated_count: usize) -> RankedList {
        let candidates = keys
            .into_iter()
            .enumerate()
            .map(|(pos, key)| ScoredCandidate {
                token: self.set.token(key.index).to_owned(),
                index: key.index,
                score: key.score,
                rank: pos + 1,
            })
            .collect();
        RankedList {
            query,
            cutoff: view.cutoff(),
            rules: view.rules(),
            candidates,
            evaluated_count,
        }
    }
}

/// Ranks the view's candidates and returns the best `query.top_n`.
pub fn solve(view: &VocabView<'_>, query: &AnalogyQuery) -> Result<RankedList> {
    if query.top_n == 0 {
        return Err(Error::InvalidParameter("top_n must be at least 1".into()));
    }
    let prepared = Prepared::new(view.base(), query)?;
    let k = query.top_n;
    let (top, count) = view
        .par_indices()
        .filter(|&i| prepared.is_candidate(i))
        .fold(
            || (TopK::new(k), 0usize),
            |(mut top, n), i| {
                top.push(prepared.key(i));
                (top, n + 1)
            },
        )
        .reduce(|| (TopK::new(k), 0), |(a, n), (b, m)| (a.merge(b), n + m));
    if count == 0 {
        return Err(Error::EmptyCandidates);
    }
    Ok(prepared.list(view, query.clone(), top.into_sorted_vec(), count))
}

/// Scores and sorts every candidate, best first.
pub fn ranking_keys(view: &VocabView<'_>, query: &AnalogyQuery) -> Result<Vec<RankKey>> {
    let prepared = Prepared::new(view.base(), query)?;
    let mut keys: Vec<RankKey> = view
        .par_indices()
        .filter(|&i| prepared.is_candidate(i))
        .map(|i| prepared.key(i))
        .collect();
    if keys.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    keys.par_sort_unstable();
    Ok(keys)
}

/// The complete ranking; the echoed `top_n` equals the candidate count.
pub fn full_ranking(view: &VocabView<'_>, query: &AnalogyQuery) -> Result<RankedList> {
    let keys = ranking_keys(view, query)?;
    let prepared = Prepared::new(view.base(), query)?;
    let count = keys.len();
    Ok(prepared.list(view, query.clone().top_n(count), keys, count))
}

/// 1-based position of `token` in the full ranking, or `None` when it is
/// not a candidate (unknown, outside the view, or an excluded input).
pub fn rank_of(view: &VocabView<'_>, query: &AnalogyQuery, token: &str) -> Result<Option<usize>> {
    let prepared = Prepared::new(view.base(), query)?;
    let Some(target) = view.lookup(token).found() else {
        return Ok(None);
    };
    if !prepared.is_candidate(target) {
        return Ok(None);
    }
    let target = prepared.key(target);
    let better = view
        .par_indices()
        .filter(|&i| prepared.is_candidate(i))
        .filter(|&i| prepared.key(i) < target)
        .count();
    Ok(Some(better + 1))
}
