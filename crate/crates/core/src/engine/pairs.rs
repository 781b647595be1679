use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::VocabView;

use super::score::{Direction, PairScore};
use super::topk::{sanitize, TopK};

/// A `b : d` pair whose offset runs parallel to `a - c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub b: String,
    pub d: String,
    pub b_index: usize,
    pub d_index: usize,
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct PairKey {
    score: f64,
    b: usize,
    d: usize,
}

impl Eq for PairKey {}

impl Ord for PairKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.b.cmp(&other.b))
            .then(self.d.cmp(&other.d))
    }
}

impl PartialOrd for PairKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ranks ordered pairs `(b, d)` of admitted tokens, `b != d`, by
/// `cos(a - c, b - d)`. Pairs further apart than `delta` never appear.
///
/// Exhaustive over `admitted x admitted`; keep the view at sweep scale.
pub fn pair_search(
    view: &VocabView<'_>,
    a: &str,
    c: &str,
    delta: f64,
    limit: usize,
) -> Result<Vec<PairResult>> {
    if limit == 0 {
        return Err(Error::InvalidParameter("limit must be at least 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let set = view.base();
    let resolve = |t: &str| set.index_of(t).ok_or_else(|| Error::UnknownToken(t.to_owned()));
    let (ia, ic) = (resolve(a)?, resolve(c)?);
    let direction = Direction::new(set.vector(ia), set.vector(ic));
    let admitted: Vec<usize> = view.indices().collect();

    let top = admitted
        .par_iter()
        .fold(
            || TopK::new(limit),
            |mut top, &b| {
                let vb = set.vector(b);
                for &d in &admitted {
                    if d == b {
                        continue;
                    }
                    if let PairScore::Within(score) = direction.score(vb, set.vector(d), delta) {
                        top.push(PairKey {
                            score: sanitize(score),
                            b,
                            d,
                        });
                    }
                }
                top
            },
        )
        .reduce(|| TopK::new(limit), TopK::merge);

    Ok(top
        .into_sorted_vec()
        .into_iter()
        .map(|key| PairResult {
            b: set.token(key.b).to_owned(),
            d: set.token(key.d).to_owned(),
            b_index: key.b,
            d_index: key.d,
            score: key.score,
        })
        .collect())
}
