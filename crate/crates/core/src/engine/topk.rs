use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Candidate ordering key: higher score first, then lower vocabulary index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankKey {
    pub score: f64,
    pub index: usize,
}

impl Eq for RankKey {}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Maps NaN to the bottom of the ranking and folds `-0.0` into `0.0` so
/// that `total_cmp` ties match numeric ties.
#[inline]
pub fn sanitize(score: f64) -> f64 {
    if score.is_nan() {
        f64::NEG_INFINITY
    } else if score == 0.0 {
        0.0
    } else {
        score
    }
}

/// Keeps the `k` smallest items under `T: Ord`.
#[derive(Clone, Debug)]
pub struct TopK<T: Ord> {
    k: usize,
    heap: BinaryHeap<T>,
}

impl<T: Ord> TopK<T> {
    pub fn new(k: usize) -> Self {
        TopK {
            k,
            heap: BinaryHeap::with_capacity(k.min(4096) + 1),
        }
    }

    #[inline]
    pub fn push(&mut self, item: T) {
        if self.k == 0 {
            return;
        }
        if self.heap.len() < self.k {
            self.heap.push(item);
        } else if let Some(mut worst) = self.heap.peek_mut() {
            if item < *worst {
                *worst = item;
            }
        }
    }

    pub fn merge(mut self, mut other: TopK<T>) -> Self {
        if self.heap.len() < other.heap.len() {
            std::mem::swap(&mut self.heap, &mut other.heap);
        }
        for item in other.heap {
            self.push(item);
        }
        self
    }

    /// Best first.
    pub fn into_sorted_vec(self) -> Vec<T> {
        self.heap.into_sorted_vec()
    }
}
