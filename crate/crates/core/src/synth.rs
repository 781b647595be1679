//! Seeded synthetic embedding sets for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::eval::{AnalogyDataset, Category, Quadruple};
use crate::store::EmbeddingSet;

/// `vocab` unit vectors drawn uniformly from the sphere, tokens `w0`, `w1`, ...
pub fn random_set(vocab: usize, dim: usize, seed: u64) -> EmbeddingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tokens = (0..vocab).map(|i| format!("w{i}")).collect();
    let vectors = (0..vocab * dim)
        .map(|_| rng.sample::<f32, _>(StandardNormal))
        .collect();
    EmbeddingSet::new(tokens, vectors, dim)
        .and_then(EmbeddingSet::into_normalized)
        .expect("gaussian rows are non-zero")
}

/// Random orthogonal `n x n` matrix (row-major) via Gram-Schmidt.
fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for r in &rows {
            let p: f64 = v.iter().zip(r).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(r).for_each(|(x, y)| *x -= p * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            rows.push(v);
        }
    }
    rows.concat()
}

/// Word order inside generated quadruples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairLayout {
    /// `x_i y_i x_j y_j`, as in capital-country lists.
    Relation,
    /// `x_i x_j y_i y_j`: the shared offset lies between `a` and `c`.
    Crossed,
}

/// Analogy fixture whose relations are shared vector offsets.
///
/// Every base word `x` is an orthonormal direction; its partner is
/// `y = normalize(x + offset * r_k + noise * n_y)` where `r_k` is the
/// category's unit offset and `n_y` a private unit direction, all mutually
/// orthogonal, then rotated by a seeded random orthogonal matrix. With
/// `noise = 0` the intended answer is the unique argmax for all three
/// scores; an `offset` above 1 keeps partner pairs inside `delta = 1`.
#[derive(Clone, Debug)]
pub struct OffsetFixture {
    pub categories: usize,
    pub pairs: usize,
    pub offset: f64,
    pub noise: f64,
    pub layout: PairLayout,
    pub seed: u64,
}

impl Default for OffsetFixture {
    fn default() -> Self {
        OffsetFixture {
            categories: 3,
            pairs: 5,
            offset: 1.2,
            noise: 0.0,
            layout: PairLayout::Relation,
            seed: 7,
        }
    }
}

impl OffsetFixture {
    pub fn base_token(category: usize, i: usize) -> String {
        format!("x{category}_{i}")
    }

    pub fn partner_token(category: usize, i: usize) -> String {
        format!("y{category}_{i}")
    }

    pub fn dim(&self) -> usize {
        let words = self.categories * self.pairs;
        let noise_dims = if self.noise > 0.0 { words } else { 0 };
        words + self.categories + noise_dims
    }

    pub fn build(&self) -> Result<(EmbeddingSet, AnalogyDataset)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dim = self.dim();
        let rotation = random_rotation(dim, &mut rng);
        let words = self.categories * self.pairs;

        let mut tokens = Vec::with_capacity(2 * words);
        let mut raw: Vec<Vec<f64>> = Vec::with_capacity(2 * words);
        for k in 0..self.categories {
            for i in 0..self.pairs {
                let slot = k * self.pairs + i;
                let mut x = vec![0.0; dim];
                x[slot] = 1.0;
                let mut y = x.clone();
                y[words + k] = self.offset;
                if self.noise > 0.0 {
                    y[words + self.categories + slot] = self.noise;
                }
                tokens.push(Self::base_token(k, i));
                raw.push(x);
                tokens.push(Self::partner_token(k, i));
                raw.push(y);
            }
        }

        let rotation = &rotation;
        let vectors = raw
            .iter()
            .flat_map(|v| {
                (0..dim).map(move |r| {
                    rotation[r * dim..(r + 1) * dim]
                        .iter()
                        .zip(v)
                        .map(|(q, x)| q * x)
                        .sum::<f64>() as f32
                })
            })
            .collect();
        let set = EmbeddingSet::new(tokens, vectors, dim)?.into_normalized()?;

        let categories = (0..self.categories)
            .map(|k| {
                let mut quadruples = Vec::new();
                for i in 0..self.pairs {
                    for j in 0..self.pairs {
                        if i == j {
                            continue;
                        }
                        let (xi, yi) = (Self::base_token(k, i), Self::partner_token(k, i));
                        let (xj, yj) = (Self::base_token(k, j), Self::partner_token(k, j));
                        quadruples.push(match self.layout {
                            PairLayout::Relation => Quadruple::new(&xi, &yi, &xj, &yj),
                            PairLayout::Crossed => Quadruple::new(&xi, &xj, &yi, &yj),
                        });
                    }
                }
                Category {
                    name: format!("relation-{k}"),
                    quadruples,
                }
            })
            .collect();
        Ok((set, AnalogyDataset::new(categories)?))
    }
}
