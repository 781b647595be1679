//! Read-only word-embedding sets.
//!
//! Tokens are kept in file order, which doubles as frequency rank: word2vec
//! writes its vocabulary in descending count order, so index 0 is the most
//! frequent word.

mod format;
mod view;

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use view::{Cutoff, Lookup, ShapeRules, VocabView};

/// On-disk embedding layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// `"<V> <dim>\n"` followed by `token 0x20 <dim x f32 LE>` records.
    Word2VecBinary,
    /// `"<V> <dim>\n"` followed by one `token v1 .. vdim` line per word.
    Word2VecText,
    /// GloVe-style text without a header line.
    HeaderlessText,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bin" | "binary" | "word2vec-binary" => Ok(Format::Word2VecBinary),
            "txt" | "text" | "word2vec-text" => Ok(Format::Word2VecText),
            "glove" | "headerless-text" => Ok(Format::HeaderlessText),
            other => Err(Error::InvalidParameter(format!(
                "unknown embedding format {other:?} (expected bin, txt or glove)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Word2VecBinary => "bin",
            Format::Word2VecText => "txt",
            Format::HeaderlessText => "glove",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    pub format: Format,
    /// L2-normalize every row after loading.
    pub normalize: bool,
    /// Lowercase tokens; on collision the more frequent token is kept.
    pub lowercase: bool,
}

impl LoadOptions {
    pub fn new(format: Format) -> Self {
        LoadOptions {
            format,
            normalize: true,
            lowercase: false,
        }
    }

    pub fn normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions::new(Format::Word2VecBinary)
    }
}

/// A rank-ordered vocabulary with one dense row per token.
///
/// Immutable once built; share it behind an `Arc` for concurrent readers.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSet {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f32>,
    dim: usize,
    normalized: bool,
}

pub(crate) fn validate_token(token: &str) -> Result<()> {
    if token.is_empty() || token.bytes().any(|b| b == b' ' || b == b'\n' || b == 0) {
        return Err(Error::InvalidToken(token.to_owned()));
    }
    Ok(())
}

impl EmbeddingSet {
    /// Builds an unnormalized set from a token list and a row-major matrix.
    pub fn new(tokens: Vec<String>, vectors: Vec<f32>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if tokens.is_empty() {
            return Err(Error::EmptySet);
        }
        if vectors.len() != tokens.len() * dim {
            return Err(Error::CountMismatch {
                expected: tokens.len(),
                found: vectors.len() / dim,
            });
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            validate_token(token)?;
            if index.insert(token.clone(), i).is_some() {
                return Err(Error::DuplicateToken(token.clone()));
            }
        }
        Ok(EmbeddingSet {
            tokens,
            index,
            vectors,
            dim,
            normalized: false,
        })
    }

    /// Builds a set from raw records, applying the lowercase merge and
    /// normalization requested in `opts`.
    pub(crate) fn from_records(
        tokens: Vec<String>,
        vectors: Vec<f32>,
        dim: usize,
        opts: &LoadOptions,
    ) -> Result<Self> {
        let set = if opts.lowercase {
            let mut kept_tokens = Vec::with_capacity(tokens.len());
            let mut kept_vectors = Vec::with_capacity(vectors.len());
            let mut seen = HashMap::with_capacity(tokens.len());
            for (i, token) in tokens.into_iter().enumerate() {
                let lower = token.to_lowercase();
                if seen.insert(lower.clone(), ()).is_none() {
                    kept_tokens.push(lower);
                    kept_vectors.extend_from_slice(&vectors[i * dim..(i + 1) * dim]);
                }
            }
            EmbeddingSet::new(kept_tokens, kept_vectors, dim)?
        } else {
            EmbeddingSet::new(tokens, vectors, dim)?
        };
        if opts.normalize {
            set.into_normalized()
        } else {
            Ok(set)
        }
    }

    /// Scales every row to unit L2 norm. Fails on an all-zero row.
    pub fn into_normalized(mut self) -> Result<Self> {
        let dim = self.dim;
        for (row, token) in self.vectors.chunks_exact_mut(dim).zip(&self.tokens) {
            let norm = row
                .iter()
                .map(|&x| f64::from(x) * f64::from(x))
                .sum::<f64>()
                .sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroVector(token.clone()));
            }
            for x in row.iter_mut() {
                *x = (f64::from(*x) / norm) as f32;
            }
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn load(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Self> {
        let file = File::open(path)?;
        Self::read(&mut BufReader::with_capacity(1 << 20, file), opts)
    }

    pub fn read<R: BufRead>(reader: &mut R, opts: &LoadOptions) -> Result<Self> {
        let (tokens, vectors, dim) = match opts.format {
            Format::Word2VecBinary => format::read_binary(reader)?,
            Format::Word2VecText => format::read_text(reader, true)?,
            Format::HeaderlessText => format::read_text(reader, false)?,
        };
        Self::from_records(tokens, vectors, dim, opts)
    }

    pub fn save(&self, path: impl AsRef<Path>, format: Format) -> Result<()> {
        let mut writer = BufWriter::new(File::create(path)?);
        self.write(&mut writer, format)?;
        writer.flush()?;
        Ok(())
    }

    pub fn write<W: Write>(&self, writer: &mut W, format: Format) -> Result<()> {
        match format {
            Format::Word2VecBinary => format::write_binary(self, writer),
            Format::Word2VecText => format::write_text(self, writer, true),
            Format::HeaderlessText => format::write_text(self, writer, false),
        }
    }

    /// Number of tokens (V).
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false; a set holds at least one token.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn vector(&self, index: usize) -> &[f32] {
        &self.vectors[index * self.dim..(index + 1) * self.dim]
    }

    /// The row-major `V x dim` matrix.
    pub fn vectors(&self) -> &[f32] {
        &self.vectors
    }

    /// Restricts the set to its `cutoff` most frequent tokens that pass `rules`.
    pub fn view(&self, cutoff: Cutoff, rules: ShapeRules) -> Result<VocabView<'_>> {
        VocabView::new(self, cutoff, rules)
    }

    /// A view admitting every token.
    pub fn full_view(&self) -> VocabView<'_> {
        VocabView::new(self, Cutoff::All, ShapeRules::NONE).expect("a set is never empty")
    }
}
