use std::fmt;
use std::str::FromStr;

use rayon::iter::{Either, IntoParallelIterator, IntoParallelRefIterator, ParallelIterator};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

use super::EmbeddingSet;

/// How many of the most frequent tokens a view admits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Cutoff {
    #[default]
    All,
    Top(usize),
}

impl Cutoff {
    /// Number of leading indices admitted out of `vocab`.
    pub fn limit(self, vocab: usize) -> usize {
        match self {
            Cutoff::All => vocab,
            Cutoff::Top(k) => k.min(vocab),
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::All => f.write_str("all"),
            Cutoff::Top(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Cutoff::All);
        }
        let digits: String = s.chars().filter(|c| *c != '_' && *c != ',').collect();
        match digits.parse::<usize>() {
            Ok(0) => Err(Error::InvalidCutoff),
            Ok(k) => Ok(Cutoff::Top(k)),
            Err(_) => Err(Error::InvalidParameter(format!(
                "cutoff must be a positive integer or \"all\", got {s:?}"
            ))),
        }
    }
}

impl Serialize for Cutoff {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cutoff::All => serializer.serialize_str("all"),
            Cutoff::Top(k) => serializer.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Cutoff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CutoffVisitor;

        impl de::Visitor<'_> for CutoffVisitor {
            type Value = Cutoff;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive integer or \"all\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Cutoff, E> {
                match v {
                    0 => Err(E::custom("cutoff must be at least 1")),
                    k => Ok(Cutoff::Top(k as usize)),
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Cutoff, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom("cutoff must be at least 1"))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Cutoff, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(CutoffVisitor)
    }
}

/// Word-shape filters applied on top of the frequency cutoff.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeRules {
    /// Admit only tokens shorter than 20 characters.
    pub max_len_20: bool,
    /// Reject tokens with any character outside `[A-Za-z0-9_]`.
    pub no_punctuation: bool,
    /// Reject tokens containing an uppercase letter.
    pub no_uppercase: bool,
}

impl ShapeRules {
    pub const NONE: ShapeRules = ShapeRules {
        max_len_20: false,
        no_punctuation: false,
        no_uppercase: false,
    };

    pub const ALL: ShapeRules = ShapeRules {
        max_len_20: true,
        no_punctuation: true,
        no_uppercase: true,
    };

    pub fn is_empty(&self) -> bool {
        *self == ShapeRules::NONE
    }

    pub fn admits(&self, token: &str) -> bool {
        if self.max_len_20 && token.chars().count() >= 20 {
            return false;
        }
        if self.no_punctuation && !token.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return false;
        }
        if self.no_uppercase && token.chars().any(char::is_uppercase) {
            return false;
        }
        true
    }
}

impl fmt::Display for ShapeRules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.max_len_20, "max-len-20"),
            (self.no_punctuation, "no-punctuation"),
            (self.no_uppercase, "no-uppercase"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

/// Parses a comma-separated rule list, e.g. `no-punctuation,no-uppercase`.
/// `none` and the empty string enable nothing, `all` enables every rule.
impl FromStr for ShapeRules {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rules = ShapeRules::NONE;
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name.replace('_', "-").as_str() {
                "none" => {}
                "all" => rules = ShapeRules::ALL,
                "max-len-20" | "max-len" => rules.max_len_20 = true,
                "no-punctuation" | "no-punct" => rules.no_punctuation = true,
                "no-uppercase" | "no-upper" => rules.no_uppercase = true,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown shape rule {other:?}")))
                }
            }
        }
        Ok(rules)
    }
}

/// Result of resolving a token against a view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    /// Admitted; carries the base-set index.
    Found(usize),
    /// Present in the base set but excluded by the cutoff or shape rules.
    Filtered(usize),
    Unknown,
}

impl Lookup {
    pub fn found(self) -> Option<usize> {
        match self {
            Lookup::Found(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Admitted {
    Prefix(usize),
    Listed(Vec<usize>),
}

/// A restriction of an [`EmbeddingSet`] to its most frequent tokens.
///
/// Views borrow the base matrix and never copy vector data; with shape rules
/// enabled they hold the list of admitted indices.
#[derive(Clone, Debug)]
pub struct VocabView<'a> {
    base: &'a EmbeddingSet,
    cutoff: Cutoff,
    rules: ShapeRules,
    admitted: Admitted,
}

impl<'a> VocabView<'a> {
    pub fn new(base: &'a EmbeddingSet, cutoff: Cutoff, rules: ShapeRules) -> Result<Self> {
        if cutoff == Cutoff::Top(0) {
            return Err(Error::InvalidCutoff);
        }
        let limit = cutoff.limit(base.len());
        let admitted = if rules.is_empty() {
            Admitted::Prefix(limit)
        } else {
            Admitted::Listed(
                (0..limit)
                    .filter(|&i| rules.admits(base.token(i)))
                    .collect(),
            )
        };
        let view = VocabView {
            base,
            cutoff,
            rules,
            admitted,
        };
        if view.is_empty() {
            return Err(Error::EmptyView);
        }
        Ok(view)
    }

    pub fn base(&self) -> &'a EmbeddingSet {
        self.base
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn rules(&self) -> ShapeRules {
        self.rules
    }

    /// Number of admitted tokens.
    pub fn len(&self) -> usize {
        match &self.admitted {
            Admitted::Prefix(n) => *n,
            Admitted::Listed(list) => list.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn admits(&self, index: usize) -> bool {
        index < self.cutoff.limit(self.base.len()) && self.rules.admits(self.base.token(index))
    }

    pub fn lookup(&self, token: &str) -> Lookup {
        match self.base.index_of(token) {
            None => Lookup::Unknown,
            Some(i) if self.admits(i) => Lookup::Found(i),
            Some(i) => Lookup::Filtered(i),
        }
    }

    /// Admitted base indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        match &self.admitted {
            Admitted::Prefix(n) => Either::Left(0..*n),
            Admitted::Listed(list) => Either::Right(list.iter().copied()),
        }
    }

    pub fn par_indices(&self) -> impl ParallelIterator<Item = usize> + '_ {
        match &self.admitted {
            Admitted::Prefix(n) => Either::Left((0..*n).into_par_iter()),
            Admitted::Listed(list) => Either::Right(list.par_iter().copied()),
        }
    }
}
