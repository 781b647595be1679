//! String parameters to engine settings, shared by CLI flags and HTTP query
//! strings so both front ends resolve defaults and errors identically.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use analogy_core::{Algorithm, ConstraintMode, Cutoff, ShapeRules, DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_TOP_N};

use crate::error::ApiError;

/// Query-string pairs with tracking of which keys were consumed, so typos
/// such as `top=5` are reported instead of silently ignored.
#[derive(Debug, Default)]
pub struct Params {
    map: HashMap<String, String>,
    used: BTreeSet<String>,
}

impl Params {
    pub fn new(map: HashMap<String, String>) -> Self {
        Params {
            map,
            used: BTreeSet::new(),
        }
    }

    /// First present value among `names` (aliases of one parameter).
    pub fn take(&mut self, names: &[&str]) -> Option<String> {
        let mut found = None;
        for name in names {
            if let Some(v) = self.map.get(*name) {
                self.used.insert((*name).to_owned());
                found.get_or_insert_with(|| v.clone());
            }
        }
        found
    }

    pub fn finish(self) -> Result<(), ApiError> {
        let mut unknown: Vec<&String> = self.map.keys().filter(|k| !self.used.contains(*k)).collect();
        if unknown.is_empty() {
            return Ok(());
        }
        unknown.sort();
        let names: Vec<&str> = unknown.iter().map(|s| s.as_str()).collect();
        Err(ApiError::invalid(format!("unknown parameter(s): {}", names.join(", "))))
    }
}

/// Unparsed query settings; `None` means "use the default".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawQuery {
    pub a: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub algo: Option<String>,
    pub mode: Option<String>,
    pub top_n: Option<String>,
    pub delta: Option<String>,
    pub epsilon: Option<String>,
    pub cutoff: Option<String>,
    pub rules: Option<String>,
}

impl RawQuery {
    pub fn from_params(p: &mut Params) -> Self {
        RawQuery {
            a: p.take(&["a"]),
            b: p.take(&["b"]),
            c: p.take(&["c"]),
            algo: p.take(&["algo", "algorithm"]),
            mode: p.take(&["mode"]),
            top_n: p.take(&["topn", "top_n"]),
            delta: p.take(&["delta"]),
            epsilon: p.take(&["epsilon", "eps"]),
            cutoff: p.take(&["cutoff"]),
            rules: p.take(&["rules"]),
        }
    }
}

/// Fully resolved settings for one query.
#[derive(Clone, Debug, PartialEq)]
pub struct QuerySpec {
    pub a: String,
    pub b: String,
    pub c: String,
    pub algorithm: Algorithm,
    pub mode: ConstraintMode,
    pub top_n: usize,
    pub cutoff: Cutoff,
    pub rules: ShapeRules,
    /// Parameters that were supplied but have no effect.
    pub warnings: Vec<String>,
}

pub fn required(value: &Option<String>, name: &str) -> Result<String, ApiError> {
    match value.as_deref().map(str::trim) {
        Some(v) if !v.is_empty() => Ok(v.to_owned()),
        _ => Err(ApiError::invalid(format!("missing parameter {name}"))),
    }
}

pub fn parse_or<T>(value: &Option<String>, name: &str, default: T) -> Result<T, ApiError>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    match value.as_deref().map(str::trim) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|e| ApiError::invalid(format!("bad value {v:?} for {name}: {e}"))),
    }
}

/// Resolves the algorithm and its parameters; a `delta` or `epsilon` that
/// does not apply to the chosen algorithm produces a warning.
pub fn resolve_algorithm(
    algo: &Option<String>,
    delta: &Option<String>,
    epsilon: &Option<String>,
    warnings: &mut Vec<String>,
) -> Result<Algorithm, ApiError> {
    let mut algorithm: Algorithm = parse_or(algo, "algo", Algorithm::CosAdd)?;
    match &mut algorithm {
        Algorithm::BolukbasiDir { delta: d } => *d = parse_or(delta, "delta", DEFAULT_DELTA)?,
        _ if delta.is_some() => warnings.push(format!("delta applies only to bolukbasi; ignored for {}", algorithm.name())),
        _ => {}
    }
    match &mut algorithm {
        Algorithm::CosMul { epsilon: e, .. } => *e = parse_or(epsilon, "epsilon", DEFAULT_EPSILON)?,
        _ if epsilon.is_some() => warnings.push(format!("epsilon applies only to cosmul; ignored for {}", algorithm.name())),
        _ => {}
    }
    algorithm.validate()?;
    Ok(algorithm)
}

pub fn resolve_query(raw: &RawQuery, default_cutoff: Cutoff) -> Result<QuerySpec, ApiError> {
    let mut warnings = Vec::new();
    let algorithm = resolve_algorithm(&raw.algo, &raw.delta, &raw.epsilon, &mut warnings)?;
    let top_n = parse_or(&raw.top_n, "topn", DEFAULT_TOP_N)?;
    if top_n == 0 {
        return Err(ApiError::invalid("topn must be at least 1"));
    }
    Ok(QuerySpec {
        a: required(&raw.a, "a")?,
        b: required(&raw.b, "b")?,
        c: required(&raw.c, "c")?,
        algorithm,
        mode: parse_or(&raw.mode, "mode", ConstraintMode::ExcludeInputs)?,
        top_n,
        cutoff: parse_or(&raw.cutoff, "cutoff", default_cutoff)?,
        rules: parse_or(&raw.rules, "rules", ShapeRules::NONE)?,
        warnings,
    })
}

/// Parses a comma-separated list such as `0.8,1.0,1.2`.
pub fn parse_list<T>(value: &str, name: &str) -> Result<Vec<T>, ApiError>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|e| ApiError::invalid(format!("bad value {s:?} in {name}: {e}")))
        })
        .collect()
}
