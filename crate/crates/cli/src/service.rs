//! Request handling against one loaded model. The CLI and the HTTP server
//! both call into [`Service`], so the same parameters give the same bytes.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use analogy_core::{
    pair_search, rank_of, solve, sweep, Algorithm, AnalogyQuery, ConstraintMode, Cutoff, EmbeddingSet, Format,
    LoadOptions, Lookup, PairResult, ScoredCandidate, ShapeRules, SweepGrid, SweepSpec, VocabView, DEFAULT_DELTA,
    DEFAULT_EPSILON, DEFAULT_TOP_N,
};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::params::{parse_or, required, resolve_query, Params, QuerySpec, RawQuery};

pub const DEFAULT_PAIR_LIMIT: usize = 100;

/// Settings every query response repeats back, whether or not the caller
/// supplied them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Echo {
    pub model: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub algorithm: String,
    pub mode: ConstraintMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifted: Option<bool>,
    pub cutoff: Cutoff,
    pub rules: String,
}

impl Echo {
    fn new(model: &str, spec: &QuerySpec) -> Self {
        let shifted = match spec.algorithm {
            Algorithm::CosMul { shifted, .. } => Some(shifted),
            _ => None,
        };
        Echo {
            model: model.to_owned(),
            a: spec.a.clone(),
            b: spec.b.clone(),
            c: spec.c.clone(),
            algorithm: spec.algorithm.name().to_owned(),
            mode: spec.mode,
            delta: spec.algorithm.delta(),
            epsilon: spec.algorithm.epsilon(),
            shifted,
            cutoff: spec.cutoff,
            rules: spec.rules.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    #[serde(flatten)]
    pub echo: Echo,
    pub top_n: usize,
    pub evaluated_count: usize,
    pub candidates: Vec<ScoredCandidate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankResponse {
    #[serde(flatten)]
    pub echo: Echo,
    pub term: String,
    /// `found`, `filtered`, `unknown`, or `excluded` (an input word while
    /// inputs are excluded).
    pub status: String,
    /// 1-based rank among candidates; absent unless `status` is `found`.
    pub rank: Option<usize>,
    pub evaluated_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairsResponse {
    pub model: String,
    pub a: String,
    pub c: String,
    pub delta: f64,
    pub cutoff: Cutoff,
    pub rules: String,
    pub limit: usize,
    pub pairs: Vec<PairResult>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabResponse {
    pub token: String,
    pub status: String,
    /// 0-based frequency rank in the full vocabulary; absent when unknown.
    pub rank: Option<usize>,
    pub cutoff: Cutoff,
    pub rules: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub algorithm: String,
    pub mode: ConstraintMode,
    pub top_n: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub cutoff: Cutoff,
    pub rules: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaResponse {
    pub model: String,
    pub format: Format,
    pub vocab_size: usize,
    pub dim: usize,
    pub normalized: bool,
    pub algorithms: Vec<String>,
    pub modes: Vec<String>,
    pub defaults: Defaults,
    pub cutoff_max: Option<usize>,
}

pub struct Model {
    pub id: String,
    pub format: Format,
    pub set: EmbeddingSet,
}

impl Model {
    /// Loads and normalizes a model; the id defaults to the file stem.
    pub fn load(path: &Path, format: Format, id: Option<&str>) -> Result<Self, ApiError> {
        let set = EmbeddingSet::load(path, &LoadOptions::new(format)).map_err(|e| {
            let mut err = ApiError::from(e);
            err.message = format!("{}: {}", path.display(), err.message);
            err
        })?;
        let id = id
            .map(str::to_owned)
            .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "model".to_owned());
        Ok(Model { id, format, set })
    }
}

#[derive(Clone)]
pub struct Service {
    model: Arc<Model>,
    cutoff_max: Option<usize>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

fn optional_cutoff(p: &mut Params) -> Result<Option<Cutoff>, ApiError> {
    p.take(&["cutoff"])
        .map(|v| parse_or(&Some(v), "cutoff", Cutoff::All))
        .transpose()
}

fn lookup_status(lookup: Lookup) -> &'static str {
    match lookup {
        Lookup::Found(_) => "found",
        Lookup::Filtered(_) => "filtered",
        Lookup::Unknown => "unknown",
    }
}

impl Service {
    pub fn new(model: Model) -> Self {
        Service {
            model: Arc::new(model),
            cutoff_max: None,
        }
    }

    /// Refuses views larger than `max` words; requests without a cutoff
    /// get `max` instead of the whole vocabulary.
    pub fn with_cutoff_max(mut self, max: Option<usize>) -> Result<Self, ApiError> {
        if max == Some(0) {
            return Err(ApiError::invalid("cutoff-max must be at least 1"));
        }
        self.cutoff_max = max;
        Ok(self)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn set(&self) -> &EmbeddingSet {
        &self.model.set
    }

    pub fn default_cutoff(&self) -> Cutoff {
        match self.cutoff_max {
            Some(max) if max < self.set().len() => Cutoff::Top(max),
            _ => Cutoff::All,
        }
    }

    fn check_cutoff(&self, cutoff: Cutoff) -> Result<(), ApiError> {
        let Some(max) = self.cutoff_max else {
            return Ok(());
        };
        if cutoff.limit(self.set().len()) > max {
            return Err(ApiError::invalid(format!(
                "cutoff {cutoff} exceeds this server's limit of {max} words"
            )));
        }
        Ok(())
    }

    fn view(&self, cutoff: Cutoff, rules: ShapeRules) -> Result<VocabView<'_>, ApiError> {
        self.check_cutoff(cutoff)?;
        Ok(self.set().view(cutoff, rules)?)
    }

    fn resolve(&self, raw: &RawQuery) -> Result<(QuerySpec, VocabView<'_>), ApiError> {
        let mut spec = resolve_query(raw, self.default_cutoff())?;
        let view = self.view(spec.cutoff, spec.rules)?;
        for (name, token) in [("a", &spec.a), ("b", &spec.b), ("c", &spec.c)] {
            match view.lookup(token) {
                Lookup::Unknown => return Err(analogy_core::Error::UnknownToken(token.clone()).into()),
                Lookup::Filtered(_) => spec.warnings.push(format!(
                    "{name} = {token:?} is outside the view ({} cutoff, rules {}); it is used as input but can never be returned",
                    spec.cutoff, spec.rules
                )),
                Lookup::Found(_) => {}
            }
        }
        Ok((spec, view))
    }

    fn engine_query(spec: &QuerySpec) -> AnalogyQuery {
        AnalogyQuery::new(&spec.a, &spec.b, &spec.c)
            .algorithm(spec.algorithm)
            .mode(spec.mode)
            .top_n(spec.top_n)
    }

    pub fn meta(&self) -> MetaResponse {
        let set = self.set();
        MetaResponse {
            model: self.model.id.clone(),
            format: self.model.format,
            vocab_size: set.len(),
            dim: set.dim(),
            normalized: set.is_normalized(),
            algorithms: ["cosadd", "cosmul", "cosmul-raw", "bolukbasi"].map(String::from).to_vec(),
            modes: ["constrained", "unconstrained"].map(String::from).to_vec(),
            defaults: Defaults {
                algorithm: Algorithm::CosAdd.name().into(),
                mode: ConstraintMode::ExcludeInputs,
                top_n: DEFAULT_TOP_N,
                delta: DEFAULT_DELTA,
                epsilon: DEFAULT_EPSILON,
                cutoff: self.default_cutoff(),
                rules: ShapeRules::NONE.to_string(),
            },
            cutoff_max: self.cutoff_max,
        }
    }

    pub fn query(&self, raw: &RawQuery) -> Result<QueryResponse, ApiError> {
        let start = Instant::now();
        let (spec, view) = self.resolve(raw)?;
        let list = solve(&view, &Self::engine_query(&spec))?;
        Ok(QueryResponse {
            echo: Echo::new(&self.model.id, &spec),
            top_n: spec.top_n,
            evaluated_count: list.evaluated_count,
            candidates: list.candidates,
            warnings: spec.warnings,
            timing_ms: elapsed_ms(start),
        })
    }

    pub fn rank(&self, raw: &RawQuery, term: &str) -> Result<RankResponse, ApiError> {
        let start = Instant::now();
        let (mut spec, view) = self.resolve(raw)?;
        if raw.top_n.is_some() {
            spec.warnings.push("topn has no effect on rank lookups; ignored".into());
        }
        let query = Self::engine_query(&spec);
        let set = self.set();

        let mut inputs: Vec<usize> = [&spec.a, &spec.b, &spec.c]
            .iter()
            .filter_map(|t| set.index_of(t))
            .filter(|&i| view.admits(i))
            .collect();
        inputs.sort_unstable();
        inputs.dedup();
        let excluding = spec.mode == ConstraintMode::ExcludeInputs;
        let evaluated_count = view.len() - if excluding { inputs.len() } else { 0 };

        let lookup = view.lookup(term);
        let (status, rank) = match lookup {
            Lookup::Found(i) if excluding && inputs.contains(&i) => ("excluded", None),
            Lookup::Found(_) => ("found", rank_of(&view, &query, term)?),
            other => (lookup_status(other), None),
        };
        Ok(RankResponse {
            echo: Echo::new(&self.model.id, &spec),
            term: term.to_owned(),
            status: status.to_owned(),
            rank,
            evaluated_count,
            warnings: spec.warnings,
            timing_ms: elapsed_ms(start),
        })
    }

    pub fn pairs(
        &self,
        a: &str,
        c: &str,
        delta: f64,
        cutoff: Option<Cutoff>,
        rules: ShapeRules,
        limit: usize,
    ) -> Result<PairsResponse, ApiError> {
        let start = Instant::now();
        let cutoff = cutoff.unwrap_or_else(|| self.default_cutoff());
        let view = self.view(cutoff, rules)?;
        let pairs = pair_search(&view, a, c, delta, limit)?;
        Ok(PairsResponse {
            model: self.model.id.clone(),
            a: a.to_owned(),
            c: c.to_owned(),
            delta,
            cutoff,
            rules: rules.to_string(),
            limit,
            pairs,
            timing_ms: elapsed_ms(start),
        })
    }

    pub fn sweep(&self, spec: &SweepSpec) -> Result<SweepGrid, ApiError> {
        for &cutoff in &spec.cutoffs {
            self.check_cutoff(cutoff)?;
        }
        Ok(sweep(spec, self.set())?)
    }

    pub fn vocab(&self, token: &str, cutoff: Option<Cutoff>, rules: ShapeRules) -> Result<VocabResponse, ApiError> {
        let cutoff = cutoff.unwrap_or_else(|| self.default_cutoff());
        let view = self.view(cutoff, rules)?;
        let lookup = view.lookup(token);
        let rank = match lookup {
            Lookup::Found(i) | Lookup::Filtered(i) => Some(i),
            Lookup::Unknown => None,
        };
        Ok(VocabResponse {
            token: token.to_owned(),
            status: lookup_status(lookup).to_owned(),
            rank,
            cutoff,
            rules: rules.to_string(),
        })
    }

    // Query-string entry points for the HTTP layer.

    pub fn query_params(&self, map: HashMap<String, String>) -> Result<QueryResponse, ApiError> {
        let mut p = Params::new(map);
        let raw = RawQuery::from_params(&mut p);
        p.finish()?;
        self.query(&raw)
    }

    pub fn rank_params(&self, map: HashMap<String, String>) -> Result<RankResponse, ApiError> {
        let mut p = Params::new(map);
        let raw = RawQuery::from_params(&mut p);
        let term = p.take(&["term"]);
        p.finish()?;
        self.rank(&raw, &required(&term, "term")?)
    }

    pub fn pairs_params(&self, map: HashMap<String, String>) -> Result<PairsResponse, ApiError> {
        let mut p = Params::new(map);
        let a = required(&p.take(&["a"]), "a")?;
        let c = required(&p.take(&["c"]), "c")?;
        let delta = parse_or(&p.take(&["delta"]), "delta", DEFAULT_DELTA)?;
        let cutoff = optional_cutoff(&mut p)?;
        let rules = parse_or(&p.take(&["rules"]), "rules", ShapeRules::NONE)?;
        let limit = parse_or(&p.take(&["limit"]), "limit", DEFAULT_PAIR_LIMIT)?;
        p.finish()?;
        self.pairs(&a, &c, delta, cutoff, rules, limit)
    }

    pub fn vocab_params(&self, map: HashMap<String, String>) -> Result<VocabResponse, ApiError> {
        let mut p = Params::new(map);
        let token = required(&p.take(&["token"]), "token")?;
        let cutoff = optional_cutoff(&mut p)?;
        let rules = parse_or(&p.take(&["rules"]), "rules", ShapeRules::NONE)?;
        p.finish()?;
        self.vocab(&token, cutoff, rules)
    }
}
