//! Bias-claim auditing: top-N transparency, rank of a reported answer
//! across several embedding sets, and threshold x cutoff sweeps.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{
    ranking_keys, solve, Algorithm, AnalogyQuery, ConstraintMode, RankedList, DEFAULT_DELTA,
};
use crate::error::{Error, Result};
use crate::store::{Cutoff, EmbeddingSet, ShapeRules, VocabView};

/// An analogy someone cited as evidence, with the answer they reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasQuery {
    pub a: String,
    pub b: String,
    pub c: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported: Option<String>,
}

impl BiasQuery {
    pub fn new(a: &str, b: &str, c: &str, reported: Option<&str>) -> Self {
        BiasQuery {
            a: a.to_owned(),
            b: b.to_owned(),
            c: c.to_owned(),
            reported: reported.map(str::to_owned),
        }
    }

    fn validate(&self) -> Result<()> {
        for t in [&self.a, &self.b, &self.c].into_iter().chain(&self.reported) {
            if t.is_empty() {
                return Err(Error::InvalidParameter("query tokens must be non-empty".into()));
            }
        }
        Ok(())
    }
}

/// Engine settings shared by every set in an audit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSettings {
    pub algorithm: Algorithm,
    pub mode: ConstraintMode,
    #[serde(default)]
    pub cutoff: Cutoff,
    #[serde(default)]
    pub rules: ShapeRules,
}

impl Default for AuditSettings {
    /// Additive scoring without input exclusion.
    fn default() -> Self {
        AuditSettings {
            algorithm: Algorithm::CosAdd,
            mode: ConstraintMode::Unconstrained,
            cutoff: Cutoff::All,
            rules: ShapeRules::NONE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SetOutcome {
    Usable {
        top5: Vec<String>,
        /// 1-based position of the reported term, absent when it is not a
        /// candidate.
        rank_of_reported: Option<usize>,
    },
    Unusable {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetAudit {
    pub set_id: String,
    #[serde(flatten)]
    pub outcome: SetOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub query: BiasQuery,
    pub settings: AuditSettings,
    pub per_set: Vec<SetAudit>,
    /// Mean rank of the reported term over the sets where it appears.
    pub mean_rank: Option<f64>,
    /// Five tokens with the best mean rank across usable sets.
    pub aggregated_top5: Vec<String>,
}

impl AuditReport {
    pub fn usable_sets(&self) -> usize {
        self.per_set
            .iter()
            .filter(|s| matches!(s.outcome, SetOutcome::Usable { .. }))
            .count()
    }
}

/// Runs one query against every set and aggregates the rankings.
///
/// A set in which a query word is unknown (or whose view is empty) is
/// reported as unusable and left out of the aggregates.
pub fn audit(
    query: &BiasQuery,
    sets: &[(&str, &EmbeddingSet)],
    settings: &AuditSettings,
) -> Result<AuditReport> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter("an audit needs at least one embedding set".into()));
    }
    query.validate()?;
    settings.algorithm.validate()?;
    let engine_query = AnalogyQuery::new(&query.a, &query.b, &query.c)
        .algorithm(settings.algorithm)
        .mode(settings.mode);

    let rankings: Vec<Result<Vec<usize>>> = sets
        .par_iter()
        .map(|(_, set)| {
            let view = set.view(settings.cutoff, settings.rules)?;
            Ok(ranking_keys(&view, &engine_query)?
                .into_iter()
                .map(|k| k.index)
                .collect())
        })
        .collect();

    let mut per_set = Vec::with_capacity(sets.len());
    let mut present_ranks = Vec::new();
    // Every token starts out absent (rank V + 1) in every usable set and is
    // corrected by its actual rank where it appears.
    let mut absent_total = 0.0;
    let mut corrections: HashMap<&str, f64> = HashMap::new();
    let mut n_usable = 0usize;

    for ((id, set), ranking) in sets.iter().zip(rankings) {
        let ranking = match ranking {
            Ok(r) => r,
            Err(
                e @ (Error::UnknownToken(_)
                | Error::EmptyView
                | Error::EmptyCandidates
                | Error::ZeroNorm),
            ) => {
                per_set.push(SetAudit {
                    set_id: id.to_string(),
                    outcome: SetOutcome::Unusable {
                        reason: e.to_string(),
                    },
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        n_usable += 1;
        let absent_rank = (set.len() + 1) as f64;
        absent_total += absent_rank;
        for (pos, &idx) in ranking.iter().enumerate() {
            *corrections.entry(set.token(idx)).or_default() += (pos + 1) as f64 - absent_rank;
        }

        let rank_of_reported = query.reported.as_deref().and_then(|r| {
            let idx = set.index_of(r)?;
            ranking.iter().position(|&x| x == idx).map(|p| p + 1)
        });
        if let Some(r) = rank_of_reported {
            present_ranks.push(r as f64);
        }
        per_set.push(SetAudit {
            set_id: id.to_string(),
            outcome: SetOutcome::Usable {
                top5: ranking.iter().take(5).map(|&i| set.token(i).to_owned()).collect(),
                rank_of_reported,
            },
        });
    }

    let mean_rank = (!present_ranks.is_empty())
        .then(|| present_ranks.iter().sum::<f64>() / present_ranks.len() as f64);

    let mut aggregated: Vec<(f64, &str)> = corrections
        .into_iter()
        .map(|(token, correction)| ((absent_total + correction) / n_usable as f64, token))
        .collect();
    aggregated.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(y.1)));
    let aggregated_top5 = aggregated.iter().take(5).map(|(_, t)| t.to_string()).collect();

    Ok(AuditReport {
        query: query.clone(),
        settings: *settings,
        per_set,
        mean_rank,
        aggregated_top5,
    })
}

/// Grid of answers over thresholds and cutoffs for the direction-pair score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub a: String,
    pub b: String,
    pub c: String,
    #[serde(default = "SweepSpec::default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default = "SweepSpec::default_cutoffs")]
    pub cutoffs: Vec<Cutoff>,
    #[serde(default = "SweepSpec::default_mode")]
    pub mode: ConstraintMode,
    #[serde(default)]
    pub rules: ShapeRules,
}

impl SweepSpec {
    pub fn new(a: &str, b: &str, c: &str) -> Self {
        SweepSpec {
            a: a.to_owned(),
            b: b.to_owned(),
            c: c.to_owned(),
            deltas: Self::default_deltas(),
            cutoffs: Self::default_cutoffs(),
            mode: Self::default_mode(),
            rules: ShapeRules::NONE,
        }
    }

    /// Inputs may be returned: at large thresholds the answer can be `c`.
    pub fn default_mode() -> ConstraintMode {
        ConstraintMode::Unconstrained
    }

    /// 0.8 to 1.2 in steps of 0.1, plus the extremes 0.5 and 1.5.
    pub fn default_deltas() -> Vec<f64> {
        vec![0.5, 0.8, 0.9, DEFAULT_DELTA, 1.1, 1.2, 1.5]
    }

    pub fn default_cutoffs() -> Vec<Cutoff> {
        [10_000, 25_000, 50_000, 100_000, 250_000, 500_000]
            .into_iter()
            .map(Cutoff::Top)
            .chain([Cutoff::All])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SweepCell {
    Answer { token: String, score: f64 },
    /// Nothing left to rank under this cutoff.
    Empty,
}

impl SweepCell {
    pub fn token(&self) -> Option<&str> {
        match self {
            SweepCell::Answer { token, .. } => Some(token),
            SweepCell::Empty => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    /// Indexed `[cutoff][delta]`.
    pub cells: Vec<Vec<SweepCell>>,
}

impl SweepGrid {
    pub fn cell(&self, cutoff: usize, delta: usize) -> &SweepCell {
        &self.cells[cutoff][delta]
    }
}

/// Top-1 direction-pair answer for every (cutoff, delta) combination.
pub fn sweep(spec: &SweepSpec, set: &EmbeddingSet) -> Result<SweepGrid> {
    if spec.deltas.is_empty() || spec.cutoffs.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one delta and one cutoff".into()));
    }
    for &delta in &spec.deltas {
        Algorithm::bolukbasi(delta).validate()?;
    }
    for t in [&spec.a, &spec.b, &spec.c] {
        if set.index_of(t).is_none() {
            return Err(Error::UnknownToken(t.clone()));
        }
    }
    if spec.cutoffs.contains(&Cutoff::Top(0)) {
        return Err(Error::InvalidCutoff);
    }

    let cells = spec
        .cutoffs
        .par_iter()
        .map(|&cutoff| {
            let view = match set.view(cutoff, spec.rules) {
                Ok(v) => v,
                Err(Error::EmptyView) => return Ok(vec![SweepCell::Empty; spec.deltas.len()]),
                Err(e) => return Err(e),
            };
            spec.deltas
                .par_iter()
                .map(|&delta| sweep_cell(&view, spec, delta))
                .collect()
        })
        .collect::<Result<Vec<Vec<SweepCell>>>>()?;

    Ok(SweepGrid {
        spec: spec.clone(),
        cells,
    })
}

fn sweep_cell(view: &VocabView<'_>, spec: &SweepSpec, delta: f64) -> Result<SweepCell> {
    let query = AnalogyQuery::new(&spec.a, &spec.b, &spec.c)
        .algorithm(Algorithm::bolukbasi(delta))
        .mode(spec.mode)
        .top_n(1);
    match solve(view, &query) {
        Ok(list) => {
            let top = list.top().expect("non-empty ranking");
            Ok(SweepCell::Answer {
                token: top.token.clone(),
                score: top.score,
            })
        }
        Err(Error::EmptyCandidates) => Ok(SweepCell::Empty),
        Err(e) => Err(e),
    }
}

/// The full top-`n` slice for a query, scores included.
pub fn transparency_report(
    view: &VocabView<'_>,
    query: &BiasQuery,
    algorithm: Algorithm,
    mode: ConstraintMode,
    n: usize,
) -> Result<RankedList> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let query = AnalogyQuery::new(&query.a, &query.b, &query.c)
        .algorithm(algorithm)
        .mode(mode)
        .top_n(n);
    solve(view, &query)
}
