//! Analogy test sets and accuracy reports.
//!
//! Datasets use the questions-words layout: `: name` opens a category, every
//! other non-blank line holds `a b c d`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{solve, Algorithm, AnalogyQuery, ConstraintMode};
use crate::error::{Error, Result};
use crate::store::{Cutoff, VocabView};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

impl Quadruple {
    pub fn new(a: &str, b: &str, c: &str, d: &str) -> Self {
        Quadruple {
            a: a.to_owned(),
            b: b.to_owned(),
            c: c.to_owned(),
            d: d.to_owned(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub quadruples: Vec<Quadruple>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalogyDataset {
    categories: Vec<Category>,
}

impl AnalogyDataset {
    /// Requires at least one category, each non-empty and uniquely named.
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut names = HashSet::new();
        for category in &categories {
            if category.quadruples.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "category {:?} has no quadruples",
                    category.name
                )));
            }
            if !names.insert(category.name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate category {:?}",
                    category.name
                )));
            }
        }
        Ok(AnalogyDataset { categories })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut categories: Vec<Category> = Vec::new();
        for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix(':') {
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::DatasetSyntax {
                        line: lineno,
                        reason: "category header without a name".into(),
                    });
                }
                if let Some(prev) = categories.last() {
                    if prev.quadruples.is_empty() {
                        return Err(Error::DatasetSyntax {
                            line: lineno,
                            reason: format!("category {:?} has no quadruples", prev.name),
                        });
                    }
                }
                categories.push(Category {
                    name: name.to_owned(),
                    quadruples: Vec::new(),
                });
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let [a, b, c, d] = words[..] else {
                return Err(Error::DatasetSyntax {
                    line: lineno,
                    reason: format!("expected 4 tokens, found {}", words.len()),
                });
            };
            let Some(category) = categories.last_mut() else {
                return Err(Error::DatasetSyntax {
                    line: lineno,
                    reason: "quadruple before any category header".into(),
                });
            };
            category.quadruples.push(Quadruple::new(a, b, c, d));
        }
        if let Some(last) = categories.last() {
            if last.quadruples.is_empty() {
                return Err(Error::DatasetSyntax {
                    line: text.lines().count(),
                    reason: format!("category {:?} has no quadruples", last.name),
                });
            }
        }
        AnalogyDataset::new(categories)
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    /// Total number of quadruples.
    pub fn len(&self) -> usize {
        self.categories.iter().map(|c| c.quadruples.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn parse_dataset(path: impl AsRef<Path>) -> Result<AnalogyDataset> {
    AnalogyDataset::parse(&fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub name: String,
    pub evaluated: usize,
    pub skipped_oov: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_category: Vec<CategoryScore>,
    /// Correct over evaluated, pooled across categories.
    pub micro: f64,
    /// Unweighted mean of the accuracies of categories with evaluated > 0.
    #[serde(rename = "macro")]
    pub macro_avg: f64,
    pub algorithm: Algorithm,
    pub mode: ConstraintMode,
    pub cutoff: Cutoff,
    /// Answers count as correct when within the top `top_k`.
    pub top_k: usize,
}

impl EvalReport {
    pub fn evaluated(&self) -> usize {
        self.per_category.iter().map(|c| c.evaluated).sum()
    }

    pub fn skipped_oov(&self) -> usize {
        self.per_category.iter().map(|c| c.skipped_oov).sum()
    }

    pub fn correct(&self) -> usize {
        self.per_category.iter().map(|c| c.correct).sum()
    }
}

/// What a wrong top-1 answer was.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub returned_b: usize,
    pub returned_c: usize,
    pub returned_other: usize,
}

impl ErrorBreakdown {
    pub fn total(&self) -> usize {
        self.returned_b + self.returned_c + self.returned_other
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub algorithm: Algorithm,
    pub constrained: EvalReport,
    pub unconstrained: EvalReport,
    pub constrained_errors: ErrorBreakdown,
    pub unconstrained_errors: ErrorBreakdown,
}

#[derive(Clone, Copy, Debug)]
enum Outcome {
    Skipped,
    Answered {
        correct: bool,
        returned: Option<usize>,
        b: usize,
        c: usize,
    },
}

fn outcomes(
    view: &VocabView<'_>,
    ds: &AnalogyDataset,
    algorithm: Algorithm,
    mode: ConstraintMode,
    top_k: usize,
) -> Result<Vec<Vec<Outcome>>> {
    if top_k == 0 {
        return Err(Error::InvalidParameter("top_k must be at least 1".into()));
    }
    algorithm.validate()?;
    ds.categories
        .iter()
        .map(|category| {
            category
                .quadruples
                .par_iter()
                .map(|q| {
                    let found = [&q.a, &q.b, &q.c, &q.d].map(|t| view.lookup(t).found());
                    let [Some(_), Some(b), Some(c), Some(d)] = found else {
                        return Ok(Outcome::Skipped);
                    };
                    let query = AnalogyQuery::new(&q.a, &q.b, &q.c)
                        .algorithm(algorithm)
                        .mode(mode)
                        .top_n(top_k);
                    match solve(view, &query) {
                        Ok(list) => Ok(Outcome::Answered {
                            correct: list.candidates.iter().any(|x| x.index == d),
                            returned: list.top().map(|x| x.index),
                            b,
                            c,
                        }),
                        Err(Error::EmptyCandidates) => Ok(Outcome::Answered {
                            correct: false,
                            returned: None,
                            b,
                            c,
                        }),
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect()
}

fn report(
    ds: &AnalogyDataset,
    outcomes: &[Vec<Outcome>],
    algorithm: Algorithm,
    mode: ConstraintMode,
    cutoff: Cutoff,
    top_k: usize,
) -> EvalReport {
    let per_category: Vec<CategoryScore> = ds
        .categories
        .iter()
        .zip(outcomes)
        .map(|(category, outs)| {
            let skipped_oov = outs.iter().filter(|o| matches!(o, Outcome::Skipped)).count();
            let correct = outs
                .iter()
                .filter(|o| matches!(o, Outcome::Answered { correct: true, .. }))
                .count();
            let evaluated = outs.len() - skipped_oov;
            CategoryScore {
                name: category.name.clone(),
                evaluated,
                skipped_oov,
                correct,
                accuracy: if evaluated == 0 {
                    0.0
                } else {
                    correct as f64 / evaluated as f64
                },
            }
        })
        .collect();

    let evaluated: usize = per_category.iter().map(|c| c.evaluated).sum();
    let correct: usize = per_category.iter().map(|c| c.correct).sum();
    let micro = if evaluated == 0 {
        0.0
    } else {
        correct as f64 / evaluated as f64
    };
    let scored: Vec<f64> = per_category
        .iter()
        .filter(|c| c.evaluated > 0)
        .map(|c| c.accuracy)
        .collect();
    let macro_avg = if scored.is_empty() {
        0.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    };

    EvalReport {
        per_category,
        micro,
        macro_avg,
        algorithm,
        mode,
        cutoff,
        top_k,
    }
}

fn breakdown(outcomes: &[Vec<Outcome>]) -> ErrorBreakdown {
    let mut errors = ErrorBreakdown::default();
    for outcome in outcomes.iter().flatten() {
        if let Outcome::Answered {
            correct: false,
            returned,
            b,
            c,
        } = *outcome
        {
            match returned {
                Some(r) if r == b => errors.returned_b += 1,
                Some(r) if r == c => errors.returned_c += 1,
                _ => errors.returned_other += 1,
            }
        }
    }
    errors
}

/// Top-1 accuracy. Quadruples with any word outside the view are skipped
/// and counted in `skipped_oov`.
pub fn evaluate(
    view: &VocabView<'_>,
    ds: &AnalogyDataset,
    algorithm: Algorithm,
    mode: ConstraintMode,
) -> Result<EvalReport> {
    evaluate_top_k(view, ds, algorithm, mode, 1)
}

pub fn evaluate_top_k(
    view: &VocabView<'_>,
    ds: &AnalogyDataset,
    algorithm: Algorithm,
    mode: ConstraintMode,
    top_k: usize,
) -> Result<EvalReport> {
    let outs = outcomes(view, ds, algorithm, mode, top_k)?;
    Ok(report(ds, &outs, algorithm, mode, view.cutoff(), top_k))
}

/// Both constraint modes for each algorithm, with a breakdown of what the
/// wrong answers were.
pub fn compare_modes(
    view: &VocabView<'_>,
    ds: &AnalogyDataset,
    algorithms: &[Algorithm],
) -> Result<Vec<ModeComparison>> {
    algorithms
        .iter()
        .map(|&algorithm| {
            let run = |mode| -> Result<(EvalReport, ErrorBreakdown)> {
                let outs = outcomes(view, ds, algorithm, mode, 1)?;
                Ok((
                    report(ds, &outs, algorithm, mode, view.cutoff(), 1),
                    breakdown(&outs),
                ))
            };
            let (constrained, constrained_errors) = run(ConstraintMode::ExcludeInputs)?;
            let (unconstrained, unconstrained_errors) = run(ConstraintMode::Unconstrained)?;
            Ok(ModeComparison {
                algorithm,
                constrained,
                unconstrained,
                constrained_errors,
                unconstrained_errors,
            })
        })
        .collect()
}
