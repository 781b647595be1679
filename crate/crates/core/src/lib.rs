//! Word-embedding analogy engine and bias-audit toolkit.
//!
//! Answers `a : b :: c : ?` queries with additive (3CosAdd), multiplicative
//! (3CosMul) and direction-pair scoring, with explicit control over whether
//! input words may be returned, how far down the frequency list answers may
//! come from, and which word shapes are admitted.
//!
//! ```
//! use analogy_core::{solve, AnalogyQuery, ConstraintMode, synth};
//!
//! let set = synth::random_set(100, 8, 0);
//! let query = AnalogyQuery::new("w1", "w2", "w1").mode(ConstraintMode::Unconstrained);
//! let answer = solve(&set.full_view(), &query).unwrap();
//! assert_eq!(answer.top().unwrap().token, "w2");
//! ```

pub mod audit;
pub mod engine;
mod error;
pub mod eval;
pub mod store;
pub mod synth;

pub use audit::{
    audit, sweep, transparency_report, AuditReport, AuditSettings, BiasQuery, SetAudit, SetOutcome,
    SweepCell, SweepGrid, SweepSpec,
};
pub use engine::{
    cosine, full_ranking, pair_search, rank_of, ranking_keys, score_bolukbasi, score_cosadd,
    score_cosmul, solve, Algorithm, AnalogyQuery, ConstraintMode, PairResult, RankedList,
    ScoredCandidate, DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_TOP_N,
};
pub use error::{Error, Result};
pub use eval::{
    compare_modes, evaluate, evaluate_top_k, parse_dataset, AnalogyDataset, Category,
    CategoryScore, ErrorBreakdown, EvalReport, ModeComparison, Quadruple,
};
pub use store::{Cutoff, EmbeddingSet, Format, LoadOptions, Lookup, ShapeRules, VocabView};
