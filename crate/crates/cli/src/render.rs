//! Plain-text tables for terminal output.

use std::fmt::Write;

use analogy_core::{AuditReport, EvalReport, ModeComparison, SetOutcome, SweepCell, SweepGrid};

use crate::service::{Echo, QueryResponse, RankResponse};

/// Left-aligns the first column and right-aligns the rest.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut parts = Vec::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            parts.push(if i == 0 {
                format!("{cell:<w$}")
            } else {
                format!("{cell:>w$}")
            });
        }
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

fn echo_lines(out: &mut String, e: &Echo) {
    let _ = writeln!(out, "model: {}", e.model);
    let _ = writeln!(out, "query: {} : {} :: {} : ?", e.a, e.b, e.c);
    let mut params = format!("algorithm: {}", e.algorithm);
    if let Some(d) = e.delta {
        let _ = write!(params, "  delta: {d}");
    }
    if let Some(eps) = e.epsilon {
        let _ = write!(params, "  epsilon: {eps}");
    }
    if let Some(shifted) = e.shifted {
        let _ = write!(params, "  shifted: {shifted}");
    }
    let _ = writeln!(out, "{params}  mode: {}  cutoff: {}  rules: {}", e.mode, e.cutoff, e.rules);
}

fn warning_lines(out: &mut String, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(out, "warning: {w}");
    }
}

pub fn score(x: f64) -> String {
    format!("{x:.6}")
}

pub fn query_table(r: &QueryResponse) -> String {
    let mut out = String::new();
    echo_lines(&mut out, &r.echo);
    let _ = writeln!(
        out,
        "top_n: {}  evaluated: {}  time: {:.2} ms",
        r.top_n, r.evaluated_count, r.timing_ms
    );
    warning_lines(&mut out, &r.warnings);
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .candidates
        .iter()
        .map(|c| vec![c.rank.to_string(), c.token.clone(), score(c.score)])
        .collect();
    out.push_str(&table(&["rank", "token", "score"], &rows));
    out
}

pub fn rank_text(r: &RankResponse) -> String {
    let mut out = String::new();
    echo_lines(&mut out, &r.echo);
    warning_lines(&mut out, &r.warnings);
    let place = match r.rank {
        Some(rank) => format!("rank {rank} of {}", r.evaluated_count),
        None => format!("not ranked ({})", r.status),
    };
    let _ = writeln!(out, "{}: {place}", r.term);
    out
}

pub fn eval_table(r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "algorithm: {}  mode: {}  cutoff: {}  top_k: {}",
        r.algorithm, r.mode, r.cutoff, r.top_k
    );
    let rows: Vec<Vec<String>> = r
        .per_category
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.evaluated.to_string(),
                c.skipped_oov.to_string(),
                c.correct.to_string(),
                format!("{:.4}", c.accuracy),
            ]
        })
        .collect();
    out.push_str(&table(&["category", "evaluated", "skipped", "correct", "accuracy"], &rows));
    let _ = writeln!(
        out,
        "micro {:.4}  macro {:.4}  (evaluated {}, skipped {})",
        r.micro,
        r.macro_avg,
        r.evaluated(),
        r.skipped_oov()
    );
    out
}

pub fn compare_table(rows: &[ModeComparison]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .flat_map(|row| {
            [
                (&row.constrained, &row.constrained_errors),
                (&row.unconstrained, &row.unconstrained_errors),
            ]
            .map(|(report, errors)| {
                vec![
                    row.algorithm.to_string(),
                    report.mode.to_string(),
                    format!("{:.4}", report.micro),
                    format!("{:.4}", report.macro_avg),
                    errors.returned_b.to_string(),
                    errors.returned_c.to_string(),
                    errors.returned_other.to_string(),
                ]
            })
        })
        .collect();
    let mut out = String::new();
    if let Some(first) = rows.first() {
        let _ = writeln!(out, "cutoff: {}  evaluated: {}", first.constrained.cutoff, first.constrained.evaluated());
    }
    out.push_str(&table(
        &["algorithm", "mode", "micro", "macro", "wrong=b", "wrong=c", "wrong=other"],
        &body,
    ));
    out
}

pub fn audit_text(r: &AuditReport) -> String {
    let q = &r.query;
    let mut out = String::new();
    let _ = write!(out, "query: {} : {} :: {} : ?", q.a, q.b, q.c);
    if let Some(rep) = &q.reported {
        let _ = write!(out, "  (reported: {rep})");
    }
    out.push('\n');
    let s = &r.settings;
    let _ = writeln!(
        out,
        "algorithm: {}  mode: {}  cutoff: {}  rules: {}",
        s.algorithm, s.mode, s.cutoff, s.rules
    );
    let rows: Vec<Vec<String>> = r
        .per_set
        .iter()
        .map(|set| match &set.outcome {
            SetOutcome::Usable { top5, rank_of_reported } => vec![
                set.set_id.clone(),
                rank_of_reported.map_or("-".into(), |r| r.to_string()),
                top5.join(" "),
            ],
            SetOutcome::Unusable { reason } => vec![set.set_id.clone(), "-".into(), format!("unusable: {reason}")],
        })
        .collect();
    out.push_str(&table(&["set", "rank", "top5"], &rows));
    let mean = r.mean_rank.map_or("-".into(), |m| format!("{m:.2}"));
    let _ = writeln!(out, "mean rank: {mean}  aggregated top5: {}", r.aggregated_top5.join(" "));
    out
}

/// Rows are cutoffs, columns are thresholds.
pub fn sweep_table(g: &SweepGrid) -> String {
    let spec = &g.spec;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "query: {} : {} :: {} : ?  algorithm: bolukbasi  mode: {}  rules: {}",
        spec.a, spec.b, spec.c, spec.mode, spec.rules
    );
    let mut header = vec!["cutoff \\ delta".to_owned()];
    header.extend(spec.deltas.iter().map(|d| d.to_string()));
    let rows: Vec<Vec<String>> = spec
        .cutoffs
        .iter()
        .zip(&g.cells)
        .map(|(cutoff, cells)| {
            let mut row = vec![cutoff.to_string()];
            row.extend(cells.iter().map(|c| match c {
                SweepCell::Answer { token, .. } => token.clone(),
                SweepCell::Empty => "-".into(),
            }));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.push_str(&table(&header, &rows));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_align() {
        let t = table(&["a", "bb"], &[vec!["long".into(), "1".into()], vec!["x".into(), "22".into()]]);
        assert_eq!(t, "a     bb\nlong   1\nx     22\n");
    }
}
