mod common;

use analogy_cli::service::{QueryResponse, RankResponse};
use analogy_core::synth::OffsetFixture;
use analogy_core::{AuditReport, Format, SweepGrid};
use common::*;
use serde_json::Value;

#[test]
fn degenerate_query_returns_b() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 120, 8, 1);
    let m = model.to_str().unwrap();
    let out = analogy(&["query", "--model", m, "--a", "w5", "--b", "w9", "--c", "w5", "--mode", "unconstrained", "--algo", "cosadd"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let first = text.lines().find(|l| l.starts_with("1 ")).unwrap();
    assert_eq!(first.split_whitespace().nth(1), Some("w9"));
}

#[test]
fn json_output_matches_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 150, 8, 2);
    let m = model.to_str().unwrap();
    let base = ["query", "--model", m, "--a", "w1", "--b", "w2", "--c", "w3", "--algo", "cosmul", "--topn", "7"];
    let table = stdout(&analogy(&base));
    let json = analogy(&[&base[..], &["--json"]].concat());
    let resp: QueryResponse = serde_json::from_slice(&json.stdout).unwrap();

    assert_eq!(resp.candidates.len(), 7);
    assert!(table.contains("algorithm: cosmul"));
    assert!(table.contains(&format!("epsilon: {}", resp.echo.epsilon.unwrap())));
    assert!(table.contains("mode: constrained"));
    assert!(table.contains("cutoff: all"));
    assert!(table.contains(&format!("evaluated: {}", resp.evaluated_count)));
    let rows: Vec<Vec<&str>> = table
        .lines()
        .skip_while(|l| !l.starts_with("rank"))
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), resp.candidates.len());
    for (row, c) in rows.iter().zip(&resp.candidates) {
        assert_eq!(row[0], c.rank.to_string());
        assert_eq!(row[1], c.token);
        assert_eq!(row[2], format!("{:.6}", c.score));
    }
}

#[test]
fn resolution_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 50, 4, 3);
    let m = model.to_str().unwrap();
    let out = analogy(&["query", "--model", m, "--a", "w1", "--b", "nope", "--c", "w3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not in the vocabulary"));

    let out = analogy(&["query", "--model", m, "--a", "w1", "--b", "w2", "--c", "w3", "--topn", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = analogy(&["query", "--model", m, "--format", "parquet", "--a", "w1", "--b", "w2", "--c", "w3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_and_parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = analogy(&["query", "--model", "/no/such/file.bin", "--a", "x", "--b", "y", "--c", "z"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 3\nfoo 1 2\n").unwrap();
    let out = analogy(&["query", "--model", bad.to_str().unwrap(), "--format", "txt", "--a", "x", "--b", "y", "--c", "z"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn filtered_inputs_and_ignored_delta_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 80, 4, 4);
    let m = model.to_str().unwrap();
    let out = analogy(&[
        "query", "--model", m, "--a", "w1", "--b", "w2", "--c", "w70", "--cutoff", "50", "--delta", "0.7", "--json",
    ]);
    assert!(out.status.success());
    let resp: QueryResponse = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(resp.echo.delta, None);
    assert_eq!(resp.warnings.len(), 2, "{:?}", resp.warnings);
    assert!(resp.warnings.iter().any(|w| w.contains("delta")));
    assert!(resp.warnings.iter().any(|w| w.contains("w70") && w.contains("outside the view")));
    assert!(resp.candidates.iter().all(|c| c.index < 50));
}

#[test]
fn rank_subcommand_distinguishes_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 60, 4, 5);
    let m = model.to_str().unwrap();
    let rank = |term: &str, extra: &[&str]| -> RankResponse {
        let args = [&["rank", "--model", m, "--a", "w1", "--b", "w2", "--c", "w3", "--json", "--term", term][..], extra].concat();
        let out = analogy(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        serde_json::from_slice(&out.stdout).unwrap()
    };
    assert_eq!(rank("w2", &[]).status, "excluded");
    assert_eq!(rank("w2", &["--mode", "unconstrained"]).status, "found");
    assert_eq!(rank("w55", &["--cutoff", "40"]).status, "filtered");
    assert_eq!(rank("zebra", &[]).status, "unknown");
    let found = rank("w10", &[]);
    assert_eq!(found.evaluated_count, 57);
    assert!(found.rank.is_some());
}

#[test]
fn eval_on_perfect_offsets_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let (set, ds) = OffsetFixture::default().build().unwrap();
    let model = write_set(dir.path(), "fixture.txt", &set, Format::Word2VecText);
    let data = write_dataset(dir.path(), &ds);
    let (m, d) = (model.to_str().unwrap(), data.to_str().unwrap());

    let out = analogy(&["eval", "--model", m, "--format", "txt", "--dataset", d]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("micro 1.0000  macro 1.0000"));

    let out = analogy(&["eval", "--model", m, "--format", "txt", "--dataset", d, "--jsonl"]);
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), ds.categories().len() + 1);
    let summary = lines.last().unwrap();
    assert_eq!(summary["type"], "summary");
    assert_eq!(summary["micro"], 1.0);
    assert_eq!(summary["macro"], 1.0);
    assert_eq!(summary["evaluated"], ds.len());

    let out = analogy(&["eval", "--model", m, "--format", "txt", "--dataset", d, "--compare"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("wrong=b") && text.lines().count() == 2 + 6);
}

#[test]
fn eval_rejects_malformed_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 30, 4, 6);
    let data = dir.path().join("q.txt");
    std::fs::write(&data, ": cat\nw1 w2 w3\n").unwrap();
    let out = analogy(&["eval", "--model", model.to_str().unwrap(), "--dataset", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn sweep_table_has_cutoff_rows_and_delta_columns() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_model(dir.path(), 200, 8, 7);
    let m = model.to_str().unwrap();
    let out = analogy(&["sweep", "--model", m, "--a", "w0", "--b", "w1", "--c", "w2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(header[3..], ["0.5", "0.8", "0.9", "1", "1.1", "1.2", "1.5"]);
    let labels: Vec<&str> = lines.map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(labels, ["10000", "25000", "50000", "100000", "250000", "500000", "all"]);

    let out = analogy(&["sweep", "--model", m, "--a", "w0", "--b", "w1", "--c", "w2", "--cutoffs", "20,all", "--deltas", "1", "--json"]);
    let grid: SweepGrid = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((grid.cells.len(), grid.cells[0].len()), (2, 1));
}

#[test]
fn audit_reports_and_rejects_empty_configs() {
    let dir = tempfile::tempdir().unwrap();
    let one = write_set(dir.path(), "one.bin", &analogy_core::synth::random_set(60, 6, 1), Format::Word2VecBinary);
    let two = write_set(dir.path(), "two.bin", &analogy_core::synth::random_set(40, 6, 2), Format::Word2VecBinary);
    let config = dir.path().join("audit.json");
    std::fs::write(
        &config,
        r#"{"settings": {"algorithm": {"name": "cosadd"}, "mode": "unconstrained"},
            "queries": [{"a": "w1", "b": "w2", "c": "w3", "reported": "w2"},
                        {"a": "w1", "b": "w2", "c": "w50"}]}"#,
    )
    .unwrap();
    let args = [
        "audit",
        "--config",
        config.to_str().unwrap(),
        "--model",
        &format!("first={}", one.display()),
        "--model",
        two.to_str().unwrap(),
    ];
    let out = analogy(&[&args[..], &["--json"]].concat());
    assert!(out.status.success(), "{}", stderr(&out));
    let reports: Vec<AuditReport> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0].per_set[0].set_id, "first");
    assert_eq!(reports[0].per_set[1].set_id, "two");
    assert_eq!(reports[0].usable_sets(), 2);
    assert_eq!(reports[1].usable_sets(), 1);

    let text = stdout(&analogy(&args));
    assert!(text.contains("mean rank:") && text.contains("unusable"));

    std::fs::write(&config, r#"{"queries": []}"#).unwrap();
    let out = analogy(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no queries"));
}
