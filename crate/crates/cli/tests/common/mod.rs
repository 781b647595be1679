#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use analogy_cli::server::router;
use analogy_cli::{Model, Service};
use analogy_core::synth::random_set;
use analogy_core::{AnalogyDataset, EmbeddingSet, Format};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn write_set(dir: &Path, name: &str, set: &EmbeddingSet, format: Format) -> PathBuf {
    let path = dir.join(name);
    set.save(&path, format).unwrap();
    path
}

/// A random model written to `dir/toy.bin`.
pub fn toy_model(dir: &Path, vocab: usize, dim: usize, seed: u64) -> PathBuf {
    write_set(dir, "toy.bin", &random_set(vocab, dim, seed), Format::Word2VecBinary)
}

pub fn write_dataset(dir: &Path, ds: &AnalogyDataset) -> PathBuf {
    let mut text = String::new();
    for cat in ds.categories() {
        let _ = writeln!(text, ": {}", cat.name);
        for q in &cat.quadruples {
            let _ = writeln!(text, "{} {} {} {}", q.a, q.b, q.c, q.d);
        }
    }
    let path = dir.join("questions.txt");
    std::fs::write(&path, text).unwrap();
    path
}

pub fn analogy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_analogy"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

pub fn service(path: &Path) -> Service {
    Service::new(Model::load(path, Format::Word2VecBinary, None).unwrap())
}

pub async fn request(service: &Service, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_owned())))
        .unwrap();
    let resp = router(service.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

pub async fn get_json(service: &Service, uri: &str) -> (StatusCode, Value) {
    let (status, body) = request(service, "GET", uri, None).await;
    (status, serde_json::from_str(&body).unwrap())
}

/// The body with its `timing_ms` member removed.
pub fn without_timing(mut v: Value) -> Value {
    if let Some(map) = v.as_object_mut() {
        map.remove("timing_ms");
    }
    v
}

/// `key=value&...` with percent-encoding for anything unusual.
pub fn query_string(params: &[(&str, String)]) -> String {
    let enc = |s: &str| {
        s.bytes()
            .map(|b| match b {
                b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' => (b as char).to_string(),
                _ => format!("%{b:02X}"),
            })
            .collect::<String>()
    };
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", enc(v)))
        .collect::<Vec<_>>()
        .join("&")
}

/// The same parameters as CLI flags; HTTP names match flag names.
pub fn flags(params: &[(&str, String)]) -> Vec<String> {
    params.iter().flat_map(|(k, v)| [format!("--{k}"), v.clone()]).collect()
}
