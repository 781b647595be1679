//! Command-line front end.

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use analogy_core::{
    audit, compare_modes, evaluate_top_k, parse_dataset, Algorithm, AuditReport, AuditSettings, BiasQuery,
    ConstraintMode, Cutoff, EmbeddingSet, Format, ShapeRules, SweepSpec,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::params::{parse_list, resolve_algorithm, RawQuery};
use crate::render;
use crate::service::{Model, Service};

#[derive(Parser, Debug)]
#[command(name = "analogy", version, about = "Word-embedding analogy queries, evaluation and bias audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Answer a : b :: c : ? and print the ranked candidates.
    Query(QueryArgs),
    /// Position of one term in the full ranking of a query.
    Rank(RankArgs),
    /// Accuracy on an analogy test set (questions-words format).
    Eval(EvalArgs),
    /// Rank of reported answers across one or more embedding sets.
    Audit(AuditArgs),
    /// Direction-pair answers over a grid of cutoffs and thresholds.
    Sweep(SweepArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Embedding file.
    #[arg(long)]
    pub model: PathBuf,
    /// bin (word2vec binary), txt (word2vec text) or glove (headerless text).
    #[arg(long, default_value = "bin")]
    pub format: Format,
}

impl ModelArgs {
    fn load(&self) -> Result<Model, ApiError> {
        Model::load(&self.model, self.format, None)
    }
}

/// Engine settings as strings, validated by the same code as HTTP requests.
#[derive(Args, Debug, Clone)]
pub struct QueryFlags {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub c: String,
    /// cosadd, cosmul, cosmul-raw or bolukbasi [default: cosadd]
    #[arg(long)]
    pub algo: Option<String>,
    /// constrained or unconstrained [default: constrained]
    #[arg(long)]
    pub mode: Option<String>,
    /// Threshold on ||b - d|| for bolukbasi [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Denominator offset for cosmul [default: 0.001]
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    /// Most frequent K words, or "all" [default: all]
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Comma list of max-len-20, no-punctuation, no-uppercase [default: none]
    #[arg(long)]
    pub rules: Option<String>,
}

impl QueryFlags {
    fn raw(&self, top_n: Option<String>) -> RawQuery {
        RawQuery {
            a: Some(self.a.clone()),
            b: Some(self.b.clone()),
            c: Some(self.c.clone()),
            algo: self.algo.clone(),
            mode: self.mode.clone(),
            top_n,
            delta: self.delta.clone(),
            epsilon: self.epsilon.clone(),
            cutoff: self.cutoff.clone(),
            rules: self.rules.clone(),
        }
    }
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub query: QueryFlags,
    /// Number of candidates to show [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    pub topn: Option<String>,
    /// Print the response as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub query: QueryFlags,
    #[arg(long)]
    pub term: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma list of algorithms [default: cosadd; with --compare all three]
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long, default_value = "constrained")]
    pub mode: ConstraintMode,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub delta: String,
    #[arg(long, default_value = "0.001", allow_hyphen_values = true)]
    pub epsilon: String,
    #[arg(long, default_value = "all")]
    pub cutoff: Cutoff,
    #[arg(long, default_value = "none")]
    pub rules: ShapeRules,
    /// Count an answer as correct within the top K.
    #[arg(long, default_value_t = 1)]
    pub top_k: usize,
    /// Run both modes and break wrong answers down by what was returned.
    #[arg(long)]
    pub compare: bool,
    /// One JSON record per category, then a summary record.
    #[arg(long)]
    pub jsonl: bool,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// JSON file with `queries` and optional `settings`.
    #[arg(long)]
    pub config: PathBuf,
    /// Embedding file, optionally as ID=PATH; repeat for several sets.
    #[arg(long = "model", required = true)]
    pub models: Vec<String>,
    #[arg(long, default_value = "bin")]
    pub format: Format,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// JSON sweep spec; the flags below are ignored when given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub a: Option<String>,
    #[arg(long, required_unless_present = "config")]
    pub b: Option<String>,
    #[arg(long, required_unless_present = "config")]
    pub c: Option<String>,
    /// Comma list [default: 0.5,0.8,0.9,1,1.1,1.2,1.5]
    #[arg(long)]
    pub deltas: Option<String>,
    /// Comma list [default: 10000,25000,50000,100000,250000,500000,all]
    #[arg(long)]
    pub cutoffs: Option<String>,
    #[arg(long, default_value = "unconstrained")]
    pub mode: ConstraintMode,
    #[arg(long, default_value = "none")]
    pub rules: ShapeRules,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Largest view a request may ask for; also the default cutoff.
    #[arg(long)]
    pub cutoff_max: Option<usize>,
}

/// Contents of an audit config file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(default)]
    pub settings: AuditSettings,
    pub queries: Vec<BiasQuery>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), ApiError> {
    let text = serde_json::to_string(value).map_err(|e| ApiError::new("io", e.to_string()))?;
    emit(out, &format!("{text}\n"))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), ApiError> {
    out.write_all(text.as_bytes())
        .map_err(|e| ApiError::new("io", e.to_string()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ApiError> {
    let text = fs::read_to_string(path).map_err(|e| ApiError::new("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ApiError::new("parse", format!("{}: {e}", path.display())))
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<(), ApiError> {
    match command {
        Command::Query(args) => {
            let service = Service::new(args.model.load()?);
            let resp = service.query(&args.query.raw(args.topn))?;
            if args.json {
                json_line(out, &resp)
            } else {
                emit(out, &render::query_table(&resp))
            }
        }
        Command::Rank(args) => {
            let service = Service::new(args.model.load()?);
            let resp = service.rank(&args.query.raw(None), &args.term)?;
            if args.json {
                json_line(out, &resp)
            } else {
                emit(out, &render::rank_text(&resp))
            }
        }
        Command::Eval(args) => run_eval(args, out),
        Command::Audit(args) => run_audit(args, out),
        Command::Sweep(args) => run_sweep(args, out),
        Command::Serve(args) => {
            let service = Service::new(args.model.load()?).with_cutoff_max(args.cutoff_max)?;
            let set = service.set();
            eprintln!("loaded {} ({} words, dim {})", service.model().id, set.len(), set.dim());
            let addr = SocketAddr::new(args.host, args.port);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| ApiError::new("io", e.to_string()))?;
            runtime
                .block_on(crate::server::serve(service, addr))
                .map_err(|e| ApiError::new("io", e.to_string()))
        }
    }
}

fn eval_algorithms(args: &EvalArgs) -> Result<Vec<Algorithm>, ApiError> {
    let names: Vec<String> = match &args.algo {
        Some(list) => parse_list(list, "algo")?,
        None if args.compare => vec!["cosadd".into(), "cosmul".into(), "bolukbasi".into()],
        None => vec!["cosadd".into()],
    };
    let mut warnings = Vec::new();
    let algorithms = names
        .into_iter()
        .map(|name| {
            resolve_algorithm(
                &Some(name),
                &Some(args.delta.clone()),
                &Some(args.epsilon.clone()),
                &mut warnings,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(algorithms)
}

fn run_eval(args: EvalArgs, out: &mut dyn Write) -> Result<(), ApiError> {
    if args.top_k == 0 {
        return Err(ApiError::usage("--top-k must be at least 1"));
    }
    let algorithms = eval_algorithms(&args)?;
    let dataset = parse_dataset(&args.dataset).map_err(|e| {
        let mut err = ApiError::from(e);
        err.message = format!("{}: {}", args.dataset.display(), err.message);
        err
    })?;
    let model = args.model.load()?;
    let view = model.set.view(args.cutoff, args.rules)?;

    if args.compare {
        let rows = compare_modes(&view, &dataset, &algorithms)?;
        if args.jsonl {
            for row in &rows {
                json_line(out, row)?;
            }
            return Ok(());
        }
        return emit(out, &render::compare_table(&rows));
    }

    for algorithm in algorithms {
        let start = Instant::now();
        let report = evaluate_top_k(&view, &dataset, algorithm, args.mode, args.top_k)?;
        if args.jsonl {
            for cat in &report.per_category {
                json_line(
                    out,
                    &serde_json::json!({
                        "type": "category",
                        "algorithm": report.algorithm,
                        "mode": report.mode,
                        "cutoff": report.cutoff,
                        "rules": args.rules.to_string(),
                        "top_k": report.top_k,
                        "category": cat.name,
                        "evaluated": cat.evaluated,
                        "skipped_oov": cat.skipped_oov,
                        "correct": cat.correct,
                        "accuracy": cat.accuracy,
                    }),
                )?;
            }
            json_line(
                out,
                &serde_json::json!({
                    "type": "summary",
                    "model": model.id,
                    "algorithm": report.algorithm,
                    "mode": report.mode,
                    "cutoff": report.cutoff,
                    "rules": args.rules.to_string(),
                    "top_k": report.top_k,
                    "evaluated": report.evaluated(),
                    "skipped_oov": report.skipped_oov(),
                    "correct": report.correct(),
                    "micro": report.micro,
                    "macro": report.macro_avg,
                    "timing_ms": start.elapsed().as_secs_f64() * 1000.0,
                }),
            )?;
        } else {
            emit(out, &render::eval_table(&report))?;
        }
    }
    Ok(())
}

fn parse_model_arg(arg: &str) -> (Option<&str>, &Path) {
    match arg.split_once('=') {
        Some((id, path)) if !id.is_empty() => (Some(id), Path::new(path)),
        _ => (None, Path::new(arg)),
    }
}

fn run_audit(args: AuditArgs, out: &mut dyn Write) -> Result<(), ApiError> {
    let config: AuditConfig = read_json(&args.config)?;
    if config.queries.is_empty() {
        return Err(ApiError::usage(format!("{}: no queries to audit", args.config.display())));
    }
    let models = args
        .models
        .iter()
        .map(|m| {
            let (id, path) = parse_model_arg(m);
            Model::load(path, args.format, id)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sets: Vec<(&str, &EmbeddingSet)> = models.iter().map(|m| (m.id.as_str(), &m.set)).collect();

    let reports = config
        .queries
        .iter()
        .map(|q| audit(q, &sets, &config.settings))
        .collect::<Result<Vec<AuditReport>, _>>()?;
    if args.json {
        return json_line(out, &reports);
    }
    let blocks: Vec<String> = reports.iter().map(render::audit_text).collect();
    emit(out, &blocks.join("\n"))
}

fn run_sweep(args: SweepArgs, out: &mut dyn Write) -> Result<(), ApiError> {
    let spec = match &args.config {
        Some(path) => read_json::<SweepSpec>(path)?,
        None => {
            let mut spec = SweepSpec::new(
                args.a.as_deref().unwrap_or_default(),
                args.b.as_deref().unwrap_or_default(),
                args.c.as_deref().unwrap_or_default(),
            );
            if let Some(d) = &args.deltas {
                spec.deltas = parse_list(d, "deltas")?;
            }
            if let Some(c) = &args.cutoffs {
                spec.cutoffs = parse_list(c, "cutoffs")?;
            }
            spec.mode = args.mode;
            spec.rules = args.rules;
            spec
        }
    };
    let service = Service::new(args.model.load()?);
    let grid = service.sweep(&spec)?;
    if args.json {
        json_line(out, &grid)
    } else {
        emit(out, &render::sweep_table(&grid))
    }
}
