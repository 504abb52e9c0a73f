//! `mlgen` command line: synth, validate, package, evaluate, stats.
//!
//! Exit status: 0 on success, 1 on data errors (and on rejected records for
//! `validate`), 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mlgen::annotator::{Cached, HttpAnnotator};
use mlgen::cache::AnnotationCache;
use mlgen::commands::evaluate::{cmd_evaluate, Metric};
use mlgen::commands::package::cmd_package;
use mlgen::commands::stats::{cmd_stats, Tiles};
use mlgen::commands::synth::{cmd_synth, GOLD_FILE};
use mlgen::commands::thread_pool;
use mlgen::commands::validate::cmd_validate;
use mlgen::compile::TikzCompiler;
use mlgen::manifest::{AnnotatorKind, CompilerConfig};
use mlgen::{Manifest, PipelineError};
use mlgen_core::cot::StubAnnotator;
use mlgen_core::synth::Category;

#[derive(Parser)]
#[command(name = "mlgen", version, about = "Build and score markup-grounded document datasets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Global {
    /// Build manifest (JSON).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory; defaults to the manifest's `out_dir`, then `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for per-record work.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Annotator used by `package`.
    #[arg(long, global = true, value_enum)]
    annotator: Option<AnnotatorKind>,
    /// TikZ compiler command used by `validate`; `{input}` is the .tex path.
    #[arg(long, global = true)]
    compiler_cmd: Option<String>,
    /// Replaces the manifest's master seed.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate records, gold JSONL, spec files and a summary.
    Synth,
    /// Validate gold records; exits 1 when any record is rejected.
    Validate {
        /// Gold JSONL; defaults to `<out>/gold.jsonl`.
        input: Option<PathBuf>,
    },
    /// Build two-round conversation records from gold records with QA.
    Package {
        /// Gold JSONL; defaults to `<out>/gold.jsonl`.
        input: Option<PathBuf>,
    },
    /// Score predictions against gold.
    Evaluate {
        /// Predictions JSONL with `{id, output}` lines.
        #[arg(long)]
        pred: PathBuf,
        /// Gold JSONL; defaults to `<out>/gold.jsonl`.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long, value_enum)]
        metric: Metric,
        /// Only score this category (ap and kie default to chart and receipt).
        #[arg(long, value_parser = parse_category)]
        category: Option<Category>,
    },
    /// Token accounting over packaged records.
    Stats {
        /// Conversation JSONL; defaults to `<out>/cot.jsonl`.
        input: Option<PathBuf>,
        /// Tiles per image for every record.
        #[arg(long, conflicts_with = "tile_counts")]
        tiles: Option<u32>,
        /// JSON object mapping record id to tile count.
        #[arg(long)]
        tile_counts: Option<PathBuf>,
        #[arg(long)]
        tokens_per_tile: Option<u64>,
    },
}

fn parse_category(s: &str) -> Result<Category, String> {
    Category::ALL
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown category `{}`", s))
}

fn load_manifest(g: &Global, required: bool) -> Result<Manifest, PipelineError> {
    let mut m = match &g.manifest {
        Some(p) => Manifest::load(p)?,
        None if required => return Err(PipelineError::Usage("--manifest is required".into())),
        None => Manifest::default(),
    };
    if let Some(s) = g.seed_override {
        m.master_seed = s;
    }
    if let Some(a) = g.annotator {
        m.annotator.kind = a;
    }
    if let Some(cmd) = &g.compiler_cmd {
        let c = CompilerConfig {
            command: cmd.clone(),
            ..m.compiler.take().unwrap_or_default()
        };
        c.check()?;
        m.compiler = Some(c);
    }
    Ok(m)
}

fn out_dir(g: &Global, m: &Manifest) -> PathBuf {
    g.out
        .clone()
        .or_else(|| m.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn input_or(input: &Option<PathBuf>, out: &Path, name: &str) -> PathBuf {
    input.clone().unwrap_or_else(|| out.join(name))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let g = &cli.global;
    let pool = thread_pool(g.workers)?;
    match &cli.command {
        Cmd::Synth => {
            let m = load_manifest(g, true)?;
            let out = out_dir(g, &m);
            eprintln!("synth: {} records into {}", m.counts.total(), out.display());
            let summary = cmd_synth(&m, &out, &pool)?;
            print!("{}", summary.table());
        }
        Cmd::Validate { input } => {
            let m = load_manifest(g, false)?;
            let out = out_dir(g, &m);
            let input = input_or(input, &out, GOLD_FILE);
            let compiler = m.compiler.as_ref().map(TikzCompiler::from_config);
            let r = cmd_validate(&input, &out, compiler.as_ref(), &pool)?;
            println!("total {}\nkept {}\nrejected {}", r.total, r.kept, r.rejected);
            for (code, n) in &r.by_code {
                println!("  {} {}", code, n);
            }
            if r.rejected > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Package { input } => {
            let m = load_manifest(g, false)?;
            let out = out_dir(g, &m);
            let input = input_or(input, &out, GOLD_FILE);
            let a = &m.annotator;
            let cache = match (&a.cache, a.kind) {
                (Some(p), _) => AnnotationCache::open(&out.join(p))?,
                (None, AnnotatorKind::Http) => AnnotationCache::open(&out.join("annotation_cache.json"))?,
                (None, AnnotatorKind::Stub) => AnnotationCache::in_memory(),
            };
            let summary = match a.kind {
                AnnotatorKind::Stub => {
                    let client = Cached {
                        inner: StubAnnotator,
                        identity: "stub".into(),
                        cache: &cache,
                    };
                    cmd_package(&input, &out, &client, a.context_cap, &pool)
                }
                AnnotatorKind::Http => {
                    let http = HttpAnnotator::from_config(a)?;
                    let pool = thread_pool(Some(g.workers.unwrap_or(a.max_in_flight).min(a.max_in_flight)))?;
                    let client = Cached {
                        identity: http.identity(),
                        inner: http,
                        cache: &cache,
                    };
                    cmd_package(&input, &out, &client, a.context_cap, &pool)
                }
            };
            // keep finished annotations even when the run failed
            cache.flush().context("flushing annotation cache")?;
            let s = summary?;
            println!(
                "questions {}\npackaged {}\nrejected {}",
                s.questions, s.packaged, s.rejected
            );
        }
        Cmd::Evaluate {
            pred,
            gold,
            metric,
            category,
        } => {
            let m = load_manifest(g, false)?;
            let out = out_dir(g, &m);
            let gold = input_or(gold, &out, GOLD_FILE);
            for r in cmd_evaluate(pred, &gold, *metric, *category, &m.ap, &out)? {
                println!("{}\t{:.4}", r.metric_name, r.aggregate);
                for n in &r.notes {
                    eprintln!("evaluate: {}", n);
                }
            }
        }
        Cmd::Stats {
            input,
            tiles,
            tile_counts,
            tokens_per_tile,
        } => {
            let m = load_manifest(g, false)?;
            let out = out_dir(g, &m);
            let input = input_or(input, &out, "cot.jsonl");
            let tiles = match (tiles, tile_counts) {
                (_, Some(p)) => Tiles::File(p.clone()),
                (Some(n), None) => Tiles::Uniform(*n),
                (None, None) => Tiles::Uniform(m.default_tiles),
            };
            let s = cmd_stats(&input, &tiles, tokens_per_tile.unwrap_or(m.tokens_per_tile), &out)?;
            print!("{}", s.table());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            let code = e.downcast_ref::<PipelineError>().map_or(1, PipelineError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
