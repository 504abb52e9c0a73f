//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use mlgen::commands::package::cmd_package;
use mlgen::commands::stats::{cmd_stats, Tiles};
use mlgen::commands::synth::cmd_synth;
use mlgen::commands::thread_pool;
use mlgen::commands::validate::cmd_validate;
use mlgen::manifest::Counts;
use mlgen::records::{export_jsonl, import_jsonl, sidecar_path, RejectedRecord};
use mlgen::Manifest;
use mlgen_core::convert::{
    chart_meta_to_json, html_table_to_markdown, json_to_chart_meta, order_text_spans, spans_to_grounded_text, ChartMeta,
};
use mlgen_core::cot::{ConversationRecord, StubAnnotator};
use mlgen_core::markup::find_framing_token;
use mlgen_core::metrics::{ap_suite, structural_ap, ApConfig};
use mlgen_core::synth::{
    default_corpus, record_seed, synth_chart, synth_formula, synth_page, synth_receipt, synth_table, Category,
    ChartConfig, DocSpec, PageConfig, ReceiptConfig, SynthRecord, TableConfig,
};
use mlgen_core::validate::{filter_dataset, inject_corruption, ImportedRecord};
use mlgen_core::{parse_tagged, wrap_tagged, BBox, MarkupError, MarkupKind, TaggedMarkup, TextSpan};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde_json::{json, Value};

/// Relative tolerance for chart values after a JSON round trip.
const CHART_REL_TOL: f64 = 1e-6;
/// AP aggregates must hit their targets exactly.
const AP_EXACT: f64 = 0.0;
const MASTER_SEED: u64 = 20240601;

type Outcome = Result<String, String>;
type ErrorCheck = fn(&MarkupError, MarkupKind, MarkupKind) -> bool;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn generate(category: Category, index: u64) -> SynthRecord {
    let seed = record_seed(MASTER_SEED, category, index);
    match category {
        Category::Chart => synth_chart(seed, &ChartConfig::default()),
        Category::Table => synth_table(seed, &TableConfig::default()),
        Category::Formula => synth_formula(seed, &default_corpus()),
        Category::Receipt => synth_receipt(seed, &ReceiptConfig::default()),
        Category::Page => synth_page(seed, &PageConfig::default()),
    }
    .expect("default configs generate")
}

// ---- framing ----

fn random_body(rng: &mut ChaCha8Rng) -> String {
    const PARTS: [&str; 17] = [
        "<", ">", "/", "md", "json", "x", " ", "\n", "é", "{", "}", "\\", "box", "<b>", "</b>", "ü", "1",
    ];
    loop {
        let n = rng.random_range(0..40);
        let body: String = (0..n).map(|_| *PARTS.choose(rng).unwrap()).collect();
        if find_framing_token(&body).is_none() {
            return body;
        }
    }
}

/// Every single-token mutation class of `open body close`, with the error
/// each must produce.
fn check_mutations(k: MarkupKind, b: &str, other: MarkupKind, cut: usize) -> Result<(), String> {
    let (open, close) = (k.open_token(), k.close_token());
    let (head, tail) = b.split_at(cut);
    let err = |s: &str| parse_tagged(s).err();
    let cases: Vec<(String, ErrorCheck)> = vec![
        (
            format!("<zz>{}{}", b, close),
            |e, _, _| matches!(e, MarkupError::UnknownTag(t) if t == "zz"),
        ),
        (format!("{}{}{}", open, b, other.close_token()), |e, k, o| {
            *e == MarkupError::MismatchedTag { open: k, close: o }
        }),
        (format!("{}{}", open, b), |e, _, _| *e == MarkupError::MissingFrame),
        (format!("{}{}{}x", open, b, close), |e, _, _| {
            matches!(e, MarkupError::TrailingContent(_))
        }),
        (
            format!("{}{}{}{}{}", open, head, other.open_token(), tail, close),
            |e, _, _| matches!(e, MarkupError::EmbeddedTag { .. }),
        ),
        (format!("{}{}{}{}{}", open, head, open, tail, close), |e, _, _| {
            matches!(e, MarkupError::EmbeddedTag { .. })
        }),
        (format!("{}{}{}{}{}", open, head, close, tail, close), |e, _, _| {
            matches!(e, MarkupError::TrailingContent(_))
        }),
        (
            format!("{}{}{}{}{}", open, head, other.close_token(), tail, close),
            |e, k, o| *e == MarkupError::MismatchedTag { open: k, close: o },
        ),
    ];
    for (s, want) in cases {
        match err(&s) {
            Some(e) if want(&e, k, other) => {}
            got => return Err(format!("{:?} gave {:?}", s, got)),
        }
    }
    // dropping the open tag leaves either a bare body or an unknown tag
    let no_open = format!("{}{}", b, close);
    let ok = match err(&no_open) {
        Some(MarkupError::UnknownTag(_)) => b.starts_with('<') && !b.starts_with("</"),
        Some(MarkupError::MissingFrame) => !(b.starts_with('<') && !b.starts_with("</")),
        _ => false,
    };
    ensure!(ok, "{:?} gave {:?}", no_open, err(&no_open));
    Ok(())
}

fn tag_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for k in MarkupKind::ALL {
        let others: Vec<MarkupKind> = MarkupKind::ALL.into_iter().filter(|o| *o != k).collect();
        for _ in 0..1000 {
            let b = random_body(&mut rng);
            let m = TaggedMarkup::new(k, b.clone()).map_err(|e| format!("{:?}: {}", b, e))?;
            let back = parse_tagged(&wrap_tagged(&m)).map_err(|e| format!("{:?}: {}", b, e))?;
            ensure!(back == m, "round trip changed {:?}", b);
            let bounds: Vec<usize> = b.char_indices().map(|(i, _)| i).chain([b.len()]).collect();
            check_mutations(
                k,
                &b,
                *others.choose(&mut rng).unwrap(),
                *bounds.choose(&mut rng).unwrap(),
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "{} bodies over {} kinds, 9 mutation classes each",
        checked,
        MarkupKind::ALL.len()
    ))
}

// ---- converters ----

fn table_oracle() -> Outcome {
    for i in 0..200 {
        let rec = generate(Category::Table, i);
        let DocSpec::Table(spec) = &rec.spec else {
            return Err("not a table spec".into());
        };
        let md = html_table_to_markdown(&spec.html_twin()).map_err(|e| format!("{}: {}", rec.id, e))?;
        ensure!(md == rec.gold.body(), "{}: converted twin differs from gold", rec.id);
    }
    Ok("200/200 byte-equal".into())
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CHART_REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn meta_close(a: &ChartMeta, b: &ChartMeta) -> bool {
    a.title() == b.title()
        && a.source() == b.source()
        && a.x_axis() == b.x_axis()
        && a.y_axis() == b.y_axis()
        && a.series().len() == b.series().len()
        && a.series().iter().zip(b.series()).all(|(x, y)| {
            x.name == y.name
                && x.values.len() == y.values.len()
                && x.values.iter().zip(&y.values).all(|(p, q)| rel_close(*p, *q))
        })
}

fn chart_round_trip() -> Outcome {
    let want = BTreeSet::from(["title", "source", "x-axis", "y-axis", "value"]);
    for i in 0..1000 {
        let rec = generate(Category::Chart, i);
        let DocSpec::Chart(spec) = &rec.spec else {
            return Err("not a chart spec".into());
        };
        let body = chart_meta_to_json(&spec.meta).into_body();
        let v: Value = serde_json::from_str(&body).map_err(|e| format!("{}: {}", rec.id, e))?;
        let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        ensure!(keys == want, "{}: keys {:?}", rec.id, keys);
        let back = json_to_chart_meta(&body).map_err(|e| format!("{}: {}", rec.id, e))?;
        ensure!(meta_close(&spec.meta, &back), "{}: round trip differs", rec.id);
    }
    Ok(format!("1000/1000 within {:e}, key set exact", CHART_REL_TOL))
}

fn reading_order() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spans = Vec::new();
    for line in 0..5u32 {
        let top = 40 + line * 150;
        for col in 0..10u32 {
            let jitter = rng.random_range(0..=12u32);
            let left = 20 + col * 95;
            let bbox = BBox::new(left, top + jitter, left + 80, top + jitter + 60).unwrap();
            spans.push(TextSpan::new(format!("w{}_{}", line, col), bbox).unwrap());
        }
    }
    let expected = order_text_spans(&spans);
    let grounded = spans_to_grounded_text(&spans).map_err(|e| e.to_string())?.into_body();
    for n in 0..1000 {
        spans.shuffle(&mut rng);
        ensure!(order_text_spans(&spans) == expected, "shuffle {} changed the text", n);
        ensure!(
            spans_to_grounded_text(&spans).map_err(|e| e.to_string())?.body() == grounded,
            "shuffle {} changed the grounded text",
            n
        );
    }
    let span = |t: &str, b: [u32; 4]| TextSpan::new(t, BBox::new(b[0], b[1], b[2], b[3]).unwrap()).unwrap();
    let lr = order_text_spans(&[span("world", [500, 0, 700, 50]), span("hello", [0, 0, 200, 50])]);
    ensure!(lr == "hello world", "left-right gave {:?}", lr);
    let tb = order_text_spans(&[span("B", [0, 200, 100, 250]), span("A", [0, 0, 100, 50])]);
    ensure!(tb == "A\nB", "top-bottom gave {:?}", tb);
    Ok("1000 shuffles of 50 spans identical; both hand orderings match".into())
}

// ---- filter ----

fn filter_partition(dir: &Path) -> Outcome {
    let mut records: Vec<ImportedRecord> = Category::ALL
        .into_iter()
        .flat_map(|c| (0..200).map(move |i| ImportedRecord::from(&generate(c, i))))
        .collect();
    let injected = inject_corruption(&mut records, 50, 5);
    ensure!(injected.len() == 50, "injected {}", injected.len());
    let injected_ids: BTreeSet<String> = injected.iter().map(|&i| records[i].id.clone()).collect();

    let outcome = filter_dataset(records.clone());
    let lib_rejected: BTreeSet<String> = outcome.rejected.iter().map(|(r, _)| r.id.clone()).collect();
    ensure!(
        lib_rejected == injected_ids,
        "library rejected {} records, injected {}",
        lib_rejected.len(),
        50
    );
    ensure!(
        outcome.kept.len() + outcome.rejected.len() == 1000,
        "library partition size"
    );

    let input = dir.join("filter_input.jsonl");
    let lines: String = records
        .iter()
        .map(|r| json!({"id": r.id, "kind": r.kind, "body": r.body}).to_string() + "\n")
        .collect();
    fs::write(&input, lines).map_err(|e| e.to_string())?;
    let out = dir.join("filter_out");
    let report = cmd_validate(&input, &out, None, &thread_pool(None).unwrap()).map_err(|e| e.to_string())?;
    let cli_rejected: BTreeSet<String> = report.rejected_ids.iter().cloned().collect();
    ensure!(
        cli_rejected == injected_ids,
        "pipeline rejected set differs from injected set"
    );
    ensure!(
        report.kept + report.rejected == 1000,
        "kept {} + rejected {}",
        report.kept,
        report.rejected
    );
    Ok(format!(
        "rejected == injected ({}), kept {} + rejected {} == 1000",
        injected_ids.len(),
        report.kept,
        report.rejected
    ))
}

// ---- AP ----

fn scaled(gold: &str, factor: f64) -> String {
    let mut v: Value = serde_json::from_str(gold).unwrap();
    for vals in v["value"].as_object_mut().unwrap().values_mut() {
        for x in vals.as_array_mut().unwrap() {
            *x = json!(x.as_f64().unwrap() * factor);
        }
    }
    serde_json::to_string(&v).unwrap()
}

fn perturb(gold: &str, rng: &mut ChaCha8Rng) -> String {
    if rng.random_bool(0.05) {
        return "{\"broken\": ".into();
    }
    let mut v: Value = serde_json::from_str(gold).unwrap();
    if rng.random_bool(0.2) {
        v["title"] = json!(v["title"].as_str().unwrap().to_uppercase());
    }
    if rng.random_bool(0.1) {
        v["x-axis"].as_array_mut().unwrap()[0] = json!("elsewhere");
    }
    let factors = [0.0, 0.02, -0.04, 0.06, -0.08, 0.09, 0.15, -0.5];
    for vals in v["value"].as_object_mut().unwrap().values_mut() {
        for x in vals.as_array_mut().unwrap() {
            let f = *factors.choose(rng).unwrap();
            *x = json!(x.as_f64().unwrap() * (1.0 + f));
        }
    }
    serde_json::to_string(&v).unwrap()
}

fn ap_suite_checks() -> Outcome {
    let cfg = ApConfig::default();
    let golds: Vec<String> = (0..500)
        .map(|i| generate(Category::Chart, i).gold.into_body())
        .collect();
    let ids: Vec<String> = (0..golds.len()).map(|i| format!("c{}", i)).collect();
    let err = |e: mlgen_core::metrics::MetricError| e.to_string();

    let selfs = ap_suite(&ids, &golds, &golds, &cfg).map_err(err)?;
    for r in &selfs {
        ensure!(
            (r.aggregate - 1.0).abs() <= AP_EXACT,
            "self {} = {}",
            r.metric_name,
            r.aggregate
        );
    }

    let zero_cells: usize = golds
        .iter()
        .map(|g| {
            let v: Value = serde_json::from_str(g).unwrap();
            v["value"]
                .as_object()
                .unwrap()
                .values()
                .flat_map(|a| a.as_array().unwrap().clone())
                .filter(|x| x.as_f64() == Some(0.0))
                .count()
        })
        .sum();
    let plus7: Vec<String> = golds.iter().map(|g| scaled(g, 1.07)).collect();
    let reports = ap_suite(&ids, &plus7, &golds, &cfg).map_err(err)?;
    let value_ap: Vec<f64> = reports
        .iter()
        .map(|r| r.mean_diagnostic("value_score").unwrap_or(f64::NAN))
        .collect();
    ensure!(
        (value_ap[0] - 0.0).abs() <= AP_EXACT && (value_ap[2] - 1.0).abs() <= AP_EXACT,
        "+7% value-cell AP strict/slight/high = {:?} ({} zero-valued gold cells)",
        value_ap,
        zero_cells
    );

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let levels = cfg.levels();
    for n in 0..1000 {
        let gold = &golds[n % golds.len()];
        let pred = perturb(gold, &mut rng);
        let s: Vec<f64> = levels
            .iter()
            .map(|(_, tol)| structural_ap(&pred, gold, *tol))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        ensure!(s[0] <= s[1] && s[1] <= s[2], "perturbation {} not monotone: {:?}", n, s);
    }
    Ok(format!(
        "self-eval {:?}; +7% value-cell AP strict {:.3} high {:.3}; 1000 perturbations monotone",
        selfs.iter().map(|r| r.aggregate).collect::<Vec<_>>(),
        value_ap[0],
        value_ap[2]
    ))
}

// ---- packaging, tokens, determinism ----

fn manifest(per_category: u64) -> Manifest {
    Manifest {
        master_seed: MASTER_SEED,
        counts: Counts {
            chart: per_category,
            table: per_category,
            formula: per_category,
            receipt: per_category,
            page: per_category,
        },
        ..Manifest::default()
    }
}

/// Gold lines whose answers never occur in their markup.
const UNANSWERABLE: usize = 5;

fn build_packaged(dir: &Path) -> Result<PathBuf, String> {
    let pool = thread_pool(None).unwrap();
    cmd_synth(&manifest(200), dir, &pool).map_err(|e| e.to_string())?;
    let gold = dir.join("gold.jsonl");
    let mut text = fs::read_to_string(&gold).map_err(|e| e.to_string())?;
    for i in 0..UNANSWERABLE {
        text += &json!({
            "id": format!("unanswerable-{}", i),
            "kind": "json",
            "body": "{\"total\": 1}",
            "qa": [{"question": "Who signed it?", "answer": "Nobody"}],
        })
        .to_string();
        text.push('\n');
    }
    fs::write(&gold, text).map_err(|e| e.to_string())?;
    cmd_package(&gold, dir, &StubAnnotator, 4096, &pool).map_err(|e| e.to_string())?;
    Ok(dir.join("cot.jsonl"))
}

fn cot_packaging(cot: &Path) -> Outcome {
    let q1 = Regex::new(r"^To answer the question: (?s)(.+), extract the relevant context from the image\.$").unwrap();
    let a1 = Regex::new(r"^<(txt|txt_gd|md|latex|html|json|tikz)>(?s)(.*)</([a-z_]+)>$").unwrap();
    let q2 = Regex::new(r"^Based on the image and extracted context, answer the question: (?s)(.+)$").unwrap();

    let records = import_jsonl(cot).map_err(|e| e.to_string())?;
    ensure!(records.len() >= 1000, "only {} packaged records", records.len());
    for r in &records {
        let t = r.conversations();
        ensure!(t.len() == 4, "{}: {} turns", r.id(), t.len());
        let (Some(c1), Some(c2), Some(c3)) = (
            q1.captures(&t[0].text),
            a1.captures(&t[1].text),
            q2.captures(&t[2].text),
        ) else {
            return Err(format!("{}: grammar mismatch", r.id()));
        };
        ensure!(
            &c1[1] == r.source_qa().question() && &c3[1] == r.source_qa().question(),
            "{}: question",
            r.id()
        );
        ensure!(
            c2[1] == c2[3] && &c2[1] == r.markup_kind().tag(),
            "{}: tag pair",
            r.id()
        );
        ensure!(
            c2[2].contains(r.source_qa().answer()),
            "{}: context lacks answer",
            r.id()
        );
        ensure!(t[3].text == r.source_qa().answer(), "{}: final answer", r.id());
    }
    let rejected: Vec<RejectedRecord> = mlgen::io::read_jsonl(&sidecar_path(cot)).map_err(|e| e.to_string())?;
    let packaged_ids: BTreeSet<&str> = records.iter().map(ConversationRecord::id).collect();
    ensure!(
        rejected.iter().all(|r| !packaged_ids.contains(r.id.as_str())),
        "a rejected id was also packaged"
    );
    for i in 0..UNANSWERABLE {
        let id = format!("unanswerable-{}-q0", i);
        ensure!(
            rejected.iter().any(|r| r.id == id && r.reason == "unclear"),
            "{} missing from the sidecar",
            id
        );
    }
    let unclear = rejected.iter().filter(|r| r.reason == "unclear").count();

    let again = cot.with_file_name("reexport.jsonl");
    export_jsonl(&records, &rejected, &again).map_err(|e| e.to_string())?;
    ensure!(
        fs::read(cot).unwrap() == fs::read(&again).unwrap(),
        "export after import differs"
    );
    ensure!(
        fs::read(sidecar_path(cot)).unwrap() == fs::read(sidecar_path(&again)).unwrap(),
        "sidecar export after import differs"
    );
    Ok(format!(
        "{} packaged records pass the grammar; {} unclear only in the sidecar; export/import byte-equal",
        records.len(),
        unclear
    ))
}

/// Token count with its own definition: a run of letters or digits is one
/// token, any other non-space character is one token.
fn oracle_tokens(re: &Regex, s: &str) -> u64 {
    re.find_iter(s).count() as u64
}

fn token_accounting(cot: &Path) -> Outcome {
    let m = Manifest::default();
    let stats = cmd_stats(
        cot,
        &Tiles::Uniform(m.default_tiles),
        m.tokens_per_tile,
        &cot.parent().unwrap().join("stats"),
    )
    .map_err(|e| e.to_string())?;
    let re = Regex::new(r"[\p{Alphabetic}\p{N}]+|\S").unwrap();
    let frame = Regex::new(r"^<[a-z_]+>(?s)(.*)</[a-z_]+>$").unwrap();
    let text = fs::read_to_string(cot).unwrap();
    let (mut image, mut context, mut qa, mut n) = (0u64, 0u64, 0u64, 0u64);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let turns: Vec<&str> = v["conversations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["text"].as_str().unwrap())
            .collect();
        image += m.default_tiles as u64 * m.tokens_per_tile;
        context += oracle_tokens(&re, &frame.captures(turns[1]).unwrap()[1]);
        qa += oracle_tokens(&re, turns[0]) + oracle_tokens(&re, turns[2]) + oracle_tokens(&re, turns[3]);
        n += 1;
    }
    let t = stats.report.totals;
    ensure!(
        (t.image_tokens, t.context_tokens, t.qa_tokens) == (image, context, qa),
        "totals {:?} vs independent ({}, {}, {})",
        t,
        image,
        context,
        qa
    );
    let (mean_image, mean_context) = (image as f64 / n as f64, context as f64 / n as f64);
    ensure!(
        mean_context < mean_image,
        "mean context {:.1} >= mean image {:.1}",
        mean_context,
        mean_image
    );
    Ok(format!(
        "totals match over {} records; mean context {:.1} < mean image {:.1}",
        n, mean_context, mean_image
    ))
}

fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let man = dir.join("manifest.json");
    fs::write(&man, serde_json::to_string(&manifest(40)).unwrap()).unwrap();
    let mut snaps = Vec::new();
    for (run, workers) in [("run1", "1"), ("run2", "4")] {
        let out = dir.join(run);
        for cmd in ["synth", "package"] {
            let o = Command::new(env!("CARGO_BIN_EXE_mlgen"))
                .args([
                    cmd,
                    "--manifest",
                    man.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                    "--workers",
                    workers,
                ])
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(
                o.status.success(),
                "{} failed: {}",
                cmd,
                String::from_utf8_lossy(&o.stderr)
            );
        }
        snaps.push(snapshot(&out));
    }
    ensure!(snaps[0].keys().eq(snaps[1].keys()), "different file sets");
    for (k, v) in &snaps[0] {
        ensure!(v == &snaps[1][k], "{} differs between runs", k.display());
    }
    Ok(format!(
        "{} files byte-identical across two runs (1 and 4 workers)",
        snaps[0].len()
    ))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("tempdir");
    let cot_dir = dir.path().join("cot");
    let cot = build_packaged(&cot_dir);
    let criteria: Vec<Criterion> = vec![
        ("tag round trip", Box::new(tag_round_trip)),
        ("converter oracle (tables)", Box::new(table_oracle)),
        ("chart json round trip", Box::new(chart_round_trip)),
        ("reading order", Box::new(reading_order)),
        ("validator/filter partition", Box::new(|| filter_partition(dir.path()))),
        ("ap metric suite", Box::new(ap_suite_checks)),
        (
            "cot packaging",
            Box::new(|| cot_packaging(cot.as_ref().map_err(Clone::clone)?)),
        ),
        (
            "token accounting",
            Box::new(|| token_accounting(cot.as_ref().map_err(Clone::clone)?)),
        ),
        ("determinism", Box::new(|| determinism(&dir.path().join("det")))),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {}: {}", name, detail),
            Err(reason) => {
                failed += 1;
                println!("FAIL {}: {}", name, reason);
            }
        }
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
