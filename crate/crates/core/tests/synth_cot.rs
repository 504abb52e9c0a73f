//! Generator properties and chain-of-thought packaging, checked with
//! recomputation from the specs and a regex grammar for the records.

use mlgen_core::cot::{
    annotate_context, build_round1_question, build_round2_question, package_record, AnnotationRequest, AnnotatorClient,
    ConversationRecord, QaPair, StubAnnotator,
};
use mlgen_core::markup::MarkupKind;
use mlgen_core::synth::{
    default_corpus, record_seed, sample_prompt, synth_chart, synth_formula, synth_page, synth_receipt, synth_table,
    Augment, Category, ChartConfig, CountRange, DocSpec, PageConfig, PromptTask, ReceiptConfig, SynthRecord,
    TableConfig,
};
use mlgen_core::validate::validate;
use proptest::prelude::*;
use regex::Regex;

fn generate(category: Category, seed: u64) -> SynthRecord {
    match category {
        Category::Chart => synth_chart(seed, &ChartConfig::default()),
        Category::Table => synth_table(seed, &TableConfig::default()),
        Category::Formula => synth_formula(seed, &default_corpus()),
        Category::Receipt => synth_receipt(seed, &ReceiptConfig::default()),
        Category::Page => synth_page(seed, &PageConfig::default()),
    }
    .unwrap()
}

fn all_records(per_category: u64) -> impl Iterator<Item = SynthRecord> {
    Category::ALL
        .into_iter()
        .flat_map(move |c| (0..per_category).map(move |i| generate(c, record_seed(2024, c, i))))
}

#[test]
fn determinism_and_gold_from_spec() {
    for rec in all_records(200) {
        let seed = u64::from_str_radix(rec.id.rsplit('-').next().unwrap(), 16).unwrap();
        let again = generate(rec.spec.category(), seed);
        assert_eq!(rec, again);
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
        // gold regenerated from a spec that went through its JSON schema
        let spec: DocSpec = serde_json::from_str(&serde_json::to_string(&rec.spec).unwrap()).unwrap();
        assert_eq!(spec.gold().wrap(), rec.gold.wrap(), "{}", rec.id);
        assert_eq!(rec.gold.kind(), rec.spec.category().gold_kind());
    }
}

#[test]
fn all_gold_passes_validation() {
    for rec in all_records(300) {
        let report = validate(&rec.gold);
        assert!(report.ok, "{}: {:?}", rec.id, report.violations);
    }
}

/// Formats hundredths the way gold JSON does: no trailing zeros, no
/// trailing point.
fn hundredths(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Integer cents from a receipt amount. Amounts are below 10^7 so the
/// product is exact after rounding.
fn cents(v: &serde_json::Value) -> i128 {
    (v.as_f64().unwrap() * 100.0).round() as i128
}

fn cents_text(c: i128) -> String {
    format!("{}.{:02}", c / 100, c % 100)
}

#[test]
fn qa_answers_are_recomputable() {
    let value_q = Regex::new(r"^What is the value of (.+) at (.+)\?$").unwrap();
    let argmax_q = Regex::new(r"^Which category has the highest value for (.+)\?$").unwrap();
    let cell_q = Regex::new(r"^What is the entry in row (\d+) of the (.+) column\?$").unwrap();
    let heading_q = Regex::new(r"^What is the heading of section (\d+) on this page\?$").unwrap();
    let amount = Regex::new(r#""(subtotal|tax|total|price)": (-?\d+(\.\d+)?)"#).unwrap();
    let mut checked = 0;
    for rec in all_records(400) {
        for pair in &rec.qa {
            let (q, a) = (pair.question(), pair.answer());
            let expected: String = match &rec.spec {
                DocSpec::Chart(spec) => {
                    let m = &spec.meta;
                    if let Some(c) = value_q.captures(q) {
                        let s = m.series().iter().find(|s| s.name == c[1]).unwrap();
                        let i = m.x_axis().iter().position(|x| *x == c[2]).unwrap();
                        hundredths(s.values[i])
                    } else if let Some(c) = argmax_q.captures(q) {
                        let s = m.series().iter().find(|s| s.name == c[1]).unwrap();
                        let mut best = 0;
                        for (i, v) in s.values.iter().enumerate() {
                            if *v > s.values[best] {
                                best = i;
                            }
                        }
                        m.x_axis()[best].clone()
                    } else {
                        panic!("unexpected chart question {:?}", q)
                    }
                }
                DocSpec::Table(spec) => {
                    let c = cell_q.captures(q).expect("table question");
                    let row: usize = c[1].parse().unwrap();
                    let col = spec.header.iter().position(|h| *h == c[2]).unwrap();
                    spec.rows[row - 1][col].clone()
                }
                DocSpec::Receipt(spec) => {
                    let gold: serde_json::Value = serde_json::from_str(rec.gold.body()).unwrap();
                    let items = gold["items"].as_array().unwrap();
                    let sub: i128 = items
                        .iter()
                        .map(|i| i["qty"].as_i64().unwrap() as i128 * cents(&i["price"]))
                        .sum();
                    let scaled = sub * spec.tax_rate_bp as i128;
                    let tax = scaled / 10_000 + i128::from(scaled % 10_000 >= 5_000);
                    assert_eq!(cents(&gold["subtotal"]), sub);
                    assert_eq!(cents(&gold["tax"]), tax);
                    assert_eq!(cents(&gold["total"]), sub + tax);
                    // every amount is written with exactly two decimals
                    for m in amount.captures_iter(rec.gold.body()) {
                        assert_eq!(m[2].split('.').nth(1).map(str::len), Some(2), "{}", &m[0]);
                    }
                    match q {
                        "What is the total amount on the receipt?" => cents_text(sub + tax),
                        "Which store issued this receipt?" => gold["store"].as_str().unwrap().into(),
                        "How much tax was charged?" => cents_text(tax),
                        _ => panic!("unexpected receipt question {:?}", q),
                    }
                }
                DocSpec::Page(spec) => {
                    if q == "What is the title of this webpage?" {
                        spec.title.clone()
                    } else {
                        let c = heading_q.captures(q).expect("page question");
                        let k: usize = c[1].parse().unwrap();
                        spec.sections[k - 1].heading.clone()
                    }
                }
                DocSpec::Formula(_) => panic!("formulas carry no qa"),
            };
            assert_eq!(a, expected, "{}: {}", rec.id, q);
            checked += 1;
        }
    }
    assert!(checked > 3000, "only {} pairs checked", checked);
}

#[test]
fn chart_generator_contracts() {
    for seed in 0..500 {
        let rec = synth_chart(seed, &ChartConfig::default()).unwrap();
        let DocSpec::Chart(spec) = &rec.spec else { panic!() };
        assert!(spec.style.color_palette.len() >= spec.meta.series().len());
        assert!(spec.style.width_px > 0 && spec.style.height_px > 0);
        assert!(rec.qa.len() >= 2);
    }
    let tiny = ChartConfig {
        series: CountRange::new(1, 1),
        categories: CountRange::new(1, 1),
        ..ChartConfig::default()
    };
    for seed in 0..50 {
        let rec = synth_chart(seed, &tiny).unwrap();
        let DocSpec::Chart(spec) = &rec.spec else { panic!() };
        let values = &spec.meta.series()[0].values;
        assert_eq!(values.len(), 1);
        assert_eq!(rec.qa[0].answer(), hundredths(values[0]));
    }
    let inverted = ChartConfig {
        series: CountRange::new(3, 2),
        ..ChartConfig::default()
    };
    assert!(synth_chart(0, &inverted).is_err());
}

#[test]
fn formula_contracts() {
    for seed in 0..1000 {
        let rec = synth_formula(seed, &default_corpus()).unwrap();
        let DocSpec::Formula(spec) = &rec.spec else { panic!() };
        let a = spec.augment;
        assert!(
            (-Augment::ROTATE_LIMIT..=Augment::ROTATE_LIMIT).contains(&a.rotate_deg),
            "{:?}",
            a
        );
        assert!(
            (-Augment::SHEAR_LIMIT..=Augment::SHEAR_LIMIT).contains(&a.shear),
            "{:?}",
            a
        );
        assert!(a.noise_sigma >= 0.0 && a.noise_sigma <= Augment::SIGMA_MAX, "{:?}", a);
        assert_eq!(rec.gold.kind(), MarkupKind::Latex);
    }
    let rec = synth_formula(3, &["x^{N}"]).unwrap();
    assert!(
        Regex::new(r"^x\^\{\d+\}$").unwrap().is_match(rec.gold.body()),
        "{}",
        rec.gold.body()
    );
    assert!(synth_formula::<&str>(0, &[]).is_err());
    assert!(synth_formula(0, &["x^{N"]).is_err());
}

#[test]
fn minimal_table_shape() {
    let c = TableConfig {
        rows: CountRange::new(1, 1),
        cols: CountRange::new(1, 1),
        plain_cells: true,
    };
    assert_eq!(synth_table(9, &c).unwrap().gold.body(), "| c00 |\n| --- |");
}

#[test]
fn prompt_draws_are_uniform() {
    const N: u64 = 10_000;
    // p-value of a chi-squared statistic with two degrees of freedom
    const MIN_P: f64 = 0.01;
    for task in PromptTask::ALL {
        let pool = task.pool();
        let mut counts = [0u64; 3];
        for seed in 0..N {
            let p = sample_prompt(task.name(), seed).unwrap();
            let i = pool.iter().position(|x| *x == p).expect("draw comes from the pool");
            counts[i] += 1;
        }
        let expected = N as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = (-chi2 / 2.0).exp();
        assert!(p > MIN_P, "{}: counts {:?}, p {}", task.name(), counts, p);
    }
    assert!(sample_prompt("latex", 1).is_ok());
    assert!(sample_prompt("image_to_pdf", 1).is_err());
    assert!(PromptTask::TextRecognition
        .pool()
        .contains(&sample_prompt("text_recognition", 42).unwrap()));
}

// ---- chain of thought ----

struct Grammar {
    q1: Regex,
    a1: Regex,
    q2: Regex,
}

impl Grammar {
    fn new() -> Self {
        Grammar {
            q1: Regex::new(r"^To answer the question: (?s)(.+), extract the relevant context from the image\.$")
                .unwrap(),
            a1: Regex::new(r"^<(txt|txt_gd|md|latex|html|json|tikz)>(?s)(.*)</([a-z_]+)>$").unwrap(),
            q2: Regex::new(r"^Based on the image and extracted context, answer the question: (?s)(.+)$").unwrap(),
        }
    }

    fn check(&self, r: &ConversationRecord) {
        let t = r.conversations();
        assert_eq!(t.len(), 4);
        let roles: Vec<String> = t
            .iter()
            .map(|x| serde_json::to_value(x.role).unwrap().as_str().unwrap().to_string())
            .collect();
        assert_eq!(roles, ["user", "assistant", "user", "assistant"]);
        let q1 = self.q1.captures(&t[0].text).expect("round one question");
        let a1 = self.a1.captures(&t[1].text).expect("round one answer");
        let q2 = self.q2.captures(&t[2].text).expect("round two question");
        assert_eq!(&a1[1], &a1[3]);
        assert_eq!(&a1[1], r.markup_kind().tag());
        assert!(!a1[2].is_empty());
        assert_eq!(&q1[1], r.source_qa().question());
        assert_eq!(&q2[1], r.source_qa().question());
        assert_eq!(t[3].text, r.source_qa().answer());
    }
}

#[test]
fn packaged_records_follow_grammar_and_round_trip() {
    let grammar = Grammar::new();
    let (mut grounded, mut total) = (0usize, 0usize);
    for rec in all_records(300) {
        for (k, pair) in rec.qa.iter().enumerate() {
            total += 1;
            let ann = annotate_context(&rec.gold, pair, &StubAnnotator).unwrap();
            if !ann.is_grounded() {
                assert!(package_record("x", "y", pair, &ann).is_err());
                continue;
            }
            grounded += 1;
            assert!(ann.context().contains(pair.answer()), "{}: {:?}", rec.id, pair);
            let packaged = package_record(
                format!("{}-q{}", rec.id, k),
                format!("images/{}.png", rec.id),
                pair,
                &ann,
            )
            .unwrap();
            grammar.check(&packaged);
            let line = serde_json::to_string(&packaged).unwrap();
            let keys: Vec<String> = serde_json::from_str::<serde_json::Value>(&line)
                .unwrap()
                .as_object()
                .unwrap()
                .keys()
                .cloned()
                .collect();
            assert_eq!(keys, ["id", "image_ref", "conversations", "markup_kind", "source_qa"]);
            let back: ConversationRecord = serde_json::from_str(&line).unwrap();
            assert_eq!(back, packaged);
        }
    }
    assert!(total >= 1000, "{} pairs", total);
    assert!(
        grounded as f64 >= 0.95 * total as f64,
        "{}/{} grounded",
        grounded,
        total
    );
}

#[test]
fn stub_reports_unclear_when_answer_is_absent() {
    let rec = generate(Category::Receipt, 5);
    let pair = QaPair::new("Who signed it?", "nobody-in-particular").unwrap();
    assert!(!annotate_context(&rec.gold, &pair, &StubAnnotator)
        .unwrap()
        .is_grounded());
}

#[test]
fn tampered_records_are_rejected_on_import() {
    let pair = QaPair::new("What is the total?", "3.00").unwrap();
    let ann = annotate_context(
        &mlgen_core::TaggedMarkup::new(MarkupKind::Json, "{\"total\": 3.00}").unwrap(),
        &pair,
        &StubAnnotator,
    )
    .unwrap();
    let rec = package_record("r", "img", &pair, &ann).unwrap();
    let line = serde_json::to_string(&rec).unwrap();
    for (from, to) in [
        ("To answer the question", "To answer question"),
        ("<json>", "<md>"),
        ("\"3.00\"}", "\"4.00\"}"),
    ] {
        let bad = line.replacen(from, to, 1);
        assert_ne!(bad, line);
        assert!(serde_json::from_str::<ConversationRecord>(&bad).is_err(), "{}", bad);
    }
}

/// A client that echoes a fixed reply, for checking reply classification.
struct Echo(&'static str);

impl AnnotatorClient for Echo {
    fn annotate(&self, _: &AnnotationRequest) -> Result<String, String> {
        Ok(self.0.into())
    }
}

#[test]
fn reply_classification() {
    let gold = mlgen_core::TaggedMarkup::new(MarkupKind::Md, "| a |\n| --- |").unwrap();
    let pair = QaPair::new("q", "a").unwrap();
    for reply in ["unclear", "  UNCLEAR\n", ""] {
        assert!(
            !annotate_context(&gold, &pair, &Echo(reply)).unwrap().is_grounded(),
            "{:?}",
            reply
        );
    }
    let ann = annotate_context(&gold, &pair, &Echo("  | a |  ")).unwrap();
    assert_eq!(ann.context(), "| a |");
    assert_eq!(ann.kind(), MarkupKind::Md);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn builders_are_injective_with_fixed_affixes(a in "[ -~é]{1,40}", b in "[ -~é]{1,40}") {
        let (a1, b1) = (build_round1_question(&a), build_round1_question(&b));
        let (a2, b2) = (build_round2_question(&a), build_round2_question(&b));
        // questions with framing tokens are refused; others must build
        if let (Ok(a1), Ok(b1), Ok(a2), Ok(b2)) = (a1, b1, a2, b2) {
            prop_assert_eq!(a == b, a1 == b1);
            prop_assert_eq!(a == b, a2 == b2);
            prop_assert_eq!(a1, format!("To answer the question: {}, extract the relevant context from the image.", a));
            prop_assert_eq!(a2, format!("Based on the image and extracted context, answer the question: {}", a));
        }
    }
}
