//! Two-round chain-of-thought records.
//!
//! Round one asks the model to pull the relevant context out of the image;
//! the reply is that context framed in the markup kind of the source. Round
//! two asks the original question again, now with the context available,
//! and the reply is the original answer:
//!
//! ```text
//! user:      To answer the question: {q}, extract the relevant context from the image.
//! assistant: <kind>{context}</kind>
//! user:      Based on the image and extracted context, answer the question: {q}
//! assistant: {a}
//! ```
//!
//! Contexts come from an [`AnnotatorClient`]. [`StubAnnotator`] is an
//! offline stand-in that quotes the gold markup.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markup::{find_framing_token, parse_tagged, MarkupError, MarkupKind, TaggedMarkup};
use crate::validate::validate;

pub const ROUND1_PREFIX: &str = "To answer the question: ";
pub const ROUND1_SUFFIX: &str = ", extract the relevant context from the image.";
pub const ROUND2_PREFIX: &str = "Based on the image and extracted context, answer the question: ";

/// The annotator's reply meaning the markup does not support the answer.
pub const UNCLEAR: &str = "unclear";

/// Default cap on a context reply, in characters.
pub const DEFAULT_CONTEXT_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CotError {
    #[error("question is empty")]
    EmptyQuestion,
    #[error("answer is empty")]
    EmptyAnswer,
    #[error("text contains framing token `{0}`")]
    FramedText(&'static str),
    #[error("context reply of {len} characters exceeds the cap of {cap}")]
    OversizeContext { len: usize, cap: usize },
    #[error("annotation is unclear and cannot be packaged")]
    UnclearContext,
    #[error("gold markup fails validation: {0}")]
    InvalidGold(String),
    #[error("annotator client failed: {0}")]
    Client(String),
    #[error("record breaks the conversation grammar: {0}")]
    Grammar(&'static str),
}

/// A question with its answer. Both are non-empty and free of framing
/// tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QaPair {
    question: String,
    answer: String,
}

impl QaPair {
    pub fn new(question: impl Into<String>, answer: impl Into<String>) -> Result<Self, CotError> {
        let question = question.into();
        let answer = answer.into();
        if question.trim().is_empty() {
            return Err(CotError::EmptyQuestion);
        }
        if answer.trim().is_empty() {
            return Err(CotError::EmptyAnswer);
        }
        for s in [&question, &answer] {
            if let Some((token, _)) = find_framing_token(s) {
                return Err(CotError::FramedText(token));
            }
        }
        Ok(QaPair { question, answer })
    }

    pub fn question(&self) -> &str {
        &self.question
    }

    pub fn answer(&self) -> &str {
        &self.answer
    }
}

impl<'de> Deserialize<'de> for QaPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            question: String,
            answer: String,
        }
        let r = Raw::deserialize(deserializer)?;
        QaPair::new(r.question, r.answer).map_err(serde::de::Error::custom)
    }
}

pub fn build_round1_question(question: &str) -> Result<String, CotError> {
    if question.trim().is_empty() {
        return Err(CotError::EmptyQuestion);
    }
    let mut s = String::with_capacity(ROUND1_PREFIX.len() + question.len() + ROUND1_SUFFIX.len());
    s.push_str(ROUND1_PREFIX);
    s.push_str(question);
    s.push_str(ROUND1_SUFFIX);
    Ok(s)
}

pub fn build_round2_question(question: &str) -> Result<String, CotError> {
    if question.trim().is_empty() {
        return Err(CotError::EmptyQuestion);
    }
    let mut s = String::from(ROUND2_PREFIX);
    s.push_str(question);
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextStatus {
    Grounded,
    Unclear,
}

/// Context extracted for one question. Unclear exactly when the context is
/// empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextAnnotation {
    kind: MarkupKind,
    context: String,
    status: ContextStatus,
}

impl ContextAnnotation {
    /// A grounded annotation; empty context falls back to unclear.
    pub fn grounded(kind: MarkupKind, context: impl Into<String>) -> Self {
        let context = context.into();
        let status = if context.is_empty() {
            ContextStatus::Unclear
        } else {
            ContextStatus::Grounded
        };
        ContextAnnotation { kind, context, status }
    }

    pub fn unclear(kind: MarkupKind) -> Self {
        ContextAnnotation {
            kind,
            context: String::new(),
            status: ContextStatus::Unclear,
        }
    }

    pub fn kind(&self) -> MarkupKind {
        self.kind
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn status(&self) -> ContextStatus {
        self.status
    }

    pub fn is_grounded(&self) -> bool {
        self.status == ContextStatus::Grounded
    }
}

impl<'de> Deserialize<'de> for ContextAnnotation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: MarkupKind,
            context: String,
            status: ContextStatus,
        }
        let r = Raw::deserialize(deserializer)?;
        if (r.status == ContextStatus::Unclear) != r.context.is_empty() {
            return Err(serde::de::Error::custom(
                "status must be unclear exactly when context is empty",
            ));
        }
        Ok(ContextAnnotation {
            kind: r.kind,
            context: r.context,
            status: r.status,
        })
    }
}

/// Everything an annotator sees for one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRequest {
    pub system: String,
    pub user: String,
    pub kind: MarkupKind,
    pub body: String,
    pub question: String,
    pub answer: String,
}

pub const ANNOTATOR_SYSTEM_PROMPT: &str = "You receive the complete markup text of a document image, a question about the document and the answer to that question. Reply with the shortest passage copied from the markup text that is needed to arrive at the answer, and nothing else. If the markup text does not support the answer, reply with the single word \"unclear\".";

impl AnnotationRequest {
    pub fn new(gold: &TaggedMarkup, qa: &QaPair) -> Self {
        let user = alloc::format!(
            "Markup ({}):\n{}\n\nQuestion: {}\nAnswer: {}",
            gold.kind(),
            gold.body(),
            qa.question(),
            qa.answer()
        );
        AnnotationRequest {
            system: ANNOTATOR_SYSTEM_PROMPT.to_string(),
            user,
            kind: gold.kind(),
            body: gold.body().to_string(),
            question: qa.question().to_string(),
            answer: qa.answer().to_string(),
        }
    }
}

/// A source of context replies. Implementations handle their own retries and
/// report a final failure as an error string.
pub trait AnnotatorClient {
    fn annotate(&self, request: &AnnotationRequest) -> Result<String, String>;
}

impl<T: AnnotatorClient + ?Sized> AnnotatorClient for &T {
    fn annotate(&self, request: &AnnotationRequest) -> Result<String, String> {
        (**self).annotate(request)
    }
}

/// Deterministic offline annotator. Replies with the shortest line of the
/// markup containing the answer; lines longer than [`StubAnnotator::MAX_LINE`]
/// characters are cut to a window of [`StubAnnotator::WINDOW`] characters on
/// each side of the answer. Replies "unclear" when the answer does not occur.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubAnnotator;

impl StubAnnotator {
    pub const MAX_LINE: usize = 160;
    pub const WINDOW: usize = 80;

    pub fn reply(body: &str, answer: &str) -> String {
        if answer.is_empty() {
            return UNCLEAR.into();
        }
        let line = if answer.contains('\n') {
            body.contains(answer).then_some(body)
        } else {
            body.split('\n')
                .filter(|l| l.contains(answer))
                .min_by_key(|l| l.chars().count())
        };
        let Some(line) = line else {
            return UNCLEAR.into();
        };
        if line.chars().count() <= Self::MAX_LINE {
            return line.into();
        }
        let start = line.find(answer).expect("line contains the answer");
        let end = start + answer.len();
        let from = line[..start]
            .char_indices()
            .rev()
            .nth(Self::WINDOW - 1)
            .map_or(0, |(i, _)| i);
        let to = line[end..]
            .char_indices()
            .nth(Self::WINDOW)
            .map_or(line.len(), |(i, _)| end + i);
        line[from..to].into()
    }
}

impl AnnotatorClient for StubAnnotator {
    fn annotate(&self, request: &AnnotationRequest) -> Result<String, String> {
        Ok(StubAnnotator::reply(&request.body, &request.answer))
    }
}

pub fn annotate_context(
    gold: &TaggedMarkup,
    qa: &QaPair,
    client: &dyn AnnotatorClient,
) -> Result<ContextAnnotation, CotError> {
    annotate_context_capped(gold, qa, client, DEFAULT_CONTEXT_CAP)
}

/// Asks `client` for the context and classifies the reply.
///
/// A reply framed as `<kind>…</kind>` is unwrapped first. "unclear" (any
/// case, surrounding whitespace ignored) or an empty reply gives an unclear
/// annotation; anything else is grounded with the trimmed reply as context.
pub fn annotate_context_capped(
    gold: &TaggedMarkup,
    qa: &QaPair,
    client: &dyn AnnotatorClient,
    cap: usize,
) -> Result<ContextAnnotation, CotError> {
    let report = validate(gold);
    if !report.ok {
        return Err(CotError::InvalidGold(report.violations[0].code.clone()));
    }
    let reply = client
        .annotate(&AnnotationRequest::new(gold, qa))
        .map_err(CotError::Client)?;
    let len = reply.chars().count();
    if len > cap {
        return Err(CotError::OversizeContext { len, cap });
    }
    let trimmed = reply.trim();
    let text = match parse_tagged(trimmed) {
        Ok(m) => m.into_body(),
        Err(_) => trimmed.to_string(),
    };
    let text = text.trim();
    if text.is_empty() || text.to_lowercase() == UNCLEAR {
        return Ok(ContextAnnotation::unclear(gold.kind()));
    }
    if let Some((token, _)) = find_framing_token(text) {
        return Err(CotError::FramedText(token));
    }
    Ok(ContextAnnotation::grounded(gold.kind(), text))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
}

/// A packaged two-round record. Field order is the export order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConversationRecord {
    id: String,
    image_ref: String,
    conversations: Vec<Turn>,
    markup_kind: MarkupKind,
    source_qa: QaPair,
}

impl ConversationRecord {
    pub fn id(&self) -> &str {
        &self.id
    }
    pub fn image_ref(&self) -> &str {
        &self.image_ref
    }
    pub fn conversations(&self) -> &[Turn] {
        &self.conversations
    }
    pub fn markup_kind(&self) -> MarkupKind {
        self.markup_kind
    }
    pub fn source_qa(&self) -> &QaPair {
        &self.source_qa
    }

    /// The round-one answer without its frame.
    pub fn context(&self) -> &str {
        let a1 = &self.conversations[1].text;
        &a1[self.markup_kind.open_token().len()..a1.len() - self.markup_kind.close_token().len()]
    }

    /// Checks every structural invariant of a packaged record.
    pub fn check(&self) -> Result<(), CotError> {
        let [q1, a1, q2, a2] = self.conversations.as_slice() else {
            return Err(CotError::Grammar("expected four turns"));
        };
        let roles = [q1.role, a1.role, q2.role, a2.role];
        if roles != [Role::User, Role::Assistant, Role::User, Role::Assistant] {
            return Err(CotError::Grammar("turns must alternate user and assistant"));
        }
        let q = self.source_qa.question();
        if q1.text != build_round1_question(q)? {
            return Err(CotError::Grammar("round-one question does not follow the template"));
        }
        if q2.text != build_round2_question(q)? {
            return Err(CotError::Grammar("round-two question does not follow the template"));
        }
        let framed = parse_tagged(&a1.text).map_err(|_| CotError::Grammar("round-one answer is not framed"))?;
        if framed.kind() != self.markup_kind || framed.body().is_empty() {
            return Err(CotError::Grammar("round-one answer has the wrong kind or no context"));
        }
        if a2.text != self.source_qa.answer() {
            return Err(CotError::Grammar("round-two answer differs from the source answer"));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for ConversationRecord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            id: String,
            image_ref: String,
            conversations: Vec<Turn>,
            markup_kind: MarkupKind,
            source_qa: QaPair,
        }
        let r = Raw::deserialize(deserializer)?;
        let rec = ConversationRecord {
            id: r.id,
            image_ref: r.image_ref,
            conversations: r.conversations,
            markup_kind: r.markup_kind,
            source_qa: r.source_qa,
        };
        rec.check().map_err(serde::de::Error::custom)?;
        Ok(rec)
    }
}

/// Assembles the four turns. Unclear annotations are refused; callers route
/// them to a sidecar instead.
pub fn package_record(
    id: impl Into<String>,
    image_ref: impl Into<String>,
    qa: &QaPair,
    annotation: &ContextAnnotation,
) -> Result<ConversationRecord, CotError> {
    if !annotation.is_grounded() {
        return Err(CotError::UnclearContext);
    }
    let framed = TaggedMarkup::new(annotation.kind(), annotation.context()).map_err(|e| match e {
        MarkupError::EmbeddedTag { token, .. } => CotError::FramedText(token),
        _ => CotError::Grammar("context cannot be framed"),
    })?;
    let turn = |role, text| Turn { role, text };
    Ok(ConversationRecord {
        id: id.into(),
        image_ref: image_ref.into(),
        conversations: alloc::vec![
            turn(Role::User, build_round1_question(qa.question())?),
            turn(Role::Assistant, framed.wrap()),
            turn(Role::User, build_round2_question(qa.question())?),
            turn(Role::Assistant, qa.answer().to_string()),
        ],
        markup_kind: annotation.kind(),
        source_qa: qa.clone(),
    })
}
