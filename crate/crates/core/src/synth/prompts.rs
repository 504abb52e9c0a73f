//! Instruction prompts for the parsing tasks, three per task.

use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{rng_for, SynthError};
use crate::markup::MarkupKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptTask {
    TextRecognition,
    TextGrounding,
    ImageToMarkdown,
    ImageToLatex,
    ImageToHtml,
    WebpageSummarization,
    ImageToJson,
    ImageToTikz,
}

impl PromptTask {
    pub const ALL: [PromptTask; 8] = [
        PromptTask::TextRecognition,
        PromptTask::TextGrounding,
        PromptTask::ImageToMarkdown,
        PromptTask::ImageToLatex,
        PromptTask::ImageToHtml,
        PromptTask::WebpageSummarization,
        PromptTask::ImageToJson,
        PromptTask::ImageToTikz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptTask::TextRecognition => "text_recognition",
            PromptTask::TextGrounding => "text_grounding",
            PromptTask::ImageToMarkdown => "image_to_markdown",
            PromptTask::ImageToLatex => "image_to_latex",
            PromptTask::ImageToHtml => "image_to_html",
            PromptTask::WebpageSummarization => "webpage_summarization",
            PromptTask::ImageToJson => "image_to_json",
            PromptTask::ImageToTikz => "image_to_tikz",
        }
    }

    /// The parsing task whose answer is markup of `kind`.
    pub fn for_kind(kind: MarkupKind) -> PromptTask {
        match kind {
            MarkupKind::Txt => PromptTask::TextRecognition,
            MarkupKind::TxtGd => PromptTask::TextGrounding,
            MarkupKind::Md => PromptTask::ImageToMarkdown,
            MarkupKind::Latex => PromptTask::ImageToLatex,
            MarkupKind::Html => PromptTask::ImageToHtml,
            MarkupKind::Json => PromptTask::ImageToJson,
            MarkupKind::Tikz => PromptTask::ImageToTikz,
        }
    }

    pub fn pool(self) -> &'static [&'static str; 3] {
        match self {
            PromptTask::TextRecognition => &[
                "Kindly recognize the text from the image.",
                "How can I extract the text from the image?",
                "What text is in the image that can be extracted?",
            ],
            PromptTask::TextGrounding => &[
                "Can you perform text extraction with grounding?",
                "Please detect the text with grounding from the image.",
                "Recognize the text with grounding from the image.",
            ],
            PromptTask::ImageToMarkdown => &[
                "Parse the image into a proper markup language format.",
                "How to convert text from the image to markdown format?",
                "How to extract text from the image and change it to markdown format?",
            ],
            PromptTask::ImageToLatex => &[
                "Convert the image into a structured format.",
                "How to extract and translate text from the image to LaTeX format?",
                "How can I convert text from the image to LaTeX format efficiently?",
            ],
            PromptTask::ImageToHtml => &[
                "What is the HTML code corresponding to this image?",
                "Generate the HTML code.",
                "Parse the image into an appropriate markup language format.",
            ],
            PromptTask::WebpageSummarization => &[
                "What is the main idea of this webpage screenshot?",
                "What are the main information points of the webpage shown in the image?",
                "What is the key message conveyed by this webpage image?",
            ],
            PromptTask::ImageToJson => &[
                "Extract text from the image in JSON format.",
                "Output the image text as JSON.",
                "Represent the image text in a structured format.",
            ],
            // the stray period after the question mark is part of the pool
            PromptTask::ImageToTikz => &[
                "I need to get the code for drawing this image.",
                "What is the TikZ code for this image?.",
                "Please show me the TikZ code for displaying this image.",
            ],
        }
    }
}

impl fmt::Display for PromptTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts task names (`image_to_latex`) and markup kind tags (`latex`).
impl FromStr for PromptTask {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(t) = PromptTask::ALL.iter().find(|t| t.name() == s) {
            return Ok(*t);
        }
        MarkupKind::from_tag(s)
            .map(PromptTask::for_kind)
            .ok_or_else(|| SynthError::UnknownTask(s.into()))
    }
}

/// Uniform seeded draw from the task's pool.
pub fn sample_prompt(task: &str, seed: u64) -> Result<&'static str, SynthError> {
    let task: PromptTask = task.parse()?;
    let pool = task.pool();
    Ok(pool[rng_for(seed).random_range(0..pool.len())])
}
