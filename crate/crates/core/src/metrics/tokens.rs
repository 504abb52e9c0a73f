//! Token accounting for packaged conversation records.
//!
//! Image tokens follow the tiling model: an image is cut into up to twelve
//! 448×448 tiles and each tile costs a fixed number of tokens.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_lengths, MetricError};
use crate::cot::ConversationRecord;

pub const MAX_TILES: u32 = 12;
pub const DEFAULT_TOKENS_PER_TILE: u64 = 256;

/// Counts tokens in text. Plug a model tokenizer in through this trait.
pub trait TextTokenizer {
    fn count(&self, text: &str) -> u64;
}

/// Runs of alphanumeric characters count as one token each; every other
/// non-whitespace character is a token of its own.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultTokenizer;

impl TextTokenizer for DefaultTokenizer {
    fn count(&self, text: &str) -> u64 {
        let mut n = 0;
        let mut in_word = false;
        for c in text.chars() {
            if c.is_alphanumeric() {
                if !in_word {
                    n += 1;
                }
                in_word = true;
            } else {
                in_word = false;
                if !c.is_whitespace() {
                    n += 1;
                }
            }
        }
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenCounts {
    pub image_tokens: u64,
    pub context_tokens: u64,
    pub qa_tokens: u64,
}

impl core::ops::Add for TokenCounts {
    type Output = TokenCounts;
    fn add(self, o: TokenCounts) -> TokenCounts {
        TokenCounts {
            image_tokens: self.image_tokens + o.image_tokens,
            context_tokens: self.context_tokens + o.context_tokens,
            qa_tokens: self.qa_tokens + o.qa_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordTokens {
    pub id: String,
    #[serde(flatten)]
    pub counts: TokenCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenReport {
    pub tokens_per_tile: u64,
    pub per_record: Vec<RecordTokens>,
    pub totals: TokenCounts,
}

impl TokenReport {
    /// Mean counts per record; zero for an empty report.
    pub fn means(&self) -> (f64, f64, f64) {
        let n = self.per_record.len();
        if n == 0 {
            return (0.0, 0.0, 0.0);
        }
        let n = n as f64;
        (
            self.totals.image_tokens as f64 / n,
            self.totals.context_tokens as f64 / n,
            self.totals.qa_tokens as f64 / n,
        )
    }
}

/// Image tokens are `tiles * tokens_per_tile`; context tokens count the
/// round-one answer without its frame; QA tokens count both questions and
/// the final answer.
pub fn token_stats(
    records: &[ConversationRecord],
    image_tile_counts: &[u32],
    tokens_per_tile: u64,
    tokenizer: &dyn TextTokenizer,
) -> Result<TokenReport, MetricError> {
    check_lengths(image_tile_counts.len(), records.len())?;
    if tokens_per_tile == 0 {
        return Err(MetricError::InvalidConfig("tokens_per_tile must be at least 1".into()));
    }
    if let Some((index, &tiles)) = image_tile_counts
        .iter()
        .enumerate()
        .find(|(_, t)| !(1..=MAX_TILES).contains(*t))
    {
        return Err(MetricError::TileOutOfRange { index, tiles });
    }
    let per_record: Vec<RecordTokens> = records
        .iter()
        .zip(image_tile_counts)
        .map(|(r, &tiles)| {
            let turns = r.conversations();
            RecordTokens {
                id: r.id().into(),
                counts: TokenCounts {
                    image_tokens: tiles as u64 * tokens_per_tile,
                    context_tokens: tokenizer.count(r.context()),
                    qa_tokens: tokenizer.count(&turns[0].text)
                        + tokenizer.count(&turns[2].text)
                        + tokenizer.count(&turns[3].text),
                },
            }
        })
        .collect();
    let totals = per_record.iter().fold(TokenCounts::default(), |acc, r| acc + r.counts);
    Ok(TokenReport {
        tokens_per_tile,
        per_record,
        totals,
    })
}
