//! Timed words and validated sessions.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Slack allowed when checking that consecutive words do not overlap.
pub const OVERLAP_TOLERANCE_S: f64 = 1e-6;

/// Offset applied to the later of two words sharing a start time.
pub const TIE_NUDGE_S: f64 = 1e-6;

/// Lowercases and strips leading/trailing non-alphanumeric characters.
/// Internal punctuation such as apostrophes is kept.
pub fn normalize_word(raw: &str) -> String {
    raw.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WordToken {
    pub word: String,
    pub start_s: f64,
    pub duration_s: f64,
    pub confidence: f64,
}

impl WordToken {
    /// Normalizes `raw_word` and checks the timing invariants.
    pub fn new(raw_word: &str, start_s: f64, duration_s: f64, confidence: f64) -> Result<Self> {
        let word = normalize_word(raw_word);
        if word.is_empty() {
            return Err(Error::validation(alloc::format!(
                "word {raw_word:?} is empty after normalization"
            )));
        }
        if !start_s.is_finite() || start_s < 0.0 {
            return Err(Error::validation(alloc::format!(
                "start time {start_s} of {word:?} must be finite and >= 0"
            )));
        }
        if !duration_s.is_finite() || duration_s <= 0.0 {
            return Err(Error::validation(alloc::format!(
                "duration {duration_s} of {word:?} must be finite and > 0"
            )));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::validation(alloc::format!(
                "confidence {confidence} of {word:?} must lie in [0, 1]"
            )));
        }
        Ok(Self {
            word,
            start_s,
            duration_s,
            confidence,
        })
    }

    pub fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

/// Sorts tokens by start time and enforces strict ordering without overlap.
///
/// Equal start times keep their input order and the later token is moved
/// forward by [`TIE_NUDGE_S`].
pub fn order_tokens(mut tokens: Vec<WordToken>) -> Result<Vec<WordToken>> {
    tokens.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    for i in 1..tokens.len() {
        let prev_start = tokens[i - 1].start_s;
        if tokens[i].start_s <= prev_start {
            tokens[i].start_s = prev_start + TIE_NUDGE_S;
        }
        let prev_end = tokens[i - 1].end_s();
        if tokens[i].start_s < prev_end - OVERLAP_TOLERANCE_S {
            return Err(Error::validation(alloc::format!(
                "word {:?} at {}s overlaps {:?} ending at {}s",
                tokens[i].word,
                tokens[i].start_s,
                tokens[i - 1].word,
                prev_end
            )));
        }
    }
    Ok(tokens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Label {
    #[cfg_attr(feature = "serde", serde(rename = "AD"))]
    Ad,
    #[cfg_attr(feature = "serde", serde(rename = "HC"))]
    Hc,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Ad, Label::Hc];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ad => "AD",
            Label::Hc => "HC",
        }
    }

    /// AD is the positive class of the classifier.
    pub fn is_positive(self) -> bool {
        self == Label::Ad
    }

    pub fn from_positive(positive: bool) -> Self {
        if positive {
            Label::Ad
        } else {
            Label::Hc
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "AD" => Ok(Label::Ad),
            "HC" => Ok(Label::Hc),
            other => Err(Error::validation(alloc::format!(
                "unknown label {other:?} (expected AD or HC)"
            ))),
        }
    }
}

/// Name given to sessions whose manifest does not declare a corpus.
pub const DEFAULT_CORPUS: &str = "default";

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecord {
    pub session_id: String,
    pub speaker_id: String,
    pub label: Label,
    /// Corpus tag used to select training and test data in mixed runs.
    pub corpus: String,
    pub tokens: Vec<WordToken>,
}

impl SessionRecord {
    pub fn new(
        session_id: impl Into<String>,
        speaker_id: impl Into<String>,
        label: Label,
        tokens: Vec<WordToken>,
    ) -> Result<Self> {
        Ok(Self {
            session_id: session_id.into(),
            speaker_id: speaker_id.into(),
            label,
            corpus: DEFAULT_CORPUS.to_string(),
            tokens: order_tokens(tokens)?,
        })
    }

    pub fn with_corpus(mut self, corpus: impl Into<String>) -> Self {
        self.corpus = corpus.into();
        self
    }
}
