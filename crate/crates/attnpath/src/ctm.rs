//! Time-marked word files: `utt_id channel start dur word [conf]`.

use std::fmt::Write as _;

use attnpath_core::token::order_tokens;
use attnpath_core::WordToken;

use crate::error::{Error, Result};

/// Tokens of `session_id`, normalized and sorted by start time.
///
/// Every line is validated, including lines of other utterances; a single
/// malformed line rejects the whole file. Missing confidence is 1.0.
pub fn parse_ctm(text: &str, session_id: &str) -> Result<Vec<WordToken>> {
    let mut tokens = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if !(5..=6).contains(&fields.len()) {
            return Err(Error::parse(
                "ctm",
                line,
                format!("expected 5 or 6 fields, found {}", fields.len()),
            ));
        }
        let number = |i: usize, name: &str| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse("ctm", line, format!("{name} {:?} is not a number", fields[i])))
        };
        let start = number(2, "start")?;
        let duration = number(3, "duration")?;
        let confidence = if fields.len() == 6 { number(5, "confidence")? } else { 1.0 };
        if duration <= 0.0 {
            return Err(Error::parse("ctm", line, format!("duration {duration} must be > 0")));
        }
        let token = WordToken::new(fields[4], start, duration, confidence)
            .map_err(|e| Error::parse("ctm", line, e.to_string()))?;
        if fields[0] == session_id {
            tokens.push(token);
        }
    }
    Ok(order_tokens(tokens)?)
}

/// One line per token, channel 1, shortest round-trip number formatting.
pub fn serialize_ctm(session_id: &str, tokens: &[WordToken]) -> String {
    let mut out = String::new();
    for t in tokens {
        let _ = writeln!(
            out,
            "{session_id} 1 {} {} {} {}",
            t.start_s, t.duration_s, t.word, t.confidence
        );
    }
    out
}
