//! Pseudo-scanpaths: one fixation per word that names an AOI.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::registry::AoiRegistry;
use crate::token::WordToken;

/// Field order is part of the JSON-lines debug format.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Fixation {
    pub aoi_name: String,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    /// Duration of the eliciting word.
    pub time_spent_s: f64,
    /// Start time of the eliciting word.
    pub time_to_approach_s: f64,
    /// 1 for the first fixation on this AOI, 2 for the second, ...
    pub visit_index: u32,
    /// Gap between the end of the previous fixation (or t = 0) and this one.
    pub transition_time_s: f64,
    /// Sum of silent inter-word gaps up to this fixation's word.
    pub cumulative_pause_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scanpath {
    pub session_id: String,
    pub fixations: Vec<Fixation>,
}

impl Scanpath {
    pub fn len(&self) -> usize {
        self.fixations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixations.is_empty()
    }

    pub fn total_time_spent(&self) -> f64 {
        self.fixations.iter().map(|f| f.time_spent_s).sum()
    }
}

/// Builds the scanpath of a time-ordered token stream.
///
/// Pauses are measured over every token, matched or not; silence before
/// the first token does not count as a pause.
pub fn build_scanpath(
    session_id: impl Into<String>,
    tokens: &[WordToken],
    registry: &AoiRegistry,
) -> Scanpath {
    let mut fixations: Vec<Fixation> = Vec::new();
    let mut visits: BTreeMap<&str, u32> = BTreeMap::new();
    let mut cumulative_pause = 0.0;
    let mut prev_fixation_end = 0.0;

    for (i, token) in tokens.iter().enumerate() {
        if i > 0 {
            let gap = token.start_s - tokens[i - 1].end_s();
            if gap > 0.0 {
                cumulative_pause += gap;
            }
        }
        let Some(aoi) = registry.lookup_word(&token.word) else {
            continue;
        };
        let visit = visits.entry(aoi.name.as_str()).or_insert(0);
        *visit += 1;
        fixations.push(Fixation {
            aoi_name: aoi.name.clone(),
            x: aoi.x,
            y: aoi.y,
            radius: aoi.radius,
            time_spent_s: token.duration_s,
            time_to_approach_s: token.start_s,
            visit_index: *visit,
            // Tokens may touch within the overlap tolerance.
            transition_time_s: (token.start_s - prev_fixation_end).max(0.0),
            cumulative_pause_s: cumulative_pause,
        });
        prev_fixation_end = token.end_s();
    }

    Scanpath {
        session_id: session_id.into(),
        fixations,
    }
}

/// Total number of fixations per AOI.
pub fn visit_counts(path: &Scanpath) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for f in &path.fixations {
        *counts.entry(f.aoi_name.clone()).or_insert(0) += 1;
    }
    counts
}
