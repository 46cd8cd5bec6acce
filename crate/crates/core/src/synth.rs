//! Deterministic synthetic picture-description corpus.
//!
//! All randomness comes from one [`SplitMix64`] stream seeded by
//! `CorpusSpec::seed` and consumed in a fixed order, so identical specs
//! produce identical corpora in any implementation of the generator.
//!
//! The last `hc_extra_aois` AOIs of the registry (in registry order) are
//! only ever described by HC sessions. AD sessions drop each remaining AOI
//! with probability `ad_visit_drop_prob` and stretch every inter-word gap
//! by `ad_pause_multiplier`. Times are whole centiseconds.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::WordVectorTable;
use crate::registry::AoiRegistry;
use crate::rng::SplitMix64;
use crate::token::{Label, SessionRecord, WordToken};

/// Probability that an HC session mentions a shared (non-extra) AOI.
const HC_KEEP_PROB: f64 = 0.9;
/// Probability of going back to an already described AOI after each visit.
const REVISIT_PROB: f64 = 0.2;
/// Probability that a gap is a long hesitation rather than a short one.
const LONG_GAP_PROB: f64 = 0.3;

/// Function words sprinkled between AOI words. Any that collide with a
/// registry lemma are skipped.
pub const FILLER_WORDS: [&str; 16] = [
    "the", "a", "and", "is", "uh", "um", "there", "he's", "she's", "on", "of", "it", "that",
    "over", "up", "going",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub n_speakers_per_class: usize,
    pub sessions_per_speaker: usize,
    pub seed: u64,
    pub hc_extra_aois: usize,
    pub ad_pause_multiplier: f64,
    pub ad_visit_drop_prob: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            n_speakers_per_class: 20,
            sessions_per_speaker: 2,
            seed: 42,
            hc_extra_aois: 2,
            ad_pause_multiplier: 2.5,
            ad_visit_drop_prob: 0.5,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self, registry: &AoiRegistry) -> Result<()> {
        if self.n_speakers_per_class == 0 || self.sessions_per_speaker == 0 {
            return Err(Error::validation("speaker and session counts must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.ad_visit_drop_prob) {
            return Err(Error::validation(alloc::format!(
                "ad_visit_drop_prob {} must lie in [0, 1]",
                self.ad_visit_drop_prob
            )));
        }
        if !(self.ad_pause_multiplier.is_finite() && self.ad_pause_multiplier >= 1.0) {
            return Err(Error::validation(alloc::format!(
                "ad_pause_multiplier {} must be >= 1",
                self.ad_pause_multiplier
            )));
        }
        if registry.is_empty() {
            return Err(Error::EmptyInput("generate_corpus registry"));
        }
        if self.hc_extra_aois > registry.len() {
            return Err(Error::validation(alloc::format!(
                "hc_extra_aois {} exceeds the {} registry AOIs",
                self.hc_extra_aois,
                registry.len()
            )));
        }
        Ok(())
    }
}

struct SessionWriter<'a> {
    rng: &'a mut SplitMix64,
    fillers: &'a [&'a str],
    gap_multiplier: f64,
    clock_cs: u64,
    tokens: Vec<WordToken>,
}

impl SessionWriter<'_> {
    fn gap_cs(&mut self) -> u64 {
        let base = if self.rng.chance(LONG_GAP_PROB) {
            self.rng.range_inclusive(50, 150)
        } else {
            self.rng.range_inclusive(5, 40)
        };
        libm::round(base as f64 * self.gap_multiplier).max(1.0) as u64
    }

    fn say(&mut self, word: &str) {
        if !self.tokens.is_empty() {
            self.clock_cs += self.gap_cs();
        }
        let duration = self.rng.range_inclusive(20, 60);
        let confidence = self.rng.range_inclusive(70, 100);
        let token = WordToken::new(
            word,
            self.clock_cs as f64 / 100.0,
            duration as f64 / 100.0,
            confidence as f64 / 100.0,
        )
        .expect("generated tokens satisfy the token invariants");
        self.tokens.push(token);
        self.clock_cs += duration;
    }

    fn filler(&mut self, max: u64) {
        if self.fillers.is_empty() {
            return;
        }
        for _ in 0..self.rng.range_inclusive(0, max) {
            let w = self.fillers[self.rng.below(self.fillers.len() as u64) as usize];
            self.say(w);
        }
    }
}

/// Generates `2 * n_speakers_per_class * sessions_per_speaker` sessions,
/// AD and HC speakers interleaved.
pub fn generate_corpus(spec: &CorpusSpec, registry: &AoiRegistry) -> Result<Vec<SessionRecord>> {
    spec.validate(registry)?;
    let mut rng = SplitMix64::new(spec.seed);
    let fillers: Vec<&str> = FILLER_WORDS
        .iter()
        .copied()
        .filter(|w| registry.lookup_word(w).is_none())
        .collect();
    let shared = registry.len() - spec.hc_extra_aois;
    let mut sessions = Vec::new();

    for speaker in 1..=spec.n_speakers_per_class {
        for label in [Label::Ad, Label::Hc] {
            let speaker_id = alloc::format!("{}-{speaker:03}", label.as_str().to_lowercase());
            for session in 1..=spec.sessions_per_speaker {
                let mut visits: Vec<usize> = (0..shared)
                    .filter(|_| match label {
                        Label::Hc => rng.chance(HC_KEEP_PROB),
                        Label::Ad => !rng.chance(spec.ad_visit_drop_prob),
                    })
                    .collect();
                if label == Label::Hc {
                    visits.extend(shared..registry.len());
                }
                rng.shuffle(&mut visits);

                let mut writer = SessionWriter {
                    rng: &mut rng,
                    fillers: &fillers,
                    gap_multiplier: if label == Label::Ad {
                        spec.ad_pause_multiplier
                    } else {
                        1.0
                    },
                    clock_cs: 0,
                    tokens: Vec::new(),
                };
                writer.clock_cs = writer.rng.range_inclusive(30, 150);
                let filler_max = if label == Label::Ad { 3 } else { 1 };
                for (i, &aoi_idx) in visits.iter().enumerate() {
                    writer.filler(filler_max);
                    say_aoi(&mut writer, registry, aoi_idx);
                    if i > 0 && writer.rng.chance(REVISIT_PROB) {
                        let back = visits[writer.rng.below(i as u64) as usize];
                        writer.filler(filler_max);
                        say_aoi(&mut writer, registry, back);
                    }
                }
                writer.filler(3);

                let tokens = writer.tokens;
                sessions.push(SessionRecord::new(
                    alloc::format!("{speaker_id}-{session}"),
                    speaker_id.clone(),
                    label,
                    tokens,
                )?);
            }
        }
    }
    Ok(sessions)
}

fn say_aoi(writer: &mut SessionWriter<'_>, registry: &AoiRegistry, aoi_idx: usize) {
    let lemmas = &registry.aois()[aoi_idx].lemmas;
    let pick = writer.rng.below(lemmas.len() as u64) as usize;
    let lemma = lemmas.iter().nth(pick).cloned().unwrap_or_default();
    writer.say(&lemma);
}

/// Clustered pseudo-embeddings: every lemma of one AOI sits near a shared
/// random center, and `extra_words` sit near one more center. Coordinates
/// are standard normal draws (Box-Muller).
pub fn synthetic_word_vectors(
    registry: &AoiRegistry,
    extra_words: &[&str],
    dim: usize,
    seed: u64,
) -> Result<WordVectorTable> {
    let mut rng = SplitMix64::new(seed);
    let mut gauss = move || {
        let u1 = 1.0 - rng.next_f64();
        let u2 = rng.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
    };
    let mut table = WordVectorTable::new(dim);
    let mut groups: Vec<Vec<String>> = registry
        .aois()
        .iter()
        .map(|a| a.lemmas.iter().cloned().collect())
        .collect();
    groups.push(
        extra_words
            .iter()
            .filter(|w| registry.lookup_word(w).is_none())
            .map(|w| String::from(*w))
            .collect(),
    );
    for group in groups {
        let center: Vec<f64> = (0..dim).map(|_| gauss()).collect();
        for word in group {
            let v = center.iter().map(|c| c + 0.35 * gauss()).collect();
            table.insert(&word, v)?;
        }
    }
    Ok(table)
}
