//! The 68-value session descriptor.
//!
//! Layout (each feature contributes `mean, std, min, max` in that order):
//!
//! | columns | block | features |
//! |---------|-------|----------|
//! | 0..32   | AOI   | x_coordinate, y_coordinate, radius, time_spent, time_to_approach, number_of_visits, transition_time, pause_length |
//! | 32..40  | AoA   | mean_aoa, std_aoa |
//! | 40..68  | WV    | wv1 .. wv7 (PCA projections of word vectors) |
//!
//! Empty blocks (no fixations, no known words) are all zeros.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::pca::{PcaModel, DEFAULT_COMPONENTS};
use crate::registry::AoiRegistry;
use crate::scanpath::{build_scanpath, Scanpath};
use crate::stats::{flatten, summarize_stats};
use crate::token::{normalize_word, Label, SessionRecord, WordToken};

pub const STAT_NAMES: [&str; 4] = ["mean", "std", "min", "max"];

pub const AOI_FEATURES: [&str; 8] = [
    "aoi_x_coordinate",
    "aoi_y_coordinate",
    "aoi_radius",
    "aoi_time_spent",
    "aoi_time_to_approach",
    "aoi_number_of_visits",
    "aoi_transition_time",
    "aoi_pause_length",
];

pub const AOA_FEATURES: [&str; 2] = ["aoa_mean", "aoa_std"];

pub const AOI_BLOCK: Range<usize> = 0..32;
pub const AOA_BLOCK: Range<usize> = 32..40;
pub const WV_BLOCK: Range<usize> = 40..68;
pub const FEATURE_DIM: usize = 68;

/// Column names in layout order, e.g. `aoi_time_spent_mean` .. `wv7_max`.
pub fn feature_names() -> Vec<String> {
    let wv: Vec<String> = (1..=DEFAULT_COMPONENTS)
        .map(|i| alloc::format!("wv{i}"))
        .collect();
    AOI_FEATURES
        .iter()
        .map(|s| s.to_string())
        .chain(AOA_FEATURES.iter().map(|s| s.to_string()))
        .chain(wv)
        .flat_map(|f| STAT_NAMES.iter().map(move |s| alloc::format!("{f}_{s}")))
        .collect()
}

/// Normative age-of-acquisition per word, in years.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AoaTable {
    entries: BTreeMap<String, (f64, f64)>,
}

impl AoaTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a word; `mean_aoa` must be > 0 and `std_aoa` >= 0.
    pub fn insert(&mut self, word: &str, mean_aoa: f64, std_aoa: f64) -> Result<()> {
        let word = normalize_word(word);
        if word.is_empty() {
            return Err(Error::validation("AoA entry has an empty word"));
        }
        if !(mean_aoa.is_finite() && mean_aoa > 0.0 && std_aoa.is_finite() && std_aoa >= 0.0) {
            return Err(Error::validation(alloc::format!(
                "AoA entry {word:?} has mean {mean_aoa} / std {std_aoa}"
            )));
        }
        if self.entries.insert(word.clone(), (mean_aoa, std_aoa)).is_some() {
            return Err(Error::validation(alloc::format!("duplicate AoA entry {word:?}")));
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<(f64, f64)> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64, f64)> {
        self.entries.iter().map(|(w, &(m, s))| (w.as_str(), m, s))
    }
}

/// Fixed-dimension word embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectorTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl WordVectorTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<()> {
        let word = normalize_word(word);
        if word.is_empty() {
            return Err(Error::validation("word vector entry has an empty word"));
        }
        if vector.len() != self.dim {
            return Err(Error::WidthMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation(alloc::format!(
                "word vector for {word:?} has non-finite entries"
            )));
        }
        if self.vectors.insert(word.clone(), vector).is_some() {
            return Err(Error::validation(alloc::format!(
                "duplicate word vector for {word:?}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }
}

/// Which feature families are kept; masked blocks are zeroed so the
/// layout stays 68 wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureMask {
    pub aoi: bool,
    pub aoa: bool,
    pub wv: bool,
}

impl FeatureMask {
    pub const ALL: FeatureMask = FeatureMask {
        aoi: true,
        aoa: true,
        wv: true,
    };

    pub fn apply(&self, values: &mut [f64]) {
        let blocks = [(self.aoi, AOI_BLOCK), (self.aoa, AOA_BLOCK), (self.wv, WV_BLOCK)];
        for (keep, range) in blocks {
            if !keep {
                values[range].iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }
}

impl Default for FeatureMask {
    fn default() -> Self {
        Self::ALL
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::ALL {
            return f.write_str("all");
        }
        let parts: Vec<&str> = [(self.aoi, "aoi"), (self.aoa, "aoa"), (self.wv, "wv")]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, n)| *n)
            .collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for FeatureMask {
    type Err = Error;

    /// `all`, or families joined by `+`: `aoi`, `aoa+wv`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "all" {
            return Ok(Self::ALL);
        }
        let mut mask = FeatureMask {
            aoi: false,
            aoa: false,
            wv: false,
        };
        for part in s.split('+') {
            match part.trim() {
                "aoi" => mask.aoi = true,
                "aoa" => mask.aoa = true,
                "wv" => mask.wv = true,
                other => {
                    return Err(Error::validation(alloc::format!(
                        "unknown feature family {other:?} (expected aoi, aoa, wv or all)"
                    )))
                }
            }
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub session_id: String,
    pub speaker_id: String,
    pub label: Label,
    pub values: Vec<f64>,
}

/// 32 values: the four statistics of each AOI column over all fixations.
pub fn aoi_feature_block(path: &Scanpath) -> Vec<f64> {
    let rows: Vec<[f64; 8]> = path
        .fixations
        .iter()
        .map(|f| {
            [
                f.x,
                f.y,
                f.radius,
                f.time_spent_s,
                f.time_to_approach_s,
                f64::from(f.visit_index),
                f.transition_time_s,
                f.cumulative_pause_s,
            ]
        })
        .collect();
    flatten(&summarize_stats(&rows, 8))
}

/// 8 values: statistics of (mean_aoa, std_aoa) over every token found in
/// the table. Repeated words count once per occurrence.
pub fn aoa_feature_block(tokens: &[WordToken], table: &AoaTable) -> Vec<f64> {
    let rows: Vec<[f64; 2]> = tokens
        .iter()
        .filter_map(|t| table.get(&t.word))
        .map(|(m, s)| [m, s])
        .collect();
    flatten(&summarize_stats(&rows, 2))
}

/// `4 * pca.k()` values: statistics of each projected dimension over
/// every token found in the table.
pub fn wv_feature_block(
    tokens: &[WordToken],
    table: &WordVectorTable,
    pca: &PcaModel,
) -> Result<Vec<f64>> {
    let rows = tokens
        .iter()
        .filter_map(|t| table.get(&t.word))
        .map(|v| pca.project(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(flatten(&summarize_stats(&rows, pca.k())))
}

/// Everything a session's features depend on besides the session itself.
#[derive(Debug, Clone, Copy)]
pub struct FeatureContext<'a> {
    /// Should already be filtered to the training vocabulary.
    pub registry: &'a AoiRegistry,
    pub aoa: &'a AoaTable,
    pub vectors: &'a WordVectorTable,
    pub pca: &'a PcaModel,
    pub mask: FeatureMask,
}

/// Concatenates AOI(32), AoA(8) and WV(28) for one session.
pub fn assemble_feature_vector(
    session: &SessionRecord,
    ctx: &FeatureContext<'_>,
) -> Result<FeatureVector> {
    if ctx.pca.k() != DEFAULT_COMPONENTS {
        return Err(Error::WidthMismatch {
            expected: DEFAULT_COMPONENTS,
            found: ctx.pca.k(),
        });
    }
    let path = build_scanpath(session.session_id.as_str(), &session.tokens, ctx.registry);
    let mut values = aoi_feature_block(&path);
    values.extend(aoa_feature_block(&session.tokens, ctx.aoa));
    values.extend(wv_feature_block(&session.tokens, ctx.vectors, ctx.pca)?);
    debug_assert_eq!(values.len(), FEATURE_DIM);
    ctx.mask.apply(&mut values);
    Ok(FeatureVector {
        session_id: session.session_id.clone(),
        speaker_id: session.speaker_id.clone(),
        label: session.label,
        values,
    })
}

/// Unique words of `sessions` that have a vector, sorted.
pub fn vocabulary_vectors<'a>(
    words: impl IntoIterator<Item = &'a str>,
    table: &'a WordVectorTable,
) -> Vec<&'a [f64]> {
    let unique: alloc::collections::BTreeSet<&str> = words.into_iter().collect();
    unique.into_iter().filter_map(|w| table.get(w)).collect()
}

/// PCA fitted on the given vocabulary, or an all-zero model when none of
/// the words has a vector.
pub fn fit_vocabulary_pca<'a>(
    words: impl IntoIterator<Item = &'a str>,
    table: &'a WordVectorTable,
) -> Result<PcaModel> {
    let vecs = vocabulary_vectors(words, table);
    if vecs.is_empty() {
        return Ok(PcaModel::zeros(table.dim(), DEFAULT_COMPONENTS));
    }
    crate::pca::fit_pca(&vecs, DEFAULT_COMPONENTS)
}
