//! Reference areas of interest and the words that elicit them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::token::normalize_word;

/// A circular picture region. Coordinates are pixels, origin top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct Aoi {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub lemmas: BTreeSet<String>,
}

impl Aoi {
    /// Builds an AOI, normalizing every lemma.
    pub fn new<I, S>(name: impl Into<String>, x: f64, y: f64, radius: f64, lemmas: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            name: name.into(),
            x,
            y,
            radius,
            lemmas: lemmas
                .into_iter()
                .map(|l| normalize_word(l.as_ref()))
                .filter(|l| !l.is_empty())
                .collect(),
        }
    }

    pub fn contains(&self, px: f64, py: f64) -> bool {
        let (dx, dy) = (px - self.x, py - self.y);
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Immutable, validated AOI inventory for one picture.
#[derive(Debug, Clone, PartialEq)]
pub struct AoiRegistry {
    canvas_w: f64,
    canvas_h: f64,
    aois: Vec<Aoi>,
    by_lemma: BTreeMap<String, usize>,
}

impl AoiRegistry {
    /// Validates geometry, name uniqueness and lemma disjointness.
    pub fn new(canvas_w: f64, canvas_h: f64, aois: Vec<Aoi>) -> Result<Self> {
        if !(canvas_w.is_finite() && canvas_w > 0.0 && canvas_h.is_finite() && canvas_h > 0.0) {
            return Err(Error::validation(alloc::format!(
                "canvas {canvas_w}x{canvas_h} must have positive finite size"
            )));
        }
        let mut names = BTreeSet::new();
        let mut by_lemma: BTreeMap<String, usize> = BTreeMap::new();
        for (idx, aoi) in aois.iter().enumerate() {
            if aoi.name.is_empty() {
                return Err(Error::validation("AOI name must not be empty"));
            }
            if !names.insert(aoi.name.as_str()) {
                return Err(Error::validation(alloc::format!(
                    "duplicate AOI name {:?}",
                    aoi.name
                )));
            }
            if !(aoi.radius.is_finite() && aoi.radius > 0.0) {
                return Err(Error::validation(alloc::format!(
                    "AOI {:?} has radius {} (must be > 0)",
                    aoi.name,
                    aoi.radius
                )));
            }
            if !(0.0..=canvas_w).contains(&aoi.x) || !(0.0..=canvas_h).contains(&aoi.y) {
                return Err(Error::validation(alloc::format!(
                    "AOI {:?} center ({}, {}) lies outside the {}x{} canvas",
                    aoi.name,
                    aoi.x,
                    aoi.y,
                    canvas_w,
                    canvas_h
                )));
            }
            if aoi.lemmas.is_empty() {
                return Err(Error::validation(alloc::format!(
                    "AOI {:?} has no lemmas",
                    aoi.name
                )));
            }
            for lemma in &aoi.lemmas {
                if let Some(&other) = by_lemma.get(lemma) {
                    return Err(Error::AmbiguousLemma {
                        lemma: lemma.clone(),
                        first: aois[other].name.clone(),
                        second: aoi.name.clone(),
                    });
                }
                by_lemma.insert(lemma.clone(), idx);
            }
        }
        Ok(Self {
            canvas_w,
            canvas_h,
            aois,
            by_lemma,
        })
    }

    pub fn canvas_w(&self) -> f64 {
        self.canvas_w
    }

    pub fn canvas_h(&self) -> f64 {
        self.canvas_h
    }

    pub fn aois(&self) -> &[Aoi] {
        &self.aois
    }

    pub fn len(&self) -> usize {
        self.aois.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aois.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Aoi> {
        self.aois.iter().find(|a| a.name == name)
    }

    /// The AOI whose lemma set contains `word`. `word` must already be normalized.
    pub fn lookup_word(&self, word: &str) -> Option<&Aoi> {
        self.by_lemma.get(word).map(|&i| &self.aois[i])
    }

    /// All lemmas across every AOI, sorted.
    pub fn lemma_union(&self) -> BTreeSet<String> {
        self.by_lemma.keys().cloned().collect()
    }

    /// Restricts every lemma set to `train_vocab`, dropping AOIs that end up
    /// with no lemmas. Geometry and AOI order are unchanged.
    pub fn filter(&self, train_vocab: &BTreeSet<String>) -> AoiRegistry {
        let aois: Vec<Aoi> = self
            .aois
            .iter()
            .filter_map(|aoi| {
                let lemmas: BTreeSet<String> =
                    aoi.lemmas.intersection(train_vocab).cloned().collect();
                (!lemmas.is_empty()).then(|| Aoi {
                    lemmas,
                    ..aoi.clone()
                })
            })
            .collect();
        let by_lemma = aois
            .iter()
            .enumerate()
            .flat_map(|(i, a)| a.lemmas.iter().map(move |l| (l.clone(), i)))
            .collect();
        AoiRegistry {
            canvas_w: self.canvas_w,
            canvas_h: self.canvas_h,
            aois,
            by_lemma,
        }
    }
}
