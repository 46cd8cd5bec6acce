//! Bundled default registry, AoA fixture and synthetic word vectors.

use attnpath_core::features::{AoaTable, WordVectorTable};
use attnpath_core::synth::{synthetic_word_vectors, FILLER_WORDS};
use attnpath_core::AoiRegistry;

use crate::error::Result;
use crate::registry_io::load_registry;
use crate::tables::{parse_aoa, parse_word_vectors, write_word_vectors};

pub const REGISTRY_TSV: &str = include_str!("../data/registry.tsv");
pub const AOA_TSV: &str = include_str!("../data/aoa.tsv");

/// Dimension of the generated stand-in vectors (GloVe's size).
pub const DEFAULT_WV_DIM: usize = 300;
const WV_SEED: u64 = 0x5EED_0FA7_7E00;

pub fn default_registry() -> AoiRegistry {
    load_registry(REGISTRY_TSV).expect("bundled registry is valid")
}

pub fn default_aoa() -> AoaTable {
    parse_aoa(AOA_TSV).expect("bundled AoA table is valid")
}

/// Clustered stand-in vectors for every lemma of `registry` plus the
/// filler words, passed through the text format so they match what a
/// written `vectors.txt` would load as.
pub fn default_word_vectors(registry: &AoiRegistry) -> Result<WordVectorTable> {
    let table = synthetic_word_vectors(registry, &FILLER_WORDS, DEFAULT_WV_DIM, WV_SEED)?;
    parse_word_vectors(&write_word_vectors(&table))
}
