//! Manifest-driven session loading and corpus directories on disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use attnpath_core::features::{AoaTable, WordVectorTable};
use attnpath_core::{AoiRegistry, SessionRecord};

use crate::ctm::{parse_ctm, serialize_ctm};
use crate::error::{Error, Result};
use crate::manifest::{parse_manifest, write_manifest, ManifestEntry};
use crate::output::StagedDir;
use crate::registry_io::write_registry;
use crate::tables::{write_aoa, write_word_vectors};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const REGISTRY_FILE: &str = "registry.tsv";
pub const AOA_FILE: &str = "aoa.tsv";
pub const VECTORS_FILE: &str = "vectors.txt";
pub const CTM_DIR: &str = "ctm";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Sessions in manifest order. CTM paths resolve against the manifest's
/// directory; a CTM shared by several sessions is read once.
pub fn load_corpus(manifest_path: &Path) -> Result<Vec<SessionRecord>> {
    let text = read_text(manifest_path)?;
    let entries = parse_manifest(&text).map_err(|e| Error::in_file(manifest_path, e))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut cache: BTreeMap<PathBuf, String> = BTreeMap::new();
    let mut sessions = Vec::with_capacity(entries.len());
    for entry in entries {
        let ctm_path = base.join(&entry.ctm_path);
        if !cache.contains_key(&ctm_path) {
            let text = read_text(&ctm_path)?;
            cache.insert(ctm_path.clone(), text);
        }
        let tokens = parse_ctm(&cache[&ctm_path], &entry.session_id)
            .map_err(|e| Error::in_file(&ctm_path, e))?;
        let record = SessionRecord::new(entry.session_id, entry.speaker_id, entry.label, tokens)
            .map_err(|e| Error::in_file(&ctm_path, e.into()))?
            .with_corpus(entry.corpus);
        sessions.push(record);
    }
    Ok(sessions)
}

/// Stages a self-contained corpus directory: manifest, one CTM per
/// session, and the registry and tables it was generated with.
pub fn stage_corpus(
    out: &StagedDir,
    sessions: &[SessionRecord],
    registry: &AoiRegistry,
    aoa: &AoaTable,
    vectors: &WordVectorTable,
) -> Result<()> {
    let mut entries = Vec::with_capacity(sessions.len());
    for s in sessions {
        let rel = format!("{CTM_DIR}/{}.ctm", s.session_id);
        out.write(&rel, serialize_ctm(&s.session_id, &s.tokens))?;
        entries.push(ManifestEntry {
            session_id: s.session_id.clone(),
            speaker_id: s.speaker_id.clone(),
            label: s.label,
            ctm_path: rel,
            corpus: s.corpus.clone(),
        });
    }
    out.write(MANIFEST_FILE, write_manifest(&entries)?)?;
    out.write(REGISTRY_FILE, write_registry(registry))?;
    out.write(AOA_FILE, write_aoa(aoa))?;
    out.write(VECTORS_FILE, write_word_vectors(vectors))?;
    Ok(())
}
