//! Session manifest: CSV with header `session_id,speaker_id,label,ctm_path`
//! and an optional trailing `corpus` column.

use std::collections::BTreeSet;

use attnpath_core::token::DEFAULT_CORPUS;
use attnpath_core::Label;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub session_id: String,
    pub speaker_id: String,
    pub label: Label,
    /// Relative paths resolve against the manifest's directory.
    pub ctm_path: String,
    pub corpus: String,
}

const REQUIRED: [&str; 4] = ["session_id", "speaker_id", "label", "ctm_path"];

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let with_corpus = match cols.as_slice() {
        [a, b, c, d] if [*a, *b, *c, *d] == REQUIRED => false,
        [a, b, c, d, "corpus"] if [*a, *b, *c, *d] == REQUIRED => true,
        _ => {
            return Err(Error::parse(
                "manifest",
                1,
                format!("header must be {} [,corpus], found {:?}", REQUIRED.join(","), cols),
            ))
        }
    };

    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let label: Label = field(2)
            .parse()
            .map_err(|e: attnpath_core::Error| Error::parse("manifest", line, e.to_string()))?;
        let entry = ManifestEntry {
            session_id: field(0),
            speaker_id: field(1),
            label,
            ctm_path: field(3),
            corpus: if with_corpus { field(4) } else { DEFAULT_CORPUS.to_string() },
        };
        for (name, value) in [
            ("session_id", &entry.session_id),
            ("speaker_id", &entry.speaker_id),
            ("ctm_path", &entry.ctm_path),
            ("corpus", &entry.corpus),
        ] {
            if value.is_empty() {
                return Err(Error::parse("manifest", line, format!("empty {name}")));
            }
        }
        if !seen.insert(entry.session_id.clone()) {
            return Err(Error::parse(
                "manifest",
                line,
                format!("duplicate session_id {:?}", entry.session_id),
            ));
        }
        entries.push(entry);
    }
    Ok(entries)
}

pub fn write_manifest(entries: &[ManifestEntry]) -> Result<String> {
    let with_corpus = entries.iter().any(|e| e.corpus != DEFAULT_CORPUS);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = REQUIRED.to_vec();
    if with_corpus {
        header.push("corpus");
    }
    writer.write_record(&header)?;
    for e in entries {
        let mut row = vec![
            e.session_id.as_str(),
            e.speaker_id.as_str(),
            e.label.as_str(),
            e.ctm_path.as_str(),
        ];
        if with_corpus {
            row.push(e.corpus.as_str());
        }
        writer.write_record(&row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Usage(format!("manifest buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
