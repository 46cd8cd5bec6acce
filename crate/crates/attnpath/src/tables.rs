//! Age-of-acquisition TSV and text word vectors.

use std::fmt::Write as _;

use attnpath_core::features::{AoaTable, WordVectorTable};

use crate::error::{Error, Result};

/// `word<TAB>mean_aoa<TAB>std_aoa`; `#` comments allowed.
pub fn parse_aoa(text: &str) -> Result<AoaTable> {
    let mut table = AoaTable::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse("aoa", line, format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse("aoa", line, format!("{s:?} is not a number")))
        };
        table
            .insert(fields[0], num(fields[1])?, num(fields[2])?)
            .map_err(|e| Error::parse("aoa", line, e.to_string()))?;
    }
    Ok(table)
}

pub fn write_aoa(table: &AoaTable) -> String {
    let mut out = String::new();
    for (w, m, s) in table.iter() {
        let _ = writeln!(out, "{w}\t{m}\t{s}");
    }
    out
}

/// Header `<count> <dim>`, then `word v1 .. v_dim` per line.
pub fn parse_word_vectors(text: &str) -> Result<WordVectorTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse("word vectors", 1, "missing `<count> <dim>` header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse("word vectors", hline, format!("bad header {header:?}")))?;
    let [count, dim] = dims[..] else {
        return Err(Error::parse("word vectors", hline, "header must be `<count> <dim>`"));
    };

    let mut table = WordVectorTable::new(dim);
    for (line, content) in lines {
        let mut fields = content.split_whitespace();
        let word = fields.next().unwrap_or_default();
        let values = fields
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse("word vectors", line, "non-numeric component"))?;
        table
            .insert(word, values)
            .map_err(|e| Error::parse("word vectors", line, e.to_string()))?;
    }
    if table.len() != count {
        return Err(Error::parse(
            "word vectors",
            hline,
            format!("header declares {count} words, found {}", table.len()),
        ));
    }
    Ok(table)
}

/// Components are written with 6 decimals.
pub fn write_word_vectors(table: &WordVectorTable) -> String {
    let mut out = format!("{} {}\n", table.len(), table.dim());
    for (w, v) in table.iter() {
        out.push_str(w);
        for x in v {
            let _ = write!(out, " {x:.6}");
        }
        out.push('\n');
    }
    out
}
