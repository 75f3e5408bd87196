use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use intervalrdf_core::rdf::{extract_schema, parse_ntriples, AxiomKind, ParseMode, SchemaAxiom, Triple};
use tempfile::NamedTempFile;

pub fn read_ntriples(path: &Path, lenient: bool) -> Result<Vec<Triple>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mode = if lenient { ParseMode::Lenient } else { ParseMode::Strict };
    let mut reader = parse_ntriples(BufReader::new(file), mode);
    let triples = reader
        .by_ref()
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("reading {}", path.display()))?;
    if reader.skipped() > 0 {
        eprintln!("warning: {}: skipped {} malformed lines", path.display(), reader.skipped());
    }
    Ok(triples)
}

/// Separates schema statements from instance triples.
pub fn split_schema(triples: Vec<Triple>) -> Result<(Vec<SchemaAxiom>, Vec<Triple>)> {
    let (schema, abox): (Vec<Triple>, Vec<Triple>) = triples
        .into_iter()
        .partition(|t| AxiomKind::from_predicate(t.p.lexical()).is_some());
    Ok((extract_schema(&schema)?, abox))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(&mut tmp);
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
