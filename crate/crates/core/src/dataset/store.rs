//! On-disk layout of an encoded dataset directory:
//!
//! ```text
//! manifest.txt      format line, scheme, record width, file names, partition list
//! tbox.txt          the TBox encoding
//! dictionary.tsv    id<TAB>term, one line per individual id, ascending
//! part-00000.bin    little-endian fixed-width (s, p, o) records
//! ```
//!
//! Every file is written to a temporary file in the same directory and then
//! renamed; the manifest goes last, so a reader never sees a half-written
//! dataset.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use tempfile::NamedTempFile;

use super::dictionary::IndividualDictionary;
use super::encode::{EncodedDataset, EncodedTriple, EncodingScheme};
use super::DatasetError;
use crate::hierarchy::{load_tbox, serialize_tbox, Id};
use crate::rdf::parse_term;

pub const MANIFEST: &str = "manifest.txt";
const FORMAT_LINE: &str = "intervalrdf-dataset 1";
const TBOX_FILE: &str = "tbox.txt";
const DICTIONARY_FILE: &str = "dictionary.tsv";

/// Record width in bits: the widest code or 64, rounded up to whole bytes.
pub fn record_width_bits(ds: &EncodedDataset) -> u32 {
    ds.tbox().max_code_length().max(64).div_ceil(8) * 8
}

fn write_atomic<F>(dir: &Path, name: &str, body: F) -> Result<(), DatasetError>
where
    F: FnOnce(&mut BufWriter<&mut NamedTempFile>) -> std::io::Result<()>,
{
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(&mut tmp);
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| DatasetError::Io(e.error))?;
    Ok(())
}

pub fn write_dataset(ds: &EncodedDataset, dir: &Path) -> Result<(), DatasetError> {
    fs::create_dir_all(dir)?;
    let width_bytes = (record_width_bits(ds) / 8) as usize;
    write_atomic(dir, TBOX_FILE, |w| serialize_tbox(ds.tbox(), w))?;
    write_atomic(dir, DICTIONARY_FILE, |w| {
        for (id, term) in ds.individuals().iter() {
            writeln!(w, "{id}\t{term}")?;
        }
        Ok(())
    })?;
    let mut names = Vec::with_capacity(ds.partitions().len());
    for (i, part) in ds.partitions().iter().enumerate() {
        let name = format!("part-{i:05}.bin");
        write_atomic(dir, &name, |w| {
            for t in part {
                for v in [t.s, t.p, t.o] {
                    w.write_all(&v.to_le_bytes()[..width_bytes])?;
                }
            }
            Ok(())
        })?;
        names.push((name, part.len()));
    }
    write_atomic(dir, MANIFEST, |w| {
        writeln!(w, "{FORMAT_LINE}")?;
        writeln!(w, "scheme {}", ds.scheme().name())?;
        writeln!(w, "width {}", width_bytes * 8)?;
        writeln!(w, "tbox {TBOX_FILE}")?;
        writeln!(w, "dictionary {DICTIONARY_FILE}")?;
        writeln!(w, "partitions {}", names.len())?;
        for (name, count) in &names {
            writeln!(w, "part {name} {count}")?;
        }
        Ok(())
    })
}

struct Manifest {
    scheme: EncodingScheme,
    width_bits: u32,
    tbox: String,
    dictionary: String,
    parts: Vec<(String, usize)>,
}

fn bad(msg: impl Into<String>) -> DatasetError {
    DatasetError::Format(msg.into())
}

fn read_manifest(dir: &Path) -> Result<Manifest, DatasetError> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    let mut lines = text.lines();
    if lines.next() != Some(FORMAT_LINE) {
        return Err(bad("not a dataset manifest"));
    }
    let mut field = |key: &str| -> Result<String, DatasetError> {
        lines
            .next()
            .and_then(|l| l.strip_prefix(key))
            .and_then(|v| v.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(format!("manifest: expected `{key}`")))
    };
    let scheme = EncodingScheme::parse(&field("scheme")?).ok_or_else(|| bad("manifest: unknown scheme"))?;
    let width_bits: u32 = field("width")?.parse().map_err(|_| bad("manifest: bad width"))?;
    if width_bits == 0 || !width_bits.is_multiple_of(8) || width_bits > Id::BITS {
        return Err(bad(format!("manifest: unsupported record width {width_bits}")));
    }
    let tbox = field("tbox")?;
    let dictionary = field("dictionary")?;
    let count: usize = field("partitions")?.parse().map_err(|_| bad("manifest: bad partition count"))?;
    let parts = (0..count)
        .map(|_| {
            let line = field("part")?;
            let (name, n) = line.rsplit_once(' ').ok_or_else(|| bad("manifest: bad part line"))?;
            Ok((name.to_string(), n.parse().map_err(|_| bad("manifest: bad part size"))?))
        })
        .collect::<Result<_, DatasetError>>()?;
    Ok(Manifest {
        scheme,
        width_bits,
        tbox,
        dictionary,
        parts,
    })
}

fn read_dictionary(path: &Path) -> Result<IndividualDictionary, DatasetError> {
    let mut terms = Vec::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let (id, term) = line
            .split_once('\t')
            .ok_or_else(|| bad(format!("dictionary line {}: missing tab", n + 1)))?;
        if id.parse::<usize>().ok() != Some(n) {
            return Err(bad(format!("dictionary line {}: ids must be dense and ascending", n + 1)));
        }
        terms.push(parse_term(term).map_err(|e| bad(format!("dictionary line {}: {e}", n + 1)))?);
    }
    IndividualDictionary::from_terms(terms).map_err(|t| bad(format!("dictionary repeats {t}")))
}

fn read_partition(path: &Path, width_bytes: usize, expected: usize) -> Result<Vec<EncodedTriple>, DatasetError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let record = 3 * width_bytes;
    if bytes.len() != record * expected {
        return Err(bad(format!(
            "{}: expected {expected} records of {record} bytes, found {} bytes",
            path.display(),
            bytes.len()
        )));
    }
    let field = |b: &[u8]| {
        let mut buf = [0u8; 16];
        buf[..width_bytes].copy_from_slice(b);
        Id::from_le_bytes(buf)
    };
    Ok(bytes
        .chunks_exact(record)
        .map(|r| {
            EncodedTriple::new(
                field(&r[..width_bytes]),
                field(&r[width_bytes..2 * width_bytes]),
                field(&r[2 * width_bytes..]),
            )
        })
        .collect())
}

pub fn read_dataset(dir: &Path) -> Result<EncodedDataset, DatasetError> {
    let m = read_manifest(dir)?;
    let tbox = load_tbox(BufReader::new(File::open(dir.join(&m.tbox))?))?;
    if tbox.max_code_length() > m.width_bits {
        return Err(bad("record width is narrower than the TBox codes"));
    }
    let individuals = read_dictionary(&dir.join(&m.dictionary))?;
    let width_bytes = (m.width_bits / 8) as usize;
    let partitions = m
        .parts
        .iter()
        .map(|(name, n)| read_partition(&dir.join(name), width_bytes, *n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EncodedDataset::from_parts(Arc::new(tbox), Arc::new(individuals), partitions, m.scheme))
}
