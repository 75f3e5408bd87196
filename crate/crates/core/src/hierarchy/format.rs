//! Line-oriented text form of a [`TBoxEncoding`].
//!
//! ```text
//! concept <codeLength>
//! <value> <start> <localLength> <IRI>      one line per IRI, top-down
//! residual
//! <descendantId> <ancestorId>
//! property <codeLength>
//! ...entity lines...
//! residual
//! ...pairs...
//! domain
//! <propertyId> <conceptId>,<conceptId>,...
//! range
//! <propertyId> <conceptId>,...
//! ```
//!
//! All ids are decimal. The output is deterministic so encodings diff
//! cleanly.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};

use super::code::{low_mask, EntityCode, Id};
use super::table::{CodeEntry, CodeTable, HierarchyKind};
use super::tbox::{ConceptMap, TBoxEncoding};
use super::HierarchyError;

pub fn serialize_tbox<W: Write>(tbox: &TBoxEncoding, out: &mut W) -> std::io::Result<()> {
    for table in [tbox.concepts(), tbox.properties()] {
        writeln!(out, "{} {}", table.kind().name(), table.code_length())?;
        for e in table.entries() {
            for label in &e.labels {
                writeln!(out, "{} {} {} {}", e.code.value, e.code.start, e.code.local_length, label)?;
            }
        }
        writeln!(out, "residual")?;
        let mut pairs: Vec<_> = table.residual_pairs().iter().copied().collect();
        pairs.sort_unstable();
        for (d, a) in pairs {
            writeln!(out, "{d} {a}")?;
        }
    }
    for (name, map) in [("domain", tbox.domain_map()), ("range", tbox.range_map())] {
        writeln!(out, "{name}")?;
        for (p, cs) in map {
            let list: Vec<String> = cs.iter().map(Id::to_string).collect();
            writeln!(out, "{p} {}", list.join(","))?;
        }
    }
    Ok(())
}

pub fn serialize_tbox_string(tbox: &TBoxEncoding) -> String {
    let mut buf = Vec::new();
    serialize_tbox(tbox, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("IRIs are UTF-8")
}

enum Section {
    Start,
    Entities(usize),
    Residual(usize),
    Domain,
    Range,
}

struct PendingTable {
    kind: HierarchyKind,
    code_length: u32,
    entries: Vec<CodeEntry>,
    index: HashMap<Id, usize>,
    residual: HashSet<(Id, Id)>,
}

pub fn load_tbox<R: BufRead>(input: R) -> Result<TBoxEncoding, HierarchyError> {
    let mut tables: Vec<PendingTable> = Vec::new();
    let mut domain = ConceptMap::new();
    let mut range = ConceptMap::new();
    let mut section = Section::Start;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let fail = |msg: &str| HierarchyError::Format(format!("line {lineno}: {msg}"));
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let head = fields.next().unwrap_or("");
        let kind = match head {
            "concept" => Some(HierarchyKind::Concept),
            "property" => Some(HierarchyKind::Property),
            _ => None,
        };
        if let Some(kind) = kind {
            let expected = if tables.is_empty() { HierarchyKind::Concept } else { HierarchyKind::Property };
            if kind != expected || tables.len() >= 2 {
                return Err(fail("unexpected table header"));
            }
            let code_length: u32 = parse(fields.next(), &fail)?;
            if code_length == 0 || code_length > Id::BITS {
                return Err(fail("code length out of range"));
            }
            tables.push(PendingTable {
                kind,
                code_length,
                entries: Vec::new(),
                index: HashMap::new(),
                residual: HashSet::new(),
            });
            section = Section::Entities(tables.len() - 1);
            continue;
        }
        match (head, &section) {
            ("residual", Section::Entities(t)) => {
                section = Section::Residual(*t);
                continue;
            }
            ("domain", Section::Residual(1)) => {
                section = Section::Domain;
                continue;
            }
            ("range", Section::Domain) => {
                section = Section::Range;
                continue;
            }
            _ => {}
        }
        match &section {
            Section::Start => return Err(fail("expected a table header")),
            Section::Entities(t) => {
                let table = &mut tables[*t];
                let value: Id = parse(Some(head), &fail)?;
                let start: u32 = parse(fields.next(), &fail)?;
                let local_length: u32 = parse(fields.next(), &fail)?;
                let label = fields.next().ok_or_else(|| fail("missing IRI"))?;
                if label.is_empty() || fields.next().is_some() {
                    return Err(fail("expected `value start localLength IRI`"));
                }
                let code = EntityCode {
                    value,
                    start,
                    local_length,
                    code_length: table.code_length,
                };
                if local_length == 0 || start + local_length > table.code_length {
                    return Err(fail("segment does not fit the code length"));
                }
                if value & low_mask(code.shift()) != 0 || (code.shift() < Id::BITS && value >> (table.code_length - 1) >> 1 != 0) {
                    return Err(fail("value has bits outside its prefix"));
                }
                match table.index.get(&value) {
                    Some(&i) => {
                        if table.entries[i].code != code {
                            return Err(fail("alias disagrees with its code placement"));
                        }
                        table.entries[i].labels.push(label.to_string());
                    }
                    None => {
                        if table.entries.is_empty() && (value, start, local_length) != (0, 0, 1) {
                            return Err(fail("first entry must be the root"));
                        }
                        table.index.insert(value, table.entries.len());
                        table.entries.push(CodeEntry {
                            code,
                            labels: vec![label.to_string()],
                        });
                    }
                }
            }
            Section::Residual(t) => {
                let d: Id = parse(Some(head), &fail)?;
                let a: Id = parse(fields.next(), &fail)?;
                tables[*t].residual.insert((d, a));
            }
            Section::Domain | Section::Range => {
                let p: Id = parse(Some(head), &fail)?;
                let list = fields.next().ok_or_else(|| fail("missing concept list"))?;
                let set: BTreeSet<Id> = list
                    .split(',')
                    .map(|c| parse(Some(c), &fail))
                    .collect::<Result<_, _>>()?;
                let map = if matches!(section, Section::Domain) { &mut domain } else { &mut range };
                if map.insert(p, set).is_some() {
                    return Err(fail("duplicate property entry"));
                }
            }
        }
    }
    if !matches!(section, Section::Range) || tables.len() != 2 {
        return Err(HierarchyError::Format("truncated tbox encoding".into()));
    }
    let mut built = tables.into_iter().map(|t| CodeTable::from_parts(t.kind, t.code_length, t.entries, t.residual));
    let concepts = built.next().expect("two tables")?;
    let properties = built.next().expect("two tables")?;
    TBoxEncoding::from_parts(concepts, properties, domain, range)
}

fn parse<T: std::str::FromStr>(
    field: Option<&str>,
    fail: &dyn Fn(&str) -> HierarchyError,
) -> Result<T, HierarchyError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| fail("expected a decimal number"))
}
