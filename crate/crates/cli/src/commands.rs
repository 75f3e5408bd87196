use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use intervalrdf_core::dataset::{
    decode_dataset, encode_dataset_with_stats, read_dataset, record_width_bits, write_dataset, EncodeOptions,
    EncodedDataset, EncodingScheme,
};
use intervalrdf_core::hierarchy::{load_tbox, serialize_tbox, CodeTable, TBoxBuilder, TBoxEncoding};
use intervalrdf_core::materialize::{full_materialize, lite_materialize, MaterializationReport};
use intervalrdf_core::query::{answer, extract_results, parse_query, AnswerOptions, Query, QueryMode, RewriteForm};
use intervalrdf_core::rdf::ntriples::serialize_ntriples;
use intervalrdf_core::rdf::vocab::RDF_TYPE;
use intervalrdf_core::rdf::{Term, Triple};
use intervalrdf_testkit::lubm::QUERIES;
use intervalrdf_testkit::{gen_mini_lubm, MiniLubmSpec};

use crate::config::RunConfig;
use crate::input::{read_ntriples, read_text, split_schema, write_atomic};

fn table_line(t: &CodeTable) -> String {
    format!(
        "{} {} code-length {} residual {}",
        t.kind().name(),
        t.len(),
        t.code_length(),
        t.residual_pairs().len()
    )
}

fn build_tbox(cfg: &RunConfig, schema: &[Triple], aboxes: &[&[Triple]]) -> Result<TBoxEncoding> {
    let (axioms, _) = split_schema(schema.to_vec())?;
    let mut b = TBoxBuilder::new(axioms).max_width(cfg.max_width);
    for abox in aboxes {
        b.discover(abox.iter());
    }
    Ok(b.build()?)
}

pub fn encode_tbox(cfg: &RunConfig, schema: &Path, aboxes: &[std::path::PathBuf], out: &Path) -> Result<()> {
    let started = Instant::now();
    let schema = read_ntriples(schema, false)?;
    let mut instance = Vec::new();
    for path in aboxes {
        let (_, abox) = split_schema(read_ntriples(path, false)?)?;
        instance.push(abox);
    }
    let refs: Vec<&[Triple]> = instance.iter().map(Vec::as_slice).collect();
    let tbox = build_tbox(cfg, &schema, &refs)?;
    write_atomic(out, |mut w| serialize_tbox(&tbox, &mut w))?;
    println!("{}", table_line(tbox.concepts()));
    println!("{}", table_line(tbox.properties()));
    println!("domain-axioms {} range-axioms {}", tbox.domain_map().len(), tbox.range_map().len());
    eprintln!("#time encode-tbox {:.6}", started.elapsed().as_secs_f64());
    Ok(())
}

fn encode_options(cfg: &RunConfig, scheme: EncodingScheme) -> EncodeOptions {
    EncodeOptions {
        partitions: cfg.partitions(),
        scheme,
        broadcast_threshold: cfg.broadcast_threshold,
    }
}

pub fn encode(cfg: &RunConfig, abox: &Path, tbox: Option<&Path>, out: &Path, sae: bool, lenient: bool) -> Result<()> {
    let (axioms, triples) = split_schema(read_ntriples(abox, lenient)?)?;
    let tbox = match tbox {
        Some(path) => {
            if !axioms.is_empty() {
                eprintln!("warning: ignoring {} schema triples in {}", axioms.len(), abox.display());
            }
            let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            load_tbox(BufReader::new(file)).with_context(|| format!("loading {}", path.display()))?
        }
        None => {
            let mut b = TBoxBuilder::new(axioms).max_width(cfg.max_width);
            b.discover(&triples);
            b.build()?
        }
    };
    let scheme = if sae { EncodingScheme::Sae } else { EncodingScheme::Obe };
    let (ds, stats) = encode_dataset_with_stats(&triples, Arc::new(tbox), &encode_options(cfg, scheme))?;
    write_dataset(&ds, out)?;
    println!(
        "scheme {} input {} triples {} distinct-terms {} partitions {} join {:?}",
        scheme.name(),
        stats.input_triples,
        stats.output_triples,
        stats.distinct_terms,
        ds.partitions().len(),
        stats.join
    );
    let secs = stats.duration.as_secs_f64();
    eprintln!("#time encode {} {secs:.6} {:.0}", scheme.name(), throughput(stats.input_triples, secs));
    Ok(())
}

fn throughput(n: usize, secs: f64) -> f64 {
    if secs > 0.0 {
        n as f64 / secs
    } else {
        0.0
    }
}

fn load(dir: &Path) -> Result<EncodedDataset> {
    read_dataset(dir).with_context(|| format!("loading dataset {}", dir.display()))
}

fn run_materialization(ds: &EncodedDataset, full: bool) -> Result<(EncodedDataset, MaterializationReport)> {
    Ok(if full { full_materialize(ds)? } else { lite_materialize(ds)? })
}

pub fn materialize(dataset: &Path, full: bool, out: &Path) -> Result<()> {
    let ds = load(dataset)?;
    let (closed, report) = run_materialization(&ds, full)?;
    write_dataset(&closed, out)?;
    println!("{report}");
    eprintln!("#time materialize {} {:.6}", report.mode.name(), report.duration.as_secs_f64());
    Ok(())
}

fn term_cell(t: &Term) -> String {
    t.to_string()
}

fn rows_of(q: &Query, ds: &EncodedDataset, mode: QueryMode, opts: &AnswerOptions) -> Result<(Vec<Vec<Term>>, usize, f64)> {
    let started = Instant::now();
    let a = answer(q, ds, mode, opts)?;
    let secs = started.elapsed().as_secs_f64();
    let mut rows = extract_results(&a.results, ds)?;
    rows.sort();
    if q.distinct {
        rows.dedup();
    }
    Ok((rows, a.branches, secs))
}

pub fn query(dataset: &Path, query: &Path, mode: QueryMode, simplify: bool, union: bool, explain: bool) -> Result<()> {
    let q = parse_query(&read_text(query)?)?;
    let ds = load(dataset)?;
    let opts = AnswerOptions {
        simplify_empty: simplify,
        rewrite_form: if union { RewriteForm::Union } else { RewriteForm::Disjunctive },
    };
    if explain {
        eprintln!("{}", answer(&q, &ds, mode, &opts)?.plan.root);
    }
    let (rows, branches, secs) = rows_of(&q, &ds, mode, &opts)?;
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let header: Vec<String> = q.projection.iter().map(|v| format!("?{v}")).collect();
    writeln!(w, "{}", header.join("\t"))?;
    for row in &rows {
        let cells: Vec<String> = row.iter().map(term_cell).collect();
        writeln!(w, "{}", cells.join("\t"))?;
    }
    w.flush()?;
    eprintln!("#branches {branches}");
    eprintln!("#rows {}", rows.len());
    eprintln!("#time query {} {secs:.6}", mode.name());
    Ok(())
}

pub fn decode(dataset: &Path) -> Result<()> {
    let ds = load(dataset)?;
    let mut triples = decode_dataset(&ds)?;
    triples.sort();
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    serialize_ntriples(&mut w, &triples)?;
    w.flush()?;
    Ok(())
}

pub fn stats(dataset: &Path) -> Result<()> {
    let ds = load(dataset)?;
    let type_id = ds.tbox().type_id();
    let sizes: Vec<String> = ds.partitions().iter().map(|p| p.len().to_string()).collect();
    println!("scheme {}", ds.scheme().name());
    println!("triples {}", ds.len());
    println!("type-triples {}", ds.triples().filter(|t| t.p == type_id).count());
    println!("partitions {}", ds.partitions().len());
    println!("partition-sizes {}", sizes.join(","));
    println!("record-width {}", record_width_bits(&ds));
    println!("{}", table_line(ds.tbox().concepts()));
    println!("{}", table_line(ds.tbox().properties()));
    println!("individuals {}", ds.individuals().len());
    Ok(())
}

pub fn benchmark(cfg: &RunConfig, schema: &Path, abox: &Path, queries: &[std::path::PathBuf], repeat: usize) -> Result<()> {
    let schema = read_ntriples(schema, false)?;
    let (extra, triples) = split_schema(read_ntriples(abox, false)?)?;
    let mut all_schema = schema;
    all_schema.extend(extra.iter().map(|a| a.to_triple()));
    let type_share = triples.iter().filter(|t| t.p.lexical() == RDF_TYPE).count() as f64 / triples.len().max(1) as f64;
    println!(
        "#input triples {} type-share {:.3} partitions {}",
        triples.len(),
        type_share,
        cfg.partitions()
    );

    let started = Instant::now();
    let tbox = Arc::new(build_tbox(cfg, &all_schema, &[&triples])?);
    println!("#time encode-tbox {:.6}", started.elapsed().as_secs_f64());

    let mut raw = None;
    for _ in 0..repeat {
        for scheme in [EncodingScheme::Sae, EncodingScheme::Obe] {
            let (ds, stats) = encode_dataset_with_stats(&triples, tbox.clone(), &encode_options(cfg, scheme))?;
            let secs = stats.duration.as_secs_f64();
            println!("#time encode {} {secs:.6} {:.0}", scheme.name(), throughput(triples.len(), secs));
            if scheme == EncodingScheme::Obe {
                raw = Some(ds);
            }
        }
    }
    let raw = raw.expect("repeat is at least 1");
    let (mut lite, mut full) = (None, None);
    for _ in 0..repeat {
        let (l, report) = lite_materialize(&raw)?;
        println!("#time materialize {report}");
        let (f, report) = full_materialize(&raw)?;
        println!("#time materialize {report}");
        lite = Some(l);
        full = Some(f);
    }
    let (lite, full) = (lite.expect("ran"), full.expect("ran"));

    let named: Vec<(String, String)> = if queries.is_empty() {
        QUERIES.iter().map(|(n, q)| (n.to_string(), q.to_string())).collect()
    } else {
        queries
            .iter()
            .map(|p| Ok((p.file_stem().unwrap_or_default().to_string_lossy().into_owned(), read_text(p)?)))
            .collect::<Result<_>>()?
    };
    let mut mismatches = Vec::new();
    for (name, text) in &named {
        let q = parse_query(text).with_context(|| format!("query {name}"))?;
        let mut results: Vec<BTreeSet<Vec<Term>>> = Vec::new();
        for (mode, ds) in [(QueryMode::LiteMat, &lite), (QueryMode::Direct, &full), (QueryMode::Rewrite, &raw)] {
            let mut last = None;
            for _ in 0..repeat {
                let (rows, branches, secs) = rows_of(&q, ds, mode, &AnswerOptions::default())?;
                println!("#time query {name} {} {secs:.6} rows {} branches {branches}", mode.name(), rows.len());
                last = Some(rows);
            }
            results.push(last.expect("ran").into_iter().collect());
        }
        if results.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(name.clone());
        }
    }
    if !mismatches.is_empty() {
        bail!("result sets differ across modes for {}", mismatches.join(", "));
    }
    Ok(())
}

pub fn generate(spec: MiniLubmSpec, out: &Path) -> Result<()> {
    let g = gen_mini_lubm(spec);
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join("schema.nt"), |w| w.write_all(g.schema_ntriples().as_bytes()))?;
    write_atomic(&out.join("abox.nt"), |w| w.write_all(g.abox_ntriples().as_bytes()))?;
    for (name, text) in QUERIES {
        write_atomic(&out.join(format!("{}.rq", name.to_lowercase())), |w| writeln!(w, "{text}"))?;
    }
    println!("schema {} axioms", g.axioms.len());
    println!("abox {} triples", g.abox.len());
    Ok(())
}
