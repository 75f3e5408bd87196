mod commands;
mod config;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "intervalrdf", version, about = "Interval-encoded RDF: encode, materialize and query")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EncodeMode {
    Obe,
    Sae,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MaterializeMode {
    Lite,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QueryModeArg {
    Litemat,
    Rewrite,
    Direct,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode the concept and property hierarchies of a schema
    EncodeTbox {
        /// Schema triples (N-Triples)
        schema: PathBuf,
        /// Instance files scanned for predicates and types the schema lacks
        #[arg(long = "abox")]
        aboxes: Vec<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Dictionary-encode an ABox into a dataset directory
    Encode {
        abox: PathBuf,
        /// TBox encoding file; without one, the schema triples found in the
        /// input are encoded on the fly
        #[arg(long)]
        tbox: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = EncodeMode::Obe)]
        mode: EncodeMode,
        /// Skip malformed lines instead of failing
        #[arg(long)]
        lenient: bool,
    },
    /// Materialize the RDFS types of an encoded dataset
    Materialize {
        dataset: PathBuf,
        #[arg(long, value_enum)]
        mode: MaterializeMode,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Answer a SPARQL query over an encoded dataset
    Query {
        dataset: PathBuf,
        /// File holding the query text
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = QueryModeArg::Litemat)]
        mode: QueryModeArg,
        /// Drop scans that cannot match before running
        #[arg(long)]
        simplify: bool,
        /// Run rewritten queries as a union of conjunctive branches
        #[arg(long)]
        union: bool,
        /// Print the physical plan to the error stream
        #[arg(long)]
        explain: bool,
    },
    /// Print an encoded dataset as N-Triples
    Decode { dataset: PathBuf },
    /// Summarize an encoded dataset
    Stats { dataset: PathBuf },
    /// Time every pipeline stage on one input
    Benchmark {
        schema: PathBuf,
        abox: PathBuf,
        /// Query files; the four university queries by default
        #[arg(long = "query")]
        queries: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Write a synthetic university schema, ABox and the four queries
    Generate {
        #[arg(long, default_value_t = 1)]
        universities: usize,
        #[arg(long, default_value_t = 3)]
        departments: usize,
        #[arg(long, default_value_t = 10)]
        professors: usize,
        #[arg(long, default_value_t = 20)]
        students: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.config;
    let result = match cli.command {
        Command::EncodeTbox { schema, aboxes, out } => commands::encode_tbox(cfg, &schema, &aboxes, &out),
        Command::Encode {
            abox,
            tbox,
            out,
            mode,
            lenient,
        } => commands::encode(cfg, &abox, tbox.as_deref(), &out, matches!(mode, EncodeMode::Sae), lenient),
        Command::Materialize { dataset, mode, out } => {
            commands::materialize(&dataset, matches!(mode, MaterializeMode::Full), &out)
        }
        Command::Query {
            dataset,
            query,
            mode,
            simplify,
            union,
            explain,
        } => {
            let mode = match mode {
                QueryModeArg::Litemat => intervalrdf_core::query::QueryMode::LiteMat,
                QueryModeArg::Rewrite => intervalrdf_core::query::QueryMode::Rewrite,
                QueryModeArg::Direct => intervalrdf_core::query::QueryMode::Direct,
            };
            commands::query(&dataset, &query, mode, simplify, union, explain)
        }
        Command::Decode { dataset } => commands::decode(&dataset),
        Command::Stats { dataset } => commands::stats(&dataset),
        Command::Benchmark {
            schema,
            abox,
            queries,
            repeat,
        } => commands::benchmark(cfg, &schema, &abox, &queries, repeat.max(1)),
        Command::Generate {
            universities,
            departments,
            professors,
            students,
            seed,
            out,
        } => commands::generate(
            intervalrdf_testkit::MiniLubmSpec::new(universities, departments, professors, students, seed),
            &out,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
