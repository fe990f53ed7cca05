use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use uidx::corpus::{ingest, load_queries, IngestOptions, ParseMode, QueryKind, Stopwords, DEFAULT_MARKER};
use uidx::postings::{IndexImage, Params, Representation};
use uidx::query::{translate, Algorithm, Engine};
use uidx::synth::{generate, generate_queries, SynthConfig};

mod bench;

/// Compressed inverted indexes for versioned text collections
#[derive(Parser, Debug)]
#[command(name = "uidx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an index image from a corpus file
    Build(BuildArgs),
    /// Run a query file against an index, one result line per query
    Query(QueryArgs),
    /// Time query sets against one or more indexes
    Bench(bench::BenchArgs),
    /// Print the size breakdown and parameters of an index
    Stats(StatsArgs),
    /// Write a synthetic versioned corpus
    Synth(SynthArgs),
    /// Sample a query file from a corpus
    GenQueries(GenQueriesArgs),
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// Parsing mode: `nonpos` (document lists) or `pos` (word positions)
    #[arg(long, default_value = "nonpos")]
    mode: ParseMode,

    /// Stopword file, one word per line, or `none`.
    /// Defaults to a built-in English list in nonpos mode and to none in pos mode.
    #[arg(long)]
    stopwords: Option<String>,

    /// Line that separates documents in the corpus file
    #[arg(long, default_value = DEFAULT_MARKER)]
    marker: String,
}

impl ParseArgs {
    fn options(&self) -> Result<IngestOptions> {
        let mut opts = IngestOptions::new(self.mode).with_marker(self.marker.clone());
        match self.stopwords.as_deref() {
            None => {}
            Some("none") => opts = opts.with_stopwords(Stopwords::none()),
            Some(path) => {
                let sw = Stopwords::load(path).with_context(|| format!("reading stopwords from {path}"))?;
                opts = opts.with_stopwords(sw);
            }
        }
        Ok(opts)
    }
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Corpus file (UTF-8, documents separated by the marker line)
    #[arg(long, short)]
    input: PathBuf,

    /// Where to write the index image
    #[arg(long, short)]
    output: PathBuf,

    #[command(flatten)]
    parse: ParseArgs,

    /// List representation
    #[arg(long, default_value = "repair-skip")]
    repr: Representation,

    /// CM sampling: one sample every k*ceil(log2 len) entries
    #[arg(long, default_value_t = Params::default().k)]
    k: u32,

    /// ST sampling: about one sample every B entries
    #[arg(long = "B", default_value_t = Params::default().st_b)]
    st_b: u32,

    /// Rice parameter: a bit count (0 to 31) or `auto` to choose one per list
    #[arg(long, default_value = "auto", value_parser = parse_rice_b)]
    rice_b: RiceB,

    /// Sampling period of the LZ-End phrase boundaries
    #[arg(long, default_value_t = Params::default().ds)]
    ds: u32,
}

#[derive(Clone, Copy, Debug)]
struct RiceB(Option<u8>);

fn parse_rice_b(s: &str) -> std::result::Result<RiceB, String> {
    if s == "auto" {
        return Ok(RiceB(None));
    }
    match s.parse::<u8>() {
        Ok(b) if b <= 31 => Ok(RiceB(Some(b))),
        _ => Err(format!("expected `auto` or an integer in 0..=31, got `{s}`")),
    }
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,

    /// Query file, one query per line
    #[arg(long)]
    queries: PathBuf,

    /// Query kind: word-low, word-high, and, phrase
    #[arg(long, default_value = "and")]
    kind: QueryKind,

    /// Intersection algorithm (default depends on the representation)
    #[arg(long)]
    algorithm: Option<Algorithm>,

    /// Print at most this many matches per query (the count is always exact)
    #[arg(long, default_value_t = 10)]
    max_results: usize,

    /// Report positional matches as doc:offset instead of global positions
    #[arg(long)]
    translate: bool,

    /// Evaluate queries on all cores (each query stays on one thread)
    #[arg(long)]
    parallel: bool,

    /// Override the long/short length ratio below which svs merges instead
    #[arg(long)]
    svs_threshold: Option<usize>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    index: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = SynthConfig::default().articles)]
    articles: usize,
    #[arg(long, default_value_t = SynthConfig::default().versions)]
    versions: usize,
    #[arg(long, default_value_t = SynthConfig::default().article_len)]
    article_len: usize,
    #[arg(long, default_value_t = SynthConfig::default().vocab_size)]
    vocab_size: usize,
    /// Expected fraction of tokens edited between consecutive versions
    #[arg(long, default_value_t = SynthConfig::default().mutation_rate)]
    mutation_rate: f64,
    #[arg(long, default_value_t = SynthConfig::default().seed)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenQueriesArgs {
    /// Corpus file the queries are drawn from
    #[arg(long)]
    corpus: PathBuf,

    #[arg(long, short)]
    output: PathBuf,

    #[command(flatten)]
    parse: ParseArgs,

    #[arg(long, default_value = "and")]
    kind: QueryKind,

    #[arg(long, default_value_t = 1000)]
    count: usize,

    /// Terms per conjunctive or phrase query
    #[arg(long, default_value_t = 2)]
    terms: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Synth(a) => cmd_synth(a),
        Command::GenQueries(a) => cmd_gen_queries(a),
    }
}

fn read_corpus(path: &Path, parse: &ParseArgs) -> Result<(IngestOptions, uidx::corpus::Corpus, uidx::corpus::Vocabulary)> {
    let opts = parse.options()?;
    let raw = fs::read_to_string(path).with_context(|| format!("reading corpus {}", path.display()))?;
    let (corpus, vocab) = ingest(&raw, &opts)?;
    Ok((opts, corpus, vocab))
}

fn load_index(path: &Path) -> Result<IndexImage> {
    IndexImage::load(path).with_context(|| format!("loading index {}", path.display()))
}

fn cmd_build(a: BuildArgs) -> Result<()> {
    a.repr.supports(a.parse.mode)?;
    let (opts, corpus, vocab) = read_corpus(&a.input, &a.parse)?;
    let params = Params {
        k: a.k,
        st_b: a.st_b,
        rice_b: a.rice_b.0,
        ds: a.ds,
    };
    let mut image = IndexImage::build(&corpus, &vocab, a.repr, &params)?;
    image.stopwords = opts.stopwords;
    image.save(&a.output).with_context(|| format!("writing {}", a.output.display()))?;

    println!("representation {}", image.repr);
    println!("mode           {}", image.mode);
    println!("documents      {}", corpus.num_docs());
    println!("terms          {}", vocab.len());
    println!("lists          {}", image.list_count());
    println!("u              {}", image.universe);
    if let Some((c_len, rules)) = image.repair_stats() {
        println!("n'             {c_len}");
        println!("rules          {rules}");
    }
    println!("index bytes    {}", image.index_bytes());
    println!("space_pct      {:.3}", image.space_pct());
    Ok(())
}

fn cmd_query(a: QueryArgs) -> Result<()> {
    let image = load_index(&a.index)?;
    let algorithm = a.algorithm.unwrap_or_else(|| Algorithm::default_for(image.repr));
    let mut engine = Engine::new(&image, algorithm)?;
    if let Some(t) = a.svs_threshold {
        engine = engine.with_svs_threshold(t);
    }
    let set = load_queries(&a.queries, a.kind, &image.vocab, image.mode, &image.stopwords)
        .with_context(|| format!("reading queries {}", a.queries.display()))?;
    let results = if a.parallel {
        engine.run_batch(&set)?
    } else {
        engine.run_batch_sequential(&set)?
    };
    if a.translate && image.mode != ParseMode::Positional {
        bail!("--translate needs a positional index");
    }

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for (n, r) in results.iter().enumerate() {
        let shown = &r.values[..r.values.len().min(a.max_results)];
        write!(out, "{}\t{}\t", n + 1, r.values.len())?;
        if a.translate {
            let pairs = translate(shown, &image.doc_starts, image.universe as u64)?;
            let cells: Vec<String> = pairs.iter().map(|(d, o)| format!("{d}:{o}")).collect();
            write!(out, "{}", cells.join(" "))?;
        } else {
            let cells: Vec<String> = shown.iter().map(u32::to_string).collect();
            write!(out, "{}", cells.join(" "))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let image = load_index(&a.index)?;
    let file_bytes = fs::metadata(&a.index)?.len();
    let space = image.space();
    println!("representation {}", image.repr);
    println!("mode           {}", image.mode);
    println!("lists          {}", image.list_count());
    println!("u              {}", image.universe);
    println!("documents      {}", image.doc_starts.len());
    println!("stopwords      {}", image.stopwords.words().len());
    let p = image.params;
    match image.repr {
        Representation::VbyteCm | Representation::RepairSkipCm => println!("k              {}", p.k),
        Representation::VbyteSt | Representation::RepairSkipSt => println!("B              {}", p.st_b),
        Representation::Rice | Representation::RiceRuns => match p.rice_b {
            Some(b) => println!("rice b         {b}"),
            None => println!("rice b         auto"),
        },
        Representation::VbyteLzend => println!("ds             {}", p.ds),
        _ => {}
    }
    if let Some((c_len, rules)) = image.repair_stats() {
        println!("n'             {c_len}");
        println!("rules          {rules}");
    }
    println!("payload        {}", space.payload);
    println!("grammar        {}", space.grammar);
    println!("samples        {}", space.samples);
    println!("directory      {}", space.directory);
    println!("index bytes    {}", image.index_bytes());
    println!("shared bytes   {}", image.shared_bytes());
    println!("file bytes     {file_bytes}");
    println!("original bytes {}", image.original_byte_size);
    println!("space_pct      {:.3}", image.space_pct());
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        articles: a.articles,
        versions: a.versions,
        article_len: a.article_len,
        vocab_size: a.vocab_size,
        mutation_rate: a.mutation_rate,
        seed: a.seed,
        ..SynthConfig::default()
    };
    fs::write(&a.output, generate(&cfg)).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}

fn cmd_gen_queries(a: GenQueriesArgs) -> Result<()> {
    if a.kind == QueryKind::Phrase && a.parse.mode != ParseMode::Positional {
        bail!("phrase queries are drawn from a positional parse; pass --mode pos");
    }
    let (_, corpus, vocab) = read_corpus(&a.corpus, &a.parse)?;
    let set = generate_queries(&corpus, &vocab, a.kind, a.count, a.terms, a.seed);
    fs::write(&a.output, set.to_text(corpus.mode)).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}
