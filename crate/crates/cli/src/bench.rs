//! Timing of query sets. Each row of the report is one (index, algorithm,
//! query kind) triple; `--json` writes the rows as JSON lines with the fields
//! of [`BenchReport`].

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde::Serialize;
use uidx::corpus::{load_queries, ParseMode, QueryKind};
use uidx::query::{Algorithm, Engine};

use crate::load_index;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Index image; repeat for several
    #[arg(long, required = true)]
    index: Vec<PathBuf>,

    /// Query set as KIND=PATH (kinds: word-low, word-high, and, phrase); repeat for several
    #[arg(long, required = true, value_parser = parse_set)]
    queries: Vec<(QueryKind, PathBuf)>,

    /// Algorithms to time; defaults to the natural one of each index
    #[arg(long)]
    algorithm: Vec<Algorithm>,

    /// Timed runs per row; the reported time is their mean
    #[arg(long, default_value_t = 3)]
    reps: usize,

    /// Evaluate queries on all cores (each query stays on one thread)
    #[arg(long)]
    parallel: bool,

    /// Also write the rows as JSON lines to this file (`-` for stdout, which replaces the table)
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_set(s: &str) -> std::result::Result<(QueryKind, PathBuf), String> {
    let (kind, path) = s.split_once('=').ok_or_else(|| format!("expected KIND=PATH, got `{s}`"))?;
    Ok((kind.parse().map_err(|e| format!("{e}"))?, PathBuf::from(path)))
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub index: String,
    pub representation: String,
    pub algorithm: String,
    pub kind: String,
    pub queries: usize,
    /// Total matches over the query set.
    pub occurrences: u64,
    pub reps: usize,
    pub parallel: bool,
    /// Directory, payload, grammar and samples, as serialized.
    pub index_bytes: u64,
    /// Vocabulary, stopwords and document table, the same for every representation.
    pub shared_bytes: u64,
    pub file_bytes: u64,
    pub original_bytes: u64,
    pub space_pct: f64,
    /// Mean wall time of one pass over the set.
    pub mean_ms: f64,
    pub us_per_occurrence: f64,
    pub us_per_query: f64,
}

pub fn cmd_bench(a: BenchArgs) -> Result<()> {
    let reps = a.reps.max(1);
    let mut rows = Vec::new();
    for path in &a.index {
        let image = load_index(path)?;
        let file_bytes = fs::metadata(path)?.len();
        let algorithms = if a.algorithm.is_empty() {
            vec![Algorithm::default_for(image.repr)]
        } else {
            a.algorithm.clone()
        };
        for &alg in &algorithms {
            let engine = match Engine::new(&image, alg) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("skipping {} with {alg}: {e}", path.display());
                    continue;
                }
            };
            for (kind, qpath) in &a.queries {
                if *kind == QueryKind::Phrase && image.mode != ParseMode::Positional
                    || *kind == QueryKind::Conjunctive && image.mode != ParseMode::NonPositional
                {
                    eprintln!("skipping {kind} queries on {} ({} index)", path.display(), image.mode);
                    continue;
                }
                let set = load_queries(qpath, *kind, &image.vocab, image.mode, &image.stopwords)
                    .with_context(|| format!("reading queries {}", qpath.display()))?;
                let run = || {
                    if a.parallel {
                        engine.run_batch(&set)
                    } else {
                        engine.run_batch_sequential(&set)
                    }
                };
                // untimed warm-up, which also fixes the occurrence count
                let occurrences: u64 = run()?.iter().map(|r| r.values.len() as u64).sum();
                let start = Instant::now();
                for _ in 0..reps {
                    std::hint::black_box(run()?);
                }
                let mean_us = start.elapsed().as_secs_f64() * 1e6 / reps as f64;
                rows.push(BenchReport {
                    index: path.display().to_string(),
                    representation: image.repr.to_string(),
                    algorithm: alg.to_string(),
                    kind: kind.to_string(),
                    queries: set.len(),
                    occurrences,
                    reps,
                    parallel: a.parallel,
                    index_bytes: image.index_bytes() as u64,
                    shared_bytes: image.shared_bytes() as u64,
                    file_bytes,
                    original_bytes: image.original_byte_size,
                    space_pct: image.space_pct(),
                    mean_ms: mean_us / 1e3,
                    us_per_occurrence: if occurrences == 0 { 0.0 } else { mean_us / occurrences as f64 },
                    us_per_query: if set.is_empty() { 0.0 } else { mean_us / set.len() as f64 },
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(anyhow!("no (index, algorithm, query kind) combination could be run"));
    }

    let to_stdout = a.json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if !to_stdout {
        print_table(&rows)?;
    }
    if let Some(p) = &a.json {
        let mut text = String::new();
        for r in &rows {
            text.push_str(&serde_json::to_string(r)?);
            text.push('\n');
        }
        if to_stdout {
            io::stdout().write_all(text.as_bytes())?;
        } else {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

fn print_table(rows: &[BenchReport]) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:<16} {:<8} {:<10} {:>8} {:>12} {:>4} {:>9} {:>12} {:>10}",
        "repr", "alg", "kind", "queries", "occurrences", "reps", "space%", "us/occ", "us/query"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<16} {:<8} {:<10} {:>8} {:>12} {:>4} {:>9.3} {:>12.4} {:>10.2}",
            r.representation, r.algorithm, r.kind, r.queries, r.occurrences, r.reps, r.space_pct, r.us_per_occurrence, r.us_per_query
        )?;
    }
    Ok(())
}
