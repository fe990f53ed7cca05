use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use uidx::postings::{IndexImage, Representation};
use uidx::query::Algorithm;

fn uidx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uidx")).args(args).output().expect("spawn uidx")
}

fn ok(args: &[&str]) -> String {
    let out = uidx(args);
    assert!(
        out.status.success(),
        "uidx {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fail(args: &[&str]) -> String {
    let out = uidx(args);
    assert!(!out.status.success(), "uidx {args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TINY: &str = "the cat sat on the mat\n\x01\na dog and a cat\n\x01\nthe dog sat\n";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn build(&self, corpus: &Path, name: &str, mode: &str, repr: Representation) -> PathBuf {
        let out = self.path(name);
        ok(&["build", "-i", s(corpus), "-o", s(&out), "--mode", mode, "--repr", repr.name()]);
        out
    }

    /// A small versioned corpus with word, conjunctive and phrase query files.
    fn synthetic(&self) -> PathBuf {
        let corpus = self.path("synth.txt");
        ok(&[
            "synth",
            "-o",
            s(&corpus),
            "--articles",
            "6",
            "--versions",
            "15",
            "--article-len",
            "120",
            "--seed",
            "7",
        ]);
        for (kind, mode, terms, name) in [
            ("word-low", "nonpos", "1", "low.txt"),
            ("word-high", "nonpos", "1", "high.txt"),
            ("and", "nonpos", "2", "and2.txt"),
            ("and", "nonpos", "4", "and4.txt"),
            ("phrase", "pos", "2", "ph2.txt"),
            ("phrase", "pos", "4", "ph4.txt"),
            ("word-high", "pos", "1", "poshigh.txt"),
        ] {
            let q = self.path(name);
            ok(&[
                "gen-queries",
                "--corpus",
                s(&corpus),
                "-o",
                s(&q),
                "--kind",
                kind,
                "--mode",
                mode,
                "--terms",
                terms,
                "--count",
                "60",
            ]);
        }
        corpus
    }
}

#[test]
fn tiny_build_matches_brute_force() {
    let fx = Fixture::new();
    let corpus = fx.write("tiny.txt", TINY);
    let stop = fx.write("stop.txt", "the\na\n");
    let img = fx.path("tiny.uidx");
    let stats = ok(&["build", "-i", s(&corpus), "-o", s(&img), "--repr", "vbyte", "--stopwords", s(&stop)]);
    assert!(stats.contains("terms"), "{stats}");

    let image = IndexImage::load(&img).unwrap();
    let docs: Vec<BTreeSet<&str>> = TINY
        .split("\n\x01\n")
        .map(|d| d.split_whitespace().filter(|w| *w != "the" && *w != "a").collect())
        .collect();
    let words: BTreeSet<&str> = docs.iter().flatten().copied().collect();
    assert_eq!(image.vocab.len(), words.len());
    for w in words {
        let expect: Vec<u32> = (1..).zip(&docs).filter(|(_, d)| d.contains(w)).map(|(i, _)| i).collect();
        assert_eq!(image.decode_list(image.vocab.lookup(w)).unwrap(), expect, "{w}");
    }
    assert_eq!(image.vocab.lookup("the"), 0);
}

#[test]
fn builds_are_deterministic() {
    let fx = Fixture::new();
    let corpus = fx.synthetic();
    for repr in [
        Representation::Vbyte,
        Representation::RepairSkipSt,
        Representation::VbyteLzend,
        Representation::Hybrid,
    ] {
        let a = fx.build(&corpus, "a.uidx", "nonpos", repr);
        let first = fs::read(&a).unwrap();
        let b = fx.build(&corpus, "b.uidx", "nonpos", repr);
        assert_eq!(first, fs::read(&b).unwrap(), "{repr}");
    }
}

#[test]
fn rice_runs_positional_is_rejected() {
    let fx = Fixture::new();
    let corpus = fx.write("tiny.txt", TINY);
    let err = fail(&[
        "build",
        "-i",
        s(&corpus),
        "-o",
        s(&fx.path("x")),
        "--mode",
        "pos",
        "--repr",
        "rice-runs",
    ]);
    assert!(err.contains("rice-runs") && err.contains("positional"), "{err}");
    assert!(!fx.path("x").exists());
}

#[test]
fn incompatible_algorithm_names_the_valid_set() {
    let fx = Fixture::new();
    let corpus = fx.write("tiny.txt", TINY);
    let img = fx.build(&corpus, "l.uidx", "nonpos", Representation::VbyteLzend);
    let q = fx.write("q.txt", "cat dog\n");
    let err = fail(&["query", "--index", s(&img), "--queries", s(&q), "--algorithm", "svs"]);
    assert!(err.contains("vbyte-cm, vbyte-st, hybrid"), "{err}");
}

#[test]
fn word_and_disjoint_queries() {
    let fx = Fixture::new();
    let corpus = fx.write("tiny.txt", "red blue\n\x01\ngreen\n\x01\nred\n");
    let img = fx.build(&corpus, "t.uidx", "nonpos", Representation::RepairSkip);
    let words = fx.write("w.txt", "red\nmauve\n");
    assert_eq!(
        ok(&["query", "--index", s(&img), "--queries", s(&words), "--kind", "word-low"]),
        "1\t2\t1 3\n2\t0\t\n"
    );
    let and = fx.write("a.txt", "blue green\nred blue\n");
    assert_eq!(ok(&["query", "--index", s(&img), "--queries", s(&and)]), "1\t0\t\n2\t1\t1\n");
}

#[test]
fn positional_matches_translate_to_documents() {
    let fx = Fixture::new();
    let corpus = fx.write("p.txt", "w1 w2 w1 w2\n\x01\nw2 w1 w2\n");
    let img = fx.build(&corpus, "p.uidx", "pos", Representation::Repair);
    let q = fx.write("q.txt", "w1 w2\n");
    let global = ok(&["query", "--index", s(&img), "--queries", s(&q), "--kind", "phrase"]);
    let local = ok(&["query", "--index", s(&img), "--queries", s(&q), "--kind", "phrase", "--translate"]);
    // single spaces are not tokens; the separator between the documents is position 5
    assert_eq!(global, "1\t3\t1 3 7\n");
    assert_eq!(local, "1\t3\t1:1 1:3 2:2\n");
}

#[test]
fn output_is_the_same_for_every_configuration() {
    let fx = Fixture::new();
    let corpus = fx.synthetic();
    for (mode, sets) in [
        (
            "nonpos",
            &[
                ("word-low", "low.txt"),
                ("word-high", "high.txt"),
                ("and", "and2.txt"),
                ("and", "and4.txt"),
            ][..],
        ),
        (
            "pos",
            &[("word-high", "poshigh.txt"), ("phrase", "ph2.txt"), ("phrase", "ph4.txt")][..],
        ),
    ] {
        let mut reference: Vec<Option<String>> = vec![None; sets.len()];
        for repr in Representation::ALL {
            if repr == Representation::RiceRuns && mode == "pos" {
                continue;
            }
            let img = fx.build(&corpus, &format!("{mode}-{repr}.uidx"), mode, repr);
            for alg in Algorithm::ALL.into_iter().filter(|a| a.check(repr).is_ok()) {
                for (i, (kind, q)) in sets.iter().enumerate() {
                    let q = fx.path(q);
                    let out = ok(&[
                        "query",
                        "--index",
                        s(&img),
                        "--queries",
                        s(&q),
                        "--kind",
                        kind,
                        "--algorithm",
                        alg.name(),
                        "--max-results",
                        "1000000",
                    ]);
                    match &reference[i] {
                        None => reference[i] = Some(out),
                        Some(r) => assert!(*r == out, "{mode} {repr} {alg} {kind} differs"),
                    }
                }
            }
        }
        assert!(reference.iter().all(|r| r.as_ref().is_some_and(|t| t.lines().count() == 60)));
    }
}

#[test]
fn bench_reports_rows_with_consistent_sizes() {
    let fx = Fixture::new();
    let corpus = fx.synthetic();
    let rice = fx.build(&corpus, "rice.uidx", "nonpos", Representation::Rice);
    let rs = fx.build(&corpus, "rs.uidx", "nonpos", Representation::RepairSkip);
    let and = format!("and={}", s(&fx.path("and2.txt")));
    let out = ok(&[
        "bench",
        "--index",
        s(&rice),
        "--index",
        s(&rs),
        "--queries",
        &and,
        "--reps",
        "3",
        "--json",
        "-",
    ]);
    let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r["reps"], 3);
        assert_eq!(r["queries"], 60);
        let pct = r["space_pct"].as_f64().unwrap();
        assert!(pct > 0.0);
        assert!(r["us_per_occurrence"].as_f64().unwrap() > 0.0);
        // the structures are what the file holds beyond the shared tables and the header
        let file = r["file_bytes"].as_f64().unwrap();
        let from_file = (file - r["shared_bytes"].as_f64().unwrap()) * 100.0 / r["original_bytes"].as_f64().unwrap();
        let slack = (1024.0 + file / 1000.0) * 100.0 / r["original_bytes"].as_f64().unwrap();
        assert!((from_file - pct).abs() < slack, "{r}");
    }
    let pct = |i: usize| rows[i]["space_pct"].as_f64().unwrap();
    assert_eq!(rows[1]["representation"], "repair-skip");
    assert!(pct(1) < pct(0), "repair-skip {} vs rice {}", pct(1), pct(0));

    // the text table has a header and one line per row
    let table = ok(&["bench", "--index", s(&rs), "--queries", &and, "--reps", "1"]);
    assert_eq!(table.lines().count(), 2);
}
