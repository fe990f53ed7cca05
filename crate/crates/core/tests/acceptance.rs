//! Acceptance suite. Each test checks one criterion and prints a single
//! PASS/FAIL line (written straight to stdout so it shows even when the
//! harness captures output).

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uidx::codecs::{from_gaps, to_gaps, Codec, EncodedList};
use uidx::corpus::{ingest, Corpus, IngestOptions, ParseMode, QueryKind, QuerySet, Stopwords, Vocabulary};
use uidx::grammar::{repair, repair_compress, RePairOutput, Symbol};
use uidx::lzend::{parse_phrases, parse_phrases_naive, reconstruct, LzEndParse};
use uidx::postings::{build_lists, materialize, st_samples, IndexImage, Params, PostingLists, Representation};
use uidx::query::{translate, Algorithm, Engine, Probe, WorkCounters};
use uidx::succinct::BitVector;
use uidx::synth::{generate, generate_queries, SynthConfig};

fn report(n: u32, what: &str, ok: bool, elapsed: Duration, detail: &str) {
    let line = format!(
        "criterion {n} {}: {what} ({detail}; {:.2}s)\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{}", line.trim_end());
}

fn corpus(cfg: &SynthConfig, mode: ParseMode) -> (Corpus, Vocabulary) {
    ingest(&generate(cfg), &IngestOptions::new(mode)).expect("synthetic corpus ingests")
}

/// Every (representation, algorithm) pair the engine accepts.
fn pairs(mode: ParseMode) -> Vec<(Representation, Algorithm)> {
    Representation::ALL
        .into_iter()
        .filter(|r| r.supports(mode).is_ok())
        .flat_map(|r| Algorithm::ALL.into_iter().filter(move |a| a.check(r).is_ok()).map(move |a| (r, a)))
        .collect()
}

fn test_params() -> Params {
    Params {
        k: 2,
        st_b: 4,
        ..Params::default()
    }
}

#[test]
fn criterion_1_golden_examples() {
    let t = Instant::now();
    let mut fails = Vec::new();
    let gaps = vec![vec![1, 2, 1, 2, 1, 4], vec![2, 1, 4, 2, 2], vec![1, 2, 1, 2, 2, 2]];

    let out = repair(&gaps);
    let r = RePairOutput::rule_symbol;
    // A = 1 2, C = 1 4, B = 2 2, D = A A
    if out.rules != vec![(1, 2), (1, 4), (2, 2), (r(0), r(0))] {
        fails.push("rules");
    }
    let (lists, g) = repair_compress(&gaps, false);
    use Symbol::{NonTerminal as N, Terminal as T};
    let c: Vec<Symbol> = (0..lists.c_len()).map(|i| g.decode(lists.raw(i))).collect();
    if c != vec![N(1), N(9), T(2), N(9), N(6), N(1), N(6)] {
        fails.push("C");
    }
    if g.shape() != &BitVector::from_bit_str("11000 100 100") {
        fails.push("R_B");
    }
    if g.expand_symbol(c[5]).ok() != Some(vec![1, 2, 1, 2]) {
        fails.push("expand(C[6])");
    }

    let (_, gs) = repair_compress(&gaps, true);
    let sums: Vec<u64> = [1, 9, 6].iter().map(|&p| gs.phrase_sum(N(p)).unwrap()).collect();
    if sums != vec![6, 5, 4] {
        fails.push("phrase sums");
    }

    let pl = PostingLists {
        mode: ParseMode::NonPositional,
        universe: 11,
        lists: gaps.iter().map(|l| from_gaps(l)).collect(),
    };
    let img = materialize(&pl, Representation::RepairSkip, &Params::default()).unwrap();
    let mut wc = WorkCounters::default();
    if !img.skip_cursor(2).unwrap().search(9, &mut wc) {
        fails.push("skip_search(9)");
    }
    if img.skip_cursor(2).unwrap().search(8, &mut wc) {
        fails.push("skip_search(8)");
    }

    if st_samples(&[6, 4], 4) != vec![(0, 1), (0, 1), (6, 2)] {
        fails.push("ST samples");
    }
    let e = t.elapsed();
    let detail = if fails.is_empty() {
        "all exact".to_string()
    } else {
        format!("mismatch in {}", fails.join(", "))
    };
    report(
        1,
        "golden worked examples",
        fails.is_empty() && e < Duration::from_secs(1),
        e,
        &detail,
    );
}

fn random_gaps(rng: &mut ChaCha8Rng, codec: Codec) -> Vec<u32> {
    let len = rng.random_range(0..64);
    // Rice lists stay within one magnitude so the unary parts stay short
    let regime = rng.random_range(0..if matches!(codec, Codec::Rice | Codec::RiceRuns) { 4 } else { 5 });
    (0..len)
        .map(|_| {
            let r = if regime == 4 { rng.random_range(0..4) } else { regime };
            match r {
                0 => {
                    if rng.random_bool(0.6) {
                        1
                    } else {
                        rng.random_range(1..=4)
                    }
                }
                1 => rng.random_range(1..=1 << 16),
                2 => rng.random_range((1 << 28) - 8..=(1 << 28) + 8),
                _ => rng.random_range(u32::MAX - 16..=u32::MAX),
            }
        })
        .collect()
}

#[test]
fn criterion_2_codec_round_trips() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    for codec in [Codec::Vbyte, Codec::Rice, Codec::RiceRuns, Codec::Simple9] {
        for _ in 0..10_000 {
            let gaps = random_gaps(&mut rng, codec);
            let ok = EncodedList::encode(codec, &gaps, u32::MAX, None)
                .and_then(|e| e.decode())
                .is_ok_and(|d| d == gaps);
            if !ok {
                failures += 1;
            }
        }
    }
    let e = t.elapsed();
    report(
        2,
        "codec round trips",
        failures == 0 && e < Duration::from_secs(30),
        e,
        &format!("{failures} failures over 4 x 10000 lists"),
    );
}

#[test]
fn criterion_3_grammar_identity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut failures, mut words, mut rules) = (0, 0, 0);
    for i in 0..50 {
        let docs = rng.random_range(200..=2000);
        let versions = rng.random_range(5..=50);
        let cfg = SynthConfig {
            articles: (docs / versions).max(1),
            versions,
            article_len: 60,
            vocab_size: 3000,
            mutation_rate: rng.random_range(0.001..=0.05),
            seed: 100 + i,
            ..SynthConfig::default()
        };
        let (c, v) = corpus(&cfg, ParseMode::NonPositional);
        let gaps: Vec<Vec<u32>> = build_lists(&c, v.len()).lists.iter().map(|l| to_gaps(l)).collect();
        let (lists, g) = repair_compress(&gaps, true);
        for (w, expect) in gaps.iter().enumerate() {
            let mut got = Vec::new();
            lists.expand_list(&g, w, &mut got);
            words += 1;
            if &got != expect {
                failures += 1;
            }
        }
        for p in g.nonterminals() {
            rules += 1;
            let sum: u64 = g.expand_symbol(Symbol::NonTerminal(p)).unwrap().iter().map(|&x| x as u64).sum();
            if g.phrase_sum(Symbol::NonTerminal(p)).ok() != Some(sum) {
                failures += 1;
            }
        }
    }
    let e = t.elapsed();
    report(
        3,
        "grammar expansion identity",
        failures == 0 && e < Duration::from_secs(120),
        e,
        &format!("{failures} failures over {words} lists and {rules} nonterminals"),
    );
}

/// Documents containing every term, from per-term document sets.
fn conjunctive_oracle(sets: &HashMap<u32, HashSet<u32>>, ids: &[u32], docs: u32) -> Vec<u32> {
    (1..=docs)
        .filter(|d| ids.iter().all(|id| sets.get(id).is_some_and(|s| s.contains(d))))
        .collect()
}

#[test]
fn criterion_4_intersection_oracle() {
    let t = Instant::now();
    let configs = [
        SynthConfig {
            articles: 20,
            versions: 20,
            article_len: 120,
            vocab_size: 4000,
            seed: 41,
            ..SynthConfig::default()
        },
        SynthConfig {
            articles: 8,
            versions: 60,
            article_len: 200,
            vocab_size: 2000,
            mutation_rate: 0.04,
            seed: 42,
            ..SynthConfig::default()
        },
    ];
    let (mut mismatches, mut checked) = (0u64, 0u64);
    for (ci, cfg) in configs.iter().enumerate() {
        let (c, v) = corpus(cfg, ParseMode::NonPositional);
        let mut sets: HashMap<u32, HashSet<u32>> = HashMap::new();
        for (d, doc) in c.documents.iter().enumerate() {
            for &tok in &doc.tokens {
                sets.entry(tok).or_default().insert(d as u32 + 1);
            }
        }
        let seed = 400 + ci as u64 * 10;
        let sets_q: Vec<QuerySet> = vec![
            generate_queries(&c, &v, QueryKind::WordLowFreq, 500, 1, seed),
            generate_queries(&c, &v, QueryKind::WordHighFreq, 500, 1, seed + 1),
            generate_queries(&c, &v, QueryKind::Conjunctive, 1000, 2, seed + 2),
            generate_queries(&c, &v, QueryKind::Conjunctive, 1000, 5, seed + 3),
        ];
        let expected: Vec<Vec<Vec<u32>>> = sets_q
            .iter()
            .map(|s| {
                s.queries
                    .iter()
                    .map(|q| conjunctive_oracle(&sets, &q.ids, c.num_docs() as u32))
                    .collect()
            })
            .collect();
        let mut images = HashMap::new();
        for (repr, alg) in pairs(ParseMode::NonPositional) {
            let img = images
                .entry(repr)
                .or_insert_with(|| IndexImage::build(&c, &v, repr, &test_params()).unwrap());
            // svs is also run with probing forced on every list
            let thresholds: &[usize] = if alg == Algorithm::Svs { &[20, 1] } else { &[20] };
            for &th in thresholds {
                let engine = Engine::new(img, alg).unwrap().with_svs_threshold(th);
                for (set, exp) in sets_q.iter().zip(&expected) {
                    for (q, want) in set.queries.iter().zip(exp) {
                        checked += 1;
                        if engine.run(q, set.kind).map(|r| r.values).ok().as_ref() != Some(want) {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    let e = t.elapsed();
    report(
        4,
        "intersection oracle over all algorithm/representation pairs",
        mismatches == 0 && e < Duration::from_secs(300),
        e,
        &format!("{mismatches} mismatches in {checked} evaluations"),
    );
}

#[test]
fn criterion_5_skip_search_exhaustive() {
    let t = Instant::now();
    let cfg = SynthConfig {
        articles: 40,
        versions: 50,
        article_len: 100,
        vocab_size: 3000,
        seed: 5,
        ..SynthConfig::default()
    };
    let (c, v) = corpus(&cfg, ParseMode::NonPositional);
    let lists = build_lists(&c, v.len());
    let u = lists.universe as u64;
    let (mut failures, mut probes) = (0u64, 0u64);
    for repr in [
        Representation::RepairSkip,
        Representation::RepairSkipCm,
        Representation::RepairSkipSt,
    ] {
        let img = materialize(&lists, repr, &test_params()).unwrap();
        for (w, list) in lists.lists.iter().enumerate() {
            let id = w as u32 + 1;
            let members: HashSet<u64> = list.iter().map(|&x| x as u64).collect();
            let mut cursor = img.skip_cursor(id).unwrap();
            let mut wc = WorkCounters::default();
            for d in 1..=u {
                probes += 1;
                if cursor.search(d, &mut wc) != members.contains(&d) {
                    failures += 1;
                }
            }
            // fresh cursors on a few values
            for d in [1, u / 3, u / 2, u].into_iter().chain(list.first().map(|&x| x as u64)) {
                probes += 1;
                if img.skip_cursor(id).unwrap().search(d, &mut wc) != members.contains(&d) {
                    failures += 1;
                }
            }
        }
    }
    let e = t.elapsed();
    report(
        5,
        "skip_search membership for every list and value",
        failures == 0 && u <= 4096 && e < Duration::from_secs(60),
        e,
        &format!("{failures} failures in {probes} probes, u = {u}"),
    );
}

fn repetitive_bytes(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let sigma = rng.random_range(2..=26u8);
    let mut s: Vec<u8> = (0..len.min(64)).map(|_| b'a' + rng.random_range(0..sigma)).collect();
    while s.len() < len {
        if rng.random_bool(0.7) && s.len() > 1 {
            // copy an earlier chunk, with a mutation now and then
            let a = rng.random_range(0..s.len());
            let l = rng.random_range(1..=(s.len() - a).min(len - s.len()).min(4096));
            s.extend_from_within(a..a + l);
            if rng.random_bool(0.5) {
                let at = rng.random_range(0..s.len());
                s[at] = b'a' + rng.random_range(0..sigma);
            }
        } else {
            s.push(b'a' + rng.random_range(0..sigma));
        }
    }
    s.truncate(len);
    s
}

#[test]
fn criterion_6_lzend_validity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut failures, mut greedy_checked) = (0, 0);
    for i in 0..1000 {
        let len = if i % 5 == 0 {
            rng.random_range(1..=2048)
        } else {
            rng.random_range(1..=65536)
        };
        let text = repetitive_bytes(&mut rng, len);
        let phrases = parse_phrases(&text);
        // reconstruct rejects sources that do not end on an earlier phrase end
        if reconstruct(&phrases).ok().as_deref() != Some(text.as_slice()) {
            failures += 1;
            continue;
        }
        let parse = LzEndParse::from_phrases(&phrases, 16).unwrap();
        let n = text.len() as u64;
        let (a, b) = (rng.random_range(1..=n), rng.random_range(1..=n));
        let (a, b) = (a.min(b), a.max(b));
        if parse.extract(a, b).ok().as_deref() != Some(&text[a as usize - 1..b as usize]) {
            failures += 1;
        }
        if len <= 2048 {
            greedy_checked += 1;
            if parse_phrases_naive(&text) != phrases {
                failures += 1;
            }
        }
    }
    let e = t.elapsed();
    report(
        6,
        "LZ-End parse validity and greedy maximality",
        failures == 0 && e < Duration::from_secs(120),
        e,
        &format!("{failures} failures over 1000 strings, {greedy_checked} checked against the brute-force parser"),
    );
}

#[test]
fn criterion_7_positional_phrase_oracle() {
    let t = Instant::now();
    let cfg = SynthConfig {
        articles: 12,
        versions: 12,
        article_len: 120,
        vocab_size: 1500,
        seed: 7,
        ..SynthConfig::default()
    };
    let (c, v) = corpus(&cfg, ParseMode::Positional);
    let text = c.concatenation();
    let scan = |ids: &[u32]| -> Vec<u32> {
        if ids.contains(&0) || ids.len() > text.len() {
            return Vec::new();
        }
        text.windows(ids.len())
            .enumerate()
            .filter(|(_, w)| *w == ids)
            .map(|(p, _)| p as u32 + 1)
            .collect()
    };
    let sets = [
        generate_queries(&c, &v, QueryKind::Phrase, 300, 2, 70),
        generate_queries(&c, &v, QueryKind::Phrase, 300, 5, 71),
        generate_queries(&c, &v, QueryKind::WordLowFreq, 200, 1, 72),
        generate_queries(&c, &v, QueryKind::WordHighFreq, 200, 1, 73),
    ];
    let expected: Vec<Vec<Vec<u32>>> = sets.iter().map(|s| s.queries.iter().map(|q| scan(&q.ids)).collect()).collect();
    let (mut mismatches, mut checked) = (0u64, 0u64);
    for (repr, alg) in pairs(ParseMode::Positional) {
        let img = IndexImage::build(&c, &v, repr, &test_params()).unwrap();
        let engine = Engine::new(&img, alg).unwrap();
        for (set, exp) in sets.iter().zip(&expected) {
            for (q, want) in set.queries.iter().zip(exp) {
                checked += 1;
                if engine.run(q, set.kind).map(|r| r.values).ok().as_ref() != Some(want) {
                    mismatches += 1;
                }
            }
        }
    }
    // translation against a per-position binary search
    for exp in expected.iter().flatten() {
        let got = translate(exp, &c.doc_starts, c.total_tokens).unwrap();
        for (&p, &(d, o)) in exp.iter().zip(&got) {
            checked += 1;
            let i = c.doc_starts.partition_point(|&s| s <= p) - 1;
            if (d, o) != (i as u32 + 1, p - c.doc_starts[i] + 1) {
                mismatches += 1;
            }
        }
    }
    let e = t.elapsed();
    report(
        7,
        "positional phrase oracle and translation",
        mismatches == 0 && e < Duration::from_secs(120),
        e,
        &format!("{mismatches} mismatches in {checked} checks"),
    );
}

struct DeskScale {
    corpus: Corpus,
    vocab: Vocabulary,
    images: HashMap<Representation, IndexImage>,
}

/// 100 articles x 50 near-identical versions, 1% token mutation.
fn desk_scale() -> &'static DeskScale {
    static CELL: OnceLock<DeskScale> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = SynthConfig {
            articles: 100,
            versions: 50,
            mutation_rate: 0.01,
            ..SynthConfig::default()
        };
        let (corpus, vocab) = ingest(
            &generate(&cfg),
            &IngestOptions::new(ParseMode::NonPositional).with_stopwords(Stopwords::english()),
        )
        .expect("desk-scale corpus");
        let images = [
            Representation::Rice,
            Representation::RiceRuns,
            Representation::Simple9,
            Representation::Repair,
            Representation::RepairSkip,
        ]
        .into_iter()
        .map(|r| (r, IndexImage::build(&corpus, &vocab, r, &Params::default()).unwrap()))
        .collect();
        DeskScale { corpus, vocab, images }
    })
}

#[test]
fn criterion_8_compression_ordering() {
    let t = Instant::now();
    let ds = desk_scale();
    let size = |r: Representation| ds.images[&r].index_bytes() as f64;
    let (skip, runs, rice, s9) = (
        size(Representation::RepairSkip),
        size(Representation::RiceRuns),
        size(Representation::Rice),
        size(Representation::Simple9),
    );
    let ratios = [runs / skip, rice / runs, s9 / skip];
    let ok = ratios.iter().all(|&r| r >= 1.5);
    let e = t.elapsed();
    report(
        8,
        "index size ordering repair-skip < rice-runs < rice, repair-skip < simple9 (each x1.5)",
        ok && e < Duration::from_secs(300),
        e,
        &format!(
            "bytes repair-skip {skip} rice-runs {runs} rice {rice} simple9 {s9}; ratios rice-runs/repair-skip {:.2}, rice/rice-runs {:.2}, simple9/repair-skip {:.2}",
            ratios[0], ratios[1], ratios[2]
        ),
    );
}

#[test]
fn criterion_9_skipping_speedup() {
    let t = Instant::now();
    let ds = desk_scale();
    let queries = generate_queries(&ds.corpus, &ds.vocab, QueryKind::Conjunctive, 1000, 5, 9);
    let run = |repr: Representation| -> (WorkCounters, Duration) {
        let engine = Engine::new(&ds.images[&repr], Algorithm::Repair).unwrap();
        let mut total = WorkCounters::default();
        let mut best = Duration::MAX;
        for rep in 0..3 {
            let start = Instant::now();
            let mut wc = WorkCounters::default();
            for q in &queries.queries {
                let r = engine.run(q, queries.kind).unwrap();
                wc.add(&r.counters);
            }
            best = best.min(start.elapsed());
            if rep == 0 {
                total = wc;
            }
        }
        (total, best)
    };
    let (plain, plain_t) = run(Representation::Repair);
    let (skip, skip_t) = run(Representation::RepairSkip);
    let frac = skip.terminals as f64 / plain.terminals.max(1) as f64;
    let speedup = plain_t.as_secs_f64() / skip_t.as_secs_f64().max(1e-9);
    let e = t.elapsed();
    report(
        9,
        "repair-skip touches <= 25% of plain repair's terminals and runs >= 2x faster",
        frac <= 0.25 && speedup >= 2.0 && e < Duration::from_secs(300),
        e,
        &format!(
            "terminals {} vs {} ({:.1}%), time {:.1} ms vs {:.1} ms ({speedup:.1}x)",
            skip.terminals,
            plain.terminals,
            frac * 100.0,
            skip_t.as_secs_f64() * 1e3,
            plain_t.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn skip_cursor_is_a_probe() {
    // the cursor answers successor queries too
    let pl = PostingLists {
        mode: ParseMode::NonPositional,
        universe: 11,
        lists: vec![vec![2, 3, 7, 9, 11]],
    };
    let img = materialize(&pl, Representation::RepairSkip, &Params::default()).unwrap();
    let mut c = img.skip_cursor(1).unwrap();
    let mut wc = WorkCounters::default();
    assert_eq!(c.next_geq(4, &mut wc), Some(7));
    assert_eq!(c.next_geq(12, &mut wc), None);
}
