//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revmine::agreement::{format_percent, LabelCounts};
use revmine::lexical::tokenize;
use revmine::pipeline::{self, LABELABLE_FILE, PAIRS_FILE, PAPERS_FILE};
use revmine::revision::{diff_spans, read_jsonl, DEFAULT_TYPO_THRESHOLD};
use revmine::stats::parse_tables;
use revmine::{
    align_sentences, classify_pair, fleiss_kappa, similarity, strength_change_rate, Error,
    LabelMatrix, PaperSummary, PipelineConfig, Position, RevisionPair, RevisionType, Sentence,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

// AC1 -----------------------------------------------------------------------

/// Maximum weight over every subsequence of `a` that is also a
/// subsequence of `b`, by enumerating all subsets of `a`.
fn brute_weighted_lcs(a: &[String], b: &[String], w: &HashMap<String, f64>) -> f64 {
    let weight = |t: &String| w.get(t).copied().unwrap_or(0.0);
    let mut best = 0.0f64;
    for mask in 0u32..(1 << a.len()) {
        let chosen: Vec<&String> = (0..a.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &a[i])
            .collect();
        let mut it = b.iter();
        if chosen.iter().all(|t| it.any(|u| u == *t)) {
            best = best.max(chosen.iter().map(|t| weight(t)).sum());
        }
    }
    best
}

fn brute_similarity(a: &[String], b: &[String], w: &HashMap<String, f64>) -> f64 {
    let total = |s: &[String]| {
        s.iter()
            .map(|t| w.get(t).copied().unwrap_or(0.0))
            .sum::<f64>()
    };
    let denom = total(a).max(total(b));
    if denom == 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    brute_weighted_lcs(a, b, w) / denom
}

fn random_sentence(rng: &mut ChaCha8Rng, vocab: &[String], max_len: usize) -> Vec<String> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| vocab[rng.gen_range(0..vocab.len())].clone())
        .collect()
}

fn ac1_similarity_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let vocab: Vec<String> = (0..rng.gen_range(2..8)).map(|i| format!("t{i}")).collect();
        let weights: HashMap<String, f64> = vocab
            .iter()
            .map(|t| {
                (
                    t.clone(),
                    if rng.gen_bool(0.15) {
                        0.0
                    } else {
                        rng.gen_range(0.0..5.0)
                    },
                )
            })
            .collect();
        let a = random_sentence(&mut rng, &vocab, 10);
        let b = random_sentence(&mut rng, &vocab, 10);
        let got = similarity(&a, &b, &weights).value();
        let want = brute_similarity(&a, &b, &weights);
        let diff = (got - want).abs();
        worst = worst.max(diff);
        ensure!(
            diff <= 1e-9,
            "case {case}: {a:?} vs {b:?}: got {got}, oracle {want}"
        );
    }
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!("1000 pairs, max |diff| {worst:.1e}, {took:.2?}"))
}

// AC2 -----------------------------------------------------------------------

/// Best total of `(sim - penalty)` over every monotone one-to-one matching,
/// summed link by link in order so the floating-point result matches a
/// left-to-right accumulation.
fn brute_alignment(sims: &[Vec<f64>], penalty: f64) -> f64 {
    fn go(sims: &[Vec<f64>], penalty: f64, i: usize, j: usize, acc: f64) -> f64 {
        let mut best = acc;
        for a in i..sims.len() {
            for b in j..sims[a].len() {
                best = best.max(go(sims, penalty, a + 1, b + 1, acc + sims[a][b] - penalty));
            }
        }
        best
    }
    go(sims, penalty, 0, 0, 0.0)
}

fn ac2_alignment_optimality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let penalty = 0.1;
    let mut links = 0;
    for case in 0..500 {
        let vocab: Vec<String> = (0..rng.gen_range(3..9)).map(|i| format!("w{i}")).collect();
        let weights: HashMap<String, f64> = vocab
            .iter()
            .map(|t| (t.clone(), rng.gen_range(0.0..3.0)))
            .collect();
        let side = |rng: &mut ChaCha8Rng| -> Vec<Sentence> {
            (0..rng.gen_range(0..=6))
                .map(|k| {
                    let mut toks = random_sentence(rng, &vocab, 6);
                    toks.push(vocab[0].clone());
                    Sentence::new(k, &toks.join(" ")).unwrap()
                })
                .collect()
        };
        let v1 = side(&mut rng);
        let v2 = side(&mut rng);
        let sims: Vec<Vec<f64>> = v1
            .iter()
            .map(|a| {
                v2.iter()
                    .map(|b| similarity(&a.tokens, &b.tokens, &weights).value())
                    .collect()
            })
            .collect();
        let a = align_sentences(&v1, &v2, &weights, penalty);
        let want = brute_alignment(&sims, penalty);
        ensure!(
            a.dp_score == want,
            "case {case}: dp {} vs exhaustive {want}",
            a.dp_score
        );
        a.validate(v1.len(), v2.len(), penalty)
            .map_err(|e| format!("case {case}: {e}"))?;
        let linked: f64 = a
            .links
            .iter()
            .fold(0.0, |acc, l| acc + l.sim.value() - penalty);
        ensure!(
            linked == a.dp_score,
            "case {case}: links sum to {linked}, dp {}",
            a.dp_score
        );
        for l in &a.links {
            ensure!(
                l.sim.value() == sims[l.i][l.j],
                "case {case}: link sim mismatch"
            );
        }
        links += a.links.len();
    }
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!("500 instances, {links} links, {took:.2?}"))
}

// AC3 -----------------------------------------------------------------------

struct TypoCase {
    v1: &'static str,
    v2: &'static str,
    /// Changed spans as space-joined runs with their character distance.
    spans: &'static [(&'static str, &'static str, usize)],
    expect: RevisionType,
}

const TYPO_TABLE: &[TypoCase] = &[
    TypoCase {
        v1: "the cat sat",
        v2: "the cat sat",
        spans: &[],
        expect: RevisionType::Unchanged,
    },
    TypoCase {
        v1: "the cat sat",
        v2: "the cta sat",
        spans: &[("cat", "cta", 2)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "we studied it",
        v2: "we studeid it",
        spans: &[("studied", "studeid", 2)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "results are good",
        v2: "results are goodxyz",
        spans: &[("good", "goodxyz", 3)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "results are good",
        v2: "results are goodxy",
        spans: &[("good", "goodxy", 2)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "a b c",
        v2: "a c",
        spans: &[("b", "", 1)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "we show this",
        v2: "we show that",
        spans: &[("this", "that", 2)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "we prove it",
        v2: "we show it",
        spans: &[("prove", "show", 4)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "colour and flavour",
        v2: "color and flavor",
        spans: &[("colour", "color", 1), ("flavour", "flavor", 1)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "colour and good",
        v2: "color and goodxyz",
        spans: &[("colour", "color", 1), ("good", "goodxyz", 3)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "a big red dog",
        v2: "a small blue dog",
        spans: &[("big red", "small blue", 9)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "this helps",
        v2: "this strongly helps",
        spans: &[("", "strongly", 8)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "it works .",
        v2: "it works !",
        spans: &[(".", "!", 1)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "The Cat",
        v2: "the cat",
        spans: &[],
        expect: RevisionType::Unchanged,
    },
    TypoCase {
        v1: "it may hold",
        v2: "it must hold",
        spans: &[("may", "must", 3)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "in the paper",
        v2: "in this paper",
        spans: &[("the", "this", 2)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "we can not",
        v2: "we cannot",
        spans: &[("can not", "cannot", 1)],
        expect: RevisionType::Typo,
    },
    TypoCase {
        v1: "x [MATH] y",
        v2: "x [MATH] [MATH] y",
        spans: &[("", "[MATH]", 6)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "a abc d",
        v2: "a d",
        spans: &[("abc", "", 3)],
        expect: RevisionType::Rewrite,
    },
    TypoCase {
        v1: "we form groups",
        v2: "we from groups",
        spans: &[("form", "from", 2)],
        expect: RevisionType::Typo,
    },
];

fn ac3_typo_rule() -> Outcome {
    ensure!(
        TYPO_TABLE.len() == 20,
        "table has {} cases",
        TYPO_TABLE.len()
    );
    for (n, c) in TYPO_TABLE.iter().enumerate() {
        let (a, b) = (tokenize(c.v1), tokenize(c.v2));
        let spans: Vec<(String, String, usize)> = diff_spans(&a, &b)
            .iter()
            .map(|s| (s.v1_run.join(" "), s.v2_run.join(" "), s.distance()))
            .collect();
        let want: Vec<(String, String, usize)> = c
            .spans
            .iter()
            .map(|&(x, y, d)| (x.to_string(), y.to_string(), d))
            .collect();
        ensure!(
            spans == want,
            "case {n} `{}` -> `{}`: spans {spans:?}, expected {want:?}",
            c.v1,
            c.v2
        );
        let got = classify_pair(&a, &b, DEFAULT_TYPO_THRESHOLD);
        ensure!(
            got == c.expect,
            "case {n} `{}` -> `{}`: {got}, expected {}",
            c.v1,
            c.v2,
            c.expect
        );
    }
    Ok("20 cases, distance 3 -> rewrite, 2 -> typo".into())
}

// AC4 -----------------------------------------------------------------------

/// Label CSV with nine raters per pair. `majority` lists, per label, how
/// many pairs reach a 5-of-9 majority for it; `split` pairs have none.
fn synthetic_labels(majority: [usize; 4], split: usize) -> String {
    let names = ["stronger", "weaker", "no_change", "cant_tell"];
    let mut csv = String::from("pair_id,labeler_id,label\n");
    let mut id = 0;
    for (k, &n) in majority.iter().enumerate() {
        for _ in 0..n {
            for r in 0..9 {
                let label = if r < 5 { names[k] } else { names[(k + r) % 4] };
                csv.push_str(&format!("p{id},r{r},{label}\n"));
            }
            id += 1;
        }
    }
    for _ in 0..split {
        for r in 0..9 {
            csv.push_str(&format!("p{id},r{r},{}\n", names[r % 4]));
        }
        id += 1;
    }
    csv
}

fn ac4_paper_arithmetic() -> Outcome {
    let counts = LabelCounts([194, 93, 99, 0]);
    let rate = strength_change_rate(&counts).map_err(|e| e.to_string())?;
    ensure!(rate == 287.0 / 386.0, "rate {rate}");
    ensure!(
        format_percent(rate) == "74.4%",
        "printed {}",
        format_percent(rate)
    );

    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    fs::write(&labels, synthetic_labels([194, 93, 99, 0], 114)).unwrap();
    let cfg = PipelineConfig {
        out: dir.path().join("out"),
        ..Default::default()
    };
    let report = pipeline::run_agreement(&cfg, &labels).map_err(|e| e.to_string())?;
    ensure!(
        report.subset_size() == 386,
        "subset {}",
        report.subset_size()
    );
    ensure!(
        report.strength_change_rate == Some(287.0 / 386.0),
        "report rate {:?}",
        report.strength_change_rate
    );
    let tsv = fs::read_to_string(cfg.out.join(pipeline::AGREEMENT_FILE)).unwrap();
    ensure!(
        tsv.contains("strength_change_percent\t74.4%\n"),
        "tsv:\n{tsv}"
    );
    Ok(format!("287/386 = {rate:.6} -> {}", format_percent(rate)))
}

// AC5 -----------------------------------------------------------------------

/// Exact rational evaluation of the textbook formula, one final division.
fn textbook_kappa(rows: &[Vec<u32>]) -> Option<f64> {
    let n_items = rows.len() as i128;
    let r: i128 = rows[0].iter().map(|&c| c as i128).sum();
    let k = rows[0].len();
    let sq: i128 = rows
        .iter()
        .flatten()
        .map(|&c| (c as i128) * (c as i128))
        .sum();
    let cols: Vec<i128> = (0..k)
        .map(|j| rows.iter().map(|row| row[j] as i128).sum())
        .collect();
    // P = (sq - N r) / (N r (r - 1)); Pe = sum C_j^2 / (N r)^2.
    let a = sq - n_items * r;
    let d1 = n_items * r * (r - 1);
    let b: i128 = cols.iter().map(|c| c * c).sum();
    let d2 = (n_items * r) * (n_items * r);
    if d2 == b {
        return None;
    }
    Some((a * d2 - b * d1) as f64 / (d1 * (d2 - b)) as f64)
}

fn ac5_fleiss_kappa() -> Outcome {
    let unanimous = LabelMatrix::from_counts(vec![
        vec![9, 0, 0, 0],
        vec![0, 9, 0, 0],
        vec![0, 0, 9, 0],
        vec![0, 0, 0, 9],
        vec![9, 0, 0, 0],
    ])
    .unwrap();
    let k = fleiss_kappa(&unanimous).map_err(|e| e.to_string())?;
    ensure!(k == 1.0, "unanimous kappa {k}");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let rows: Vec<Vec<u32>> = (0..10)
            .map(|_| {
                let mut row = vec![0u32; 4];
                for _ in 0..9 {
                    row[rng.gen_range(0..4)] += 1;
                }
                row
            })
            .collect();
        let want = textbook_kappa(&rows).ok_or(format!("case {case} degenerate"))?;
        let got =
            fleiss_kappa(&LabelMatrix::from_counts(rows).unwrap()).map_err(|e| e.to_string())?;
        worst = worst.max((got - want).abs());
        ensure!(
            (got - want).abs() <= 1e-12,
            "case {case}: {got} vs textbook {want}"
        );
    }

    let single = LabelMatrix::from_counts(vec![vec![0, 9, 0, 0]; 6]).unwrap();
    ensure!(
        matches!(fleiss_kappa(&single), Err(Error::DegenerateAgreement)),
        "single-category corpus not rejected"
    );
    Ok(format!(
        "unanimous = 1, 100 random matrices max |diff| {worst:.1e}, degenerate rejected"
    ))
}

// AC6 / AC7 -------------------------------------------------------------------

fn read_pairs(path: &std::path::Path) -> Vec<RevisionPair> {
    read_jsonl(std::io::BufReader::new(fs::File::open(path).unwrap()), path).unwrap()
}

fn fixture_config(root: &std::path::Path, out: &std::path::Path) -> PipelineConfig {
    PipelineConfig {
        corpus_root: Some(root.to_path_buf()),
        out: out.to_path_buf(),
        ..Default::default()
    }
}

fn ac6_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("corpus");
    let planted = common::write_corpus(&root);

    let start = Instant::now();
    let cfg = fixture_config(&root, &dir.path().join("a"));
    pipeline::run_pairs(&cfg).map_err(|e| e.to_string())?;
    pipeline::run_stats(&cfg).map_err(|e| e.to_string())?;
    let took = within(Duration::from_secs(5), start)?;

    let pairs = read_pairs(&cfg.out.join(PAIRS_FILE));
    let mut found: BTreeMap<(Position, RevisionType), usize> = BTreeMap::new();
    for p in &pairs {
        *found.entry((p.position, p.rtype)).or_insert(0) += 1;
    }
    ensure!(
        found == planted.counts,
        "pairs by position:\n{found:?}\nplanted:\n{:?}",
        planted.counts
    );

    let stats = fs::read_to_string(cfg.out.join(pipeline::STATS_FILE)).unwrap();
    let tables = parse_tables(&stats);
    let fig1a = &tables["fig1a"];
    for (row, pos) in fig1a[1..].iter().zip([
        Position::Introduction,
        Position::Middle,
        Position::Conclusion,
    ]) {
        ensure!(row[0] == pos.as_str(), "fig1a row {row:?}");
        let want: Vec<String> = [
            RevisionType::Deletion,
            RevisionType::Typo,
            RevisionType::Rewrite,
        ]
        .iter()
        .map(|&t| planted.folded(pos, t).to_string())
        .collect();
        ensure!(
            row[1..4] == want[..],
            "fig1a {pos}: {row:?}, planted {want:?}"
        );
    }

    // Same corpus into a fresh directory, and again into the first one
    // (resuming from its cache).
    let cfg_b = fixture_config(&root, &dir.path().join("b"));
    pipeline::run_pairs(&cfg_b).map_err(|e| e.to_string())?;
    pipeline::run_stats(&cfg_b).map_err(|e| e.to_string())?;
    let first = common::snapshot(&cfg.out);
    ensure!(first == common::snapshot(&cfg_b.out), "fresh rerun differs");
    pipeline::run_pairs(&cfg).map_err(|e| e.to_string())?;
    pipeline::run_stats(&cfg).map_err(|e| e.to_string())?;
    ensure!(first == common::snapshot(&cfg.out), "cached rerun differs");

    Ok(format!(
        "{} pairs: {} deletions, {} typos, {} rewrites; reruns byte-identical; {took:.2?}",
        pairs.len(),
        planted.total(RevisionType::Deletion),
        planted.total(RevisionType::Typo),
        planted.total(RevisionType::Rewrite)
    ))
}

fn ac7_filter_semantics() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("corpus");
    common::write_corpus(&root);
    let cfg = fixture_config(&root, &dir.path().join("out"));
    pipeline::run_pairs(&cfg).map_err(|e| e.to_string())?;

    let all = read_pairs(&cfg.out.join(PAIRS_FILE));
    let labelable = read_pairs(&cfg.out.join(LABELABLE_FILE));
    ensure!(!labelable.is_empty(), "labelable subset is empty");
    for p in &labelable {
        let sim = p
            .similarity
            .ok_or(format!("labelable pair without similarity: {p:?}"))?;
        ensure!(sim > 0.5, "similarity {sim} <= 0.5 in {p:?}");
        ensure!(
            matches!(p.position, Position::Abstract | Position::Introduction),
            "position {} in {p:?}",
            p.position
        );
        ensure!(
            matches!(p.rtype, RevisionType::Typo | RevisionType::Rewrite),
            "type {} in {p:?}",
            p.rtype
        );
    }
    let expected: Vec<&RevisionPair> = all
        .iter()
        .filter(|p| {
            matches!(p.rtype, RevisionType::Typo | RevisionType::Rewrite)
                && p.similarity.is_some_and(|s| s > 0.5)
                && matches!(p.position, Position::Abstract | Position::Introduction)
        })
        .collect();
    ensure!(
        expected == labelable.iter().collect::<Vec<_>>(),
        "labelable is not exactly the qualifying pairs ({} vs {})",
        labelable.len(),
        expected.len()
    );
    let low = all
        .iter()
        .filter(|p| p.rtype == RevisionType::Rewrite && p.similarity.is_some_and(|s| s <= 0.5))
        .filter(|p| matches!(p.position, Position::Abstract | Position::Introduction))
        .count();
    ensure!(low > 0, "fixture has no low-similarity rewrite to exclude");
    Ok(format!(
        "{} of {} pairs labelable, {low} low-similarity rewrites excluded",
        labelable.len(),
        all.len()
    ))
}

// AC8 -----------------------------------------------------------------------

fn ac8_version_counting() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("corpus");
    let same = "\\section{Introduction}\nWe study kappa statistics. They are useful.\n";
    let before = "\\section{Introduction}\nWe study agreement measures. They are useful.\n";
    let after = "\\section{Introduction}\nWe study agreement measures. They are very useful.\n";
    common::write_paper(
        &root,
        "identical",
        2,
        "cs.CL",
        &[("v1", same), ("v2", same)],
    );
    common::write_paper(
        &root,
        "revised",
        3,
        "cs.CL",
        &[("v1", before), ("v2", after)],
    );
    common::write_paper(&root, "single", 1, "cs.LG", &[("v1", before)]);
    let cfg = fixture_config(&root, &dir.path().join("out"));
    pipeline::run_pairs(&cfg).map_err(|e| e.to_string())?;
    let stats = pipeline::run_stats(&cfg).map_err(|e| e.to_string())?;

    let v = &stats.versions;
    ensure!(
        v.papers == 3 && v.multi_version == 2,
        "papers {} multi {}",
        v.papers,
        v.multi_version
    );
    ensure!(
        v.multi_version_rate == 2.0 / 3.0,
        "multi_version_rate {}",
        v.multi_version_rate
    );
    ensure!(v.changed_papers == 1, "changed papers {}", v.changed_papers);

    let summaries: Vec<PaperSummary> = fs::read_to_string(cfg.out.join(PAPERS_FILE))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let identical = summaries
        .iter()
        .find(|s| s.paper_id == "identical")
        .ok_or("identical paper missing")?;
    ensure!(
        identical.version_count == 2 && !identical.text_changed,
        "identical summary {identical:?}"
    );
    Ok("identical paper counted as multi-version, not as changed".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "AC1 similarity equals exhaustive subsequence oracle",
            ac1_similarity_oracle,
        ),
        (
            "AC2 alignment equals exhaustive monotone matching",
            ac2_alignment_optimality,
        ),
        ("AC3 typo rule fixture table", ac3_typo_rule),
        ("AC4 strength change rate 287/386", ac4_paper_arithmetic),
        ("AC5 Fleiss kappa", ac5_fleiss_kappa),
        ("AC6 end-to-end planted corpus", ac6_end_to_end),
        ("AC7 labelable filter", ac7_filter_semantics),
        ("AC8 multi-version vs changed papers", ac8_version_counting),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
