//! The whole pipeline on a small corpus tree: extract, mine pairs, sample
//! labelable pairs and compute statistics.
//!
//! Run with `cargo run --example mine_corpus [corpus_root] [out_dir]`. Without
//! arguments a demo corpus is written to a temporary directory.

use std::fs;
use std::path::{Path, PathBuf};

use revmine::pipeline::{self, PairsReport};
use revmine::PipelineConfig;

const PAPERS: [(&str, &str, &str, &str); 3] = [
    (
        "p1",
        "cs.CL",
        "\\begin{abstract}Parsers recover syntax trees. Accuracy keeps rising.\\end{abstract}\n\\section{Introduction}\nWe present a parser. It runs in linear time.",
        "\\begin{abstract}Parsers recover syntax trees. Accuracy keeps rsiing.\\end{abstract}\n\\section{Introduction}\nWe present a neural parser. It runs in linear time.",
    ),
    (
        "p2",
        "math.CO",
        "\\section{Introduction}\nEvery planar graph is four colorable. We give a shorter proof.\n\\section{Conclusion}\nThe method extends to surfaces.",
        "\\section{Introduction}\nEvery planar graph is four colorable. We give a much shorter proof.\n\\section{Conclusion}\nThe method extends to surfaces.",
    ),
    (
        "p3",
        "cs.LG",
        "\\section{Introduction}\nGradient descent finds minima. Momentum helps.",
        "\\section{Introduction}\nGradient descent finds minima.",
    ),
];

fn write_demo_corpus(root: &Path) -> std::io::Result<()> {
    for (id, category, v1, v2) in PAPERS {
        for (label, text) in [("v1", v1), ("v2", v2)] {
            fs::create_dir_all(root.join(id).join(label))?;
            fs::write(root.join(id).join(label).join("main.tex"), text)?;
        }
        let meta = format!(
            r#"{{"paper_id":"{id}","author_count":2,"categories":["{category}"],"versions":["v1","v2"]}}"#
        );
        fs::write(root.join(id).join("metadata.json"), meta)?;
    }
    Ok(())
}

pub fn run_example_in(corpus_root: PathBuf, out: PathBuf) -> revmine::Result<PairsReport> {
    let cfg = PipelineConfig {
        corpus_root: Some(corpus_root),
        out,
        sample_n: 1,
        dump_alignment: true,
        ..Default::default()
    };
    let report = pipeline::run_pairs(&cfg)?;
    println!(
        "{} papers, {} pairs, {} labelable",
        report.papers, report.pairs, report.labelable
    );
    for pair in pipeline::run_sample(&cfg)? {
        println!("sampled: {}", pair.to_json_line());
    }
    print!("{}", pipeline::run_stats(&cfg)?.to_tsv(cfg.top_k));
    Ok(report)
}

pub fn run_example() -> revmine::Result<PairsReport> {
    let dir = tempfile::tempdir().map_err(|e| revmine::Error::Config(e.to_string()))?;
    let root = dir.path().join("corpus");
    write_demo_corpus(&root).map_err(|e| revmine::Error::Config(e.to_string()))?;
    run_example_in(root, dir.path().join("out"))
}

fn main() -> revmine::Result<()> {
    let mut args = std::env::args().skip(1);
    match (args.next(), args.next()) {
        (Some(root), Some(out)) => run_example_in(root.into(), out.into()).map(drop),
        _ => run_example().map(drop),
    }
}
