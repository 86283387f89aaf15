//! Figure-style corpus tables from classified pairs and paper summaries.
//!
//! Run with `cargo run --example corpus_statistics`.

use revmine::stats::DEFAULT_AUTHOR_CAP;
use revmine::{CorpusStats, PaperSummary, Position, RevisionPair, RevisionType};

fn summary(
    id: &str,
    category: &str,
    authors: u32,
    versions: usize,
    sentences: usize,
    changed: bool,
) -> PaperSummary {
    PaperSummary {
        paper_id: id.into(),
        primary_category: category.into(),
        author_count: authors,
        version_count: versions,
        v1_sentences: sentences,
        text_changed: changed,
    }
}

fn pair(id: &str, position: Position, rtype: RevisionType, index: usize) -> RevisionPair {
    RevisionPair {
        paper_id: id.into(),
        section_title: position.as_str().into(),
        position,
        rtype,
        v1_index: index,
        v2_index: None,
        v1_text: format!("sentence {index}"),
        v2_text: None,
        similarity: None,
    }
}

pub fn run_example() -> CorpusStats {
    let papers = vec![
        summary("p1", "cs.CL", 2, 2, 4, true),
        summary("p2", "math.CO", 7, 3, 3, true),
        summary("p3", "cs.CL", 1, 2, 2, false),
        summary("p4", "cs.LG", 3, 1, 5, false),
    ];
    let pairs = vec![
        pair("p1", Position::Abstract, RevisionType::Typo, 0),
        pair("p1", Position::Introduction, RevisionType::Rewrite, 1),
        pair("p1", Position::Middle, RevisionType::Unchanged, 2),
        pair("p1", Position::Conclusion, RevisionType::Deletion, 3),
        pair("p2", Position::Middle, RevisionType::Rewrite, 0),
        pair("p2", Position::Middle, RevisionType::Rewrite, 1),
        pair("p2", Position::Conclusion, RevisionType::Unchanged, 2),
        pair("p3", Position::Introduction, RevisionType::Unchanged, 0),
        pair("p3", Position::Middle, RevisionType::Unchanged, 1),
    ];
    let stats = CorpusStats::compute(&papers, &pairs, DEFAULT_AUTHOR_CAP);
    print!("{}", stats.to_tsv(5));
    stats
}

fn main() {
    run_example();
}
