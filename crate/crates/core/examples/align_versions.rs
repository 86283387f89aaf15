//! Align two versions of a paper: sections by title, then sentences by
//! dynamic programming with a mismatch penalty.
//!
//! Run with `cargo run --example align_versions`.

use revmine::align::{align_documents, DEFAULT_MISMATCH_PENALTY};
use revmine::{extract_text, IdfModel};

const V1: &str = r"\section{Introduction}
Sentence alignment finds matching sentences. Deleted text vanishes here.
Our corpus spans many categories.
\section{Results}
Typos are common in early drafts.
";

const V2: &str = r"\section{Introduction}
Sentence alignment finds corresponding sentences. Our corpus spans many categories.
A brand new closing remark appears.
\section{Results}
Typos are common in early drafts.
";

pub fn run_example() -> revmine::Result<revmine::align::DocumentAlignment> {
    let v1 = extract_text(&[V1])?.into_document("demo", "v1");
    let v2 = extract_text(&[V2])?.into_document("demo", "v2");
    // A second, unrelated document keeps common words from dominating idf.
    let other =
        extract_text(&["Other papers share the words are and in."])?.into_document("other", "v1");
    let idf = IdfModel::build(&[v1.clone(), other])?;

    let aligned = align_documents(&v1, &v2, &idf, DEFAULT_MISMATCH_PENALTY);
    let s1: Vec<_> = v1.sentences().map(|(_, s)| s.text.as_str()).collect();
    let s2: Vec<_> = v2.sentences().map(|(_, s)| s.text.as_str()).collect();
    for l in &aligned.sentences.links {
        println!(
            "{} <-> {} ({})\n  {}\n  {}",
            l.i, l.j, l.sim, s1[l.i], s2[l.j]
        );
    }
    for &i in &aligned.sentences.deleted_v1 {
        println!("deleted: {}", s1[i]);
    }
    for &j in &aligned.sentences.added_v2 {
        println!("added:   {}", s2[j]);
    }
    println!("dp score {:.6}", aligned.sentences.dp_score);
    Ok(aligned)
}

fn main() -> revmine::Result<()> {
    run_example().map(drop)
}
