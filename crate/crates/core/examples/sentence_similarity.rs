//! Idf-weighted LCS similarity between sentences.
//!
//! Run with `cargo run --example sentence_similarity`.

use revmine::{similarity, tokenize, IdfModel};

pub fn run_example() -> revmine::Result<Vec<f64>> {
    // Document frequencies come from one token set per paper.
    let corpus = [
        "we show that the method converges quickly .",
        "the method fails on sparse graphs .",
        "we prove a lower bound for the problem .",
        "the bound holds for every [MATH] .",
    ];
    let idf = IdfModel::from_token_sets(corpus.iter().map(|d| tokenize(d)))?;
    for tok in ["the", "method", "converges", "[MATH]", "unseen"] {
        println!("idf({tok}) = {:.4}", idf.idf(tok));
    }

    let pairs = [
        (
            "We show that the method converges quickly .",
            "We show that the method converges rapidly .",
        ),
        (
            "We show that the method converges quickly .",
            "The method fails on sparse graphs .",
        ),
        (
            "The bound holds for every [MATH] .",
            "The bound holds for all [MATH] .",
        ),
    ];
    let mut scores = Vec::new();
    for (a, b) in pairs {
        let s = similarity(&tokenize(a), &tokenize(b), &idf);
        println!("{s}  {a:?} / {b:?}");
        scores.push(s.value());
    }
    Ok(scores)
}

fn main() -> revmine::Result<()> {
    run_example().map(drop)
}
