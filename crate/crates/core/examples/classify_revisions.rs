//! Sort aligned sentence pairs into typo and rewrite revisions by the
//! character distance of their changed token spans.
//!
//! Run with `cargo run --example classify_revisions`.

use revmine::revision::{diff_spans, DEFAULT_TYPO_THRESHOLD};
use revmine::{classify_pair, tokenize, RevisionType};

pub fn run_example() -> Vec<RevisionType> {
    let pairs = [
        ("We propose a novel metod .", "We propose a novel method ."),
        (
            "This may improve accuracy .",
            "This must improve accuracy .",
        ),
        (
            "The results are preliminary .",
            "The results are preliminary .",
        ),
        ("We can not rule it out .", "We cannot rule it out ."),
        ("It is fast .", "It is remarkably fast ."),
    ];
    let mut out = Vec::new();
    for (a, b) in pairs {
        let (ta, tb) = (tokenize(a), tokenize(b));
        let rtype = classify_pair(&ta, &tb, DEFAULT_TYPO_THRESHOLD);
        println!("{rtype:<9} {a:?} -> {b:?}");
        for span in diff_spans(&ta, &tb) {
            println!(
                "          {:?} -> {:?} (distance {})",
                span.v1_run.join(" "),
                span.v2_run.join(" "),
                span.distance()
            );
        }
        out.push(rtype);
    }
    out
}

fn main() {
    run_example();
}
