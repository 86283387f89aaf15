//! Extract sectioned, sentence-split text from LaTeX source.
//!
//! Run with `cargo run --example extract_latex`.

use revmine::ingest::{Extractor, Segmenter};
use revmine::Document;

const SOURCE: &str = r"\documentclass{article}
\begin{document}
\begin{abstract}
We bound the mixing time of $k$-colorings. The bound is tight.
\end{abstract}
\section{Introduction}\label{sec:intro}
Markov chains (cf. Fig.~\ref{fig:chain}) mix fast when
\begin{equation}
  \Delta < 2k
\end{equation}
holds. % remove before submission
Prior work by Jerrum et al. gave weaker bounds.
\section{Conclusion}
We expect \emph{similar} results for hypergraphs!
\end{document}
";

pub fn run_example() -> revmine::Result<Document> {
    let extractor = Extractor::new(Segmenter::with_abbreviations(["Thm."]));
    let extraction = extractor.extract(&[SOURCE])?;
    for w in &extraction.warnings {
        println!("warning: {w}");
    }
    println!("{} math regions replaced", extraction.math_regions);
    let doc = extraction.into_document("example", "v1");
    for section in &doc.sections {
        println!("[{}] {:?}", section.position, section.raw_title);
        for s in &section.sentences {
            println!("  {}: {}", s.index, s.text);
        }
    }
    Ok(doc)
}

fn main() -> revmine::Result<()> {
    run_example().map(drop)
}
