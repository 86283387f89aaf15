//! Turning multi-version LaTeX sources into sectioned, sentence-split
//! documents.

mod corpus;
mod latex;
mod metadata;
mod segment;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexical::{split_words, tokenize};

pub use corpus::{list_papers, load_paper, order_sources, RawPaper, Version};
pub use latex::{extract_text, Extraction, Extractor, Warning};
pub use metadata::{load_metadata, PaperMeta};
pub use segment::{segment_sentences, Segmenter, DEFAULT_ABBREVIATIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Abstract,
    Introduction,
    Middle,
    Conclusion,
}

impl Position {
    pub const ALL: [Position; 4] = [
        Position::Abstract,
        Position::Introduction,
        Position::Middle,
        Position::Conclusion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Position::Abstract => "abstract",
            Position::Introduction => "introduction",
            Position::Middle => "middle",
            Position::Conclusion => "conclusion",
        }
    }

    pub fn parse(s: &str) -> Option<Position> {
        Position::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    /// Words with punctuation detached, case preserved.
    pub text: String,
    pub tokens: Vec<String>,
}

impl Sentence {
    /// Renders a raw segment. `None` when nothing but whitespace is left.
    pub fn new(index: usize, raw: &str) -> Option<Sentence> {
        let text = split_words(raw, false).join(" ");
        if text.is_empty() {
            return None;
        }
        let tokens = tokenize(&text);
        Some(Sentence {
            index,
            text,
            tokens,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub raw_title: String,
    pub norm_title: String,
    pub position: Position,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub paper_id: String,
    pub version_label: String,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn sentence_count(&self) -> usize {
        self.sections.iter().map(|s| s.sentences.len()).sum()
    }

    /// Every sentence in document order with its section index.
    pub fn sentences(&self) -> impl Iterator<Item = (usize, &Sentence)> {
        self.sections
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.sentences.iter().map(move |t| (i, t)))
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences()
            .flat_map(|(_, s)| s.tokens.iter().map(String::as_str))
    }

    /// Sentence texts joined by newlines; equal for two versions exactly
    /// when their extracted text is the same.
    pub fn plain_text(&self) -> String {
        let mut out = String::new();
        for (_, s) in self.sentences() {
            out.push_str(&s.text);
            out.push('\n');
        }
        out
    }
}

/// Lowercase, punctuation removed, whitespace collapsed.
pub fn normalize_title(raw: &str) -> String {
    let mut cleaned = String::with_capacity(raw.len());
    for c in raw.chars() {
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase());
        } else {
            cleaned.push(' ');
        }
    }
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Section position from its normalized title and its place among
/// `total` sections. "summary" only marks a conclusion in the last third of
/// the paper.
pub fn classify_position(norm_title: &str, ordinal: usize, total: usize) -> Position {
    let conclusion = norm_title.contains("conclusion") || norm_title.contains("concluding");
    let late_summary =
        norm_title.split_whitespace().any(|w| w == "summary") && (ordinal + 1) * 3 > total * 2;
    if norm_title.contains("abstract") {
        Position::Abstract
    } else if norm_title.contains("introduction") || norm_title == "intro" {
        Position::Introduction
    } else if conclusion || late_summary {
        Position::Conclusion
    } else {
        Position::Middle
    }
}
