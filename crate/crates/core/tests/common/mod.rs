//! Synthetic two-version corpus with planted edits and known counts.
//!
//! Every sentence is "The" followed by seven words no other sentence
//! uses, so each sentence can only align with its own edited copy. Edits:
//!
//! - deletion: the sentence is missing from the second version
//! - typo: the first two letters of one word are swapped (distance 2)
//! - rewrite: one word gains the suffix "ized" (distance 4)
//! - heavy rewrite: five consecutive words gain "ized" (low similarity,
//!   still aligned, never labelable)

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use revmine::{Position, RevisionType};

pub const PAPERS: usize = 10;

const SECTIONS: [(&str, Position); 5] = [
    ("Abstract", Position::Abstract),
    ("Introduction", Position::Introduction),
    ("Method", Position::Middle),
    ("Experiments", Position::Middle),
    ("Conclusion", Position::Conclusion),
];

const CATEGORIES: [&str; 3] = ["cs.CL", "cs.LG", "math.CO"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edit {
    Keep,
    Delete,
    Typo,
    Rewrite,
    Heavy,
}

fn edit_for(p: usize, s: usize, k: usize) -> Edit {
    match (p * 3 + s * 2 + k) % 6 {
        0 => Edit::Delete,
        1 => Edit::Typo,
        2 => Edit::Rewrite,
        3 => Edit::Heavy,
        _ => Edit::Keep,
    }
}

fn letter(n: usize) -> char {
    (b'a' + n as u8) as char
}

fn word(p: usize, s: usize, k: usize, w: usize) -> String {
    format!("ka{}{}{}{}", letter(p), letter(s), letter(k), letter(w))
}

fn sentence(p: usize, s: usize, k: usize, edit: Edit, math: bool) -> String {
    let mut words: Vec<String> = (0..7).map(|w| word(p, s, k, w)).collect();
    match edit {
        Edit::Typo => words[3] = format!("ak{}", &words[3][2..]),
        Edit::Rewrite => words[3].push_str("ized"),
        Edit::Heavy => words[1..6].iter_mut().for_each(|w| w.push_str("ized")),
        Edit::Keep | Edit::Delete => {}
    }
    let tail = if math { " with $x^2 + y$" } else { "" };
    format!("The {}{tail}.", words.join(" "))
}

fn sentences_in(p: usize, s: usize) -> usize {
    4 + (p + s) % 3
}

/// Planted outcome of every first-version sentence, by position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Planted {
    pub counts: BTreeMap<(Position, RevisionType), usize>,
}

impl Planted {
    pub fn get(&self, p: Position, t: RevisionType) -> usize {
        self.counts.get(&(p, t)).copied().unwrap_or(0)
    }

    /// Counts with abstract folded into introduction.
    pub fn folded(&self, p: Position, t: RevisionType) -> usize {
        match p {
            Position::Introduction => {
                self.get(Position::Abstract, t) + self.get(Position::Introduction, t)
            }
            Position::Abstract => 0,
            _ => self.get(p, t),
        }
    }

    pub fn total(&self, t: RevisionType) -> usize {
        Position::ALL.iter().map(|&p| self.get(p, t)).sum()
    }
}

fn version_source(p: usize, second: bool, planted: &mut Planted) -> String {
    let mut src =
        String::from("\\documentclass{article}\n\\title{Paper}\n\\begin{document}\n\\maketitle\n");
    if second {
        src.push_str("% revised after review\n");
    }
    for (s, (title, position)) in SECTIONS.iter().enumerate() {
        if s == 0 {
            src.push_str("\\begin{abstract}\n");
        } else {
            src.push_str(&format!("\\section{{{title}}}\\label{{sec:{s}}}\n"));
        }
        for k in 0..sentences_in(p, s) {
            let edit = edit_for(p, s, k);
            let math = *position == Position::Middle && k == 0;
            if !second {
                let t = match edit {
                    Edit::Keep => RevisionType::Unchanged,
                    Edit::Delete => RevisionType::Deletion,
                    Edit::Typo => RevisionType::Typo,
                    Edit::Rewrite | Edit::Heavy => RevisionType::Rewrite,
                };
                *planted.counts.entry((*position, t)).or_insert(0) += 1;
                src.push_str(&sentence(p, s, k, Edit::Keep, math));
            } else if edit != Edit::Delete {
                src.push_str(&sentence(p, s, k, edit, math));
            } else {
                continue;
            }
            src.push_str(if k % 2 == 0 { " " } else { "\n" });
        }
        if !second && s == 2 {
            src.push_str("% The kazzzz note. Never extracted.\n");
        }
        src.push_str("\n\n");
        if s == 0 {
            src.push_str("\\end{abstract}\n");
        }
    }
    src.push_str("\\end{document}\n");
    src
}

pub fn write_paper(root: &Path, id: &str, authors: u32, category: &str, versions: &[(&str, &str)]) {
    let dir = root.join(id);
    let labels: Vec<&str> = versions.iter().map(|(l, _)| *l).collect();
    for (label, text) in versions {
        fs::create_dir_all(dir.join(label)).unwrap();
        fs::write(dir.join(label).join("main.tex"), text).unwrap();
    }
    let meta = serde_json::json!({
        "paper_id": id,
        "author_count": authors,
        "categories": [category],
        "versions": labels,
    });
    fs::write(dir.join("metadata.json"), meta.to_string()).unwrap();
}

/// Writes the ten-paper corpus under `root` and returns what was planted.
pub fn write_corpus(root: &Path) -> Planted {
    let mut planted = Planted::default();
    for p in 0..PAPERS {
        let v1 = version_source(p, false, &mut planted);
        let v2 = version_source(p, true, &mut Planted::default());
        write_paper(
            root,
            &format!("paper{p:02}"),
            1 + (p % 7) as u32,
            CATEGORIES[p % CATEGORIES.len()],
            &[("v1", &v1), ("v2", &v2)],
        );
    }
    planted
}

/// Every regular file under `dir` with its bytes, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path
                    .strip_prefix(base)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
