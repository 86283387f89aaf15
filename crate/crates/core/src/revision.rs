//! Typed revisions from sentence alignments.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::align::{lcs_pairs, Alignment};
use crate::error::{Error, Result};
use crate::ingest::{Document, Position, Sentence};
use crate::lexical::edit_distance;

pub const DEFAULT_TYPO_THRESHOLD: usize = 3;
pub const DEFAULT_SIM_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevisionType {
    Deletion,
    Typo,
    Rewrite,
    /// Matched and token-identical. Not a revision; kept so per-paper
    /// sentence totals can be recovered from the pair stream.
    Unchanged,
}

impl RevisionType {
    pub const CHANGES: [RevisionType; 3] = [
        RevisionType::Deletion,
        RevisionType::Typo,
        RevisionType::Rewrite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RevisionType::Deletion => "deletion",
            RevisionType::Typo => "typo",
            RevisionType::Rewrite => "rewrite",
            RevisionType::Unchanged => "unchanged",
        }
    }

    pub fn is_change(self) -> bool {
        self != RevisionType::Unchanged
    }
}

impl fmt::Display for RevisionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Maximal run of non-common tokens between two LCS anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangedSpan {
    pub v1_run: Vec<String>,
    pub v2_run: Vec<String>,
}

impl ChangedSpan {
    /// Character edit distance between the space-joined runs.
    pub fn distance(&self) -> usize {
        edit_distance(&self.v1_run.join(" "), &self.v2_run.join(" "))
    }
}

/// Changed spans of a token-level diff. The LCS is always computed with the
/// lexicographically smaller sequence first, so swapping the arguments
/// swaps the runs and nothing else.
pub fn diff_spans<S: AsRef<str>>(v1: &[S], v2: &[S]) -> Vec<ChangedSpan> {
    let key = |s: &[S]| s.iter().map(|t| t.as_ref().to_string()).collect::<Vec<_>>();
    let (a, b) = (key(v1), key(v2));
    if a > b {
        return diff_spans_oriented(&b, &a)
            .into_iter()
            .map(|s| ChangedSpan {
                v1_run: s.v2_run,
                v2_run: s.v1_run,
            })
            .collect();
    }
    diff_spans_oriented(&a, &b)
}

fn diff_spans_oriented(a: &[String], b: &[String]) -> Vec<ChangedSpan> {
    let anchors = lcs_pairs(a.len(), b.len(), |i, j| a[i] == b[j]);
    let mut spans = Vec::new();
    let (mut pi, mut pj) = (0, 0);
    for (i, j) in anchors
        .into_iter()
        .chain(std::iter::once((a.len(), b.len())))
    {
        if i > pi || j > pj {
            spans.push(ChangedSpan {
                v1_run: a[pi..i].to_vec(),
                v2_run: b[pj..j].to_vec(),
            });
        }
        pi = i + 1;
        pj = j + 1;
    }
    spans
}

/// Typo when every changed span is within `typo_threshold - 1` character
/// edits; Rewrite otherwise.
pub fn classify_pair<S: AsRef<str>>(v1: &[S], v2: &[S], typo_threshold: usize) -> RevisionType {
    let spans = diff_spans(v1, v2);
    if spans.is_empty() {
        RevisionType::Unchanged
    } else if spans.iter().all(|s| s.distance() < typo_threshold) {
        RevisionType::Typo
    } else {
        RevisionType::Rewrite
    }
}

/// One classified sentence of the first version.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RevisionPair {
    pub paper_id: String,
    pub section_title: String,
    pub position: Position,
    pub rtype: RevisionType,
    /// Document-wide sentence ordinal in the first version.
    pub v1_index: usize,
    #[serde(default)]
    pub v2_index: Option<usize>,
    pub v1_text: String,
    #[serde(default)]
    pub v2_text: Option<String>,
    #[serde(default)]
    pub similarity: Option<f64>,
}

impl RevisionPair {
    /// One JSON object, fixed key order, similarity with six decimals,
    /// absent fields omitted.
    pub fn to_json_line(&self) -> String {
        let s = |v: &str| serde_json::to_string(v).expect("strings always serialize");
        let mut out = format!(
            "{{\"paper_id\":{},\"section_title\":{},\"position\":\"{}\",\"rtype\":\"{}\",\"v1_index\":{}",
            s(&self.paper_id),
            s(&self.section_title),
            self.position,
            self.rtype,
            self.v1_index
        );
        if let Some(j) = self.v2_index {
            out.push_str(&format!(",\"v2_index\":{j}"));
        }
        out.push_str(&format!(",\"v1_text\":{}", s(&self.v1_text)));
        if let Some(t) = &self.v2_text {
            out.push_str(&format!(",\"v2_text\":{}", s(t)));
        }
        if let Some(sim) = self.similarity {
            out.push_str(&format!(",\"similarity\":{sim:.6}"));
        }
        out.push('}');
        out
    }
}

pub fn write_jsonl<'a, W, I>(mut w: W, pairs: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RevisionPair>,
{
    for p in pairs {
        writeln!(w, "{}", p.to_json_line())?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(reader: R, path: &Path) -> Result<Vec<RevisionPair>> {
    let mut out = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let pair = serde_json::from_str(&line).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            line: no + 1,
            source,
        })?;
        out.push(pair);
    }
    Ok(out)
}

/// Deletions for unaligned first-version sentences and typed pairs for
/// links, in first-version order. Sentences only present in the second
/// version are not emitted.
pub fn classify_alignment(
    doc_v1: &Document,
    doc_v2: &Document,
    alignment: &Alignment,
    typo_threshold: usize,
) -> Vec<RevisionPair> {
    let flat1: Vec<(usize, &Sentence)> = doc_v1.sentences().collect();
    let flat2: Vec<&Sentence> = doc_v2.sentences().map(|(_, s)| s).collect();
    let base = |i: usize, rtype: RevisionType| {
        let (sec, sent) = flat1[i];
        let section = &doc_v1.sections[sec];
        RevisionPair {
            paper_id: doc_v1.paper_id.clone(),
            section_title: section.raw_title.clone(),
            position: section.position,
            rtype,
            v1_index: i,
            v2_index: None,
            v1_text: sent.text.clone(),
            v2_text: None,
            similarity: None,
        }
    };

    let mut out: Vec<RevisionPair> = Vec::with_capacity(flat1.len());
    out.extend(
        alignment
            .deleted_v1
            .iter()
            .map(|&i| base(i, RevisionType::Deletion)),
    );
    for link in &alignment.links {
        let s1 = flat1[link.i].1;
        let s2 = flat2[link.j];
        let mut p = base(
            link.i,
            classify_pair(&s1.tokens, &s2.tokens, typo_threshold),
        );
        p.v2_index = Some(link.j);
        p.v2_text = Some(s2.text.clone());
        p.similarity = Some(link.sim.value());
        out.push(p);
    }
    out.sort_by_key(|p| p.v1_index);
    out
}

pub fn revision_count(pairs: &[RevisionPair]) -> usize {
    pairs.iter().filter(|p| p.rtype.is_change()).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelFilter {
    /// Pairs need similarity strictly above this.
    pub sim_threshold: f64,
    pub positions: BTreeSet<Position>,
}

impl Default for LabelFilter {
    fn default() -> Self {
        LabelFilter {
            sim_threshold: DEFAULT_SIM_THRESHOLD,
            positions: [Position::Abstract, Position::Introduction]
                .into_iter()
                .collect(),
        }
    }
}

impl LabelFilter {
    pub fn accepts(&self, p: &RevisionPair) -> bool {
        matches!(p.rtype, RevisionType::Typo | RevisionType::Rewrite)
            && p.similarity.is_some_and(|s| s > self.sim_threshold)
            && self.positions.contains(&p.position)
    }
}

/// Matched changed pairs worth showing to annotators.
pub fn filter_labelable(pairs: &[RevisionPair], filter: &LabelFilter) -> Vec<RevisionPair> {
    pairs
        .iter()
        .filter(|p| filter.accepts(p))
        .cloned()
        .collect()
}

/// Uniform sample without replacement, returned in input order.
pub fn sample_pairs(pairs: &[RevisionPair], n: usize, seed: u64) -> Result<Vec<RevisionPair>> {
    if n > pairs.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            available: pairs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, pairs.len(), n).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| pairs[i].clone()).collect())
}
