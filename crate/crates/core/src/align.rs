//! Macro alignment of sections by title, then monotone sentence alignment
//! by dynamic programming.
//!
//! The sentence objective is
//!
//! ```text
//! M(i, j) = max(M(i-1, j), M(i, j-1), M(i-1, j-1) + sim(i, j) - penalty)
//! ```
//!
//! with `M(0, .) = M(., 0) = 0`. Skipping costs nothing, so a link only
//! survives when its similarity beats the mismatch penalty. Links are
//! one-to-one and never cross.

use std::ops::Range;

use serde::Serialize;

use crate::ingest::{Document, Sentence};
use crate::lexical::{SimilarityScore, TokenWeights, WeightedTokens};

pub const DEFAULT_MISMATCH_PENALTY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// Sections with equal normalized titles.
    Title,
    /// Unmatched runs between two title anchors, merged so their sentences
    /// still get aligned.
    Merged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionPair {
    pub v1: Range<usize>,
    pub v2: Range<usize>,
    pub kind: PairKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectionPairing {
    pub pairs: Vec<SectionPair>,
    pub unmatched_v1: Vec<usize>,
    pub unmatched_v2: Vec<usize>,
}

/// Order-preserving title matching: LCS over the title sequences with exact
/// equality. Gaps between anchors become merged pairs when both sides are
/// non-empty, unmatched sections otherwise.
pub fn align_titles<S: AsRef<str>>(v1: &[S], v2: &[S]) -> SectionPairing {
    let anchors = lcs_pairs(v1.len(), v2.len(), |i, j| v1[i].as_ref() == v2[j].as_ref());
    let mut out = SectionPairing::default();
    let (mut pi, mut pj) = (0, 0);
    let gap = |out: &mut SectionPairing, r1: Range<usize>, r2: Range<usize>| {
        if !r1.is_empty() && !r2.is_empty() {
            out.pairs.push(SectionPair {
                v1: r1,
                v2: r2,
                kind: PairKind::Merged,
            });
        } else {
            out.unmatched_v1.extend(r1);
            out.unmatched_v2.extend(r2);
        }
    };
    for (i, j) in anchors {
        gap(&mut out, pi..i, pj..j);
        out.pairs.push(SectionPair {
            v1: i..i + 1,
            v2: j..j + 1,
            kind: PairKind::Title,
        });
        pi = i + 1;
        pj = j + 1;
    }
    gap(&mut out, pi..v1.len(), pj..v2.len());
    out
}

pub fn align_sections(doc_v1: &Document, doc_v2: &Document) -> SectionPairing {
    let t1: Vec<&str> = doc_v1
        .sections
        .iter()
        .map(|s| s.norm_title.as_str())
        .collect();
    let t2: Vec<&str> = doc_v2
        .sections
        .iter()
        .map(|s| s.norm_title.as_str())
        .collect();
    align_titles(&t1, &t2)
}

/// Index pairs of one longest common subsequence. Walks forward over a
/// suffix table, taking a match whenever the elements are equal and
/// otherwise preferring to advance the first sequence.
pub(crate) fn lcs_pairs(
    m: usize,
    n: usize,
    eq: impl Fn(usize, usize) -> bool,
) -> Vec<(usize, usize)> {
    let w = n + 1;
    let mut table = vec![0u32; (m + 1) * w];
    for i in (0..m).rev() {
        for j in (0..n).rev() {
            table[i * w + j] = if eq(i, j) {
                table[(i + 1) * w + j + 1] + 1
            } else {
                table[(i + 1) * w + j].max(table[i * w + j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(table[0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < m && j < n {
        if eq(i, j) {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if table[(i + 1) * w + j] >= table[i * w + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Link {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "serialize_sim")]
    pub sim: SimilarityScore,
}

fn serialize_sim<S: serde::Serializer>(s: &SimilarityScore, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_f64(s.value())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Alignment {
    pub links: Vec<Link>,
    pub deleted_v1: Vec<usize>,
    pub added_v2: Vec<usize>,
    pub dp_score: f64,
}

impl Alignment {
    /// Checks the structural invariants against the input sizes.
    pub fn validate(&self, m: usize, n: usize, penalty: f64) -> Result<(), String> {
        for w in self.links.windows(2) {
            if !(w[0].i < w[1].i && w[0].j < w[1].j) {
                return Err(format!("links cross or repeat: {:?} then {:?}", w[0], w[1]));
            }
        }
        if let Some(l) = self.links.iter().find(|l| l.sim.value() <= penalty) {
            return Err(format!("link {l:?} does not beat penalty {penalty}"));
        }
        let mut seen1 = vec![0u8; m];
        let mut seen2 = vec![0u8; n];
        for l in &self.links {
            *seen1.get_mut(l.i).ok_or("v1 index out of range")? += 1;
            *seen2.get_mut(l.j).ok_or("v2 index out of range")? += 1;
        }
        for &i in &self.deleted_v1 {
            *seen1.get_mut(i).ok_or("deleted index out of range")? += 1;
        }
        for &j in &self.added_v2 {
            *seen2.get_mut(j).ok_or("added index out of range")? += 1;
        }
        if seen1.iter().chain(&seen2).any(|&c| c != 1) {
            return Err("some sentence is not covered exactly once".into());
        }
        Ok(())
    }
}

/// Sentence alignment over an arbitrary similarity function on an
/// `m x n` grid. Backtrace prefers a match, then skipping a v2 sentence,
/// then skipping a v1 sentence.
pub fn align_with(
    m: usize,
    n: usize,
    penalty: f64,
    mut sim: impl FnMut(usize, usize) -> f64,
) -> Alignment {
    assert!(penalty >= 0.0, "mismatch penalty must be non-negative");
    let sims: Vec<f64> = (0..m * n)
        .map(|k| sim(k / n.max(1), k % n.max(1)))
        .collect();
    let w = n + 1;
    let mut dp = vec![0.0f64; (m + 1) * w];
    for i in 1..=m {
        for j in 1..=n {
            let s = sims[(i - 1) * n + (j - 1)];
            let mut best = dp[(i - 1) * w + j].max(dp[i * w + j - 1]);
            if s - penalty > 0.0 {
                best = best.max(dp[(i - 1) * w + j - 1] + s - penalty);
            }
            dp[i * w + j] = best;
        }
    }

    let mut out = Alignment {
        dp_score: dp[m * w + n],
        ..Alignment::default()
    };
    let (mut i, mut j) = (m, n);
    while i > 0 && j > 0 {
        let here = dp[i * w + j];
        let s = sims[(i - 1) * n + (j - 1)];
        if s - penalty > 0.0 && here == dp[(i - 1) * w + j - 1] + s - penalty {
            out.links.push(Link {
                i: i - 1,
                j: j - 1,
                sim: SimilarityScore::new(s),
            });
            i -= 1;
            j -= 1;
        } else if here == dp[i * w + j - 1] {
            out.added_v2.push(j - 1);
            j -= 1;
        } else {
            out.deleted_v1.push(i - 1);
            i -= 1;
        }
    }
    out.deleted_v1.extend(0..i);
    out.added_v2.extend(0..j);
    out.links.reverse();
    out.deleted_v1.sort_unstable();
    out.added_v2.sort_unstable();
    out
}

pub fn align_sentences<W: TokenWeights + ?Sized>(
    v1: &[Sentence],
    v2: &[Sentence],
    weights: &W,
    penalty: f64,
) -> Alignment {
    let w1: Vec<WeightedTokens> = v1
        .iter()
        .map(|s| WeightedTokens::new(&s.tokens, weights))
        .collect();
    let w2: Vec<WeightedTokens> = v2
        .iter()
        .map(|s| WeightedTokens::new(&s.tokens, weights))
        .collect();
    align_with(v1.len(), v2.len(), penalty, |i, j| {
        w1[i].similarity(&w2[j]).value()
    })
}

/// Whole-document alignment. Sentence indices are document-wide ordinals.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentAlignment {
    pub sections: SectionPairing,
    pub sentences: Alignment,
}

fn section_offsets(doc: &Document) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(doc.sections.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for s in &doc.sections {
        acc += s.sentences.len();
        offsets.push(acc);
    }
    offsets
}

/// Aligns sections by title, then sentences within each section pair.
/// Sentences of unmatched sections are deleted (v1) or added (v2).
pub fn align_documents<W: TokenWeights + ?Sized>(
    doc_v1: &Document,
    doc_v2: &Document,
    weights: &W,
    penalty: f64,
) -> DocumentAlignment {
    let pairing = align_sections(doc_v1, doc_v2);
    let off1 = section_offsets(doc_v1);
    let off2 = section_offsets(doc_v2);
    let flat1: Vec<&Sentence> = doc_v1.sentences().map(|(_, s)| s).collect();
    let flat2: Vec<&Sentence> = doc_v2.sentences().map(|(_, s)| s).collect();

    let mut all = Alignment::default();
    for pair in &pairing.pairs {
        let r1 = off1[pair.v1.start]..off1[pair.v1.end];
        let r2 = off2[pair.v2.start]..off2[pair.v2.end];
        let w1: Vec<WeightedTokens> = flat1[r1.clone()]
            .iter()
            .map(|s| WeightedTokens::new(&s.tokens, weights))
            .collect();
        let w2: Vec<WeightedTokens> = flat2[r2.clone()]
            .iter()
            .map(|s| WeightedTokens::new(&s.tokens, weights))
            .collect();
        let a = align_with(w1.len(), w2.len(), penalty, |i, j| {
            w1[i].similarity(&w2[j]).value()
        });
        all.dp_score += a.dp_score;
        all.links.extend(a.links.into_iter().map(|l| Link {
            i: l.i + r1.start,
            j: l.j + r2.start,
            sim: l.sim,
        }));
        all.deleted_v1
            .extend(a.deleted_v1.into_iter().map(|i| i + r1.start));
        all.added_v2
            .extend(a.added_v2.into_iter().map(|j| j + r2.start));
    }
    for &k in &pairing.unmatched_v1 {
        all.deleted_v1.extend(off1[k]..off1[k + 1]);
    }
    for &k in &pairing.unmatched_v2 {
        all.added_v2.extend(off2[k]..off2[k + 1]);
    }
    all.deleted_v1.sort_unstable();
    all.added_v2.sort_unstable();
    debug_assert!(all.validate(flat1.len(), flat2.len(), penalty).is_ok());
    DocumentAlignment {
        sections: pairing,
        sentences: all,
    }
}
