//! Tokenization, idf weighting and the sentence similarity built on an
//! idf-weighted longest common subsequence.
//!
//! Similarity between two token sequences is
//!
//! ```text
//! sim(a, b) = wlcs(a, b) / max(sum idf(a), sum idf(b))
//! ```
//!
//! where `wlcs` is the maximum total idf weight over all common
//! subsequences. Multiplying every idf by the same positive constant leaves
//! `sim` unchanged, so the logarithm base used for idf does not matter.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::ingest::Document;

/// Placeholder inserted for every math region. Never carries idf weight.
pub const MATH_TOKEN: &str = "[MATH]";

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Lowercased tokens: whitespace split, with leading and trailing
/// punctuation peeled off into one-character tokens. `[MATH]` survives as a
/// single token.
pub fn tokenize(text: &str) -> Vec<String> {
    split_words(text, true)
}

/// Same split as [`tokenize`] but case preserving. Used to render sentence
/// text with punctuation detached ("here ." rather than "here.").
pub fn split_words(text: &str, lowercase: bool) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        split_word(word, lowercase, &mut out);
    }
    out
}

fn split_word(word: &str, lowercase: bool, out: &mut Vec<String>) {
    let mut rest = word;
    while let Some(c) = rest.chars().next() {
        if rest.starts_with(MATH_TOKEN) || !is_punct(c) {
            break;
        }
        out.push(c.to_string());
        rest = &rest[c.len_utf8()..];
    }
    let mut trailing = Vec::new();
    while let Some(c) = rest.chars().next_back() {
        if rest.ends_with(MATH_TOKEN) || !is_punct(c) {
            break;
        }
        trailing.push(c);
        rest = &rest[..rest.len() - c.len_utf8()];
    }
    if rest == MATH_TOKEN {
        out.push(MATH_TOKEN.to_string());
    } else if rest.contains(MATH_TOKEN) {
        let mut first = true;
        for piece in rest.split(MATH_TOKEN) {
            if !first {
                out.push(MATH_TOKEN.to_string());
            }
            first = false;
            if !piece.is_empty() {
                split_word(piece, lowercase, out);
            }
        }
    } else if !rest.is_empty() {
        out.push(if lowercase {
            rest.to_lowercase()
        } else {
            rest.to_string()
        });
    }
    out.extend(trailing.into_iter().rev().map(String::from));
}

/// Anything that can weigh a token.
pub trait TokenWeights {
    fn weight(&self, token: &str) -> f64;
}

impl TokenWeights for HashMap<String, f64> {
    fn weight(&self, token: &str) -> f64 {
        self.get(token).copied().unwrap_or(0.0)
    }
}

impl TokenWeights for BTreeMap<String, f64> {
    fn weight(&self, token: &str) -> f64 {
        self.get(token).copied().unwrap_or(0.0)
    }
}

impl<T: TokenWeights + ?Sized> TokenWeights for &T {
    fn weight(&self, token: &str) -> f64 {
        (**self).weight(token)
    }
}

/// Frozen document-frequency table with smoothed idf:
/// `idf(w) = ln((1 + N) / (1 + df(w)))`, and `idf([MATH]) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdfModel {
    doc_count: usize,
    df: HashMap<String, usize>,
}

impl IdfModel {
    /// Counts each token at most once per document.
    pub fn from_token_sets<D, T, S>(documents: D) -> Result<Self>
    where
        D: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut doc_count = 0;
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in documents {
            doc_count += 1;
            let seen: HashSet<String> = doc.into_iter().map(|t| t.as_ref().to_string()).collect();
            for tok in seen {
                *df.entry(tok).or_insert(0) += 1;
            }
        }
        if doc_count == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(IdfModel { doc_count, df })
    }

    /// One document per paper; callers pass first versions only.
    pub fn build(documents: &[Document]) -> Result<Self> {
        Self::from_token_sets(documents.iter().map(|d| d.tokens()))
    }

    pub fn from_df(doc_count: usize, df: HashMap<String, usize>) -> Result<Self> {
        if doc_count == 0 {
            return Err(Error::EmptyCorpus);
        }
        if let Some((tok, n)) = df.iter().find(|(_, &n)| n > doc_count) {
            return Err(Error::MalformedIdf {
                line: 0,
                message: format!("df({tok}) = {n} exceeds N = {doc_count}"),
            });
        }
        Ok(IdfModel { doc_count, df })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn df(&self, token: &str) -> usize {
        self.df.get(token).copied().unwrap_or(0)
    }

    pub fn vocabulary_len(&self) -> usize {
        self.df.len()
    }

    pub fn idf(&self, token: &str) -> f64 {
        if token == MATH_TOKEN {
            return 0.0;
        }
        let n = self.doc_count as f64;
        ((1.0 + n) / (1.0 + self.df(token) as f64)).ln()
    }

    /// Writes `N=<int>` followed by `token<TAB>df` lines in token order.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "N={}", self.doc_count)?;
        let sorted: BTreeMap<_, _> = self.df.iter().collect();
        for (tok, n) in sorted {
            writeln!(w, "{tok}\t{n}")?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("tokens are utf-8")
    }

    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, message: String| Error::MalformedIdf {
            line: line + 1,
            message,
        };
        let (_, header) = lines
            .next()
            .ok_or_else(|| bad(0, "missing header".into()))?;
        let doc_count: usize = header
            .strip_prefix("N=")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| bad(0, format!("expected `N=<int>`, got `{header}`")))?;
        let mut df = HashMap::new();
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (tok, n) = line
                .split_once('\t')
                .ok_or_else(|| bad(no, "expected `token<TAB>df`".into()))?;
            let n: usize = n
                .parse()
                .map_err(|_| bad(no, format!("df `{n}` is not an integer")))?;
            if df.insert(tok.to_string(), n).is_some() {
                return Err(bad(no, format!("duplicate token `{tok}`")));
            }
        }
        Self::from_df(doc_count, df)
    }
}

impl TokenWeights for IdfModel {
    fn weight(&self, token: &str) -> f64 {
        self.idf(token)
    }
}

/// Similarity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(value: f64) -> Self {
        SimilarityScore(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Token sequence with its weights resolved once.
#[derive(Debug, Clone)]
pub struct WeightedTokens<'a> {
    tokens: &'a [String],
    weights: Vec<f64>,
    total: f64,
}

impl<'a> WeightedTokens<'a> {
    pub fn new<W: TokenWeights + ?Sized>(tokens: &'a [String], weights: &W) -> Self {
        let weights: Vec<f64> = tokens.iter().map(|t| weights.weight(t)).collect();
        let total = weights.iter().sum();
        WeightedTokens {
            tokens,
            weights,
            total,
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn lcs(&self, other: &WeightedTokens<'_>) -> f64 {
        lcs_table(self.tokens, other.tokens, |i| self.weights[i])
    }

    pub fn similarity(&self, other: &WeightedTokens<'_>) -> SimilarityScore {
        let denom = self.total.max(other.total);
        if denom <= 0.0 {
            return SimilarityScore::new(if self.tokens == other.tokens {
                1.0
            } else {
                0.0
            });
        }
        SimilarityScore::new(self.lcs(other) / denom)
    }
}

// Two-row DP; `gain(i)` is the weight of a[i] when it matches.
fn lcs_table<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T], gain: impl Fn(usize) -> f64) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut prev = vec![0.0f64; b.len() + 1];
    let mut cur = vec![0.0f64; b.len() + 1];
    for (i, ta) in a.iter().enumerate() {
        let g = gain(i);
        for (j, tb) in b.iter().enumerate() {
            let mut best = prev[j + 1].max(cur[j]);
            if ta.as_ref() == tb.as_ref() {
                best = best.max(prev[j] + g);
            }
            cur[j + 1] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Maximum total weight over the common subsequences of `a` and `b`.
pub fn weighted_lcs<S, W>(a: &[S], b: &[S], weights: &W) -> f64
where
    S: AsRef<str>,
    W: TokenWeights + ?Sized,
{
    lcs_table(a, b, |i| weights.weight(a[i].as_ref()))
}

pub fn similarity<S, W>(a: &[S], b: &[S], weights: &W) -> SimilarityScore
where
    S: AsRef<str>,
    W: TokenWeights + ?Sized,
{
    let sum = |s: &[S]| s.iter().map(|t| weights.weight(t.as_ref())).sum::<f64>();
    let denom = sum(a).max(sum(b));
    if denom <= 0.0 {
        let equal = a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.as_ref() == y.as_ref());
        return SimilarityScore::new(if equal { 1.0 } else { 0.0 });
    }
    SimilarityScore::new(weighted_lcs(a, b, weights) / denom)
}

/// Character-level Levenshtein distance with unit costs.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            let cost = usize::from(ca != cb);
            row[j + 1] = (up + 1).min(row[j] + 1).min(diag + cost);
            diag = up;
        }
    }
    row[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    fn xyz() -> HashMap<String, f64> {
        [("x", 1.0), ("y", 2.0), ("z", 3.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("The Algorithm, proposed."),
            toks(&["the", "algorithm", ",", "proposed", "."])
        );
        assert_eq!(tokenize("[MATH] holds"), toks(&["[MATH]", "holds"]));
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("([MATH]),"), toks(&["(", "[MATH]", ")", ","]));
        assert_eq!(tokenize("[MATH]-based"), toks(&["[MATH]", "-", "based"]));
        assert_eq!(tokenize("don't stop"), toks(&["don't", "stop"]));
    }

    #[test]
    fn idf_examples() {
        let m = IdfModel::from_token_sets(vec![vec!["the", "a"], vec!["the"]]).unwrap();
        assert_eq!(m.idf("the"), 0.0);
        assert!((m.idf("a") - 0.405465).abs() < 1e-6);
        assert!((m.idf("unseen") - 1.098612).abs() < 1e-6);
        assert_eq!(m.idf(MATH_TOKEN), 0.0);
    }

    #[test]
    fn idf_counts_once_per_document() {
        let m = IdfModel::from_token_sets(vec![vec!["a", "a", "a"], vec!["b"]]).unwrap();
        assert_eq!(m.df("a"), 1);
    }

    #[test]
    fn empty_corpus_rejected() {
        let docs: Vec<Vec<&str>> = vec![];
        assert!(matches!(
            IdfModel::from_token_sets(docs),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn idf_tsv_roundtrip() {
        let m = IdfModel::from_token_sets(vec![vec!["b", "a"], vec!["a", "[MATH]"]]).unwrap();
        let text = m.to_tsv();
        assert_eq!(text, "N=2\n[MATH]\t1\na\t2\nb\t1\n");
        assert_eq!(IdfModel::parse_tsv(&text).unwrap(), m);
    }

    #[test]
    fn idf_tsv_errors() {
        assert!(IdfModel::parse_tsv("").is_err());
        assert!(IdfModel::parse_tsv("M=2\n").is_err());
        assert!(IdfModel::parse_tsv("N=2\nfoo\n").is_err());
        assert!(IdfModel::parse_tsv("N=2\nfoo\t3\n").is_err());
        assert!(IdfModel::parse_tsv("N=2\nfoo\t1\nfoo\t1\n").is_err());
    }

    #[test]
    fn weighted_lcs_examples() {
        let w = xyz();
        assert_eq!(
            weighted_lcs(&toks(&["x", "y", "z"]), &toks(&["x", "z"]), &w),
            4.0
        );
        assert_eq!(
            weighted_lcs(&toks(&["x", "y", "z"]), &toks(&["x", "y", "z"]), &w),
            6.0
        );
        assert_eq!(weighted_lcs(&toks(&["x"]), &toks(&["y", "z"]), &w), 0.0);
    }

    #[test]
    fn similarity_examples() {
        let w = xyz();
        let s = similarity(&toks(&["x", "y", "z"]), &toks(&["x", "z"]), &w).value();
        assert!((s - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(
            similarity(&toks(&["x", "y"]), &toks(&["x", "y"]), &w).value(),
            1.0
        );
        assert_eq!(similarity(&toks(&["x"]), &toks(&["z"]), &w).value(), 0.0);
    }

    #[test]
    fn zero_weight_similarity() {
        let w = HashMap::new();
        assert_eq!(
            similarity(&toks(&["a", "b"]), &toks(&["a", "b"]), &w).value(),
            1.0
        );
        assert_eq!(
            similarity(&toks(&["a", "b"]), &toks(&["b", "a"]), &w).value(),
            0.0
        );
        assert_eq!(similarity::<String, _>(&[], &[], &w).value(), 1.0);
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance("cat", "cat"), 0);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("teh", "the"), 2);
        assert_eq!(edit_distance("studied", "proposed"), 6);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
    }

    #[test]
    fn scaling_weights_leaves_similarity_unchanged() {
        let w = xyz();
        let scaled: HashMap<String, f64> = w.iter().map(|(k, v)| (k.clone(), v * 7.5)).collect();
        let a = toks(&["x", "y", "z", "x"]);
        let b = toks(&["z", "x", "y"]);
        let s1 = similarity(&a, &b, &w).value();
        let s2 = similarity(&a, &b, &scaled).value();
        assert!((s1 - s2).abs() < 1e-12);
    }

    fn unweighted_lcs(a: &[String], b: &[String]) -> usize {
        // Exhaustive: the longest subset of `a` that is a subsequence of `b`.
        let mut best = 0;
        for mask in 0u32..(1 << a.len()) {
            let picked: Vec<&String> = (0..a.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &a[i])
                .collect();
            let mut it = b.iter();
            if picked.iter().all(|p| it.any(|t| t == *p)) {
                best = best.max(picked.len());
            }
        }
        best
    }

    fn seq() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..=8)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn unit_weights_give_plain_lcs(a in seq(), b in seq()) {
            let ones: HashMap<String, f64> =
                ["a", "b", "c", "d"].iter().map(|t| (t.to_string(), 1.0)).collect();
            prop_assert_eq!(weighted_lcs(&a, &b, &ones), unweighted_lcs(&a, &b) as f64);
        }

        #[test]
        fn similarity_symmetric_and_bounded(
            a in seq(), b in seq(),
            ws in prop::collection::vec(0.0f64..5.0, 4),
        ) {
            let w: HashMap<String, f64> = ["a", "b", "c", "d"]
                .iter().zip(ws).map(|(t, v)| (t.to_string(), v)).collect();
            let ab = similarity(&a, &b, &w).value();
            let ba = similarity(&b, &a, &w).value();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }

        #[test]
        fn edit_distance_metric(a in "[abc]{0,6}", b in "[abc]{0,6}", c in "[abc]{0,6}") {
            let ab = edit_distance(&a, &b);
            prop_assert_eq!(ab, edit_distance(&b, &a));
            prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
            prop_assert_eq!(edit_distance(&a, &a), 0);
        }

        #[test]
        fn idf_monotone_in_df(d1 in 0usize..20, d2 in 0usize..20) {
            let df: HashMap<String, usize> =
                [("u".to_string(), d1), ("v".to_string(), d2)].into_iter().collect();
            let m = IdfModel::from_df(20, df).unwrap();
            if d1 <= d2 {
                prop_assert!(m.idf("u") >= m.idf("v"));
            }
            prop_assert!(m.idf("u") >= 0.0);
        }

        #[test]
        fn tokens_stable_under_rerender(text in "[A-Za-z.,()\\[\\] ]{0,30}") {
            let rendered = split_words(&text, false).join(" ");
            prop_assert_eq!(tokenize(&rendered), tokenize(&text));
        }
    }
}
