//! Corpus-level change statistics: where changes happen, which categories
//! change most, and how author count relates to revision volume.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ingest::Position;
use crate::revision::{RevisionPair, RevisionType};

pub const DEFAULT_AUTHOR_CAP: u32 = 5;
pub const DEFAULT_TOP_K: usize = 5;

/// Per-paper facts the statistics need beyond the pair stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperSummary {
    pub paper_id: String,
    pub primary_category: String,
    pub author_count: u32,
    pub version_count: usize,
    /// Sentences in the extracted first version.
    pub v1_sentences: usize,
    /// Extracted text of the first and last versions differ.
    pub text_changed: bool,
}

impl PaperSummary {
    fn aligned(&self) -> bool {
        self.version_count >= 2
    }
}

const HIST_POSITIONS: [Position; 3] = [
    Position::Introduction,
    Position::Middle,
    Position::Conclusion,
];

fn change_column(t: RevisionType) -> Option<usize> {
    match t {
        RevisionType::Deletion => Some(0),
        RevisionType::Typo => Some(1),
        RevisionType::Rewrite => Some(2),
        RevisionType::Unchanged => None,
    }
}

/// Deletion / typo / rewrite counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChangeCounts {
    pub deletion: usize,
    pub typo: usize,
    pub rewrite: usize,
}

impl ChangeCounts {
    pub fn add(&mut self, t: RevisionType) {
        match change_column(t) {
            Some(0) => self.deletion += 1,
            Some(1) => self.typo += 1,
            Some(_) => self.rewrite += 1,
            None => {}
        }
    }

    pub fn total(&self) -> usize {
        self.deletion + self.typo + self.rewrite
    }
}

/// Changes by section position; abstracts count as introduction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PositionHistogram {
    pub introduction: ChangeCounts,
    pub middle: ChangeCounts,
    pub conclusion: ChangeCounts,
}

impl PositionHistogram {
    pub fn get(&self, p: Position) -> &ChangeCounts {
        match p {
            Position::Abstract | Position::Introduction => &self.introduction,
            Position::Middle => &self.middle,
            Position::Conclusion => &self.conclusion,
        }
    }

    pub fn total(&self) -> usize {
        self.introduction.total() + self.middle.total() + self.conclusion.total()
    }
}

pub fn position_histogram(pairs: &[RevisionPair]) -> PositionHistogram {
    let mut h = PositionHistogram::default();
    for p in pairs {
        let cell = match p.position {
            Position::Abstract | Position::Introduction => &mut h.introduction,
            Position::Middle => &mut h.middle,
            Position::Conclusion => &mut h.conclusion,
        };
        cell.add(p.rtype);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub category: String,
    pub changes: ChangeCounts,
    /// First-version sentences over the category's aligned papers.
    pub sentences: usize,
}

impl CategoryRow {
    pub fn rate(&self) -> f64 {
        if self.sentences == 0 {
            0.0
        } else {
            self.changes.total() as f64 / self.sentences as f64
        }
    }
}

/// Rows in category order. Pairs of papers missing from `papers` fall
/// under `"unknown"`.
pub fn category_stats(papers: &[PaperSummary], pairs: &[RevisionPair]) -> Vec<CategoryRow> {
    let category: HashMap<&str, &str> = papers
        .iter()
        .map(|p| (p.paper_id.as_str(), p.primary_category.as_str()))
        .collect();
    let mut rows: BTreeMap<String, CategoryRow> = BTreeMap::new();
    fn row<'a>(rows: &'a mut BTreeMap<String, CategoryRow>, cat: &str) -> &'a mut CategoryRow {
        rows.entry(cat.to_string()).or_insert_with(|| CategoryRow {
            category: cat.to_string(),
            changes: ChangeCounts::default(),
            sentences: 0,
        })
    }
    for p in papers.iter().filter(|p| p.aligned()) {
        row(&mut rows, &p.primary_category).sentences += p.v1_sentences;
    }
    for pair in pairs.iter().filter(|p| p.rtype.is_change()) {
        let cat = category
            .get(pair.paper_id.as_str())
            .copied()
            .unwrap_or("unknown");
        row(&mut rows, cat).changes.add(pair.rtype);
    }
    rows.into_values().collect()
}

/// Highest change counts first, ties by category name.
pub fn top_by_changes(rows: &[CategoryRow], k: usize) -> Vec<CategoryRow> {
    let mut v = rows.to_vec();
    v.sort_by(|a, b| {
        b.changes
            .total()
            .cmp(&a.changes.total())
            .then_with(|| a.category.cmp(&b.category))
    });
    v.truncate(k);
    v
}

/// Highest changes-per-sentence first, ties by category name.
pub fn top_by_rate(rows: &[CategoryRow], k: usize) -> Vec<CategoryRow> {
    let mut v = rows.to_vec();
    v.sort_by(|a, b| {
        b.rate()
            .total_cmp(&a.rate())
            .then_with(|| a.category.cmp(&b.category))
    });
    v.truncate(k);
    v
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
/// The standard error of a single value is 0.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorRow {
    /// Author count; the last bucket holds everything at or above the cap.
    pub authors: u32,
    pub capped: bool,
    pub papers: usize,
    pub mean_changes: f64,
    pub stderr_changes: f64,
    /// Fraction of first-version sentences that changed.
    pub mean_changed_fraction: f64,
    pub stderr_changed_fraction: f64,
}

impl AuthorRow {
    pub fn label(&self) -> String {
        if self.capped {
            format!("{}+", self.authors)
        } else {
            self.authors.to_string()
        }
    }
}

/// Per-paper change count and changed-sentence fraction, grouped by author
/// count. Only aligned papers with a non-empty first version take part.
pub fn author_stats(papers: &[PaperSummary], pairs: &[RevisionPair], cap: u32) -> Vec<AuthorRow> {
    let cap = cap.max(1);
    let mut changes: HashMap<&str, usize> = HashMap::new();
    for p in pairs.iter().filter(|p| p.rtype.is_change()) {
        *changes.entry(p.paper_id.as_str()).or_insert(0) += 1;
    }
    let mut groups: BTreeMap<u32, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for p in papers.iter().filter(|p| p.aligned() && p.v1_sentences > 0) {
        let c = changes.get(p.paper_id.as_str()).copied().unwrap_or(0);
        let g = groups.entry(p.author_count.min(cap)).or_default();
        g.0.push(c as f64);
        g.1.push(c as f64 / p.v1_sentences as f64);
    }
    groups
        .into_iter()
        .map(|(authors, (mut counts, mut fracs))| {
            // Sorted so the sums do not depend on input order.
            counts.sort_by(f64::total_cmp);
            fracs.sort_by(f64::total_cmp);
            let (mean_changes, stderr_changes) = mean_stderr(&counts);
            let (mean_changed_fraction, stderr_changed_fraction) = mean_stderr(&fracs);
            AuthorRow {
                authors,
                capped: authors == cap,
                papers: counts.len(),
                mean_changes,
                stderr_changes,
                mean_changed_fraction,
                stderr_changed_fraction,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VersionCounts {
    pub papers: usize,
    pub multi_version: usize,
    pub multi_version_rate: f64,
    pub changed_papers: usize,
}

pub fn version_counts(papers: &[PaperSummary]) -> VersionCounts {
    let multi = papers.iter().filter(|p| p.version_count >= 2).count();
    let changed = papers
        .iter()
        .filter(|p| p.aligned() && p.text_changed)
        .count();
    VersionCounts {
        papers: papers.len(),
        multi_version: multi,
        multi_version_rate: if papers.is_empty() {
            0.0
        } else {
            multi as f64 / papers.len() as f64
        },
        changed_papers: changed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub positions: PositionHistogram,
    pub categories: Vec<CategoryRow>,
    pub authors: Vec<AuthorRow>,
    pub versions: VersionCounts,
    pub by_type: BTreeMap<RevisionType, usize>,
}

impl CorpusStats {
    pub fn compute(papers: &[PaperSummary], pairs: &[RevisionPair], author_cap: u32) -> Self {
        let mut by_type: BTreeMap<RevisionType, usize> = BTreeMap::new();
        for p in pairs {
            *by_type.entry(p.rtype).or_insert(0) += 1;
        }
        CorpusStats {
            positions: position_histogram(pairs),
            categories: category_stats(papers, pairs),
            authors: author_stats(papers, pairs, author_cap),
            versions: version_counts(papers),
            by_type,
        }
    }

    /// All tables as TSV, each introduced by a line naming it.
    pub fn to_tsv(&self, top_k: usize) -> String {
        let mut s = String::new();
        let counts = |c: &ChangeCounts| format!("{}\t{}\t{}", c.deletion, c.typo, c.rewrite);

        s.push_str("fig1a\nposition\tdeletion\ttypo\trewrite\ttotal\n");
        for p in HIST_POSITIONS {
            let c = self.positions.get(p);
            let _ = writeln!(s, "{p}\t{}\t{}", counts(c), c.total());
        }

        s.push_str("\nfig1b\ncategory\tdeletion\ttypo\trewrite\ttotal\n");
        for r in top_by_changes(&self.categories, top_k) {
            let _ = writeln!(
                s,
                "{}\t{}\t{}",
                r.category,
                counts(&r.changes),
                r.changes.total()
            );
        }

        s.push_str("\nfig1c\ncategory\tdeletion\ttypo\trewrite\tsentences\trate\n");
        for r in top_by_rate(&self.categories, top_k) {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{:.6}",
                r.category,
                counts(&r.changes),
                r.sentences,
                r.rate()
            );
        }

        s.push_str("\nfig2a\nauthors\tpapers\tmean_changes\tstderr\n");
        for r in &self.authors {
            let _ = writeln!(
                s,
                "{}\t{}\t{:.6}\t{:.6}",
                r.label(),
                r.papers,
                r.mean_changes,
                r.stderr_changes
            );
        }

        s.push_str("\nfig2b\nauthors\tpapers\tmean_changed_fraction\tstderr\n");
        for r in &self.authors {
            let _ = writeln!(
                s,
                "{}\t{}\t{:.6}\t{:.6}",
                r.label(),
                r.papers,
                r.mean_changed_fraction,
                r.stderr_changed_fraction
            );
        }

        let v = &self.versions;
        let t = |k: RevisionType| self.by_type.get(&k).copied().unwrap_or(0);
        s.push_str("\ncounts\nkey\tvalue\n");
        let _ = writeln!(s, "papers\t{}", v.papers);
        let _ = writeln!(s, "multi_version_papers\t{}", v.multi_version);
        let _ = writeln!(s, "multi_version_rate\t{:.6}", v.multi_version_rate);
        let _ = writeln!(s, "changed_papers\t{}", v.changed_papers);
        let _ = writeln!(s, "revisions\t{}", self.positions.total());
        for k in [
            RevisionType::Deletion,
            RevisionType::Typo,
            RevisionType::Rewrite,
            RevisionType::Unchanged,
        ] {
            let _ = writeln!(s, "{k}\t{}", t(k));
        }
        s
    }
}

/// Splits output of [`CorpusStats::to_tsv`] back into named tables of rows
/// (header row included).
pub fn parse_tables(text: &str) -> BTreeMap<String, Vec<Vec<String>>> {
    let mut out = BTreeMap::new();
    for block in text.split("\n\n") {
        let mut lines = block.lines().filter(|l| !l.is_empty());
        if let Some(name) = lines.next() {
            let rows = lines
                .map(|l| l.split('\t').map(String::from).collect())
                .collect();
            out.insert(name.trim().to_string(), rows);
        }
    }
    out
}
