//! Annotation ingest and agreement statistics: Fleiss' kappa, absolute
//! majority subsets, and the share of strength changes among them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};

pub const DEFAULT_MAJORITY: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Stronger,
    Weaker,
    NoStrengthChange,
    CantTell,
}

impl Label {
    /// Category order used by [`LabelMatrix`] columns.
    pub const ALL: [Label; 4] = [
        Label::Stronger,
        Label::Weaker,
        Label::NoStrengthChange,
        Label::CantTell,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Stronger => "stronger",
            Label::Weaker => "weaker",
            Label::NoStrengthChange => "no_change",
            Label::CantTell => "cant_tell",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        let s = s.trim();
        Label::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
    }

    pub fn is_strength_change(self) -> bool {
        matches!(self, Label::Stronger | Label::Weaker)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRecord {
    pub pair_id: String,
    pub labeler_id: String,
    pub label: Label,
}

/// Reads `pair_id,labeler_id,label` rows. Row numbers in errors count the
/// header as row 1.
pub fn read_labels_csv<R: Read>(reader: R) -> Result<Vec<LabelRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["pair_id", "labeler_id", "label"];
    if headers.len() != 3
        || headers
            .iter()
            .zip(expected)
            .any(|(h, e)| !h.eq_ignore_ascii_case(e))
    {
        return Err(Error::LabelRow {
            row: 1,
            message: format!(
                "expected header `pair_id,labeler_id,label`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| Error::LabelRow {
            row,
            message: e.to_string(),
        })?;
        let field = |i: usize| rec.get(i).unwrap_or("").to_string();
        let (pair_id, labeler_id, raw) = (field(0), field(1), field(2));
        if pair_id.is_empty() || labeler_id.is_empty() {
            return Err(Error::LabelRow {
                row,
                message: "empty pair_id or labeler_id".into(),
            });
        }
        let label = Label::parse(&raw).ok_or_else(|| Error::LabelRow {
            row,
            message: format!("unknown label `{raw}`"),
        })?;
        if !seen.insert((pair_id.clone(), labeler_id.clone())) {
            return Err(Error::LabelRow {
                row,
                message: format!("labeler `{labeler_id}` labels pair `{pair_id}` twice"),
            });
        }
        out.push(LabelRecord {
            pair_id,
            labeler_id,
            label,
        });
    }
    Ok(out)
}

/// Items by categories, each cell the number of raters choosing that
/// category. Every row has the same rater total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    ids: Vec<String>,
    rows: Vec<Vec<u32>>,
    raters: u32,
}

impl LabelMatrix {
    pub fn new(ids: Vec<String>, rows: Vec<Vec<u32>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::InvalidMatrix("one id per row required".into()));
        }
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidMatrix("no rows".into()))?;
        let k = first.len();
        if k == 0 {
            return Err(Error::InvalidMatrix("no categories".into()));
        }
        let raters: u32 = first.iter().sum();
        if raters < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 raters per row, found {raters}"
            )));
        }
        for (id, row) in ids.iter().zip(&rows) {
            if row.len() != k {
                return Err(Error::InvalidMatrix(format!(
                    "row `{id}` has {} categories, expected {k}",
                    row.len()
                )));
            }
            let r: u32 = row.iter().sum();
            if r != raters {
                return Err(Error::RaggedRaters {
                    pair_id: id.clone(),
                    found: r as usize,
                    expected: raters as usize,
                });
            }
        }
        Ok(LabelMatrix { ids, rows, raters })
    }

    /// Rows named by their position.
    pub fn from_counts(rows: Vec<Vec<u32>>) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(ids, rows)
    }

    /// One row per pair in first-seen order, columns in [`Label::ALL`]
    /// order. Pairs whose rater count differs from the most common count
    /// are rejected.
    pub fn from_records(records: &[LabelRecord]) -> Result<Self> {
        let mut order: Vec<&str> = Vec::new();
        let mut counts: HashMap<&str, Vec<u32>> = HashMap::new();
        for r in records {
            let row = counts.entry(r.pair_id.as_str()).or_insert_with(|| {
                order.push(r.pair_id.as_str());
                vec![0; Label::ALL.len()]
            });
            row[r.label.index()] += 1;
        }
        let mut freq: BTreeMap<u32, usize> = BTreeMap::new();
        for row in counts.values() {
            *freq.entry(row.iter().sum()).or_insert(0) += 1;
        }
        let expected = freq
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
            .map(|(r, _)| *r)
            .ok_or_else(|| Error::InvalidMatrix("no label records".into()))?;
        for id in &order {
            let found: u32 = counts[id].iter().sum();
            if found != expected {
                return Err(Error::RaggedRaters {
                    pair_id: id.to_string(),
                    found: found as usize,
                    expected: expected as usize,
                });
            }
        }
        let rows = order.iter().map(|id| counts[id].clone()).collect();
        Self::new(order.into_iter().map(String::from).collect(), rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn raters(&self) -> u32 {
        self.raters
    }

    pub fn categories(&self) -> usize {
        self.rows[0].len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// The given rows, in the given order. `None` when `idx` is empty.
    pub fn subset(&self, idx: &[usize]) -> Option<LabelMatrix> {
        if idx.is_empty() {
            return None;
        }
        Some(LabelMatrix {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            raters: self.raters,
        })
    }
}

/// Fleiss' kappa for a fixed number of raters per item.
///
/// `P_i = (sum_k n_ik^2 - r) / (r (r - 1))`, `P = mean(P_i)`,
/// `p_k = sum_i n_ik / (N r)`, `Pe = sum_k p_k^2`, `kappa = (P - Pe) / (1 - Pe)`.
pub fn fleiss_kappa(m: &LabelMatrix) -> Result<f64> {
    let r = f64::from(m.raters);
    let n_items = m.len() as f64;
    let k = m.categories();

    let mut col = vec![0u64; k];
    let mut p_bar = 0.0;
    for row in &m.rows {
        let sq: u64 = row.iter().map(|&c| u64::from(c) * u64::from(c)).sum();
        p_bar += (sq as f64 - r) / (r * (r - 1.0));
        for (acc, &c) in col.iter_mut().zip(row) {
            *acc += u64::from(c);
        }
    }
    p_bar /= n_items;
    let total = n_items * r;
    let pe: f64 = col.iter().map(|&c| (c as f64 / total).powi(2)).sum();
    if col.iter().filter(|&&c| c > 0).count() <= 1 {
        return Err(Error::DegenerateAgreement);
    }
    Ok((p_bar - pe) / (1.0 - pe))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorityRow {
    pub row: usize,
    pub category: usize,
}

/// Rows where some category has at least `threshold` votes. Requires
/// `threshold > raters / 2`, which makes the winning category unique.
pub fn majority_filter(m: &LabelMatrix, threshold: usize) -> Result<Vec<MajorityRow>> {
    let raters = m.raters as usize;
    if 2 * threshold <= raters {
        return Err(Error::ThresholdTooLow { threshold, raters });
    }
    Ok(m.rows
        .iter()
        .enumerate()
        .filter_map(|(row, counts)| {
            let mut winners = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c as usize >= threshold);
            let first = winners
                .next()
                .map(|(category, _)| MajorityRow { row, category });
            debug_assert!(winners.next().is_none());
            first
        })
        .collect())
}

/// Majority rows per label, in [`Label::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCounts(pub [usize; 4]);

impl LabelCounts {
    pub fn from_majority(rows: &[MajorityRow]) -> Self {
        let mut c = [0usize; 4];
        for r in rows {
            c[r.category] += 1;
        }
        LabelCounts(c)
    }

    pub fn get(&self, l: Label) -> usize {
        self.0[l.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// `(stronger + weaker) / subset size`.
pub fn strength_change_rate(counts: &LabelCounts) -> Result<f64> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::EmptySubset);
    }
    Ok((counts.get(Label::Stronger) + counts.get(Label::Weaker)) as f64 / n as f64)
}

/// Percentage with one decimal, e.g. `74.4%`.
pub fn format_percent(fraction: f64) -> String {
    format!("{:.1}%", fraction * 100.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub pairs: usize,
    pub raters: u32,
    /// `None` when agreement is degenerate.
    pub kappa: Option<f64>,
    pub majority_threshold: usize,
    pub majority_counts: LabelCounts,
    pub subset_kappa: Option<f64>,
    /// `None` when the majority subset is empty.
    pub strength_change_rate: Option<f64>,
}

impl AgreementReport {
    pub fn compute(m: &LabelMatrix, majority_threshold: usize) -> Result<Self> {
        let kappa = undefined_as_none(fleiss_kappa(m))?;
        let majority = majority_filter(m, majority_threshold)?;
        let idx: Vec<usize> = majority.iter().map(|r| r.row).collect();
        let subset_kappa = match m.subset(&idx) {
            Some(sub) => undefined_as_none(fleiss_kappa(&sub))?,
            None => None,
        };
        let majority_counts = LabelCounts::from_majority(&majority);
        let strength_change_rate = match strength_change_rate(&majority_counts) {
            Ok(r) => Some(r),
            Err(Error::EmptySubset) => None,
            Err(e) => return Err(e),
        };
        Ok(AgreementReport {
            pairs: m.len(),
            raters: m.raters(),
            kappa,
            majority_threshold,
            majority_counts,
            subset_kappa,
            strength_change_rate,
        })
    }

    pub fn subset_size(&self) -> usize {
        self.majority_counts.total()
    }

    pub fn to_tsv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
        let mut s = String::from("metric\tvalue\n");
        let _ = writeln!(s, "pairs\t{}", self.pairs);
        let _ = writeln!(s, "raters\t{}", self.raters);
        let _ = writeln!(s, "kappa\t{}", opt(self.kappa));
        let _ = writeln!(s, "majority_threshold\t{}", self.majority_threshold);
        let _ = writeln!(s, "subset_size\t{}", self.subset_size());
        let _ = writeln!(s, "subset_kappa\t{}", opt(self.subset_kappa));
        for l in Label::ALL {
            let _ = writeln!(s, "{l}\t{}", self.majority_counts.get(l));
        }
        let _ = writeln!(
            s,
            "strength_change_rate\t{}",
            opt(self.strength_change_rate)
        );
        let _ = writeln!(
            s,
            "strength_change_percent\t{}",
            self.strength_change_rate
                .map_or_else(|| "NA".to_string(), format_percent)
        );
        s
    }
}

fn undefined_as_none(k: Result<f64>) -> Result<Option<f64>> {
    match k {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateAgreement) => Ok(None),
        Err(e) => Err(e),
    }
}
