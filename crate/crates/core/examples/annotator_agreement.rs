//! Fleiss' kappa, the absolute-majority subset and the share of strength
//! changes within it, from a label CSV.
//!
//! Run with `cargo run --example annotator_agreement`.

use revmine::agreement::read_labels_csv;
use revmine::{AgreementReport, LabelMatrix};

const LABELS: &str = "pair_id,labeler_id,label
p1,a,stronger
p1,b,stronger
p1,c,stronger
p1,d,weaker
p1,e,cant_tell
p2,a,no_change
p2,b,no_change
p2,c,no_change
p2,d,no_change
p2,e,stronger
p3,a,weaker
p3,b,weaker
p3,c,no_change
p3,d,stronger
p3,e,cant_tell
p4,a,Weaker
p4,b,weaker
p4,c,weaker
p4,d,weaker
p4,e,weaker
";

pub fn run_example() -> revmine::Result<AgreementReport> {
    let records = read_labels_csv(LABELS.as_bytes())?;
    let matrix = LabelMatrix::from_records(&records)?;
    // Five raters here, so three votes form an absolute majority.
    let report = AgreementReport::compute(&matrix, 3)?;
    print!("{}", report.to_tsv());
    Ok(report)
}

fn main() -> revmine::Result<()> {
    run_example().map(drop)
}
