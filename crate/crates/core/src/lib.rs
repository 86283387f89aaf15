//! Sentence-level revision mining for multi-version LaTeX papers.
//!
//! The pipeline extracts sectioned text from each version ([`ingest`]),
//! weights tokens by idf ([`lexical`]), aligns sections by title and
//! sentences by dynamic programming ([`align`]), sorts every first-version
//! sentence into deletion, typo, rewrite or unchanged ([`revision`]), and
//! summarizes the result ([`stats`]). Annotations collected on the mined
//! pairs are analyzed with [`agreement`]. [`pipeline`] ties the stages to
//! files on disk.

pub mod agreement;
pub mod align;
pub mod config;
pub mod error;
pub mod ingest;
pub mod lexical;
pub mod pipeline;
pub mod revision;
pub mod stats;

pub use agreement::{
    fleiss_kappa, majority_filter, strength_change_rate, AgreementReport, Label, LabelMatrix,
};
pub use align::{align_documents, align_sentences, Alignment, Link};
pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use ingest::{extract_text, segment_sentences, Document, Position, Section, Sentence};
pub use lexical::{similarity, tokenize, IdfModel, SimilarityScore, MATH_TOKEN};
pub use revision::{classify_pair, filter_labelable, sample_pairs, RevisionPair, RevisionType};
pub use stats::{CorpusStats, PaperSummary};
