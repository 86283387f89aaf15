//! The batch pipeline behind the command-line tool. Every stage reads and
//! writes files under the output directory:
//!
//! ```text
//! <out>/extracted/<paper_id>.json   extracted versions, one file per paper
//! <out>/idf.tsv                     document frequencies over first versions
//! <out>/pairs.jsonl                 every classified first-version sentence
//! <out>/labelable.jsonl             pairs passing the label filter
//! <out>/papers.jsonl                per-paper summaries for statistics
//! <out>/alignments.jsonl            sentence links (with --dump-alignment)
//! <out>/sample.jsonl                seeded sample of labelable pairs
//! <out>/stats.tsv                   figure tables and corpus counts
//! <out>/agreement.tsv               annotator agreement report
//! ```

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agreement::{read_labels_csv, AgreementReport, LabelMatrix};
use crate::align::{align_documents, DocumentAlignment};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::ingest::{list_papers, load_paper, Document, Extractor, PaperMeta};
use crate::lexical::IdfModel;
use crate::revision::{
    classify_alignment, filter_labelable, read_jsonl, sample_pairs, write_jsonl, RevisionPair,
};
use crate::stats::{CorpusStats, PaperSummary};

pub const EXTRACTED_DIR: &str = "extracted";
pub const IDF_FILE: &str = "idf.tsv";
pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const LABELABLE_FILE: &str = "labelable.jsonl";
pub const PAPERS_FILE: &str = "papers.jsonl";
pub const ALIGNMENTS_FILE: &str = "alignments.jsonl";
pub const SAMPLE_FILE: &str = "sample.jsonl";
pub const STATS_FILE: &str = "stats.tsv";
pub const AGREEMENT_FILE: &str = "agreement.tsv";

/// Cached extraction of every version of one paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedPaper {
    pub meta: PaperMeta,
    /// One document per version, in submission order.
    pub documents: Vec<Document>,
}

impl ExtractedPaper {
    pub fn paper_id(&self) -> &str {
        &self.meta.paper_id
    }

    pub fn first(&self) -> &Document {
        &self.documents[0]
    }

    pub fn last(&self) -> &Document {
        &self.documents[self.documents.len() - 1]
    }

    pub fn summary(&self) -> PaperSummary {
        PaperSummary {
            paper_id: self.meta.paper_id.clone(),
            primary_category: self.meta.primary_category().to_string(),
            author_count: self.meta.author_count,
            version_count: self.documents.len(),
            v1_sentences: self.first().sentence_count(),
            text_changed: self.first().plain_text() != self.last().plain_text(),
        }
    }
}

/// Loads and extracts every version of the paper in `dir`.
pub fn extract_paper(dir: &Path, extractor: &Extractor) -> Result<ExtractedPaper> {
    let raw = load_paper(dir)?;
    let mut documents = Vec::with_capacity(raw.versions.len());
    for v in &raw.versions {
        let ex = extractor.extract(&v.sources)?;
        for w in &ex.warnings {
            log::warn!("{} {}: {w}", raw.paper_id(), v.label);
        }
        documents.push(ex.into_document(raw.paper_id(), &v.label));
    }
    Ok(ExtractedPaper {
        meta: raw.meta,
        documents,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractReport {
    pub attempted: usize,
    /// Papers extracted in this run.
    pub extracted: usize,
    /// Papers whose cache entry already existed.
    pub cached: usize,
    /// Directory name and error message of each paper that failed.
    pub failed: Vec<(String, String)>,
}

impl ExtractReport {
    pub fn succeeded(&self) -> usize {
        self.extracted + self.cached
    }
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary file so an interrupted run never leaves a
/// truncated output behind.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))
}

fn cache_path(out: &Path, dir_name: &str) -> PathBuf {
    out.join(EXTRACTED_DIR).join(format!("{dir_name}.json"))
}

fn dir_name(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Extracts every paper under the corpus root into the cache. Papers with
/// a cache entry are skipped, so an interrupted run can be resumed. A
/// failing paper is logged and skipped; the run fails only when every
/// paper does.
pub fn run_extract(cfg: &PipelineConfig) -> Result<ExtractReport> {
    cfg.validate()?;
    let root = cfg.corpus_root()?;
    if !root.is_dir() {
        return Err(Error::Config(format!(
            "corpus root `{}` is not a directory",
            root.display()
        )));
    }
    let dirs = list_papers(root)?;
    if dirs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    ensure_dir(&cfg.out.join(EXTRACTED_DIR))?;
    let extractor = Extractor::new(cfg.segmenter());

    enum Outcome {
        Cached,
        Extracted,
        Failed(String, String),
    }
    let outcomes: Vec<Outcome> = thread_pool(cfg.jobs)?.install(|| {
        dirs.par_iter()
            .map(|dir| {
                let name = dir_name(dir);
                let cache = cache_path(&cfg.out, &name);
                if cache.is_file() {
                    return Outcome::Cached;
                }
                let res = extract_paper(dir, &extractor).and_then(|paper| {
                    let json = serde_json::to_vec(&paper).expect("documents always serialize");
                    write_atomic(&cache, &json)
                });
                match res {
                    Ok(()) => Outcome::Extracted,
                    Err(e) => Outcome::Failed(name, e.to_string()),
                }
            })
            .collect()
    });

    let mut report = ExtractReport {
        attempted: dirs.len(),
        ..Default::default()
    };
    for o in outcomes {
        match o {
            Outcome::Cached => report.cached += 1,
            Outcome::Extracted => report.extracted += 1,
            Outcome::Failed(name, msg) => {
                log::warn!("skipping paper `{name}`: {msg}");
                report.failed.push((name, msg));
            }
        }
    }
    if report.succeeded() == 0 {
        return Err(Error::AllPapersFailed(report.attempted));
    }
    Ok(report)
}

/// Cached papers for the current corpus listing, in directory order.
pub fn load_extracted(cfg: &PipelineConfig) -> Result<Vec<ExtractedPaper>> {
    let mut out = Vec::new();
    for dir in list_papers(cfg.corpus_root()?)? {
        let path = cache_path(&cfg.out, &dir_name(&dir));
        let blob = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => return Err(Error::io(&path, e)),
        };
        let paper = serde_json::from_slice(&blob).map_err(|source| Error::Json {
            path: path.clone(),
            line: 1,
            source,
        })?;
        out.push(paper);
    }
    Ok(out)
}

/// Classified pairs and alignment of one multi-version paper.
#[derive(Debug, Clone)]
pub struct PaperPairs {
    pub paper_id: String,
    pub alignment: DocumentAlignment,
    pub pairs: Vec<RevisionPair>,
}

/// Aligns the first and last versions and classifies every first-version
/// sentence. `None` for single-version papers.
pub fn mine_paper(
    paper: &ExtractedPaper,
    idf: &IdfModel,
    cfg: &PipelineConfig,
) -> Option<PaperPairs> {
    if paper.documents.len() < 2 {
        return None;
    }
    let (v1, v2) = (paper.first(), paper.last());
    let alignment = align_documents(v1, v2, idf, cfg.mismatch_penalty);
    let pairs = classify_alignment(v1, v2, &alignment.sentences, cfg.typo_edit_distance);
    Some(PaperPairs {
        paper_id: paper.paper_id().to_string(),
        alignment,
        pairs,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairsReport {
    pub extract: ExtractReport,
    pub papers: usize,
    pub aligned_papers: usize,
    pub pairs: usize,
    pub labelable: usize,
}

fn alignment_lines(p: &PaperPairs) -> String {
    let id = serde_json::to_string(&p.paper_id).expect("strings always serialize");
    let a = &p.alignment.sentences;
    let mut s = String::new();
    for l in &a.links {
        s.push_str(&format!(
            "{{\"paper_id\":{id},\"i\":{},\"j\":{},\"sim\":{:.6}}}\n",
            l.i,
            l.j,
            l.sim.value()
        ));
    }
    for &i in &a.deleted_v1 {
        s.push_str(&format!("{{\"paper_id\":{id},\"i\":{i},\"j\":null}}\n"));
    }
    for &j in &a.added_v2 {
        s.push_str(&format!("{{\"paper_id\":{id},\"i\":null,\"j\":{j}}}\n"));
    }
    s
}

/// Extracts (resuming from the cache), builds idf over first versions,
/// mines every multi-version paper and writes the pair files.
pub fn run_pairs(cfg: &PipelineConfig) -> Result<PairsReport> {
    let extract = run_extract(cfg)?;
    let papers = load_extracted(cfg)?;
    let idf = IdfModel::build(&papers.iter().map(|p| p.first().clone()).collect::<Vec<_>>())?;
    write_atomic(&cfg.out.join(IDF_FILE), idf.to_tsv().as_bytes())?;

    let mined: Vec<Option<PaperPairs>> = thread_pool(cfg.jobs)?.install(|| {
        papers
            .par_iter()
            .map(|p| mine_paper(p, &idf, cfg))
            .collect()
    });
    let mined: Vec<PaperPairs> = mined.into_iter().flatten().collect();

    let all: Vec<RevisionPair> = mined.iter().flat_map(|m| m.pairs.iter().cloned()).collect();
    let labelable = filter_labelable(&all, &cfg.label_filter());

    let mut buf = Vec::new();
    write_jsonl(&mut buf, &all).expect("writing to a Vec cannot fail");
    write_atomic(&cfg.out.join(PAIRS_FILE), &buf)?;
    buf.clear();
    write_jsonl(&mut buf, &labelable).expect("writing to a Vec cannot fail");
    write_atomic(&cfg.out.join(LABELABLE_FILE), &buf)?;

    let mut summaries = String::new();
    for p in &papers {
        summaries
            .push_str(&serde_json::to_string(&p.summary()).expect("summaries always serialize"));
        summaries.push('\n');
    }
    write_atomic(&cfg.out.join(PAPERS_FILE), summaries.as_bytes())?;

    if cfg.dump_alignment {
        let dump: String = mined.iter().map(alignment_lines).collect();
        write_atomic(&cfg.out.join(ALIGNMENTS_FILE), dump.as_bytes())?;
    }

    Ok(PairsReport {
        extract,
        papers: papers.len(),
        aligned_papers: mined.len(),
        pairs: all.len(),
        labelable: labelable.len(),
    })
}

fn read_pairs_file(path: &Path) -> Result<Vec<RevisionPair>> {
    let f = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingPairs(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    };
    read_jsonl(BufReader::new(f), path)
}

fn read_summaries(path: &Path) -> Result<Vec<PaperSummary>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingPairs(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    };
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(no, l)| {
            serde_json::from_str(l).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                line: no + 1,
                source,
            })
        })
        .collect()
}

/// Draws `sample_n` labelable pairs with the configured seed.
pub fn run_sample(cfg: &PipelineConfig) -> Result<Vec<RevisionPair>> {
    cfg.validate()?;
    let labelable = read_pairs_file(&cfg.out.join(LABELABLE_FILE))?;
    let sample = sample_pairs(&labelable, cfg.sample_n, cfg.seed)?;
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &sample).expect("writing to a Vec cannot fail");
    write_atomic(&cfg.out.join(SAMPLE_FILE), &buf)?;
    Ok(sample)
}

/// Computes the figure tables from the pair and summary files.
pub fn run_stats(cfg: &PipelineConfig) -> Result<CorpusStats> {
    cfg.validate()?;
    let pairs = read_pairs_file(&cfg.out.join(PAIRS_FILE))?;
    let papers = read_summaries(&cfg.out.join(PAPERS_FILE))?;
    let stats = CorpusStats::compute(&papers, &pairs, cfg.author_cap);
    ensure_dir(&cfg.out)?;
    write_atomic(
        &cfg.out.join(STATS_FILE),
        stats.to_tsv(cfg.top_k).as_bytes(),
    )?;
    Ok(stats)
}

/// Reads a label CSV and writes the agreement report.
pub fn run_agreement(cfg: &PipelineConfig, labels: &Path) -> Result<AgreementReport> {
    cfg.validate()?;
    let f = fs::File::open(labels).map_err(|e| Error::io(labels, e))?;
    let records = read_labels_csv(BufReader::new(f))?;
    let matrix = LabelMatrix::from_records(&records)?;
    let report = AgreementReport::compute(&matrix, cfg.majority)?;
    ensure_dir(&cfg.out)?;
    write_atomic(&cfg.out.join(AGREEMENT_FILE), report.to_tsv().as_bytes())?;
    Ok(report)
}
