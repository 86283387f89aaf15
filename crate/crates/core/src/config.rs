//! Pipeline settings, read from a `key = value` file and overridden by
//! command-line flags.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::agreement::DEFAULT_MAJORITY;
use crate::align::DEFAULT_MISMATCH_PENALTY;
use crate::error::{Error, Result};
use crate::ingest::{Position, Segmenter};
use crate::revision::{LabelFilter, DEFAULT_SIM_THRESHOLD, DEFAULT_TYPO_THRESHOLD};
use crate::stats::{DEFAULT_AUTHOR_CAP, DEFAULT_TOP_K};

pub const DEFAULT_SAMPLE_N: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_root: Option<PathBuf>,
    pub out: PathBuf,
    pub mismatch_penalty: f64,
    /// Labelable pairs need similarity strictly above this.
    pub sim_threshold: f64,
    /// Spans at or beyond this character distance make a rewrite.
    pub typo_edit_distance: usize,
    pub majority: usize,
    pub positions: BTreeSet<Position>,
    pub sample_n: usize,
    pub seed: u64,
    /// Worker threads; `None` lets the thread pool decide.
    pub jobs: Option<usize>,
    pub dump_alignment: bool,
    /// Added to the built-in abbreviation list.
    pub abbreviations: Vec<String>,
    pub author_cap: u32,
    pub top_k: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus_root: None,
            out: PathBuf::from("out"),
            mismatch_penalty: DEFAULT_MISMATCH_PENALTY,
            sim_threshold: DEFAULT_SIM_THRESHOLD,
            typo_edit_distance: DEFAULT_TYPO_THRESHOLD,
            majority: DEFAULT_MAJORITY,
            positions: LabelFilter::default().positions,
            sample_n: DEFAULT_SAMPLE_N,
            seed: 0,
            jobs: None,
            dump_alignment: false,
            abbreviations: Vec::new(),
            author_cap: DEFAULT_AUTHOR_CAP,
            top_k: DEFAULT_TOP_K,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl PipelineConfig {
    /// Sets one key. Keys use underscores; dashes are accepted too.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "corpus_root" => self.corpus_root = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "mismatch_penalty" => self.mismatch_penalty = number(key, value)?,
            "sim_threshold" => self.sim_threshold = number(key, value)?,
            "typo_edit_distance" => self.typo_edit_distance = number(key, value)?,
            "majority" | "majority_threshold" => self.majority = number(key, value)?,
            "positions" => {
                self.positions = list(value)
                    .map(|p| {
                        Position::parse(p)
                            .ok_or_else(|| Error::Config(format!("unknown position `{p}`")))
                    })
                    .collect::<Result<_>>()?;
            }
            "sample_n" => self.sample_n = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "jobs" => self.jobs = Some(number(key, value)?),
            "dump_alignment" => self.dump_alignment = number(key, value)?,
            "abbreviations" => self.abbreviations = list(value).map(String::from).collect(),
            "author_cap" => self.author_cap = number(key, value)?,
            "top_k" => self.top_k = number(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            self.set(key, value).map_err(|e| {
                Error::Config(format!(
                    "line {}: {}",
                    no + 1,
                    e.to_string().trim_start_matches("invalid configuration: ")
                ))
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_str(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.mismatch_penalty >= 0.0 && self.mismatch_penalty.is_finite()) {
            return bad(format!(
                "mismatch_penalty must be >= 0, got {}",
                self.mismatch_penalty
            ));
        }
        if !(0.0..=1.0).contains(&self.sim_threshold) {
            return bad(format!(
                "sim_threshold must lie in [0, 1], got {}",
                self.sim_threshold
            ));
        }
        if self.typo_edit_distance < 1 {
            return bad("typo_edit_distance must be >= 1".into());
        }
        if self.majority < 1 {
            return bad("majority must be >= 1".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be >= 1".into());
        }
        if self.author_cap < 1 {
            return bad("author_cap must be >= 1".into());
        }
        Ok(())
    }

    pub fn corpus_root(&self) -> Result<&Path> {
        self.corpus_root
            .as_deref()
            .ok_or_else(|| Error::Config("corpus_root is not set".into()))
    }

    pub fn label_filter(&self) -> LabelFilter {
        LabelFilter {
            sim_threshold: self.sim_threshold,
            positions: self.positions.clone(),
        }
    }

    pub fn segmenter(&self) -> Segmenter {
        Segmenter::with_abbreviations(self.abbreviations.iter())
    }
}
