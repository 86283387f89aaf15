//! Corpus tree layout: `<root>/<paper_id>/metadata.json` and
//! `<root>/<paper_id>/<version_label>/*.tex`.

use std::fs;
use std::path::{Path, PathBuf};

use super::metadata::{load_metadata, PaperMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Version {
    pub label: String,
    pub sources: Vec<String>,
}

/// One paper as found on disk, versions in submission order.
#[derive(Debug, Clone)]
pub struct RawPaper {
    pub meta: PaperMeta,
    pub versions: Vec<Version>,
}

impl RawPaper {
    pub fn paper_id(&self) -> &str {
        &self.meta.paper_id
    }
}

/// Paper directories under `root` (those holding a `metadata.json`),
/// sorted by name.
pub fn list_papers(root: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut dirs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_dir() && path.join("metadata.json").is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Puts files holding `\begin{document}` first, otherwise keeps name order.
pub fn order_sources(mut files: Vec<(String, String)>) -> Vec<String> {
    files.sort_by(|(a, ta), (b, tb)| {
        let ma = ta.contains("\\begin{document}");
        let mb = tb.contains("\\begin{document}");
        mb.cmp(&ma).then_with(|| a.cmp(b))
    });
    files.into_iter().map(|(_, text)| text).collect()
}

fn read_version(dir: &Path) -> Result<Vec<String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().is_some_and(|x| x == "tex") && path.is_file() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            files.push((name, text));
        }
    }
    Ok(order_sources(files))
}

pub fn load_paper(dir: &Path) -> Result<RawPaper> {
    let meta_path = dir.join("metadata.json");
    let blob = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta = load_metadata(&blob)?;
    let versions = meta
        .versions
        .iter()
        .map(|label| {
            Ok(Version {
                label: label.clone(),
                sources: read_version(&dir.join(label))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RawPaper { meta, versions })
}
