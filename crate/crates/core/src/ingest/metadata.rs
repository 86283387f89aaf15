use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Contents of a paper's `metadata.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperMeta {
    pub paper_id: String,
    pub author_count: u32,
    /// First entry is the primary subarchive.
    pub categories: Vec<String>,
    /// Version labels in submission order.
    pub versions: Vec<String>,
}

impl PaperMeta {
    pub fn primary_category(&self) -> &str {
        &self.categories[0]
    }

    pub fn is_multi_version(&self) -> bool {
        self.versions.len() >= 2
    }
}

fn malformed(path: &str, message: impl Into<String>) -> Error {
    Error::MalformedMetadata {
        path: path.to_string(),
        message: message.into(),
    }
}

fn string_list(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Vec<String>> {
    let list = obj
        .get(key)
        .ok_or_else(|| malformed(key, "missing required field"))?
        .as_array()
        .ok_or_else(|| malformed(key, "expected a list of strings"))?;
    list.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| malformed(&format!("{key}[{i}]"), "expected a string"))
        })
        .collect()
}

/// Parses and validates a metadata record.
pub fn load_metadata(blob: &str) -> Result<PaperMeta> {
    let value: Value = serde_json::from_str(blob).map_err(|e| malformed("$", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("$", "expected an object"))?;

    let paper_id = obj
        .get("paper_id")
        .ok_or_else(|| malformed("paper_id", "missing required field"))?
        .as_str()
        .ok_or_else(|| malformed("paper_id", "expected a string"))?
        .to_string();
    if paper_id.trim().is_empty() {
        return Err(malformed("paper_id", "must not be empty"));
    }

    let author_count = obj
        .get("author_count")
        .ok_or_else(|| malformed("author_count", "missing required field"))?
        .as_u64()
        .ok_or_else(|| malformed("author_count", "expected a non-negative integer"))?;
    if author_count == 0 {
        return Err(malformed("author_count", "must be at least 1"));
    }
    let author_count =
        u32::try_from(author_count).map_err(|_| malformed("author_count", "out of range"))?;

    let categories = string_list(obj, "categories")?;
    if categories.is_empty() {
        return Err(malformed("categories", "needs a primary category"));
    }

    let versions = string_list(obj, "versions")?;
    if versions.is_empty() {
        return Err(malformed("versions", "needs at least one version"));
    }
    for (i, v) in versions.iter().enumerate() {
        if v.is_empty() || v.contains(['/', '\\']) || v == "." || v == ".." {
            return Err(malformed(&format!("versions[{i}]"), "not a directory name"));
        }
        if versions[..i].contains(v) {
            return Err(malformed(
                &format!("versions[{i}]"),
                format!("duplicate `{v}`"),
            ));
        }
    }

    Ok(PaperMeta {
        paper_id,
        author_count,
        categories,
        versions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(r: Result<PaperMeta>) -> String {
        match r {
            Err(Error::MalformedMetadata { path, .. }) => path,
            other => panic!("expected MalformedMetadata, got {other:?}"),
        }
    }

    #[test]
    fn minimal_record() {
        let m = load_metadata(
            r#"{"paper_id":"p1","author_count":1,"categories":["math"],"versions":["v1","v2"]}"#,
        )
        .unwrap();
        assert_eq!(m.paper_id, "p1");
        assert_eq!(m.primary_category(), "math");
        assert_eq!(m.versions, vec!["v1", "v2"]);
        assert!(m.is_multi_version());
    }

    #[test]
    fn rejects_bad_fields() {
        assert_eq!(
            path_of(load_metadata(
                r#"{"paper_id":"p1","author_count":0,"categories":["math"],"versions":["v1"]}"#
            )),
            "author_count"
        );
        assert_eq!(
            path_of(load_metadata(
                r#"{"paper_id":"p1","author_count":2,"categories":["math"]}"#
            )),
            "versions"
        );
        assert_eq!(
            path_of(load_metadata(
                r#"{"paper_id":"p1","author_count":2,"categories":["math", 3],"versions":["v1"]}"#
            )),
            "categories[1]"
        );
        assert_eq!(
            path_of(load_metadata(
                r#"{"paper_id":"p1","author_count":2,"categories":[],"versions":["v1"]}"#
            )),
            "categories"
        );
        assert_eq!(
            path_of(load_metadata(
                r#"{"paper_id":"p1","author_count":2,"categories":["a"],"versions":["v1","v1"]}"#
            )),
            "versions[1]"
        );
        assert_eq!(path_of(load_metadata("[1]")), "$");
        assert_eq!(path_of(load_metadata("{")), "$");
        assert_eq!(
            path_of(load_metadata(
                r#"{"paper_id":"p1","author_count":-1,"categories":["a"],"versions":["v1"]}"#
            )),
            "author_count"
        );
    }
}
