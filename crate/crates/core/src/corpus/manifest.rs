use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::temporal::{DateRange, Resolution, TemporalKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    Plaintext,
    NewsXml,
    NgramTsv,
    DailyFeed,
}

impl CorpusKind {
    pub fn default_resolution(self) -> Resolution {
        match self {
            CorpusKind::Plaintext | CorpusKind::NgramTsv => Resolution::Year,
            CorpusKind::NewsXml | CorpusKind::DailyFeed => Resolution::Day,
        }
    }

    /// True for corpora delivered as per-period n-gram counts.
    pub fn is_preaggregated(self) -> bool {
        matches!(self, CorpusKind::NgramTsv | CorpusKind::DailyFeed)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    corpus_id: String,
    kind: CorpusKind,
    files: Vec<String>,
    resolution: Option<Resolution>,
    metadata: Option<PathBuf>,
    totals: Option<PathBuf>,
    date_range: Option<[String; 2]>,
}

/// Corpus description, TOML on disk:
///
/// ```toml
/// corpus_id = "gutenberg"
/// kind = "plaintext"            # plaintext | news_xml | ngram_tsv | daily_feed
/// files = ["docs/*.txt"]        # globs relative to the manifest
/// resolution = "year"           # day | year
/// metadata = "metadata.tsv"     # plaintext only: doc_id, author, birth_year, title
/// totals = "totals.tsv"         # n-gram corpora: per-period denominators
/// date_range = ["1700", "1950"]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub path: PathBuf,
    pub corpus_id: String,
    pub kind: CorpusKind,
    pub files: Vec<PathBuf>,
    pub resolution: Resolution,
    pub metadata: Option<PathBuf>,
    pub totals: Option<PathBuf>,
    pub date_range: Option<DateRange>,
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| manifest_err(path, "<file>", e.to_string()))?;
        Self::parse(&text, path)
    }

    /// Parses manifest text; relative paths resolve against `path`'s directory.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| {
            let message = e.message().to_owned();
            let field = field_of(&message, text, e.span());
            manifest_err(path, &field, message)
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if raw.corpus_id.trim().is_empty() {
            return Err(manifest_err(path, "corpus_id", "must not be empty"));
        }
        if raw.files.is_empty() {
            return Err(manifest_err(path, "files", "at least one glob is required"));
        }
        let resolution = raw.resolution.unwrap_or_else(|| raw.kind.default_resolution());
        let mut files = Vec::new();
        for pattern in &raw.files {
            let full = base.join(pattern);
            let entries = glob::glob(&full.to_string_lossy())
                .map_err(|e| manifest_err(path, "files", format!("bad glob `{pattern}`: {e}")))?;
            let before = files.len();
            for entry in entries {
                match entry {
                    Ok(p) if p.is_file() => files.push(p),
                    Ok(_) => {}
                    Err(e) => warn!("{}: {e}", path.display()),
                }
            }
            if files.len() == before {
                // A literal path that does not exist is kept so ingestion reports it per file.
                if !pattern.contains(['*', '?', '[']) {
                    files.push(full);
                } else {
                    warn!("{}: glob `{pattern}` matched no files", path.display());
                }
            }
        }
        files.sort();
        files.dedup();
        let metadata = raw.metadata.map(|p| base.join(p));
        if let Some(m) = &metadata {
            if !m.is_file() {
                return Err(manifest_err(
                    path,
                    "metadata",
                    format!("{} does not exist", m.display()),
                ));
            }
        }
        let totals = raw.totals.map(|p| base.join(p));
        if let Some(t) = &totals {
            if !t.is_file() {
                return Err(manifest_err(path, "totals", format!("{} does not exist", t.display())));
            }
        }
        let date_range = match raw.date_range {
            None => None,
            Some([a, b]) => {
                let parse = |s: &str| {
                    TemporalKey::parse(s)
                        .ok_or_else(|| manifest_err(path, "date_range", format!("`{s}` is not YYYY or YYYY-MM-DD")))
                };
                let (start, end) = (parse(&a)?, parse(&b)?);
                if end < start {
                    return Err(manifest_err(path, "date_range", "end precedes start"));
                }
                Some(DateRange { start, end })
            }
        };
        Ok(CorpusManifest {
            path: path.to_owned(),
            corpus_id: raw.corpus_id,
            kind: raw.kind,
            files,
            resolution,
            metadata,
            totals,
            date_range,
        })
    }

    /// Drops keys outside the declared range, with a warning.
    pub(crate) fn admit(&self, key: Option<TemporalKey>, what: &str) -> Option<TemporalKey> {
        match (key, self.date_range) {
            (Some(k), Some(r)) if !r.contains(k) => {
                warn!("{what}: temporal key {k} outside the corpus range; treated as undated");
                None
            }
            _ => key,
        }
    }
}

fn manifest_err(path: &Path, field: &str, message: impl Into<String>) -> Error {
    Error::Manifest {
        path: path.to_owned(),
        field: field.to_owned(),
        message: message.into(),
    }
}

/// Best effort: pull the field name out of a serde message, else the key on the offending line.
fn field_of(message: &str, text: &str, span: Option<std::ops::Range<usize>>) -> String {
    if let Some(start) = message.find('`') {
        if let Some(len) = message[start + 1..].find('`') {
            let name = &message[start + 1..start + 1 + len];
            if message.starts_with("missing field")
                || message.starts_with("unknown field")
                || message.starts_with("duplicate key")
            {
                return name.to_owned();
            }
        }
    }
    if let Some(span) = span {
        let line_start = text[..span.start.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
        let line = &text[line_start..];
        if let Some((key, _)) = line.split_once('=') {
            let key = key.trim();
            if !key.is_empty() {
                return key.to_owned();
            }
        }
    }
    "<document>".to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CorpusManifest> {
        CorpusManifest::parse(text, Path::new("/nonexistent/manifest.toml"))
    }

    fn field(err: Error) -> String {
        match err {
            Error::Manifest { field, .. } => field,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        assert_eq!(
            field(parse("corpus_id = \"x\"\nfiles = [\"a\"]\n").unwrap_err()),
            "kind"
        );
    }

    #[test]
    fn bad_kind_is_named() {
        let err = parse("corpus_id = \"x\"\nkind = \"spreadsheet\"\nfiles = [\"a\"]\n").unwrap_err();
        assert_eq!(field(err), "kind");
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse("corpus_id = \"x\"\nkind = \"plaintext\"\nfiles = [\"a\"]\ncolour = 1\n").unwrap_err();
        assert_eq!(field(err), "colour");
    }

    #[test]
    fn bad_range_is_named() {
        let err =
            parse("corpus_id = \"x\"\nkind = \"plaintext\"\nfiles = [\"a\"]\ndate_range = [\"1900\", \"soon\"]\n")
                .unwrap_err();
        assert_eq!(field(err), "date_range");
    }

    #[test]
    fn defaults_resolution_and_keeps_literal_paths() {
        let m = parse("corpus_id = \"nyt\"\nkind = \"news_xml\"\nfiles = [\"a.xml\"]\n").unwrap();
        assert_eq!(m.resolution, Resolution::Day);
        assert_eq!(m.files, vec![PathBuf::from("/nonexistent/a.xml")]);
    }
}
