//! Plain-text book corpora. Documents are dated by their author's birth
//! year, taken from a metadata table; documents without one are still
//! emitted but carry no temporal key.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;

use super::{CorpusKind, CorpusManifest, DocumentRecord};
use crate::error::{Error, Result};
use crate::normalize::Normalizer;
use crate::temporal::TemporalKey;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocMetadata {
    pub author: Option<String>,
    pub birth_year: Option<i32>,
    pub title: Option<String>,
}

/// Reads a tab-separated table with a header naming `doc_id`, `author`,
/// `birth_year` and `title` (any order). Malformed rows are logged and skipped.
pub fn read_metadata_table(text: &str, name: &Path) -> Result<HashMap<String, DocMetadata>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Ingest {
        path: name.to_owned(),
        line: 1,
        message: "metadata table has no header".into(),
    })?;
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let col = |want: &str| columns.iter().position(|c| *c == want);
    let doc_col = col("doc_id").ok_or_else(|| Error::Ingest {
        path: name.to_owned(),
        line: 1,
        message: "metadata header lacks `doc_id`".into(),
    })?;
    let (author_col, year_col, title_col) = (col("author"), col("birth_year"), col("title"));

    let mut table = HashMap::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != columns.len() {
            warn!(
                "{}:{}: expected {} columns, found {}; row skipped",
                name.display(),
                i + 1,
                columns.len(),
                fields.len()
            );
            continue;
        }
        let opt = |c: Option<usize>| c.map(|c| fields[c]).filter(|s| !s.is_empty()).map(str::to_owned);
        let birth_year = match opt(year_col) {
            None => None,
            Some(y) => match y.parse::<i32>() {
                Ok(y) => Some(y),
                Err(_) => {
                    warn!(
                        "{}:{}: birth_year `{y}` is not a year; row skipped",
                        name.display(),
                        i + 1
                    );
                    continue;
                }
            },
        };
        let doc_id = fields[doc_col].to_owned();
        if doc_id.is_empty() {
            warn!("{}:{}: empty doc_id; row skipped", name.display(), i + 1);
            continue;
        }
        let meta = DocMetadata {
            author: opt(author_col),
            birth_year,
            title: opt(title_col),
        };
        if table.insert(doc_id.clone(), meta).is_some() {
            warn!(
                "{}:{}: doc_id `{doc_id}` repeated; later row wins",
                name.display(),
                i + 1
            );
        }
    }
    Ok(table)
}

/// Returns the text between Project Gutenberg START/END sentinel lines when
/// present; otherwise the input unchanged.
pub fn strip_gutenberg_boilerplate(text: &str) -> &str {
    fn is_sentinel(line: &str, word: &str) -> bool {
        let l = line.trim_start().to_ascii_lowercase();
        l.starts_with("***") && l.contains(word) && l.contains("project gutenberg")
    }
    let mut start = 0;
    let mut end = text.len();
    let mut offset = 0;
    let mut seen_start = false;
    for line in text.split_inclusive('\n') {
        if !seen_start && is_sentinel(line, "start of") {
            start = offset + line.len();
            seen_start = true;
        } else if is_sentinel(line, "end of") {
            end = offset;
            break;
        }
        offset += line.len();
    }
    if start > end {
        return "";
    }
    &text[start..end]
}

/// Lazily reads the documents listed by a plaintext manifest.
pub struct PlaintextCorpus {
    manifest: CorpusManifest,
    metadata: HashMap<String, DocMetadata>,
    normalizer: Normalizer,
    files: std::vec::IntoIter<PathBuf>,
}

impl PlaintextCorpus {
    pub fn open(manifest: &CorpusManifest, normalizer: Normalizer) -> Result<Self> {
        if manifest.kind != CorpusKind::Plaintext {
            return Err(Error::Unsupported(format!(
                "manifest kind {:?} is not plaintext",
                manifest.kind
            )));
        }
        let metadata = match &manifest.metadata {
            None => HashMap::new(),
            Some(p) => read_metadata_table(&fs::read_to_string(p)?, p)?,
        };
        Ok(PlaintextCorpus {
            manifest: manifest.clone(),
            metadata,
            normalizer,
            files: manifest.files.clone().into_iter(),
        })
    }

    fn read(&self, path: &Path) -> Result<DocumentRecord> {
        let bytes = fs::read(path).map_err(|e| Error::Document {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        let text = match String::from_utf8(bytes) {
            Ok(s) => s,
            Err(e) => {
                warn!("{}: not valid UTF-8; decoding lossily", path.display());
                String::from_utf8_lossy(e.as_bytes()).into_owned()
            }
        };
        let doc_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let meta = self.metadata.get(&doc_id).cloned().unwrap_or_default();
        let key = self
            .manifest
            .admit(meta.birth_year.map(TemporalKey::Year), &path.display().to_string());
        Ok(DocumentRecord {
            doc_id,
            corpus_id: self.manifest.corpus_id.clone(),
            temporal_key: key,
            author: meta.author,
            title: meta.title,
            tokens: self.normalizer.tokens(strip_gutenberg_boilerplate(&text)),
        })
    }
}

impl Iterator for PlaintextCorpus {
    type Item = Result<DocumentRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let path = self.files.next()?;
        Some(self.read(&path))
    }
}

/// One record per manifest file; missing files yield per-document errors.
pub fn ingest_plaintext_corpus(manifest: &CorpusManifest, normalizer: Normalizer) -> Result<PlaintextCorpus> {
    PlaintextCorpus::open(manifest, normalizer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_sentinels() {
        let text = "Title page time flies\n*** START OF THE PROJECT GUTENBERG EBOOK X ***\nbody text\n*** END OF THE PROJECT GUTENBERG EBOOK X ***\nlicense time flies\n";
        assert_eq!(strip_gutenberg_boilerplate(text), "body text\n");
        assert_eq!(strip_gutenberg_boilerplate("no sentinels"), "no sentinels");
    }

    #[test]
    fn metadata_rows() {
        let t = "doc_id\tauthor\tbirth_year\ttitle\na\tAnn\t1801\tA Book\nb\t\t\tB\nc\tCee\tnineteen\tC\nd\tonly two\n";
        let m = read_metadata_table(t, Path::new("m.tsv")).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m["a"].birth_year, Some(1801));
        assert_eq!(
            m["b"],
            DocMetadata {
                author: None,
                birth_year: None,
                title: Some("B".into())
            }
        );
    }
}
