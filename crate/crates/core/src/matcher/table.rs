use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lexicon::ProverbId;
use crate::temporal::TemporalKey;

/// What a match cell is keyed by: a scanned document or a corpus period.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Document(String),
    Period(TemporalKey),
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Document(id) => f.write_str(id),
            Unit::Period(k) => write!(f, "{k}"),
        }
    }
}

/// Counts for one (proverb, unit) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cell {
    pub occurrences: u64,
    /// Documents containing the proverb: always 1 for document cells, the
    /// reported volume count for period cells (`None` when not reported).
    pub documents: Option<u64>,
}

impl Cell {
    fn add(&mut self, other: Cell) {
        self.occurrences += other.occurrences;
        self.documents = match (self.documents, other.documents) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Built by scanning full documents.
    Documents,
    /// Built from pre-aggregated per-period n-gram counts.
    Periods,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Documents => "documents",
            TableKind::Periods => "periods",
        }
    }
}

/// Metadata retained for every scanned document, matched or not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentMeta {
    pub temporal_key: Option<TemporalKey>,
    pub author: Option<String>,
    pub title: Option<String>,
}

/// Corpus-wide totals for one proverb.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProverbSummary {
    pub occurrences: u64,
    /// Documents (or reported volumes) with at least one match.
    pub document_frequency: Option<u64>,
}

/// Aggregated match counts. Merging is elementwise addition, so tables
/// built over any partition of a corpus combine to the same result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchTable {
    corpus_id: String,
    kind: TableKind,
    cells: BTreeMap<ProverbId, BTreeMap<Unit, Cell>>,
    documents: BTreeMap<String, DocumentMeta>,
}

impl MatchTable {
    pub fn new(corpus_id: impl Into<String>, kind: TableKind) -> Self {
        MatchTable {
            corpus_id: corpus_id.into(),
            kind,
            cells: BTreeMap::new(),
            documents: BTreeMap::new(),
        }
    }

    pub fn corpus_id(&self) -> &str {
        &self.corpus_id
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    /// Every scanned document, including those without matches.
    pub fn documents(&self) -> &BTreeMap<String, DocumentMeta> {
        &self.documents
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    /// Registers a scanned document and its per-proverb occurrence counts.
    pub fn add_document(
        &mut self,
        doc_id: &str,
        meta: DocumentMeta,
        counts: impl IntoIterator<Item = (ProverbId, u64)>,
    ) -> Result<()> {
        if self.kind != TableKind::Documents {
            return Err(Error::Unsupported("documents cannot be added to a period table".into()));
        }
        if self.documents.insert(doc_id.to_owned(), meta).is_some() {
            return Err(Error::DuplicateDocument(doc_id.to_owned()));
        }
        for (id, n) in counts {
            if n == 0 {
                continue;
            }
            self.cells.entry(id).or_default().insert(
                Unit::Document(doc_id.to_owned()),
                Cell {
                    occurrences: n,
                    documents: Some(1),
                },
            );
        }
        Ok(())
    }

    /// Adds counts for a proverb in one period; repeated periods accumulate.
    pub fn add_period(&mut self, id: ProverbId, key: TemporalKey, cell: Cell) -> Result<()> {
        if self.kind != TableKind::Periods {
            return Err(Error::Unsupported("periods cannot be added to a document table".into()));
        }
        self.cells
            .entry(id)
            .or_default()
            .entry(Unit::Period(key))
            .or_insert(Cell {
                occurrences: 0,
                documents: Some(0),
            })
            .add(cell);
        Ok(())
    }

    /// Inserts a cell read back from persisted form.
    pub(crate) fn insert_cell(&mut self, id: ProverbId, unit: Unit, cell: Cell) {
        self.cells.entry(id).or_default().insert(unit, cell);
    }

    pub(crate) fn insert_document(&mut self, doc_id: String, meta: DocumentMeta) {
        self.documents.insert(doc_id, meta);
    }

    pub fn merge(&mut self, other: MatchTable) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::Unsupported("cannot merge document and period tables".into()));
        }
        if self.corpus_id != other.corpus_id {
            return Err(Error::CorpusMismatch {
                left: self.corpus_id.clone(),
                right: other.corpus_id,
            });
        }
        for (doc_id, meta) in other.documents {
            if self.documents.contains_key(&doc_id) {
                return Err(Error::DuplicateDocument(doc_id));
            }
            self.documents.insert(doc_id, meta);
        }
        for (id, units) in other.cells {
            let mine = self.cells.entry(id).or_default();
            for (unit, cell) in units {
                match mine.get_mut(&unit) {
                    Some(c) => c.add(cell),
                    None => {
                        mine.insert(unit, cell);
                    }
                }
            }
        }
        Ok(())
    }

    /// Cells of one proverb.
    pub fn cells_of(&self, id: ProverbId) -> Option<&BTreeMap<Unit, Cell>> {
        self.cells.get(&id)
    }

    /// All cells in (proverb, unit) order.
    pub fn cells(&self) -> impl Iterator<Item = (ProverbId, &Unit, &Cell)> {
        self.cells
            .iter()
            .flat_map(|(&id, units)| units.iter().map(move |(u, c)| (id, u, c)))
    }

    /// Proverbs with at least one match, in id order.
    pub fn proverbs(&self) -> impl Iterator<Item = ProverbId> + '_ {
        self.cells.keys().copied()
    }

    pub fn summary(&self, id: ProverbId) -> ProverbSummary {
        let mut s = ProverbSummary {
            occurrences: 0,
            document_frequency: Some(0),
        };
        if let Some(units) = self.cells.get(&id) {
            for c in units.values() {
                s.occurrences += c.occurrences;
                s.document_frequency = match (s.document_frequency, c.documents) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
            }
        }
        s
    }

    pub fn summaries(&self) -> BTreeMap<ProverbId, ProverbSummary> {
        self.proverbs().map(|id| (id, self.summary(id))).collect()
    }

    /// Proverb ids found in each document.
    pub fn proverbs_by_document(&self) -> BTreeMap<&str, Vec<ProverbId>> {
        let mut out: BTreeMap<&str, Vec<ProverbId>> = BTreeMap::new();
        for (id, unit, _) in self.cells() {
            if let Unit::Document(d) = unit {
                out.entry(d.as_str()).or_default().push(id);
            }
        }
        out
    }
}
