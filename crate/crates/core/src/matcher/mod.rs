//! Exact phrase matching of a lexicon against documents and pre-aggregated
//! n-gram counts.

mod automaton;
mod table;

use std::collections::HashMap;

use rayon::prelude::*;

pub use automaton::MatchIndex;
pub use table::{Cell, DocumentMeta, MatchTable, ProverbSummary, TableKind, Unit};

use crate::corpus::{DocumentRecord, NgramObservation};
use crate::error::{Error, Result};
use crate::lexicon::{LexiconSet, ProverbId};

/// One occurrence of a proverb in a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchEvent<'a> {
    pub proverb_id: ProverbId,
    pub doc_id: &'a str,
    /// Token offset of the first matched token.
    pub position: usize,
}

pub fn build_index(lexicon: &LexiconSet) -> Result<MatchIndex> {
    MatchIndex::build(lexicon)
}

/// Every occurrence of every pattern, overlapping and nested ones included.
pub fn scan_document<'a>(index: &MatchIndex, doc: &'a DocumentRecord) -> Vec<MatchEvent<'a>> {
    let mut events = Vec::new();
    index.for_each_match(&doc.tokens, |proverb_id, position| {
        events.push(MatchEvent {
            proverb_id,
            doc_id: &doc.doc_id,
            position,
        })
    });
    events
}

fn count_document(index: &MatchIndex, doc: &DocumentRecord) -> Vec<(ProverbId, u64)> {
    let mut counts: HashMap<ProverbId, u64> = HashMap::new();
    index.for_each_match(&doc.tokens, |id, _| *counts.entry(id).or_default() += 1);
    counts.into_iter().collect()
}

fn add_scanned(table: &mut MatchTable, index: &MatchIndex, doc: DocumentRecord) -> Result<()> {
    let counts = count_document(index, &doc);
    let meta = DocumentMeta {
        temporal_key: doc.temporal_key,
        author: doc.author,
        title: doc.title,
    };
    table.add_document(&doc.doc_id, meta, counts)
}

/// Scans documents serially. Duplicate document ids are an error.
pub fn scan_corpus(
    index: &MatchIndex,
    corpus_id: &str,
    docs: impl IntoIterator<Item = DocumentRecord>,
) -> Result<MatchTable> {
    let mut table = MatchTable::new(corpus_id, TableKind::Documents);
    for doc in docs {
        add_scanned(&mut table, index, doc)?;
    }
    Ok(table)
}

/// Scans documents on `workers` threads. The result does not depend on the
/// worker count or on the order in which documents arrive.
pub fn scan_corpus_parallel<I>(index: &MatchIndex, corpus_id: &str, docs: I, workers: usize) -> Result<MatchTable>
where
    I: IntoIterator<Item = DocumentRecord>,
    I::IntoIter: Send,
{
    if workers <= 1 {
        return scan_corpus(index, corpus_id, docs);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start {workers} workers: {e}")))?;
    let docs = docs.into_iter();
    pool.install(move || {
        docs.par_bridge()
            .try_fold(
                || MatchTable::new(corpus_id, TableKind::Documents),
                |mut table, doc| {
                    add_scanned(&mut table, index, doc)?;
                    Ok(table)
                },
            )
            .try_reduce(
                || MatchTable::new(corpus_id, TableKind::Documents),
                |mut a, b| {
                    a.merge(b)?;
                    Ok(a)
                },
            )
    })
}

/// Joins pre-aggregated n-gram observations to lexicon entries by exact
/// token equality. Every observation must have the same length.
pub fn match_preaggregated(
    lexicon: &LexiconSet,
    corpus_id: &str,
    observations: impl IntoIterator<Item = NgramObservation>,
) -> Result<MatchTable> {
    let mut table = MatchTable::new(corpus_id, TableKind::Periods);
    let mut expected: Option<usize> = None;
    for obs in observations {
        let n = obs.tokens.len();
        match expected {
            None => expected = Some(n),
            Some(e) if e != n => return Err(Error::MixedNgramLength { expected: e, found: n }),
            _ => {}
        }
        if let Some(id) = lexicon.lookup(&obs.tokens) {
            table.add_period(
                id,
                obs.temporal_key,
                Cell {
                    occurrences: obs.occurrence_count,
                    documents: obs.document_count,
                },
            )?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::normalize_text;
    use crate::temporal::TemporalKey;

    fn doc(id: &str, text: &str) -> DocumentRecord {
        DocumentRecord {
            doc_id: id.into(),
            corpus_id: "c".into(),
            temporal_key: None,
            author: None,
            title: None,
            tokens: normalize_text(text),
        }
    }

    #[test]
    fn totals_and_document_frequency() {
        let lex = LexiconSet::from_phrases(["time flies"]).unwrap();
        let idx = build_index(&lex).unwrap();
        let t = scan_corpus(&idx, "c", [doc("a", "Time flies!"), doc("b", "time, flies")]).unwrap();
        assert_eq!(t.summary(0).occurrences, 2);
        assert_eq!(t.summary(0).document_frequency, Some(2));
        let t = scan_corpus(&idx, "c", [doc("a", "time flies and time flies")]).unwrap();
        assert_eq!(t.summary(0).occurrences, 2);
        assert_eq!(t.summary(0).document_frequency, Some(1));
    }

    #[test]
    fn duplicate_doc_ids_rejected() {
        let lex = LexiconSet::from_phrases(["time flies"]).unwrap();
        let idx = build_index(&lex).unwrap();
        let err = scan_corpus(&idx, "c", [doc("a", "x"), doc("a", "y")]).unwrap_err();
        assert!(matches!(err, Error::DuplicateDocument(id) if id == "a"));
        let docs: Vec<_> = (0..50).map(|i| doc(&format!("d{}", i % 49), "time flies")).collect();
        assert!(matches!(
            scan_corpus_parallel(&idx, "c", docs, 4),
            Err(Error::DuplicateDocument(_))
        ));
    }

    #[test]
    fn events_carry_positions() {
        let lex = LexiconSet::from_phrases(["never say never"]).unwrap();
        let idx = build_index(&lex).unwrap();
        let d = doc("x", "Never say never");
        assert_eq!(
            scan_document(&idx, &d),
            vec![MatchEvent {
                proverb_id: 0,
                doc_id: "x",
                position: 0
            }]
        );
    }

    fn obs(text: &str, year: i32, occ: u64, docs: u64) -> NgramObservation {
        NgramObservation {
            tokens: normalize_text(text),
            temporal_key: TemporalKey::Year(year),
            occurrence_count: occ,
            document_count: Some(docs),
            rank: None,
            total_in_period: None,
        }
    }

    #[test]
    fn preaggregated_join() {
        let lex = LexiconSet::from_phrases(["never say never", "time flies"]).unwrap();
        let t = match_preaggregated(
            &lex.filter_by_length(3),
            "g",
            [
                obs("never say never", 1995, 412, 300),
                obs("Never say never", 1995, 5, 5),
                obs("rock that body", 1995, 9, 9),
            ],
        )
        .unwrap();
        let cells: Vec<_> = t.cells().collect();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].1, &Unit::Period(TemporalKey::Year(1995)));
        assert_eq!(
            *cells[0].2,
            Cell {
                occurrences: 417,
                documents: Some(305)
            }
        );
    }

    #[test]
    fn preaggregated_rejects_mixed_lengths() {
        let lex = LexiconSet::from_phrases(["never say never"]).unwrap();
        let err =
            match_preaggregated(&lex, "g", [obs("never say never", 1, 1, 1), obs("time flies", 1, 1, 1)]).unwrap_err();
        assert!(matches!(err, Error::MixedNgramLength { expected: 3, found: 2 }));
    }
}
