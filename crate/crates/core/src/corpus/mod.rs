//! Corpus adapters. Each turns one on-disk format into [`DocumentRecord`]s
//! or [`NgramObservation`]s carrying temporal keys.

mod feed;
mod manifest;
mod news;
mod ngram;
mod plaintext;

pub use feed::{ingest_daily_ngram_feed, read_daily_feed, FeedAccumulator, FeedIngest};
pub use manifest::{CorpusKind, CorpusManifest};
pub use news::{ingest_news_xml, parse_news_article, NewsArticles};
pub use ngram::{flatten_year_tuples, ingest_ngram_tsv, read_period_totals, NgramTsvReader, PeriodTotal, PeriodTotals};
pub use plaintext::{
    ingest_plaintext_corpus, read_metadata_table, strip_gutenberg_boilerplate, DocMetadata, PlaintextCorpus,
};

use crate::temporal::TemporalKey;

/// One document of a document-level corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub corpus_id: String,
    pub temporal_key: Option<TemporalKey>,
    pub author: Option<String>,
    pub title: Option<String>,
    pub tokens: Vec<String>,
}

/// One pre-aggregated n-gram count for one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramObservation {
    pub tokens: Vec<String>,
    pub temporal_key: TemporalKey,
    pub occurrence_count: u64,
    /// Volumes or documents containing the n-gram.
    pub document_count: Option<u64>,
    pub rank: Option<u32>,
    /// All n-grams observed in the period.
    pub total_in_period: Option<u64>,
}

/// A skipped input line and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}
