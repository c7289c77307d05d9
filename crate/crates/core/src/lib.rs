//! Proverb frequency analysis over historical and contemporary text corpora:
//! lexicon loading, corpus ingestion, token-level phrase matching, binned
//! time series, rank-frequency fits and shared-proverb networks.

pub mod corpus;
pub mod error;
pub mod export;
pub mod lexicon;
pub mod matcher;
pub mod network;
pub mod normalize;
pub mod temporal;
pub mod timeseries;
pub mod zipf;

pub use error::{Error, Result};
pub use lexicon::{Category, LexiconFormat, LexiconSet, ProverbEntry, ProverbId};
pub use matcher::{MatchIndex, MatchTable};
pub use normalize::Normalizer;
pub use temporal::{Bin, BinScheme, TemporalKey};
