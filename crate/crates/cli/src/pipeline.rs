//! Lexicon loading and the cached match stage shared by every command.

use std::fs;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use log::{info, warn};
use serde::Serialize;
use sha2::{Digest, Sha256};

use paremio_core::corpus::{
    ingest_daily_ngram_feed, ingest_news_xml, read_period_totals, CorpusKind, CorpusManifest, DocumentRecord,
    FeedAccumulator, NgramTsvReader, PeriodTotals, PlaintextCorpus,
};
use paremio_core::export::{read_match_table, write_match_table};
use paremio_core::lexicon::load_lexicon_file;
use paremio_core::matcher::{build_index, match_preaggregated, scan_corpus_parallel, TableKind};
use paremio_core::{Category, Error, LexiconFormat, LexiconSet, MatchTable, Normalizer};

use crate::{Failure, LexiconArgs, MatchArgs};

/// Files that make up a persisted match stage.
const TABLE_FILES: [&str; 5] = [
    "table_info.tsv",
    "matches.tsv",
    "summary.tsv",
    "documents.tsv",
    "periods.tsv",
];
const CACHE_FORMAT: &str = "paremio-match-cache-1";

pub struct Scan {
    pub lexicon: LexiconSet,
    pub manifest: CorpusManifest,
    pub table: MatchTable,
    pub totals: Option<PeriodTotals>,
    /// Per-file failures; the command exits with status 1 when non-empty.
    pub errors: Vec<(PathBuf, String)>,
}

impl Scan {
    pub fn finish(&self) -> Result<(), Failure> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(Failure::Data(anyhow!(
                "{} corpus file(s) failed; see errors.tsv",
                self.errors.len()
            )))
        }
    }
}

pub fn normalizer(args: &LexiconArgs) -> Normalizer {
    Normalizer::new().split_hyphens(args.split_hyphens)
}

pub fn workers(requested: Option<usize>) -> usize {
    requested
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn require_file(path: &Path, flag: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::config(anyhow!("--{flag}: {} does not exist", path.display())))
    }
}

pub fn load_lexicon(args: &LexiconArgs) -> Result<LexiconSet, Failure> {
    require_file(&args.lexicon, "lexicon")?;
    let norm = normalizer(args);
    let mut lexicon = load_lexicon_file(&args.lexicon, LexiconFormat::Tabbed, &norm)?;
    if let Some(path) = &args.expressions {
        require_file(path, "expressions")?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let n = lexicon.apply_expression_list(&text, &norm);
        info!("{n} entries labelled as proverbial expressions");
    }
    if args.exclude_expressions {
        lexicon = lexicon.excluding(Category::ProverbialExpression);
        if lexicon.is_empty() {
            return Err(Error::EmptyLexicon.into());
        }
    }
    Ok(lexicon)
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

pub fn ensure_out(out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::config(anyhow!("--out: cannot create {}: {e}", out.display())))?;
    let probe = out.join(".write-test");
    fs::write(&probe, b"")
        .and_then(|_| fs::remove_file(&probe))
        .map_err(|e| Failure::config(anyhow!("--out: {} is not writable: {e}", out.display())))
}

struct Hasher(Sha256);

impl Hasher {
    fn new() -> Self {
        Hasher(Sha256::new())
    }

    /// Length-prefixed so adjacent fields cannot run together.
    fn field(&mut self, bytes: &[u8]) {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    fn file(&mut self, path: &Path) -> std::io::Result<()> {
        let mut f = match fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                self.field(b"<missing>");
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        self.0.update(f.metadata()?.len().to_le_bytes());
        let mut buf = vec![0u8; 1 << 16];
        loop {
            let n = f.read(&mut buf)?;
            if n == 0 {
                break;
            }
            self.0.update(&buf[..n]);
        }
        Ok(())
    }

    fn hex(self) -> String {
        hex::encode(self.0.finalize())
    }
}

fn lexicon_hash(args: &LexiconArgs) -> std::io::Result<String> {
    let mut h = Hasher::new();
    h.file(&args.lexicon)?;
    match &args.expressions {
        Some(p) => h.file(p)?,
        None => h.field(b""),
    }
    h.field(&[u8::from(args.exclude_expressions), u8::from(args.split_hyphens)]);
    Ok(h.hex())
}

fn corpus_hash(manifest: &CorpusManifest) -> std::io::Result<String> {
    let mut h = Hasher::new();
    h.file(&manifest.path)?;
    let base = manifest.path.parent().unwrap_or(Path::new(""));
    for f in &manifest.files {
        let rel = f.strip_prefix(base).unwrap_or(f);
        h.field(rel.to_string_lossy().as_bytes());
        h.file(f)?;
    }
    for extra in [&manifest.metadata, &manifest.totals] {
        match extra {
            Some(p) => h.file(p)?,
            None => h.field(b""),
        }
    }
    Ok(h.hex())
}

#[derive(Serialize)]
struct RunInfo<'a> {
    tool: &'a str,
    version: &'a str,
    cache_key: &'a str,
    lexicon_sha256: &'a str,
    corpus_sha256: &'a str,
    corpus_id: &'a str,
    table_kind: &'a str,
    documents: usize,
    matched_proverbs: usize,
    failed_files: usize,
}

/// Loads the lexicon and manifest, then reuses a cached match table keyed by
/// content hashes or scans the corpus. Writes the table, `run.json` and,
/// on partial failure, `errors.tsv` into `args.out`.
pub fn match_stage(args: &MatchArgs) -> Result<Scan, Failure> {
    if !args.corpus.is_file() {
        return Err(Failure::config(anyhow!(
            "--corpus: {} does not exist",
            args.corpus.display()
        )));
    }
    let manifest = CorpusManifest::load(&args.corpus)?;
    let lexicon = load_lexicon(&args.lexicon)?;
    ensure_out(&args.out)?;
    if args.ngram_length == Some(0) {
        return Err(Failure::config(anyhow!("--ngram-length must be positive")));
    }

    let lex_hash = lexicon_hash(&args.lexicon)?;
    let corpus_hash = corpus_hash(&manifest)?;
    let key = {
        let mut h = Hasher::new();
        h.field(CACHE_FORMAT.as_bytes());
        h.field(env!("CARGO_PKG_VERSION").as_bytes());
        h.field(lex_hash.as_bytes());
        h.field(corpus_hash.as_bytes());
        h.field(args.ngram_length.unwrap_or(0).to_string().as_bytes());
        h.hex()
    };
    let cache_root = args.cache_dir.clone().unwrap_or_else(|| args.out.join(".cache"));
    let entry = cache_root.join(&key);

    let (table, totals, errors) = match load_cached(&entry)? {
        Some((table, totals)) => {
            info!("cache hit {key}; skipping scan");
            copy_table_files(&entry, &args.out)?;
            (table, totals, Vec::new())
        }
        None => {
            info!(
                "scanning corpus `{}` ({} files)",
                manifest.corpus_id,
                manifest.files.len()
            );
            let (table, totals, errors) = scan(&manifest, &lexicon, args)?;
            write_match_table(&table, &lexicon, &args.out)?;
            let periods = args.out.join("periods.tsv");
            match &totals {
                Some(t) => t.write_tsv(std::io::BufWriter::new(fs::File::create(&periods)?))?,
                None if periods.exists() => fs::remove_file(&periods)?,
                None => {}
            }
            if errors.is_empty() {
                store_cache(&args.out, &cache_root, &key)?;
            }
            (table, totals, errors)
        }
    };

    let errors_path = args.out.join("errors.tsv");
    if errors.is_empty() {
        if errors_path.exists() {
            fs::remove_file(&errors_path)?;
        }
    } else {
        let mut f = std::io::BufWriter::new(fs::File::create(&errors_path)?);
        writeln!(f, "file\terror")?;
        for (path, msg) in &errors {
            writeln!(f, "{}\t{}", path.display(), paremio_core::export::sanitize(msg))?;
        }
        f.flush()?;
    }

    let run = RunInfo {
        tool: "paremio",
        version: env!("CARGO_PKG_VERSION"),
        cache_key: &key,
        lexicon_sha256: &lex_hash,
        corpus_sha256: &corpus_hash,
        corpus_id: &manifest.corpus_id,
        table_kind: table.kind().as_str(),
        documents: table.document_count(),
        matched_proverbs: table.proverbs().count(),
        failed_files: errors.len(),
    };
    let mut json = serde_json::to_string_pretty(&run).map_err(|e| Failure::Data(e.into()))?;
    json.push('\n');
    fs::write(args.out.join("run.json"), json)?;

    Ok(Scan {
        lexicon,
        manifest,
        table,
        totals,
        errors,
    })
}

fn load_cached(entry: &Path) -> Result<Option<(MatchTable, Option<PeriodTotals>)>, Failure> {
    if !entry.join("complete").is_file() {
        return Ok(None);
    }
    let table = match read_match_table(entry) {
        Ok(t) => t,
        Err(e) => {
            warn!("ignoring unreadable cache entry {}: {e}", entry.display());
            return Ok(None);
        }
    };
    let periods = entry.join("periods.tsv");
    let totals = if periods.is_file() {
        Some(read_period_totals(&fs::read_to_string(&periods)?, &periods)?)
    } else {
        None
    };
    Ok(Some((table, totals)))
}

fn copy_table_files(from: &Path, to: &Path) -> std::io::Result<()> {
    for name in TABLE_FILES {
        let src = from.join(name);
        let dst = to.join(name);
        if src.is_file() {
            fs::copy(&src, &dst)?;
        } else if dst.exists() {
            fs::remove_file(&dst)?;
        }
    }
    Ok(())
}

/// Copies the freshly written table into the cache via a temporary
/// directory, so readers never see a half-written entry.
fn store_cache(out: &Path, root: &Path, key: &str) -> Result<(), Failure> {
    let result = (|| -> std::io::Result<()> {
        fs::create_dir_all(root)?;
        let tmp = root.join(format!(".tmp-{key}-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir_all(&tmp)?;
        copy_table_files(out, &tmp)?;
        fs::write(tmp.join("complete"), CACHE_FORMAT)?;
        let entry = root.join(key);
        if entry.exists() {
            fs::remove_dir_all(&entry)?;
        }
        fs::rename(&tmp, &entry)
    })();
    if let Err(e) = result {
        warn!("could not write cache entry under {}: {e}", root.display());
    }
    Ok(())
}

type ScanResult = (MatchTable, Option<PeriodTotals>, Vec<(PathBuf, String)>);

fn scan(manifest: &CorpusManifest, lexicon: &LexiconSet, args: &MatchArgs) -> Result<ScanResult, Failure> {
    let norm = normalizer(&args.lexicon);
    let workers = workers(args.workers);
    let mut errors = Vec::new();
    match manifest.kind {
        CorpusKind::Plaintext | CorpusKind::NewsXml => {
            let index = build_index(lexicon)?;
            let docs: Box<dyn Iterator<Item = paremio_core::Result<DocumentRecord>> + Send> = match manifest.kind {
                CorpusKind::Plaintext => Box::new(PlaintextCorpus::open(manifest, norm)?),
                _ => Box::new(ingest_news_xml(manifest, norm)?),
            };
            let ok = docs.filter_map(|d| match d {
                Ok(d) => Some(d),
                Err(e) => {
                    errors.push(error_entry(e));
                    None
                }
            });
            let table = scan_corpus_parallel(&index, &manifest.corpus_id, ok, workers)?;
            Ok((table, None, errors))
        }
        CorpusKind::NgramTsv => {
            let mut table = MatchTable::new(&manifest.corpus_id, TableKind::Periods);
            let mut totals = PeriodTotals::default();
            let mut length = args.ngram_length;
            for path in &manifest.files {
                let file = match fs::File::open(path) {
                    Ok(f) => f,
                    Err(e) => {
                        errors.push((path.clone(), e.to_string()));
                        continue;
                    }
                };
                let mut reader = NgramTsvReader::new(BufReader::new(file), path, norm);
                let Some(first) = reader.next() else {
                    if let Some(e) = reader.take_error() {
                        errors.push(error_entry(e));
                    }
                    continue;
                };
                let n = *length.get_or_insert(first.tokens.len());
                let lex_n = lexicon.filter_by_length(n);
                let stream = std::iter::once(first).chain(&mut reader).inspect(|o| {
                    if let Some(t) = o.total_in_period {
                        totals.observe(
                            o.temporal_key,
                            paremio_core::corpus::PeriodTotal {
                                occurrences: Some(t),
                                documents: None,
                            },
                        );
                    }
                });
                let part = match match_preaggregated(&lex_n, &manifest.corpus_id, stream) {
                    Ok(p) => p,
                    Err(e) => {
                        errors.push((path.clone(), e.to_string()));
                        continue;
                    }
                };
                if let Some(e) = reader.take_error() {
                    errors.push(error_entry(e));
                    continue;
                }
                report_skipped(path, reader.skipped().len());
                table.merge(part)?;
            }
            let totals = manifest_totals(manifest)?.unwrap_or(totals);
            Ok((table, Some(totals), errors))
        }
        CorpusKind::DailyFeed => {
            let mut acc = FeedAccumulator::default();
            for path in &manifest.files {
                match ingest_daily_ngram_feed(path, &norm) {
                    Ok(feed) => {
                        report_skipped(path, feed.skipped.len());
                        for obs in feed.observations {
                            acc.add(obs);
                        }
                    }
                    Err(e) => errors.push(error_entry(e)),
                }
            }
            let (observations, feed_totals) = acc.finish();
            let n = match args.ngram_length {
                Some(n) => n,
                None => observations.first().map_or(1, |o| o.tokens.len()),
            };
            let (keep, other): (Vec<_>, Vec<_>) = observations.into_iter().partition(|o| o.tokens.len() == n);
            if !other.is_empty() {
                warn!("{} feed rows are not {n}-grams and were ignored", other.len());
            }
            let table = match_preaggregated(&lexicon.filter_by_length(n), &manifest.corpus_id, keep)?;
            let totals = manifest_totals(manifest)?.unwrap_or(feed_totals);
            Ok((table, Some(totals), errors))
        }
    }
}

fn manifest_totals(manifest: &CorpusManifest) -> Result<Option<PeriodTotals>, Failure> {
    match &manifest.totals {
        Some(p) => Ok(Some(read_period_totals(&fs::read_to_string(p)?, p)?)),
        None => Ok(None),
    }
}

fn report_skipped(path: &Path, n: usize) {
    if n > 0 {
        warn!("{}: {n} malformed lines skipped", path.display());
    }
}

fn error_entry(e: Error) -> (PathBuf, String) {
    match e {
        Error::Document { path, message } => (path, message),
        Error::Ingest { path, line, message } => (path, format!("line {line}: {message}")),
        other => (PathBuf::new(), other.to_string()),
    }
}
