//! Pipeline results on the generated fixture corpora against the plans
//! written alongside them by `fixtures/generate.py`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use paremio_core::corpus::{ingest_daily_ngram_feed, ingest_news_xml, CorpusManifest, NgramTsvReader, PlaintextCorpus};
use paremio_core::lexicon::load_lexicon_file;
use paremio_core::matcher::{build_index, match_preaggregated, scan_corpus, Unit};
use paremio_core::timeseries::{bin_counts, BinSpec, CountingMode, FrequencySeries};
use paremio_core::{BinScheme, LexiconFormat, LexiconSet, MatchTable, Normalizer};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn lexicon() -> LexiconSet {
    load_lexicon_file(
        &fixtures().join("lexicon/proverbs.tsv"),
        LexiconFormat::Tabbed,
        &Normalizer::default(),
    )
    .unwrap()
}

fn plan(rel: &str) -> Vec<Vec<String>> {
    fs::read_to_string(fixtures().join(rel))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_owned).collect())
        .collect()
}

fn manifest(name: &str) -> CorpusManifest {
    CorpusManifest::load(&fixtures().join(name).join("manifest.toml")).unwrap()
}

fn scan_plaintext() -> MatchTable {
    let lex = lexicon();
    let docs = PlaintextCorpus::open(&manifest("gutenberg"), Normalizer::default())
        .unwrap()
        .map(Result::unwrap);
    scan_corpus(&build_index(&lex).unwrap(), "gutenberg", docs).unwrap()
}

fn series_rows(series: &[FrequencySeries]) -> Vec<(u32, String, u64, Option<u64>)> {
    series
        .iter()
        .flat_map(|s| {
            s.points
                .iter()
                .map(move |p| (s.proverb_id, p.bin.start_label(), p.count, p.total))
        })
        .collect()
}

fn planned_series(rel: &str, mode: CountingMode) -> Vec<(u32, String, u64, Option<u64>)> {
    plan(rel)
        .into_iter()
        .map(|r| {
            let count = match mode {
                CountingMode::Occurrences => &r[2],
                CountingMode::DocumentPresence => &r[3],
            };
            (
                r[0].parse().unwrap(),
                r[1].clone(),
                count.parse().unwrap(),
                Some(r[4].parse().unwrap()),
            )
        })
        .collect()
}

#[test]
fn lexicon_fixture_loads_with_collisions() {
    let lex = lexicon();
    assert_eq!(lex.len(), 38);
    assert_eq!(lex.collisions().len(), 2);
    assert_eq!(lex.get(3).unwrap().text(), "time flies");
}

#[test]
fn plaintext_matches_equal_plan() {
    let table = scan_plaintext();
    assert_eq!(table.document_count(), 20);
    let got: Vec<(u32, String, u64)> = table
        .cells()
        .map(|(id, unit, cell)| match unit {
            Unit::Document(d) => (id, d.clone(), cell.occurrences),
            Unit::Period(_) => unreachable!(),
        })
        .collect();
    let mut want: Vec<(u32, String, u64)> = plan("gutenberg/plan_matches.tsv")
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[1].clone(), r[2].parse().unwrap()))
        .collect();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn plaintext_series_equal_plan() {
    let table = scan_plaintext();
    for mode in [CountingMode::Occurrences, CountingMode::DocumentPresence] {
        let series = bin_counts(&table, &BinSpec::new(BinScheme::Years(20)), mode).unwrap();
        assert_eq!(
            series_rows(&series),
            planned_series("gutenberg/plan_series_20y.tsv", mode)
        );
        for s in &series {
            for p in &s.points {
                let t = p.total.unwrap();
                let expect = (t > 0).then(|| p.count as f64 / t as f64);
                assert_eq!(p.f_rel, expect);
            }
        }
    }
}

#[test]
fn undated_documents_count_in_totals_only() {
    let table = scan_plaintext();
    let undated: Vec<String> = plan("gutenberg/plan_undated.tsv")
        .into_iter()
        .map(|r| r[0].clone())
        .collect();
    assert!(!undated.is_empty());
    for d in &undated {
        assert_eq!(table.documents()[d].temporal_key, None);
    }
    let series = bin_counts(&table, &BinSpec::new(BinScheme::Years(20)), CountingMode::Occurrences).unwrap();
    let binned: u64 = series.iter().flat_map(|s| &s.points).map(|p| p.count).sum();
    let all: u64 = table.summaries().values().map(|s| s.occurrences).sum();
    let from_undated: u64 = table
        .cells()
        .filter(|(_, u, _)| matches!(u, Unit::Document(d) if undated.contains(d)))
        .map(|(_, _, c)| c.occurrences)
        .sum();
    assert!(from_undated > 0, "fixture should plant proverbs in undated documents");
    assert_eq!(binned + from_undated, all);
}

fn scan_news() -> MatchTable {
    let lex = lexicon();
    let docs = ingest_news_xml(&manifest("nyt"), Normalizer::default())
        .unwrap()
        .map(Result::unwrap);
    scan_corpus(&build_index(&lex).unwrap(), "nyt", docs).unwrap()
}

#[test]
fn news_month_series_equal_plan() {
    let table = scan_news();
    assert_eq!(table.document_count(), 50);
    for mode in [CountingMode::Occurrences, CountingMode::DocumentPresence] {
        let series = bin_counts(&table, &BinSpec::new(BinScheme::Month), mode).unwrap();
        assert_eq!(series_rows(&series), planned_series("nyt/plan_series_month.tsv", mode));
        // July 1990 has no articles: present, with an undefined value.
        let gap = series[0]
            .points
            .iter()
            .find(|p| p.bin.start_label() == "1990-07")
            .unwrap();
        assert_eq!((gap.total, gap.f_rel), (Some(0), None));
    }
}

#[test]
fn news_month_to_year_refinement() {
    let table = scan_news();
    let months = bin_counts(&table, &BinSpec::new(BinScheme::Month), CountingMode::Occurrences).unwrap();
    let years = bin_counts(&table, &BinSpec::new(BinScheme::Year), CountingMode::Occurrences).unwrap();
    for (m, y) in months.iter().zip(&years) {
        let mut sums: BTreeMap<i32, (u64, u64)> = BTreeMap::new();
        for p in &m.points {
            let e = sums.entry(p.bin.start_year()).or_default();
            e.0 += p.count;
            e.1 += p.total.unwrap();
        }
        let got: BTreeMap<i32, (u64, u64)> = y
            .points
            .iter()
            .map(|p| (p.bin.start_year(), (p.count, p.total.unwrap())))
            .collect();
        assert_eq!(got, sums);
    }
}

#[test]
fn ngram_join_equals_plan() {
    let lex = lexicon();
    let path = fixtures().join("google/ngrams.tsv");
    let mut reader = NgramTsvReader::new(
        std::io::BufReader::new(fs::File::open(&path).unwrap()),
        &path,
        Normalizer::default(),
    );
    let table = match_preaggregated(&lex.filter_by_length(3), "google", &mut reader).unwrap();
    assert_eq!(reader.skipped().len(), 3);
    let mut want = BTreeMap::new();
    for r in plan("google/plan_ngrams.tsv") {
        let tokens: Vec<String> = r[0].split(' ').map(str::to_owned).collect();
        if let Some(id) = lex.lookup(&tokens) {
            want.insert(
                (id, r[1].clone()),
                (r[2].parse::<u64>().unwrap(), r[3].parse::<u64>().unwrap()),
            );
        }
    }
    let got: BTreeMap<(u32, String), (u64, u64)> = table
        .cells()
        .map(|(id, u, c)| ((id, u.to_string()), (c.occurrences, c.documents.unwrap())))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn feed_merge_equals_plan() {
    let feed = ingest_daily_ngram_feed(&fixtures().join("twitter/feed.tsv"), &Normalizer::default()).unwrap();
    let got: Vec<(String, String, u64)> = feed
        .observations
        .iter()
        .map(|o| (o.temporal_key.to_string(), o.tokens.join(" "), o.occurrence_count))
        .collect();
    let want: Vec<(String, String, u64)> = plan("twitter/plan_merged.tsv")
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone(), r[2].parse().unwrap()))
        .collect();
    assert_eq!(got, want);
    let mass: u64 = fs::read_to_string(fixtures().join("twitter/plan_mass.txt"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert_eq!(feed.observations.iter().map(|o| o.occurrence_count).sum::<u64>(), mass);
}
