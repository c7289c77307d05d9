//! Browser bindings for three small views over `paremio-core`: a
//! rank-frequency explorer, series smoothing and co-occurrence centrality.
//!
//! Each operation is a plain function returning JSON so it can be tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use paremio_core::corpus::DocumentRecord;
use paremio_core::lexicon::load_lexicon;
use paremio_core::matcher::{build_index, scan_corpus};
use paremio_core::network::{betweenness, build_cooccurrence_graph, NodeKind, DEFAULT_MAX_NODES};
use paremio_core::temporal::Bin;
use paremio_core::timeseries::{rolling_average, CountingMode, FrequencySeries, SeriesPoint};
use paremio_core::zipf::{fit_power_law, read_counts, RankRange, TieBreak};
use paremio_core::{BinScheme, LexiconFormat, Normalizer};

#[derive(Serialize)]
struct RankPoint {
    rank: usize,
    text: String,
    frequency: u64,
}

#[derive(Serialize)]
struct Fit {
    alpha: f64,
    c: f64,
    r_squared: f64,
    from: usize,
    to: usize,
}

#[derive(Serialize)]
struct ZipfView {
    rows: Vec<RankPoint>,
    fit: Option<Fit>,
}

/// Ranks `phrase \t count` lines and fits a power law over ranks
/// `from..=to`. `to == 0` fits through the last rank.
pub fn zipf_json(counts: &str, from: usize, to: usize, input_order: bool) -> Result<String, String> {
    let ties = if input_order {
        TieBreak::InputOrder
    } else {
        TieBreak::Text
    };
    let (_, table) = read_counts(counts, "demo", ties).map_err(|e| e.to_string())?;
    let to = if to == 0 { table.len() } else { to };
    let fit = if table.len() >= 3 {
        let f = fit_power_law(&table, RankRange { from: from.max(1), to }).map_err(|e| e.to_string())?;
        Some(Fit {
            alpha: f.alpha,
            c: f.c,
            r_squared: f.r_squared,
            from: f.fit_range.from,
            to: f.fit_range.to,
        })
    } else {
        None
    };
    let rows = table
        .rows
        .into_iter()
        .map(|r| RankPoint {
            rank: r.rank,
            text: r.text,
            frequency: r.frequency,
        })
        .collect();
    Ok(serde_json::to_string(&ZipfView { rows, fit }).unwrap())
}

#[derive(Serialize)]
struct SmoothView {
    raw: Vec<Option<f64>>,
    smoothed: Vec<Option<f64>>,
}

/// Smooths a list of values separated by commas or whitespace. `-`, `na`
/// or an empty field is an undefined point.
pub fn smooth_json(values: &str, window: usize) -> Result<String, String> {
    let raw: Vec<Option<f64>> = values
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "-" | "na" | "NA" | "null" => Ok(None),
            _ => s.parse::<f64>().map(Some).map_err(|_| format!("`{s}` is not a number")),
        })
        .collect::<Result<_, _>>()?;
    let series = FrequencySeries {
        proverb_id: 0,
        mode: CountingMode::Occurrences,
        points: raw
            .iter()
            .enumerate()
            .map(|(i, v)| SeriesPoint {
                bin: Bin {
                    scheme: BinScheme::Year,
                    index: i as i64,
                },
                count: 0,
                total: None,
                f_rel: *v,
            })
            .collect(),
    };
    let smoothed = rolling_average(&series, window).map_err(|e| e.to_string())?;
    let smoothed = smoothed.points.iter().map(|p| p.f_rel).collect();
    Ok(serde_json::to_string(&SmoothView { raw, smoothed }).unwrap())
}

#[derive(Serialize)]
struct Node {
    label: String,
    betweenness: f64,
    proverbs: Vec<String>,
}

#[derive(Serialize)]
struct NetworkView {
    nodes: Vec<Node>,
    edges: Vec<(u32, u32)>,
}

/// Builds the document co-occurrence graph. Documents are separated by
/// blank lines; the first line of each names it.
pub fn network_json(lexicon: &str, documents: &str, normalized: bool) -> Result<String, String> {
    let normalizer = Normalizer::default();
    let lex = load_lexicon(
        lexicon.as_bytes(),
        Path::new("lexicon"),
        LexiconFormat::Tabbed,
        &normalizer,
    )
    .map_err(|e| e.to_string())?;
    let index = build_index(&lex).map_err(|e| e.to_string())?;
    let mut docs = Vec::new();
    for block in documents.split("\n\n").map(str::trim).filter(|b| !b.is_empty()) {
        let (name, body) = block.split_once('\n').unwrap_or((block, ""));
        docs.push(DocumentRecord {
            doc_id: name.trim().to_owned(),
            corpus_id: "demo".into(),
            temporal_key: None,
            author: None,
            title: None,
            tokens: normalizer.tokens(body),
        });
    }
    let table = scan_corpus(&index, "demo", docs).map_err(|e| e.to_string())?;
    let graph = build_cooccurrence_graph(&table, NodeKind::Document, DEFAULT_MAX_NODES).map_err(|e| e.to_string())?;
    let scores = betweenness(&graph, normalized);
    let by_doc: BTreeMap<&str, Vec<_>> = table.proverbs_by_document();
    let nodes = graph
        .labels
        .iter()
        .zip(&scores.scores)
        .map(|(label, &b)| Node {
            label: label.clone(),
            betweenness: b,
            proverbs: by_doc
                .get(label.as_str())
                .into_iter()
                .flatten()
                .filter_map(|&id| lex.get(id).map(|e| e.text()))
                .collect(),
        })
        .collect();
    Ok(serde_json::to_string(&NetworkView {
        nodes,
        edges: graph.edges().collect(),
    })
    .unwrap())
}

#[wasm_bindgen]
pub fn zipf(counts: &str, from: usize, to: usize, input_order: bool) -> Result<String, JsValue> {
    zipf_json(counts, from, to, input_order).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn smooth(values: &str, window: usize) -> Result<String, JsValue> {
    smooth_json(values, window).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn network(lexicon: &str, documents: &str, normalized: bool) -> Result<String, JsValue> {
    network_json(lexicon, documents, normalized).map_err(|e| JsValue::from_str(&e))
}
