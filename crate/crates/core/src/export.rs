//! Tab-separated output files and the float format shared by all of them.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::lexicon::LexiconSet;
use crate::matcher::{Cell, DocumentMeta, MatchTable, TableKind, Unit};
use crate::temporal::TemporalKey;
use crate::timeseries::FrequencySeries;

/// Nine significant digits in fixed notation; `0` for zero, empty for
/// non-finite values.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return String::new();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = |m: i32| (8 - m).max(0) as usize;
    let s = format!("{:.*}", decimals(mag), v);
    // Rounding can carry into the next power of ten (9.9999999996 -> 10.0000000).
    let rounded: f64 = s.parse().unwrap_or(v);
    if rounded.abs() >= 10f64.powi(mag + 1) {
        format!("{:.*}", decimals(mag + 1), v)
    } else {
        s
    }
}

/// Replaces characters that would break a tab-separated row.
pub fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Writes `table_info.tsv`, `matches.tsv`, `summary.tsv` and, for document
/// tables, `documents.tsv` into `dir`.
pub fn write_match_table(table: &MatchTable, lexicon: &LexiconSet, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut info = create(&dir.join("table_info.tsv"))?;
    writeln!(info, "key\tvalue")?;
    writeln!(info, "corpus_id\t{}", sanitize(table.corpus_id()))?;
    writeln!(info, "kind\t{}", table.kind().as_str())?;
    info.flush()?;

    let mut m = create(&dir.join("matches.tsv"))?;
    writeln!(m, "proverb_id\tunit\toccurrence_count\tpresence")?;
    for (id, unit, cell) in table.cells() {
        writeln!(
            m,
            "{id}\t{}\t{}\t{}",
            sanitize(&unit.to_string()),
            cell.occurrences,
            opt(cell.documents)
        )?;
    }
    m.flush()?;

    let mut s = create(&dir.join("summary.tsv"))?;
    writeln!(s, "proverb_id\tproverb\ttotal_occurrences\tdocument_frequency")?;
    for (id, sum) in table.summaries() {
        let text = lexicon.get(id).map(|e| e.text()).unwrap_or_default();
        writeln!(s, "{id}\t{text}\t{}\t{}", sum.occurrences, opt(sum.document_frequency))?;
    }
    s.flush()?;

    if table.kind() == TableKind::Documents {
        let mut d = create(&dir.join("documents.tsv"))?;
        writeln!(d, "doc_id\ttemporal_key\tauthor\ttitle")?;
        for (doc_id, meta) in table.documents() {
            writeln!(
                d,
                "{}\t{}\t{}\t{}",
                sanitize(doc_id),
                opt(meta.temporal_key),
                sanitize(meta.author.as_deref().unwrap_or("")),
                sanitize(meta.title.as_deref().unwrap_or(""))
            )?;
        }
        d.flush()?;
    }
    Ok(())
}

fn rows(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i + 1, l.split('\t').map(str::to_owned).collect()))
        .collect())
}

/// Reads a table written by [`write_match_table`].
pub fn read_match_table(dir: &Path) -> Result<MatchTable> {
    let info_path = dir.join("table_info.tsv");
    let mut corpus_id = None;
    let mut kind = None;
    for (_, r) in rows(&info_path)? {
        match (r.first().map(String::as_str), r.get(1)) {
            (Some("corpus_id"), Some(v)) => corpus_id = Some(v.clone()),
            (Some("kind"), Some(v)) => {
                kind = Some(match v.as_str() {
                    "documents" => TableKind::Documents,
                    "periods" => TableKind::Periods,
                    other => return Err(Error::format("table_info.tsv", format!("unknown kind `{other}`"))),
                })
            }
            _ => {}
        }
    }
    let (Some(corpus_id), Some(kind)) = (corpus_id, kind) else {
        return Err(Error::format("table_info.tsv", "missing corpus_id or kind"));
    };
    let mut table = MatchTable::new(corpus_id, kind);

    let bad = |file: &str, line: usize, what: &str| Error::format("match table", format!("{file} line {line}: {what}"));
    if kind == TableKind::Documents {
        for (line, r) in rows(&dir.join("documents.tsv"))? {
            if r.len() != 4 {
                return Err(bad("documents.tsv", line, "expected 4 columns"));
            }
            let temporal_key = match r[1].as_str() {
                "" => None,
                k => Some(TemporalKey::parse(k).ok_or_else(|| bad("documents.tsv", line, "bad temporal key"))?),
            };
            let nonempty = |s: &String| (!s.is_empty()).then(|| s.clone());
            table.insert_document(
                r[0].clone(),
                DocumentMeta {
                    temporal_key,
                    author: nonempty(&r[2]),
                    title: nonempty(&r[3]),
                },
            );
        }
    }
    for (line, r) in rows(&dir.join("matches.tsv"))? {
        if r.len() != 4 {
            return Err(bad("matches.tsv", line, "expected 4 columns"));
        }
        let id = r[0].parse().map_err(|_| bad("matches.tsv", line, "bad proverb id"))?;
        let unit = match kind {
            TableKind::Documents => Unit::Document(r[1].clone()),
            TableKind::Periods => {
                Unit::Period(TemporalKey::parse(&r[1]).ok_or_else(|| bad("matches.tsv", line, "bad period"))?)
            }
        };
        let occurrences = r[2].parse().map_err(|_| bad("matches.tsv", line, "bad count"))?;
        let documents = match r[3].as_str() {
            "" => None,
            v => Some(v.parse().map_err(|_| bad("matches.tsv", line, "bad presence"))?),
        };
        table.insert_cell(id, unit, Cell { occurrences, documents });
    }
    Ok(table)
}

/// Long-format series rows. `smoothed`, when given, pairs with `series`
/// element by element.
pub fn write_series(
    series: &[FrequencySeries],
    smoothed: Option<&[FrequencySeries]>,
    lexicon: &LexiconSet,
    mut out: impl Write,
) -> Result<()> {
    writeln!(
        out,
        "proverb\tbin_start\tbin_width\tcount\ttotal\tf_rel\tf_rel_smoothed"
    )?;
    for (i, s) in series.iter().enumerate() {
        let text = lexicon
            .get(s.proverb_id)
            .map(|e| e.text())
            .ok_or_else(|| Error::format("series", format!("proverb id {} is not in the lexicon", s.proverb_id)))?;
        let smooth = smoothed.map(|all| &all[i].points);
        for (j, p) in s.points.iter().enumerate() {
            let sm = smooth.and_then(|pts| pts[j].f_rel);
            writeln!(
                out,
                "{text}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.bin.start_label(),
                p.bin.scheme.width_label(),
                p.count,
                opt(p.total),
                p.f_rel.map(fmt_float).unwrap_or_default(),
                sm.map(fmt_float).unwrap_or_default()
            )?;
        }
    }
    Ok(())
}
