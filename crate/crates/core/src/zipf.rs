//! Rank-frequency tables and log-log least-squares power-law fits,
//! `F(r) = c * r^-alpha`.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::export::fmt_float;
use crate::lexicon::{LexiconSet, ProverbId};
use crate::matcher::MatchTable;
use crate::timeseries::CountingMode;

/// How equal frequencies are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Normalized text ascending.
    #[default]
    Text,
    /// Proverb id ascending, i.e. lexicon (input) order. Use this to carry a
    /// published ranking through unchanged.
    InputOrder,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(TieBreak::Text),
            "input" => Ok(TieBreak::InputOrder),
            other => Err(Error::Unsupported(format!("unknown tie rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankRow {
    pub rank: usize,
    pub proverb_id: ProverbId,
    pub text: String,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankTable {
    pub corpus_id: String,
    pub rows: Vec<RankRow>,
}

impl RankTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Ranks `(id, normalized text, frequency)` triples, most frequent first.
/// Zero frequencies are dropped.
pub fn rank_frequencies(
    corpus_id: &str,
    counts: impl IntoIterator<Item = (ProverbId, String, u64)>,
    ties: TieBreak,
) -> RankTable {
    let mut items: Vec<(ProverbId, String, u64)> = counts.into_iter().filter(|c| c.2 > 0).collect();
    items.sort_by(|a, b| {
        b.2.cmp(&a.2).then_with(|| match ties {
            TieBreak::Text => a.1.cmp(&b.1).then(a.0.cmp(&b.0)),
            TieBreak::InputOrder => a.0.cmp(&b.0),
        })
    });
    RankTable {
        corpus_id: corpus_id.to_owned(),
        rows: items
            .into_iter()
            .enumerate()
            .map(|(i, (proverb_id, text, frequency))| RankRow {
                rank: i + 1,
                proverb_id,
                text,
                frequency,
            })
            .collect(),
    }
}

/// Ranks the proverbs of a match table by total occurrences, or by
/// document frequency in presence mode.
pub fn rank_match_table(
    table: &MatchTable,
    lexicon: &LexiconSet,
    mode: CountingMode,
    ties: TieBreak,
) -> Result<RankTable> {
    let mut counts = Vec::new();
    for (id, s) in table.summaries() {
        let text = lexicon
            .get(id)
            .map(|e| e.text())
            .ok_or_else(|| Error::format("match table", format!("proverb id {id} is not in the lexicon")))?;
        let f = match mode {
            CountingMode::Occurrences => s.occurrences,
            CountingMode::DocumentPresence => s
                .document_frequency
                .ok_or_else(|| Error::Unsupported("table has no document counts for presence mode".into()))?,
        };
        counts.push((id, text, f));
    }
    Ok(rank_frequencies(table.corpus_id(), counts, ties))
}

/// Reads `proverb \t count` lines (optional header) into a lexicon and a
/// rank table. Lexicon ids follow line order.
pub fn read_counts(text: &str, corpus_id: &str, ties: TieBreak) -> Result<(LexiconSet, RankTable)> {
    let mut phrases = Vec::new();
    let mut freqs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("proverb\t")) {
            continue;
        }
        let (phrase, count) = line
            .rsplit_once('\t')
            .ok_or_else(|| Error::format("count table", format!("line {}: expected `proverb<TAB>count`", i + 1)))?;
        let count: u64 = count
            .trim()
            .replace(',', "")
            .parse()
            .map_err(|_| Error::format("count table", format!("line {}: `{count}` is not a count", i + 1)))?;
        phrases.push(phrase.to_owned());
        freqs.push(count);
    }
    let lexicon = LexiconSet::from_phrases(&phrases)?;
    if !lexicon.collisions().is_empty() {
        return Err(Error::format(
            "count table",
            format!("`{}` repeats an earlier proverb", lexicon.collisions()[0].raw_text),
        ));
    }
    let counts = lexicon.iter().zip(freqs).map(|(e, f)| (e.id, e.text(), f));
    let table = rank_frequencies(corpus_id, counts, ties);
    Ok((lexicon, table))
}

/// Inclusive 1-based rank interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankRange {
    pub from: usize,
    pub to: usize,
}

impl fmt::Display for RankRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.from, self.to)
    }
}

impl FromStr for RankRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Fit(format!("fit range `{s}` is not A:B"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let from = a.trim().parse().map_err(|_| bad())?;
        let to = b.trim().parse().map_err(|_| bad())?;
        if from < 1 || to < from {
            return Err(bad());
        }
        Ok(RankRange { from, to })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub c: f64,
    pub fit_range: RankRange,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of `ln F` on `ln r` over `range`.
/// `alpha` is the negated slope and `c` the exponentiated intercept.
pub fn fit_power_law(table: &RankTable, range: RankRange) -> Result<PowerLawFit> {
    if range.from < 1 || range.to < range.from || range.to > table.len() {
        return Err(Error::Fit(format!("range {range} outside ranks 1:{}", table.len())));
    }
    let rows = &table.rows[range.from - 1..range.to];
    if rows.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, range {range} has {}",
            rows.len()
        )));
    }
    if let Some(r) = rows.iter().find(|r| r.frequency == 0) {
        return Err(Error::Fit(format!("rank {} has zero frequency", r.rank)));
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.rank as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.frequency as f64).ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    let alpha = -slope;
    if !alpha.is_finite() {
        return Err(Error::Fit("slope is not finite".into()));
    }
    Ok(PowerLawFit {
        alpha,
        c: intercept.exp(),
        fit_range: range,
        r_squared,
        points: rows.len(),
    })
}

/// Slope, intercept and coefficient of determination of `y ~ x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = match syy.partial_cmp(&0.0) {
        Some(Ordering::Greater) => 1.0 - ss_res / syy,
        _ => 1.0,
    };
    (slope, intercept, r_squared)
}

/// Writes `rank, frequency, log10_rank, log10_frequency` rows.
pub fn export_loglog(table: &RankTable, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "rank\tfrequency\tlog10_rank\tlog10_frequency")?;
    for r in table.rows.iter().filter(|r| r.frequency > 0) {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.rank,
            r.frequency,
            fmt_float((r.rank as f64).log10()),
            fmt_float((r.frequency as f64).log10())
        )?;
    }
    Ok(())
}

/// Writes `rank, proverb_id, proverb, frequency` rows.
pub fn write_rank_table(table: &RankTable, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "rank\tproverb_id\tproverb\tfrequency")?;
    for r in &table.rows {
        writeln!(out, "{}\t{}\t{}\t{}", r.rank, r.proverb_id, r.text, r.frequency)?;
    }
    Ok(())
}

/// Writes the fit as `key: value` lines.
pub fn write_fit_report(corpus_id: &str, fit: &PowerLawFit, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "corpus_id: {corpus_id}")?;
    writeln!(out, "alpha: {}", fmt_float(fit.alpha))?;
    writeln!(out, "c: {}", fmt_float(fit.c))?;
    writeln!(out, "fit_range: {}", fit.fit_range)?;
    writeln!(out, "r_squared: {}", fmt_float(fit.r_squared))?;
    writeln!(out, "points: {}", fit.points)
}
