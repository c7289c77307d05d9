//! Daily n-gram feeds: `date, ngram, count[, rank[, total]]` lines, tab- or
//! comma-delimited. Case and punctuation variants of the same n-gram on the
//! same day are summed.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use log::warn;

use super::ngram::parse_count;
use super::{NgramObservation, PeriodTotal, PeriodTotals, SkippedLine};
use crate::error::{Error, Result};
use crate::normalize::Normalizer;
use crate::temporal::TemporalKey;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Merged {
    count: u64,
    rank: Option<u32>,
    total: Option<u64>,
}

impl Merged {
    fn absorb(&mut self, other: Merged) {
        self.count += other.count;
        self.rank = match (self.rank, other.rank) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.total = match (self.total, other.total) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Associative, commutative merge of feed lines keyed by (day, n-gram).
/// Partial accumulators built over any partition of the input merge to the
/// same result.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeedAccumulator {
    cells: BTreeMap<(TemporalKey, Vec<String>), Merged>,
    totals: PeriodTotals,
}

impl FeedAccumulator {
    pub fn add(&mut self, obs: NgramObservation) {
        if obs.total_in_period.is_some() {
            self.totals.observe(
                obs.temporal_key,
                PeriodTotal {
                    occurrences: obs.total_in_period,
                    documents: None,
                },
            );
        }
        self.cells
            .entry((obs.temporal_key, obs.tokens))
            .or_default()
            .absorb(Merged {
                count: obs.occurrence_count,
                rank: obs.rank,
                total: obs.total_in_period,
            });
    }

    pub fn merge(&mut self, other: FeedAccumulator) {
        for (key, m) in other.cells {
            self.cells.entry(key).or_default().absorb(m);
        }
        for (k, t) in other.totals.periods {
            self.totals.observe(k, t);
        }
    }

    /// Merged observations sorted by (day, n-gram), and per-day totals.
    pub fn finish(self) -> (Vec<NgramObservation>, PeriodTotals) {
        let obs = self
            .cells
            .into_iter()
            .map(|((temporal_key, tokens), m)| NgramObservation {
                tokens,
                temporal_key,
                occurrence_count: m.count,
                document_count: None,
                rank: m.rank,
                total_in_period: m.total,
            })
            .collect();
        (obs, self.totals)
    }
}

/// Result of reading a feed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeedIngest {
    pub observations: Vec<NgramObservation>,
    pub totals: PeriodTotals,
    pub skipped: Vec<SkippedLine>,
}

/// Parses one feed line into an unmerged observation.
fn parse_line(line: &str, normalizer: &Normalizer) -> std::result::Result<Option<NgramObservation>, String> {
    let fields: Vec<&str> = if line.contains('\t') {
        line.split('\t').collect()
    } else {
        line.split(',').collect()
    };
    if fields.len() < 3 || fields.len() > 5 {
        return Err(format!("expected 3 to 5 fields, found {}", fields.len()));
    }
    let date = fields[0].trim();
    let key = match TemporalKey::parse(date) {
        Some(k @ TemporalKey::Date(_)) => k,
        _ => return Err(format!("invalid date `{date}`")),
    };
    let tokens = normalizer.tokens(fields[1]);
    if tokens.is_empty() {
        return Ok(None);
    }
    let occurrence_count = parse_count(fields[2], "count")?;
    let rank = match fields.get(3).map(|s| s.trim()) {
        Some(s) if !s.is_empty() => {
            let r = parse_count(s, "rank")?;
            if r == 0 {
                return Err("rank must be at least 1".into());
            }
            Some(u32::try_from(r).map_err(|_| format!("rank {r} out of range"))?)
        }
        _ => None,
    };
    let total_in_period = match fields.get(4).map(|s| s.trim()) {
        Some(s) if !s.is_empty() => Some(parse_count(s, "total")?),
        _ => None,
    };
    Ok(Some(NgramObservation {
        tokens,
        temporal_key: key,
        occurrence_count,
        document_count: None,
        rank,
        total_in_period,
    }))
}

/// Reads and merges a whole feed.
pub fn read_daily_feed(reader: impl BufRead, name: &Path, normalizer: &Normalizer) -> Result<FeedIngest> {
    let mut acc = FeedAccumulator::default();
    let mut skipped = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Ingest {
            path: name.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("date")) {
            continue;
        }
        match parse_line(line, normalizer) {
            Ok(Some(obs)) => acc.add(obs),
            Ok(None) => {}
            Err(reason) => {
                warn!("{}:{}: {reason}; line skipped", name.display(), i + 1);
                skipped.push(SkippedLine { line: i + 1, reason });
            }
        }
    }
    let (observations, totals) = acc.finish();
    Ok(FeedIngest {
        observations,
        totals,
        skipped,
    })
}

pub fn ingest_daily_ngram_feed(path: &Path, normalizer: &Normalizer) -> Result<FeedIngest> {
    let file = std::fs::File::open(path).map_err(|e| Error::Document {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    read_daily_feed(std::io::BufReader::new(file), path, normalizer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(src: &str) -> FeedIngest {
        read_daily_feed(src.as_bytes(), Path::new("f"), &Normalizer::default()).unwrap()
    }

    #[test]
    fn case_variants_merge() {
        let f = feed("2010-06-08, Never Say Never, 100\n2010-06-08, never say never, 50\n");
        assert_eq!(f.observations.len(), 1);
        assert_eq!(f.observations[0].occurrence_count, 150);
        assert_eq!(f.observations[0].tokens, ["never", "say", "never"]);
    }

    #[test]
    fn passthrough_and_rank_minimum() {
        let f = feed("2010-06-08\tenough is enough\t7\t40\t1000\n");
        assert_eq!(f.observations[0].occurrence_count, 7);
        assert_eq!(f.observations[0].rank, Some(40));
        let f = feed("2010-06-08\tA B\t1\t9\t100\n2010-06-08\ta b\t1\t3\t100\n");
        assert_eq!(f.observations[0].rank, Some(3));
        assert_eq!(
            f.totals
                .get(&TemporalKey::parse("2010-06-08").unwrap())
                .unwrap()
                .occurrences,
            Some(100)
        );
    }

    #[test]
    fn invalid_dates_are_skipped() {
        let f = feed("2010-02-30, a b, 1\n2010, a b, 1\n2010-03-01, a b, 2\n");
        assert_eq!(f.skipped.len(), 2);
        assert_eq!(f.observations.len(), 1);
    }

    #[test]
    fn partition_independent() {
        let lines: Vec<String> = (0..30)
            .map(|i| {
                format!(
                    "2011-01-{:02}\t{}\t{}\t{}\t500",
                    1 + i % 4,
                    ["x y", "X Y", "x, y!"][i % 3],
                    i + 1,
                    10 - i % 5
                )
            })
            .collect();
        let whole = feed(&lines.join("\n"));
        let norm = Normalizer::default();
        let mut parts: Vec<FeedAccumulator> = vec![Default::default(); 3];
        for (i, l) in lines.iter().enumerate() {
            parts[(i * 7) % 3].add(parse_line(l, &norm).unwrap().unwrap());
        }
        let mut acc = parts.pop().unwrap();
        for p in parts {
            acc.merge(p);
        }
        let (obs, totals) = acc.finish();
        assert_eq!(obs, whole.observations);
        assert_eq!(totals, whole.totals);
        let mass: u64 = obs.iter().map(|o| o.occurrence_count).sum();
        assert_eq!(mass, (1..=30).sum::<u64>());
    }
}
