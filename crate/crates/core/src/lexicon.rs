//! The proverb lexicon that drives all matching.
//!
//! File format: UTF-8, one entry per line, with an optional tab-separated
//! category column (`proverb` or `proverbial_expression`). Blank lines and
//! lines starting with `#` are ignored. Entries are deduplicated on their
//! normalized token sequence; the first spelling wins.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use log::{info, warn};

use crate::error::{Error, Result};
use crate::normalize::{join_tokens, Normalizer};

pub type ProverbId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Category {
    Proverb,
    ProverbialExpression,
    #[default]
    Unknown,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Proverb => "proverb",
            Category::ProverbialExpression => "proverbial_expression",
            Category::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "proverb" => Ok(Category::Proverb),
            "proverbial_expression" => Ok(Category::ProverbialExpression),
            "unknown" | "" => Ok(Category::Unknown),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverbEntry {
    pub id: ProverbId,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub category: Category,
}

impl ProverbEntry {
    /// Token count, the n of the n-gram.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Normalized text, tokens joined by single spaces.
    pub fn text(&self) -> String {
        join_tokens(&self.tokens)
    }
}

/// A line whose normalization duplicated an earlier entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub line: usize,
    pub raw_text: String,
    pub kept: ProverbId,
}

/// How lexicon lines are split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LexiconFormat {
    /// The whole line is the entry.
    Lines,
    /// Entry, then an optional tab-separated category column.
    #[default]
    Tabbed,
}

/// Immutable, deduplicated set of proverb entries.
#[derive(Debug, Clone, Default)]
pub struct LexiconSet {
    entries: Vec<ProverbEntry>,
    index: HashMap<Vec<String>, ProverbId>,
    collisions: Vec<Collision>,
}

impl LexiconSet {
    /// Builds a set from raw phrases, in order, with default normalization.
    pub fn from_phrases<S: AsRef<str>>(phrases: impl IntoIterator<Item = S>) -> Result<Self> {
        let normalizer = Normalizer::default();
        let mut set = LexiconSet::default();
        for (i, p) in phrases.into_iter().enumerate() {
            set.push(i + 1, p.as_ref(), Category::Unknown, &normalizer);
        }
        if set.entries.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        Ok(set)
    }

    fn push(&mut self, line: usize, raw: &str, category: Category, normalizer: &Normalizer) {
        let tokens = normalizer.tokens(raw);
        if tokens.is_empty() {
            warn!("lexicon line {line}: `{raw}` has no tokens after normalization; skipped");
            return;
        }
        if let Some(&kept) = self.index.get(&tokens) {
            warn!("lexicon line {line}: `{raw}` duplicates entry {kept}; merged");
            self.collisions.push(Collision {
                line,
                raw_text: raw.to_owned(),
                kept,
            });
            return;
        }
        let id = self.entries.len() as ProverbId;
        self.index.insert(tokens.clone(), id);
        self.entries.push(ProverbEntry {
            id,
            raw_text: raw.to_owned(),
            tokens,
            category,
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in id order.
    pub fn entries(&self) -> &[ProverbEntry] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProverbEntry> {
        self.entries.iter()
    }

    pub fn collisions(&self) -> &[Collision] {
        &self.collisions
    }

    pub fn get(&self, id: ProverbId) -> Option<&ProverbEntry> {
        self.entries
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn lookup(&self, tokens: &[String]) -> Option<ProverbId> {
        self.index.get(tokens).copied()
    }

    pub fn max_len(&self) -> usize {
        self.entries.iter().map(ProverbEntry::len).max().unwrap_or(0)
    }

    fn subset(&self, keep: impl Fn(&ProverbEntry) -> bool) -> LexiconSet {
        let entries: Vec<ProverbEntry> = self.entries.iter().filter(|e| keep(e)).cloned().collect();
        let index = entries.iter().map(|e| (e.tokens.clone(), e.id)).collect();
        LexiconSet {
            entries,
            index,
            collisions: Vec::new(),
        }
    }

    /// Entries with exactly `n` tokens. Ids are preserved.
    pub fn filter_by_length(&self, n: usize) -> LexiconSet {
        self.subset(|e| e.len() == n)
    }

    /// Entries not labelled with `category`.
    pub fn excluding(&self, category: Category) -> LexiconSet {
        self.subset(|e| e.category != category)
    }

    /// Labels every entry found in `expressions` (one phrase per line) as a
    /// proverbial expression. Returns how many entries were relabelled.
    pub fn apply_expression_list(&mut self, expressions: &str, normalizer: &Normalizer) -> usize {
        let mut n = 0;
        for line in expressions.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens = normalizer.tokens(line);
            if let Some(&id) = self.index.get(&tokens) {
                let pos = self.entries.binary_search_by_key(&id, |e| e.id).expect("indexed id");
                let entry = &mut self.entries[pos];
                if entry.category != Category::ProverbialExpression {
                    entry.category = Category::ProverbialExpression;
                    n += 1;
                }
            }
        }
        n
    }

    /// Entry counts keyed by token length.
    pub fn length_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist = std::collections::BTreeMap::new();
        for e in &self.entries {
            *hist.entry(e.len()).or_insert(0usize) += 1;
        }
        hist.into_iter().collect()
    }
}

/// Parses a lexicon from `source`. `name` labels diagnostics.
pub fn load_lexicon(
    mut source: impl Read,
    name: &Path,
    format: LexiconFormat,
    normalizer: &Normalizer,
) -> Result<LexiconSet> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let mut set = LexiconSet::default();
    for (i, raw_line) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = i + 1;
        let line = std::str::from_utf8(raw_line).map_err(|e| Error::Ingest {
            path: name.to_owned(),
            line: line_no,
            message: format!("invalid UTF-8: {e}"),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (text, category) = match format {
            LexiconFormat::Lines => (line, Category::Unknown),
            LexiconFormat::Tabbed => match line.split_once('\t') {
                None => (line, Category::Unknown),
                Some((text, cat)) => {
                    let category = cat.parse().map_err(|message| Error::Ingest {
                        path: name.to_owned(),
                        line: line_no,
                        message,
                    })?;
                    (text, category)
                }
            },
        };
        set.push(line_no, text.trim(), category, normalizer);
    }
    if set.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    info!(
        "lexicon {}: {} entries, {} collisions",
        name.display(),
        set.len(),
        set.collisions.len()
    );
    Ok(set)
}

pub fn load_lexicon_file(path: &Path, format: LexiconFormat, normalizer: &Normalizer) -> Result<LexiconSet> {
    let file = fs::File::open(path).map_err(|e| Error::Ingest {
        path: path.to_owned(),
        line: 0,
        message: e.to_string(),
    })?;
    load_lexicon(std::io::BufReader::new(file), path, format, normalizer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn load(src: &str) -> Result<LexiconSet> {
        load_lexicon(
            src.as_bytes(),
            Path::new("test.txt"),
            LexiconFormat::Tabbed,
            &Normalizer::default(),
        )
    }

    #[test]
    fn three_distinct_lines() {
        let lex = load("time flies\nnever say never\nenough is enough\n").unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.entries().iter().map(|e| e.id).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn normalization_collision_merges() {
        let lex = load("Time flies.\ntime flies\n").unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.entries()[0].raw_text, "Time flies.");
        assert_eq!(
            lex.collisions(),
            &[Collision {
                line: 2,
                raw_text: "time flies".into(),
                kept: 0
            }]
        );
    }

    #[test]
    fn comments_blanks_and_categories() {
        let lex =
            load("# header\n\nhold your tongue\tproverbial_expression\ntime flies\tproverb\nlove is blind\n").unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.entries()[0].category, Category::ProverbialExpression);
        assert_eq!(lex.entries()[1].category, Category::Proverb);
        assert_eq!(lex.entries()[2].category, Category::Unknown);
        assert_eq!(lex.excluding(Category::ProverbialExpression).len(), 2);
    }

    #[test]
    fn bad_category_reports_line() {
        let err = load("time flies\nlove is blind\tidiom\n").unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 2, .. }), "{err}");
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let src: &[u8] = b"time flies\n\xff\xfe bad\n";
        let err = load_lexicon(src, Path::new("x"), LexiconFormat::Tabbed, &Normalizer::default()).unwrap_err();
        assert!(matches!(err, Error::Ingest { line: 2, .. }));
    }

    #[test]
    fn empty_lexicon_is_an_error() {
        assert!(matches!(load("# only comments\n\n...\n"), Err(Error::EmptyLexicon)));
    }

    #[test]
    fn lines_format_keeps_tabs_as_whitespace() {
        let lex = load_lexicon(
            "time\tflies\n".as_bytes(),
            Path::new("x"),
            LexiconFormat::Lines,
            &Normalizer::default(),
        )
        .unwrap();
        assert_eq!(lex.entries()[0].tokens, vec!["time", "flies"]);
    }

    #[test]
    fn filter_by_length_examples() {
        let lex = LexiconSet::from_phrases(["time flies", "never say never"]).unwrap();
        let two = lex.filter_by_length(2);
        assert_eq!(two.len(), 1);
        assert_eq!(two.entries()[0].text(), "time flies");
        assert!(lex.filter_by_length(7).is_empty());
    }

    #[test]
    fn filter_mixed_fixture_by_hand_count() {
        // 3-token entries by hand: never say never, love is blind, time will tell, do or die
        let lex = LexiconSet::from_phrases([
            "time flies",
            "never say never",
            "love is blind",
            "hold your tongue now please",
            "time will tell",
            "safety first",
            "do or die",
            "the sooner the better",
            "money talks",
            "all's well that ends well",
        ])
        .unwrap();
        let three = lex.filter_by_length(3);
        let ids: Vec<_> = three.iter().map(|e| e.id).collect();
        assert_eq!(ids, vec![1, 2, 4, 6]);
        for e in three.iter() {
            assert_eq!(three.lookup(&e.tokens), Some(e.id));
            assert_eq!(three.get(e.id), Some(e));
        }
    }

    #[test]
    fn expression_sidecar() {
        let mut lex = LexiconSet::from_phrases(["Hold your tongue", "sink or swim", "time flies"]).unwrap();
        let n = lex.apply_expression_list("hold your tongue\nSink or swim!\nnot present\n", &Normalizer::default());
        assert_eq!(n, 2);
        assert_eq!(lex.excluding(Category::ProverbialExpression).len(), 1);
    }

    proptest! {
        #[test]
        fn entries_satisfy_invariants(lines in proptest::collection::vec("[a-cA-C' ,.!]{0,12}", 1..40)) {
            let src = lines.join("\n");
            let normalizer = Normalizer::default();
            match load_lexicon(src.as_bytes(), Path::new("p"), LexiconFormat::Lines, &normalizer) {
                Err(Error::EmptyLexicon) => {}
                Err(e) => panic!("{e}"),
                Ok(lex) => {
                    let again = load_lexicon(src.as_bytes(), Path::new("p"), LexiconFormat::Lines, &normalizer).unwrap();
                    prop_assert_eq!(lex.entries(), again.entries());
                    for e in lex.iter() {
                        prop_assert!(!e.tokens.is_empty());
                        prop_assert_eq!(e.len(), e.tokens.len());
                        prop_assert_eq!(&normalizer.tokens(&e.raw_text), &e.tokens);
                        prop_assert_eq!(lex.lookup(&e.tokens), Some(e.id));
                        prop_assert!(lex.filter_by_length(e.len()).get(e.id).is_some());
                    }
                    let non_blank = lines.iter().filter(|l| !l.trim().is_empty() && !normalizer.tokens(l).is_empty()).count();
                    prop_assert_eq!(lex.len() + lex.collisions().len(), non_blank);
                }
            }
        }
    }
}
