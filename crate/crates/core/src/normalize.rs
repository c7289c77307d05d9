//! Text normalization shared by the lexicon and every corpus adapter.
//!
//! Characters that are neither alphanumeric nor whitespace are deleted, so
//! "All's" becomes "alls" and "mother-in-law" becomes "motherinlaw". Case
//! folding is simple lowercasing; non-ASCII letters survive as token
//! characters.

/// Tokenizer configuration. The default deletes hyphens like any other
/// punctuation; `split_hyphens` turns them into token separators instead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Normalizer {
    pub split_hyphens: bool,
}

impl Normalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn split_hyphens(mut self, yes: bool) -> Self {
        self.split_hyphens = yes;
        self
    }

    /// Lowercase, punctuation-free tokens of `raw`.
    pub fn tokens(&self, raw: &str) -> Vec<String> {
        let mut out = Vec::new();
        self.for_each_token(raw, |t| out.push(t.to_owned()));
        out
    }

    /// Streams tokens without collecting them.
    pub fn for_each_token(&self, raw: &str, mut f: impl FnMut(&str)) {
        let mut cur = String::new();
        for ch in raw.chars() {
            if ch.is_whitespace() || (self.split_hyphens && is_hyphen(ch)) {
                if !cur.is_empty() {
                    f(&cur);
                    cur.clear();
                }
            } else if ch.is_alphanumeric() {
                // Lowercasing can emit combining marks (e.g. U+0130); drop them
                // so a second pass is a no-op.
                cur.extend(ch.to_lowercase().filter(|c| c.is_alphanumeric()));
            }
        }
        if !cur.is_empty() {
            f(&cur);
        }
    }

    /// True when `tokens` would come back unchanged from [`Normalizer::tokens`].
    pub fn is_normalized(&self, tokens: &[String]) -> bool {
        tokens.iter().all(|t| {
            let again = self.tokens(t);
            again.len() == 1 && again[0] == *t
        })
    }
}

fn is_hyphen(ch: char) -> bool {
    matches!(ch, '-' | '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2013}' | '\u{2014}')
}

/// Normalizes with the default configuration.
pub fn normalize_text(raw: &str) -> Vec<String> {
    Normalizer::default().tokens(raw)
}

/// Joins normalized tokens with single spaces.
pub fn join_tokens(tokens: &[String]) -> String {
    tokens.join(" ")
}
