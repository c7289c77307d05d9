//! Aho-Corasick automaton over token ids.
//!
//! Patterns are sequences of whole tokens, so `[time, flies]` can never fire
//! inside `sometimes`. Tokens absent from every pattern send the automaton
//! straight back to the root.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lexicon::{LexiconSet, ProverbId};

const ROOT: u32 = 0;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct State {
    /// Sorted by token id.
    next: Vec<(u32, u32)>,
    fail: u32,
    /// Pattern ending exactly here.
    output: Option<(ProverbId, u32)>,
    /// Nearest proper suffix state that ends a pattern.
    dict_link: u32,
}

impl State {
    fn new() -> Self {
        State {
            next: Vec::new(),
            fail: ROOT,
            output: None,
            dict_link: NONE,
        }
    }

    fn goto(&self, token: u32) -> Option<u32> {
        self.next
            .binary_search_by_key(&token, |&(t, _)| t)
            .ok()
            .map(|i| self.next[i].1)
    }
}

/// Compiled multi-pattern index over a lexicon. Immutable once built.
#[derive(Debug, Clone)]
pub struct MatchIndex {
    vocab: HashMap<String, u32>,
    /// Dense root transitions indexed by token id.
    root_next: Vec<u32>,
    states: Vec<State>,
    patterns: usize,
}

impl MatchIndex {
    /// Builds the automaton. Construction order follows proverb ids, so the
    /// result is deterministic.
    pub fn build(lexicon: &LexiconSet) -> Result<Self> {
        if lexicon.is_empty() {
            return Err(Error::EmptyLexicon);
        }
        let mut vocab: HashMap<String, u32> = HashMap::new();
        let mut states = vec![State::new()];
        for entry in lexicon.iter() {
            let mut cur = ROOT;
            for tok in &entry.tokens {
                let next_id = vocab.len() as u32;
                let t = *vocab.entry(tok.clone()).or_insert(next_id);
                cur = match states[cur as usize].goto(t) {
                    Some(s) => s,
                    None => {
                        let s = states.len() as u32;
                        states.push(State::new());
                        let edges = &mut states[cur as usize].next;
                        let pos = edges.partition_point(|&(x, _)| x < t);
                        edges.insert(pos, (t, s));
                        s
                    }
                };
            }
            // Lexicon entries are unique, so a terminal is claimed at most once.
            debug_assert!(states[cur as usize].output.is_none());
            states[cur as usize].output = Some((entry.id, entry.tokens.len() as u32));
        }

        let mut root_next = vec![ROOT; vocab.len()];
        for &(t, s) in &states[ROOT as usize].next {
            root_next[t as usize] = s;
        }

        // Breadth-first failure links.
        let mut queue = std::collections::VecDeque::new();
        let children: Vec<u32> = states[ROOT as usize].next.iter().map(|&(_, s)| s).collect();
        for s in children {
            states[s as usize].fail = ROOT;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let edges = states[u as usize].next.clone();
            for (t, v) in edges {
                let mut f = states[u as usize].fail;
                let target = loop {
                    if let Some(w) = states[f as usize].goto(t) {
                        break w;
                    }
                    if f == ROOT {
                        break ROOT;
                    }
                    f = states[f as usize].fail;
                };
                let fail = if target == v { ROOT } else { target };
                states[v as usize].fail = fail;
                states[v as usize].dict_link = if states[fail as usize].output.is_some() {
                    fail
                } else {
                    states[fail as usize].dict_link
                };
                queue.push_back(v);
            }
        }

        Ok(MatchIndex {
            vocab,
            root_next,
            states,
            patterns: lexicon.len(),
        })
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    fn step(&self, mut state: u32, token: Option<u32>) -> u32 {
        let Some(t) = token else {
            return ROOT;
        };
        loop {
            if state == ROOT {
                return self.root_next[t as usize];
            }
            if let Some(s) = self.states[state as usize].goto(t) {
                return s;
            }
            state = self.states[state as usize].fail;
        }
    }

    /// Calls `f(proverb_id, start)` for every occurrence of every pattern,
    /// in order of match end position.
    pub fn for_each_match<S: AsRef<str>>(&self, tokens: &[S], mut f: impl FnMut(ProverbId, usize)) {
        let mut state = ROOT;
        for (end, tok) in tokens.iter().enumerate() {
            state = self.step(state, self.vocab.get(tok.as_ref()).copied());
            let mut s = if self.states[state as usize].output.is_some() {
                state
            } else {
                self.states[state as usize].dict_link
            };
            while s != NONE {
                let st = &self.states[s as usize];
                if let Some((id, len)) = st.output {
                    f(id, end + 1 - len as usize);
                }
                s = st.dict_link;
            }
        }
    }
}
