//! Shared-proverb projection graphs and betweenness centrality.
//!
//! Two nodes (documents or authors) are joined when they share at least one
//! matched proverb. Only nodes with a match appear in the graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::{fmt_float, sanitize};
use crate::matcher::{MatchTable, TableKind};

pub const DEFAULT_MAX_NODES: usize = 50_000;

/// Sources per unit of parallel work. Fixed so that the summation order,
/// and therefore every bit of the result, is independent of worker count.
const SOURCE_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeKind {
    #[default]
    Document,
    Author,
}

impl FromStr for NodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "document" => Ok(NodeKind::Document),
            "author" => Ok(NodeKind::Author),
            other => Err(Error::Unsupported(format!("unknown node kind `{other}`"))),
        }
    }
}

/// Undirected simple graph. Node `i` is `labels[i]`; labels are unique and
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionGraph {
    pub kind: NodeKind,
    pub labels: Vec<String>,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<u32>>,
}

impl ProjectionGraph {
    /// Builds a graph from labels and an edge list. Self loops and repeated
    /// edges are dropped.
    pub fn from_edges(kind: NodeKind, labels: Vec<String>, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut sets = vec![BTreeSet::new(); labels.len()];
        for (a, b) in edges {
            if a != b {
                sets[a as usize].insert(b);
                sets[b as usize].insert(a);
            }
        }
        ProjectionGraph {
            kind,
            labels,
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Each edge once, as `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b as usize > a).map(move |&b| (a as u32, b)))
    }
}

/// Projects a document match table onto documents or authors. Documents
/// without an author are left out of author graphs.
pub fn build_cooccurrence_graph(table: &MatchTable, kind: NodeKind, max_nodes: usize) -> Result<ProjectionGraph> {
    if table.kind() != TableKind::Documents {
        return Err(Error::Unsupported("co-occurrence graphs need a document table".into()));
    }
    let by_doc = table.proverbs_by_document();
    let mut node_of_doc: BTreeMap<&str, &str> = BTreeMap::new();
    let mut skipped = 0usize;
    for doc in by_doc.keys() {
        let label = match kind {
            NodeKind::Document => Some(*doc),
            NodeKind::Author => table.documents().get(*doc).and_then(|m| m.author.as_deref()),
        };
        match label {
            Some(l) => {
                node_of_doc.insert(doc, l);
            }
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} matched documents have no author and are left out of the graph");
    }
    let labels: BTreeSet<&str> = node_of_doc.values().copied().collect();
    if labels.len() > max_nodes {
        return Err(Error::TooManyNodes {
            nodes: labels.len(),
            limit: max_nodes,
        });
    }
    let index: BTreeMap<&str, u32> = labels.iter().enumerate().map(|(i, l)| (*l, i as u32)).collect();

    let mut holders: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for (doc, proverbs) in &by_doc {
        if let Some(label) = node_of_doc.get(doc) {
            let node = index[label];
            for &p in proverbs {
                holders.entry(p).or_default().insert(node);
            }
        }
    }
    let mut edges = BTreeSet::new();
    for nodes in holders.values() {
        let nodes: Vec<u32> = nodes.iter().copied().collect();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                edges.insert((a, b));
            }
        }
    }
    Ok(ProjectionGraph::from_edges(
        kind,
        labels.into_iter().map(str::to_owned).collect(),
        edges,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    pub scores: Vec<f64>,
    pub normalized: bool,
}

/// Betweenness over unordered node pairs. Normalized scores divide by
/// `(N-1)(N-2)/2`; graphs with fewer than three nodes score zero.
pub fn betweenness(graph: &ProjectionGraph, normalized: bool) -> CentralityScores {
    let n = graph.node_count();
    let partials: Vec<Vec<f64>> = (0..n.div_ceil(SOURCE_CHUNK))
        .map(|c| chunk_dependencies(graph, c))
        .collect();
    finish(n, partials, normalized)
}

/// Same result as [`betweenness`], bit for bit, computed on `workers` threads.
pub fn betweenness_parallel(graph: &ProjectionGraph, normalized: bool, workers: usize) -> Result<CentralityScores> {
    if workers <= 1 {
        return Ok(betweenness(graph, normalized));
    }
    let n = graph.node_count();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start {workers} workers: {e}")))?;
    let partials: Vec<Vec<f64>> = pool.install(|| {
        (0..n.div_ceil(SOURCE_CHUNK))
            .into_par_iter()
            .map(|c| chunk_dependencies(graph, c))
            .collect()
    });
    Ok(finish(n, partials, normalized))
}

fn finish(n: usize, partials: Vec<Vec<f64>>, normalized: bool) -> CentralityScores {
    let mut scores = vec![0.0; n];
    for part in partials {
        for (s, p) in scores.iter_mut().zip(part) {
            *s += p;
        }
    }
    // Every unordered pair was counted from both ends.
    let scale = if !normalized {
        0.5
    } else if n >= 3 {
        0.5 / ((n - 1) as f64 * (n - 2) as f64 / 2.0)
    } else {
        0.0
    };
    for s in &mut scores {
        *s *= scale;
    }
    CentralityScores { scores, normalized }
}

/// Summed single-source dependencies for one chunk of sources.
fn chunk_dependencies(graph: &ProjectionGraph, chunk: usize) -> Vec<f64> {
    let n = graph.node_count();
    let mut acc = vec![0.0; n];
    let mut sigma = vec![0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let lo = chunk * SOURCE_CHUNK;
    for s in lo..(lo + SOURCE_CHUNK).min(n) {
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &graph.adjacency[v] {
                let w = w as usize;
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &graph.adjacency[w] {
                let v = v as usize;
                if dist[v] == dist[w] - 1 {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                acc[w] += delta[w];
            }
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedNode {
    pub rank: usize,
    pub node: u32,
    pub label: String,
    pub score: f64,
}

/// The `k` highest-scoring nodes; ties go to the smaller label.
pub fn top_central_nodes(graph: &ProjectionGraph, scores: &CentralityScores, k: usize) -> Result<Vec<RankedNode>> {
    if k == 0 {
        return Err(Error::InvalidTopK);
    }
    let mut nodes: Vec<u32> = (0..graph.node_count() as u32).collect();
    nodes.sort_by(|&a, &b| {
        let (sa, sb) = (scores.scores[a as usize], scores.scores[b as usize]);
        sb.total_cmp(&sa)
            .then_with(|| graph.labels[a as usize].cmp(&graph.labels[b as usize]))
            .then(a.cmp(&b))
    });
    Ok(nodes
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, node)| RankedNode {
            rank: i + 1,
            node,
            label: graph.labels[node as usize].clone(),
            score: scores.scores[node as usize],
        })
        .collect())
}

pub fn write_edges(graph: &ProjectionGraph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "node_a\tnode_b")?;
    for (a, b) in graph.edges() {
        writeln!(
            out,
            "{}\t{}",
            sanitize(&graph.labels[a as usize]),
            sanitize(&graph.labels[b as usize])
        )?;
    }
    Ok(())
}

pub fn write_centrality(ranked: &[RankedNode], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "rank\tnode_label\tbetweenness")?;
    for r in ranked {
        writeln!(out, "{}\t{}\t{}", r.rank, sanitize(&r.label), fmt_float(r.score))?;
    }
    Ok(())
}
