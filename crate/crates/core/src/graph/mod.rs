//! Node-labeled level DAGs.
//!
//! A level DAG is a DAG in which every edge advances exactly one level, with
//! every source on level 0. Nodes are indexed level by level, so index order
//! is a topological order and each level is a contiguous index range.

mod format;
mod transform;

use std::collections::{HashSet, VecDeque};
use std::ops::Range;

pub use format::{parse_ldag, serialize_ldag};
pub use transform::{encode_binary, from_degenerate_string, pad_classical};

use crate::error::{Error, Result};
use crate::label::{Alphabet, Label};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDag {
    labels: Vec<Label>,
    level_of: Vec<usize>,
    /// `in_nbrs[i][d]` is the `d`-th in-neighbour of node `i`, ascending.
    in_nbrs: Vec<Vec<usize>>,
    /// `level_starts[l]..level_starts[l + 1]` are the nodes on level `l`.
    level_starts: Vec<usize>,
    alphabet: Alphabet,
}

impl LevelDag {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.in_nbrs.iter().map(Vec::len).sum()
    }

    pub fn level_count(&self) -> usize {
        self.level_starts.len() - 1
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn level(&self, i: usize) -> usize {
        self.level_of[i]
    }

    pub fn level_nodes(&self, l: usize) -> Range<usize> {
        self.level_starts[l]..self.level_starts[l + 1]
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_nbrs[i].len()
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_nbrs[i]
    }

    /// `in_i(d)`: the `d`-th in-neighbour of node `i` in ascending index
    /// order.
    pub fn in_neighbor(&self, i: usize, d: usize) -> Result<usize> {
        let nbrs = self
            .in_nbrs
            .get(i)
            .ok_or_else(|| Error::usage(format!("node {i} out of range")))?;
        nbrs.get(d).copied().ok_or_else(|| {
            Error::usage(format!(
                "in-neighbour rank {d} out of range for node {i} (in-degree {})",
                nbrs.len()
            ))
        })
    }

    /// All edges as `(src, dst)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .in_nbrs
            .iter()
            .enumerate()
            .flat_map(|(dst, srcs)| srcs.iter().map(move |&src| (src, dst)))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count()];
        for (src, dst) in self.edges() {
            out[src].push(dst);
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Widens the alphabet; labels already present keep their meaning.
    pub fn with_alphabet_extended(mut self, extra: impl IntoIterator<Item = Label>) -> LevelDag {
        self.alphabet = self.alphabet.union(extra);
        self
    }
}

/// Levels a raw labeled graph and reindexes it level-contiguously.
///
/// Returns the validated DAG and, for every input node id, its new index.
/// Within a level nodes keep their relative input order.
pub fn validate_levels_with_map(
    labels: Vec<Label>,
    edges: &[(usize, usize)],
) -> Result<(LevelDag, Vec<usize>)> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::usage("graph has no nodes"));
    }
    let mut seen = HashSet::with_capacity(edges.len());
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    for &(s, d) in edges {
        if s >= n || d >= n {
            return Err(Error::usage(format!(
                "edge ({s}, {d}) references unknown node"
            )));
        }
        if s == d {
            return Err(Error::NotADag);
        }
        if !seen.insert((s, d)) {
            return Err(Error::usage(format!("duplicate edge ({s}, {d})")));
        }
        preds[d].push(s);
        succs[s].push(d);
    }

    // Kahn's algorithm; levels follow from the first predecessor and every
    // other predecessor must agree.
    let mut pending: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| pending[v] == 0).collect();
    let mut level = vec![usize::MAX; n];
    let mut visited = 0;
    while let Some(v) = queue.pop_front() {
        visited += 1;
        level[v] = match preds[v].first() {
            None => 0,
            Some(&p) => {
                let l = level[p];
                if let Some(&bad) = preds[v].iter().find(|&&q| level[q] != l) {
                    return Err(Error::NotLevelDag(format!(
                        "node {v} has in-neighbours {p} (level {l}) and {bad} (level {}); \
                         paths reaching it have different lengths",
                        level[bad]
                    )));
                }
                l + 1
            }
        };
        for &w in &succs[v] {
            pending[w] -= 1;
            if pending[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if visited != n {
        return Err(Error::NotADag);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (level[v], v));
    let mut new_of = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        new_of[old] = new;
    }
    let level_count = level.iter().max().map_or(0, |&l| l + 1);
    let mut level_starts = vec![0; level_count + 1];
    for &l in &level {
        level_starts[l + 1] += 1;
    }
    for l in 0..level_count {
        level_starts[l + 1] += level_starts[l];
    }

    let mut in_nbrs: Vec<Vec<usize>> = order
        .iter()
        .map(|&old| preds[old].iter().map(|&p| new_of[p]).collect())
        .collect();
    in_nbrs.iter_mut().for_each(|v| v.sort_unstable());

    let alphabet = Alphabet::from_labels(labels.iter().copied());
    let dag = LevelDag {
        labels: order.iter().map(|&old| labels[old]).collect(),
        level_of: order.iter().map(|&old| level[old]).collect(),
        in_nbrs,
        level_starts,
        alphabet,
    };
    Ok((dag, new_of))
}

/// [`validate_levels_with_map`] without the index map.
pub fn validate_levels(labels: Vec<Label>, edges: &[(usize, usize)]) -> Result<LevelDag> {
    validate_levels_with_map(labels, edges).map(|(g, _)| g)
}
