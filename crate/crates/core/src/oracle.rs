//! Ground-truth matchers and seeded instance generators.
//!
//! The matchers here deliberately avoid [`crate::bitvec`]: they are the
//! reference the bit-parallel and simulated engines are checked against.
//! `dp_match` is in turn cross-checked by exhaustive path enumeration.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{validate_levels, LevelDag};
use crate::label::Label;
use crate::rng;

/// Largest graph `enumerate_paths_match` accepts.
pub const ENUMERATION_NODE_LIMIT: usize = 12;

/// Rejection-sampling budget for non-planted patterns.
pub const NON_PLANTED_RETRIES: usize = 1000;

/// `rows[i][j]`: the prefix `P[0..=j]` spells a path ending at node `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTable {
    rows: Vec<Vec<bool>>,
}

impl DpTable {
    pub fn get(&self, node: usize, j: usize) -> bool {
        self.rows[node][j]
    }

    pub fn row(&self, node: usize) -> &[bool] {
        &self.rows[node]
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }
}

/// `match[i][j] = (ℓ(vᵢ) = P[j]) ∧ (j = 0 ∨ ∃d: match[in_i(d)][j−1])`,
/// filled in index (topological) order.
pub fn dp_match(g: &LevelDag, pattern: &[Label]) -> (bool, DpTable) {
    let m = pattern.len();
    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(g.node_count());
    for i in 0..g.node_count() {
        let label = g.label(i);
        let row: Vec<bool> = (0..m)
            .map(|j| {
                label == pattern[j] && (j == 0 || g.in_neighbors(i).iter().any(|&k| rows[k][j - 1]))
            })
            .collect();
        rows.push(row);
    }
    let found = m > 0 && rows.iter().any(|r| r[m - 1]);
    (found, DpTable { rows })
}

/// Tries every path with `|P|` nodes; exponential, hence the size guard.
pub fn enumerate_paths_match(g: &LevelDag, pattern: &[Label]) -> Result<bool> {
    if g.node_count() > ENUMERATION_NODE_LIMIT {
        return Err(Error::usage(format!(
            "path enumeration limited to {ENUMERATION_NODE_LIMIT} nodes, got {}",
            g.node_count()
        )));
    }
    if pattern.is_empty() {
        return Ok(false);
    }
    let mut succ = vec![Vec::new(); g.node_count()];
    for (s, d) in g.edges() {
        succ[s].push(d);
    }
    fn extend(path: &mut Vec<usize>, len: usize, succ: &[Vec<usize>], out: &mut Vec<Vec<usize>>) {
        if path.len() == len {
            out.push(path.clone());
            return;
        }
        let last = *path.last().unwrap();
        for &w in &succ[last] {
            path.push(w);
            extend(path, len, succ, out);
            path.pop();
        }
    }
    let mut paths = Vec::new();
    for start in 0..g.node_count() {
        extend(&mut vec![start], pattern.len(), &succ, &mut paths);
    }
    Ok(paths
        .iter()
        .any(|p| p.iter().map(|&v| g.label(v)).eq(pattern.iter().copied())))
}

/// End positions of every occurrence, by direct comparison at each start.
pub fn naive_text_match(text: &[Label], pattern: &[Label]) -> Vec<usize> {
    let m = pattern.len();
    if m == 0 || m > text.len() {
        return Vec::new();
    }
    (0..=text.len() - m)
        .filter(|&i| text[i..i + m] == *pattern)
        .map(|i| i + m - 1)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub nodes: usize,
    pub levels: usize,
    /// Probability of each additional edge from the previous level.
    pub density: f64,
    pub alphabet_size: usize,
    pub seed: u64,
}

/// The `k`-th symbol of a generated alphabet: `a..z`, then integers.
pub fn gen_symbol(k: usize) -> Label {
    if k < 26 {
        Label::Char(b'a' + k as u8)
    } else {
        Label::Int(k as u32)
    }
}

pub fn gen_level_dag(params: &GenParams) -> Result<LevelDag> {
    let GenParams {
        nodes,
        levels,
        density,
        alphabet_size,
        seed,
    } = *params;
    if levels < 2 || nodes < levels {
        return Err(Error::usage(format!(
            "need at least 2 levels and one node per level (nodes={nodes}, levels={levels})"
        )));
    }
    if alphabet_size == 0 || !(0.0..=1.0).contains(&density) {
        return Err(Error::usage(
            "alphabet size must be positive and density in [0, 1]",
        ));
    }
    let mut rng = rng::seeded(seed);
    let mut sizes = vec![1usize; levels];
    for _ in levels..nodes {
        sizes[rng.gen_range(0..levels)] += 1;
    }
    let mut starts = vec![0];
    for s in &sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let labels: Vec<Label> = (0..nodes)
        .map(|_| gen_symbol(rng.gen_range(0..alphabet_size)))
        .collect();
    let mut edges = Vec::new();
    for l in 1..levels {
        let prev = starts[l - 1]..starts[l];
        for v in starts[l]..starts[l + 1] {
            let anchor = rng.gen_range(prev.clone());
            for u in prev.clone() {
                if u == anchor || rng.gen_bool(density) {
                    edges.push((u, v));
                }
            }
        }
    }
    validate_levels(labels, &edges)
}

/// A pattern of length `len` over the graph's alphabet.
///
/// Planted patterns copy the labels of a random path, so they always match.
/// Non-planted patterns are rejection-sampled until `dp_match` says no.
pub fn gen_pattern(g: &LevelDag, len: usize, planted: bool, seed: u64) -> Result<Vec<Label>> {
    if len == 0 {
        return Err(Error::usage("pattern length must be positive"));
    }
    let mut rng = rng::seeded(seed);
    if planted {
        let ends: Vec<usize> = (0..g.node_count())
            .filter(|&v| g.level(v) + 1 >= len)
            .collect();
        let &end = ends.choose(&mut rng).ok_or_else(|| {
            Error::Generation(format!(
                "graph has {} levels, too few for a planted pattern of length {len}",
                g.level_count()
            ))
        })?;
        let mut path = vec![end];
        while path.len() < len {
            let v = *path.last().unwrap();
            path.push(*g.in_neighbors(v).choose(&mut rng).expect("non-source node"));
        }
        return Ok(path.iter().rev().map(|&v| g.label(v)).collect());
    }
    let symbols = g.alphabet().symbols();
    for _ in 0..NON_PLANTED_RETRIES {
        let p: Vec<Label> = (0..len)
            .map(|_| *symbols.choose(&mut rng).expect("non-empty alphabet"))
            .collect();
        if !dp_match(g, &p).0 {
            return Ok(p);
        }
    }
    Err(Error::Generation(format!(
        "no non-matching pattern of length {len} found in {NON_PLANTED_RETRIES} attempts"
    )))
}

/// One graph/pattern pair of a seeded corpus.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: usize,
    pub graph: LevelDag,
    pub pattern: Vec<Label>,
    pub planted: bool,
    /// Seed the instance was generated from.
    pub seed: u64,
}

/// Size limits for [`gen_corpus`].
#[derive(Clone, Copy, Debug)]
pub struct CorpusShape {
    pub max_nodes: usize,
    pub max_pattern: usize,
    pub max_alphabet: usize,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape {
            max_nodes: 24,
            max_pattern: 8,
            max_alphabet: 4,
        }
    }
}

/// `count` instances, alternating planted and non-planted, each derived
/// from its own seed. Instances whose non-planted pattern cannot be found
/// are replaced by the next seed.
pub fn gen_corpus(count: usize, seed: u64, shape: CorpusShape) -> Vec<Instance> {
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while out.len() < count {
        let s = rng::derive_seed(seed, attempt);
        attempt += 1;
        let planted = out.len() % 2 == 0;
        let mut r = rng::seeded(s);
        let nodes = r.gen_range(2..=shape.max_nodes.max(2));
        let levels = r.gen_range(2..=nodes.min(10));
        let params = GenParams {
            nodes,
            levels,
            density: r.gen_range(0.1..0.7),
            alphabet_size: r.gen_range(2..=shape.max_alphabet.max(2)),
            seed: s,
        };
        let Ok(graph) = gen_level_dag(&params) else {
            continue;
        };
        let cap = if planted {
            shape.max_pattern.min(levels)
        } else {
            shape.max_pattern
        };
        let len = r.gen_range(2..=cap.max(2));
        if let Ok(pattern) = gen_pattern(&graph, len, planted, s ^ 0x5EED) {
            out.push(Instance {
                id: out.len(),
                graph,
                pattern,
                planted,
                seed: s,
            });
        }
    }
    out
}
