//! Constructions that produce level DAGs from other inputs.

use super::{validate_levels, LevelDag};
use crate::error::{Error, Result};
use crate::label::{Alphabet, Label};

/// One level per segment, one node per distinct symbol of the segment, and
/// complete bipartite edges between consecutive levels.
pub fn from_degenerate_string(segments: &[Vec<Label>]) -> Result<LevelDag> {
    if segments.is_empty() {
        return Err(Error::usage("degenerate string has no segments"));
    }
    let mut labels = Vec::new();
    let mut ranges = Vec::with_capacity(segments.len());
    for (l, seg) in segments.iter().enumerate() {
        if seg.is_empty() {
            return Err(Error::usage(format!("segment {l} is empty")));
        }
        let mut syms = seg.clone();
        syms.sort_unstable();
        syms.dedup();
        let start = labels.len();
        labels.extend(syms);
        ranges.push(start..labels.len());
    }
    let mut edges = Vec::new();
    for pair in ranges.windows(2) {
        for s in pair[0].clone() {
            for d in pair[1].clone() {
                edges.push((s, d));
            }
        }
    }
    validate_levels(labels, &edges)
}

/// Power-of-two reduction by sentinel padding.
///
/// `pattern` is padded with `sentinel` up to the next power of two. Every
/// level `l` gets a sentinel node fed by all nodes of `l`; these nodes form
/// one chain, which continues into `|P|` further sentinel nodes after the
/// last level. A padded pattern can then overflow into sentinels after any
/// genuine occurrence, and it matches the new graph iff `pattern` matches
/// `g`.
pub fn pad_classical(
    g: &LevelDag,
    pattern: &[Label],
    sentinel: Label,
) -> Result<(LevelDag, Vec<Label>)> {
    if pattern.len() < 2 {
        return Err(Error::usage("padding needs a pattern of length at least 2"));
    }
    if g.alphabet().contains(sentinel) || pattern.contains(&sentinel) {
        return Err(Error::usage(format!(
            "sentinel `{sentinel}` already occurs in the input"
        )));
    }
    let target = pattern.len().next_power_of_two();
    let mut padded = pattern.to_vec();
    padded.resize(target, sentinel);

    let mut labels = g.labels().to_vec();
    let mut edges = g.edges();
    let mut prev: Option<usize> = None;
    for l in 0..g.level_count() {
        let s = labels.len();
        labels.push(sentinel);
        edges.extend(g.level_nodes(l).map(|v| (v, s)));
        if let Some(p) = prev {
            edges.push((p, s));
        }
        prev = Some(s);
    }
    for _ in 0..pattern.len() {
        let s = labels.len();
        labels.push(sentinel);
        if let Some(p) = prev {
            edges.push((p, s));
        }
        prev = Some(s);
    }
    let out = validate_levels(labels, &edges)?
        .with_alphabet_extended(g.alphabet().symbols().iter().copied());
    Ok((out, padded))
}

/// Re-encodes graph and pattern over the binary alphabet `{0, 1}`.
///
/// Each symbol of rank `r` (over the joint alphabet of graph and pattern)
/// becomes the codeword `1 1 0 r₁ 0 r₂ 0 … r_b 0` with `r₁…r_b` the bits
/// of `r`, most significant first. The pair `11` occurs only at codeword
/// starts, so every occurrence of the encoded pattern is codeword-aligned
/// and matches are preserved in both directions. Each node turns into a
/// chain; in-edges enter its first node and out-edges leave its last.
pub fn encode_binary(g: &LevelDag, pattern: &[Label]) -> Result<(LevelDag, Vec<Label>)> {
    let sigma = g.alphabet().union(pattern.iter().copied());
    let bits = usize::max(
        1,
        (usize::BITS - (sigma.len() - 1).leading_zeros()) as usize,
    );
    let code = |l: Label| -> Vec<Label> {
        let r = sigma.rank(l).expect("symbol in joint alphabet");
        let mut w = vec![Label::Char(b'1'), Label::Char(b'1'), Label::Char(b'0')];
        for k in (0..bits).rev() {
            w.push(Label::Char(if r >> k & 1 == 1 { b'1' } else { b'0' }));
            w.push(Label::Char(b'0'));
        }
        w
    };
    let width = 3 + 2 * bits;

    let mut labels = Vec::with_capacity(g.node_count() * width);
    let mut edges = Vec::new();
    for v in 0..g.node_count() {
        let base = v * width;
        labels.extend(code(g.label(v)));
        edges.extend((base..base + width - 1).map(|x| (x, x + 1)));
    }
    for (s, d) in g.edges() {
        edges.push((s * width + width - 1, d * width));
    }
    let encoded = pattern.iter().flat_map(|&c| code(c)).collect();
    let out = validate_levels(labels, &edges)?
        .with_alphabet_extended(Alphabet::binary().symbols().iter().copied());
    Ok((out, encoded))
}
