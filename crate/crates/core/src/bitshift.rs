//! Classical Shift-And on text and on level DAGs.
//!
//! Bit `j` of the state vector says that `P[0..=j]` ends at the current
//! position. Each step is: set bit 0, AND with the pattern-matrix column of
//! the current symbol, test bit `m − 1`, shift left by one.

use crate::bitvec::{BitVector, MatchMatrix};
use crate::error::{Error, Result};
use crate::graph::LevelDag;
use crate::label::{Alphabet, Label};

/// All end positions `i` with `T[i−m+1..=i] = P`.
pub fn shift_and_text(
    text: &[Label],
    pattern: &[Label],
    alphabet: &Alphabet,
) -> Result<Vec<usize>> {
    let matrix = MatchMatrix::build(pattern, alphabet)?;
    let m = pattern.len();
    let mut b = BitVector::zeros(m);
    let mut ends = Vec::new();
    for (i, &c) in text.iter().enumerate() {
        let col = matrix
            .column(c)
            .ok_or_else(|| Error::usage(format!("text symbol `{c}` not in alphabet")))?;
        b.set(0, true)?;
        b.and_assign(col)?;
        if b.bit(m - 1) {
            ends.push(i);
        }
        b = b.shl(1)?;
    }
    Ok(ends)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagShiftResult {
    pub found: bool,
    /// Per node, the vector after the AND and before the shift; kept only
    /// when requested.
    pub pre_shift: Option<Vec<BitVector>>,
}

/// `B_i ← 1 + ⋁_{k ∈ in(i)} B_k`, then the text steps, one node at a time
/// in index order. Each node keeps its own shifted vector, so no level
/// batching is needed.
pub fn shift_and_level_dag(
    g: &LevelDag,
    pattern: &[Label],
    record: bool,
) -> Result<DagShiftResult> {
    let sigma = g.alphabet().union(pattern.iter().copied());
    let matrix = MatchMatrix::build(pattern, &sigma)?;
    let m = pattern.len();
    let mut shifted: Vec<BitVector> = Vec::with_capacity(g.node_count());
    let mut pre = record.then(|| Vec::with_capacity(g.node_count()));
    let mut found = false;
    for i in 0..g.node_count() {
        let mut b = BitVector::zeros(m);
        for &k in g.in_neighbors(i) {
            b.or_assign(&shifted[k])?;
        }
        b.set(0, true)?;
        b.and_assign(matrix.column(g.label(i)).expect("label in joint alphabet"))?;
        found |= b.bit(m - 1);
        shifted.push(b.shl(1)?);
        if let Some(p) = pre.as_mut() {
            p.push(b);
        }
    }
    Ok(DagShiftResult {
        found,
        pre_shift: pre,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_levels;
    use crate::label::parse_labels;
    use crate::oracle::{dp_match, gen_corpus, naive_text_match, CorpusShape};
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn l(s: &str) -> Vec<Label> {
        parse_labels(s).unwrap()
    }

    fn text_ends(t: &str, p: &str) -> Vec<usize> {
        let (t, p) = (l(t), l(p));
        let sigma = Alphabet::from_labels(t.iter().chain(&p).copied());
        shift_and_text(&t, &p, &sigma).unwrap()
    }

    fn chain(s: &str) -> LevelDag {
        let edges: Vec<_> = (1..s.len()).map(|i| (i - 1, i)).collect();
        validate_levels(l(s), &edges).unwrap()
    }

    #[test]
    fn text_examples() {
        assert_eq!(text_ends("abab", "ab"), vec![1, 3]);
        assert_eq!(text_ends("aaa", "b"), Vec::<usize>::new());
        assert_eq!(text_ends("abcab", "abcab"), vec![4]);
        assert_eq!(text_ends("aaaa", "aa"), vec![1, 2, 3]);
    }

    #[test]
    fn text_symbol_outside_alphabet() {
        let sigma = Alphabet::from_labels(l("ab"));
        assert!(matches!(
            shift_and_text(&l("abz"), &l("ab"), &sigma),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            shift_and_text(&l("ab"), &l("az"), &sigma),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn text_matches_naive_exhaustively_on_binary() {
        for n in 1..=10usize {
            for tv in 0u32..(1 << n) {
                let t: Vec<Label> = (0..n)
                    .map(|i| Label::Char(if tv >> i & 1 == 1 { b'1' } else { b'0' }))
                    .collect();
                for m in 1..=n.min(3) {
                    for pv in 0u32..(1 << m) {
                        let p: Vec<Label> = (0..m)
                            .map(|i| Label::Char(if pv >> i & 1 == 1 { b'1' } else { b'0' }))
                            .collect();
                        assert_eq!(
                            shift_and_text(&t, &p, &Alphabet::binary()).unwrap(),
                            naive_text_match(&t, &p)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn long_patterns_cross_word_boundaries() {
        let mut g = seeded(5);
        let sigma = Alphabet::from_labels(l("ab"));
        for _ in 0..50 {
            let m = g.gen_range(60..140);
            let p: Vec<Label> = (0..m)
                .map(|_| {
                    if g.gen_bool(0.9) {
                        Label::Char(b'a')
                    } else {
                        Label::Char(b'b')
                    }
                })
                .collect();
            let mut t = p.clone();
            t.extend(p.iter().take(g.gen_range(0..m)));
            t.extend(p.iter());
            assert_eq!(
                shift_and_text(&t, &p, &sigma).unwrap(),
                naive_text_match(&t, &p)
            );
        }
    }

    #[test]
    fn dag_examples() {
        let g = validate_levels(l("abbc"), &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(shift_and_level_dag(&g, &l("abc"), false).unwrap().found);
        assert!(!shift_and_level_dag(&g, &l("ac"), false).unwrap().found);
        assert!(
            shift_and_level_dag(&chain("abc"), &l("abc"), false)
                .unwrap()
                .found
        );
        assert!(
            !shift_and_level_dag(&chain("abc"), &l("abz"), false)
                .unwrap()
                .found
        );
    }

    #[test]
    fn dag_agrees_with_dp_on_corpus() {
        for inst in gen_corpus(300, 17, CorpusShape::default()) {
            let r = shift_and_level_dag(&inst.graph, &inst.pattern, true).unwrap();
            let (yes, table) = dp_match(&inst.graph, &inst.pattern);
            assert_eq!(r.found, yes, "instance {}", inst.id);
            assert_eq!(r.found, inst.planted);
            for (i, b) in r.pre_shift.unwrap().iter().enumerate() {
                for j in 0..inst.pattern.len() {
                    assert_eq!(
                        b.bit(j),
                        table.get(i, j),
                        "instance {} node {i} bit {j}",
                        inst.id
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn chain_engine_equals_text_engine(t in "[abc]{1,20}", p in "[abc]{1,5}") {
            let g = chain(&t);
            let sigma = Alphabet::from_labels(l("abc"));
            let text = !shift_and_text(&l(&t), &l(&p), &sigma).unwrap().is_empty();
            prop_assert_eq!(shift_and_level_dag(&g, &l(&p), false).unwrap().found, text);
        }

        #[test]
        fn set_bit_zero_equals_adding_one_after_shift(v in any::<u64>(), m in 1usize..64) {
            // Right after a shift bit 0 is clear, so +1 cannot carry.
            let b = BitVector::from_u64(m, v).shl(1).unwrap();
            let mut set = b.clone();
            set.set(0, true).unwrap();
            let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
            let plus = BitVector::from_u64(m, (b.words()[0] + 1) & mask);
            prop_assert_eq!(set, plus);
        }
    }
}
