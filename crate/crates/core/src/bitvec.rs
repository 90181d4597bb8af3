//! Multi-word bit-vectors and the pattern match matrix.
//!
//! Bit `i` of a vector lives in bit `i % 64` of word `i / 64`. Bits at or
//! above the logical length are kept zero after every operation, so two
//! vectors of equal length compare equal exactly when their words do.

use std::fmt;

use crate::error::{Error, Result};
use crate::label::{Alphabet, Label};

const WORD: usize = u64::BITS as usize;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitVector {
    pub fn zeros(len: usize) -> BitVector {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> BitVector {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bits(bits: &[bool]) -> BitVector {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / WORD] |= 1 << (i % WORD);
            }
        }
        v
    }

    /// The low `len` bits of `value`; `len` must not exceed 64.
    pub fn from_u64(len: usize, value: u64) -> BitVector {
        assert!(len <= WORD);
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> Result<bool> {
        self.check_index(i)?;
        Ok(self.bit(i))
    }

    pub fn set(&mut self, i: usize, value: bool) -> Result<()> {
        self.check_index(i)?;
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn bit(&self, i: usize) -> bool {
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn and(&self, other: &BitVector) -> Result<BitVector> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &BitVector) -> Result<BitVector> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn not(&self) -> BitVector {
        let mut v = BitVector {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.clear_tail();
        v
    }

    pub fn and_assign(&mut self, other: &BitVector) -> Result<()> {
        self.check_len(other)?;
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= b);
        Ok(())
    }

    pub fn or_assign(&mut self, other: &BitVector) -> Result<()> {
        self.check_len(other)?;
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
        Ok(())
    }

    /// Left shift: bit `i` moves to `i + k`; bits pushed past the end are
    /// dropped and the low `k` bits become zero.
    pub fn shl(&self, k: usize) -> Result<BitVector> {
        self.check_shift(k)?;
        let mut out = BitVector::zeros(self.len);
        let (ws, bs) = (k / WORD, k % WORD);
        for dst in ws..self.words.len() {
            let src = dst - ws;
            let mut w = self.words[src] << bs;
            if bs != 0 && src > 0 {
                w |= self.words[src - 1] >> (WORD - bs);
            }
            out.words[dst] = w;
        }
        out.clear_tail();
        Ok(out)
    }

    /// Right shift: bit `i + k` moves to `i`; the high `k` bits become zero.
    pub fn shr(&self, k: usize) -> Result<BitVector> {
        self.check_shift(k)?;
        let mut out = BitVector::zeros(self.len);
        let n = self.words.len();
        let (ws, bs) = (k / WORD, k % WORD);
        for dst in 0..n.saturating_sub(ws) {
            let src = dst + ws;
            let mut w = self.words[src] >> bs;
            if bs != 0 && src + 1 < n {
                w |= self.words[src + 1] << (WORD - bs);
            }
            out.words[dst] = w;
        }
        Ok(out)
    }

    fn zip_with(&self, other: &BitVector, f: impl Fn(u64, u64) -> u64) -> Result<BitVector> {
        self.check_len(other)?;
        Ok(BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn check_len(&self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::usage(format!(
                "bit-vector length mismatch: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len {
            return Err(Error::usage(format!(
                "bit {i} out of range for length {}",
                self.len
            )));
        }
        Ok(())
    }

    fn check_shift(&self, k: usize) -> Result<()> {
        if k > self.len {
            return Err(Error::usage(format!(
                "shift {k} exceeds length {}",
                self.len
            )));
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Most significant bit first, e.g. `0101` for bits 0 and 2 set in length 4.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `M[j][c] = 1` iff `P[j] = c`, stored as one column bit-vector per
/// alphabet symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchMatrix {
    pattern_len: usize,
    alphabet: Alphabet,
    columns: Vec<BitVector>,
}

impl MatchMatrix {
    pub fn build(pattern: &[Label], alphabet: &Alphabet) -> Result<MatchMatrix> {
        if pattern.is_empty() {
            return Err(Error::usage("pattern must be non-empty"));
        }
        let m = pattern.len();
        let mut columns = vec![BitVector::zeros(m); alphabet.len()];
        for (j, &c) in pattern.iter().enumerate() {
            let rank = alphabet
                .rank(c)
                .ok_or_else(|| Error::usage(format!("pattern symbol `{c}` not in alphabet")))?;
            columns[rank].set(j, true)?;
        }
        Ok(MatchMatrix {
            pattern_len: m,
            alphabet: alphabet.clone(),
            columns,
        })
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn column(&self, c: Label) -> Option<&BitVector> {
        self.alphabet.rank(c).map(|r| &self.columns[r])
    }

    pub fn column_by_rank(&self, rank: usize) -> &BitVector {
        &self.columns[rank]
    }

    pub fn get(&self, j: usize, c: Label) -> bool {
        self.column(c)
            .is_some_and(|col| j < col.len() && col.bit(j))
    }
}
