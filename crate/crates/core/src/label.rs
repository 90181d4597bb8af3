//! Node and pattern labels, and ordered alphabets over them.
//!
//! A label is either a single printable, non-space ASCII character or an
//! integer written `int:<k>` in text formats. Characters order before
//! integers; within each kind the natural order applies.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Char(u8),
    Int(u32),
}

impl Label {
    pub fn char(c: char) -> Label {
        assert!(
            c.is_ascii_graphic(),
            "label must be printable non-space ASCII"
        );
        Label::Char(c as u8)
    }

    /// The binary value of `'0'`/`'1'`, if this is one of them.
    pub fn as_bit(self) -> Option<bool> {
        match self {
            Label::Char(b'0') => Some(false),
            Label::Char(b'1') => Some(true),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Char(c) => write!(f, "{}", *c as char),
            Label::Int(k) => write!(f, "int:{k}"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(tok: &str) -> Result<Label> {
        if let Some(num) = tok.strip_prefix("int:") {
            return num
                .parse::<u32>()
                .map(Label::Int)
                .map_err(|_| Error::usage(format!("bad integer label `{tok}`")));
        }
        let bytes = tok.as_bytes();
        if bytes.len() == 1 && bytes[0].is_ascii_graphic() {
            Ok(Label::Char(bytes[0]))
        } else {
            Err(Error::usage(format!("bad label `{tok}`")))
        }
    }
}

/// Parses a label sequence.
///
/// Tokens are separated by whitespace. A token `int:<k>` is one integer
/// label; any other token contributes each of its characters as a label, so
/// `"abc"`, `"a b c"` and `"ab c"` all denote the same string.
pub fn parse_labels(s: &str) -> Result<Vec<Label>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        if tok.starts_with("int:") {
            out.push(tok.parse()?);
        } else {
            for b in tok.bytes() {
                if !b.is_ascii_graphic() {
                    return Err(Error::usage(format!(
                        "non-ASCII or non-printable byte 0x{b:02x} in `{tok}`"
                    )));
                }
                out.push(Label::Char(b));
            }
        }
    }
    Ok(out)
}

/// Inverse of [`parse_labels`]: characters are concatenated, and the whole
/// string is space-separated as soon as one integer label is present.
pub fn format_labels(labels: &[Label]) -> String {
    if labels.iter().all(|l| matches!(l, Label::Char(_))) {
        labels.iter().map(|l| l.to_string()).collect()
    } else {
        labels
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// An ordered set of labels. The rank of a label is its position in the
/// order, which is what the match matrix and label QRAM use as a column id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<Label>,
}

impl Alphabet {
    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Alphabet {
        let mut symbols: Vec<Label> = labels.into_iter().collect();
        symbols.sort_unstable();
        symbols.dedup();
        Alphabet { symbols }
    }

    /// `{int:lo, …, int:hi-1}`.
    pub fn int_range(lo: u32, hi: u32) -> Alphabet {
        Alphabet {
            symbols: (lo..hi).map(Label::Int).collect(),
        }
    }

    pub fn binary() -> Alphabet {
        Alphabet::from_labels([Label::Char(b'0'), Label::Char(b'1')])
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn rank(&self, label: Label) -> Option<usize> {
        self.symbols.binary_search(&label).ok()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.rank(label).is_some()
    }

    pub fn symbol(&self, rank: usize) -> Label {
        self.symbols[rank]
    }

    pub fn symbols(&self) -> &[Label] {
        &self.symbols
    }

    pub fn union(&self, other: impl IntoIterator<Item = Label>) -> Alphabet {
        Alphabet::from_labels(self.symbols.iter().copied().chain(other))
    }

    /// First printable character not in the alphabet, preferring `$`;
    /// falls back to an unused integer label.
    pub fn fresh_sentinel(&self) -> Label {
        std::iter::once(b'$')
            .chain(b'!'..=b'~')
            .map(Label::Char)
            .find(|l| !self.contains(*l))
            .unwrap_or_else(|| {
                let next = self
                    .symbols
                    .iter()
                    .filter_map(|l| match l {
                        Label::Int(k) => Some(k + 1),
                        Label::Char(_) => None,
                    })
                    .max()
                    .unwrap_or(0);
                Label::Int(next)
            })
    }
}
