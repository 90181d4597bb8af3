//! Quantum bit-parallel matching of a binary pattern in a binary text,
//! simulated on a [`TrackTable`].
//!
//! Track `t` stands for start position `i = t mod n`. The retained index
//! register `I'` keeps `t`; the live register `I` starts at `i` and walks
//! through the text while `J` walks through the pattern. After iteration
//! `j`, qubit `A_j` is 1 exactly on the tracks where `T[i..=i+j] = P[0..=j]`.

use crate::error::{Error, Result};
use crate::grover::{run_randomized_search, SearchConfig, SearchOutcome};
use crate::label::Label;
use crate::qcore::{width_for, QramArray, Qubit, Reg, TrackTable};
use crate::rng::SmlgRng;

/// Maps `0`/`1` labels to bits; anything else is refused.
pub fn binary_from_labels(labels: &[Label]) -> Result<Vec<bool>> {
    labels
        .iter()
        .map(|l| {
            l.as_bit()
                .ok_or_else(|| Error::usage(format!("symbol `{l}` is not binary")))
        })
        .collect()
}

/// Registers and qubits of one text run.
#[derive(Clone, Copy, Debug)]
struct Layout {
    index: Reg,
    i: Reg,
    j: Reg,
    q: Reg,
    c_t: Qubit,
    c_p: Qubit,
    valid: Qubit,
    eq: Qubit,
}

#[derive(Clone, Debug)]
pub struct TextRun {
    text: Vec<bool>,
    pattern: Vec<bool>,
    padded_n: usize,
    state: TrackTable,
    layout: Layout,
    /// `a[0]` is `A_{−1}`, `a[j + 1]` is `A_j`.
    a: Vec<Qubit>,
    text_mem: QramArray,
    pattern_mem: QramArray,
    valid_mem: QramArray,
    done: usize,
}

impl TextRun {
    pub fn new(text: &[Label], pattern: &[Label]) -> Result<TextRun> {
        let text = binary_from_labels(text)?;
        let pattern = binary_from_labels(pattern)?;
        let (n, m) = (text.len(), pattern.len());
        if m == 0 {
            return Err(Error::usage("pattern must be non-empty"));
        }
        if m > n {
            return Err(Error::usage(format!(
                "pattern length {m} exceeds text length {n}"
            )));
        }
        let padded_n = n.next_power_of_two();
        let mut s = TrackTable::new();
        let index = s.declare_register("I'", padded_n.trailing_zeros())?;
        let i = s.declare_register("I", width_for((n + m) as u64))?;
        let j = s.declare_register("J", width_for(m as u64))?;
        let q = s.declare_register("Q", 1)?;
        let layout = Layout {
            index,
            i,
            j,
            q,
            c_t: s.declare_qubit("C_T")?,
            c_p: s.declare_qubit("C_P")?,
            valid: s.declare_qubit("G")?,
            eq: s.declare_qubit("E")?,
        };
        let mut a = vec![s.declare_qubit("A[-1]")?];
        for k in 0..m {
            a.push(s.declare_qubit(format!("A[{k}]"))?);
        }
        s.apply_x(a[0])?;
        s.apply_x_register(q, 1)?;
        s.hadamard_init(index)?;
        let start = QramArray::new(
            "start",
            s.register_width(i),
            (0..padded_n as u64).map(|t| t % n as u64).collect(),
        )?;
        s.qram_read(&[index], &start, i.into())?;

        let bits = |v: &[bool]| v.iter().map(|&b| b as u64).collect::<Vec<_>>();
        Ok(TextRun {
            text_mem: QramArray::new("T", 1, bits(&text))?,
            pattern_mem: QramArray::new("P", 1, bits(&pattern))?,
            valid_mem: QramArray::new("valid", 1, vec![1; n])?,
            text,
            pattern,
            padded_n,
            state: s,
            layout,
            a,
            done: 0,
        })
    }

    pub fn text_len(&self) -> usize {
        self.text.len()
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern.len()
    }

    pub fn padded_len(&self) -> usize {
        self.padded_n
    }

    pub fn state(&self) -> &TrackTable {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut TrackTable {
        &mut self.state
    }

    pub fn iterations_done(&self) -> usize {
        self.done
    }

    /// `A_j` for `j ≥ −1`, passed as `j + 1`.
    pub fn a_qubit(&self, j_plus_one: usize) -> Qubit {
        self.a[j_plus_one]
    }

    /// The qubit marked after the final iteration.
    pub fn result_qubit(&self) -> Qubit {
        self.a[self.pattern.len()]
    }

    /// Start position represented by track `t`.
    pub fn start_of(&self, t: usize) -> usize {
        self.state.value(self.layout.index, t) as usize % self.text.len()
    }

    pub fn live_index(&self, t: usize) -> u64 {
        self.state.value(self.layout.i, t)
    }

    pub fn j_value(&self, t: usize) -> u64 {
        self.state.value(self.layout.j, t)
    }

    /// Compares `t_{i+j}` with `p_j` and extends the prefix: `A_j =
    /// (t_{i+j} = p_j) ∧ (i + j < n) ∧ A_{j−1}`. Scratch is uncomputed by
    /// replaying the same gates in reverse order.
    pub fn iterate(&mut self, j: usize) -> Result<()> {
        if j != self.done || j >= self.pattern.len() {
            return Err(Error::usage(format!(
                "iteration {j} requested, next is {} of {}",
                self.done,
                self.pattern.len()
            )));
        }
        let Layout {
            i,
            j: jr,
            q,
            c_t,
            c_p,
            valid,
            eq,
            ..
        } = self.layout;
        let s = &mut self.state;
        for scratch in [c_t, c_p, valid, eq] {
            s.require_clean(scratch)?;
        }
        s.require_clean(self.a[j + 1])?;

        s.qram_read(&[i], &self.text_mem, c_t.into())?;
        s.qram_read(&[jr], &self.pattern_mem, c_p.into())?;
        s.qram_read(&[i], &self.valid_mem, valid.into())?;
        s.apply_cx(c_t, c_p)?;
        s.apply_x(c_p)?;
        s.apply_ccx(c_p, valid, eq)?;
        s.apply_ccx(eq, self.a[j], self.a[j + 1])?;
        s.apply_ccx(c_p, valid, eq)?;
        s.apply_x(c_p)?;
        s.apply_cx(c_t, c_p)?;
        s.qram_read(&[i], &self.valid_mem, valid.into())?;
        s.qram_read(&[jr], &self.pattern_mem, c_p.into())?;
        s.qram_read(&[i], &self.text_mem, c_t.into())?;
        for scratch in [c_t, c_p, valid, eq] {
            s.require_clean(scratch)?;
        }

        s.increment(i, q)?;
        s.increment(jr, q)?;
        self.done += 1;
        Ok(())
    }

    /// Checks the prefix property of `A_j` for the last completed
    /// iteration against direct comparison.
    pub fn check_prefix_property(&self) -> Result<()> {
        let Some(j) = self.done.checked_sub(1) else {
            return Ok(());
        };
        let q = self.a[j + 1];
        let n = self.text.len();
        for t in 0..self.state.track_count() {
            let i = self.start_of(t);
            let expect = i + j < n && self.text[i..=i + j] == self.pattern[..=j];
            if self.state.bit(q, t) != expect {
                return Err(Error::StateCorruption(format!(
                    "A[{j}] on track {t} (start {i}) is {}, expected {expect}",
                    self.state.bit(q, t)
                )));
            }
        }
        Ok(())
    }

    pub fn run_iterations(&mut self, check: bool) -> Result<()> {
        while self.done < self.pattern.len() {
            self.iterate(self.done)?;
            if check {
                self.check_prefix_property()?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct TextOptions {
    pub search: SearchConfig,
    /// Check the prefix property after every iteration.
    pub check_invariants: bool,
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextOutcome {
    /// Verified end position of the measured occurrence.
    pub end: Option<usize>,
    pub marked: usize,
    pub search: SearchOutcome,
    pub gates: u64,
    pub tracks: usize,
    pub trace: Vec<String>,
}

/// Full run: `m` iterations, then amplitude amplification on `A_{m−1}`.
/// A measured start position is verified classically before it is
/// reported.
pub fn run_quantum_text(
    text: &[Label],
    pattern: &[Label],
    opts: &TextOptions,
    rng: &mut SmlgRng,
) -> Result<TextOutcome> {
    let cfg = &opts.search;
    let mut run = TextRun::new(text, pattern)?;
    if opts.trace {
        run.state.enable_trace();
    }
    run.run_iterations(opts.check_invariants)?;
    let q = run.result_qubit();
    let marked = run.state.count_marked(q);
    let (track, search) = run_randomized_search(&mut run.state, q, cfg, rng)?;
    let end = match track {
        None => None,
        Some(t) => {
            let i = run.start_of(t);
            let m = run.pattern.len();
            if i + m > run.text.len() || run.text[i..i + m] != run.pattern[..] {
                return Err(Error::StateCorruption(format!(
                    "measured start {i} is not an occurrence"
                )));
            }
            Some(i + m - 1)
        }
    };
    Ok(TextOutcome {
        end,
        marked,
        search,
        gates: run.state.gate_count(),
        tracks: run.state.track_count(),
        trace: run.state.take_trace(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::failure_bound;
    use crate::label::parse_labels;
    use crate::oracle::naive_text_match;
    use crate::rng::{derive_seed, seeded};
    use rand::Rng;

    fn l(s: &str) -> Vec<Label> {
        parse_labels(s).unwrap()
    }

    fn bin(v: u32, n: usize) -> Vec<Label> {
        (0..n)
            .map(|k| Label::Char(if v >> k & 1 == 1 { b'1' } else { b'0' }))
            .collect()
    }

    #[test]
    fn init_examples() {
        let r = TextRun::new(&l("0101"), &l("01")).unwrap();
        assert_eq!(r.state().track_count(), 4);
        assert_eq!(
            (0..4).map(|t| r.live_index(t)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        let r = TextRun::new(&l("010"), &l("01")).unwrap();
        assert_eq!(
            (0..4).map(|t| r.live_index(t)).collect::<Vec<_>>(),
            vec![0, 1, 2, 0]
        );
        assert!((0..4).all(|t| r.j_value(t) == 0));
        assert_eq!(r.state().count_marked(r.a_qubit(0)), 4);
    }

    #[test]
    fn init_errors() {
        assert!(matches!(
            TextRun::new(&l("01"), &l("011")),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            TextRun::new(&l("0a1"), &l("0")),
            Err(Error::Usage(_))
        ));
        assert!(matches!(TextRun::new(&l("01"), &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn iteration_examples() {
        let mut r = TextRun::new(&l("1"), &l("1")).unwrap();
        r.iterate(0).unwrap();
        assert!(r.state().bit(r.a_qubit(1), 0));

        let mut r = TextRun::new(&l("10"), &l("11")).unwrap();
        r.iterate(0).unwrap();
        assert_eq!(r.state().marked_tracks(r.a_qubit(1)), vec![0]);
        for name in ["C_T", "C_P", "G", "E"] {
            assert!(r.state().is_clean(r.state().qubit(name).unwrap()));
        }
        assert!(r.iterate(0).is_err());
    }

    #[test]
    fn prefix_property_exhaustive_small() {
        for n in 1..=6usize {
            for tv in 0..(1u32 << n) {
                for m in 1..=n {
                    for pv in 0..(1u32 << m) {
                        let mut r = TextRun::new(&bin(tv, n), &bin(pv, m)).unwrap();
                        r.run_iterations(true).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn marked_tracks_are_exactly_occurrences() {
        let mut g = seeded(8);
        for _ in 0..200 {
            let n = g.gen_range(1..40);
            let m = g.gen_range(1..=n.min(5));
            let t = bin(g.gen(), n.min(32));
            let n = t.len();
            let p = bin(g.gen(), m.min(n));
            let mut r = TextRun::new(&t, &p).unwrap();
            r.run_iterations(false).unwrap();
            let mut starts: Vec<usize> = r
                .state()
                .marked_tracks(r.result_qubit())
                .into_iter()
                .map(|tr| r.start_of(tr))
                .collect();
            starts.sort_unstable();
            let truth: Vec<usize> = naive_text_match(&t, &p)
                .iter()
                .map(|e| e + 1 - p.len())
                .collect();
            // Wrapped duplicate tracks only ever repeat starts below padded_n − n,
            // and they must be exactly as marked as the originals.
            starts.dedup();
            assert_eq!(starts, truth);
        }
    }

    #[test]
    fn run_examples() {
        let cfg = TextOptions::default();
        let checked = TextOptions {
            check_invariants: true,
            ..TextOptions::default()
        };
        let trials = 10_000u64;
        let mut yes = 0;
        for s in 0..trials {
            let out = run_quantum_text(&l("0101"), &l("01"), &cfg, &mut seeded(derive_seed(1, s)))
                .unwrap();
            if let Some(e) = out.end {
                assert!(e == 1 || e == 3);
                yes += 1;
            }
        }
        let bound = 1.0 - failure_bound(10);
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(yes as f64 / trials as f64 >= bound - 3.0 * sigma);

        for s in 0..100 {
            let out = run_quantum_text(&l("000"), &l("1"), &checked, &mut seeded(s)).unwrap();
            assert_eq!(out.end, None);
            assert_eq!(out.marked, 0);
        }
        let out = run_quantum_text(&l("0110"), &l("0110"), &checked, &mut seeded(4)).unwrap();
        assert_eq!(out.marked, 1);
        if let Some(e) = out.end {
            assert_eq!(e, 3);
        }
    }

    #[test]
    fn gate_count_is_linear_in_pattern_plus_grover() {
        let opts = TextOptions::default();
        let c = opts.search.c;
        for k in 3..10 {
            let n = 1usize << k;
            let t = bin(0xA5A5_A5A5, 32)
                .into_iter()
                .cycle()
                .take(n)
                .collect::<Vec<_>>();
            let p = l("111");
            let out = run_quantum_text(&t, &p, &opts, &mut seeded(k as u64)).unwrap();
            let bound = 20.0 * (p.len() as f64 + c as f64 * (n as f64).sqrt());
            assert!(
                (out.gates as f64) <= bound,
                "n={n}: {} > {bound}",
                out.gates
            );
        }
    }
}
