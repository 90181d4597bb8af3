//! Quantum Shift-And on level DAGs, simulated on a [`TrackTable`].
//!
//! The pattern is padded to `m`, a power of two, and register `J` is put in
//! uniform superposition over `[0, m)`. Qubit `V_i` then holds the whole
//! bit-vector `B_i` of node `i`: on the track whose `J` value is `j` it
//! holds bit `j`. Incrementing `J` once per level relabels every track, so
//! a bit computed for prefix `j` answers prefix `j + 1` one level later.
//! This is the shift, and it is why all in-neighbours of a node must sit on
//! the same level.
//!
//! Qubit `B` marks the track with `J = |P| − 1`, so that a full occurrence
//! of the unpadded pattern is seen on any node; the matrix reads for
//! `j ≥ |P|` return 1.

use crate::error::{Error, Result};
use crate::graph::{pad_classical, LevelDag};
use crate::grover::{run_randomized_search, SearchConfig, SearchOutcome};
use crate::label::Label;
use crate::oracle::{dp_match, DpTable};
use crate::qcore::{width_for, QramArray, Qubit, Reg, TrackTable};
use crate::rng::SmlgRng;

/// How a pattern whose length is not a power of two is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PadMode {
    /// Redundant tracks `J ≥ |P|`; matrix reads there return 1.
    #[default]
    Substates,
    /// Sentinel padding of pattern and graph before the run.
    Classical,
}

#[derive(Clone, Copy, Debug)]
struct Layout {
    j: Reg,
    i: Reg,
    c: Reg,
    q: Reg,
    a: Qubit,
    b: Qubit,
    mq: Qubit,
}

#[derive(Clone, Debug)]
struct NodeQubits {
    v: Qubit,
    vp: Qubit,
    r: Qubit,
    rp: Qubit,
    e: Vec<Qubit>,
}

#[derive(Clone, Debug)]
pub struct GraphRun {
    graph: LevelDag,
    pattern: Vec<Label>,
    /// Length of the pattern whose occurrences are reported.
    p_len: usize,
    m: usize,
    state: TrackTable,
    layout: Layout,
    nodes: Vec<NodeQubits>,
    label_mem: QramArray,
    matrix_mem: QramArray,
    next_node: usize,
    shift_count: usize,
    reference: Option<DpTable>,
    checks: Vec<String>,
}

impl GraphRun {
    /// Prepares `J` in superposition with `A = δ(0, J)`, `B = δ(|P|−1, J)`
    /// and `Q = 1`. With `check` set, a dynamic-programming table of the
    /// same instance is kept for the invariant checks.
    pub fn new(g: &LevelDag, pattern: &[Label], pad: PadMode, check: bool) -> Result<GraphRun> {
        if pattern.len() < 2 {
            return Err(Error::usage("pattern length must be at least 2"));
        }
        let (graph, pattern) = if pad == PadMode::Classical && !pattern.len().is_power_of_two() {
            let sentinel = g.alphabet().union(pattern.iter().copied()).fresh_sentinel();
            pad_classical(g, pattern, sentinel)?
        } else {
            (g.clone(), pattern.to_vec())
        };
        let p_len = pattern.len();
        let m = p_len.next_power_of_two();
        let n = graph.node_count();
        let sigma = graph.alphabet().union(pattern.iter().copied());

        let mut s = TrackTable::new();
        let j = s.declare_register("J", m.trailing_zeros())?;
        let i = s.declare_register("I", width_for(n as u64))?;
        let c = s.declare_register("C", width_for(sigma.len() as u64 - 1))?;
        let q = s.declare_register("Q", 1)?;
        let layout = Layout {
            j,
            i,
            c,
            q,
            a: s.declare_qubit("A")?,
            b: s.declare_qubit("B")?,
            mq: s.declare_qubit("M")?,
        };
        s.apply_x_register(q, 1)?;
        s.hadamard_init(j)?;
        s.apply_delta_init(j, 0, layout.a)?;
        s.apply_delta_init(j, p_len as u64 - 1, layout.b)?;

        let mut nodes = Vec::with_capacity(n);
        for v in 0..n {
            let e = (0..graph.in_degree(v))
                .map(|d| s.declare_qubit(format!("E[{v},{d}]")))
                .collect::<Result<Vec<_>>>()?;
            nodes.push(NodeQubits {
                v: s.declare_qubit(format!("V[{v}]"))?,
                vp: s.declare_qubit(format!("V'[{v}]"))?,
                r: s.declare_qubit(format!("R[{v}]"))?,
                rp: s.declare_qubit(format!("R'[{v}]"))?,
                e,
            });
        }

        let ranks = graph
            .labels()
            .iter()
            .map(|&l| sigma.rank(l).expect("label in joint alphabet") as u64)
            .collect();
        let label_mem = QramArray::new("label", s.register_width(c), ranks)?;
        let cells = sigma
            .symbols()
            .iter()
            .flat_map(|&sym| pattern.iter().map(move |&p| (p == sym) as u64))
            .collect();
        let matrix_mem = QramArray::matrix("match", 1, sigma.len(), p_len, cells)?.with_pad(1)?;
        let reference = check.then(|| dp_match(&graph, &pattern).1);

        Ok(GraphRun {
            graph,
            pattern,
            p_len,
            m,
            state: s,
            layout,
            nodes,
            label_mem,
            matrix_mem,
            next_node: 0,
            shift_count: 0,
            reference,
            checks: Vec::new(),
        })
    }

    pub fn graph(&self) -> &LevelDag {
        &self.graph
    }

    pub fn pattern(&self) -> &[Label] {
        &self.pattern
    }

    pub fn track_count(&self) -> usize {
        self.state.track_count()
    }

    pub fn padded_len(&self) -> usize {
        self.m
    }

    pub fn shift_count(&self) -> usize {
        self.shift_count
    }

    pub fn state(&self) -> &TrackTable {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut TrackTable {
        &mut self.state
    }

    pub fn v_qubit(&self, i: usize) -> Qubit {
        self.nodes[i].v
    }

    pub fn vp_qubit(&self, i: usize) -> Qubit {
        self.nodes[i].vp
    }

    pub fn r_qubit(&self, i: usize) -> Qubit {
        self.nodes[i].r
    }

    pub fn e_qubit(&self, i: usize, d: usize) -> Qubit {
        self.nodes[i].e[d]
    }

    pub fn a_qubit(&self) -> Qubit {
        self.layout.a
    }

    pub fn b_qubit(&self) -> Qubit {
        self.layout.b
    }

    pub fn m_qubit(&self) -> Qubit {
        self.layout.mq
    }

    /// The track currently labelled `J = j`.
    pub fn track_with_j(&self, j: usize) -> usize {
        (j + self.m - self.shift_count % self.m) % self.m
    }

    pub fn j_value(&self, t: usize) -> u64 {
        self.state.value(self.layout.j, t)
    }

    /// Invariant-check summaries collected so far.
    pub fn check_log(&self) -> &[String] {
        &self.checks
    }

    fn read_label_and_column(&mut self) -> Result<()> {
        let Layout { i, j, c, mq, .. } = self.layout;
        self.state.qram_read(&[i], &self.label_mem, c.into())?;
        self.state.qram_read(&[c, j], &self.matrix_mem, mq.into())
    }

    fn expect_node(&self, i: usize) -> Result<()> {
        if i != self.next_node {
            return Err(Error::usage(format!(
                "node {i} processed out of order, expected {}",
                self.next_node
            )));
        }
        Ok(())
    }

    /// `V_i = m_{ℓ(vᵢ), j} ∧ δ(0, j)` for every source, one at a time.
    pub fn source_nodes_init(&mut self) -> Result<()> {
        for i in self.graph.level_nodes(0) {
            self.expect_node(i)?;
            self.state.require_clean(self.nodes[i].v)?;
            self.read_label_and_column()?;
            self.state
                .apply_ccx(self.layout.mq, self.layout.a, self.nodes[i].v)?;
            self.increase_i()?;
        }
        Ok(())
    }

    /// Loads label and column, folds the in-neighbour vectors into
    /// `E_{i,·}` and sets `V'_i = δ(0, j) ∨ ⋁_d V_{in_i(d)}`.
    pub fn operation_one(&mut self, i: usize) -> Result<()> {
        self.expect_node(i)?;
        let nbrs = self.graph.in_neighbors(i).to_vec();
        if nbrs.is_empty() {
            return Err(Error::usage(format!("node {i} has no in-neighbours")));
        }
        let node = self.nodes[i].clone();
        for &q in node.e.iter().chain([&node.vp]) {
            self.state.require_clean(q)?;
        }
        self.read_label_and_column()?;
        self.state.apply_cx(self.nodes[nbrs[0]].v, node.e[0])?;
        for (d, &k) in nbrs.iter().enumerate().skip(1) {
            self.state
                .apply_or(self.nodes[k].v, node.e[d - 1], node.e[d])?;
        }
        self.state
            .apply_or(self.layout.a, node.e[nbrs.len() - 1], node.vp)
    }

    /// `V_i = M ∧ V'_i`.
    pub fn operation_two(&mut self, i: usize) -> Result<()> {
        self.expect_node(i)?;
        let node = &self.nodes[i];
        let (v, vp) = (node.v, node.vp);
        self.state.require_clean(v)?;
        self.state.apply_ccx(self.layout.mq, vp, v)
    }

    /// `R'_i = V_i ∧ B`, then `R_i = R'_i ∨ R_{i−1}`.
    pub fn operation_three(&mut self, i: usize) -> Result<()> {
        self.expect_node(i)?;
        if i == 0 {
            return Err(Error::usage("the first node is a source"));
        }
        let node = &self.nodes[i];
        let (v, r, rp) = (node.v, node.r, node.rp);
        let prev = self.nodes[i - 1].r;
        self.state.require_clean(rp)?;
        self.state.apply_ccx(v, self.layout.b, rp)?;
        self.state.apply_or(rp, prev, r)
    }

    /// Uncomputes `M` and `C` with a second pair of reads and advances `I`.
    pub fn increase_i(&mut self) -> Result<()> {
        let Layout { i, j, c, q, mq, .. } = self.layout;
        self.state.qram_read(&[c, j], &self.matrix_mem, mq.into())?;
        self.state.qram_read(&[i], &self.label_mem, c.into())?;
        self.state.require_clean(mq)?;
        if !self.state.register_is_zero(c) {
            return Err(Error::ScratchNotClean("C".into()));
        }
        self.state.increment(i, q)?;
        self.next_node += 1;
        Ok(())
    }

    /// Resets `A` and `B`, increments `J` modulo `m` and prepares `A` and
    /// `B` again against the new `J` values.
    pub fn operation_four(&mut self) -> Result<()> {
        let Layout { j, q, a, b, .. } = self.layout;
        let last = self.p_len as u64 - 1;
        self.state.apply_delta_reset(j, 0, a)?;
        self.state.apply_delta_reset(j, last, b)?;
        self.state.increment(j, q)?;
        self.state.apply_delta_init(j, 0, a)?;
        self.state.apply_delta_init(j, last, b)?;
        self.shift_count += 1;
        Ok(())
    }

    /// Prefix check after `operation_two(i)`: on the track labelled `j`,
    /// `V_i = 1` iff `P[0..=j]` has an occurrence ending at node `i`.
    pub fn check_invariant_one(&self, i: usize) -> Result<()> {
        let Some(table) = &self.reference else {
            return Err(Error::usage("run was created without invariant checks"));
        };
        for j in 0..self.p_len {
            let t = self.track_with_j(j);
            let got = self.state.bit(self.nodes[i].v, t);
            if got != table.get(i, j) {
                return Err(Error::StateCorruption(format!(
                    "invariant 1 fails at node {i}, prefix {j}: V is {got}"
                )));
            }
        }
        Ok(())
    }

    /// Occurrence check after `operation_four`: the running `R` chain is
    /// marked somewhere iff some node visited so far ends an occurrence.
    pub fn check_invariant_two(&self) -> Result<()> {
        let Some(table) = &self.reference else {
            return Err(Error::usage("run was created without invariant checks"));
        };
        let visited = self.next_node;
        let expect = (0..visited).any(|v| table.get(v, self.p_len - 1));
        let got = visited > 0 && self.state.count_marked(self.nodes[visited - 1].r) > 0;
        if got != expect {
            return Err(Error::StateCorruption(format!(
                "invariant 2 fails after {visited} nodes: R marked is {got}"
            )));
        }
        Ok(())
    }

    /// `A` and `B` in δ form, `M` and `C` clean.
    pub fn check_boundary(&self) -> Result<()> {
        let Layout { j, c, a, b, mq, .. } = self.layout;
        if !self.state.holds_delta(j, 0, a) || !self.state.holds_delta(j, self.p_len as u64 - 1, b)
        {
            return Err(Error::StateCorruption("A or B not in δ form".into()));
        }
        self.state.require_clean(mq)?;
        if !self.state.register_is_zero(c) {
            return Err(Error::ScratchNotClean("C".into()));
        }
        Ok(())
    }

    /// Every level after the sources, then the final shift. Returns the
    /// qubit the search is marked on.
    pub fn run_levels(&mut self) -> Result<Qubit> {
        let check = self.reference.is_some();
        self.source_nodes_init()?;
        self.operation_four()?;
        if check {
            self.check_boundary()?;
            self.check_invariant_two()?;
            self.checks
                .push(format!("level=0 nodes={} inv2=ok", self.next_node));
        }
        for l in 1..self.graph.level_count() {
            for i in self.graph.level_nodes(l) {
                self.operation_one(i)?;
                self.operation_two(i)?;
                if check {
                    self.check_invariant_one(i)?;
                }
                self.operation_three(i)?;
                self.increase_i()?;
            }
            self.operation_four()?;
            if check {
                self.check_boundary()?;
                self.check_invariant_two()?;
                let marked = self.state.count_marked(self.nodes[self.next_node - 1].r);
                self.checks.push(format!(
                    "level={l} nodes={} inv1=ok inv2=ok marked={marked}",
                    self.graph.level_nodes(l).len()
                ));
            }
        }
        Ok(self.nodes[self.graph.node_count() - 1].r)
    }
}

#[derive(Clone, Debug, Default)]
pub struct GraphOptions {
    pub pad: PadMode,
    pub check_invariants: bool,
    pub trace: bool,
    pub search: SearchConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOutcome {
    pub found: bool,
    /// Marked tracks of the final `R` qubit.
    pub marked: usize,
    pub search: SearchOutcome,
    /// Primitive operations before the search stage.
    pub circuit_gates: u64,
    pub gates: u64,
    pub tracks: usize,
    pub nodes: usize,
    pub edges: usize,
    pub trace: Vec<String>,
    pub checks: Vec<String>,
}

/// The full algorithm: circuit simulation once, then up to `c` rounds of
/// amplitude amplification on the final `R` qubit.
pub fn run_quantum_smlg(
    g: &LevelDag,
    pattern: &[Label],
    opts: &GraphOptions,
    rng: &mut SmlgRng,
) -> Result<GraphOutcome> {
    let mut run = GraphRun::new(g, pattern, opts.pad, opts.check_invariants)?;
    if opts.trace {
        run.state.enable_trace();
    }
    let r = run.run_levels()?;
    let circuit_gates = run.state.gate_count();
    let marked = run.state.count_marked(r);
    let (track, search) = run_randomized_search(&mut run.state, r, &opts.search, rng)?;
    Ok(GraphOutcome {
        found: track.is_some(),
        marked,
        search,
        circuit_gates,
        gates: run.state.gate_count(),
        tracks: run.state.track_count(),
        nodes: run.graph.node_count(),
        edges: run.graph.edge_count(),
        trace: run.state.take_trace(),
        checks: run.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitshift::shift_and_level_dag;
    use crate::graph::validate_levels;
    use crate::label::parse_labels;
    use crate::oracle::{gen_corpus, CorpusShape};
    use crate::rng::seeded;

    fn l(s: &str) -> Vec<Label> {
        parse_labels(s).unwrap()
    }

    fn chain(s: &str) -> LevelDag {
        let edges: Vec<_> = (1..s.len()).map(|i| (i - 1, i)).collect();
        validate_levels(l(s), &edges).unwrap()
    }

    fn diamond(labels: &str) -> LevelDag {
        validate_levels(l(labels), &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn init_examples() {
        let run = GraphRun::new(&chain("abcd"), &l("abcd"), PadMode::Substates, false).unwrap();
        assert_eq!(run.track_count(), 4);
        assert_eq!(run.state().marked_tracks(run.a_qubit()), vec![0]);
        assert_eq!(run.state().marked_tracks(run.b_qubit()), vec![3]);
        let run = GraphRun::new(&chain("abcd"), &l("abc"), PadMode::Substates, false).unwrap();
        assert_eq!(run.track_count(), 4);
        assert_eq!(run.state().marked_tracks(run.b_qubit()), vec![2]);
        assert!(matches!(
            GraphRun::new(&chain("ab"), &l("a"), PadMode::Substates, false),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn padded_matrix_reads_return_one() {
        let mut run = GraphRun::new(&chain("abcd"), &l("abc"), PadMode::Substates, false).unwrap();
        run.read_label_and_column().unwrap();
        // Node 0 is `a`: column bits are j=0 from the pattern and j=3 from padding.
        assert_eq!(run.state().marked_tracks(run.m_qubit()), vec![0, 3]);
    }

    #[test]
    fn source_init_examples() {
        let g = validate_levels(l("abc"), &[(0, 2), (1, 2)]).unwrap();
        let mut run = GraphRun::new(&g, &l("ac"), PadMode::Substates, false).unwrap();
        run.source_nodes_init().unwrap();
        assert_eq!(run.state().marked_tracks(run.v_qubit(0)), vec![0]);
        assert!(run.state().is_clean(run.v_qubit(1)));
        run.check_boundary().unwrap();
    }

    #[test]
    fn operation_examples_on_fan_in() {
        // Three sources feed node 3; the pattern makes sources 1 and 2 fire.
        let g = validate_levels(l("xyyz"), &[(0, 3), (1, 3), (2, 3)]).unwrap();
        let mut run = GraphRun::new(&g, &l("yz"), PadMode::Substates, false).unwrap();
        run.source_nodes_init().unwrap();
        run.operation_four().unwrap();
        run.operation_one(3).unwrap();
        let marked_j = |run: &GraphRun, q: Qubit| -> Vec<u64> {
            let mut v: Vec<u64> = run
                .state()
                .marked_tracks(q)
                .iter()
                .map(|&t| run.j_value(t))
                .collect();
            v.sort_unstable();
            v
        };
        assert!(marked_j(&run, run.e_qubit(3, 0)).is_empty());
        assert_eq!(marked_j(&run, run.e_qubit(3, 2)), vec![1]);
        assert_eq!(marked_j(&run, run.vp_qubit(3)), vec![0, 1]);
        run.operation_two(3).unwrap();
        assert_eq!(marked_j(&run, run.v_qubit(3)), vec![1]);
        run.operation_three(3).unwrap();
        assert_eq!(run.state().count_marked(run.r_qubit(3)), 1);
        run.increase_i().unwrap();
        run.check_boundary().unwrap();
    }

    #[test]
    fn operation_four_relabels_tracks() {
        let mut run = GraphRun::new(&chain("abcd"), &l("abcd"), PadMode::Substates, false).unwrap();
        run.source_nodes_init().unwrap();
        let t = run.state().marked_tracks(run.v_qubit(0))[0];
        assert_eq!(run.j_value(t), 0);
        run.operation_four().unwrap();
        assert_eq!(run.j_value(t), 1);
        assert_eq!(run.track_with_j(1), t);
        let a = run.state().marked_tracks(run.a_qubit())[0];
        assert_ne!(a, t);
        assert_eq!(run.j_value(a), 0);
        for _ in 0..3 {
            run.operation_four().unwrap();
        }
        assert_eq!(run.j_value(t), 0);
        let a = run.a_qubit();
        run.state_mut().apply_x(a).unwrap();
        assert!(matches!(
            run.operation_four(),
            Err(Error::StateCorruption(_))
        ));
    }

    #[test]
    fn out_of_order_and_dirty_targets() {
        let mut run = GraphRun::new(&chain("ab"), &l("ab"), PadMode::Substates, false).unwrap();
        assert!(run.operation_one(1).is_err());
        run.source_nodes_init().unwrap();
        run.operation_four().unwrap();
        let v = run.v_qubit(1);
        run.state_mut().apply_x(v).unwrap();
        run.operation_one(1).unwrap();
        assert!(matches!(
            run.operation_two(1),
            Err(Error::ScratchNotClean(_))
        ));
    }

    fn answer_labels(g: &LevelDag, p: &[Label], pad: PadMode) -> GraphOutcome {
        let opts = GraphOptions {
            pad,
            check_invariants: true,
            ..GraphOptions::default()
        };
        run_quantum_smlg(g, p, &opts, &mut seeded(1)).unwrap()
    }

    fn answer(g: &LevelDag, p: &str, pad: PadMode) -> GraphOutcome {
        answer_labels(g, &l(p), pad)
    }

    #[test]
    fn run_examples() {
        let out = answer(&diamond("abbd"), "abd", PadMode::Substates);
        assert!(out.marked > 0);
        assert!(dp_match(&diamond("abbd"), &l("abd")).0);
        assert_eq!(answer(&chain("abc"), "abcd", PadMode::Substates).marked, 0);
        assert_eq!(
            answer(&diamond("abcd"), "acd", PadMode::Substates).marked,
            1
        );
        assert_eq!(answer(&diamond("abcd"), "ad", PadMode::Substates).marked, 0);
    }

    #[test]
    fn match_ending_before_last_level_is_found() {
        // a -> b ends on level 1 while the other branch continues to level 3.
        let g = validate_levels(l("abwxyz"), &[(0, 1), (2, 3), (3, 4), (4, 5)]).unwrap();
        for pad in [PadMode::Substates, PadMode::Classical] {
            assert!(answer(&g, "ab", pad).marked > 0);
            assert!(answer(&g, "wxy", pad).marked > 0);
            assert_eq!(answer(&g, "bx", pad).marked, 0);
        }
    }

    #[test]
    fn invariants_hold_on_corpus_in_both_pad_modes() {
        for inst in gen_corpus(120, 23, CorpusShape::default()) {
            let truth = shift_and_level_dag(&inst.graph, &inst.pattern, false)
                .unwrap()
                .found;
            for pad in [PadMode::Substates, PadMode::Classical] {
                let out = answer_labels(&inst.graph, &inst.pattern, pad);
                assert_eq!(out.marked > 0, truth, "instance {} pad {pad:?}", inst.id);
                if !truth {
                    assert!(!out.found);
                }
            }
        }
    }

    #[test]
    fn trace_and_gate_totals() {
        let opts = GraphOptions {
            trace: true,
            ..GraphOptions::default()
        };
        let out = run_quantum_smlg(&diamond("abcd"), &l("ab"), &opts, &mut seeded(2)).unwrap();
        assert!(out.trace.last().unwrap().starts_with("op=grover"));
        assert_eq!(out.gates - out.circuit_gates, out.search.ops);
        assert!(out.trace.iter().any(|t| t.starts_with("op=ccx")));
    }
}
