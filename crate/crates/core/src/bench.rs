//! Gate-count measurements over doubling instance sizes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{validate_levels, LevelDag};
use crate::grover::{run_randomized_search, SearchConfig};
use crate::label::Label;
use crate::qgraph::{run_quantum_smlg, GraphOptions, GraphRun, PadMode};
use crate::rng::{derive_seed, seeded};

/// Nodes per level of a bench graph.
pub const BENCH_WIDTH: usize = 4;

/// A level DAG with exactly `2^k` edges: levels of four nodes labelled
/// from `{a, b}`, every non-source node fed by two distinct nodes of the
/// previous level, and `2^(k−3) + 1` levels.
pub fn bench_graph(k: u32, seed: u64) -> Result<LevelDag> {
    if !(3..=24).contains(&k) {
        return Err(Error::usage(format!("edge exponent {k} outside 3..=24")));
    }
    let levels = (1usize << (k - 3)) + 1;
    let mut rng = seeded(seed);
    let n = levels * BENCH_WIDTH;
    let labels = (0..n)
        .map(|_| Label::Char(if rng.gen_bool(0.5) { b'a' } else { b'b' }))
        .collect();
    let mut edges = Vec::with_capacity(2 * (n - BENCH_WIDTH));
    for v in BENCH_WIDTH..n {
        let base = (v / BENCH_WIDTH - 1) * BENCH_WIDTH;
        let x = rng.gen_range(0..BENCH_WIDTH);
        let y = (x + rng.gen_range(1..BENCH_WIDTH)) % BENCH_WIDTH;
        edges.push((base + x, v));
        edges.push((base + y, v));
    }
    validate_levels(labels, &edges)
}

/// `a^(m−1) z`: never occurs in a bench graph, so every search round runs.
pub fn bench_pattern(m: usize) -> Vec<Label> {
    let mut p = vec![Label::Char(b'a'); m.saturating_sub(1)];
    p.push(Label::Char(b'z'));
    p
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateRow {
    pub edges: usize,
    pub nodes: usize,
    pub circuit_gates: u64,
    pub total_gates: u64,
}

/// Total primitive operations of full runs on `bench_graph(k)` for each
/// `k`, with a non-occurring pattern of length `m`.
pub fn graph_gate_schedule(ks: &[u32], m: usize, c: u32, seed: u64) -> Result<Vec<GateRow>> {
    let opts = GraphOptions {
        pad: PadMode::Substates,
        search: SearchConfig {
            c,
            ..SearchConfig::default()
        },
        ..GraphOptions::default()
    };
    ks.iter()
        .map(|&k| {
            let g = bench_graph(k, derive_seed(seed, k as u64))?;
            let out = run_quantum_smlg(&g, &bench_pattern(m), &opts, &mut seeded(seed))?;
            Ok(GateRow {
                edges: out.edges,
                nodes: out.nodes,
                circuit_gates: out.circuit_gates,
                total_gates: out.gates,
            })
        })
        .collect()
}

/// Mean search-stage operations over `trials` seeds for each pattern length,
/// on the fixed graph `bench_graph(k)`. The circuit is simulated once per
/// length; only the search stage is repeated.
pub fn grover_op_schedule(
    k: u32,
    lengths: &[usize],
    trials: u64,
    c: u32,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    let g = bench_graph(k, seed)?;
    let cfg = SearchConfig {
        c,
        ..SearchConfig::default()
    };
    lengths
        .iter()
        .map(|&m| {
            let mut run = GraphRun::new(&g, &bench_pattern(m), PadMode::Substates, false)?;
            let r = run.run_levels()?;
            let mut total = 0u64;
            for t in 0..trials {
                let mut state = run.state().clone();
                let (_, out) =
                    run_randomized_search(&mut state, r, &cfg, &mut seeded(derive_seed(seed, t)))?;
                total += out.ops;
            }
            Ok((m, total as f64 / trials as f64))
        })
        .collect()
}

/// Consecutive ratios `v[i+1] / v[i]`.
pub fn ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Least-squares line through `(x, y)`: slope, intercept and `R²`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::usage("linear fit needs at least two paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::usage("linear fit needs distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok((slope, intercept, r2))
}
