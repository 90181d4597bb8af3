use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use smlg_core::bench::{graph_gate_schedule, grover_op_schedule, linear_fit, ratios, GateRow};
use smlg_core::rng::RNG_NAME;

use crate::{thread_pool, BenchArgs, CliError, CliResult, ReportFormat};

/// Edge count exponent of the graph used for the search-stage table.
const GROVER_EXP: u32 = 10;

#[derive(Debug, Serialize)]
struct Row {
    edges: usize,
    nodes: usize,
    size: usize,
    circuit_gates: u64,
    gates: u64,
    /// Gates relative to the previous row.
    ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Fit {
    slope: f64,
    intercept: f64,
    r2: f64,
}

#[derive(Debug, Serialize)]
struct GroverRow {
    pattern_len: usize,
    mean_ops: f64,
    ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    seed: u64,
    rng: String,
    c: u32,
    pattern_len: usize,
    rows: Vec<Row>,
    fit: Option<Fit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    grover: Vec<GroverRow>,
}

pub fn bench(a: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.min_exp < 3 || a.max_exp > 24 || a.min_exp > a.max_exp {
        return Err(CliError::usage(
            "exponents must satisfy 3 <= --min-exp <= --max-exp <= 24",
        ));
    }
    if a.pattern_len < 2 {
        return Err(CliError::usage("--pattern-len must be at least 2"));
    }
    let pool = thread_pool(a.jobs)?;
    let seed = a.seed.seed;
    let ks: Vec<u32> = (a.min_exp..=a.max_exp).collect();
    let measured: Vec<smlg_core::Result<(GateRow, f64)>> = pool.install(|| {
        ks.par_iter()
            .map(|&k| {
                let start = Instant::now();
                let row = graph_gate_schedule(&[k], a.pattern_len, a.c, seed)?.remove(0);
                Ok((row, start.elapsed().as_secs_f64() * 1e3))
            })
            .collect()
    });
    let measured = measured
        .into_iter()
        .collect::<smlg_core::Result<Vec<_>>>()?;
    let gates: Vec<f64> = measured.iter().map(|(r, _)| r.total_gates as f64).collect();
    let step = ratios(&gates);
    let rows: Vec<Row> = measured
        .iter()
        .enumerate()
        .map(|(i, (r, ms))| Row {
            edges: r.edges,
            nodes: r.nodes,
            size: r.edges + r.nodes,
            circuit_gates: r.circuit_gates,
            gates: r.total_gates,
            ratio: i.checked_sub(1).map(|p| step[p]),
            wall_ms: a.output.timing.then_some(*ms),
        })
        .collect();
    let sizes: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
    let fit = linear_fit(&sizes, &gates)
        .ok()
        .map(|(slope, intercept, r2)| Fit {
            slope,
            intercept,
            r2,
        });

    let grover = if a.grover_lengths.is_empty() {
        Vec::new()
    } else {
        if a.grover_lengths.iter().any(|&m| m < 2) || a.grover_trials == 0 {
            return Err(CliError::usage(
                "--grover-lengths must be at least 2 and --grover-trials positive",
            ));
        }
        let means = pool.install(|| {
            grover_op_schedule(GROVER_EXP, &a.grover_lengths, a.grover_trials, a.c, seed)
        })?;
        let ops: Vec<f64> = means.iter().map(|m| m.1).collect();
        let step = ratios(&ops);
        means
            .iter()
            .enumerate()
            .map(|(i, &(m, mean))| GroverRow {
                pattern_len: m,
                mean_ops: mean,
                ratio: i.checked_sub(1).map(|p| step[p]),
            })
            .collect()
    };

    let report = BenchReport {
        seed,
        rng: RNG_NAME.into(),
        c: a.c,
        pattern_len: a.pattern_len,
        rows,
        fit,
        grover,
    };
    write_report(&report, a.output.report, out)
        .map_err(|e| CliError::io(format!("writing report: {e}")))
}

fn ratio_cell(r: Option<f64>) -> String {
    r.map_or_else(|| "-".into(), |r| format!("{r:.3}"))
}

fn write_report(r: &BenchReport, format: ReportFormat, out: &mut dyn Write) -> std::io::Result<()> {
    if format == ReportFormat::Json {
        let s = serde_json::to_string_pretty(r).map_err(std::io::Error::other)?;
        return writeln!(out, "{s}");
    }
    writeln!(
        out,
        "seed {} rng {} c {} pattern_len {}",
        r.seed, r.rng, r.c, r.pattern_len
    )?;
    let timing = r.rows.iter().any(|x| x.wall_ms.is_some());
    write!(
        out,
        "{:>9} {:>9} {:>9} {:>14} {:>8}",
        "edges", "nodes", "V+E", "gates", "ratio"
    )?;
    if timing {
        write!(out, " {:>10}", "wall_ms")?;
    }
    writeln!(out)?;
    for row in &r.rows {
        write!(
            out,
            "{:>9} {:>9} {:>9} {:>14} {:>8}",
            row.edges,
            row.nodes,
            row.size,
            row.gates,
            ratio_cell(row.ratio)
        )?;
        if let Some(ms) = row.wall_ms {
            write!(out, " {ms:>10.1}")?;
        }
        writeln!(out)?;
    }
    if let Some(f) = &r.fit {
        writeln!(
            out,
            "fit gates = {:.3} * (V+E) + {:.1}, r2 = {:.6}",
            f.slope, f.intercept, f.r2
        )?;
    }
    if !r.grover.is_empty() {
        writeln!(out, "search stage at |E| = 2^{GROVER_EXP}")?;
        writeln!(out, "{:>5} {:>12} {:>8}", "m", "mean_ops", "ratio")?;
        for g in &r.grover {
            writeln!(
                out,
                "{:>5} {:>12.1} {:>8}",
                g.pattern_len,
                g.mean_ops,
                ratio_cell(g.ratio)
            )?;
        }
    }
    Ok(())
}
