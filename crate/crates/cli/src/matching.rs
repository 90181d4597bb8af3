use std::io::Write;
use std::path::Path;
use std::time::Instant;

use smlg_core::bitshift::{shift_and_level_dag, shift_and_text};
use smlg_core::graph::parse_ldag;
use smlg_core::grover::SearchConfig;
use smlg_core::label::{parse_labels, Alphabet, Label};
use smlg_core::oracle::{dp_match, naive_text_match};
use smlg_core::qgraph::{run_quantum_smlg, GraphOptions};
use smlg_core::qtext::{binary_from_labels, run_quantum_text, TextOptions};
use smlg_core::rng::seeded;
use smlg_core::LevelDag;

use crate::report::Report;
use crate::{
    read_file, CliError, CliResult, DagEngine, KRangeArg, MatchDagArgs, MatchTextArgs, PadArg,
    SearchArgs, TextEngine,
};

pub(crate) fn read_labels(path: &Path) -> CliResult<Vec<Label>> {
    let text = read_file(path)?;
    parse_labels(text.trim()).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub(crate) fn read_graph(path: &Path) -> CliResult<LevelDag> {
    parse_ldag(&read_file(path)?).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn search_config(s: &SearchArgs, pattern_len: usize) -> SearchConfig {
    SearchConfig {
        c: s.c,
        k_range: s.k_range.resolve(pattern_len),
        double: s.double,
    }
}

fn k_range_name(k: KRangeArg) -> &'static str {
    match k {
        KRangeArg::Period => "period",
        KRangeArg::Pattern => "pattern",
    }
}

fn search_flags(s: &SearchArgs) -> String {
    let mut f = format!(" --c {} --k-range {}", s.c, k_range_name(s.k_range));
    if s.double {
        f.push_str(" --double");
    }
    f
}

fn fill_search(report: &mut Report, s: &SearchArgs) {
    report.c = Some(s.c);
    report.k_range = Some(k_range_name(s.k_range).into());
    report.double = Some(s.double);
}

fn text_engine_name(e: TextEngine) -> &'static str {
    match e {
        TextEngine::Naive => "naive",
        TextEngine::ShiftAnd => "shift-and",
        TextEngine::QuantumSim => "quantum-sim",
    }
}

fn dag_engine_name(e: DagEngine) -> &'static str {
    match e {
        DagEngine::Dp => "dp",
        DagEngine::ShiftAnd => "shift-and",
        DagEngine::QuantumSim => "quantum-sim",
    }
}

pub fn match_text(a: &MatchTextArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let start = Instant::now();
    let text = read_labels(&a.text)?;
    let pattern = read_labels(&a.pattern)?;
    if pattern.is_empty() {
        return Err(CliError::usage("pattern is empty"));
    }
    let engine = text_engine_name(a.engine);
    let mut report = Report::new(
        "match-text",
        engine,
        vec![
            a.text.display().to_string(),
            a.pattern.display().to_string(),
        ],
        a.seed.seed,
    );
    let mut reproduce = format!(
        "smlg match-text --text {} --pattern {} --engine {engine} --seed {}",
        a.text.display(),
        a.pattern.display(),
        a.seed.seed
    );
    let ends = match a.engine {
        TextEngine::Naive => naive_text_match(&text, &pattern),
        TextEngine::ShiftAnd => {
            let sigma = Alphabet::from_labels(text.iter().chain(&pattern).copied());
            shift_and_text(&text, &pattern, &sigma)?
        }
        TextEngine::QuantumSim => {
            for (what, labels) in [("text", &text), ("pattern", &pattern)] {
                binary_from_labels(labels).map_err(|e| {
                    CliError::usage(format!(
                        "the quantum-sim text engine needs a binary alphabet; {what}: {e}. \
                         Use naive or shift-and for other alphabets"
                    ))
                })?;
            }
            if pattern.len() > text.len() {
                return Err(CliError::usage(format!(
                    "pattern length {} exceeds text length {}",
                    pattern.len(),
                    text.len()
                )));
            }
            let opts = TextOptions {
                search: search_config(&a.search, pattern.len()),
                check_invariants: a.check_invariants,
                trace: a.trace,
            };
            let outcome = run_quantum_text(&text, &pattern, &opts, &mut seeded(a.seed.seed))?;
            for line in &outcome.trace {
                let _ = writeln!(err, "{line}");
            }
            fill_search(&mut report, &a.search);
            reproduce.push_str(&search_flags(&a.search));
            report.tracks = Some(outcome.tracks);
            report.marked = Some(outcome.marked);
            report.rounds = Some(outcome.search.rounds);
            report.circuit_gates = Some(outcome.gates - outcome.search.ops);
            report.gates = Some(outcome.gates);
            if a.check_invariants {
                report.invariants = Some(format!(
                    "prefix property ok after {} iterations",
                    pattern.len()
                ));
                reproduce.push_str(" --check-invariants");
            }
            outcome.end.into_iter().collect()
        }
    };
    report.answer = !ends.is_empty();
    report.ends = Some(ends);
    report.reproduce = reproduce;
    if a.output.timing {
        report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    report.write(a.output.report, out)
}

pub fn match_dag(a: &MatchDagArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let start = Instant::now();
    let graph = read_graph(&a.graph)?;
    let pattern = read_labels(&a.pattern)?;
    if pattern.is_empty() {
        return Err(CliError::usage("pattern is empty"));
    }
    let engine = dag_engine_name(a.engine);
    let mut report = Report::new(
        "match-dag",
        engine,
        vec![
            a.graph.display().to_string(),
            a.pattern.display().to_string(),
        ],
        a.seed.seed,
    );
    let mut reproduce = format!(
        "smlg match-dag --graph {} --pattern {} --engine {engine} --seed {}",
        a.graph.display(),
        a.pattern.display(),
        a.seed.seed
    );
    let answer = match a.engine {
        DagEngine::Dp => dp_match(&graph, &pattern).0,
        DagEngine::ShiftAnd => {
            let r = shift_and_level_dag(&graph, &pattern, a.check_invariants)?;
            if let Some(pre) = &r.pre_shift {
                let (_, table) = dp_match(&graph, &pattern);
                for (i, b) in pre.iter().enumerate() {
                    for (j, &want) in table.row(i).iter().enumerate() {
                        if b.get(j).map_err(CliError::from)? != want {
                            return Err(CliError::verify(format!(
                                "shift-and vector of node {i} disagrees with dp at bit {j}"
                            )));
                        }
                    }
                }
                report.invariants = Some("pre-shift vectors equal dp table".into());
                reproduce.push_str(" --check-invariants");
            }
            r.found
        }
        DagEngine::QuantumSim if pattern.len() == 1 => {
            // A single symbol needs no search: scan the labels.
            report.engine = "quantum-sim (label scan)".into();
            graph.labels().contains(&pattern[0])
        }
        DagEngine::QuantumSim => {
            let opts = GraphOptions {
                pad: a.pad.into(),
                check_invariants: a.check_invariants,
                trace: a.trace,
                search: search_config(&a.search, pattern.len()),
            };
            let outcome = run_quantum_smlg(&graph, &pattern, &opts, &mut seeded(a.seed.seed))?;
            if a.trace {
                for line in outcome.trace.iter().chain(&outcome.checks) {
                    let _ = writeln!(err, "{line}");
                }
            }
            let pad = match a.pad {
                PadArg::Substates => "substates",
                PadArg::Classical => "classical",
            };
            fill_search(&mut report, &a.search);
            reproduce.push_str(&search_flags(&a.search));
            reproduce.push_str(&format!(" --pad {pad}"));
            report.pad = Some(pad.into());
            report.tracks = Some(outcome.tracks);
            report.marked = Some(outcome.marked);
            report.rounds = Some(outcome.search.rounds);
            report.circuit_gates = Some(outcome.circuit_gates);
            report.gates = Some(outcome.gates);
            if a.check_invariants {
                report.invariants = Some(format!(
                    "invariant 1 ok at {} nodes, invariant 2 ok at {} levels",
                    outcome.nodes - graph.level_nodes(0).len().min(outcome.nodes),
                    outcome.checks.len()
                ));
                reproduce.push_str(" --check-invariants");
            }
            outcome.found
        }
    };
    report.answer = answer;
    report.reproduce = reproduce;
    if a.output.timing {
        report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    report.write(a.output.report, out)
}
