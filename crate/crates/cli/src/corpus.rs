use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smlg_core::bitshift::shift_and_level_dag;
use smlg_core::graph::{serialize_ldag, validate_levels};
use smlg_core::grover::SearchConfig;
use smlg_core::label::{format_labels, Label};
use smlg_core::oracle::{
    dp_match, enumerate_paths_match, gen_corpus, gen_level_dag, gen_pattern, CorpusShape,
    GenParams, Instance, ENUMERATION_NODE_LIMIT,
};
use smlg_core::qgraph::{run_quantum_smlg, GraphOptions, PadMode};
use smlg_core::rng::{derive_seed, seeded, RNG_NAME};
use smlg_core::LevelDag;

use crate::matching::{read_graph, read_labels};
use crate::{read_file, thread_pool, CliError, CliResult, GenArgs, ReportFormat, VerifyArgs};

const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub rng: String,
    pub instances: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub graph: String,
    pub pattern: String,
    pub planted: bool,
    pub seed: u64,
    /// Whether the pattern occurs; absent for hand-written entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::io(format!("{}: {e}", path.display()))
}

fn write_instance(
    dir: &Path,
    stem: &str,
    graph: &LevelDag,
    pattern: &[Label],
) -> CliResult<(String, String)> {
    let g = format!("{stem}.ldag");
    let p = format!("{stem}.pattern");
    fs::write(dir.join(&g), serialize_ldag(graph)).map_err(|e| io_err(&dir.join(&g), e))?;
    fs::write(dir.join(&p), format!("{}\n", format_labels(pattern)))
        .map_err(|e| io_err(&dir.join(&p), e))?;
    Ok((g, p))
}

fn generate(a: &GenArgs) -> CliResult<Vec<Instance>> {
    let seed = a.seed.seed;
    match (a.nodes, a.levels) {
        (Some(nodes), Some(levels)) => (0..a.count)
            .map(|id| {
                let s = derive_seed(seed, id as u64);
                let params = GenParams {
                    nodes,
                    levels,
                    density: a.density,
                    alphabet_size: a.alphabet,
                    seed: s,
                };
                let graph = gen_level_dag(&params)?;
                let planted = id % 2 == 0;
                let pattern = gen_pattern(&graph, a.pattern_len, planted, s ^ 0x5EED)?;
                Ok(Instance {
                    id,
                    graph,
                    pattern,
                    planted,
                    seed: s,
                })
            })
            .collect(),
        _ => {
            if a.max_nodes < 2 || a.pattern_len < 2 || a.alphabet < 2 {
                return Err(CliError::usage(
                    "drawn sizes need --max-nodes, --pattern-len and --alphabet of at least 2",
                ));
            }
            let shape = CorpusShape {
                max_nodes: a.max_nodes,
                max_pattern: a.pattern_len,
                max_alphabet: a.alphabet,
            };
            Ok(gen_corpus(a.count, seed, shape))
        }
    }
}

pub fn gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let instances = generate(a)?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    let mut entries = Vec::with_capacity(instances.len());
    for inst in &instances {
        let (graph, pattern) = write_instance(
            &a.out,
            &format!("inst-{:04}", inst.id),
            &inst.graph,
            &inst.pattern,
        )?;
        entries.push(ManifestEntry {
            id: inst.id,
            graph,
            pattern,
            planted: inst.planted,
            seed: inst.seed,
            expected: Some(inst.planted),
        });
    }
    let manifest = Manifest {
        seed: a.seed.seed,
        rng: RNG_NAME.into(),
        instances: entries,
    };
    let path = a.out.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::io(e.to_string()))?;
    fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;
    writeln!(
        out,
        "wrote {} instances to {} (seed {}, rng {RNG_NAME})",
        instances.len(),
        a.out.display(),
        a.seed.seed
    )
    .map_err(|e| CliError::io(e.to_string()))
}

fn load_manifest(dir: &Path) -> CliResult<Manifest> {
    let path = dir.join(MANIFEST);
    if path.exists() {
        return serde_json::from_str(&read_file(&path)?)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())));
    }
    // Without a manifest every `<stem>.ldag` with a `<stem>.pattern` is an instance.
    let mut stems: Vec<String> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "ldag").then(|| p.file_stem()?.to_str().map(str::to_string))?
        })
        .filter(|s| dir.join(format!("{s}.pattern")).exists())
        .collect();
    stems.sort();
    Ok(Manifest {
        seed: 0,
        rng: RNG_NAME.into(),
        instances: stems
            .into_iter()
            .enumerate()
            .map(|(id, s)| ManifestEntry {
                id,
                graph: format!("{s}.ldag"),
                pattern: format!("{s}.pattern"),
                planted: false,
                seed: 0,
                expected: None,
            })
            .collect(),
    })
}

/// Every engine and invariant check on one instance; the first
/// disagreement is returned as the error. `Ok` carries the answer.
pub fn check_instance(
    graph: &LevelDag,
    pattern: &[Label],
    expected: Option<bool>,
    search: &SearchConfig,
    seed: u64,
) -> Result<bool, String> {
    if pattern.is_empty() {
        return Err("empty pattern".into());
    }
    let (truth, table) = dp_match(graph, pattern);
    if graph.node_count() <= ENUMERATION_NODE_LIMIT {
        let e = enumerate_paths_match(graph, pattern).map_err(|e| e.to_string())?;
        if e != truth {
            return Err(format!("path enumeration says {e}, dp says {truth}"));
        }
    }
    let sa = shift_and_level_dag(graph, pattern, true).map_err(|e| e.to_string())?;
    if sa.found != truth {
        return Err(format!("shift-and says {}, dp says {truth}", sa.found));
    }
    for (i, b) in sa.pre_shift.iter().flatten().enumerate() {
        for (j, &want) in table.row(i).iter().enumerate() {
            if b.get(j).map_err(|e| e.to_string())? != want {
                return Err(format!(
                    "shift-and vector of node {i} disagrees with dp at bit {j}"
                ));
            }
        }
    }
    if pattern.len() == 1 {
        if graph.labels().contains(&pattern[0]) != truth {
            return Err("label scan disagrees with dp".into());
        }
    } else {
        for (k, pad) in [PadMode::Substates, PadMode::Classical]
            .into_iter()
            .enumerate()
        {
            let opts = GraphOptions {
                pad,
                check_invariants: true,
                trace: false,
                search: *search,
            };
            let out = run_quantum_smlg(
                graph,
                pattern,
                &opts,
                &mut seeded(derive_seed(seed, k as u64)),
            )
            .map_err(|e| format!("quantum-sim ({pad:?}): {e}"))?;
            if (out.marked > 0) != truth {
                return Err(format!(
                    "quantum-sim ({pad:?}) marked {} tracks, dp says {truth}",
                    out.marked
                ));
            }
            if out.found && !truth {
                return Err(format!(
                    "quantum-sim ({pad:?}) answered yes without an occurrence"
                ));
            }
        }
    }
    if let Some(want) = expected {
        if want != truth {
            return Err(format!("manifest expects {want}, dp says {truth}"));
        }
    }
    Ok(truth)
}

/// Greedy deletion of nodes and pattern ends while the check keeps failing.
pub fn minimize(
    graph: &LevelDag,
    pattern: &[Label],
    expected: Option<bool>,
    search: &SearchConfig,
    seed: u64,
) -> (LevelDag, Vec<Label>, String) {
    let fails = |g: &LevelDag, p: &[Label]| check_instance(g, p, expected, search, seed).err();
    let mut g = graph.clone();
    let mut p = pattern.to_vec();
    let mut msg = fails(&g, &p).unwrap_or_default();
    loop {
        let mut changed = false;
        for v in (0..g.node_count()).rev() {
            let keep: Vec<usize> = (0..g.node_count()).filter(|&u| u != v).collect();
            let mut new_id = vec![usize::MAX; g.node_count()];
            for (k, &u) in keep.iter().enumerate() {
                new_id[u] = k;
            }
            let labels = keep.iter().map(|&u| g.label(u)).collect();
            let edges: Vec<(usize, usize)> = g
                .edges()
                .into_iter()
                .filter(|&(s, d)| s != v && d != v)
                .map(|(s, d)| (new_id[s], new_id[d]))
                .collect();
            if let Ok(smaller) = validate_levels(labels, &edges) {
                if let Some(m) = fails(&smaller, &p) {
                    g = smaller;
                    msg = m;
                    changed = true;
                    break;
                }
            }
        }
        if p.len() > 1 {
            for cut in [p[1..].to_vec(), p[..p.len() - 1].to_vec()] {
                if let Some(m) = fails(&g, &cut) {
                    p = cut;
                    msg = m;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            return (g, p, msg);
        }
    }
}

#[derive(Debug, Serialize)]
struct InstanceLine {
    id: usize,
    graph: String,
    ok: bool,
    answer: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    corpus: String,
    seed: u64,
    rng: String,
    c: u32,
    instances: usize,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
    results: Vec<InstanceLine>,
    dumped: Vec<String>,
}

#[derive(Debug, Serialize)]
struct FailureRecord {
    original_graph: String,
    original_pattern: String,
    seed: u64,
    rng: String,
    c: u32,
    failure: String,
    reproduce: String,
}

pub fn verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let start = std::time::Instant::now();
    let manifest = load_manifest(&a.corpus)?;
    let search = SearchConfig {
        c: a.search.c,
        k_range: a.search.k_range.resolve(0),
        double: a.search.double,
    };
    let mut loaded = Vec::with_capacity(manifest.instances.len());
    for e in &manifest.instances {
        let graph = read_graph(&a.corpus.join(&e.graph))?;
        let pattern = read_labels(&a.corpus.join(&e.pattern))?;
        loaded.push((e, graph, pattern));
    }
    let pool = thread_pool(a.jobs)?;
    let seed = a.seed.seed;
    let k_range = a.search.k_range;
    let mut results: Vec<(usize, Result<bool, String>)> = pool.install(|| {
        loaded
            .par_iter()
            .map(|(e, g, p)| {
                let cfg = SearchConfig {
                    k_range: k_range.resolve(p.len()),
                    ..search
                };
                (
                    e.id,
                    check_instance(g, p, e.expected, &cfg, derive_seed(seed, e.id as u64)),
                )
            })
            .collect()
    });
    results.sort_by_key(|r| r.0);

    let dump_dir = a.dump.clone().unwrap_or_else(|| a.corpus.join("failures"));
    let mut dumped = Vec::new();
    let mut dump_entries = Vec::new();
    let mut lines = Vec::with_capacity(results.len());
    for (id, r) in &results {
        let (e, g, p) = loaded
            .iter()
            .find(|(e, _, _)| e.id == *id)
            .expect("loaded instance");
        if r.is_err() {
            let inst_seed = derive_seed(seed, *id as u64);
            let cfg = SearchConfig {
                k_range: k_range.resolve(p.len()),
                ..search
            };
            let (mg, mp, mmsg) = minimize(g, p, e.expected, &cfg, inst_seed);
            fs::create_dir_all(&dump_dir).map_err(|err| io_err(&dump_dir, err))?;
            let stem = format!("fail-{id:04}");
            let (graph, pattern) = write_instance(&dump_dir, &stem, &mg, &mp)?;
            dump_entries.push(ManifestEntry {
                id: *id,
                graph,
                pattern,
                planted: e.planted,
                seed: e.seed,
                expected: e.expected,
            });
            let record = FailureRecord {
                original_graph: a.corpus.join(&e.graph).display().to_string(),
                original_pattern: a.corpus.join(&e.pattern).display().to_string(),
                seed: inst_seed,
                rng: RNG_NAME.into(),
                c: search.c,
                failure: mmsg,
                reproduce: format!(
                    "smlg verify --corpus {} --seed {seed} --c {}",
                    dump_dir.display(),
                    search.c
                ),
            };
            let json_path: PathBuf = dump_dir.join(format!("{stem}.json"));
            let json = serde_json::to_string_pretty(&record)
                .map_err(|err| CliError::io(err.to_string()))?;
            fs::write(&json_path, json + "\n").map_err(|err| io_err(&json_path, err))?;
            dumped.push(dump_dir.join(format!("{stem}.ldag")).display().to_string());
        }
        lines.push(InstanceLine {
            id: *id,
            graph: e.graph.clone(),
            ok: r.is_ok(),
            answer: r.as_ref().ok().copied(),
            failure: r.as_ref().err().cloned(),
        });
    }
    if !dump_entries.is_empty() {
        // Ids are kept so the same `--seed` reproduces each instance seed.
        let m = Manifest {
            seed,
            rng: RNG_NAME.into(),
            instances: dump_entries,
        };
        let path = dump_dir.join(MANIFEST);
        let json = serde_json::to_string_pretty(&m).map_err(|err| CliError::io(err.to_string()))?;
        fs::write(&path, json + "\n").map_err(|err| io_err(&path, err))?;
    }
    let failures = lines.iter().filter(|l| !l.ok).count();
    let report = VerifyReport {
        corpus: a.corpus.display().to_string(),
        seed,
        rng: RNG_NAME.into(),
        c: search.c,
        instances: lines.len(),
        failures,
        wall_ms: a.output.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        results: lines,
        dumped,
    };
    let io = |e: std::io::Error| CliError::io(e.to_string());
    match a.output.report {
        ReportFormat::Json => {
            let s =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::io(e.to_string()))?;
            writeln!(out, "{s}").map_err(io)?;
        }
        ReportFormat::Human => {
            for l in &report.results {
                match &l.failure {
                    None => writeln!(
                        out,
                        "ok   {:04} {} {}",
                        l.id,
                        l.graph,
                        if l.answer == Some(true) { "yes" } else { "no" }
                    ),
                    Some(f) => writeln!(out, "FAIL {:04} {} {f}", l.id, l.graph),
                }
                .map_err(io)?;
            }
            writeln!(
                out,
                "verified {} instances, {} failures (seed {seed}, rng {RNG_NAME}, c {})",
                report.instances, report.failures, report.c
            )
            .map_err(io)?;
            for d in &report.dumped {
                writeln!(out, "minimized failing instance: {d}").map_err(io)?;
            }
            if let Some(ms) = report.wall_ms {
                writeln!(out, "wall_ms: {ms:.1}").map_err(io)?;
            }
        }
    }
    if failures > 0 {
        return Err(CliError::verify(format!(
            "{failures} instance(s) failed verification"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use smlg_core::label::parse_labels;
    use smlg_core::oracle::gen_corpus;

    #[test]
    fn generated_instances_pass_every_check() {
        let search = SearchConfig::default();
        for inst in gen_corpus(20, 13, CorpusShape::default()) {
            let r = check_instance(
                &inst.graph,
                &inst.pattern,
                Some(inst.planted),
                &search,
                inst.seed,
            );
            assert_eq!(r, Ok(inst.planted), "instance {}", inst.id);
        }
    }

    #[test]
    fn wrong_expectation_minimizes_to_a_single_node() {
        let g = validate_levels(
            parse_labels("abcab").unwrap(),
            &[(0, 2), (1, 2), (2, 3), (2, 4)],
        )
        .unwrap();
        let p = parse_labels("bca").unwrap();
        let search = SearchConfig::default();
        assert_eq!(check_instance(&g, &p, None, &search, 1), Ok(true));
        let (small, sp, msg) = minimize(&g, &p, Some(false), &search, 1);
        assert!(check_instance(&small, &sp, Some(false), &search, 1).is_err());
        assert_eq!(small.node_count(), 1);
        assert_eq!(sp.len(), 1);
        assert!(msg.contains("manifest expects false"));
    }
}
