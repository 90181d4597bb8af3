use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use smlg_core::graph::parse_ldag;
use smlg_core::label::parse_labels;
use smlg_core::oracle::dp_match;

fn smlg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smlg"))
        .args(args)
        .env_remove("SMLG_SEED")
        .output()
        .expect("spawn smlg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn gen(dir: &Path, count: usize, seed: u64) {
    let o = smlg(&[
        "gen",
        "--out",
        path(dir),
        "--count",
        &count.to_string(),
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("json report")
}

#[test]
fn dp_and_quantum_sim_agree_on_generated_instances() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 12, 11);
    for id in 0..12 {
        let g = dir.path().join(format!("inst-{id:04}.ldag"));
        let p = dir.path().join(format!("inst-{id:04}.pattern"));
        let answers: Vec<bool> = ["dp", "shift-and", "quantum-sim"]
            .iter()
            .map(|engine| {
                let o = smlg(&[
                    "match-dag",
                    "--graph",
                    path(&g),
                    "--pattern",
                    path(&p),
                    "--engine",
                    engine,
                    "--report",
                    "json",
                    "--check-invariants",
                ]);
                assert_eq!(
                    code(&o),
                    0,
                    "{engine} on {id}: {}",
                    String::from_utf8_lossy(&o.stderr)
                );
                json(&o)["answer"].as_bool().unwrap()
            })
            .collect();
        assert!(
            answers.iter().all(|&a| a == answers[0]),
            "instance {id}: {answers:?}"
        );
        let graph = parse_ldag(&fs::read_to_string(&g).unwrap()).unwrap();
        let pattern = parse_labels(fs::read_to_string(&p).unwrap().trim()).unwrap();
        assert_eq!(dp_match(&graph, &pattern).0, answers[0]);
    }
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 2, 5);
    let g = dir.path().join("inst-0000.ldag");
    let p = dir.path().join("inst-0000.pattern");
    let run = |seed: &str| {
        smlg(&[
            "match-dag",
            "--graph",
            path(&g),
            "--pattern",
            path(&p),
            "--engine",
            "quantum-sim",
            "--seed",
            seed,
            "--report",
            "json",
        ])
    };
    let a = run("42");
    let b = run("42");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["rng"], "chacha8");
    assert!(r.get("wall_ms").is_none());
}

#[test]
fn seed_is_read_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 1, 5);
    let o = Command::new(env!("CARGO_BIN_EXE_smlg"))
        .args([
            "match-dag",
            "--engine",
            "quantum-sim",
            "--report",
            "json",
            "--graph",
        ])
        .arg(dir.path().join("inst-0000.ldag"))
        .arg("--pattern")
        .arg(dir.path().join("inst-0000.pattern"))
        .env("SMLG_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 77);
}

#[test]
fn text_engines_report_occurrences() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t");
    let p = dir.path().join("p");
    fs::write(&t, "0110101101\n").unwrap();
    fs::write(&p, "101\n").unwrap();
    for engine in ["naive", "shift-and"] {
        let o = smlg(&[
            "match-text",
            "--text",
            path(&t),
            "--pattern",
            path(&p),
            "--engine",
            engine,
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).lines().next(), Some("yes 4 6 9"));
    }
    for seed in 0..10 {
        let o = smlg(&[
            "match-text",
            "--text",
            path(&t),
            "--pattern",
            path(&p),
            "--engine",
            "quantum-sim",
            "--seed",
            &seed.to_string(),
            "--check-invariants",
            "--report",
            "json",
        ]);
        assert_eq!(code(&o), 0);
        let r = json(&o);
        // Starts 2, 4, 7 plus the wrapped tracks 12 and 14 of the 16.
        assert_eq!(r["marked"], 5);
        for e in r["ends"].as_array().unwrap() {
            assert!([4, 6, 9].contains(&e.as_u64().unwrap()));
        }
    }
}

#[test]
fn trace_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t");
    let p = dir.path().join("p");
    fs::write(&t, "0110\n").unwrap();
    fs::write(&p, "11\n").unwrap();
    let o = smlg(&[
        "match-text",
        "--text",
        path(&t),
        "--pattern",
        path(&p),
        "--engine",
        "quantum-sim",
        "--trace",
    ]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.lines().count() > 3);
    assert!(err
        .lines()
        .all(|l| l.starts_with("op=") && l.contains(" gates=")));
    assert!(!stdout(&o).contains("op="));
}

#[test]
fn missing_file_exits_with_io_code() {
    let o = smlg(&[
        "match-dag",
        "--graph",
        "/nonexistent.ldag",
        "--pattern",
        "/nonexistent.p",
        "--engine",
        "dp",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_graph_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.ldag");
    let p = dir.path().join("p");
    fs::write(&g, "ldag 2 1 2\nnode 0 0 a\nnode 1 0 b\nedge 0 1\n").unwrap();
    fs::write(&p, "ab\n").unwrap();
    let o = smlg(&[
        "match-dag",
        "--graph",
        path(&g),
        "--pattern",
        path(&p),
        "--engine",
        "dp",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&smlg(&["match-dag", "--bogus"])), 1);
    assert_eq!(
        code(&smlg(&["bench", "--min-exp", "9", "--max-exp", "8"])),
        1
    );
    assert_eq!(code(&smlg(&["--help"])), 0);
}

#[test]
fn quantum_text_rejects_non_binary_input() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t");
    let p = dir.path().join("p");
    fs::write(&t, "abcabc\n").unwrap();
    fs::write(&p, "bc\n").unwrap();
    let o = smlg(&[
        "match-text",
        "--text",
        path(&t),
        "--pattern",
        path(&p),
        "--engine",
        "quantum-sim",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("binary"));
}

#[test]
fn generated_files_parse_and_match_manifest() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 10, 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let entries = manifest["instances"].as_array().unwrap();
    assert_eq!(entries.len(), 10);
    for e in entries {
        let g =
            parse_ldag(&fs::read_to_string(dir.path().join(e["graph"].as_str().unwrap())).unwrap())
                .unwrap();
        let p = parse_labels(
            fs::read_to_string(dir.path().join(e["pattern"].as_str().unwrap()))
                .unwrap()
                .trim(),
        )
        .unwrap();
        assert_eq!(dp_match(&g, &p).0, e["planted"].as_bool().unwrap());
    }
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen(a.path(), 6, 9);
    gen(b.path(), 6, 9);
    for name in ["manifest.json", "inst-0003.ldag", "inst-0005.pattern"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn verify_passes_on_generated_corpus() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 30, 21);
    let o = smlg(&[
        "verify",
        "--corpus",
        path(dir.path()),
        "--seed",
        "4",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("verified 30 instances, 0 failures"));
    let again = smlg(&[
        "verify",
        "--corpus",
        path(dir.path()),
        "--seed",
        "4",
        "--jobs",
        "3",
    ]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn verify_dumps_a_minimized_failure_that_still_fails() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 6, 8);
    let mpath = dir.path().join("manifest.json");
    let mut manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&mpath).unwrap()).unwrap();
    let entry = &mut manifest["instances"][1];
    let flipped = !entry["expected"].as_bool().unwrap();
    entry["expected"] = flipped.into();
    fs::write(&mpath, serde_json::to_string(&manifest).unwrap()).unwrap();

    let dump = dir.path().join("dump");
    let o = smlg(&[
        "verify",
        "--corpus",
        path(dir.path()),
        "--dump",
        path(&dump),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("FAIL 0001"));
    let original =
        parse_ldag(&fs::read_to_string(dir.path().join("inst-0001.ldag")).unwrap()).unwrap();
    let small = parse_ldag(&fs::read_to_string(dump.join("fail-0001.ldag")).unwrap()).unwrap();
    assert!(small.node_count() <= original.node_count());
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dump.join("fail-0001.json")).unwrap()).unwrap();
    assert!(record["failure"]
        .as_str()
        .unwrap()
        .contains("manifest expects"));

    let replay = smlg(&[
        "verify",
        "--corpus",
        path(&dump),
        "--dump",
        path(&dir.path().join("dump2")),
    ]);
    assert_eq!(code(&replay), 3);
}

#[test]
fn bench_rows_grow_linearly() {
    let o = smlg(&[
        "bench",
        "--min-exp",
        "6",
        "--max-exp",
        "9",
        "--report",
        "json",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        let ratio = row["ratio"].as_f64().unwrap();
        assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }
    assert!(r["fit"]["r2"].as_f64().unwrap() > 0.99);
    let again = smlg(&[
        "bench",
        "--min-exp",
        "6",
        "--max-exp",
        "9",
        "--report",
        "json",
        "--jobs",
        "1",
    ]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn bench_grover_table_grows_sublinearly() {
    let o = smlg(&[
        "bench",
        "--min-exp",
        "6",
        "--max-exp",
        "6",
        "--grover-lengths",
        "4,8,16",
        "--grover-trials",
        "300",
        "--report",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let rows = json(&o)["grover"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        assert!(row["ratio"].as_f64().unwrap() <= 1.5);
    }
}
