use std::path::Path;
use std::process::{Command, Output};

fn kleinian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinian"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn render_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (name, workers) in [("a.ppm", "1"), ("b.ppm", "1"), ("c.ppm", "4")] {
        let out = path(dir.path(), name);
        let status = kleinian(&[
            "render",
            "--depth",
            "6",
            "--size",
            "160x120",
            "--tone",
            "log",
            "--workers",
            workers,
            "--out",
            &out,
        ]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        files.push(std::fs::read(out).unwrap());
    }
    assert!(files[0].starts_with(b"P6\n160 120\n255\n"));
    assert_eq!(files[0].len(), "P6\n160 120\n255\n".len() + 160 * 120 * 3);
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

fn read_stats(file: &str) -> std::collections::HashMap<String, String> {
    std::fs::read_to_string(file)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

#[test]
fn stats_file_reconciles_with_node_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (mode, per_seed) in [("limit", 4u64.pow(5)), ("tiling", (4u64.pow(6) - 4) / 3)] {
        let stats = path(dir.path(), &format!("{mode}.txt"));
        let out = path(dir.path(), "x.ppm");
        let run = kleinian(&[
            "render", "--depth", "5", "--mode", mode, "--size", "64x48", "--out", &out, "--stats",
            &stats,
        ]);
        assert!(run.status.success());
        let s = read_stats(&stats);
        let seeds: u64 = s["seeds"].parse().unwrap();
        assert_eq!(s["nodes_per_seed"].parse::<u64>().unwrap(), per_seed);
        assert_eq!(s["words_tested"].parse::<u64>().unwrap(), seeds * per_seed);
        let tested: u64 = s["words_tested"].parse().unwrap();
        let accepted: u64 = s["words_accepted"].parse().unwrap();
        let rejected: u64 = s["words_rejected"].parse().unwrap();
        assert_eq!(tested, accepted + rejected);
    }
}

#[test]
fn dictionary_render_matches_index_render() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "index.ppm");
    let b = path(dir.path(), "dict.ppm");
    for (algo, out) in [("index", &a), ("dictionary", &b)] {
        let run = kleinian(&[
            "render", "--depth", "5", "--mode", "tiling", "--algo", algo, "--size", "120x90",
            "--out", out,
        ]);
        assert!(run.status.success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn random_render_needs_steps_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "r.ppm");
    let run = kleinian(&["render", "--algo", "random", "--out", &out]);
    assert_eq!(run.status.code(), Some(2));

    let mut bytes = Vec::new();
    for _ in 0..2 {
        let run = kleinian(&[
            "render",
            "--algo",
            "random",
            "--steps",
            "20000",
            "--rng-seed",
            "9",
            "--size",
            "100x80",
            "--out",
            &out,
        ]);
        assert!(run.status.success());
        bytes.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["render"],
        vec!["render", "--out", "x.ppm", "--bogus"],
        vec!["render", "--out", "x.ppm", "--mu", "abc"],
        vec!["frobnicate"],
    ] {
        assert_eq!(kleinian(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "k.ppm");
    let run = kleinian(&["render", "--group", "klein_four", "--out", &out]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("no Möbius generators"));

    let run = kleinian(&["render", "--depth", "3", "--out", "/nonexistent-dir/x.ppm"]);
    assert_eq!(run.status.code(), Some(1));

    let run = kleinian(&["render", "--group", "modular", "--out", &out]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("once_punctured_torus"));
}

#[test]
fn benchmark_emits_table_and_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = path(dir.path(), "bench.tsv");
    let run = kleinian(&["benchmark", "--depth", "8", "--stats", &tsv]);
    assert!(run.status.success());
    let table = String::from_utf8(run.stdout).unwrap();
    assert!(table.lines().next().unwrap().starts_with("algorithm"));
    let rows: Vec<Vec<String>> = std::fs::read_to_string(&tsv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_owned).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][..4], ["index", "8", "8748", "8"]);
    assert_eq!(&rows[1][..3], ["dictionary", "8", "8748"]);
    assert!(rows[1][3].parse::<u64>().unwrap() >= 8748 * 8);
}

#[test]
fn enumerate_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = path(dir.path(), "klein.txt");
    std::fs::write(&spec, "3\na b ab\n0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\n").unwrap();
    let out = path(dir.path(), "words.txt");
    let run = kleinian(&[
        "enumerate",
        "--spec-file",
        &spec,
        "--depth",
        "3",
        "--out",
        &out,
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    // three choices for the first letter, then anything but the current element
    assert_eq!(text.lines().count(), 12);
    assert!(text
        .lines()
        .all(|l| l.split('\t').next().unwrap().len() == 3));

    let run = kleinian(&[
        "enumerate",
        "--spec-file",
        &spec,
        "--depth",
        "2",
        "--algo",
        "dictionary",
    ]);
    let listed = String::from_utf8(run.stdout).unwrap();
    assert_eq!(listed.lines().count(), 6);
    assert!(listed.lines().any(|l| l == "13\t(a)(ab)"));

    let index = kleinian(&["enumerate", "--depth", "5", "--mode", "tiling"]).stdout;
    let dictionary = kleinian(&[
        "enumerate",
        "--depth",
        "5",
        "--mode",
        "tiling",
        "--algo",
        "dictionary",
    ])
    .stdout;
    assert_eq!(index, dictionary);
}

#[test]
fn invalid_spec_file_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = path(dir.path(), "bad.txt");
    std::fs::write(&spec, "2\na A\n0 2 1\n1 1 0\n2 0 2\n").unwrap();
    let run = kleinian(&["enumerate", "--spec-file", &spec]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("(0,1)"));
}
