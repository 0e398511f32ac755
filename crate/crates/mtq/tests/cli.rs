use std::path::Path;
use std::process::{Command, Output};

fn mtq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtq"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn unknown_key_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "seed=1\nrowz=4\n").unwrap();
    let o = mtq(
        dir.path(),
        &[
            "experiment",
            "--config",
            "bad.cfg",
            "--out",
            "r.csv",
            "-s",
            "state_out=s.txt",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`rowz`"), "{}", stderr(&o));
    assert_eq!(files_in(dir.path()), vec!["bad.cfg"]);
}

#[test]
fn invalid_value_exits_2_naming_key() {
    let dir = tempfile::tempdir().unwrap();
    for (pair, key) in [
        ("tau_bare=-1", "tau_bare"),
        ("max_domain_size=40", "max_domain_size"),
        ("measure=0,x", "measure"),
        ("steps=many", "steps"),
    ] {
        let o = mtq(dir.path(), &["state", "--out", "r.json", "-s", pair]);
        assert_eq!(o.status.code(), Some(2), "{pair}");
        assert!(
            stderr(&o).contains(&format!("`{key}`")),
            "{pair}: {}",
            stderr(&o)
        );
    }
    let o = mtq(dir.path(), &["state", "--seed", "abc", "--out", "r.json"]);
    assert!(stderr(&o).contains("`seed`"));
    // runtime range checks also reject before writing
    let o = mtq(
        dir.path(),
        &[
            "state",
            "--out",
            "r.json",
            "-s",
            "measure=3",
            "-s",
            "state_out=s.txt",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(files_in(dir.path()).is_empty());
}

#[test]
fn malformed_input_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.txt"), "n=2\n0 1 0\n9 1 0\n").unwrap();
    let o = mtq(dir.path(), &["entangle", "s.txt", "--out", "r.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s.txt:3"), "{}", stderr(&o));
    let o = mtq(dir.path(), &["lattice", "missing.txt", "--out", "r.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`pattern_file`"));
    assert_eq!(files_in(dir.path()), vec!["s.txt"]);
}

#[test]
fn norm_drift_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtq(
        dir.path(),
        &[
            "state",
            "--out",
            "r.json",
            "-s",
            "preset=bell",
            "-s",
            "delta=1.7e308",
            "-s",
            "coupling=1.7e308",
            "-s",
            "epsilon=1.7e308",
            "-s",
            "steps=2",
            "-s",
            "dt=1e-300",
        ],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("norm drift"));
    assert!(files_in(dir.path()).is_empty());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "runs=2\nnum_flies=10\nseed=3\n").unwrap();
    let o = mtq(
        dir.path(),
        &["experiment", "--config", "run.cfg", "-s", "runs=4"],
    );
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "run,trained,untrained,total,pi");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(3) == Some("10")));
    let other_seed = mtq(
        dir.path(),
        &[
            "experiment",
            "--config",
            "run.cfg",
            "-s",
            "runs=4",
            "--seed",
            "4",
        ],
    );
    assert_ne!(other_seed.stdout, text.as_bytes());
}

#[test]
fn state_file_round_trips_through_entangle() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtq(
        dir.path(),
        &[
            "state",
            "-s",
            "preset=zeta",
            "-s",
            "state_out=z.txt",
            "--out",
            "r.json",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("z.txt")).unwrap();
    assert!(text.starts_with("n=2\n"));
    assert_eq!(text.lines().count(), 4);
    let o = mtq(dir.path(), &["entangle", "z.txt"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["split"]["left"], serde_json::json!([0]));
    assert_eq!(report["factorizable"], false);
    assert!((report["entropy_bits"].as_f64().unwrap() - 0.550).abs() < 1e-3);
}

#[test]
fn entangle_emits_one_object_per_split() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtq(
        dir.path(),
        &["entangle", "-s", "preset=ghz", "-s", "qubits=4"],
    );
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for field in ["split", "coefficients", "entropy_bits", "factorizable"] {
            assert!(v.get(field).is_some(), "{field}");
        }
        assert!((v["entropy_bits"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn scan_csv_has_declared_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtq(dir.path(), &["decohere", "-s", "protection_factor=1.5e9"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("tau_eff_seconds,dyn_timescale_seconds,survival,verdict")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].ends_with(",0.0,decoherent"));
    assert!(rows[2].ends_with(",coherent"));
}

#[test]
fn lattice_dump_reads_pattern_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut pattern = String::from("pf=13 rows=2 seam=3\n");
    // isolate (0,0): its neighbors are (0,1) and (1,0)
    pattern.push_str("bind 0 0 0 1\nbind 0 0 1 0\n");
    std::fs::write(dir.path().join("p.txt"), pattern).unwrap();
    let o = mtq(
        dir.path(),
        &["lattice", "p.txt", "-s", "max_domain_size=26"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["geometry"]["sites"], 26);
    assert_eq!(v["bound_edges"], 2);
    assert_eq!(v["adjacency"].as_array().unwrap().len(), 26);
    assert_eq!(
        v["adjacency"][0]["neighbors"],
        serde_json::json!([[0, 1], [1, 0]])
    );
    let domains = v["domains"].as_array().unwrap();
    assert_eq!(domains.len(), 2);
    assert_eq!(domains[0], serde_json::json!([[0, 0]]));
}

#[test]
fn demo_epr_csv_shows_only_anticorrelation() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["0", "1", "99"] {
        let o = mtq(dir.path(), &["demo-epr", "--format", "csv", "--seed", seed]);
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("\n00,-1,-1,0\n"), "{text}");
        assert!(text.contains("\n11,1,1,0\n"), "{text}");
    }
}

#[test]
fn recall_traces_cover_shared_neurons() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtq(
        dir.path(),
        &[
            "recall",
            "-s",
            "rows=2",
            "-s",
            "neurons=6",
            "-s",
            "shared=3",
            "-s",
            "threshold=0",
            "-s",
            "prepare=uniform",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let ids: Vec<u64> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["neuron"]
                .as_u64()
                .unwrap()
        })
        .collect();
    assert_eq!(ids, vec![0, 1, 2]);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pattern"].as_str().unwrap().len(), 26);
        assert_eq!(v["distance"], 0.0);
    }
}
