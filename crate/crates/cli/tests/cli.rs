use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qlstm_core::bench::{MetricsRecord, RunStatus};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlstm-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL_CLASSICAL: &str = "
task = \"sine\"
model = \"classical_lstm\"
seed = 4
hidden_dim = 3
iterations = 40
learning_rate = 0.3
memory_delays = [1, 2]
sweep_hidden = [1, 2]
sweep_lengths = [4, 8]
";

#[test]
fn selftest_passes() {
    let out = bench(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn generate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = bench(&[
            "generate",
            "--task",
            "delayed_echo",
            "--seed",
            "9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert!(String::from_utf8(bytes)
        .unwrap()
        .starts_with("seq_id,t,x0,y0"));
}

#[test]
fn invalid_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(
        code(&bench(&[
            "generate",
            "--task",
            "speech",
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap()
        ])),
        1
    );
    assert_eq!(
        code(&bench(&["run", "--config", "/nonexistent/config.toml"])),
        1
    );
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "task = \"sine\"\nmodel = \"qlstm\"\n",
    );
    assert_eq!(code(&bench(&["run", "--config", &cfg])), 1);
    assert_eq!(code(&bench(&["frobnicate"])), 1);
    assert_eq!(code(&bench(&[])), 1);
}

#[test]
fn run_twice_is_reproducible_and_compares() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL_CLASSICAL);
    let paths: Vec<String> = ["r1.json", "r2.json"]
        .iter()
        .map(|n| dir.path().join(n).to_str().unwrap().to_owned())
        .collect();
    for p in &paths {
        let out = bench(&["run", "--config", &cfg, "--out", p]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |p: &str| MetricsRecord::read_json(fs::File::open(p).unwrap()).unwrap();
    let (r1, r2) = (read(&paths[0]), read(&paths[1]));
    assert_eq!(r1.status, RunStatus::Completed);
    assert_eq!(r1.without_timing(), r2.without_timing());

    let csv = dir.path().join("cmp.csv");
    let out = bench(&[
        "compare",
        "--in",
        &paths[0],
        &paths[1],
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,metric,value,paper_predicted");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[1..5], lines[5..9]);
    assert!(lines[1].starts_with("classical_lstm,accuracy,") && lines[1].ends_with(",0.8"));
}

#[test]
fn compare_rejects_mixed_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let sine = write_config(dir.path(), "s.toml", SMALL_CLASSICAL);
    let walk = write_config(
        dir.path(),
        "w.toml",
        &SMALL_CLASSICAL.replace("\"sine\"", "\"random_walk\""),
    );
    let mut records = Vec::new();
    for (cfg, name) in [(&sine, "s.json"), (&walk, "w.json")] {
        let p = dir.path().join(name).to_str().unwrap().to_owned();
        assert_eq!(code(&bench(&["run", "--config", cfg, "--out", &p])), 0);
        records.push(p);
    }
    let csv = dir.path().join("cmp.csv");
    let out = bench(&[
        "compare",
        "--in",
        &records[0],
        &records[1],
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(
        code(&bench(&[
            "compare",
            "--in",
            &records[0],
            "--out",
            csv.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn divergence_exits_two_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_CLASSICAL.replace("learning_rate = 0.3", "learning_rate = 1e200");
    let cfg = write_config(dir.path(), "d.toml", &body);
    let p = dir.path().join("d.json");
    let out = bench(&["run", "--config", &cfg, "--out", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    let r = MetricsRecord::read_json(fs::File::open(&p).unwrap()).unwrap();
    assert!(matches!(r.status, RunStatus::Diverged { ref stage, .. } if stage == "train"));
}
