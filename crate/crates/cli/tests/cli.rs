use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn eoa(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eoa")).current_dir(dir).env("EOA_THREADS", "2").args(args).output().expect("binary runs")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes the dual Hamming code, OA(16,5,4,2) and the Eulerian OA(256,5,4,2).
fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    assert_eq!(code_of(&eoa(p, &["code", "hamming", "--q", "4", "--m", "2", "--dual", "--out", "dualham42.txt"])), 0);
    assert_eq!(code_of(&eoa(p, &["oa", "build", "--code", "dualham42.txt", "--out", "oa16.txt"])), 0);
    assert_eq!(code_of(&eoa(p, &["euler", "build", "--code", "dualham42.txt", "--out", "eoa256.txt"])), 0);
    dir
}

#[test]
fn code_commands() {
    let dir = setup();
    let p = dir.path();
    let text = std::fs::read_to_string(p.join("dualham42.txt")).unwrap();
    assert!(text.starts_with("CODE 4 5 2\n"));

    let out = eoa(p, &["code", "hamming", "--q", "2", "--m", "3"]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout(&out).starts_with("CODE 2 7 4\n"));
    assert!(stderr(&out).contains("[7, 4, 3, 4]"));

    std::fs::write(p.join("id.txt"), "CODE 4 2 2\n1 0\n0 1\n").unwrap();
    let out = eoa(p, &["code", "info", "--in", "id.txt"]);
    assert!(stdout(&out).contains("[2, 2, 1, 3]"), "{}", stdout(&out));

    assert_eq!(code_of(&eoa(p, &["code", "hamming", "--q", "6", "--m", "2"])), 2);
}

#[test]
fn oa_build_and_verify() {
    let dir = setup();
    let p = dir.path();
    let text = std::fs::read_to_string(p.join("oa16.txt")).unwrap();
    assert!(text.starts_with("OA 16 5 4 2 1\n"));

    let out = eoa(p, &["oa", "verify", "--in", "oa16.txt", "--t", "1"]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout(&out).contains("lambda = 4"));

    // flip one symbol of row 0
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let mut first: Vec<&str> = lines[1].split(' ').collect();
    first[0] = if first[0] == "0" { "1" } else { "0" };
    lines[1] = first.join(" ");
    std::fs::write(p.join("tampered.txt"), lines.join("\n")).unwrap();
    let out = eoa(p, &["oa", "verify", "--in", "tampered.txt", "--t", "2"]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr(&out).contains("rows [0, "), "{}", stderr(&out));

    std::fs::write(p.join("garbage.txt"), "OA 16 5\n").unwrap();
    assert_eq!(code_of(&eoa(p, &["oa", "verify", "--in", "garbage.txt"])), 2);
    assert_eq!(code_of(&eoa(p, &["oa", "verify", "--in", "missing.txt"])), 2);
}

#[test]
fn euler_build_and_verify() {
    let dir = setup();
    let p = dir.path();
    let text = std::fs::read_to_string(p.join("eoa256.txt")).unwrap();
    assert!(text.starts_with("OA 256 5 4 2 16\n"));
    assert!(text.ends_with("EULER 2 1\n"));
    let out = eoa(p, &["euler", "verify", "--in", "eoa256.txt"]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout(&out).contains("10/10"));

    // reverse the column order of every row except the first two columns
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    for line in lines.iter_mut().skip(1).take(5) {
        let mut cols: Vec<&str> = line.split(' ').collect();
        cols[2..].reverse();
        cols.swap(5, 200);
        *line = cols.join(" ");
    }
    std::fs::write(p.join("shuffled.txt"), lines.join("\n") + "\n").unwrap();
    assert_eq!(code_of(&eoa(p, &["oa", "verify", "--in", "shuffled.txt"])), 0);
    assert_eq!(code_of(&eoa(p, &["euler", "verify", "--in", "shuffled.txt"])), 1);

    let out = eoa(p, &["euler", "build", "--q", "2", "--k", "1", "--rows", "1"]);
    assert_eq!(code_of(&out), 0);
    assert_eq!(stdout(&out), "OA 4 1 2 1 2\n0 0 1 1\nEULER 1 1\n");
}

#[test]
fn schedule_export_round_trip() {
    let dir = setup();
    let p = dir.path();
    let out = eoa(p, &["schedule", "export", "--oa", "eoa256.txt", "--out", "sched.json"]);
    assert_eq!(code_of(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("sched.json")).unwrap()).unwrap();
    assert_eq!(json["N"], 256);
    assert_eq!(json["mode"], "eulerian");
    let segments = json["segments"].as_array().unwrap();
    assert_eq!(segments.len(), 256);
    assert!(segments.iter().all(|s| s["labels"].as_array().unwrap().len() == 5 && s["hamiltonians"].as_array().unwrap().len() == 5));
    assert_eq!(code_of(&eoa(p, &["schedule", "verify", "--in", "sched.json"])), 0);

    // a label that no longer matches its Hamiltonian
    let mut json = json;
    let label = &mut json["segments"][7]["labels"][0];
    *label = serde_json::json!([(label[0].as_u64().unwrap() + 1) % 2, label[1]]);
    std::fs::write(p.join("bad.json"), json.to_string()).unwrap();
    assert_eq!(code_of(&eoa(p, &["schedule", "verify", "--in", "bad.json"])), 1);
    // the plain array is not Eulerian input
    assert_ne!(code_of(&eoa(p, &["schedule", "export", "--oa", "oa16.txt"])), 0);
}

#[test]
fn sim_exit_codes_follow_residuals() {
    let dir = setup();
    let p = dir.path();
    let args = ["sim", "eulerian", "--oa", "eoa256.txt", "--n", "5", "--t", "2", "--seed", "7", "--denv", "2", "--out", "rep.json"];
    let out = eoa(p, &args);
    assert_eq!(code_of(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("rep.json")).unwrap()).unwrap();
    assert!(report["report"]["residual_norm"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["passed"], true);

    let out = eoa(p, &["sim", "bangbang", "--oa", "oa16.txt", "--n", "5", "--t", "3", "--seed", "7"]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr(&out).contains("below the drift arity"));

    let out = eoa(p, &["sim", "bangbang", "--oa", "oa16.txt", "--t", "2", "--seed", "7", "--denv", "2"]);
    assert_eq!(code_of(&out), 0, "{}", stderr(&out));

    assert_eq!(code_of(&eoa(p, &["sim", "eulerian", "--oa", "oa16.txt"])), 1);
    assert_eq!(code_of(&eoa(p, &["sim", "eulerian", "--oa", "eoa256.txt", "--n", "9"])), 2);
}

#[test]
fn sweep_reports_quadratic_convergence() {
    let dir = TempDir::new().unwrap();
    let out = eoa(dir.path(), &["sim", "eulerian", "--n", "2", "--denv", "2", "--seed", "3", "--sweep-tc", "3"]);
    assert_eq!(code_of(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let slope = report["sweep"]["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() <= 0.3, "{slope}");
    assert_eq!(report["sweep"]["points"].as_array().unwrap().len(), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = setup();
    let p = dir.path();
    let a = eoa(p, &["sim", "eulerian", "--oa", "eoa256.txt", "--seed", "11", "--denv", "2"]);
    let b = Command::new(env!("CARGO_BIN_EXE_eoa"))
        .current_dir(p)
        .env("EOA_THREADS", "1")
        .args(["sim", "eulerian", "--oa", "eoa256.txt", "--seed", "11", "--denv", "2"])
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let first = std::fs::read(p.join("eoa256.txt")).unwrap();
    assert_eq!(code_of(&eoa(p, &["euler", "build", "--code", "dualham42.txt", "--out", "again.txt"])), 0);
    assert_eq!(first, std::fs::read(p.join("again.txt")).unwrap());
}
