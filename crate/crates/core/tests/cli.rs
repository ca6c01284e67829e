use std::path::Path;
use std::process::{Command, Output};

use ptbound::bell::{chsh, BellBox};
use ptbound::qmat::{CMatrix, SystemLayout};
use ptbound::states::max_entangled;
use serde_json::Value;

fn ptbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptbound")).args(args).output().expect("binary runs")
}

fn ptbound_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptbound"))
        .args(args)
        .env(key, val)
        .output()
        .expect("binary runs")
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, v: &T) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn seesaw_on_phi_plus_and_product() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_json(dir.path(), "chsh.json", &chsh());
    let phi = write_json(dir.path(), "phi.json", &max_entangled(2).unwrap().to_json());
    let out = ptbound(&["seesaw", &phi, &f, "--restarts", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out)["value"].as_f64().unwrap();
    assert!(v >= 2.0 * 2f64.sqrt() - 1e-4, "{v}");

    let product = CMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0])
        .with_layout(SystemLayout::bipartite(2, 2).unwrap())
        .unwrap();
    let prod = write_json(dir.path(), "prod.json", &product.to_json());
    let v = stdout_json(&ptbound(&["seesaw", &prod, &f]))["value"].as_f64().unwrap();
    assert!(v <= 2.0 + 1e-9, "{v}");
}

#[test]
fn corrupted_input_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_json(dir.path(), "chsh.json", &chsh());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\": [2, 2], \"data\": [[1.0").unwrap();
    let out = ptbound(&["seesaw", bad.to_str().unwrap(), &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn nonlocality_of_vertex_and_invalid_box() {
    let dir = tempfile::tempdir().unwrap();
    let vertex = write_json(dir.path(), "v.json", &BellBox::deterministic(2, 2, &[1, 0], &[0, 1]));
    let out = ptbound(&["nonlocality", &vertex]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["value"].as_f64().unwrap().abs() < 1e-9);

    let mut bad = BellBox::deterministic(2, 2, &[0, 0], &[0, 0]);
    bad.p[0] = 0.5;
    let bad = write_json(dir.path(), "bad.json", &bad);
    assert_eq!(ptbound(&["nonlocality", &bad]).status.code(), Some(2));
}

#[test]
fn repro_eq10_csv_and_eq13_zero() {
    let out = ptbound(&["repro", "eq10", "--ds", "4", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let rec = rows.records().next().unwrap().unwrap();
    let rhs: f64 = rec[2].parse().unwrap();
    assert!((rhs - (2.0 + 2.0 * 2f64.sqrt() * 0.5)).abs() < 1e-12);
    assert!(rec[0].contains("PPT=ok"));
    assert_eq!(&rec[4], "true");

    let out = ptbound(&["repro", "eq13", "--eps", "0", "--d", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["reports"][0]["rhs"].as_f64(), Some(0.0));
}

#[test]
fn dimension_cap_and_bad_flags() {
    let out = ptbound_env(&["repro", "eq10", "--ds", "9"], "PTBOUND_DIM_CAP", "64");
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(ptbound(&["repro", "eq8", "--restarts", "0"]).status.code(), Some(2));
    assert_eq!(ptbound(&["repro", "eq99"]).status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let a = ptbound(&["repro", "eq8", "--d", "2", "--restarts", "8", "--output", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let b = ptbound(&["repro", "eq8", "--d", "2", "--restarts", "8"]);
    assert_eq!(std::fs::read(&path).unwrap(), b.stdout);
}
