use std::path::Path;
use std::process::{Command, Output};

use latinapprox::{LatinSquare, WTensor};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latinapprox"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn approximate_torus_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["approximate", "--group", "torus:1", "--cells", "8", "--t", "2", "--out", "run.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("run.json"));
    let err = v["report"]["max_product_error"].as_f64().unwrap();
    assert!(err <= 0.375, "{err}");
    assert_eq!(v["report"]["t"], 2);
    assert_eq!(v["map"]["table"].as_array().unwrap().len(), 16);
    assert!(String::from_utf8_lossy(&out.stdout).contains("max product error"));
}

#[test]
fn approximate_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["loop", "--group", "cyclic:5", "--cells", "5", "--out", "sq.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let sq = LatinSquare::from_csv(&std::fs::read_to_string(dir.path().join("sq.csv")).unwrap()).unwrap();
    assert_eq!(sq.order(), 5);
    assert!((0..5).any(|q| sq.is_unit(q)));
    assert_eq!(sq.to_csv(), std::fs::read_to_string(dir.path().join("sq.csv")).unwrap());
}

#[test]
fn affine_probe_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["probe", "--group", "affine", "--cells", "9", "--samples", "1000000", "--seed", "7", "--out", "p.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let v = read_json(&dir.path().join("p.json"));
    assert_eq!(v["exceeds_noise"], true);
    assert!(v["disparity"].as_f64().unwrap() > 4.0 * v["noise"].as_f64().unwrap());
}

#[test]
fn torus_probe_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["probe", "--group", "torus:1", "--cells", "8", "--samples", "200000", "--seed", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn realize_single_block() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.json"), r#"{"n":1,"t":2,"entries":[2]}"#).unwrap();
    let out = run(&["realize", "--amalgam", "m.json", "--out", "L.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let sq = LatinSquare::from_csv(&std::fs::read_to_string(dir.path().join("L.csv")).unwrap()).unwrap();
    assert_eq!(sq.order(), 2);
    assert!(sq.is_latin());
}

#[test]
fn complete_embeds_partial() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.csv"), "0,-1,2\n-1,-1,-1\n1,-1,-1\n").unwrap();
    let out = run(&["complete", "--partial", "p.csv", "--out", "full.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let sq = LatinSquare::from_csv(&std::fs::read_to_string(dir.path().join("full.csv")).unwrap()).unwrap();
    assert_eq!(sq.order(), 6);
    assert_eq!((sq.get(0, 0), sq.get(0, 2), sq.get(2, 0)), (0, 2, 1));
}

#[test]
fn tensor_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["tensor", "--group", "torus:1", "--cells", "4", "--out", "w.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&dir.path().join("w.json"));
    let w = WTensor::<latinapprox::Rational>::from_json(&v).unwrap();
    assert_eq!(w.n, 4);
    assert_eq!(w.to_json(), v);
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &'static str| {
        vec!["tensor", "--group", "torus:1", "--cells", "4", "--samples", "100000", "--seed", "11", "--out", name]
    };
    assert_eq!(run(&args("a.json"), dir.path()).status.code(), Some(0));
    let out = bin()
        .args(args("b.json"))
        .env("LATINAPPROX_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"command": "approximate", "group": "torus:1", "cells": 4, "out": "from_config.json"}"#,
    )
    .unwrap();
    let out = run(&["--config", "run.json", "approximate", "--cells", "8"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("from_config.json"));
    assert_eq!(v["report"]["n_cells"], 8);

    let out = run(&["--config", "run.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&dir.path().join("from_config.json"))["report"]["n_cells"], 4);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"group\": \"torus:1\",\n  \"cellz\": 4\n}").unwrap();
    let out = run(&["--config", "bad.json", "approximate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cellz") && err.contains("line 3"), "{err}");

    let out = run(&["probe", "--group", "affine", "--cells", "9", "--samples", "10"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let out = run(&["approximate", "--group", "torus:1", "--cells", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_group_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["approximate", "--group", "klein", "--cells", "4"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
