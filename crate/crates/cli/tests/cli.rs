use std::path::PathBuf;
use std::process::{Command, Output};

use linsem_core::numerics::{matrix_to_text, sample_params};
use linsem_core::parametrization::phi_numeric;
use linsem_core::MixedGraph;
use serde_json::Value;

fn graph(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "graphs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn linsem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linsem")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = linsem(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn validate_reports_properties() {
    let v = json(&["validate", &graph("verma.graph")]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["acyclic"], true);
    assert_eq!(v["result"]["simple"], true);
    assert_eq!(v["result"]["sinks"], serde_json::json!(["4"]));
    let c = json(&["validate", &graph("cycle3.graph")]);
    assert_eq!(c["result"]["acyclic"], false);
}

#[test]
fn parametrize_entry_is_the_trek_sum() {
    let o = linsem(&["parametrize", &graph("verma.graph"), "--entry", "2,4"]);
    assert!(o.status.success());
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert_eq!(last, "l12*l13*l34*w11 + l12^2*l23*l34*w11 + l23*l34*w22 + w24");
}

#[test]
fn parametrize_full_table() {
    let v = json(&["parametrize", &graph("iv.graph")]);
    assert_eq!(v["result"]["entries"].as_array().unwrap().len(), 6);
    let cyc = json(&["parametrize", &graph("cyclic.graph"), "--entry", "2,4"]);
    assert!(cyc["result"]["value"].as_str().unwrap().contains("l23*l34*l42"));
}

#[test]
fn treks_lists_each_trek() {
    let v = json(&["treks", &graph("verma.graph"), "--i", "2", "--j", "4"]);
    assert_eq!(v["result"]["treks"].as_array().unwrap().len(), 4);
    let o = linsem(&["treks", &graph("cycle3.graph"), "--i", "1", "--j", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let bounded = json(&["treks", &graph("cycle3.graph"), "--i", "1", "--j", "2", "--max-edges", "4"]);
    assert!(!bounded["result"]["treks"].as_array().unwrap().is_empty());
}

#[test]
fn dsep_pair_and_listing() {
    let v = json(&["dsep", &graph("diamond.graph"), "--i", "2", "--j", "3", "--given", "1"]);
    assert_eq!(v["result"]["separated"], true);
    let o = linsem(&["dsep", &graph("diamond.graph"), "--i", "2", "--j", "3", "--fail-on-negative"]);
    assert_eq!(o.status.code(), Some(2));
    let all = json(&["dsep", &graph("diamond.graph")]);
    let stmts: Vec<&str> = all["result"]["statements"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(stmts.contains(&"2 _||_ 3 | {1}"));
    assert!(stmts.contains(&"1 _||_ 4 | {2,3}"));
}

#[test]
fn treksep_two_instruments() {
    let o = linsem(&["treksep", &graph("twoivs.graph"), "--rows", "1,2", "--cols", "3,4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("rank 1\n"));
    assert!(out.contains("cut (∅,{3})"));
    let v = json(&["treksep", &graph("twoivs.graph"), "--rows", "1,2", "--cols", "3,4"]);
    assert_eq!(v["result"]["rank"], 1);
    assert_eq!(v["result"]["s_c"], serde_json::json!(["3"]));
}

#[test]
fn decompose_tian_graph() {
    let v = json(&["decompose", &graph("tian.graph")]);
    let blocks = &v["result"]["blocks"];
    assert_eq!(blocks, &serde_json::json!([["1", "4"], ["2", "3", "5"]]));
    assert_eq!(v["result"]["edge_partition_ok"], true);
}

#[test]
fn identify_verma_with_components() {
    let v = json(&["identify", &graph("verma.graph")]);
    let r = &v["result"];
    assert_eq!(r["status"], "globally-identifiable");
    assert!(r["components"].as_array().unwrap().len() >= 2);
    assert!(r["edges"].as_array().unwrap().iter().all(|e| e["identified"] == true));
}

#[test]
fn identify_negative_verdict_exit_code() {
    let o = linsem(&["identify", &graph("bow.graph")]);
    assert_eq!(o.status.code(), Some(0));
    let o = linsem(&["identify", &graph("bow.graph"), "--fail-on-negative"]);
    assert_eq!(o.status.code(), Some(2));
    let o = linsem(&["identify", &graph("iv.graph"), "--fail-on-negative"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn recover_from_sigma_file() {
    let g = MixedGraph::parse(&std::fs::read_to_string(graph("iv.graph")).unwrap()).unwrap();
    let p = sample_params(&g, 3, 1.0);
    let s = phi_numeric(&g, &p).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sigma.txt");
    std::fs::write(&path, matrix_to_text(&s)).unwrap();
    let v = json(&["recover", &graph("iv.graph"), "--sigma", path.to_str().unwrap()]);
    let l23 = v["result"]["lambda"]["data"][1][2].as_f64().unwrap();
    assert!((l23 - p.lambda[(1, 2)]).abs() < 1e-10);
    assert!((l23 - s[(0, 2)] / s[(0, 1)]).abs() < 1e-10);
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn recover_rejects_uncertified_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sigma.txt");
    std::fs::write(&path, "matrix 2 2\n2 1\n1 2\n").unwrap();
    let o = linsem(&["recover", &graph("bow.graph"), "--sigma", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn degree_of_three_cycle() {
    let v = json(&["degree", &graph("cycle3.graph"), "--trials", "3", "--starts", "100", "--seed", "1"]);
    assert_eq!(v["result"]["modal"], 2);
    assert_eq!(v["config"]["seed"], 1);
}

#[test]
fn constraints_of_diamond() {
    let v = json(&["constraints", &graph("diamond.graph")]);
    let cs = v["result"]["constraints"].as_array().unwrap();
    assert_eq!(cs.len(), 2);
    assert!(cs.iter().all(|c| c["certification"]["certified"] == true));
}

#[test]
fn emit_cas_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("diamond.m2");
    let o = linsem(&[
        "emit-cas",
        &graph("diamond.graph"),
        "--task",
        "vanishing-ideal",
        "--dialect",
        "b",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("MonomialOrder => Eliminate 4"));
    let o = linsem(&["emit-cas", &graph("cycle3.graph"), "--task", "identifiability"]);
    assert!(stdout(&o).contains("sat(ideal(W[1,2],W[1,3],W[2,3]), det(L))"));
}

#[test]
fn export_dot_colors_edges() {
    let o = linsem(&["export-dot", &graph("iv.graph")]);
    let out = stdout(&o);
    assert!(out.starts_with("digraph G {"));
    assert!(out.contains("\"1\" -> \"2\" [color=blue];"));
    assert!(out.contains("\"2\" -> \"3\" [color=red, dir=both];"));
}

#[test]
fn config_file_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 11, "degree_trials": 2}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&["degree", &graph("diamond.graph"), "--config", c, "--starts", "20"]);
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["result"]["trials"], 2);
    let w = json(&["degree", &graph("diamond.graph"), "--config", c, "--seed", "5", "--starts", "20"]);
    assert_eq!(w["config"]["seed"], 5);
}

#[test]
fn json_is_deterministic_across_threads() {
    let g = graph("cycle3.graph");
    let run = |t: &str| stdout(&linsem(&["degree", &g, "--trials", "4", "--starts", "60", "--threads", t, "--json"]));
    assert_eq!(run("1"), run("3"));
    let c = |t: &str| stdout(&linsem(&["constraints", &graph("verma.graph"), "--threads", t, "--json"]));
    assert_eq!(c("1"), c("2"));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "nodes: 1 2\n1 -> 3\n").unwrap();
    let o = linsem(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = linsem(&["validate", "/nonexistent/file.graph"]);
    assert_eq!(o.status.code(), Some(1));
    let o = linsem(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}
