use csw_core::derivation::DerivationVerdict;
use serde_json::Value;
use std::process::{Command, Output};

fn csw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csw")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn kms_on_a_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("L2_union_L3.graph");
    std::fs::write(&path, "vertex v\nvertex w\nedge a v v\nedge b v v\nedge c w w\nedge d w w\nedge e w w\n").unwrap();
    let o = csw(&["kms", "compute", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["result"]["rho"], "3");
    assert_eq!(r["result"]["faithful"], false);
    assert_eq!(r["config"]["command"]["kms"]["compute"]["level"], 1);
}

#[test]
fn f_gamma_diagonal() {
    let o = csw(&["tau", "fmatrix", "L2+L3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["diagonal"], "2,2,3,3,3");
}

#[test]
fn derive_check_exit_codes_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("upplus2.json");
    let path = path.to_str().unwrap();
    assert_eq!(csw(&["presentation", "emit", "u_plus(2)", "--out", path]).status.code(), Some(0));
    let o = csw(&["derive", "check", path, "q11*q12"]);
    assert_eq!(o.status.code(), Some(2));
    let o = csw(&["derive", "check", path, "q11 q11^* + q12 q12^* - 1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    let keys: Vec<&String> = r["result"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["certificate", "degree", "status"]);
    let v: DerivationVerdict = serde_json::from_value(r["result"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&v).unwrap(), r["result"]);
    assert_eq!(csw(&["derive", "check", path, "q11 +"]).status.code(), Some(3));
}

#[test]
fn theorem_replays() {
    let o = csw(&["theorem", "replay", "thm41", "--params", "2,2", "--degree", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["result"]["bound"], 8);
    assert!(r["result"]["degree"].as_u64().unwrap() <= 8);
    let o = csw(&["theorem", "replay", "thm31", "--params", "2,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["result"]["failing_step"], 3);
    assert_eq!(csw(&["theorem", "replay", "thm99"]).status.code(), Some(3));
}

#[test]
fn text_mode_prints_one_line_per_check() {
    let o = csw(&["--format", "text", "verify", "hom", "s_plus(3)", "s_plus(3)", "identity", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let relations = csw_core::presentations::s_plus(3).relations.len();
    assert_eq!(text.lines().filter(|l| l.starts_with("pass")).count(), relations);
    assert_eq!(text.lines().last(), Some("outcome: success"));
}

#[test]
fn output_does_not_depend_on_threads() {
    let args = ["verify", "state", "wreath(2,2)", "wreath(u_plus(2),2)", "--state", "oplus", "--level", "2"];
    let one = csw(&[&["--threads", "1"][..], &args[..]].concat());
    let four = csw(&[&["--threads", "4"][..], &args[..]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn coproduct_negative_control_is_not_a_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.json");
    std::fs::write(&path, r#"{"images": {"q11": "q11", "q12": "0", "q21": "0", "q22": "0"}}"#).unwrap();
    let o = csw(&["verify", "coproduct", "u_plus(2)", "u_plus(2)", path.to_str().unwrap(), "--degree", "4"]);
    assert_ne!(o.status.code(), Some(0));
    assert_ne!(json(&o)["outcome"], "success");
}

#[test]
fn separation_witness() {
    let o = csw(&["separate", "sh_inf(2)", "h_inf(2)", "--dim-budget", "2", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["result"]["satisfies_first"], true);
    assert_eq!(r["result"]["witness"]["representation"]["dim"], 2);
    let again = csw(&["separate", "sh_inf(2)", "h_inf(2)", "--dim-budget", "2", "--seed", "0"]);
    assert_eq!(o.stdout, again.stdout);
    assert_eq!(csw(&["separate", "u_plus(2)", "u_plus(2)", "--dim-budget", "1"]).status.code(), Some(2));
}

#[test]
fn unknown_references_are_input_errors() {
    assert_eq!(csw(&["graph", "show", "nonsense"]).status.code(), Some(3));
    assert_eq!(csw(&["presentation", "emit", "u_plus(x)"]).status.code(), Some(3));
}
