use std::process::{Command, Output};

use khcable::homology::BettiTable;

fn khcable(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khcable")).args(args).env_remove("KHCABLE_CACHE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table(o: &Output) -> BettiTable {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn unknot_table() {
    let t = table(&khcable(&["compute", "--braid", "", "--out", "json"]));
    assert_eq!(t.entries().len(), 2);
    assert_eq!(t.get(0, -1), 1);
    assert_eq!(t.get(0, 1), 1);
}

#[test]
fn torus_top_degree_support() {
    let t = table(&khcable(&["torus", "3", "3", "--out", "json"]));
    assert!(t.get(4, 13) > 0);
    assert_eq!(t.max_degree(), Some(4));
}

#[test]
fn json_round_trips() {
    let o = khcable(&["compute", "--braid", "1 -2 1 -2", "--out", "json"]);
    let t = table(&o);
    assert_eq!(serde_json::to_string_pretty(&t).unwrap() + "\n", stdout(&o));
}

#[test]
fn pd_file_and_window() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hopf.json");
    std::fs::write(&path, r#"[{"edges":[0,2,1,3],"sign":1},{"edges":[2,0,3,1],"sign":1}]"#).unwrap();
    let full = table(&khcable(&["compute", "--pd", path.to_str().unwrap(), "--out", "json"]));
    assert_eq!(full.total_dim(), 4);
    assert_eq!(full.get(2, 6), 1);
    let top = table(&khcable(&["compute", "--pd", path.to_str().unwrap(), "--window", "2:2", "--out", "json"]));
    assert_eq!(top.window(), Some((2, 2)));
    assert_eq!(top.get(2, 6), 1);
    assert_eq!(top.get(0, 0), 0);
}

#[test]
fn cache_hits_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["torus", "2", "5", "--out", "json", "--cache", cache];
    let fresh = khcable(&args);
    let files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    assert_eq!(files.len(), 1);
    assert_eq!(files[0].len(), 64 + 5);
    let hit = khcable(&args);
    assert!(hit.status.success());
    assert_eq!(fresh.stdout, hit.stdout);
    let uncached = khcable(&["torus", "2", "5", "--out", "json"]);
    assert_eq!(fresh.stdout, uncached.stdout);
}

#[test]
fn cache_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_khcable"))
        .args(["compute", "--braid", "1 1 1"])
        .env("KHCABLE_CACHE", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "json")).count(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(khcable(&["verify", "lemma-lem1"]).status.code(), Some(0));
    assert_eq!(khcable(&["verify", "thm-newmainthm", "--budget", "10"]).status.code(), Some(2));
    assert_eq!(khcable(&["verify", "no-such-id"]).status.code(), Some(2));
    assert_eq!(khcable(&["compute", "--braid", "1 x"]).status.code(), Some(2));
    assert_eq!(khcable(&["compute"]).status.code(), Some(2));
    assert_eq!(khcable(&["les", "--braid", "1 1 1", "--crossing", "2"]).status.code(), Some(0));
    assert_eq!(khcable(&["les", "--braid", "1 1 1", "--crossing", "7"]).status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let o = khcable(&["verify", "prop-4.3", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = khcable(&["verify", "thm-newmainthm", "--param", "k=1", "n=1", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"]["status"], "pass");
    assert_eq!(v["params"]["k"], "1");
}

#[test]
fn invariants() {
    let o = khcable(&["s", "--braid", "1 1 1", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["s"], 2);
    let o = khcable(&["jones", "--braid", "1 1 1"]);
    assert_eq!(stdout(&o).trim(), "V(q) = -q^8 + q^6 + q^2");
    let o = khcable(&["thickness", "--braid", "1 -2 1 -2", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["homological_width"], 2);
    assert_eq!(v["dealternating_bound"], 0);
    let o = khcable(&["lee", "--braid", "1 1", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn engines_agree() {
    let cube = khcable(&["cable", "--braid", "1", "-p", "2", "-q", "4", "--engine", "cube", "--out", "json"]);
    let local = khcable(&["cable", "--braid", "1", "-p", "2", "-q", "4", "--engine", "local", "--out", "json"]);
    assert_eq!(table(&cube), table(&local));
    let big = table(&khcable(&["double", "--braid", "1 1 1", "-q", "8", "--window", "0:0", "--out", "json"]));
    assert_eq!(big.dim(0), 2);
}
