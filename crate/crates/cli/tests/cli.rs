use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nearcurve"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nearcurve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn forms_check_accepts_text_and_json() {
    let t = scratch("f5.txt", "x^5 + y^5 - z^5\n");
    let o = run(&["forms", "check", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["singularity"], "nonsingular");
    let j = scratch(
        "f5.json",
        r#"{"nvars":3,"degree":5,"terms":[{"e":[5,0,0],"c":"1"},{"e":[0,5,0],"c":"1"},{"e":[0,0,5],"c":"-1"}]}"#,
    );
    let o = run(&["forms", "check", j.to_str().unwrap()]);
    assert_eq!(json(&o)["form"], "x^5 + y^5 - z^5");
}

#[test]
fn count_scan_matches_golden() {
    let t = scratch("f5s.txt", "x^5 + y^5 - z^5");
    let o = run(&["count", "scan", t.to_str().unwrap(), "--B", "4", "--gamma", "0", "--exclude-tangents"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["n"].as_u64().unwrap() - v["n_star"].as_u64().unwrap(), 24);
}

#[test]
fn thue_and_lattice_goldens() {
    let t = scratch("q2.txt", "x^2 + y^2");
    let o = run(&["thue", "count", t.to_str().unwrap(), "--B", "10", "--P", "25", "--eta", "3", "--s0", "1", "--t0", "0"]);
    assert_eq!(json(&o)["count"], 14);
    let o = run(&["lattice", "minima", "--M", "4", "--B", "16"]);
    assert_eq!(json(&o)["minima"], serde_json::json!(["1/16", "1/4", "1/4"]));
}

#[test]
fn exit_codes() {
    let t = scratch("f5e.txt", "x^5 + y^5 - z^5");
    // gamma outside [0, k)
    let o = run(&["count", "scan", t.to_str().unwrap(), "--B", "4", "--gamma", "5"]);
    assert_eq!(o.status.code(), Some(2));
    // singular form
    let s = scratch("sing.txt", "x^2*z - y^3");
    let o = run(&["count", "scan", s.to_str().unwrap(), "--B", "4", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(2));
    // auxiliary forms capped at degree 1 leave boxes uncovered
    let e3 = scratch("e3.txt", "y^2*z - x^3 + x*z^2");
    let o = run(&["detmethod", "run", e3.to_str().unwrap(), "--B", "64", "--tau", "7/4", "--Dmax", "1"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["detmethod", "run", t.to_str().unwrap(), "--B", "64", "--tau", "5/2", "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn scaling_writes_csv_and_plot() {
    let t = scratch("f5x.txt", "x^5 + y^5 - z^5");
    let csv = t.with_file_name("scaling.csv");
    let svg = t.with_file_name("scaling.svg");
    let args = [
        "experiment", "scaling", t.to_str().unwrap(), "--gamma", "5/2", "--B-list", "32,16,64",
        "--out", csv.to_str().unwrap(), "--plot", svg.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(first.lines().count(), 4);
    assert!(first.lines().nth(1).unwrap().contains(",16,"));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    run(&args);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), first);
}
