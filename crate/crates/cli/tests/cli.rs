use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mpmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpmd")).args(args).output().expect("binary runs")
}

fn json(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_fixture_matches_recorded_total() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.json");
    let o = mpmd(&["solve", "--instance", fixture("line4.json").to_str().unwrap(), "--algo", "nonclairvoyant", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["verify"]["ok"], true);
    assert_eq!(v["solution"]["total"], 5.5);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["total"], 5.5);
}

#[test]
fn solve_concave_writes_dual_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.json");
    let o = mpmd(&["solve", "--instance", fixture("concave.json").to_str().unwrap(), "--algo", "concave", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verify"]["ok"], true);
    assert!(v["dual"]["dual_objective"].as_f64().unwrap() <= v["solution"]["total"].as_f64().unwrap());
    assert_eq!(v["solution"]["edges"].as_array().unwrap().len(), 2);
}

#[test]
fn bad_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let out = out.to_str().unwrap();
    let o = mpmd(&["solve", "--instance", fixture("malformed.json").to_str().unwrap(), "--algo", "nonclairvoyant", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = mpmd(&["solve", "--instance", fixture("odd.json").to_str().unwrap(), "--algo", "nonclairvoyant", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("perfect matching impossible"));
    let o = mpmd(&["solve", "--instance", fixture("line4.json").to_str().unwrap(), "--algo", "concave", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = mpmd(&["adversary", "--kind", "nine_point"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ratio_sweep_is_byte_identical_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = mpmd(&["ratio", "--config", fixture("ratio.json").to_str().unwrap(), "--out", p.to_str().unwrap(), "--deterministic"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("m,n,algo,alg_cost,opt_cost,ratio,runtime_ms\n"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        match (&rec[0], &rec[2]) {
            ("summary", _) => assert!(rec[5].starts_with("max=")),
            (_, "concave") => {
                let m: f64 = rec[0].parse().unwrap();
                assert!(rec[5].parse::<f64>().unwrap() <= 8.0 * m);
            }
            _ => {
                let r: f64 = rec[5].replace("inf", "Infinity").parse().unwrap();
                assert!(r >= 1.0 - 1e-9, "{rec:?}");
            }
        }
    }
    assert!(dir.path().join("a.csv.seeds.json").exists());
}

#[test]
fn det_phase_ratio_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("adv.csv");
    let o = mpmd(&["adversary", "--kind", "det_phase", "--n", "6", "--csv", csv_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text, "n,mode,seed,alg_cost,opt_cost,ratio\n6,det_phase,-,5,1,5\n");
}

#[test]
fn four_point_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = mpmd(&["adversary", "--kind", "four_point", "--D", "100", "--eps", "1", "--algo", "nonclairvoyant", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out);
    assert!(v["ratio"].as_f64().unwrap() >= 200.0);
    assert_eq!(v["opt_cost"], 1.0);
    assert_eq!(v["instance"]["requests"].as_array().unwrap().len(), 6);
}

#[test]
fn rand_phase_summary_has_reference() {
    let o = mpmd(&["adversary", "--kind", "rand_phase", "--n", "8", "--trials", "20", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("mean_alg_cost="));
    assert!(stdout.contains("reference: 2*(H_n - 1)"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("8,rand_phase,")).count(), 20);
}
