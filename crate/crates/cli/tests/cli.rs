use std::process::{Command, Output};

fn hgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgap"))
        .args(args)
        .env_remove("HGAP_PREC")
        .output()
        .expect("run hgap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn convergents_table() {
    let o = hgap(&["convergents", "--count", "8", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let pq: Vec<String> = s
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            format!("{}/{}", f[2], f[3])
        })
        .collect();
    assert_eq!(pq, ["2/1", "3/1", "8/3", "11/4", "19/7", "87/32", "106/39", "193/71"]);
}

#[test]
fn subsequence_json() {
    let o = hgap(&["convergents", "--subseq", "--k-max", "3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let q: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["q"].as_str().unwrap()).collect();
    assert_eq!(q, ["1", "7", "71", "1001"]);
    assert!(v.as_array().unwrap().iter().all(|r| r["lower"] == true && r["upper"] == true));
}

#[test]
fn construct_spot_value() {
    let o = hgap(&["construct", "--k", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"], "289");
    assert_eq!(v["n"], "107");
    assert_eq!(v["eps_positive"], true);
}

#[test]
fn scan_is_thread_invariant() {
    let run = |t: &str| hgap(&["--threads", t, "scan", "--n-max", "30000", "--format", "csv"]);
    let (a, b) = (run("1"), run("4"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().nth(1).unwrap().starts_with("2,4,1,12,1,3,"));
}

#[test]
fn scan_output_file_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("records.json");
    let cp = dir.path().join("cp.json");
    let o = hgap(&[
        "scan",
        "--n-max",
        "5000",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--format",
        "json",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["horizon"], 5000);
    assert!(v["wall_time_ms"].is_u64());
    assert!(cp.exists());
}

#[test]
fn counting_and_et() {
    let o = hgap(&["count", "--p", "1", "--q", "2", "--delta", "3/10", "--n-max", "10", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 5);

    let o = hgap(&["et", "--seed", "3", "--trials", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5/5 hold\n");
}

#[test]
fn approx_finds_spot_pair() {
    let o = hgap(&[
        "approx", "--n-max", "200", "--n-mod", "1,2", "--m-mod", "3,4", "--format", "csv",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("23,3,")));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| hgap(args).status.code().unwrap();
    assert_eq!(code(&["convergents", "--count", "0"]), 2);
    assert_eq!(code(&["construct", "--k", "3"]), 2);
    assert_eq!(code(&["scan", "--n-max", "1"]), 2);
    assert_eq!(code(&["--prec", "8", "convergents", "--count", "3"]), 2);
    assert_eq!(code(&["count", "--p", "2", "--q", "4", "--delta", "1/10", "--n-max", "5"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    std::fs::write(&cp, "garbage").unwrap();
    assert_eq!(code(&["scan", "--n-max", "100", "--checkpoint", cp.to_str().unwrap()]), 4);
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_hgap"))
        .args(["convergents", "--count", "2"])
        .env("HGAP_PREC", "16")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
