use std::process::{Command, Output};

fn thetaset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetaset")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn count_cell(o: &Output) -> u64 {
    let s = stdout(o);
    let row = s.lines().nth(1).expect("one data row");
    row.rsplit(',').next().unwrap().parse().unwrap()
}

#[test]
fn count_examples() {
    let o = thetaset(&["count", "--theta", "practical", "--limit", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(count_cell(&o), 9);
    let dense = thetaset(&["count", "--theta", "dense:2", "--limit", "20", "--mod", "1"]);
    let practical = thetaset(&["count", "--theta", "practical", "--limit", "20", "--mod", "1"]);
    assert_eq!(count_cell(&dense), count_cell(&practical));
}

#[test]
fn members_round_trip_through_csv() {
    for (theta, m, a) in [("practical", "7", "3"), ("dense:5/2", "10", "-4"), ("smooth:13", "4", "1")] {
        let listed = thetaset(&["members", "--theta", theta, "--limit", "50000", "--mod", m, "--residue", a]);
        assert_eq!(listed.status.code(), Some(0));
        let text = stdout(&listed);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n"));
        let values: Vec<u64> = lines.map(|l| l.parse().unwrap()).collect();
        let counted = thetaset(&["count", "--theta", theta, "--limit", "50000", "--mod", m, "--residue", a]);
        assert_eq!(values.len() as u64, count_cell(&counted), "{theta}");
    }
}

#[test]
fn sorted_members_strictly_increase() {
    let o = thetaset(&["members", "--theta", "almost-prime:2", "--limit", "30000", "--sorted"]);
    let values: Vec<u64> = stdout(&o).lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(values.first(), Some(&1));
}

#[test]
fn output_is_identical_across_workers() {
    let a = thetaset(&["members", "--theta", "practical", "--limit", "200000", "--workers", "1"]);
    let b = thetaset(&["members", "--theta", "practical", "--limit", "200000", "--workers", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let a = thetaset(&["rq", "--theta", "dense:2", "--q", "12", "--truncation", "20000", "--workers", "1"]);
    let b = thetaset(&["rq", "--theta", "dense:2", "--q", "12", "--truncation", "20000", "--workers", "3"]);
    let last = |o: &Output| -> f64 { stdout(o).lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap() };
    assert!((last(&a) - last(&b)).abs() <= 1e-12 * last(&a).abs());
}

#[test]
fn json_has_rows() {
    let o = thetaset(&["table", "--theta", "practical", "--qmax", "6", "--truncation", "10000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["q"], 2);
}

#[test]
fn verify_commands_pass() {
    for args in [
        &["verify", "sandwich", "--theta", "practical", "--limit", "20000", "--qmax", "12"][..],
        &["verify", "moebius", "--theta", "smooth:7", "--limit", "20000", "--qmax", "30"],
        &["verify", "inclusion", "--theta", "dense:3", "--q", "6", "--mmax", "2000"],
        &["verify", "closure", "--theta", "practical", "--q", "4", "--pairs", "200"],
        &["verify", "equidist", "--theta", "practical", "--q", "5", "--limits", "1000,100000"],
    ] {
        let o = thetaset(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!stdout(&o).contains("false"), "{args:?}");
    }
    let o = thetaset(&["verify", "classify", "--theta", "practical", "--q", "12", "--a", "10", "--bound", "1000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("Empty (heuristic)"));
}

#[test]
fn rqa_accepts_negative_residues() {
    let neg = thetaset(&["rqa", "--theta", "dense:2", "--q", "12", "--a", "-8", "--truncation", "20000"]);
    let pos = thetaset(&["rqa", "--theta", "dense:2", "--q", "12", "--a", "4", "--truncation", "20000"]);
    assert_eq!(neg.status.code(), Some(0));
    assert_eq!(neg.stdout, pos.stdout);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["count", "--theta", "dense:3/2", "--limit", "10"][..],
        &["count", "--theta", "practical", "--limit", "ten"],
        &["hist", "--theta", "practical", "--limit", "10"],
        &["rq", "--theta", "prime-powers", "--q", "3", "--truncation", "1000"],
        &["verify", "classify", "--theta", "smooth:5", "--q", "12", "--a", "1"],
        &["verify", "inclusion", "--theta", "almost-prime:2", "--q", "6"],
        &["verify"],
    ] {
        assert_eq!(thetaset(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(thetaset(&["--version"]).status.code(), Some(0));
}

#[test]
fn table_budget_exits_3() {
    let o = Command::new(env!("CARGO_BIN_EXE_thetaset"))
        .args(["count", "--theta", "almost-prime:2", "--limit", "10000000"])
        .env("THETASET_MAX_TABLE_BYTES", "4096")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
