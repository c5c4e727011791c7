use std::process::{Command, Output};

use serde_json::Value;

fn hyperquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperquot"))
        .args(args)
        .env_remove("HYPERQUOT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn betti_json_for_projective_line_family() {
    let o = hyperquot(&[
        "betti", "--n", "2", "--s", "1", "--d", "1", "--method", "both", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for key in [
        "n",
        "s",
        "d",
        "dimension",
        "euler",
        "betti",
        "method",
        "version",
    ] {
        assert!(keys.contains(&key), "missing {key} in {keys:?}");
    }
    assert_eq!(v["n"], 2);
    assert_eq!(v["s"], serde_json::json!([1]));
    assert_eq!(v["d"], serde_json::json!([1]));
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["euler"], "4");
    assert_eq!(v["method"], "both");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let betti = v["betti"].as_array().unwrap();
    for (m, entry) in betti.iter().enumerate() {
        assert_eq!(entry["M"], m);
        assert_eq!(entry["b"], "1");
    }
    assert_eq!(betti.len(), 4);
    assert!(v.get("mismatch").is_none());
}

#[test]
fn euler_of_complete_flag_degree_one_zero() {
    let o = hyperquot(&["euler", "--n", "3", "--s", "1,2", "--d", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "12\n");
    for method in ["count", "series", "both"] {
        let o = hyperquot(&[
            "euler", "--n", "3", "--s", "1,2", "--d", "1,0", "--method", method,
        ]);
        assert_eq!(stdout(&o), "12\n", "method {method}");
    }
}

#[test]
fn verify_xpf_passes() {
    let o = hyperquot(&["verify", "--n", "3", "--s", "1,2", "--checks", "xpf"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("pass xpf F(3;1,2)"),
        "{}",
        stdout(&o)
    );
    let o = hyperquot(&[
        "verify", "--n", "3", "--s", "1,2", "--checks", "xpf", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["reports"][0]["check"], "xpf");
}

#[test]
fn verify_all_checks_over_caps() {
    let o = hyperquot(&[
        "verify", "--n", "4", "--s", "1,3", "--d", "1,1", "--checks", "all", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = v["reports"].as_array().unwrap();
    // 4 degrees each for weights and cross, plus comb, xpf, euler
    assert_eq!(reports.len(), 11);
    assert!(reports.iter().all(|r| r["verdict"] == "pass"));
}

#[test]
fn table_format_has_columns_and_trailer() {
    let o = hyperquot(&["betti", "--n", "3", "--s", "1,2", "--d", "1,0"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].contains('M') && lines[1].contains("b_2M"));
    assert_eq!(lines.last().unwrap(), &"chi = 12, dimension = 5");
    let rows: Vec<Vec<&str>> = lines[2..lines.len() - 1]
        .iter()
        .map(|l| l.split_whitespace().collect())
        .collect();
    let b: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(b, vec!["1", "2", "3", "3", "2", "1"]);
}

#[test]
fn csv_format_flattens_fields() {
    let o = hyperquot(&[
        "betti", "--n", "3", "--s", "1,2", "--d", "1,0", "--format", "csv",
    ]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,s,d,dimension,euler,method,version,M,b")
    );
    let first = lines.next().unwrap();
    assert_eq!(
        first,
        format!("3,1;2,1;0,5,12,both,{},0,1", env!("CARGO_PKG_VERSION"))
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn series_commands() {
    let o = hyperquot(&[
        "series", "--n", "1", "--s", "1", "--d", "3", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",1")));

    let o = hyperquot(&[
        "euler-series",
        "--n",
        "3",
        "--s",
        "1,2",
        "--d",
        "1,1",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let coeffs: Vec<&str> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["c"].as_str().unwrap())
        .collect();
    assert_eq!(coeffs, vec!["6", "12", "12", "36"]);
}

#[test]
fn compare_reports_both_tables() {
    let o = hyperquot(&[
        "compare", "--n", "4", "--s", "2", "--d", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], v["series"]);
    assert_eq!(v["report"]["verdict"], "pass");
}

#[test]
fn invalid_input_exits_two_with_one_line() {
    let cases: &[&[&str]] = &[
        &["betti", "--n", "3", "--s", "2,1", "--d", "0,0"],
        &["betti", "--n", "3", "--s", "0", "--d", "0"],
        &["betti", "--n", "3", "--s", "1,4", "--d", "0,0"],
        &["betti", "--n", "3", "--s", "1,2", "--d", "1"],
        &["betti", "--n", "3", "--s", "1", "--d", "x"],
        &[
            "betti", "--n", "2", "--s", "1", "--d", "1", "--method", "series", "--zmax", "1",
        ],
        &["betti", "--n", "2", "--s", "1", "--format", "xml"],
        &["verify", "--n", "2", "--s", "1", "--checks", "nonsense"],
        &["nonsense"],
        &[],
    ];
    for args in cases {
        let o = hyperquot(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{args:?}: {err}");
    }
}

#[test]
fn thread_count_must_be_positive_integer() {
    for bad in ["0", "-3", "many", ""] {
        let o = Command::new(env!("CARGO_BIN_EXE_hyperquot"))
            .args(["euler", "--n", "2", "--s", "1", "--d", "1"])
            .env("HYPERQUOT_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_hyperquot"))
        .args(["euler", "--n", "2", "--s", "1", "--d", "1"])
        .env("HYPERQUOT_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "4\n");
}

#[test]
fn jobs_file_runs_in_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("jobs.jsonl");
    let jobs = [
        r#"{"command":"betti","n":4,"s":[1,2,3],"d":[2,2,2],"format":"csv"}"#,
        "",
        r#"{"command":"euler","n":3,"s":[1,2],"d":[1,0]}"#,
        r#"{"command":"euler","n":2,"s":[1],"d":[3],"method":"count"}"#,
    ];
    std::fs::write(&path, jobs.join("\n")).unwrap();
    let o = hyperquot(&["--jobs", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("n,s,d,"));
    assert_eq!(&lines[lines.len() - 2..], &["12", "8"]);

    let each_alone: String = jobs
        .iter()
        .filter(|j| !j.is_empty())
        .map(|j| {
            let single = dir.path().join("single.jsonl");
            std::fs::write(&single, j).unwrap();
            stdout(&hyperquot(&["--jobs", single.to_str().unwrap()]))
        })
        .collect();
    assert_eq!(text, each_alone);
}

#[test]
fn bad_job_line_is_reported_and_others_still_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("jobs.jsonl");
    let jobs = [
        r#"{"command":"euler","n":3,"s":[1,2],"d":[1,0]}"#,
        r#"{"command":"euler","n":3,"s":[2,1],"d":[1,0]}"#,
        r#"not json"#,
    ];
    std::fs::write(&path, jobs.join("\n")).unwrap();
    let o = hyperquot(&["--jobs", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "12\n");
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 2, "{err}");
    assert!(err.lines().nth(1).unwrap().contains("line 3"), "{err}");

    let o = hyperquot(&["--jobs", dir.path().join("missing.jsonl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = hyperquot(&[
        "--jobs",
        path.to_str().unwrap(),
        "euler",
        "--n",
        "2",
        "--s",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
