use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const LINE4: &str = r#"{
    "n": 4, "depots": [0, 3], "k": 2, "epsilon": 0.25,
    "matrix": [[0,1,2,3],[1,0,1,2],[2,1,0,1],[3,2,1,0]]
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclecover"))
        .args(args)
        .env_remove("CYCLECOVER_PARALLELISM")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_reports_the_line_instance_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line4.json", LINE4);
    let out = run(&["solve", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["objective"], 2.0);
    assert_eq!(json["candidate_id"], 0);
    assert_eq!(json["cycles"][0]["route"], serde_json::json!([0, 1, 0]));
    assert_eq!(json["cycles"][1]["route"], serde_json::json!([3, 2, 3]));
}

#[test]
fn solve_rejects_malformed_json_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "broken.json", "{ not json");
    let out = run(&["solve", "--input", &input]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_rejects_missing_depots_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "nodepots.json",
        r#"{ "n": 2, "k": 1, "epsilon": 0.5, "matrix": [[0,1],[1,0]] }"#,
    );
    let out = run(&["solve", "--input", &input]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_rejects_invalid_metric_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "nonmetric.json",
        r#"{
            "n": 3, "depots": [0], "k": 1, "epsilon": 0.25,
            "matrix": [[0,1,10],[1,0,1],[10,1,0]]
        }"#,
    );
    let out = run(&["solve", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
}

#[test]
fn solve_rejects_budget_below_depots_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "short_budget.json",
        r#"{
            "n": 3, "depots": [0, 1, 2], "k": 2, "epsilon": 0.25,
            "matrix": [[0,1,2],[1,0,1],[2,1,0]]
        }"#,
    );
    let out = run(&["solve", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn epsilon_override_shortens_the_search() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line4.json", LINE4);
    let tight = dir.path().join("tight.csv");
    let loose = dir.path().join("loose.csv");
    let out = run(&[
        "solve",
        "--input",
        &input,
        "--epsilon",
        "0.01",
        "--trace",
        tight.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "solve",
        "--input",
        &input,
        "--epsilon",
        "0.9",
        "--trace",
        loose.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let tight_rows = fs::read_to_string(tight).unwrap().lines().count();
    let loose_rows = fs::read_to_string(loose).unwrap().lines().count();
    assert!(
        loose_rows < tight_rows,
        "looser epsilon must terminate earlier: {loose_rows} vs {tight_rows}"
    );
}

#[test]
fn trace_has_expected_header_and_dot_outputs_exist() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line4.json", LINE4);
    let trace = dir.path().join("trace.csv");
    let dot = dir.path().join("cover.dot");
    let out = run(&[
        "solve",
        "--input",
        &input,
        "--trace",
        trace.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(trace).unwrap();
    assert!(csv.starts_with("candidate,ell,a,b,lambda,tree_count,feasible,cover_weight"));
    let cover = fs::read_to_string(&dot).unwrap();
    assert!(cover.starts_with("graph cover"));
    let forest = fs::read_to_string(dir.path().join("cover-forest.dot")).unwrap();
    assert!(forest.starts_with("graph forest"));
}

#[test]
fn solve_output_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line4.json", LINE4);
    let mut first = stdout_json(&run(&["solve", "--input", &input]));
    let mut second = stdout_json(&run(&["solve", "--input", &input]));
    first.as_object_mut().unwrap().remove("elapsed_ms");
    second.as_object_mut().unwrap().remove("elapsed_ms");
    assert_eq!(first, second);
}

#[test]
fn parallel_and_serial_agree() {
    let dir = tempfile::tempdir().unwrap();
    let gen_path = dir.path().join("gen.json");
    let out = run(&[
        "gen",
        "--n",
        "14",
        "--m",
        "3",
        "--k",
        "5",
        "--seed",
        "11",
        "--output",
        gen_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut serial = stdout_json(&run(&["solve", "--input", gen_path.to_str().unwrap()]));
    let mut parallel = stdout_json(&run(&[
        "solve",
        "--input",
        gen_path.to_str().unwrap(),
        "--parallelism",
        "4",
    ]));
    serial.as_object_mut().unwrap().remove("elapsed_ms");
    parallel.as_object_mut().unwrap().remove("elapsed_ms");
    assert_eq!(serial, parallel);
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    assert_eq!(
        run(&[
            "gen",
            "--n",
            "8",
            "--m",
            "2",
            "--k",
            "3",
            "--seed",
            "7",
            "--output",
            a.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        run(&[
            "gen",
            "--n",
            "8",
            "--m",
            "2",
            "--k",
            "3",
            "--seed",
            "7",
            "--output",
            b.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        run(&[
            "gen",
            "--n",
            "8",
            "--m",
            "2",
            "--k",
            "3",
            "--seed",
            "8",
            "--output",
            c.to_str().unwrap()
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_rejects_more_depots_than_vertices() {
    let out = run(&["gen", "--n", "8", "--m", "9", "--k", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_instances_load_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let out = run(&[
        "gen",
        "--n",
        "9",
        "--m",
        "2",
        "--k",
        "3",
        "--seed",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = stdout_json(&out);
    assert!(json["ratio"].as_f64().unwrap() <= 5.25);
}

#[test]
fn verify_reports_ratio_one_on_the_line_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line4.json", LINE4);
    let out = run(&["verify", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["lambda_star"], 2.0);
    assert_eq!(json["alg_objective"], 2.0);
    assert_eq!(json["ratio"], 1.0);
}

#[test]
fn verify_refuses_large_instances_with_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    let out = run(&[
        "gen",
        "--n",
        "20",
        "--m",
        "2",
        "--k",
        "5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn parallelism_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "line4.json", LINE4);
    let out = Command::new(env!("CARGO_BIN_EXE_cyclecover"))
        .args(["solve", "--input", &input])
        .env("CYCLECOVER_PARALLELISM", "4")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let mut json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    json.as_object_mut().unwrap().remove("elapsed_ms");
    let mut serial = stdout_json(&run(&["solve", "--input", &input]));
    serial.as_object_mut().unwrap().remove("elapsed_ms");
    assert_eq!(json, serial);
}

#[test]
fn edge_list_instances_are_closed_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "raw.json",
        r#"{
            "n": 4, "depots": [0, 3], "k": 2, "epsilon": 0.25,
            "edges": [[0,1,1.0],[1,2,1.0],[2,3,1.0]]
        }"#,
    );
    let out = run(&["solve", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["objective"], 2.0);
}
