//! Golden-run harness for the CLI surface: exit codes, output shapes, config
//! precedence, and the channel/basis spec strings and files.

use std::path::Path;
use std::process::{Command, Output};

fn qtel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_exit(out: &Output, code: i32, label: &str) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "{label}: stdout={} stderr={}",
        stdout(out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn fidelity_known_values() {
    let out = qtel(&["fidelity", "--d", "3", "--noise", "B=D:0.3"]);
    assert_exit(&out, 0, "depolarizing on Bob");
    let text = stdout(&out);
    assert!(
        text.contains("closed fidelity = 8.0000000000000"),
        "unexpected output: {text}"
    );
    assert!(text.contains("above classical: yes"));

    let out = qtel(&["fidelity", "--d", "2", "--noise", "A=F:1", "B=F:1"]);
    assert_exit(&out, 0, "full flips");
    assert!(stdout(&out).contains("closed fidelity = 9.99999999999999"));

    let out = qtel(&["fidelity", "--d", "3", "--noise", "none"]);
    assert_exit(&out, 0, "noiseless");
    assert!(stdout(&out).contains("closed fidelity = 1.0000000000000"));
}

#[test]
fn fidelity_oracle_mc_method() {
    let out = qtel(&[
        "fidelity",
        "--d",
        "2",
        "--noise",
        "A=AD:0.4",
        "--method",
        "both",
        "--n-samples",
        "2000",
        "--seed",
        "5",
    ]);
    assert_exit(&out, 0, "both methods");
    let text = stdout(&out);
    assert!(text.contains("closed fidelity"));
    assert!(text.contains("mc fidelity"));
}

#[test]
fn invalid_flags_exit_2() {
    assert_exit(&qtel(&["fidelity", "--d", "3", "--noise", "Q=F:0.1"]), 2, "bad qudit");
    assert_exit(&qtel(&["fidelity", "--d", "3", "--noise", "A=XX:0.1"]), 2, "bad kind");
    assert_exit(&qtel(&["fidelity", "--d", "3", "--noise", "A=F:2"]), 2, "bad fraction");
    assert_exit(&qtel(&["fidelity", "--noise", "none"]), 2, "missing d");
    assert_exit(&qtel(&["fidelity", "--d", "1"]), 2, "d too small");
    assert_exit(&qtel(&["validate", "--level", "bogus"]), 1 + 1, "unknown level");
    assert_exit(&qtel(&["nonsense-subcommand"]), 2, "unknown subcommand");
    // sweep without a swept axis or output
    assert_exit(
        &qtel(&["sweep", "--d", "2", "--noise", "A=F:0.5", "--out", "/tmp/x.csv"]),
        2,
        "no swept axis",
    );
}

#[test]
fn dimension_cap_exit_3() {
    assert_exit(&qtel(&["fidelity", "--d", "100", "--noise", "none"]), 3, "closed cap");
    assert_exit(
        &qtel(&[
            "fidelity", "--d", "12", "--noise", "none", "--method", "oracle-mc",
        ]),
        3,
        "3-qudit cap",
    );
    // d = 12 is fine for closed forms
    assert_exit(&qtel(&["fidelity", "--d", "12", "--noise", "none"]), 0, "closed d=12");
}

#[test]
fn validate_fast_passes() {
    let out = qtel(&["validate", "--level", "fast"]);
    assert_exit(&out, 0, "validate fast");
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS\t")).count() >= 10);
    assert!(!text.contains("FAIL\t"));
}

#[test]
fn sweep_csv_shape_and_headers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = qtel(&[
        "sweep",
        "--d",
        "3",
        "--noise",
        "A=F:0:1:5",
        "B=F:0:1:3",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "sweep");
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# qtel v"));
    assert!(lines[1].contains("d=3") && lines[1].contains("seed=3") && lines[1].contains("method=closed"));
    assert_eq!(lines[2], "p_i,p_a,p_b,fidelity,std_error,f_c,above_classical");
    assert_eq!(lines.len(), 3 + 15, "one row per grid point");
    // deterministic lexicographic order: B fastest
    assert!(lines[3].starts_with("0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0"));
    assert!(lines[4].starts_with("0.0000000000000000e0,0.0000000000000000e0,5.0000000000000000e-1"));
    // noiseless corner is above classical
    assert!(lines[3].ends_with("true"));
}

#[test]
fn sweep_jsonl_parses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.jsonl");
    let out = qtel(&[
        "sweep",
        "--d",
        "2",
        "--noise",
        "B=AD:0:1:4",
        "--format",
        "jsonl",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "jsonl sweep");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let config: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(config["command"], "sweep");
    assert_eq!(config["d"], "2");
    let mut n = 0;
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["fidelity"].is_f64() || v["fidelity"].is_number());
        assert!(v["above_classical"].is_boolean());
        n += 1;
    }
    assert_eq!(n, 4);
}

#[test]
fn scatter_emits_boundary_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scatter.csv");
    let out = qtel(&[
        "scatter",
        "--d",
        "5",
        "--n",
        "100",
        "--seed",
        "2",
        "--curve-points",
        "17",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "scatter");
    let text = std::fs::read_to_string(&path).unwrap();
    for mu in 1..=4 {
        assert!(
            text.contains(&format!("boundary:mu={mu},")),
            "missing family μ={mu}"
        );
    }
    assert_eq!(text.lines().filter(|l| l.starts_with("sample,")).count(), 100);
}

#[test]
fn gamma_and_basis_specs() {
    let out = qtel(&["fidelity", "--d", "3", "--noise", "none", "--gamma", "rank:2"]);
    assert_exit(&out, 0, "rank gamma");
    // rank-2 channel at d=3: F = f_C + f_Q < 1
    let text = stdout(&out);
    assert!(text.contains("above classical: yes"));
    assert!(!text.contains("closed fidelity = 1.0000"));

    let out = qtel(&["fidelity", "--d", "3", "--noise", "none", "--gamma", "rank:5"]);
    assert_exit(&out, 2, "rank out of range");

    let out = qtel(&[
        "fidelity", "--d", "3", "--noise", "none", "--basis", "phased:2.0943951023931953,4.1887902047863905",
    ]);
    assert_exit(&out, 0, "phased basis");

    // file-based inputs
    let dir = tempfile::tempdir().unwrap();
    let gpath = dir.path().join("gamma.txt");
    std::fs::write(&gpath, "0.8 0.0\n0.6 0.0\n").unwrap();
    let out = qtel(&[
        "fidelity",
        "--d",
        "2",
        "--noise",
        "none",
        "--gamma",
        &format!("file:{}", gpath.display()),
    ]);
    assert_exit(&out, 0, "gamma from file");

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0.9 0.0\n0.6 0.0\n").unwrap();
    let out = qtel(&[
        "fidelity",
        "--d",
        "2",
        "--noise",
        "none",
        "--gamma",
        &format!("file:{}", bad.display()),
    ]);
    assert_exit(&out, 2, "unnormalized gamma file");
}

#[test]
fn config_file_defaults_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("qtel.conf");
    std::fs::write(&conf, "d=3\nnoise=B=D:0.3\n").unwrap();

    let out = qtel(&["fidelity", "--config", conf.to_str().unwrap()]);
    assert_exit(&out, 0, "config-supplied run");
    assert!(stdout(&out).contains("closed fidelity = 8.0000000000000"));

    // flags beat config
    let out = qtel(&["fidelity", "--config", conf.to_str().unwrap(), "--d", "2"]);
    assert_exit(&out, 0, "flag precedence");
    assert!(stdout(&out).contains("d        = 2"));
}

#[test]
fn optimize_prints_prediction() {
    let out = qtel(&["optimize", "--d", "2", "--p", "0.9"]);
    assert_exit(&out, 0, "optimize");
    let text = stdout(&out);
    // value (2·0.9 + 1)/3 and the canonical phase π
    assert!(text.contains("9.3333333333333"), "{text}");
    assert!(text.contains("3.141592"), "{text}");

    let out = qtel(&["optimize", "--d", "3", "--p", "0.5"]);
    assert_exit(&out, 0, "optimize below threshold");
    let text = stdout(&out);
    assert!(text.contains("6.2500000000000"), "{text}");
}

#[test]
fn sweep_reproduces_two_high_noise_boundary() {
    // (D, F, F) at d = 3 with both flips at full strength: records stay
    // above classical exactly while the depolarizing fraction is below
    // d/(d² − d + 1) = 3/7 (grid chosen so no node hits the root exactly)
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dff.csv");
    let out = qtel(&[
        "sweep",
        "--d",
        "3",
        "--noise",
        "I=D:0:1:30",
        "A=F:1",
        "B=F:1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "dff sweep");
    let text = std::fs::read_to_string(&path).unwrap();
    let boundary = 3.0 / 7.0;
    let mut rows = 0;
    for line in text.lines().skip(3) {
        let fields: Vec<&str> = line.split(',').collect();
        let p_d: f64 = fields[0].parse().unwrap();
        let above: bool = fields[6].parse().unwrap();
        assert_eq!(above, p_d < boundary, "p_D = {p_d}");
        rows += 1;
    }
    assert_eq!(rows, 30);
}

#[test]
fn partial_output_is_cleaned_up() {
    // writing into a missing directory fails with exit 1 and leaves nothing
    let out = qtel(&[
        "sweep",
        "--d",
        "2",
        "--noise",
        "A=F:0:1:3",
        "--out",
        "/nonexistent-dir/sweep.csv",
    ]);
    assert_exit(&out, 1, "io failure");
    assert!(!Path::new("/nonexistent-dir/sweep.csv").exists());
}
