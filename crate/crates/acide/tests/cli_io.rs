//! End-to-end command-line behavior: exit codes, file input/output, and
//! format switches.

use acide::cli::{run, EXIT_INFEASIBLE, EXIT_NO_FEASIBLE_CLUSTER, EXIT_OK, EXIT_PARSE};
use std::fs;
use std::path::Path;

const WORKED: &str = "\
[stream]
S = 2000 bits
T = 200 ms

[peers]
u = 15 kbps, 17 kbps, 18 kbps, 19 kbps, 20 kbps
d = 20 kbps

[admission]
BW = 17 kbps
";

fn run_with(sub: &str, conf: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args: Vec<String> = vec![
        sub.into(),
        "--input".into(),
        conf.to_string_lossy().into_owned(),
        "--output".into(),
        out.to_string_lossy().into_owned(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    run(&args)
}

#[test]
fn optimize_writes_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, WORKED).unwrap();
    let out = dir.path().join("result.csv");
    assert_eq!(run_with("optimize", &conf, &out, &[]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("peer_id,u_bps,d_bps,block_bits,bw_bps\n"));
    assert!(text.contains("\ntotal,,,2000,"));
}

#[test]
fn json_outputs_parse() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, WORKED).unwrap();
    for sub in ["optimize", "admit", "simulate"] {
        let out = dir.path().join(format!("{sub}.json"));
        assert_eq!(run_with(sub, &conf, &out, &["--format", "json"]), EXIT_OK);
        let value: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert!(value.is_object(), "{sub} output is not an object");
    }
}

#[test]
fn unit_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "[peers]\nu = 15\nd = 20 kbps\n").unwrap();
    let out = dir.path().join("out.csv");
    assert_eq!(run_with("optimize", &conf, &out, &[]), EXIT_PARSE);
}

#[test]
fn missing_sections_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("stream_only.conf");
    fs::write(&conf, "[stream]\nS = 2000 bits\nT = 200 ms\n").unwrap();
    let out = dir.path().join("out.csv");
    assert_eq!(run_with("optimize", &conf, &out, &[]), EXIT_PARSE);
    assert_eq!(run_with("admit", &conf, &out, &[]), EXIT_PARSE);
    assert_eq!(run_with("plan", &conf, &out, &[]), EXIT_PARSE);
    assert_eq!(run_with("sweep", &conf, &out, &[]), EXIT_PARSE);
}

#[test]
fn infeasible_cluster_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("slow.conf");
    // 1 kbps uploads cannot exchange 1000-bit blocks inside 200 ms.
    fs::write(
        &conf,
        "[stream]\nS = 2000 bits\nT = 200 ms\n\n[peers]\nu = 1 kbps, 1 kbps\nd = 20 kbps\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    assert_eq!(run_with("optimize", &conf, &out, &[]), EXIT_INFEASIBLE);
}

#[test]
fn hopeless_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("tight.conf");
    fs::write(
        &conf,
        "[stream]\nS = 2000 bits\nT = 200 ms\n\n[peers]\nu = 15 kbps\nd = 20 kbps\n\n\
         [admission]\nBW = 9 kbps\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    assert_eq!(
        run_with("admit", &conf, &out, &[]),
        EXIT_NO_FEASIBLE_CLUSTER
    );
}

#[test]
fn halted_plan_exits_3_but_still_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("churn.conf");
    fs::write(
        &conf,
        "[stream]\nS = 2000 bits\nT = 200 ms\n\n[peers]\nu = 15 kbps, 20 kbps\nd = 20 kbps\n\n\
         [churn]\npackages = 3\nupdate = 2 1 1 kbps 20 kbps\nupdate = 2 2 1 kbps 20 kbps\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    assert_eq!(run_with("plan", &conf, &out, &[]), EXIT_INFEASIBLE);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("halted_package,error"));
    assert!(text.lines().nth(1).unwrap().starts_with("1,2,"));
}

#[test]
fn emitted_configs_reproduce_results() {
    // parse -> emit -> parse drives the same computation to the same bytes.
    let parsed = acide::config::parse_config(WORKED).unwrap();
    let emitted = acide::config::emit_config(&parsed);
    let dir = tempfile::tempdir().unwrap();
    let conf_a = dir.path().join("a.conf");
    let conf_b = dir.path().join("b.conf");
    fs::write(&conf_a, WORKED).unwrap();
    fs::write(&conf_b, emitted).unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    assert_eq!(run_with("optimize", &conf_a, &out_a, &[]), EXIT_OK);
    assert_eq!(run_with("optimize", &conf_b, &out_b, &[]), EXIT_OK);
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn binary_reads_stdin_and_reports_errors() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let exe = env!("CARGO_BIN_EXE_acide");

    let mut child = Command::new(exe)
        .args(["optimize", "--paper-display"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(WORKED.as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("total,,,2000,18.163"));
    assert!(stdout.contains("phase,111,89"));

    // Usage errors report a machine-readable record on stderr and exit 2.
    let output = Command::new(exe).arg("conjure").output().unwrap();
    assert_eq!(output.status.code(), Some(EXIT_PARSE));
    let stderr = String::from_utf8(output.stderr).unwrap();
    let first_line = stderr.lines().next().unwrap();
    let record: serde_json::Value = serde_json::from_str(first_line).unwrap();
    assert_eq!(record["error"]["kind"], "USAGE");
}
