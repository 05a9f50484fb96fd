use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "\
# caption point
delta1 = 0.0
delta2 = delta1
kappa2 = 1.0
omega_m = 100
gamma_m = 1e-4
g = 3
J = 0.5
E = 0.01
temperature_mK = 1
omega_m_2pi_MHz = 100
sweep.parameter = delta1
sweep.start = -0.1
sweep.stop = 0.2
sweep.points = 7
sweep.route = analytic
";

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(&path, format!("{BASE}{extra}")).unwrap();
    path
}

fn optoblock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optoblock")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn sweep_writes_metadata_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    assert!(lines[..header].contains(&"# J = 5.0000000000000000e-1"));
    assert!(lines[header].starts_with("index,delta1,delta2,g1_analytic"));
    assert!(lines[header].ends_with(",status"));
    assert_eq!(lines.len() - header - 1, 7);
    assert!(lines[header + 1..].iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn command_line_overrides_file_and_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap(), "--J", "0.7", "--sweep.points=3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# J = 6.9999999999999996e-1\n"));
    assert!(text.contains("# sweep.points = 3\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn config_errors_exit_two_and_name_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "colour = blue\n");
    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 17"), "{}", stderr(&o));
    assert!(stderr(&o).contains("colour"));

    let cfg = write_config(dir.path(), "");
    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap(), "--g", "three"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`g`"), "{}", stderr(&o));

    let o = optoblock(&["sweep", "--config", dir.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = optoblock(&["figure", "fig99", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_points_exit_three_and_keep_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.route = numeric\nresidual_tol = 1e-300\nn1_max = 2\nn2_max = 2\nnm_max = 2\n",
    );
    let cfg_text = std::fs::read_to_string(&cfg).unwrap().replace("sweep.route = analytic\n", "");
    std::fs::write(&cfg, cfg_text).unwrap();
    let out = dir.path().join("t.csv");
    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.contains("numeric_not_converged")));
    assert!(text.contains("# failed_points = 7\n"));
}

#[test]
fn json_output_by_flag_or_extension() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("t.json");
    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    assert_eq!(v["metadata"]["sweep.route"], "analytic");
    assert_eq!(v["rows"][0]["delta1"].as_f64(), Some(-0.1));

    let o = optoblock(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let w: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, w);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let cfg = cfg.to_str().unwrap();
    let one = optoblock(&["--threads", "1", "sweep", "--config", cfg, "--sweep.points", "41"]);
    let four = optoblock(&["sweep", "--config", cfg, "--sweep.points", "41", "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn phase_verb_reports_the_exceptional_point() {
    let o = optoblock(&["phase", "--J", "0:1:11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].contains("broken"));
    assert!(rows[5].contains("exceptional_point"), "{}", rows[5]);
    assert!(rows[10].contains("unbroken"));

    let o = optoblock(&["phase", "--J", "1:0:11"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certify_undriven_point_at_base_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let o = optoblock(&["certify", "--config", cfg.to_str().unwrap(), "--E", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# certified_n1_max = 3\n"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("step,n1_max")));
}
