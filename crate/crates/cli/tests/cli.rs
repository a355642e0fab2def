use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn prolate(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prolate"));
    cmd.args(args);
    match cache {
        Some(dir) => cmd.env("PROLATE_CACHE_DIR", dir),
        None => cmd.env_remove("PROLATE_CACHE_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table1_csv_schema_and_values() {
    let o = prolate(&["table1", "--c", "10,100"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,n,pi_n_over_2c,abs_lambda,mu"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1][..2], ["10".to_string(), "3".to_string()]);
    let lam: f64 = rows[1][3].parse().unwrap();
    assert!((lam - 0.79183).abs() < 1e-5);
    let mu: f64 = rows[5][4].parse().unwrap();
    assert!((mu - 0.54997).abs() < 1e-4);
}

#[test]
fn table2_matches_printed_integers() {
    let o = prolate(&["table2", "--c", "10", "--eps", "e^-50,e^-100"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,c,n1,delta1,n2,delta2,n2_minus_n1");
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[2..3], ["32"]);
    assert_eq!(first[4], "38");
    assert_eq!(first[6], "6");
    let second: Vec<&str> = lines[2].split(',').collect();
    assert_eq!((second[2], second[4]), ("50", "56"));
}

#[test]
fn figures_and_experiment3_headers() {
    let o = prolate(&["figures", "--c", "100"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("c,n,log_abs_lambda,log_zeta\n"));
    let o = prolate(&["experiment3", "--c", "100"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("c,n,log_abs_lambda,log_zeta,neg_delta,log_xi,ordering\n"));
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",true") || l.ends_with(",false")));
}

#[test]
fn output_is_byte_stable_with_and_without_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["figures", "--c", "10,100", "--parallel", "2"];
    let plain = prolate(&args, None);
    let cold = prolate(&args, Some(dir.path()));
    let warm = prolate(&args, Some(dir.path()));
    assert!(plain.stdout == cold.stdout, "cold cache changed the output");
    assert!(cold.stdout == warm.stdout, "warm cache changed the output");
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 2);
    let text = fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    assert!(text.contains("\"format\":\"prolate-chi-cache\""));
    assert!(text.contains("\"version\":1"));
}

#[test]
fn json_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.json");
    let o = prolate(
        &["table1", "--c", "10", "--format", "json", "--out", path.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"c_list": [10.0], "n_policy": {"list": [1, 2]}}"#).unwrap();
    let o = prolate(&["table1", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = prolate(&["table1", "--config", cfg.to_str().unwrap(), "--n-range", "0..5"], None);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(prolate(&["table1", "--c", "-3"], None).status.code(), Some(2));
    assert_eq!(prolate(&["table2", "--eps", "2"], None).status.code(), Some(2));
    assert_eq!(prolate(&["table1", "--n-range", "5..2"], None).status.code(), Some(2));
    assert_eq!(prolate(&["bogus"], None).status.code(), Some(2));
    assert_eq!(prolate(&["table1", "--config", "/nonexistent.json"], None).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_three() {
    let o = prolate(&["table1", "--c", "100", "--n", "60", "--truncation-dim", "40"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let o = prolate(
        &["verify", "--c", "10,100", "--aux-points", "100", "--out", path.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("suite,check,c,n,applicable,passed,detail\n"));
    // 6 structure checks for each n ≤ ⌊2c/π⌋ + 50
    let structure = text.lines().filter(|l| l.starts_with("chi_structure,") && !l.contains("small_c")).count();
    assert_eq!(structure, 6 * ((6 + 51) + (63 + 51)));

    let o = prolate(
        &["verify", "--c", "1000", "--aux-points", "10", "--perturb-chi", "0.01", "--out", "/dev/null"],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("chi_structure/elliptic_sandwich"));
}
