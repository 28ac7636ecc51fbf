//! End-to-end checks of the binary: exit codes, file output, byte
//! determinism, and the documented column semantics.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bredsim-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn run_bredsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bredsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).expect("write config");
    path.to_string_lossy().into_owned()
}

/// Parse the data rows of an output file: (comments, header, rows).
fn parse_csv(path: &str) -> (Vec<String>, String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).expect("output exists");
    let mut comments = Vec::new();
    let mut header = String::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            comments.push(comment.trim().to_string());
        } else if header.is_empty() {
            header = line.to_string();
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (comments, header, rows)
}

const PAIR_LAMBDA_UNDAMPED: &str = "\
[generator]
alpha = 0.0
beta = 0.5
omega = 1.0

[grid]
t_max = 10.0
n_points = 400
";

#[test]
fn output_is_byte_deterministic() {
    let dir = scratch_dir("determinism");
    let cfg = write_config(&dir, "run.conf", PAIR_LAMBDA_UNDAMPED);
    let out1 = dir.join("a.csv");
    let out2 = dir.join("b.csv");
    for out in [&out1, &out2] {
        let res = run_bredsim(&[
            "pair-lambda",
            "--config",
            &cfg,
            "--out",
            &out.to_string_lossy(),
        ]);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn pair_lambda_reaches_the_closed_form_minimum() {
    let dir = scratch_dir("pair-lambda");
    let cfg = write_config(&dir, "run.conf", PAIR_LAMBDA_UNDAMPED);
    let out = dir.join("lambda.csv");
    let res = run_bredsim(&[
        "pair-lambda",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(res.status.success());
    let (_, header, rows) = parse_csv(&out.to_string_lossy());
    assert_eq!(header, "t,lambda_closed,lambda_eigen,min_eig");
    assert_eq!(rows.len(), 400);
    let mut min_closed = f64::INFINITY;
    for row in &rows {
        let closed: f64 = row[1].parse().unwrap();
        let eigen: f64 = row[2].parse().unwrap();
        assert!((closed - eigen).abs() < 1e-9);
        min_closed = min_closed.min(closed);
    }
    // minimum of -beta^2/Omega^2 = -1/3, up to grid resolution
    assert!((min_closed + 1.0 / 3.0).abs() < 1e-3, "min {min_closed}");
}

#[test]
fn werner_scan_flips_at_the_threshold() {
    let dir = scratch_dir("werner");
    let cfg = write_config(
        &dir,
        "run.conf",
        "[generator]\nalpha = 0\nbeta = 0.5\nomega = 1\n\n[grid]\np_step = 0.001\n",
    );
    let out = dir.join("werner.csv");
    let res = run_bredsim(&[
        "werner-scan",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let (comments, header, rows) = parse_csv(&out.to_string_lossy());
    assert_eq!(header, "p,min_lambda_w,threshold_flag");
    assert!(comments.iter().any(|c| c.starts_with("p_star")));
    let mut flip_p = None;
    let mut prev_flag = rows[0][2].clone();
    for row in rows.iter().skip(1) {
        if prev_flag == "0" && row[2] == "1" {
            flip_p = Some(row[0].parse::<f64>().unwrap());
            break;
        }
        prev_flag = row[2].clone();
    }
    let flip_p = flip_p.expect("flag must flip");
    assert!((flip_p - 3.0 / 7.0).abs() <= 1.5e-3, "flip at {flip_p}");
}

#[test]
fn choi_of_dephasing_map_stays_positive() {
    let dir = scratch_dir("choi");
    let cfg = write_config(
        &dir,
        "run.conf",
        "[generator]\nalpha = 0.4\nbeta = 0.0\nomega = 1.0\n\n[grid]\nt_max = 10\nn_points = 200\n",
    );
    let out = dir.join("choi.csv");
    let res = run_bredsim(&["choi", "--config", &cfg, "--out", &out.to_string_lossy()]);
    assert!(res.status.success());
    let (_, _, rows) = parse_csv(&out.to_string_lossy());
    for row in &rows {
        let min: f64 = row[1].parse().unwrap();
        assert!(min >= -1e-10);
    }
}

#[test]
fn single_trace_reports_small_integrator_deviation() {
    let dir = scratch_dir("single");
    let cfg = write_config(
        &dir,
        "run.conf",
        "[generator]\nalpha = 0.1\nbeta = 0.3\nomega = 1.0\n\n[state]\neta1 = 0\neta2 = 0\neta3 = 0.5\n\n[grid]\nt_max = 10\nn_points = 101\n",
    );
    let out = dir.join("trace.csv");
    let res = run_bredsim(&[
        "single-trace",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(res.status.success());
    let (comments, header, rows) = parse_csv(&out.to_string_lossy());
    assert_eq!(header, "t,eta1,eta2,eta3,min_eig");
    assert_eq!(rows.len(), 101);
    let dev_comment = comments
        .iter()
        .find(|c| c.contains("rk4_sup_deviation"))
        .expect("deviation comment");
    let dev: f64 = dev_comment
        .split("rk4_sup_deviation = ")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(dev < 1e-8, "sup deviation {dev}");
    // the ground projector develops negativity under beta != 0
    let min_min: f64 = rows
        .iter()
        .map(|r| r[4].parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min_min < -1e-6);
}

#[test]
fn admissible_mode_reports_verdict() {
    let dir = scratch_dir("admissible");
    let cfg = write_config(
        &dir,
        "run.conf",
        "[generator]\nalpha = 0.1\nbeta = 0.3\nomega = 1.0\n\n[state]\neta1 = 0\neta2 = 0\neta3 = 0.5\n\n[grid]\nt_max = 1\nn_points = 400\n",
    );
    let out = dir.join("adm.csv");
    let res = run_bredsim(&[
        "admissible",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(res.status.success());
    let (comments, _, _) = parse_csv(&out.to_string_lossy());
    assert!(comments.iter().any(|c| c == "admissible = false"));
    assert!(comments
        .iter()
        .any(|c| c.starts_with("first_negative_time = ") && !c.contains("none")));
}

#[test]
fn validate_mc_columns_and_seed_override() {
    let dir = scratch_dir("mc");
    let cfg = write_config(
        &dir,
        "run.conf",
        "[physical]\ng2 = 0.01\nmu = 1.0\nomega0 = 1.0\n\n[state]\neta1 = 0\neta2 = 0\neta3 = 0.5\n\n[grid]\nt_max = 5\nn_points = 11\n\n[run]\nseed = 3\nn_traj = 200\n",
    );
    let out1 = dir.join("mc1.csv");
    let out2 = dir.join("mc2.csv");
    let out3 = dir.join("mc3.csv");
    for (out, seed) in [(&out1, None), (&out2, None), (&out3, Some("4"))] {
        let mut args = vec![
            "validate-mc".to_string(),
            "--config".into(),
            cfg.clone(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
        ];
        if let Some(s) = seed {
            args.push("--seed".into());
            args.push(s.into());
        }
        let args_ref: Vec<&str> = args.iter().map(String::as_str).collect();
        let res = run_bredsim(&args_ref);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
    assert_ne!(fs::read(&out1).unwrap(), fs::read(&out3).unwrap());

    let (comments, header, rows) = parse_csv(&out1.to_string_lossy());
    assert!(header.starts_with("t,mean_eta1,stderr_eta1,markov_eta1,ratio_eta1"));
    assert_eq!(rows.len(), 11);
    assert!(comments.iter().any(|c| c.contains("n_traj = 200")));
    assert!(comments.iter().any(|c| c.contains("min_mean_eigenvalue")));
}

#[test]
fn redfield_mode_emits_limits() {
    let dir = scratch_dir("redfield");
    let cfg = write_config(
        &dir,
        "run.conf",
        "[physical]\ng2 = 0.01\nf2 = 0.003\nmu = 1.0\nnu = 2.0\nomega0 = 1.0\n\n[grid]\nt_max = 10\nn_points = 50\n",
    );
    let out = dir.join("redfield.csv");
    let res = run_bredsim(&[
        "redfield-coeffs",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(res.status.success());
    let (comments, header, rows) = parse_csv(&out.to_string_lossy());
    assert_eq!(header, "t,c33_onsite,c32_onsite,c33_cross,c32_cross");
    assert!(comments.iter().any(|c| c.starts_with("markov limits")));
    // the last row is near the limits: c33 -> g^2 mu / (mu^2 + omega0^2)
    let last = rows.last().unwrap();
    let c33: f64 = last[1].parse().unwrap();
    assert!((c33 - 0.005).abs() < 1e-6);
}

#[test]
fn bad_configurations_fail_loudly_without_output() {
    let dir = scratch_dir("bad");
    let out = dir.join("never.csv");

    // conflicting parameter blocks
    let cfg = write_config(
        &dir,
        "conflict.conf",
        "[generator]\nalpha = 0.1\nbeta = 0.3\nomega = 1\n[physical]\ng2 = 0.01\nmu = 1\nomega0 = 1\n",
    );
    let res = run_bredsim(&[
        "pair-lambda",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("conflicting parameter blocks"));
    assert!(!out.exists());

    // typo in a key
    let cfg = write_config(
        &dir,
        "typo.conf",
        "[generator]\nalpha = 0.1\nbeta = 0.3\nomega = 1\nomga = 2\n[grid]\nt_max = 1\nn_points = 10\n",
    );
    let res = run_bredsim(&[
        "pair-lambda",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("unknown key 'omga'"));

    // werner-scan outside its closed-form domain
    let cfg = write_config(
        &dir,
        "alpha.conf",
        "[generator]\nalpha = 0.1\nbeta = 0.5\nomega = 1\n[grid]\np_step = 0.01\n",
    );
    let res = run_bredsim(&[
        "werner-scan",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("alpha = 0"));

    // missing config file
    let res = run_bredsim(&["pair-lambda", "--config", "/nonexistent.conf"]);
    assert!(!res.status.success());
}
