use std::fs;
use std::path::Path;
use std::process::Command;

use gmch_lab::certify::{certify, CertifyOptions};
use gmch_lab::config::{FrameFormat, InitialData};
use gmch_lab::io::read_frames;
use gmch_lab::simulate::simulate;
use gmch_lab::stability::{sweep, AbortKind};
use gmch_lab::weakres::{residual_table, worst_scaled, WeakresOptions};
use gmch_lab::{ExperimentConfig, LabError};

fn gmch(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gmch")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn config(dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.output_dir = dir.to_path_buf();
    cfg.grid.points = 2048;
    cfg
}

#[test]
fn certify_base_case_passes() {
    let b = certify(&CertifyOptions { n_max: 1, ..Default::default() }).unwrap();
    assert!(b.all_passed);
    let json: serde_json::Value = serde_json::to_value(&b).unwrap();
    let ids: Vec<&str> = json["certificates"].as_array().unwrap().iter().map(|c| c["identity_id"].as_str().unwrap()).collect();
    for id in ["E2.14", "E2.15", "E2.16", "E2.17", "E3.33", "E3.34", "E3.35", "R4.3", "R4.4", "PHI_NONPOS", "COMBINATION_FORMULA"] {
        assert!(ids.contains(&id), "{id} missing");
    }
    assert!(json["certificates"].as_array().unwrap().iter().all(|c| c.get("witness").is_none()));
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout) = gmch(&["certify", "--n-max", "4", "--out", out]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["all_passed"], true);
    assert!(dir.path().join("certificates.json").exists());

    let (code, stdout) = gmch(&["certify", "--n-max", "4", "--inject-fault", "2"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let bad: Vec<&serde_json::Value> =
        v["certificates"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
    assert!(!bad.is_empty());
    assert_eq!(bad[0]["witness"]["n"], 2);
}

#[test]
fn simulate_zero_data_gives_zero_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.initial = InitialData::Zero;
    let s = simulate(&cfg).unwrap();
    assert!(s.completed);
    let text = fs::read_to_string(dir.path().join("observer.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,E,F,M,xi,lhs_3_5,min_y,min_u_pm_ux");
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(&cols[1..4], &[0.0, 0.0, 0.0]);
        assert_eq!(cols[5], 0.0);
    }
}

#[test]
fn simulate_keeps_momentum_sign_for_n_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.n = 2;
    cfg.c = 8.0 / 15.0;
    cfg.mollifier.width = 2.0;
    cfg.grid.points = 4096;
    let s = simulate(&cfg).unwrap();
    assert!(s.min_y >= -1e-8, "{}", s.min_y);
    assert!(s.drift_e <= 1e-8 && s.drift_f <= 1e-8);
    let prof = fs::read_to_string(dir.path().join("final_profile.csv")).unwrap();
    assert_eq!(prof.lines().next().unwrap(), "x,u,u_x,y");
    assert_eq!(prof.lines().count(), 4097);
}

#[test]
fn simulate_frames_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.frames.format = FrameFormat::Binary;
    cfg.frames.every = 2;
    let s = simulate(&cfg).unwrap();
    let frames = read_frames(fs::File::open(dir.path().join("frames.bin")).unwrap()).unwrap();
    assert_eq!(frames.len(), s.observations.div_ceil(2));
    assert!(frames.iter().all(|f| f.samples.len() == 2048 && f.half_length == 25.0));
    assert_eq!(frames[0].t, 0.0);
    let first = fs::read_to_string(dir.path().join("initial_profile.csv")).unwrap();
    let u0: Vec<f64> = first.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(frames[0].samples, u0);

    cfg.frames.format = FrameFormat::Csv;
    simulate(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join("frames.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + frames.len());
    assert!(text.lines().all(|l| l.split(',').count() == 2049));
}

#[test]
fn simulate_blow_up_exit_code_and_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "n = 1\nt_end = 2.0\n[grid]\npoints = 1024\n[mollifier]\nwidth = 0.2\n[solver]\nresolution_tolerance = 1e-10\nobserve_every = 1\n";
    let path = dir.path().join("run.toml");
    fs::write(&path, toml).unwrap();
    let out = dir.path().join("out");
    let (code, _) = gmch(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 4);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["completed"], false);
    assert_eq!(summary["blow_up"], "Underresolved");
    assert!(summary["t_reached"].as_f64().unwrap() < 2.0);
    // Header plus at least the t = 0 record.
    assert!(fs::read_to_string(out.join("observer.csv")).unwrap().lines().count() >= 2);
}

#[test]
fn bad_configuration_is_an_internal_error() {
    let (code, _) = gmch(&["simulate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code, 1);
    let (code, _) = gmch(&["simulate", "--points", "1000"]);
    assert_eq!(code, 1);
}

#[test]
fn stability_gate_and_floor_are_hypothesis_violations() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.stability.epsilons = vec![0.2, 1e-3];
    let r = sweep(&cfg).unwrap();
    assert!(r.rows.is_empty());
    assert_eq!(r.aborted.len(), 2);
    assert!(r.aborted.iter().all(|a| a.kind == AbortKind::Hypothesis));
    assert!(r.aborted.iter().any(|a| a.message.contains("outside")));
    assert!(r.aborted.iter().any(|a| a.message.contains("unreachable")));
    assert!(matches!(r.error(), Some(LabError::Hypothesis(_))));
    let (code, _) = gmch(&["stability", "--eps", "0.2", "--points", "2048", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 3);
}

fn near_gate_config(dir: &Path) -> ExperimentConfig {
    // Width 0.02 needs N = 2^13 at L = 20; only then does the mollified
    // peakon sit below the (3 − 2√2)a gate.
    let mut cfg = ExperimentConfig::default();
    cfg.output_dir = dir.to_path_buf();
    cfg.grid.half_length = 20.0;
    cfg.grid.points = 1 << 13;
    cfg.mollifier.width = 0.02;
    cfg.t_end = 0.05;
    cfg.stability.epsilons = vec![0.165, 0.15];
    cfg.seed = 11;
    cfg
}

#[test]
fn stability_report_near_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = near_gate_config(dir.path());
    let r = gmch_lab::stability::stability(&cfg).unwrap();
    assert!(r.aborted.is_empty());
    assert_eq!(r.rows.len(), 2);
    assert!(r.rows[0].epsilon < r.rows[1].epsilon);
    for row in &r.rows {
        assert!((row.epsilon - row.target_epsilon).abs() <= 1e-6);
        assert!(row.epsilon < r.gate);
        // ε is measured against the peakon at 0; the trace uses the
        // argmax, where u is at least as large, so the distance is smaller.
        assert!(row.trace[0].distance <= row.epsilon + 1e-9);
        assert!(row.sup_distance >= row.trace[0].distance);
    }
    assert!(r.fitted_constant.is_some() && r.deviation_fit.is_some());
    let ratio = r.envelope_ratio.unwrap();
    assert_eq!(r.envelope_holds, Some(ratio <= 1.0));
    for f in ["stability_report.json", "stability_rows.csv", "stability_trace.csv", "stability_trace.dat"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let mut cfg = config(d);
        cfg.frames.format = FrameFormat::Csv;
        simulate(&cfg).unwrap();
        let mut cfg = near_gate_config(d);
        cfg.stability.bump_offset = None;
        gmch_lab::stability::stability(&cfg).unwrap();
    }
    for f in ["observer.csv", "frames.csv", "final_profile.csv", "stability_rows.csv", "stability_trace.csv", "stability_report.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn weakres_tables() {
    let opts = WeakresOptions { ns: vec![1], amplitudes: vec![1.0], times: vec![0.0, 1.0], ..Default::default() };
    let rows = residual_table(&opts).unwrap();
    assert_eq!(rows.len(), 200);
    assert!(worst_scaled(&rows) <= 1e-8);

    let opts = WeakresOptions { ns: vec![3], amplitudes: vec![2.0], times: vec![0.5], points: 25, ..Default::default() };
    let rows = residual_table(&opts).unwrap();
    assert!(rows.iter().all(|r| r.residual.abs() <= 1e-8 * 2f64.powi(7)));

    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = gmch(&["weakres", "--n", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(fs::read_to_string(dir.path().join("residuals.csv")).unwrap(), "n,a,t,x,residual,tolerance_achieved\n");
}
