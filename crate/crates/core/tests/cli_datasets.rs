use std::process::Command;

use baker_otoc::cli::config::{CommandKind, ConfigLayer, ExperimentConfig};
use baker_otoc::cli::verify::{run_verify_with, Fault};
use baker_otoc::cli::{run, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_baker-otoc"))
}

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn otoc_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let code = run(["baker-otoc", "otoc", "--n", "128", "--tmax", "9", "--out", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
    }
    let text = read(&a);
    assert_eq!(text, read(&b));
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# baker-otoc 0.1.0 command=otoc n=128 tmax=9"));
    assert_eq!(lines.next().unwrap(), "t,f2,f4,f,f_sq_exact,f_sq_approx,rmt_saturation");
    assert_eq!(lines.clone().count(), 10);
    assert!(lines.next().unwrap().starts_with("0,64,64,0,,,"));
}

#[test]
fn cue_baseline_same_seed_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<String> = (0..2)
        .map(|i| {
            let p = dir.path().join(format!("cue{i}.csv"));
            let status = bin()
                .args(["cue-baseline", "--n", "128", "--samples", "100", "--seed", "7", "--out"])
                .arg(&p)
                .status()
                .unwrap();
            assert!(status.success());
            read(&p)
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let value = |kind: &str| -> f64 {
        let line = outs[0].lines().find(|l| l.starts_with(kind)).unwrap();
        line.rsplit(',').next().unwrap().parse().unwrap()
    };
    let (mean, se, formula) = (value("mean,"), value("standard_error,"), value("rmt_saturation,"));
    assert!((formula - 8.0005).abs() < 1e-3);
    assert!((mean - formula).abs() <= 3.0 * se, "{mean} +- {se}");
}

#[test]
fn cue_baseline_two_samples() {
    let out = bin().args(["cue-baseline", "--n", "32", "--samples", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("sample,")).count(), 2);
}

#[test]
fn exit_codes_from_binary() {
    let code = |args: &[&str]| bin().args(args).status().unwrap().code().unwrap();
    assert_eq!(code(&["otoc", "--n", "8192"]), EXIT_VALIDATION);
    assert_eq!(code(&["otoc", "--n", "63"]), EXIT_VALIDATION);
    assert_eq!(code(&["semiquantum", "--n", "96", "--tmax", "6"]), EXIT_VALIDATION);
    assert_eq!(code(&["otoc", "--n", "16", "--out", "/nonexistent-dir/x.csv"]), EXIT_IO);
    assert_eq!(code(&["verify", "--n", "32"]), EXIT_OK);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, format!("n = 64\ntmax = 2\nnormalize = true\nout = {}\n", out.display())).unwrap();
    let status = bin().args(["otoc", "--tmax", "4", "--config"]).arg(&cfg).status().unwrap();
    assert!(status.success());
    let text = read(&out);
    assert!(text.contains("n=64 tmax=4"));
    assert!(text.contains("normalize=true"));
    // f2(0)/N = 1/2
    assert!(text.lines().nth(3).unwrap().starts_with("0,0.5,0.5,0,"));
}

#[test]
fn spectrum_rows_per_step() {
    let out = bin().args(["spectrum", "--n", "64", "--tmax", "6"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<Vec<&str>> = text.lines().skip(2).map(|l| l.split(',').collect()).collect();
    assert_eq!(data.len(), 7 * 2 * 32);
    // t = log2 N: eigenvalue moduli sit near 1/sqrt 2
    let moduli: Vec<f64> = data
        .iter()
        .filter(|r| r[0] == "6" && r[1] == "eig")
        .map(|r| r[3].parse::<f64>().unwrap().hypot(r[4].parse::<f64>().unwrap()))
        .collect();
    assert_eq!(moduli.len(), 32);
    let near = moduli.iter().filter(|m| (*m - 0.5f64.sqrt()).abs() < 0.1).count();
    assert!(near * 10 >= moduli.len() * 8, "{moduli:?}");
}

#[test]
fn semiquantum_command() {
    let out = bin().args(["semiquantum", "--n", "256"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        // numeric semiquantum f against the closed form
        assert!((r[3] - r[4]).abs() < 1e-8 * r[4]);
    }
    assert!(rows[0][1] < 1e-12);
}

#[test]
fn verify_non_dyadic_and_fault() {
    let config = ExperimentConfig::resolve(
        CommandKind::Verify,
        ConfigLayer {
            n: Some(210),
            ..Default::default()
        },
    )
    .unwrap();
    let clean = run_verify_with(&config, Fault::None);
    assert!(clean.all_passed(), "{}", clean.render());
    let broken = run_verify_with(&config, Fault::FlipDftPhase);
    assert!(!broken.all_passed());
    assert!(broken.render().contains("[FAIL] dft unitarity"));
    assert_eq!(EXIT_NUMERICAL, 2);
}
