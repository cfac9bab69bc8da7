use std::path::Path;
use std::process::{Command, Output};

fn besovop(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besovop")).args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 7] = [
        &["verify", "bogus"],
        &["synth", "--family", "fractional_rough"],
        &["spectrum", "--family", "no_such_family"],
        &["besov", "--kernel", "missing.kernel"],
        &["filters", "--filter", "daubechies:11"],
        &["schur", "--family", "tensor_bump", "--p", "2.5"],
        &["dwt", "-J", "40"],
    ];
    for args in cases {
        assert_eq!(besovop(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_besovop")).arg("filters").env("BESOVOP_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"family": "fractional_rough", "alpha": 0.75, "seed": 5, "levels": 6}"#).unwrap();
    let out = besovop(&["spectrum", "--config", cfg.to_str().unwrap(), "--seed", "9"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(dir.path().join("decay.json"));
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["config"]["levels"], 6);
    assert_eq!(r["length"], 64);

    std::fs::write(&cfg, r#"{"familly": "bump"}"#).unwrap();
    assert_eq!(besovop(&["spectrum", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
}

#[test]
fn zero_amplitude_kernel() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["besov", "spectrum", "schur"] {
        let out = besovop(&[cmd, "--family", "tensor_bump", "--param", "amplitude=0", "-J", "5"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let r = json(dir.path().join("besov.json"));
    assert_eq!(r["seminorm"], 0.0);
    let r = json(dir.path().join("decay.json"));
    assert_eq!(r["rank"], 0);
    let r = json(dir.path().join("schur.json"));
    assert_eq!(r["report"]["lower_bound"], 0.0);
}

#[test]
fn rank_one_kernel_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let n = 16;
    let mut text = String::from("KERNEL v1\n4 4 0 1 0 1\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|m| format!("{}", (1.0 + i as f64) * (2.0 - m as f64 / n as f64))).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    let path = dir.path().join("outer.kernel");
    std::fs::write(&path, text).unwrap();
    let out = besovop(&["spectrum", "--kernel", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(dir.path().join("decay.json"));
    assert_eq!(r["rank"], 1);
    assert_eq!(r["label"], "outer");
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mu: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(mu.len(), n);
    assert!(mu[1] < 1e-10 * mu[0]);
}

#[test]
fn constant_symbol_schur() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.kernel");
    let row = vec!["1"; 32].join(" ");
    std::fs::write(&path, format!("KERNEL v1\n5 5 0 1 0 1\n{}\n", vec![row; 32].join("\n"))).unwrap();
    let out = besovop(&["schur", "--kernel", path.to_str().unwrap(), "--filter", "haar", "--p", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(dir.path().join("schur.json"));
    assert!(r["report"]["lower_bound"].as_f64().unwrap() >= 0.999);
    assert_eq!(r["report"]["besov_rhs"], 1.0);
    assert_eq!(r["report"]["consistent"], true);
}

#[test]
fn csv_format_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = besovop(&["verify", "hardy", "--profile", "geometric", "--format", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("kind,name,value,limit,relation,pass\n"));
    assert_eq!(stdout, std::fs::read_to_string(dir.path().join("hardy.csv")).unwrap());
}

#[test]
fn synth_then_analyse() {
    let dir = tempfile::tempdir().unwrap();
    let out = besovop(&["synth", "--family", "wavelet_synthetic", "--alpha", "1", "--p", "1", "--seed", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let truth = json(dir.path().join("wavelet_synthetic_seed3.truth.json"));
    let planted = truth["planted"]["ground_truth"].as_f64().unwrap();
    let kernel = dir.path().join("wavelet_synthetic_seed3.kernel");
    let out = besovop(&["besov", "--kernel", kernel.to_str().unwrap(), "--p", "1", "--alpha", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let got = json(dir.path().join("besov.json"))["seminorm"].as_f64().unwrap();
    assert!((got - planted).abs() <= 0.02 * planted, "{got} vs {planted}");
}

#[test]
fn repeated_runs_are_identical() {
    let a = tempfile::tempdir().unwrap();
    let args = ["besov", "--family", "fractional_rough", "--alpha", "1", "--seed", "7", "-J", "6"];
    let first = besovop(&args, a.path());
    let snap = |d: &Path| {
        ["besov.json", "coeffs.csv", "approx.csv", "approx_loglog.csv"].map(|f| std::fs::read(d.join(f)).unwrap())
    };
    let before = snap(a.path());
    let second = besovop(&args, a.path());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(before, snap(a.path()));
}
