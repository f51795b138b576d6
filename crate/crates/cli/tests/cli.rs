use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use homs::{solve, ModelParams, Pruning, Signal};
use tempfile::TempDir;

fn homs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homs")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = homs(args);
    assert!(
        out.status.success(),
        "homs {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn value(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key}= in {stdout}"))
        .to_string()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn numbers(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.trim().parse().ok())
        .collect()
}

fn table(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn smooth_step_in_potts_mode() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.csv", "value\n-1\n-1\n1\n1\n");
    let segs = dir.path().join("segs.csv");
    let est = dir.path().join("u.csv");
    let out = ok(&[
        "smooth", "--input", s(&input), "--k", "2", "--potts", "--gamma", "0.5", "--output", s(&est), "--segments",
        s(&segs),
    ]);
    assert_eq!(fs::read_to_string(&segs).unwrap(), "left,right\n1,2\n3,4\n");
    assert_eq!(value(&out, "segments"), "2");
    assert!((value(&out, "energy").parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    value(&out, "error_updates").parse::<u64>().unwrap();
    assert_eq!(numbers(&est), vec![-1.0, -1.0, 1.0, 1.0]);
}

#[test]
fn smooth_constant_input() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.csv", &"2.5\n".repeat(30));
    let segs = dir.path().join("segs.csv");
    let est = dir.path().join("u.csv");
    for beta in ["0.3", "4", "inf"] {
        ok(&[
            "smooth", "--input", s(&input), "--k", "1", "--beta", beta, "--gamma", "0.01", "--output", s(&est),
            "--segments", s(&segs),
        ]);
        assert_eq!(fs::read_to_string(&segs).unwrap(), "left,right\n1,30\n");
        assert!(numbers(&est).iter().all(|u| (u - 2.5).abs() < 1e-12));
    }
}

#[test]
fn smooth_estimate_round_trips() {
    let dir = TempDir::new().unwrap();
    let vals: Vec<f64> = (0..200).map(|i| ((i * 37 % 11) as f64).sin() + (i / 50) as f64).collect();
    let body: String = vals.iter().map(|v| format!("{v:e}\n")).collect();
    let input = write(&dir, "f.csv", &body);
    let est = dir.path().join("u.csv");
    let out = ok(&[
        "smooth", "--input", s(&input), "--k", "2", "--beta", "1.5", "--gamma", "0.3", "--output", s(&est),
    ]);
    let res = solve(
        &Signal::new(vals).unwrap(),
        &ModelParams::new(2, 1.5, 0.3).unwrap(),
        Pruning::Both,
    )
    .unwrap();
    assert_eq!(numbers(&est), res.estimate.as_slice());
    assert_eq!(value(&out, "energy").parse::<f64>().unwrap(), res.energy);
    assert_eq!(value(&out, "segments"), res.partition.len().to_string());
}

#[test]
fn smooth_pruning_modes_agree() {
    let dir = TempDir::new().unwrap();
    let body: String = (0..300).map(|i| format!("{}\n", ((i * 7919) % 13) as f64 / 4.0 + (i / 60) as f64)).collect();
    let input = write(&dir, "f.csv", &body);
    let run = |p: &str| ok(&["smooth", "--input", s(&input), "--k", "2", "--gamma", "0.5", "--pruning", p]);
    let none = run("none");
    assert_eq!(value(&none, "error_updates"), (300 * 299 / 2).to_string());
    for p in ["both", "amp", "kf"] {
        assert_eq!(value(&run(p), "energy"), value(&none, "energy"));
    }
}

#[test]
fn malformed_input_names_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.csv", "value\n1.0\n2.0\nabc\n");
    let out = homs(&["smooth", "--input", s(&input), "--gamma", "1"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");

    let input = write(&dir, "g.csv", "1\nnan\n");
    let out = homs(&["smooth", "--input", s(&input), "--gamma", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = homs(&["smooth", "--input", s(&dir.path().join("missing.csv")), "--gamma", "1"]);
    assert!(!out.status.success());

    let input = write(&dir, "h.csv", "1\n2\n");
    let out = homs(&["smooth", "--input", s(&input), "--gamma", "-1"]);
    assert!(!out.status.success());
    let out = homs(&["smooth", "--input", s(&input), "--gamma", "1", "--k", "0"]);
    assert!(!out.status.success());
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for prefix in [&a, &b] {
        let out = ok(&["generate", "--kind", "heavysine", "--n", "500", "--eta", "0.1", "--output", s(prefix)]);
        assert_eq!(value(&out, "seed"), "42");
    }
    for suffix in ["clean", "noisy", "segments"] {
        let read = |p: &Path| fs::read_to_string(format!("{}_{suffix}.csv", p.display())).unwrap();
        assert_eq!(read(&a), read(&b));
    }
    let noisy = fs::read_to_string(format!("{}_noisy.csv", a.display())).unwrap();
    assert!(noisy.starts_with('#') && noisy.lines().next().unwrap().contains("seed=42"));
}

#[test]
fn generate_blocks_without_noise_is_piecewise_constant() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("bl");
    ok(&["generate", "--kind", "blocks", "--n", "1000", "--output", s(&prefix)]);
    let clean = numbers(Path::new(&format!("{}_clean.csv", prefix.display())));
    let noisy = numbers(Path::new(&format!("{}_noisy.csv", prefix.display())));
    assert_eq!(clean, noisy);
    let segs = table(Path::new(&format!("{}_segments.csv", prefix.display())));
    assert_eq!(segs.len(), 12);
    for seg in segs {
        let (l, r) = (seg[0] as usize, seg[1] as usize);
        assert!(clean[l - 1..r].iter().all(|&x| x == clean[l - 1]));
    }
}

#[test]
fn generate_pw_poly_segment_count() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("pp");
    let out = ok(&["generate", "--kind", "pw_poly", "--p", "0.01", "--n", "10000", "--output", s(&prefix)]);
    let rows = table(Path::new(&format!("{}_segments.csv", prefix.display()))).len();
    assert!((70..=130).contains(&rows), "{rows} segments");
    assert_eq!(value(&out, "segments"), rows.to_string());
}

#[test]
fn gridsearch_picks_potts_for_blocks() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("bl");
    ok(&["generate", "--kind", "blocks", "--n", "1000", "--eta", "0.2", "--output", s(&prefix)]);
    let f = |x: &str| format!("{}_{x}.csv", prefix.display());
    let out = ok(&[
        "gridsearch", "--input", &f("noisy"), "--truth", &f("clean"), "--truth-segments", &f("segments"), "--k", "1",
        "--gammas", "0.02:0.02:1", "--betas", "0.5,1,2,5,10,inf",
    ]);
    assert_eq!(value(&out, "best_beta"), "inf");
    assert!(value(&out, "rand").parse::<f64>().unwrap() >= 0.98);
    assert_eq!(value(&out, "evaluated"), "300");
}

#[test]
fn gridsearch_exact_fit_without_noise() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.csv", "0\n1\n5\n2\n2\n2\n-3\n");
    let out = ok(&[
        "gridsearch", "--input", s(&input), "--truth", s(&input), "--k", "1", "--gammas", "0.001,0.5,1", "--betas",
        "1,inf",
    ]);
    assert_eq!(value(&out, "rel_l2").parse::<f64>().unwrap(), 0.0);
    assert_eq!(value(&out, "best_gamma"), "0.001");
    assert_eq!(value(&out, "best_beta"), "1");
}

#[test]
fn gridsearch_single_point() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.csv", "0\n1.2\n0.1\n2\n2.2\n");
    let truth = write(&dir, "g.csv", "0\n1\n0\n2\n2\n");
    let segs = write(&dir, "s.csv", "left,right\n1,3\n4,5\n");
    let out = ok(&[
        "gridsearch", "--input", s(&input), "--truth", s(&truth), "--truth-segments", s(&segs), "--k", "2",
        "--gammas", "0.3", "--betas", "2.5", "--objective", "rand",
    ]);
    assert_eq!(value(&out, "best_beta"), "2.5");
    assert_eq!(value(&out, "best_gamma"), "0.3");
    assert_eq!(value(&out, "evaluated"), "1");
    value(&out, "rand").parse::<f64>().unwrap();

    let out = homs(&["gridsearch", "--input", s(&input), "--truth", s(&truth), "--objective", "rand"]);
    assert!(!out.status.success());
}

fn stability_max(k: &str, mode: &str) -> f64 {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("st.csv");
    let out = ok(&["stability", "--k", k, "--n", "100", "--mode", mode, "--output", s(&csv)]);
    let rows = table(&csv);
    assert_eq!(rows.len(), 100);
    let norm: f64 = value(&out, "norm_sq").parse().unwrap();
    let worst = rows.iter().flat_map(|r| [r[1].abs(), r[2].abs()]).fold(0.0, f64::max);
    assert_eq!(value(&out, "max_relative").parse::<f64>().unwrap(), worst / norm);
    worst / norm
}

#[test]
fn stability_engine_is_exact_on_polynomials() {
    for k in ["2", "3", "4"] {
        assert!(stability_max(k, "spline") <= 1e-10);
        assert!(stability_max(k, "poly") <= 1e-10);
    }
}

#[test]
fn stability_moments_distort_parabola() {
    let worst = stability_max("3", "moments");
    assert!(worst > 1e-6, "moments worst {worst:e} of |f|^2");
}

fn bench_slope(scenario: &str, sizes: &str) -> (f64, usize) {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let out = ok(&[
        "bench", "--scenario", scenario, "--sizes", sizes, "--k", "2", "--potts", "--gamma", "0.1", "--reps", "2",
        "--output", s(&csv),
    ]);
    (value(&out, "slope").parse().unwrap(), table(&csv).len())
}

#[test]
fn bench_pw_poly_is_linear() {
    let (slope, rows) = bench_slope("pw_poly", "1000,2000,4000,7000,10000");
    assert_eq!(rows, 5);
    assert!((0.9..=1.2).contains(&slope), "slope {slope}");
}

#[test]
fn bench_fixed_jumps_is_quadratic() {
    let (slope, _) = bench_slope("fixed_jumps", "512,1024,2048,4096,8192");
    assert!((1.7..=2.2).contains(&slope), "slope {slope}");
}

#[test]
fn bench_single_size() {
    let out = ok(&["bench", "--scenario", "pw_poly", "--sizes", "300", "--reps", "1", "--potts"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,mean_seconds,mean_updates");
    assert!(lines[1].starts_with("300,"));
    assert!(!out.contains("slope="));
}
