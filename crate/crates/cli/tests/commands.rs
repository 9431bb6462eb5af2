use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lasso-tradeoff"))
        .args(args)
        .env_remove("LASSO_TRADEOFF_MAX_CELLS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn boundary_truncates_below_u_star() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    ok(&[
        "boundary",
        "--delta",
        "0.3",
        "--epsilon",
        "0.15",
        "--n-points",
        "200",
        "--out",
        s(&out),
    ]);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 200);
    let u: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(u.iter().copied().fold(f64::MIN, f64::max) < 0.6791);
    let q: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(q.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn boundary_two_points_and_bad_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    ok(&[
        "boundary",
        "--delta",
        "1.0",
        "--epsilon",
        "0.2",
        "--n-points",
        "2",
        "--out",
        s(&out),
    ]);
    assert_eq!(data_rows(&out).len(), 2);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# lasso-tradeoff "));
    assert!(text.contains("# rng = ChaCha8"));
    for bad in [
        ["--delta", "-1", "--epsilon", "0.2"],
        ["--delta", "1", "--epsilon", "1.5"],
    ] {
        let mut args = vec!["boundary"];
        args.extend(bad);
        args.extend(["--out", s(&out)]);
        let r = run(&args);
        assert!(!r.status.success());
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn se_curve_dominates_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let se = dir.path().join("se.csv");
    let b = dir.path().join("b.csv");
    ok(&[
        "se-curve",
        "--prior",
        "50:0.2",
        "--delta",
        "1",
        "--sigma",
        "0",
        "--alpha",
        "0.5:15:60",
        "--out",
        s(&se),
    ]);
    ok(&[
        "boundary",
        "--delta",
        "1",
        "--epsilon",
        "0.2",
        "--n-points",
        "400",
        "--out",
        s(&b),
    ]);
    let bound: Vec<(f64, f64)> = data_rows(&b)
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let rows = data_rows(&se);
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r.len(), 7);
        let tpp: f64 = r[3].parse().unwrap();
        let fdp: f64 = r[4].parse().unwrap();
        // q* is increasing, so the sample just below tpp bounds it from below.
        let q = bound.iter().filter(|(u, _)| *u <= tpp).map(|x| x.1).fold(0.0, f64::max);
        assert!(fdp >= q - 1e-9, "tpp {tpp} fdp {fdp} q {q}");
    }
}

#[test]
fn se_curve_rejects_zero_signal_prior() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("se.csv");
    for prior in ["0:1", "1:0", ""] {
        assert!(!run(&["se-curve", "--prior", prior, "--delta", "1", "--out", s(&out)])
            .status
            .success());
    }
}

#[test]
fn simulate_is_reproducible_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "simulate", "--n", "80", "--p", "120", "--prior", "4:0.1", "--reps", "4", "--seed", "11",
    ];
    let mut args = base.to_vec();
    args.extend(["--jobs", "1", "--out", s(&a)]);
    ok(&args);
    let mut args = base.to_vec();
    args.extend(["--jobs", "3", "--out", s(&b)]);
    ok(&args);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let ea = dir.path().join("a.events.csv");
    assert!(ea.exists());
    assert_eq!(
        std::fs::read(&ea).unwrap(),
        std::fs::read(dir.path().join("b.events.csv")).unwrap()
    );

    let text = std::fs::read_to_string(&a).unwrap();
    for needle in [
        "# base_seed = 11",
        "# rng = ChaCha8",
        "# replicate 3: seed = 14",
        "# prior = 4:0.1",
    ] {
        assert!(text.contains(needle), "{needle}");
    }
    assert_eq!(data_rows(&ea).len(), 4);
}

#[test]
fn events_recomputed_from_trace() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.csv");
    ok(&[
        "simulate",
        "--n",
        "80",
        "--p",
        "120",
        "--prior",
        "4:0.1",
        "--reps",
        "3",
        "--out",
        s(&t),
    ]);
    let e = dir.path().join("e.csv");
    ok(&["events", "--trace", s(&t), "--out", s(&e)]);
    let direct = data_rows(&dir.path().join("t.events.csv"));
    let again = data_rows(&e);
    assert_eq!(direct.len(), again.len());
    for (d, a) in direct.iter().zip(&again) {
        // TPP at first false and FDP at full power come from counts alone.
        assert_eq!(d[..3], a[..3]);
    }
}

#[test]
fn simulate_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let r = run(&[
        "simulate",
        "--n",
        "10",
        "--p",
        "10",
        "--prior",
        "1:0.1",
        "--reps",
        "0",
        "--out",
        s(&out),
    ]);
    assert!(!r.status.success());
    assert!(!out.exists());
    let r = Command::new(env!("CARGO_BIN_EXE_lasso-tradeoff"))
        .args([
            "simulate",
            "--n",
            "100",
            "--p",
            "100",
            "--prior",
            "1:0.1",
            "--reps",
            "1",
            "--out",
            s(&out),
        ])
        .env("LASSO_TRADEOFF_MAX_CELLS", "5000")
        .output()
        .unwrap();
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("cap"));
}

#[test]
fn l0_rate_report_and_caps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l0.csv");
    ok(&[
        "l0",
        "--n",
        "20",
        "--p",
        "12",
        "--prior",
        "100:0.25",
        "--sigma",
        "0.1",
        "--reps",
        "6",
        "--exact-counts",
        "--out",
        s(&out),
    ]);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 6);
    assert!(std::fs::read_to_string(&out).unwrap().contains("# success_rate = "));

    ok(&[
        "l0",
        "--n",
        "20",
        "--p",
        "12",
        "--prior",
        "1:0.25",
        "--lambda",
        "1e9",
        "--reps",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(data_rows(&out).iter().all(|r| r[1] == "0"));

    let r = run(&[
        "l0",
        "--n",
        "30",
        "--p",
        "25",
        "--prior",
        "1:0.2",
        "--reps",
        "1",
        "--out",
        s(&out),
    ]);
    assert!(!r.status.success());
}
