use std::path::Path;
use std::process::{Command, Output};

use fpl::record::{Quantity, ResultRecord};

fn fpl(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpl"))
        .args(args)
        .env("FPL_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str], cache: &Path) -> String {
    let o = fpl(args, cache);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

/// CSV body without the echo comment, split into fields.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

// {p^0.1} < 1/2 by integer comparisons only.
fn in_lower_half_tenth_power(p: u64) -> bool {
    let mut k = 1u64;
    while (k + 1).pow(10) <= p {
        k += 1;
    }
    1024 * p < (2 * k + 1).pow(10)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn level_prints_the_formula_value() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ok(&["level", "--alpha", "0.1"], dir.path()), "0.34\n");
    assert_eq!(
        ok(&["level", "--alpha", "0.0000001"], dir.path()),
        "0.39999994\n"
    );
    let json = ok(&["level", "--alpha", "0.1", "--output", "json"], dir.path());
    let r = ResultRecord::from_json(&json).unwrap();
    assert!((r.values["theta"].as_f64().unwrap() - 0.34).abs() < 1e-15);
}

#[test]
fn bv_matches_naive_recount() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "bv", "--X", "100000", "--Q", "31", "--alpha", "0.1", "--I", "0,0.5",
        ],
        dir.path(),
    );
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["q", "worst_a", "deviation"]);
    assert_eq!(rows.len(), 1 + 31 + 1);
    assert_eq!(rows[32][0], "total");

    let primes: Vec<u64> = (2..=100_000)
        .filter(|&n| is_prime(n) && in_lower_half_tenth_power(n))
        .collect();
    let mut total = 0.0;
    for q in 1..=31u64 {
        let units: Vec<u64> = (0..q).filter(|&a| q == 1 || gcd(a, q) == 1).collect();
        let mean = primes.len() as f64 / units.len() as f64;
        let dev = units
            .iter()
            .map(|&a| (primes.iter().filter(|&&p| p % q == a).count() as f64 - mean).abs())
            .fold(0.0, f64::max);
        let got: f64 = rows[q as usize][2].parse().unwrap();
        assert!((got - dev).abs() < 1e-9, "q = {q}: {got} vs {dev}");
        total += dev;
    }
    let got: f64 = rows[32][2].parse().unwrap();
    assert!((got - total).abs() < 1e-9);
}

#[test]
fn cache_round_trip_gives_identical_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "count",
        "--X",
        "1e6",
        "--q",
        "7",
        "--a",
        "3",
        "--alpha",
        "0.1",
        "--I",
        "0,0.5",
        "--no-timing",
    ];
    let fresh = fpl(&args, dir.path());
    assert!(!String::from_utf8_lossy(&fresh.stderr).contains("prime cache"));
    ok(&["cache", "--build", "1e6"], dir.path());
    let file = dir.path().join("primes-2-1000001.fpl");
    let bytes = std::fs::read(&file).unwrap();
    assert_eq!(&bytes[..4], b"FPL1");
    assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 2);
    assert_eq!(
        u64::from_le_bytes(bytes[12..20].try_into().unwrap()),
        1_000_001
    );
    let cached = fpl(&args, dir.path());
    assert!(String::from_utf8_lossy(&cached.stderr).contains("prime cache"));
    assert_eq!(fresh.stdout, cached.stdout);
    let r = ResultRecord::from_json(&stdout(&cached)).unwrap();
    assert_eq!(r.values["count"], Quantity::Int(3190));
    assert_eq!(r.values["pi"], Quantity::Int(13105));
}

#[test]
fn expsum_small_example() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        &[
            "expsum", "--X", "10", "--Y", "20", "--h", "1", "--alpha", "0.5", "--q", "3", "--a",
            "1",
        ],
        dir.path(),
    );
    let r = ResultRecord::from_json(&text).unwrap();
    let e = |x: f64| {
        let t = std::f64::consts::TAU * x.fract();
        (t.cos(), t.sin())
    };
    let (a, b) = (e(13f64.sqrt()), e(19f64.sqrt()));
    assert!((r.values["value_re"].as_f64().unwrap() - (a.0 + b.0)).abs() < 1e-12);
    assert!((r.values["value_im"].as_f64().unwrap() - (a.1 + b.1)).abs() < 1e-12);
    assert_eq!(r.values["count"], Quantity::Int(2));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["params", "value_re", "value_im", "count", "elapsed_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    // h = -1 conjugates.
    let conj = ResultRecord::from_json(&ok(
        &[
            "expsum", "--X", "10", "--Y", "20", "--h", "-1", "--alpha", "0.5", "--q", "3", "--a",
            "1",
        ],
        dir.path(),
    ))
    .unwrap();
    assert_eq!(conj.values["value_re"], r.values["value_re"]);
    assert_eq!(
        conj.values["value_im"].as_f64().unwrap(),
        -r.values["value_im"].as_f64().unwrap()
    );
}

#[test]
fn records_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec![
            "expsum", "--X", "5000", "--h", "3", "--alpha", "0.3", "--q", "4", "--a", "3",
        ],
        vec![
            "oscint", "--phase", "gaussian", "--scale", "200", "--t0", "0", "--radius", "1",
        ],
        vec!["bv", "--X", "20000", "--Q", "10", "--output", "json"],
        vec!["selftest", "--output", "json"],
    ] {
        let text = ok(&args, dir.path());
        let r = ResultRecord::from_json(&text).unwrap();
        assert_eq!(r.to_json(), text, "{args:?}");
        assert_eq!(r.version, env!("CARGO_PKG_VERSION"));
        assert!(r.all_invariants_hold());
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["bv", "--X", "300000", "--Q", "40"],
        vec![
            "expsum",
            "--X",
            "400000",
            "--h",
            "7",
            "--alpha",
            "0.05",
            "--q",
            "9",
            "--a",
            "4",
            "--sweep-q",
            "12",
        ],
        vec!["decompose-check", "--nmax", "600"],
        vec!["kloosterman", "--qmax", "25"],
        vec!["classify", "--samples", "300", "--sigma", "0.12"],
        vec!["sieve", "--lo", "1000000", "--hi", "5000000"],
    ];
    for case in cases {
        let runs: Vec<String> = ["1", "4", "8"]
            .iter()
            .map(|t| {
                let mut args = case.clone();
                args.extend(["--threads", t, "--no-timing"]);
                ok(&args, dir.path())
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{case:?}");
        assert_eq!(runs[0], runs[2], "{case:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| fpl(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["level", "--alpha", "1.5"]), 2);
    assert_eq!(code(&["count", "--q", "6", "--a", "4"]), 2);
    assert_eq!(code(&["bv", "--X", "1000", "--Q", "1000"]), 2);
    assert_eq!(
        code(&["oscint", "--phase", "gaussian", "--tol", "1e-13"]),
        2
    );
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["sieve", "--hi", "1e15"]), 4);
    assert_eq!(
        code(&["kloosterman", "--qmax", "20000000", "--qmin", "20000000"]),
        4
    );
    assert_eq!(code(&["selftest"]), 0);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "alpha = 0.1\nalhpa = 0.2\n").unwrap();
    let o = fpl(&["level", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alhpa"));
}

#[test]
fn config_file_with_flag_overrides_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "alpha = 0.05\nX = 20000\nQ = 12\ninterval = [0.25, 0.75]\nthreads = 2\n",
    )
    .unwrap();
    let text = ok(
        &[
            "bv",
            "--config",
            cfg.to_str().unwrap(),
            "--Q",
            "9",
            "--output",
            "json",
        ],
        dir.path(),
    );
    let r = ResultRecord::from_json(&text).unwrap();
    assert_eq!(r.params["alpha"], 0.05);
    assert_eq!(r.params["Q"], 9);
    assert_eq!(r.params["interval"], serde_json::json!([0.25, 0.75]));
    assert!(!r.params.contains_key("threads"));
    assert_eq!(r.values["rows"], Quantity::Int(9));
}

#[test]
fn artifacts_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out/bv.csv");
    let plots = dir.path().join("plots");
    let o = fpl(
        &[
            "bv",
            "--X",
            "50000",
            "--Q",
            "20",
            "--out",
            out.to_str().unwrap(),
            "--plot-dir",
            plots.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# fpl "));
    let plot = std::fs::read_to_string(plots.join("discrepancy_vs_q.csv")).unwrap();
    let rows = csv_rows(&plot);
    assert_eq!(rows[0], ["x", "y", "series"]);
    assert_eq!(rows.len(), 21);
    let ys: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(
        ys.windows(2).all(|w| w[0] <= w[1]),
        "cumulative discrepancy is monotone"
    );

    ok(
        &[
            "expsum",
            "--X",
            "100000",
            "--h",
            "2",
            "--sweep-q",
            "10",
            "--plot-dir",
            plots.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(
        csv_rows(&std::fs::read_to_string(plots.join("ratio_vs_q.csv")).unwrap()).len(),
        11
    );
    ok(
        &[
            "oscint",
            "--phase",
            "gaussian",
            "--t0",
            "0",
            "--radius",
            "1",
            "--sweep",
            "50,200,800",
            "--plot-dir",
            plots.to_str().unwrap(),
        ],
        dir.path(),
    );
    let rows =
        csv_rows(&std::fs::read_to_string(plots.join("expansion_error_vs_curvature.csv")).unwrap());
    assert_eq!(rows.len(), 1 + 9);
    let one_term: Vec<f64> = rows[1..]
        .iter()
        .filter(|r| r[2] == "terms=1")
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert!(one_term[0] <= 0.05 && one_term[0] > one_term[1] && one_term[1] > one_term[2]);
}

#[test]
fn kloosterman_and_decompose_tables() {
    let dir = tempfile::tempdir().unwrap();
    let rows = csv_rows(&ok(
        &["kloosterman", "--qmax", "7", "--primes-only"],
        dir.path(),
    ));
    assert_eq!(rows[0], ["q", "u", "v", "value", "bound", "margin"]);
    assert_eq!(rows.len() - 1, 4 + 9 + 25 + 49);
    let s311 = rows.iter().find(|r| r[..3] == ["3", "1", "1"]).unwrap();
    assert_eq!(s311[3].parse::<f64>().unwrap(), -1.0);

    let rows = csv_rows(&ok(&["decompose-check", "--nmax", "300"], dir.path()));
    assert_eq!(rows.len() - 1, 299);
    for r in &rows[1..] {
        assert!(r[4].parse::<f64>().unwrap() <= 1e-9, "{r:?}");
    }
    let rows = csv_rows(&ok(
        &["classify", "--t", "0.7,0.3", "--sigma", "0.15"],
        dir.path(),
    ));
    assert!(rows[1..].iter().any(|r| r[3] == "I:0"));
}
