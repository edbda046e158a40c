use std::process::{Command, Output};

fn orthozeros(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthozeros")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(orthozeros(&["bogus"]).status.code(), Some(2));
    assert_eq!(orthozeros(&["kac", "--n", "5", "--full-line", "--tol", "x"]).status.code(), Some(2));
    assert_eq!(orthozeros(&["simulate", "--n", "5", "--trials", "1"]).status.code(), Some(2));
    assert_eq!(orthozeros(&["--version"]).status.code(), Some(0));
}

#[test]
fn recurrence_csv_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("h.ozr");
    let csv = dir.path().join("h.csv");
    let c = cache.to_str().unwrap();
    let first = orthozeros(&["recurrence", "--n-max", "12", "--cache", c, "--output", csv.to_str().unwrap()]);
    assert!(first.status.success());
    assert!(cache.exists());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,a_k,b_k,gamma_k,log_gamma_k"));
    for (k, line) in lines.take(13).enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0].parse::<usize>().unwrap(), k);
        if k > 0 {
            let b: f64 = cols[2].parse().unwrap();
            assert!((b - (k as f64 / 2.0).sqrt()).abs() < 1e-12);
        }
    }
    let again = orthozeros(&["recurrence", "--n-max", "12", "--cache", c]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn kac_summary_row() {
    let o = orthozeros(&["kac", "--basis", "monomial", "--n", "1", "--full-line"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut it = out.lines().skip_while(|l| !l.starts_with("expected_count"));
    it.next();
    let e: f64 = it.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((e - 1.0).abs() < 1e-9);
}

#[test]
fn simulate_summary_is_json() {
    let o = orthozeros(&["simulate", "--n", "20", "--trials", "50", "--seed", "3", "--eigen-trials", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["mean", "stderr", "ks", "complex_fraction", "kac_expected"] {
        assert!(v[key].is_number(), "{key}");
    }
    let again = orthozeros(&["simulate", "--n", "20", "--trials", "50", "--seed", "3", "--eigen-trials", "5"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn verify_subset() {
    let o = orthozeros(&["verify", "--only", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("criterion  7 PASS"));
}
